"""Simulated LOCC protocol: Bob reports V2 and his parity outcomes, Alice
estimates V1 and Gamma1 and decides separability on her own.

The shared copies are prepared by a PairSource that draws Bob's parity
outcomes once per seed. Each party only touches its own station: Bob's
returns his quadratures and parity bits, Alice's returns her measurement
values. Everything Alice learns about mode 2 arrives over the channel.
"""

from __future__ import annotations

import asyncio
import logging
import math
from dataclasses import asdict, dataclass, field
from enum import IntEnum
from typing import Callable

import numpy as np

from gaussent.config import get_settings
from gaussent.errors import (
    ChannelError,
    InvalidInput,
    NumericalInconsistency,
    ProtocolViolation,
    Unsupported,
)
from gaussent.schemas.protocol import Ack, MeasRequest, MessageKind, ParityBatch, V2Report
from gaussent.services.channels import (
    ChannelKind,
    Endpoint,
    ProtocolTranscript,
    ReplayEndpoint,
    open_channel,
)
from gaussent.services.entanglement import (
    EntanglementReport,
    LocalData,
    analyze,
    det_v1_minus_gamma1,
    eof_symmetric,
    invariants_from_local,
    log_negativity,
    simon_gap,
)
from gaussent.services.fock_oracle import (
    FockOracle,
    GaussianCircuit,
    photon_distribution,
    quadrature_pdf,
)
from gaussent.services.gaussian_core import CovarianceMatrix, LocalBlock, to_real_form
from gaussent.services.reconstruction import ConditionedMoments, gamma1_from_conditioned

logger = logging.getLogger(__name__)


class Observable(IntEnum):
    PHOTON = 0
    X0 = 1
    X45 = 2
    X90 = 3


QUADRATURE_ANGLES = {
    Observable.X0: 0.0,
    Observable.X45: math.pi / 4,
    Observable.X90: math.pi / 2,
}
_LOCAL_CYCLE = np.array([Observable.X0, Observable.X45, Observable.X90], dtype=np.int8)
_PARITY_CYCLE = np.array(
    [Observable.PHOTON, Observable.X0, Observable.X45, Observable.X90], dtype=np.int8
)

# SeedSequence children, one per independent random stream
_STREAM_PARITY, _STREAM_BOB_LOCAL, _STREAM_ALICE_LOCAL, _STREAM_ALICE_COND, _STREAM_BOB_BOOT, _STREAM_ALICE_BOOT = range(6)


def _stream(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed).spawn(6)[index])


# ── Plan and records ─────────────────────────────────────


@dataclass(frozen=True)
class ShotPlan:
    n_local: int = field(default_factory=lambda: get_settings().n_local_shots)
    n_parity: int = field(default_factory=lambda: get_settings().n_parity_shots)
    seed: int = field(default_factory=lambda: get_settings().default_seed)
    batch_size: int = field(default_factory=lambda: get_settings().parity_batch_size)
    bootstrap: int = field(default_factory=lambda: get_settings().bootstrap_resamples)
    photocount_only: bool = False

    def __post_init__(self):
        if self.n_local < 2 or self.n_parity < 2:
            raise InvalidInput(f"Need at least 2 shots, got n_local={self.n_local}, n_parity={self.n_parity}")
        if self.batch_size < 1:
            raise InvalidInput(f"batch_size must be positive, got {self.batch_size}")
        if self.bootstrap < 2:
            raise InvalidInput(f"bootstrap needs at least 2 resamples, got {self.bootstrap}")

    def local_schedule(self, count: int) -> np.ndarray:
        if self.photocount_only:
            return np.zeros(count, dtype=np.int8)
        return np.resize(_LOCAL_CYCLE, count)

    def parity_schedule(self, start: int, count: int) -> np.ndarray:
        """Alice's observable for copies start..start+count-1 (fixed in advance)."""
        if self.photocount_only:
            return np.zeros(count, dtype=np.int8)
        return _PARITY_CYCLE[np.arange(start, start + count) % len(_PARITY_CYCLE)]

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(eq=False)
class ShotRecords:
    """Measurement record: observable code and value per shot, plus Bob's bit if conditioned."""
    kinds: np.ndarray
    values: np.ndarray
    bits: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.values)

    def take(self, idx: np.ndarray) -> ShotRecords:
        return ShotRecords(
            kinds=self.kinds[idx],
            values=self.values[idx],
            bits=None if self.bits is None else self.bits[idx],
        )


def _mean_square(values: np.ndarray, mask: np.ndarray) -> float | None:
    sel = values[mask]
    return float(np.mean(sel * sel)) if sel.size else None


def _squeezing_from_variances(v0: float, v45: float, v90: float) -> complex:
    """⟨x_θ²⟩ = n + ½ + Re(m e^{-2iθ}) at θ = 0, π/4, π/2."""
    return complex((v0 - v90) / 2.0, v45 - (v0 + v90) / 2.0)


def estimate_local_block(records: ShotRecords, photocount_only: bool = False) -> LocalBlock:
    if len(records) < 2:
        raise InvalidInput(f"Need at least 2 shots, got {len(records)}")
    if photocount_only:
        return LocalBlock(n=float(np.mean(records.values)))
    v = {k: _mean_square(records.values, records.kinds == k) for k in QUADRATURE_ANGLES}
    if any(x is None for x in v.values()):
        raise InvalidInput("Every quadrature angle needs at least one shot")
    v0, v45, v90 = v[Observable.X0], v[Observable.X45], v[Observable.X90]
    return LocalBlock(n=(v0 + v90) / 2.0 - 0.5, m=_squeezing_from_variances(v0, v45, v90))


def estimate_conditioned_moments(records: ShotRecords, photocount_only: bool = False) -> ConditionedMoments:
    bits = records.bits
    p_odd = float(np.mean(bits))
    groups = {}
    for g in (0, 1):
        in_group = bits == g
        photons = records.values[in_group & (records.kinds == Observable.PHOTON)]
        n_g = float(np.mean(photons)) if photons.size else 0.0
        sq_g = 0j
        if not photocount_only:
            v = [_mean_square(records.values, in_group & (records.kinds == k)) for k in QUADRATURE_ANGLES]
            if all(x is not None for x in v):
                sq_g = _squeezing_from_variances(*v)
        groups[g] = (n_g, sq_g)
    return ConditionedMoments(
        p_even=1.0 - p_odd,
        p_odd=p_odd,
        n_even=groups[0][0],
        n_odd=groups[1][0],
        sq_even=groups[0][1],
        sq_odd=groups[1][1],
    )


# ── Stations ─────────────────────────────────────────────


@dataclass(eq=False)
class ModeMarginal:
    """What a single party's detector sees: quadrature covariance and photon statistics."""
    quadrature_cov: np.ndarray
    photon_probs: np.ndarray

    def sample(self, kinds: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        values = np.empty(kinds.size)
        for kind in Observable:
            mask = kinds == kind
            count = int(mask.sum())
            if not count:
                continue
            if kind == Observable.PHOTON:
                values[mask] = rng.choice(self.photon_probs.size, size=count, p=self.photon_probs)
            else:
                theta = QUADRATURE_ANGLES[kind]
                u = np.array([math.cos(theta), math.sin(theta)])
                values[mask] = rng.normal(0.0, math.sqrt(u @ self.quadrature_cov @ u), size=count)
        return values


def sample_local_moments(
    marginal: ModeMarginal,
    n_shots: int,
    rng: np.random.Generator,
    photocount_only: bool = False,
) -> LocalBlock:
    """One round of local tomography on a single mode."""
    plan_kinds = np.zeros(n_shots, dtype=np.int8) if photocount_only else np.resize(_LOCAL_CYCLE, n_shots)
    records = ShotRecords(plan_kinds, marginal.sample(plan_kinds, rng))
    return estimate_local_block(records, photocount_only)


class ConditionalSampler:
    """Inverse-CDF sampler for Alice's mode given Bob's parity outcome."""

    def __init__(self, rho_even: np.ndarray, rho_odd: np.ndarray, photocount_only: bool, grid_points: int):
        dim = rho_even.shape[0]
        half_width = 1.5 * math.sqrt(2 * dim + 1)
        self.grid = np.linspace(-half_width, half_width, grid_points)
        self._photons = {0: photon_distribution(rho_even), 1: photon_distribution(rho_odd)}
        self._cdfs: dict[tuple[int, Observable], np.ndarray] = {}
        if photocount_only:
            return
        for bit, rho in ((0, rho_even), (1, rho_odd)):
            if not np.any(rho):
                continue
            for kind, theta in QUADRATURE_ANGLES.items():
                pdf = quadrature_pdf(rho, theta, self.grid)
                cdf = np.concatenate(([0.0], np.cumsum((pdf[1:] + pdf[:-1]) / 2.0 * np.diff(self.grid))))
                self._cdfs[(bit, kind)] = cdf / cdf[-1]

    def sample(self, kinds: np.ndarray, bits: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        values = np.zeros(kinds.size)
        for bit in (0, 1):
            for kind in Observable:
                mask = (bits == bit) & (kinds == kind)
                count = int(mask.sum())
                if not count:
                    continue
                if kind == Observable.PHOTON:
                    p = self._photons[bit]
                    values[mask] = rng.choice(p.size, size=count, p=p)
                else:
                    values[mask] = np.interp(rng.random(count), self._cdfs[(bit, kind)], self.grid)
        return values


class PairSource:
    """Prepares the copies of the two-mode state and fixes Bob's parity outcomes."""

    def __init__(self, circuit: GaussianCircuit, plan: ShotPlan, oracle: FockOracle | None = None):
        settings = get_settings()
        self.plan = plan
        if oracle is None:
            oracle = FockOracle(cutoff=max(settings.default_cutoff, circuit.suggested_cutoff()))
        state = oracle.build_state(circuit)
        form = to_real_form(circuit.covariance())
        dec = FockOracle.parity_decompose(state)

        self._marginals = {
            mode: ModeMarginal(form.mode_block(mode), photon_distribution(state.reduced(mode)))
            for mode in (1, 2)
        }
        rng = _stream(plan.seed, _STREAM_PARITY)
        self._bits = (rng.random(plan.n_parity) >= dec.p_even).astype(np.int8)
        self._sampler = ConditionalSampler(
            dec.rho_even, dec.rho_odd, plan.photocount_only, settings.quadrature_grid_points
        )
        logger.info(
            f"Source ready: cutoff={oracle.cutoff}, p_even={dec.p_even:.4f}, copies={plan.n_parity}"
        )

    def bob_station(self) -> BobStation:
        marginal, bits = self._marginals[2], self._bits

        def parity(start: int, count: int) -> np.ndarray:
            if start < 0 or count < 0 or start + count > bits.size:
                raise ProtocolViolation(f"Copies [{start}, {start + count}) out of range")
            return bits[start:start + count].copy()

        return BobStation(marginal, parity, _stream(self.plan.seed, _STREAM_BOB_LOCAL))

    def alice_station(self) -> AliceStation:
        marginal, bits, sampler = self._marginals[1], self._bits, self._sampler
        rng = _stream(self.plan.seed, _STREAM_ALICE_COND)

        def measure(start: int, kinds: np.ndarray) -> np.ndarray:
            return sampler.sample(kinds, bits[start:start + kinds.size], rng)

        return AliceStation(marginal, measure, _stream(self.plan.seed, _STREAM_ALICE_LOCAL))


class BobStation:
    def __init__(self, marginal: ModeMarginal, parity: Callable[[int, int], np.ndarray], rng: np.random.Generator):
        self._marginal = marginal
        self._parity = parity
        self._rng = rng

    def local_records(self, kinds: np.ndarray) -> ShotRecords:
        return ShotRecords(kinds, self._marginal.sample(kinds, self._rng))

    def parity(self, start: int, count: int) -> np.ndarray:
        return self._parity(start, count)


class AliceStation:
    def __init__(self, marginal: ModeMarginal, measure: Callable[[int, np.ndarray], np.ndarray], rng: np.random.Generator):
        self._marginal = marginal
        self._measure = measure
        self._rng = rng

    def local_records(self, kinds: np.ndarray) -> ShotRecords:
        return ShotRecords(kinds, self._marginal.sample(kinds, self._rng))

    def measure(self, start: int, kinds: np.ndarray) -> np.ndarray:
        return self._measure(start, kinds)


# ── Estimation ───────────────────────────────────────────


@dataclass
class EstimationResult:
    v1: LocalBlock
    v2: LocalBlock
    gamma1: LocalBlock
    report: EntanglementReport
    stderr: dict[str, float | None]
    plan: ShotPlan

    @property
    def boundary_uncertain(self) -> bool:
        return self.report.boundary

    @property
    def verdict(self) -> str:
        return "separable" if self.report.separable else "entangled"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "boundary_uncertain": self.boundary_uncertain,
            "estimates": {
                "v1": self.v1.to_dict(),
                "v2": self.v2.to_dict(),
                "gamma1": self.gamma1.to_dict(),
            },
            "report": self.report.to_dict(),
            "stderr": self.stderr,
            "plan": self.plan.to_dict(),
        }


def _stderr(samples: list[float]) -> float | None:
    arr = np.asarray(samples, dtype=float)
    arr = arr[np.isfinite(arr)]
    if arr.size < 2:
        return None
    return float(np.std(arr, ddof=1))


def _replicate(v1: LocalBlock, v2: LocalBlock, gamma1: LocalBlock) -> dict[str, float] | None:
    d = LocalData(v1, v2, gamma1)
    try:
        inv = invariants_from_local(d, tol=math.inf)
    except ValueError:
        return None
    out = {
        "n1": v1.n, "eta1": gamma1.n,
        "i1": inv.i1, "i2": inv.i2, "i3_abs": inv.i3_abs, "i4": inv.i4, "iv": inv.iv,
        "det_v1_minus_gamma1": det_v1_minus_gamma1(d),
        "simon_gap": simon_gap(inv),
        "asymmetry": inv.i1 - inv.i2,
    }
    for key, fn in (
        ("eof_bits", lambda: eof_symmetric(inv, symmetry_tol=math.inf, boundary_tol=0.0)),
        ("log_negativity_bits", lambda: log_negativity(inv, boundary_tol=0.0)),
        ("purity", lambda: 1.0 / (4.0 * math.sqrt(inv.iv))),
    ):
        try:
            out[key] = fn()
        except ValueError:
            out[key] = float("nan")
    return out


def bootstrap_local_block(records: ShotRecords, photocount_only: bool, resamples: int, rng: np.random.Generator):
    """Standard errors of n, Re m, Im m."""
    n, re, im = [], [], []
    size = len(records)
    for _ in range(resamples):
        block = estimate_local_block(records.take(rng.integers(0, size, size)), photocount_only)
        n.append(block.n)
        re.append(block.m.real)
        im.append(block.m.imag)
    return _stderr(n) or 0.0, (_stderr(re) or 0.0, _stderr(im) or 0.0)


def estimate_from_records(
    local: ShotRecords,
    conditioned: ShotRecords,
    v2_report: V2Report,
    plan: ShotPlan,
) -> EstimationResult:
    """Alice's point estimate plus bootstrap errors and confidence flags."""
    settings = get_settings()
    v1 = estimate_local_block(local, plan.photocount_only)
    gamma1 = gamma1_from_conditioned(estimate_conditioned_moments(conditioned, plan.photocount_only))
    v2 = LocalBlock(n=v2_report.n, m=complex(*v2_report.m))

    rng = _stream(plan.seed, _STREAM_ALICE_BOOT)
    reps: dict[str, list[float]] = {}
    n_loc, n_cond = len(local), len(conditioned)
    for _ in range(plan.bootstrap):
        v1_b = estimate_local_block(local.take(rng.integers(0, n_loc, n_loc)), plan.photocount_only)
        try:
            g_b = gamma1_from_conditioned(
                estimate_conditioned_moments(conditioned.take(rng.integers(0, n_cond, n_cond)), plan.photocount_only)
            )
        except ValueError:
            continue
        noise = rng.normal(size=3)
        v2_b = LocalBlock(
            n=v2.n + noise[0] * v2_report.stderr_n,
            m=v2.m + complex(noise[1] * v2_report.stderr_m[0], noise[2] * v2_report.stderr_m[1]),
        )
        replicate = _replicate(v1_b, v2_b, g_b)
        if replicate is None:
            continue
        for key, value in replicate.items():
            reps.setdefault(key, []).append(value)
    stderr = {key: _stderr(values) for key, values in reps.items()}
    if not stderr:
        raise NumericalInconsistency("Every bootstrap replicate was inconsistent")

    i_scale = max(abs(v1.det), abs(v2.det))
    report = analyze(
        LocalData(v1, v2, gamma1),
        symmetry_tol=max(settings.symmetry_tol, settings.symmetry_sigmas * (stderr["asymmetry"] or 0.0) / i_scale),
        boundary_tol=max(settings.boundary_tol, settings.boundary_sigmas * (stderr["simon_gap"] or 0.0)),
        det_tol=max(settings.clamp_tol, settings.boundary_sigmas * (stderr["det_v1_minus_gamma1"] or 0.0)),
        strict=False,
    )
    logger.info(
        f"Estimate: gap={report.simon_gap:.4g} ± {stderr['simon_gap']}, "
        f"verdict={'separable' if report.separable else 'entangled'}, boundary={report.boundary}"
    )
    return EstimationResult(v1=v1, v2=v2, gamma1=gamma1, report=report, stderr=stderr, plan=plan)


# ── Roles ────────────────────────────────────────────────


class BobRole:
    def __init__(self, station: BobStation, endpoint: Endpoint, plan: ShotPlan):
        self.station = station
        self.endpoint = endpoint
        self.plan = plan

    async def _expect_ack(self, sent_seq: int) -> None:
        msg = await self.endpoint.recv(MessageKind.ACK)
        if msg.body().ack_seq != sent_seq:
            raise ProtocolViolation(f"ACK for {msg.body().ack_seq}, expected {sent_seq}", seq=msg.seq)

    async def run(self) -> None:
        records = self.station.local_records(self.plan.local_schedule(self.plan.n_local))
        block = estimate_local_block(records, self.plan.photocount_only)
        se_n, se_m = bootstrap_local_block(
            records, self.plan.photocount_only, self.plan.bootstrap, _stream(self.plan.seed, _STREAM_BOB_BOOT)
        )
        sent = await self.endpoint.send(MessageKind.V2_REPORT, V2Report(
            n=block.n, m=(block.m.real, block.m.imag), stderr_n=se_n, stderr_m=se_m, shots=len(records),
        ))
        await self._expect_ack(sent.seq)
        logger.debug(f"Bob: reported V2 n={block.n:.5f}")

        while True:
            msg = await self.endpoint.recv(MessageKind.MEAS_REQUEST)
            req = msg.body()
            if req.count == 0:
                break
            outcomes = self.station.parity(req.start, req.count)
            sent = await self.endpoint.send(
                MessageKind.PARITY_BATCH, ParityBatch(start=req.start, outcomes=outcomes.tolist())
            )
            await self._expect_ack(sent.seq)


class AliceRole:
    """Holds only her station, her channel endpoint and the shot plan."""

    def __init__(self, station: AliceStation, endpoint: Endpoint, plan: ShotPlan):
        self.station = station
        self.endpoint = endpoint
        self.plan = plan

    async def run(self) -> EstimationResult:
        plan = self.plan
        local = self.station.local_records(plan.local_schedule(plan.n_local))

        msg = await self.endpoint.recv(MessageKind.V2_REPORT)
        v2_report = msg.body()
        await self.endpoint.send(MessageKind.ACK, Ack(ack_seq=msg.seq))

        kinds, values, bits = [], [], []
        for start in range(0, plan.n_parity, plan.batch_size):
            count = min(plan.batch_size, plan.n_parity - start)
            await self.endpoint.send(MessageKind.MEAS_REQUEST, MeasRequest(start=start, count=count))
            batch_kinds = plan.parity_schedule(start, count)
            batch_values = self.station.measure(start, batch_kinds)

            reply = await self.endpoint.recv(MessageKind.PARITY_BATCH)
            batch = reply.body()
            if batch.start != start or len(batch.outcomes) != count:
                raise ProtocolViolation(
                    f"Parity batch for [{batch.start}, +{len(batch.outcomes)}), expected [{start}, +{count})",
                    seq=reply.seq,
                )
            await self.endpoint.send(MessageKind.ACK, Ack(ack_seq=reply.seq))
            kinds.append(batch_kinds)
            values.append(batch_values)
            bits.append(np.asarray(batch.outcomes, dtype=np.int8))

        await self.endpoint.send(MessageKind.MEAS_REQUEST, MeasRequest(start=plan.n_parity, count=0))
        conditioned = ShotRecords(np.concatenate(kinds), np.concatenate(values), np.concatenate(bits))
        return estimate_from_records(local, conditioned, v2_report, plan)


# ── Entry points ─────────────────────────────────────────


def circuit_for(true_state: GaussianCircuit | CovarianceMatrix) -> GaussianCircuit:
    """Parity sampling needs a circuit; covariance input is limited to the thermal-squeezed family."""
    if isinstance(true_state, GaussianCircuit):
        return true_state
    v = true_state
    tol = get_settings().clamp_tol
    standard = (
        abs(v.n1 - v.n2) <= tol
        and max(abs(v.m1), abs(v.m2), abs(v.ms), abs(v.mc.imag)) <= tol
    )
    if not standard:
        raise Unsupported("Only symmetric states with a real m_c can be simulated from a covariance matrix")
    return GaussianCircuit.thermal_squeezed(v.n1, v.mc.real)


def sample_parity_and_conditional(
    true_state: GaussianCircuit | CovarianceMatrix,
    plan: ShotPlan,
    oracle: FockOracle | None = None,
) -> tuple[ConditionedMoments, dict[str, float | None]]:
    """Parity-sorted moments and their bootstrap errors, without a channel."""
    source = PairSource(circuit_for(true_state), plan, oracle)
    kinds = plan.parity_schedule(0, plan.n_parity)
    values = source.alice_station().measure(0, kinds)
    bits = source.bob_station().parity(0, plan.n_parity)
    records = ShotRecords(kinds, values, bits)
    moments = estimate_conditioned_moments(records, plan.photocount_only)

    rng = _stream(plan.seed, _STREAM_ALICE_BOOT)
    reps: dict[str, list[float]] = {"p_even": [], "n_even": [], "n_odd": [], "eta1": []}
    size = len(records)
    for _ in range(plan.bootstrap):
        m = estimate_conditioned_moments(records.take(rng.integers(0, size, size)), plan.photocount_only)
        reps["p_even"].append(m.p_even)
        reps["n_even"].append(m.n_even)
        reps["n_odd"].append(m.n_odd)
        try:
            reps["eta1"].append(gamma1_from_conditioned(m).n)
        except ValueError:
            reps["eta1"].append(float("nan"))
    return moments, {key: _stderr(values) for key, values in reps.items()}


async def run_protocol_async(
    true_state: GaussianCircuit | CovarianceMatrix,
    plan: ShotPlan,
    channel: ChannelKind | str = ChannelKind.IN_PROCESS,
    oracle: FockOracle | None = None,
) -> tuple[EstimationResult, ProtocolTranscript]:
    source = PairSource(circuit_for(true_state), plan, oracle)
    transcript = ProtocolTranscript()
    alice_end, bob_end = await open_channel(channel, transcript)
    alice = AliceRole(source.alice_station(), alice_end, plan)
    bob = BobRole(source.bob_station(), bob_end, plan)
    try:
        result, _ = await asyncio.gather(alice.run(), bob.run())
    except ChannelError as exc:
        exc.transcript = transcript
        raise
    finally:
        await alice_end.close()
        await bob_end.close()
    logger.info(f"Protocol finished: {len(transcript)} messages, verdict={result.verdict}")
    return result, transcript


def run_protocol(
    true_state: GaussianCircuit | CovarianceMatrix,
    plan: ShotPlan,
    channel: ChannelKind | str = ChannelKind.IN_PROCESS,
    oracle: FockOracle | None = None,
) -> tuple[EstimationResult, ProtocolTranscript]:
    return asyncio.run(run_protocol_async(true_state, plan, channel, oracle))


def replay_alice(
    transcript: ProtocolTranscript,
    true_state: GaussianCircuit | CovarianceMatrix,
    plan: ShotPlan,
    oracle: FockOracle | None = None,
) -> EstimationResult:
    """Re-run Alice against the recorded inbound messages."""
    source = PairSource(circuit_for(true_state), plan, oracle)
    alice = AliceRole(source.alice_station(), ReplayEndpoint(transcript), plan)
    return asyncio.run(alice.run())
