"""Cross-checks of the closed-form results against the Fock oracle."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

from gaussent.config import get_settings
from gaussent.errors import CutoffTooSmall, GaussEntError
from gaussent.services.entanglement import (
    LocalData,
    eof_symmetric,
    invariants_from_local,
    log_negativity,
)
from gaussent.services.fock_oracle import (
    BeamSplitter,
    FockOracle,
    FockState,
    GaussianCircuit,
    PhaseShifter,
    Squeezer,
    TwoModeSqueezer,
)
from gaussent.services.gaussian_core import CovarianceMatrix, invariants_direct, mean_parity
from gaussent.services.locc_harness import ShotPlan, run_protocol
from gaussent.services.reconstruction import schur_gamma1

logger = logging.getLogger(__name__)


class Suite(str, Enum):
    IDENTITIES = "identities"
    NEGATIVITY = "negativity"
    PROTOCOL = "protocol"
    ALL = "all"


def identity_circuits() -> dict[str, GaussianCircuit]:
    """States within reach of the default cutoff: r <= 0.8, thermal input <= 0.5."""
    return {
        "tmsv_r0.5": GaussianCircuit.tmsv(0.5),
        "tmsv_r0.8": GaussianCircuit.tmsv(0.8),
        "thermal_squeezed_n0.5_mc0.6": GaussianCircuit.thermal_squeezed(0.5, 0.6),
        "general_mixed": GaussianCircuit(
            gates=(TwoModeSqueezer(0.3), Squeezer(1, 0.15, 0.3), PhaseShifter(2, 0.7), BeamSplitter(0.4)),
            nbar1=0.1,
            nbar2=0.05,
        ),
    }


def negativity_circuits() -> dict[str, GaussianCircuit]:
    """The identity states plus TMSV r = 1 and entangled thermal-squeezed points; needs cutoff 40."""
    circuits = identity_circuits()
    circuits["tmsv_r1.0"] = GaussianCircuit.tmsv(1.0)
    for n, mc in ((0.5, 0.7), (0.5, 0.8), (1.0, 1.2), (1.0, 1.3)):
        circuits[f"thermal_squeezed_n{n}_mc{mc}"] = GaussianCircuit.thermal_squeezed(n, mc)
    return circuits


@dataclass
class VerificationCase:
    suite: str
    case: str
    identity: str
    lhs: float | None
    rhs: float | None
    tol: float
    cutoff: int
    leakage: float | None = None
    error: str | None = None

    @property
    def diff(self) -> float | None:
        if self.lhs is None or self.rhs is None:
            return None
        return abs(self.lhs - self.rhs)

    @property
    def passed(self) -> bool:
        return self.error is None and self.diff is not None and self.diff <= self.tol

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "case": self.case,
            "identity": self.identity,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "diff": self.diff,
            "tol": self.tol,
            "cutoff": self.cutoff,
            "leakage": self.leakage,
            "passed": self.passed,
            "error": self.error,
        }


def _max_param_diff(a: CovarianceMatrix, b: CovarianceMatrix) -> float:
    return max(
        abs(a.n1 - b.n1), abs(a.n2 - b.n2), abs(a.m1 - b.m1),
        abs(a.m2 - b.m2), abs(a.ms - b.ms), abs(a.mc - b.mc),
    )


def _identity_checks(state: FockState, v: CovarianceMatrix) -> list[tuple[str, float, float, float]]:
    measured = FockOracle.covariance_from_state(state)
    g_oracle = FockOracle.gamma1_oracle(state)
    g_schur = schur_gamma1(v)
    dec = FockOracle.parity_decompose(state)
    data = LocalData(measured.v1, measured.v2, g_oracle)
    inv_local = invariants_from_local(data)
    inv_direct = invariants_direct(v)
    return [
        ("covariance_matches_circuit", _max_param_diff(measured, v), 0.0, 1e-8),
        ("gamma1_eta_equals_schur", g_oracle.n, g_schur.n, 1e-6),
        ("gamma1_mu_equals_schur", abs(g_oracle.m - g_schur.m), 0.0, 1e-6),
        ("mean_parity_equals_inverse_sqrt_det_v2", dec.mean_parity, mean_parity(v.v2), 1e-6),
        ("det_v_equals_det_v2_det_gamma1", measured.v2.det * g_oracle.det, v.det, 1e-6 * max(1.0, v.det)),
        ("i3_from_local_data", inv_local.i3_abs, inv_direct.i3_abs, 1e-6),
        ("i4_from_local_data", inv_local.i4, inv_direct.i4, 1e-6 * max(1.0, abs(inv_direct.i4))),
    ]


def _negativity_checks(state: FockState, v: CovarianceMatrix) -> list[tuple[str, float, float, float]]:
    inv = invariants_direct(v)
    pure = abs(1.0 / (4.0 * math.sqrt(v.det)) - 1.0) < 1e-9
    tol = 1e-4 if pure else 1e-3
    checks = [("log_negativity_matches_ppt", FockOracle.log_negativity(state), log_negativity(inv), tol)]
    if pure and abs(v.n1 - v.n2) < 1e-12 and v.m1 == 0 and v.m2 == 0:
        checks.append(("pure_state_eof_equals_entropy", eof_symmetric(inv), FockOracle.reduced_entropy(state), 1e-6))
    return checks


def _run_state_suite(
    suite: Suite,
    circuits: dict[str, GaussianCircuit],
    cutoff: int,
    checks: Callable[[FockState, CovarianceMatrix], list[tuple[str, float, float, float]]],
) -> list[VerificationCase]:
    oracle = FockOracle(cutoff=cutoff)
    cases = []
    for name, circuit in circuits.items():
        try:
            state = oracle.build_state(circuit)
            for identity, lhs, rhs, tol in checks(state, circuit.covariance()):
                cases.append(VerificationCase(suite.value, name, identity, lhs, rhs, tol, cutoff, state.leakage))
        except CutoffTooSmall as exc:
            cases.append(VerificationCase(
                suite.value, name, "build_state", None, None, 0.0, cutoff, exc.leakage, f"CutoffTooSmall: {exc}",
            ))
        except GaussEntError as exc:
            cases.append(VerificationCase(
                suite.value, name, "build_state", None, None, 0.0, cutoff, None, f"{type(exc).__name__}: {exc}",
            ))
    return cases


def _run_protocol_suite(cutoff: int, seed: int | None) -> list[VerificationCase]:
    circuit = GaussianCircuit.tmsv(0.5)
    plan = ShotPlan(
        n_local=20_000,
        n_parity=20_000,
        bootstrap=100,
        photocount_only=True,
        seed=get_settings().default_seed if seed is None else seed,
    )
    truth = log_negativity(invariants_direct(circuit.covariance()))
    try:
        result, _ = run_protocol(circuit, plan, oracle=FockOracle(cutoff=max(cutoff, circuit.suggested_cutoff())))
    except GaussEntError as exc:
        return [VerificationCase(Suite.PROTOCOL.value, "tmsv_r0.5", "run_protocol", None, None, 0.0, cutoff,
                                 None, f"{type(exc).__name__}: {exc}")]
    se = result.stderr.get("log_negativity_bits") or 0.0
    return [
        VerificationCase(Suite.PROTOCOL.value, "tmsv_r0.5", "verdict_entangled",
                         0.0 if result.report.separable else 1.0, 1.0, 0.0, cutoff),
        VerificationCase(Suite.PROTOCOL.value, "tmsv_r0.5", "log_negativity_within_4_stderr",
                         result.report.log_negativity, truth, 4.0 * se, cutoff),
    ]


def run_suite(suite: Suite | str, cutoff: int, seed: int | None = None) -> list[VerificationCase]:
    suite = Suite(suite)
    cases: list[VerificationCase] = []
    if suite in (Suite.IDENTITIES, Suite.ALL):
        cases += _run_state_suite(Suite.IDENTITIES, identity_circuits(), cutoff, _identity_checks)
    if suite in (Suite.NEGATIVITY, Suite.ALL):
        cases += _run_state_suite(Suite.NEGATIVITY, negativity_circuits(), cutoff, _negativity_checks)
    if suite in (Suite.PROTOCOL, Suite.ALL):
        cases += _run_protocol_suite(cutoff, seed)
    failed = [c for c in cases if not c.passed]
    if failed:
        logger.warning(f"{len(failed)} of {len(cases)} verification cases failed")
    return cases
