"""Gamma1 from parity-conditioned moments and the inversions built on it.

Bob measures the parity of mode 2 on every copy and reports the outcome; Alice
sorts her mode-1 measurements by that outcome. With σ1 = ρ1e p_e - ρ1o p_o,

    Γ1 = V1 - C V2⁻¹ C†

is the covariance of σ1 / Tr σ1, so its entries are parity-weighted moments
normalized by the mean parity p_e - p_o.
"""

from __future__ import annotations

import cmath
import logging
import math
from concurrent.futures import Executor
from dataclasses import dataclass
from enum import Enum
from functools import partial
from typing import Callable

import numpy as np

from gaussent.config import get_settings
from gaussent.errors import (
    DegenerateParity,
    InconsistentInput,
    InvalidInput,
    PhaseUndetermined,
    SingularBlock,
    Unsupported,
)
from gaussent.services.entanglement import LocalData, eof_symmetric
from gaussent.services.gaussian_core import (
    BlockKind,
    CovarianceMatrix,
    LocalBlock,
    invariants_direct,
    rotation,
    squeezer,
    thermal_squeezed,
)

logger = logging.getLogger(__name__)


class ParityNormalization(str, Enum):
    """How parity-weighted moments are turned into Gamma1 entries."""
    SIGMA_TRACE = "sigma_trace"
    PLAIN_DIFFERENCE = "plain_difference"


class SpecialClass(str, Enum):
    """Correlation block with a single non-zero entry type."""
    DIAGONAL_MS = "diagonal_ms"
    ANTIDIAGONAL_MC = "antidiagonal_mc"


@dataclass(frozen=True)
class ConditionedMoments:
    """Mode-1 moments conditioned on Bob's even/odd outcome."""
    p_even: float
    p_odd: float
    n_even: float
    n_odd: float
    sq_even: complex = 0j
    sq_odd: complex = 0j

    def __post_init__(self):
        values = (self.p_even, self.p_odd, self.n_even, self.n_odd, self.sq_even, self.sq_odd)
        if not all(cmath.isfinite(complex(x)) for x in values):
            raise InvalidInput("Conditioned moments must be finite")
        if self.p_even < 0 or self.p_odd < 0:
            raise InvalidInput(f"Negative outcome probability: {self.p_even}, {self.p_odd}")
        if abs(self.p_even + self.p_odd - 1.0) > 1e-9:
            raise InvalidInput(f"p_even + p_odd = {self.p_even + self.p_odd} != 1")

    @property
    def mean_parity(self) -> float:
        return self.p_even - self.p_odd


@dataclass(frozen=True)
class RecoveredCorrelation:
    """A correlation entry recovered from local data; the phase is fixed mod π."""
    magnitude: float
    phase: float
    variant: SpecialClass

    @property
    def value(self) -> complex:
        return self.magnitude * cmath.exp(1j * self.phase)

    def to_dict(self) -> dict:
        return {
            "variant": self.variant.value,
            "magnitude": self.magnitude,
            "phase": self.phase,
            "phase_modulo": "pi",
        }


# ── Forward direction ───────────────────────────────────


def schur_gamma1(v: CovarianceMatrix) -> LocalBlock:
    """Γ1 = V1 - C V2⁻¹ C†."""
    v2 = v.v2.matrix
    if abs(v.v2.det) <= get_settings().clamp_tol:
        raise SingularBlock(f"det V2 = {v.v2.det} is too small to invert")
    c = v.c
    g = v.v1.matrix - c @ np.linalg.solve(v2, c.conj().T)
    return LocalBlock.from_matrix(g, kind=BlockKind.SCHUR)


def local_data(v: CovarianceMatrix) -> LocalData:
    return LocalData(v1=v.v1, v2=v.v2, gamma1=schur_gamma1(v))


def gamma1_from_conditioned(
    m: ConditionedMoments,
    normalization: ParityNormalization | str | None = None,
    tol: float | None = None,
) -> LocalBlock:
    """η1 and μ1 from parity-sorted moments."""
    settings = get_settings()
    normalization = ParityNormalization(normalization or settings.parity_normalization)
    tol = settings.parity_tol if tol is None else tol

    trace = m.mean_parity
    if abs(trace) <= tol:
        raise DegenerateParity(f"|p_even - p_odd| = {abs(trace):.3e} too small")

    if normalization == ParityNormalization.SIGMA_TRACE:
        eta = (m.p_even * m.n_even - m.p_odd * m.n_odd) / trace
        mu = (m.p_even * m.sq_even - m.p_odd * m.sq_odd) / trace
    else:
        eta = m.n_even - m.n_odd
        mu = m.sq_even - m.sq_odd
    return LocalBlock(n=eta, m=mu, kind=BlockKind.SCHUR)


def forward_relations(v: CovarianceMatrix) -> tuple[float, complex]:
    """Closed forms of n1 - η1 and m1 - μ1 in terms of the correlations."""
    big_n = v.n2 + 0.5
    d = v.v2.det
    if abs(d) <= get_settings().clamp_tol:
        raise SingularBlock(f"det V2 = {d} is too small to invert")
    ms, mc, m2 = v.ms, v.mc, v.m2
    dn = (big_n * (abs(ms) ** 2 + abs(mc) ** 2)
          - 2.0 * (ms * mc.conjugate() * m2).real) / d
    dm = (2.0 * big_n * ms * mc
          - ms * ms * m2 - mc * mc * m2.conjugate()) / d
    return dn, complex(dm)


# ── Inversions ──────────────────────────────────────────


def _check_gap(n1: float, eta1: float) -> float:
    tol = get_settings().clamp_tol
    delta = n1 - eta1
    if delta < -tol:
        raise InconsistentInput(f"eta1 = {eta1} exceeds n1 = {n1}")
    return max(delta, 0.0)


def correlation_magnitude(v2: LocalBlock, eta1: float, n1: float) -> float:
    """|m_s| or |m_c| from the photon-number shift alone."""
    delta = _check_gap(n1, eta1)
    big_n = v2.n + 0.5
    return math.sqrt(delta * v2.det / big_n)


def invert_special_class(
    v2: LocalBlock,
    eta1: float,
    mu1: complex,
    n1: float,
    m1: complex,
    tag: SpecialClass,
    tol: float | None = None,
) -> RecoveredCorrelation:
    """Recover the single correlation entry of a special-class state.

    The magnitude comes from the photon-number shift; the phase (mod π) from the
    squeezing shift, which needs m2 ≠ 0.
    """
    tol = get_settings().phase_tol if tol is None else tol
    delta = _check_gap(n1, eta1)
    magnitude = correlation_magnitude(v2, eta1, n1)
    if abs(v2.m) <= tol:
        raise PhaseUndetermined("m2 = 0: phase of the correlation is not observable", magnitude)
    shift = m1 - mu1
    if abs(shift) <= tol or delta <= tol:
        raise PhaseUndetermined("No squeezing shift: phase is not observable", magnitude)

    m2 = v2.m.conjugate() if tag == SpecialClass.ANTIDIAGONAL_MC else v2.m
    # m1 - μ1 = -e^{2iφ} m2 (n1 - η1) / N
    e2iphi = -shift * (v2.n + 0.5) / (m2 * delta)
    phase = (cmath.phase(e2iphi) / 2.0) % math.pi
    return RecoveredCorrelation(magnitude=magnitude, phase=phase, variant=tag)


@dataclass(frozen=True)
class LocalTransform:
    """Gaussian unitary Bob may apply to his mode: rotation, then squeezing."""
    squeeze: float = 0.0
    angle: float = 0.0
    rotation: float = 0.0

    @property
    def matrix(self) -> np.ndarray:
        return squeezer(self.squeeze, self.angle) @ rotation(self.rotation)

    @property
    def is_identity(self) -> bool:
        return self.squeeze == 0.0 and self.rotation % (2 * math.pi) == 0.0

    def undo(self, block: LocalBlock) -> LocalBlock:
        t_inv = np.linalg.inv(self.matrix)
        return LocalBlock.from_matrix(t_inv @ block.matrix @ t_inv.conj().T)


def phase_via_local_transform(
    v2_report: LocalBlock,
    provider: Callable[[LocalTransform], LocalData] | None,
    transform: LocalTransform,
    tag: SpecialClass,
    tol: float | None = None,
) -> RecoveredCorrelation:
    """Try to fix the phase when m2 = 0 by having Bob transform his mode first.

    The provider re-runs the conditioned measurement after Bob applies the
    transform. Bob's transformed block is mapped back with the inverse
    transform and the special-class inversion is solved in the original frame.
    Because parity commutes with Bob's Gaussian unitaries, Γ1 comes back
    unchanged, so for m2 = 0 this still ends in PhaseUndetermined.
    """
    if provider is None:
        raise Unsupported("No conditioned-data provider for the transformed measurement")

    data = provider(transform)
    v2_back = transform.undo(data.v2) if not transform.is_identity else data.v2
    if abs(v2_back.n - v2_report.n) > 1e-6 or abs(v2_back.m - v2_report.m) > 1e-6:
        logger.warning(
            f"Back-transformed V2 (n={v2_back.n:.6f}) differs from the report (n={v2_report.n:.6f})"
        )
    try:
        return invert_special_class(
            v2_report, data.gamma1.n, data.gamma1.m, data.v1.n, data.v1.m, tag, tol
        )
    except PhaseUndetermined as exc:
        if not transform.is_identity:
            logger.info("Bob-local transform left Gamma1 unchanged; phase stays undetermined")
            raise PhaseUndetermined(
                "Local transforms on mode 2 do not change Gamma1; phase is not recoverable",
                exc.magnitude,
            ) from exc
        raise


# ── Symmetric thermal-squeezed family ───────────────────


def eta1_from_photocounts(n: float, mc: float) -> float:
    """η1 = n - m_c² / (n + ½) for n1 = n2 = n."""
    if n < 0:
        raise InvalidInput(f"n must be non-negative, got {n}")
    return n - mc * mc / (n + 0.5)


def m_c_from_eta1(n: float, eta1: float) -> float:
    """m_c = √((n - η1)(n + ½)), the non-negative root."""
    if n < 0:
        raise InvalidInput(f"n must be non-negative, got {n}")
    delta = _check_gap(n, eta1)
    return math.sqrt(delta * (n + 0.5))


def sgs_bounds(n: float) -> tuple[float, float]:
    """Range of η1 for this family: ±(n/2)/(n + ½).

    Below the lower bound the state violates the uncertainty relation; above
    the upper bound it is separable.
    """
    if n < 0 or not math.isfinite(n):
        raise InvalidInput(f"n must be a non-negative number, got {n}")
    b = (n / 2.0) / (n + 0.5)
    return -b, b


# ── Phase diagram ───────────────────────────────────────


class CellClass(str, Enum):
    UNPHYSICAL = "unphysical"
    ENTANGLED = "entangled"
    BOUNDARY = "boundary"
    SEPARABLE = "separable"


@dataclass(frozen=True)
class PhaseCell:
    n: float
    eta1: float
    cls: CellClass
    ef_bits: float | None = None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "eta1": self.eta1,
            "class": self.cls.value,
            "ef_bits": "" if self.ef_bits is None else self.ef_bits,
        }


def classify_cell(n: float, eta1: float, tol: float | None = None) -> PhaseCell:
    tol = get_settings().grid_boundary_tol if tol is None else tol
    lo, hi = sgs_bounds(n)

    if eta1 < lo - tol or eta1 > n:
        return PhaseCell(n, eta1, CellClass.UNPHYSICAL)
    if abs(eta1 - hi) <= tol:
        return PhaseCell(n, eta1, CellClass.BOUNDARY, 0.0)
    if eta1 > hi:
        return PhaseCell(n, eta1, CellClass.SEPARABLE)

    mc = m_c_from_eta1(n, max(eta1, lo))
    inv = invariants_direct(thermal_squeezed(n, mc))
    return PhaseCell(n, eta1, CellClass.ENTANGLED, eof_symmetric(inv))


def _classify_row(n: float, eta1_grid: list[float], tol: float | None) -> list[PhaseCell]:
    return [classify_cell(n, eta, tol) for eta in eta1_grid]


def phase_diagram(
    n_grid: list[float],
    eta1_grid: list[float],
    tol: float | None = None,
    executor: Executor | None = None,
) -> list[PhaseCell]:
    """Classify every (n, η1) cell; rows can be farmed out to an executor."""
    for n in n_grid:
        if n < 0 or not math.isfinite(n):
            raise InvalidInput(f"Grid value n={n} must be a non-negative number")

    row = partial(_classify_row, eta1_grid=list(eta1_grid), tol=tol)
    rows = executor.map(row, n_grid) if executor is not None else map(row, n_grid)
    cells = [cell for r in rows for cell in r]
    logger.info(f"Phase diagram: {len(n_grid)}x{len(eta1_grid)} cells")
    return cells
