"""Separability and entanglement measures from local data.

Alice holds V1 and Gamma1, Bob reports V2. From these three 2x2 blocks the
invariants |I3|, I4 and I_V are rebuilt without ever seeing the correlation
block, and every measure below works on that reconstructed set.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from gaussent.config import get_settings
from gaussent.errors import (
    InconsistentLocalData,
    InvalidInput,
    InvalidState,
    NumericalInconsistency,
    OutOfDomain,
)
from gaussent.services.gaussian_core import (
    BlockKind,
    CovarianceMatrix,
    I3Sign,
    InvariantSet,
    LocalBlock,
    purity_from_det,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LocalData:
    """What the two parties can assemble without a joint measurement."""
    v1: LocalBlock
    v2: LocalBlock
    gamma1: LocalBlock

    @classmethod
    def from_covariance(cls, v: CovarianceMatrix) -> LocalData:
        from gaussent.services.reconstruction import schur_gamma1

        return cls(v1=v.v1, v2=v.v2, gamma1=schur_gamma1(v))

    def to_dict(self) -> dict:
        return {"v1": self.v1.to_dict(), "v2": self.v2.to_dict(), "gamma1": self.gamma1.to_dict()}


# ── Invariants from local data ──────────────────────────


def det_v1_minus_gamma1(d: LocalData) -> float:
    diff = d.v1.matrix - d.gamma1.matrix
    return float(np.real(diff[0, 0] * diff[1, 1] - diff[0, 1] * diff[1, 0]))


def invariants_from_local(d: LocalData, tol: float | None = None) -> InvariantSet:
    """|I3| = √(I2 det(V1 - Γ1)), I_V = I2 det Γ1, I4 = I1 I2 + I3² - I_V.

    The sign of I3 is not observable here and is left UNKNOWN.
    """
    tol = get_settings().clamp_tol if tol is None else tol
    i1 = d.v1.det
    i2 = d.v2.det
    if i2 <= 0:
        raise InconsistentLocalData(f"det V2 must be positive, got {i2}")

    det_diff = det_v1_minus_gamma1(d)
    if det_diff < -tol:
        raise InconsistentLocalData(f"det(V1 - Gamma1) = {det_diff:.3e} is negative")
    if det_diff < 0:
        logger.debug(f"Clamping det(V1 - Gamma1) = {det_diff:.3e} to zero")
        det_diff = 0.0

    i3_abs = math.sqrt(i2 * det_diff)
    iv = i2 * d.gamma1.det
    i4 = i1 * i2 + i3_abs ** 2 - iv
    return InvariantSet(i1=i1, i2=i2, i3_abs=i3_abs, i3_sign=I3Sign.UNKNOWN, i4=i4, iv=iv)


def i3_standard_form(i1: float, i2: float, iv: float, tol: float | None = None) -> float:
    """|I3| for states whose standard form has m_s = 0: √(I1 I2) - √I_V."""
    tol = get_settings().clamp_tol if tol is None else tol
    if iv < -tol or iv > i1 * i2 + tol:
        raise OutOfDomain(f"I_V = {iv} outside [0, I1*I2 = {i1 * i2}]")
    return math.sqrt(max(i1 * i2, 0.0)) - math.sqrt(max(iv, 0.0))


def i4_letter_relation(i1: float, i2: float, i3_abs: float) -> float:
    """Relation I4 = 2|I3|√(I1 I2); holds only on a measure-zero family."""
    if i1 < 0 or i2 < 0 or i3_abs < 0:
        raise OutOfDomain(f"Invariants must be non-negative: {i1}, {i2}, {i3_abs}")
    return 2.0 * i3_abs * math.sqrt(i1 * i2)


# ── Separability ────────────────────────────────────────


@dataclass(frozen=True)
class SimonVerdict:
    separable: bool
    boundary: bool
    gap: float


def simon_gap(i: InvariantSet) -> float:
    """LHS - RHS of I1 I2 + (¼ - |I3|)² - I4 ≥ (I1 + I2)/4.

    Uses -|I3| for I3, which is the only case where entanglement is possible.
    """
    return i.i1 * i.i2 + (0.25 - i.i3_abs) ** 2 - i.i4 - (i.i1 + i.i2) / 4.0


def simon_test(i: InvariantSet, tol: float | None = None) -> SimonVerdict:
    tol = get_settings().boundary_tol if tol is None else tol
    gap = simon_gap(i)
    return SimonVerdict(separable=gap >= -tol, boundary=abs(gap) <= tol, gap=gap)


def simon_separable(i: InvariantSet, tol: float | None = None) -> bool:
    return simon_test(i, tol).separable


def p_representable(v: CovarianceMatrix, tol: float | None = None) -> bool:
    """V - I/2 ⪰ 0: the state is a mixture of coherent states."""
    tol = get_settings().positivity_tol if tol is None else tol
    return float(np.linalg.eigvalsh(v.matrix - np.eye(4) / 2.0)[0]) >= -tol


# ── Entropies and measures ──────────────────────────────


def _xlog2x(x: float) -> float:
    return x * math.log2(x) if x > 0 else 0.0


def thermal_entropy(nbar: float) -> float:
    """von Neumann entropy (bits) of a thermal state with mean occupation nbar."""
    if nbar <= 0:
        return 0.0
    return _xlog2x(nbar + 1.0) - _xlog2x(nbar)


def reduced_entropy(block: LocalBlock) -> float:
    """Entropy of a one-mode Gaussian block from its symplectic eigenvalue √det."""
    if block.kind != BlockKind.PHYSICAL:
        raise InvalidInput("Entropy is defined for physical blocks only")
    nu = math.sqrt(max(block.det, 0.0))
    return thermal_entropy(nu - 0.5)


def _eof_of_x(x: float) -> float:
    c_plus = (x ** -0.5 + x ** 0.5) ** 2 / 4.0
    c_minus = (x ** -0.5 - x ** 0.5) ** 2 / 4.0
    return _xlog2x(c_plus) - _xlog2x(c_minus)


def is_symmetric(i: InvariantSet, symmetry_tol: float | None = None) -> bool:
    """I1 = I2 within symmetry_tol, relative to the larger determinant."""
    symmetry_tol = get_settings().symmetry_tol if symmetry_tol is None else symmetry_tol
    return abs(i.i1 - i.i2) <= symmetry_tol * max(abs(i.i1), abs(i.i2))


def eof_symmetric(
    i: InvariantSet,
    symmetry_tol: float | None = None,
    boundary_tol: float | None = None,
) -> float:
    """Entanglement of formation (bits) for symmetric states.

    The two local determinants are averaged; they coincide within symmetry_tol,
    which is relative to the larger of them.
    """
    settings = get_settings()
    if not is_symmetric(i, symmetry_tol):
        raise OutOfDomain(f"State is not symmetric: I1={i.i1}, I2={i.i2}")
    if simon_separable(i, boundary_tol):
        return 0.0

    i_loc = (i.i1 + i.i2) / 2.0
    radicand = i.i4 + 2.0 * i_loc * i.i3_abs
    if radicand < 0:
        raise NumericalInconsistency(f"I4 + 2 I1 |I3| = {radicand:.3e} is negative")
    inner = i_loc + i.i3_abs - math.sqrt(radicand)
    if inner < -settings.clamp_tol:
        raise NumericalInconsistency(f"EoF radicand {inner:.3e} is negative")
    if inner <= 0:
        raise NumericalInconsistency("EoF argument vanished (infinite squeezing)")

    x = 2.0 * math.sqrt(inner)
    if x >= 1.0:
        return 0.0
    return max(_eof_of_x(x), 0.0)


def log_negativity(i: InvariantSet, boundary_tol: float | None = None) -> float:
    """E_N = max(0, -log2(2 ν̃₋)) with I3 = -|I3| for entangled states."""
    settings = get_settings()
    if simon_separable(i, boundary_tol):
        return 0.0
    if i.i3_sign == I3Sign.NONNEG and i.i3_abs > 0:
        raise NumericalInconsistency("Entangled verdict with non-negative I3")

    delta = i.i1 + i.i2 + 2.0 * i.i3_abs
    disc = delta * delta - 4.0 * i.iv
    if disc < -settings.clamp_tol * max(1.0, delta * delta):
        raise NumericalInconsistency(f"Negative discriminant {disc:.3e}")
    denom = delta + math.sqrt(max(disc, 0.0))
    if i.iv <= 0 or denom <= 0:
        raise NumericalInconsistency(f"Invalid symplectic spectrum (I_V={i.iv})")
    # ν̃₋² ν̃₊² = I_V, so the small root is taken from the product.
    nu_minus = math.sqrt(2.0 * i.iv / denom)
    return max(0.0, -math.log2(2.0 * nu_minus))


# ── Report ──────────────────────────────────────────────


@dataclass
class EntanglementReport:
    separable: bool
    invariants: InvariantSet
    purity: float | None
    eof: float | None
    log_negativity: float | None
    symmetric: bool
    boundary: bool = False
    simon_gap: float = 0.0

    def to_dict(self) -> dict:
        return {
            "separable": self.separable,
            "purity": self.purity,
            "i1": self.invariants.i1,
            "i2": self.invariants.i2,
            "i3_abs": self.invariants.i3_abs,
            "i4": self.invariants.i4,
            "iv": self.invariants.iv,
            "eof_bits": self.eof,
            "log_negativity_bits": self.log_negativity,
            "symmetric": self.symmetric,
            "boundary_flag": self.boundary,
        }


def analyze(
    d: LocalData,
    symmetry_tol: float | None = None,
    boundary_tol: float | None = None,
    det_tol: float | None = None,
    strict: bool = True,
) -> EntanglementReport:
    """Full verdict from local data: invariants, Simon test, purity, EoF and E_N.

    With strict=False a measure that cannot be evaluated on noisy estimates is
    reported as None instead of raising.
    """
    inv = invariants_from_local(d, tol=det_tol)
    verdict = simon_test(inv, boundary_tol)
    # Entanglement requires I3 < 0; a separable verdict says nothing about the sign.
    inv = inv.with_sign(I3Sign.UNKNOWN if verdict.separable else I3Sign.NEGATIVE)

    symmetric = is_symmetric(inv, symmetry_tol)

    def measure(fn, *args):
        try:
            return fn(*args)
        except (NumericalInconsistency, InvalidState):
            if strict:
                raise
            logger.warning(f"{fn.__name__} could not be evaluated on these estimates")
            return None

    report = EntanglementReport(
        separable=verdict.separable,
        invariants=inv,
        purity=measure(purity_from_det, inv.iv),
        eof=measure(eof_symmetric, inv, symmetry_tol, boundary_tol) if symmetric else None,
        log_negativity=measure(log_negativity, inv, boundary_tol),
        symmetric=symmetric,
        boundary=verdict.boundary,
        simon_gap=verdict.gap,
    )
    logger.debug(
        f"analyze: gap={verdict.gap:.3e} separable={report.separable} "
        f"E_N={report.log_negativity} eof={report.eof}"
    )
    return report
