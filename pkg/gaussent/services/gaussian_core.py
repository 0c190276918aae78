"""Two-mode Gaussian covariance matrices in the complex (a, a†) convention.

Vector ordering is v = (a1, a1†, a2, a2†) and V_ij = ⟨{v_i, v_j†}⟩ / 2, with

    n_k = ⟨a_k† a_k⟩,  m_k = ⟨a_k²⟩,  m_s = ⟨a1 a2†⟩,  m_c = ⟨a1 a2⟩.

Gaussian unitaries act as V -> S V S†, where S is the Heisenberg action on v.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from gaussent.config import get_settings
from gaussent.errors import GenerationFailure, InvalidInput, InvalidState

logger = logging.getLogger(__name__)

Z = np.diag([1.0, -1.0])
E = np.diag([1.0, -1.0, 1.0, -1.0])
_OMEGA_MODE = np.array([[1.0, 1.0], [-1.0j, 1.0j]]) / math.sqrt(2.0)
OMEGA = np.kron(np.eye(2), _OMEGA_MODE)


def _finite(*values: complex) -> bool:
    return all(cmath.isfinite(complex(v)) for v in values)


# ── Local blocks ────────────────────────────────────────


class BlockKind(str, Enum):
    """Whether a 2x2 block must satisfy the one-mode uncertainty relation."""
    PHYSICAL = "physical"
    SCHUR = "schur"


@dataclass(frozen=True)
class LocalBlock:
    """Hermitian 2x2 block [[n+½, m], [m*, n+½]] of one mode.

    Schur-complement blocks (Gamma1) reuse the same shape but may have a
    negative diagonal parameter.
    """
    n: float
    m: complex = 0j
    kind: BlockKind = BlockKind.PHYSICAL

    def __post_init__(self):
        if not _finite(self.n, self.m):
            raise InvalidInput(f"Non-finite block entries: n={self.n}, m={self.m}")
        object.__setattr__(self, "n", float(np.real(self.n)))
        object.__setattr__(self, "m", complex(self.m))

    @property
    def matrix(self) -> np.ndarray:
        d = self.n + 0.5
        return np.array([[d, self.m], [self.m.conjugate(), d]], dtype=complex)

    @property
    def det(self) -> float:
        return (self.n + 0.5) ** 2 - abs(self.m) ** 2

    def is_valid(self, tol: float | None = None) -> bool:
        """Physical blocks need n+½ ≥ |m| and det ≥ ¼; Schur blocks are unconstrained."""
        if self.kind == BlockKind.SCHUR:
            return True
        tol = get_settings().positivity_tol if tol is None else tol
        return self.n + 0.5 >= abs(self.m) - tol and self.det >= 0.25 - tol

    @classmethod
    def from_matrix(cls, mat: np.ndarray, kind: BlockKind = BlockKind.PHYSICAL) -> LocalBlock:
        mat = np.asarray(mat)
        n = float(np.real(mat[0, 0] + mat[1, 1])) / 2.0 - 0.5
        return cls(n=n, m=complex(mat[0, 1]), kind=kind)

    def to_dict(self) -> dict:
        return {"n": self.n, "m": [self.m.real, self.m.imag], "kind": self.kind.value}


# ── Two-mode covariance matrix ──────────────────────────


@dataclass(frozen=True)
class CovarianceMatrix:
    """Zero-mean two-mode Gaussian state, stored through its six parameters."""
    n1: float
    n2: float
    m1: complex = 0j
    m2: complex = 0j
    ms: complex = 0j
    mc: complex = 0j

    def __post_init__(self):
        if not _finite(self.n1, self.n2, self.m1, self.m2, self.ms, self.mc):
            raise InvalidInput("Covariance parameters must be finite")
        for name in ("n1", "n2"):
            object.__setattr__(self, name, float(np.real(getattr(self, name))))
        for name in ("m1", "m2", "ms", "mc"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    @property
    def matrix(self) -> np.ndarray:
        a, b = self.n1 + 0.5, self.n2 + 0.5
        m1, m2, ms, mc = self.m1, self.m2, self.ms, self.mc
        return np.array([
            [a, m1, ms, mc],
            [m1.conjugate(), a, mc.conjugate(), ms.conjugate()],
            [ms.conjugate(), mc, b, m2],
            [mc.conjugate(), ms, m2.conjugate(), b],
        ], dtype=complex)

    @property
    def v1(self) -> LocalBlock:
        return LocalBlock(self.n1, self.m1)

    @property
    def v2(self) -> LocalBlock:
        return LocalBlock(self.n2, self.m2)

    @property
    def c(self) -> np.ndarray:
        return np.array([[self.ms, self.mc], [self.mc.conjugate(), self.ms.conjugate()]], dtype=complex)

    @property
    def det(self) -> float:
        return float(np.real(np.linalg.det(self.matrix)))

    @classmethod
    def from_matrix(cls, mat: np.ndarray) -> CovarianceMatrix:
        """Read the six parameters back from a 4x4 matrix of the displayed shape."""
        mat = np.asarray(mat, dtype=complex)
        return cls(
            n1=float(np.real(mat[0, 0] + mat[1, 1])) / 2.0 - 0.5,
            n2=float(np.real(mat[2, 2] + mat[3, 3])) / 2.0 - 0.5,
            m1=mat[0, 1],
            m2=mat[2, 3],
            ms=mat[0, 2],
            mc=mat[0, 3],
        )

    def transformed(self, s: np.ndarray) -> CovarianceMatrix:
        """Apply a Gaussian unitary given by its complex symplectic matrix."""
        return CovarianceMatrix.from_matrix(s @ self.matrix @ s.conj().T)

    def with_noise(self, eps: float) -> CovarianceMatrix:
        """Add eps·I (isotropic classical noise on both modes)."""
        return replace(self, n1=self.n1 + eps, n2=self.n2 + eps)

    def to_dict(self) -> dict:
        pair = lambda z: [z.real, z.imag]  # noqa: E731
        return {
            "n1": self.n1, "n2": self.n2,
            "m1": pair(self.m1), "m2": pair(self.m2),
            "ms": pair(self.ms), "mc": pair(self.mc),
        }


def assemble(
    n1: float,
    n2: float,
    m1: complex = 0j,
    m2: complex = 0j,
    ms: complex = 0j,
    mc: complex = 0j,
) -> CovarianceMatrix:
    """Build V from its parameters; physicality is checked separately."""
    return CovarianceMatrix(n1=n1, n2=n2, m1=m1, m2=m2, ms=ms, mc=mc)


# ── Physicality ─────────────────────────────────────────


@dataclass(frozen=True)
class PhysicalCheck:
    positive: bool
    uncertainty: bool
    min_eigenvalue: float = 0.0
    min_uncertainty_eigenvalue: float = 0.0

    @property
    def ok(self) -> bool:
        return self.positive and self.uncertainty

    @property
    def reason(self) -> str:
        if not self.uncertainty:
            return "uncertainty principle violated"
        if not self.positive:
            return "covariance matrix is not positive semidefinite"
        return "physical"

    def to_dict(self) -> dict:
        return {
            "positive": self.positive,
            "uncertainty": self.uncertainty,
            "min_eigenvalue": self.min_eigenvalue,
            "min_uncertainty_eigenvalue": self.min_uncertainty_eigenvalue,
        }


def check_physical(v: CovarianceMatrix, tol: float | None = None) -> PhysicalCheck:
    """V ⪰ 0 and V + E/2 ⪰ 0, with E = diag(1, -1, 1, -1)."""
    tol = get_settings().positivity_tol if tol is None else tol
    mat = v.matrix
    lam = float(np.linalg.eigvalsh(mat)[0])
    lam_u = float(np.linalg.eigvalsh(mat + E / 2.0)[0])
    return PhysicalCheck(
        positive=lam >= -tol,
        uncertainty=lam_u >= -tol,
        min_eigenvalue=lam,
        min_uncertainty_eigenvalue=lam_u,
    )


def purity_from_det(det_v: float) -> float:
    if det_v <= 0:
        raise InvalidState(f"det V must be positive, got {det_v}")
    return 1.0 / (4.0 * math.sqrt(det_v))


def purity(v: CovarianceMatrix) -> float:
    """Tr ρ² = 1 / (4 √det V)."""
    return purity_from_det(v.det)


def mean_parity(block: LocalBlock) -> float:
    """⟨(-1)^{a†a}⟩ of a one-mode Gaussian block: 1 / (2 √det)."""
    if block.det <= 0:
        raise InvalidState(f"Block determinant must be positive, got {block.det}")
    return 1.0 / (2.0 * math.sqrt(block.det))


# ── Invariants ──────────────────────────────────────────


class I3Sign(str, Enum):
    NEGATIVE = "negative"
    NONNEG = "nonneg"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class InvariantSet:
    """Local symplectic invariants of a two-mode covariance matrix."""
    i1: float
    i2: float
    i3_abs: float
    i3_sign: I3Sign
    i4: float
    iv: float

    @property
    def i3(self) -> float | None:
        if self.i3_sign == I3Sign.NEGATIVE:
            return -self.i3_abs
        if self.i3_sign == I3Sign.NONNEG:
            return self.i3_abs
        return None

    @property
    def identity_residual(self) -> float:
        """I_V - (I1 I2 - I4 + I3²); zero for a consistent set."""
        return self.iv - (self.i1 * self.i2 - self.i4 + self.i3_abs ** 2)

    def with_sign(self, sign: I3Sign) -> InvariantSet:
        return replace(self, i3_sign=sign)

    def to_dict(self) -> dict:
        return {
            "i1": self.i1, "i2": self.i2,
            "i3_abs": self.i3_abs, "i3_sign": self.i3_sign.value,
            "i4": self.i4, "iv": self.iv,
        }


def invariants_direct(v: CovarianceMatrix) -> InvariantSet:
    """Compute I1..I4 and I_V from the full matrix."""
    v1, v2, c = v.v1.matrix, v.v2.matrix, v.c
    i3 = float(np.real(np.linalg.det(c)))
    i4 = float(np.real(np.trace(v1 @ Z @ c @ Z @ v2 @ Z @ c.conj().T @ Z)))
    return InvariantSet(
        i1=v.v1.det,
        i2=v.v2.det,
        i3_abs=abs(i3),
        i3_sign=I3Sign.NEGATIVE if i3 < 0 else I3Sign.NONNEG,
        i4=i4,
        iv=v.det,
    )


# ── Real quadrature form ────────────────────────────────


@dataclass(frozen=True, eq=False)
class RealQuadratureForm:
    """σ_ij = ⟨{q_i, q_j}⟩ / 2 for q = (x1, p1, x2, p2)."""
    matrix: np.ndarray = field(repr=False)

    def mode_block(self, mode: int) -> np.ndarray:
        k = 2 * (mode - 1)
        return self.matrix[k:k + 2, k:k + 2]

    def quadrature_variance(self, mode: int, theta: float) -> float:
        """Variance of x_θ = x cos θ + p sin θ on the given mode."""
        u = np.array([math.cos(theta), math.sin(theta)])
        return float(u @ self.mode_block(mode) @ u)


def to_real_form(v: CovarianceMatrix) -> RealQuadratureForm:
    sigma = OMEGA @ v.matrix @ OMEGA.conj().T
    return RealQuadratureForm(np.real(sigma))


def from_real_form(form: RealQuadratureForm) -> CovarianceMatrix:
    return CovarianceMatrix.from_matrix(OMEGA.conj().T @ form.matrix @ OMEGA)


# ── Symplectic building blocks ──────────────────────────


def squeezer(s: float, theta: float = 0.0) -> np.ndarray:
    """One-mode squeezer: a -> a cosh s - e^{iθ} a† sinh s."""
    ch, sh = math.cosh(s), math.sinh(s)
    ph = cmath.exp(1j * theta)
    return np.array([[ch, -ph * sh], [-ph.conjugate() * sh, ch]], dtype=complex)


def rotation(phi: float) -> np.ndarray:
    """Phase rotation: a -> e^{iφ} a."""
    ph = cmath.exp(1j * phi)
    return np.diag([ph, ph.conjugate()])


def embed(mode: int, block: np.ndarray) -> np.ndarray:
    """Lift a one-mode 2x2 symplectic to the two-mode space."""
    s = np.eye(4, dtype=complex)
    k = 2 * (mode - 1)
    s[k:k + 2, k:k + 2] = block
    return s


def local_symplectic(s1: np.ndarray, s2: np.ndarray) -> np.ndarray:
    return embed(1, s1) @ embed(2, s2)


def two_mode_squeezer(r: float) -> np.ndarray:
    """a1 -> a1 cosh r + a2† sinh r (and symmetrically for a2)."""
    c, s = math.cosh(r), math.sinh(r)
    return np.array([
        [c, 0, 0, s],
        [0, c, s, 0],
        [0, s, c, 0],
        [s, 0, 0, c],
    ], dtype=complex)


def beam_splitter(tau: float) -> np.ndarray:
    """a1 -> a1 cos τ + a2 sin τ, a2 -> a2 cos τ - a1 sin τ."""
    c, s = math.cos(tau), math.sin(tau)
    return np.array([
        [c, 0, s, 0],
        [0, c, 0, s],
        [-s, 0, c, 0],
        [0, -s, 0, c],
    ], dtype=complex)


# ── Common states ───────────────────────────────────────


def vacuum() -> CovarianceMatrix:
    return CovarianceMatrix(0.0, 0.0)


def thermal(n1: float, n2: float) -> CovarianceMatrix:
    if n1 < 0 or n2 < 0:
        raise InvalidInput(f"Thermal occupations must be non-negative: {n1}, {n2}")
    return CovarianceMatrix(n1, n2)


def tmsv(r: float) -> CovarianceMatrix:
    """Two-mode squeezed vacuum: n = sinh² r, m_c = sinh r cosh r."""
    sh, ch = math.sinh(r), math.cosh(r)
    return CovarianceMatrix(n1=sh * sh, n2=sh * sh, mc=sh * ch)


def thermal_squeezed(n: float, mc: float) -> CovarianceMatrix:
    """Symmetric standard form n1 = n2 = n, real m_c, no other correlations."""
    return CovarianceMatrix(n1=n, n2=n, mc=mc)


def random_physical_state(
    seed: int | None = None,
    scale: float | None = None,
    max_attempts: int | None = None,
) -> CovarianceMatrix:
    """Draw a physical state: thermal input, two-mode squeezer, beam splitter,
    local squeezers and rotations, then added isotropic noise.

    As scale -> 0 the result tends to the vacuum.
    """
    settings = get_settings()
    scale = settings.random_state_scale if scale is None else scale
    max_attempts = settings.random_state_attempts if max_attempts is None else max_attempts
    if scale < 0 or not math.isfinite(scale):
        raise InvalidInput(f"scale must be a non-negative number, got {scale}")
    rng = np.random.default_rng(seed)

    for attempt in range(max_attempts):
        nbar1, nbar2 = rng.uniform(0.0, scale, size=2)
        v = thermal(float(nbar1), float(nbar2))
        v = v.transformed(two_mode_squeezer(rng.uniform(0.0, scale)))
        v = v.transformed(beam_splitter(rng.uniform(0.0, math.pi / 2)))
        for mode in (1, 2):
            block = squeezer(rng.uniform(0.0, scale), rng.uniform(0.0, 2 * math.pi))
            block = block @ rotation(rng.uniform(0.0, 2 * math.pi))
            v = v.transformed(embed(mode, block))
        v = v.with_noise(float(rng.uniform(0.0, scale / 2)))
        if check_physical(v).ok:
            return v
        logger.debug(f"Random state attempt {attempt} rejected")

    raise GenerationFailure(f"No physical state after {max_attempts} attempts (scale={scale})")
