"""Truncated Fock-space oracle for two-mode Gaussian circuits.

States are built as dense density matrices on (cutoff + 1)² levels by acting
with sparse gate generators through ``expm_multiply``. Everything the Gaussian
side derives in closed form (covariance, Gamma1, log-negativity) can be
recomputed here from ρ directly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from gaussent.config import get_settings
from gaussent.errors import CutoffTooSmall, InvalidInput, NonzeroDisplacement, NumericalInconsistency
from gaussent.services.gaussian_core import (
    CovarianceMatrix,
    LocalBlock,
    beam_splitter,
    embed,
    rotation,
    squeezer,
    thermal,
    two_mode_squeezer,
)
from gaussent.services.reconstruction import (
    ConditionedMoments,
    ParityNormalization,
    gamma1_from_conditioned,
)

logger = logging.getLogger(__name__)


# ── Gates ───────────────────────────────────────────────


def _check_mode(mode: int) -> None:
    if mode not in (1, 2):
        raise InvalidInput(f"mode must be 1 or 2, got {mode}")


def _dagger(op: sp.spmatrix) -> sp.spmatrix:
    return op.conj().T


@dataclass(frozen=True)
class TwoModeSqueezer:
    """exp(r (a1† a2† - a1 a2))."""
    r: float
    kind: str = field(default="two_mode_squeeze", init=False)

    def symplectic(self) -> np.ndarray:
        return two_mode_squeezer(self.r)

    def generator(self, a1: sp.spmatrix, a2: sp.spmatrix) -> sp.spmatrix:
        return self.r * (_dagger(a1) @ _dagger(a2) - a1 @ a2)

    @property
    def squeezing(self) -> float:
        return abs(self.r)


@dataclass(frozen=True)
class Squeezer:
    """exp((s/2)(e^{-iθ} a² - e^{iθ} a†²)) on one mode."""
    mode: int
    s: float
    theta: float = 0.0
    kind: str = field(default="squeeze", init=False)

    def __post_init__(self):
        _check_mode(self.mode)

    def symplectic(self) -> np.ndarray:
        return embed(self.mode, squeezer(self.s, self.theta))

    def generator(self, a1: sp.spmatrix, a2: sp.spmatrix) -> sp.spmatrix:
        a = a1 if self.mode == 1 else a2
        ph = complex(math.cos(self.theta), math.sin(self.theta))
        return (self.s / 2.0) * (ph.conjugate() * (a @ a) - ph * (_dagger(a) @ _dagger(a)))

    @property
    def squeezing(self) -> float:
        return abs(self.s)


@dataclass(frozen=True)
class PhaseShifter:
    """exp(iφ a†a) on one mode."""
    mode: int
    phi: float
    kind: str = field(default="phase", init=False)

    def __post_init__(self):
        _check_mode(self.mode)

    def symplectic(self) -> np.ndarray:
        return embed(self.mode, rotation(self.phi))

    def generator(self, a1: sp.spmatrix, a2: sp.spmatrix) -> sp.spmatrix:
        a = a1 if self.mode == 1 else a2
        return 1j * self.phi * (_dagger(a) @ a)

    @property
    def squeezing(self) -> float:
        return 0.0


@dataclass(frozen=True)
class BeamSplitter:
    """exp(τ (a1† a2 - a1 a2†))."""
    tau: float
    kind: str = field(default="beam_splitter", init=False)

    def symplectic(self) -> np.ndarray:
        return beam_splitter(self.tau)

    def generator(self, a1: sp.spmatrix, a2: sp.spmatrix) -> sp.spmatrix:
        return self.tau * (_dagger(a1) @ a2 - a1 @ _dagger(a2))

    @property
    def squeezing(self) -> float:
        return 0.0


Gate = Union[TwoModeSqueezer, Squeezer, PhaseShifter, BeamSplitter]


@dataclass(frozen=True)
class GaussianCircuit:
    """Thermal input (nbar1, nbar2) followed by gates in application order."""
    gates: tuple[Gate, ...] = ()
    nbar1: float = 0.0
    nbar2: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))

    def validate(self, max_squeezing: float | None = None) -> None:
        max_squeezing = get_settings().max_squeezing if max_squeezing is None else max_squeezing
        if not (math.isfinite(self.nbar1) and math.isfinite(self.nbar2)):
            raise InvalidInput("Thermal occupations must be finite")
        if self.nbar1 < 0 or self.nbar2 < 0:
            raise InvalidInput(f"Thermal occupations must be non-negative: {self.nbar1}, {self.nbar2}")
        for gate in self.gates:
            values = [v for v in vars(gate).values() if isinstance(v, (int, float))]
            if not all(math.isfinite(v) for v in values):
                raise InvalidInput(f"Non-finite gate parameter in {gate}")
            if gate.squeezing > max_squeezing:
                raise InvalidInput(f"Squeezing {gate.squeezing} exceeds the limit {max_squeezing}")

    def covariance(self) -> CovarianceMatrix:
        """Analytic covariance matrix of the circuit output."""
        v = thermal(self.nbar1, self.nbar2)
        for gate in self.gates:
            v = v.transformed(gate.symplectic())
        return v

    def then(self, gate: Gate) -> GaussianCircuit:
        return GaussianCircuit(self.gates + (gate,), self.nbar1, self.nbar2)

    def suggested_cutoff(self, leakage_threshold: float | None = None) -> int:
        """Smallest cutoff whose geometric tail estimate stays under the threshold."""
        threshold = get_settings().leakage_threshold if leakage_threshold is None else leakage_threshold
        v = self.covariance()
        n_eff = max(v.n1 + abs(v.m1), v.n2 + abs(v.m2))
        squeeze = sum(g.squeezing for g in self.gates)
        floor = math.ceil(10 + 25 * squeeze)
        if n_eff <= 0:
            return floor
        q = n_eff / (n_eff + 1.0)
        return max(floor, math.ceil(math.log(threshold / 10.0) / math.log(q)) + 2)

    @classmethod
    def tmsv(cls, r: float) -> GaussianCircuit:
        return cls(gates=(TwoModeSqueezer(r),))

    @classmethod
    def thermal_squeezed(cls, n: float, mc: float) -> GaussianCircuit:
        """Circuit producing n1 = n2 = n with real correlation m_c."""
        big_n = n + 0.5
        rad = big_n * big_n - mc * mc
        if n < 0 or rad <= 0:
            raise InvalidInput(f"No thermal-squeezed state with n={n}, m_c={mc}")
        nbar = math.sqrt(rad) - 0.5
        if nbar < -get_settings().clamp_tol:
            raise InvalidInput(f"n={n}, m_c={mc} violates the uncertainty relation")
        nbar = max(nbar, 0.0)
        r = 0.5 * math.atanh(mc / big_n)
        return cls(gates=(TwoModeSqueezer(r),), nbar1=nbar, nbar2=nbar)

    def to_dict(self) -> dict:
        return {
            "nbar1": self.nbar1,
            "nbar2": self.nbar2,
            "gates": [dict(vars(g)) for g in self.gates],
        }


# ── Fock states ─────────────────────────────────────────


@dataclass(eq=False)
class FockState:
    """Two-mode density matrix on levels 0..cutoff of each mode."""
    matrix: np.ndarray = field(repr=False)
    cutoff: int
    leakage: float = 0.0

    @property
    def dim(self) -> int:
        return self.cutoff + 1

    @property
    def tensor(self) -> np.ndarray:
        """T[i, j, k, l] = ⟨i j| ρ |k l⟩."""
        d = self.dim
        return self.matrix.reshape(d, d, d, d)

    def reduced(self, mode: int) -> np.ndarray:
        _check_mode(mode)
        spec = "ijkj->ik" if mode == 1 else "ijil->jl"
        return np.einsum(spec, self.tensor)


@dataclass(eq=False)
class ParityDecomposition:
    """Mode-1 states conditioned on Bob's parity outcome."""
    p_even: float
    p_odd: float
    rho_even: np.ndarray = field(repr=False)
    rho_odd: np.ndarray = field(repr=False)

    @property
    def sigma1(self) -> np.ndarray:
        return self.p_even * self.rho_even - self.p_odd * self.rho_odd

    @property
    def mean_parity(self) -> float:
        return self.p_even - self.p_odd


def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)


def thermal_populations(nbar: float, dim: int) -> np.ndarray:
    if nbar <= 0:
        p = np.zeros(dim)
        p[0] = 1.0
        return p
    k = np.arange(dim)
    p = nbar ** k / (nbar + 1.0) ** (k + 1)
    return p / p.sum()


def photon_distribution(rho1: np.ndarray) -> np.ndarray:
    p = np.clip(np.real(np.diag(rho1)), 0.0, None)
    total = p.sum()
    return p / total if total > 0 else p


def hermite_functions(n_max: int, x: np.ndarray) -> np.ndarray:
    """Fock wave functions ψ_0..ψ_{n_max} on x (vacuum variance ½)."""
    psi = np.zeros((n_max + 1, x.size))
    psi[0] = math.pi ** -0.25 * np.exp(-x * x / 2.0)
    if n_max >= 1:
        psi[1] = math.sqrt(2.0) * x * psi[0]
    for k in range(1, n_max):
        psi[k + 1] = math.sqrt(2.0 / (k + 1)) * x * psi[k] - math.sqrt(k / (k + 1)) * psi[k - 1]
    return psi


def quadrature_pdf(rho1: np.ndarray, theta: float, x: np.ndarray) -> np.ndarray:
    """Density of x_θ = x cos θ + p sin θ for a one-mode ρ."""
    d = rho1.shape[0]
    k = np.arange(d)
    phase = np.exp(-1j * theta * (k[:, None] - k[None, :]))
    psi = hermite_functions(d - 1, x)
    pdf = np.real(np.einsum("jx,jk,kx->x", psi, rho1 * phase, psi))
    return np.clip(pdf, 0.0, None)


# ── Oracle ──────────────────────────────────────────────


class FockOracle:
    """Build and interrogate truncated two-mode states."""

    def __init__(
        self,
        cutoff: int | None = None,
        padding: int | None = None,
        leakage_threshold: float | None = None,
    ):
        settings = get_settings()
        self.cutoff = settings.default_cutoff if cutoff is None else cutoff
        self.padding = settings.cutoff_padding if padding is None else padding
        self.leakage_threshold = (
            settings.leakage_threshold if leakage_threshold is None else leakage_threshold
        )
        if self.cutoff < 2:
            raise InvalidInput(f"cutoff must be at least 2, got {self.cutoff}")
        if self.padding < 0:
            raise InvalidInput(f"padding must be non-negative, got {self.padding}")

    @staticmethod
    def _ladder(dim: int) -> tuple[sp.csc_matrix, sp.csc_matrix]:
        a = sp.csc_matrix(annihilation(dim))
        eye = sp.identity(dim, format="csc")
        return sp.kron(a, eye, format="csc"), sp.kron(eye, a, format="csc")

    def build_state(self, circuit: GaussianCircuit) -> FockState:
        circuit.validate()
        dim = self.cutoff + 1 + self.padding
        a1, a2 = self._ladder(dim)
        populations = np.kron(
            thermal_populations(circuit.nbar1, dim), thermal_populations(circuit.nbar2, dim)
        )
        rho = np.diag(populations).astype(complex)

        for gate in circuit.gates:
            g = gate.generator(a1, a2).tocsc()
            half = expm_multiply(g, rho)
            rho = expm_multiply(g, half.conj().T)
            rho = (rho + rho.conj().T) / 2.0

        keep = self.cutoff + 1
        trimmed = rho.reshape(dim, dim, dim, dim)[:keep, :keep, :keep, :keep]
        matrix = trimmed.reshape(keep * keep, keep * keep)
        trace = float(np.real(np.trace(matrix)))
        matrix = matrix / trace

        state = FockState(matrix=matrix, cutoff=self.cutoff)
        state.leakage = max(float(photon_distribution(state.reduced(m))[-2:].sum()) for m in (1, 2))
        logger.debug(
            f"Built state at cutoff {self.cutoff}: leakage={state.leakage:.2e}, "
            f"trimmed population={1.0 - trace:.2e}"
        )
        if state.leakage > self.leakage_threshold:
            raise CutoffTooSmall(
                f"Population {state.leakage:.2e} in the top two levels at cutoff {self.cutoff}",
                leakage=state.leakage,
            )
        self.check_positive(state.matrix)
        return state

    @staticmethod
    def check_positive(matrix: np.ndarray, tol: float | None = None) -> None:
        tol = get_settings().psd_tol if tol is None else tol
        lowest = float(np.linalg.eigvalsh(matrix)[0])
        if lowest < -tol:
            raise NumericalInconsistency(f"Density matrix has eigenvalue {lowest:.3e} below -{tol:.0e}")

    # ── Moments ──

    @staticmethod
    def covariance_from_state(state: FockState, tol: float | None = None) -> CovarianceMatrix:
        tol = get_settings().displacement_tol if tol is None else tol
        a = annihilation(state.dim)
        ad = a.conj().T
        t = state.tensor
        rho1, rho2 = state.reduced(1), state.reduced(2)

        first = (np.trace(rho1 @ a), np.trace(rho2 @ a))
        if max(abs(x) for x in first) > tol:
            raise NonzeroDisplacement(f"First moments {first} exceed {tol}")

        def joint(op1: np.ndarray, op2: np.ndarray) -> complex:
            return complex(np.einsum("ijkl,ki,lj->", t, op1, op2))

        return CovarianceMatrix(
            n1=float(np.real(np.trace(rho1 @ ad @ a))),
            n2=float(np.real(np.trace(rho2 @ ad @ a))),
            m1=complex(np.trace(rho1 @ a @ a)),
            m2=complex(np.trace(rho2 @ a @ a)),
            ms=joint(a, ad),
            mc=joint(a, a),
        )

    @staticmethod
    def parity_decompose(state: FockState) -> ParityDecomposition:
        t = state.tensor
        even = np.einsum("ijkj->ik", t[:, 0::2, :, 0::2])
        odd = np.einsum("ijkj->ik", t[:, 1::2, :, 1::2])
        p_even = float(np.real(np.trace(even)))
        p_odd = float(np.real(np.trace(odd)))
        return ParityDecomposition(
            p_even=p_even,
            p_odd=p_odd,
            rho_even=even / p_even if p_even > 0 else np.zeros_like(even),
            rho_odd=odd / p_odd if p_odd > 0 else np.zeros_like(odd),
        )

    @classmethod
    def conditioned_moments(cls, state: FockState) -> ConditionedMoments:
        dec = cls.parity_decompose(state)
        a = annihilation(state.dim)
        number = a.conj().T @ a
        total = dec.p_even + dec.p_odd
        return ConditionedMoments(
            p_even=dec.p_even / total,
            p_odd=dec.p_odd / total,
            n_even=float(np.real(np.trace(dec.rho_even @ number))),
            n_odd=float(np.real(np.trace(dec.rho_odd @ number))),
            sq_even=complex(np.trace(dec.rho_even @ a @ a)),
            sq_odd=complex(np.trace(dec.rho_odd @ a @ a)),
        )

    @classmethod
    def gamma1_oracle(
        cls,
        state: FockState,
        normalization: ParityNormalization | str | None = None,
    ) -> LocalBlock:
        return gamma1_from_conditioned(cls.conditioned_moments(state), normalization)

    # ── Entanglement ──

    @staticmethod
    def ppt_trace_norm(state: FockState) -> float:
        """‖ρ^{T2}‖₁."""
        d = state.dim
        pt = state.tensor.transpose(0, 3, 2, 1).reshape(d * d, d * d)
        return float(np.abs(np.linalg.eigvalsh(pt)).sum())

    @classmethod
    def log_negativity(cls, state: FockState) -> float:
        return max(0.0, math.log2(cls.ppt_trace_norm(state)))

    @staticmethod
    def purity(state: FockState) -> float:
        return float(np.real(np.vdot(state.matrix, state.matrix)))

    @staticmethod
    def reduced_entropy(state: FockState, mode: int = 1) -> float:
        lam = np.linalg.eigvalsh(state.reduced(mode))
        lam = lam[lam > 1e-15]
        return float(-(lam * np.log2(lam)).sum())
