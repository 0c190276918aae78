"""Truncated Fock-space oracle tests."""

import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from gaussent.errors import CutoffTooSmall, InvalidInput, NonzeroDisplacement, NumericalInconsistency
from gaussent.services.entanglement import log_negativity, thermal_entropy
from gaussent.services.fock_oracle import (
    BeamSplitter,
    FockOracle,
    FockState,
    GaussianCircuit,
    PhaseShifter,
    Squeezer,
    TwoModeSqueezer,
    annihilation,
    hermite_functions,
    photon_distribution,
    quadrature_pdf,
    thermal_populations,
)
from gaussent.services.gaussian_core import (
    invariants_direct,
    mean_parity,
    thermal_squeezed,
    tmsv,
)
from gaussent.services.reconstruction import schur_gamma1

GENERAL = GaussianCircuit(
    gates=(TwoModeSqueezer(0.3), Squeezer(1, 0.15, 0.3), PhaseShifter(2, 0.7), BeamSplitter(0.4)),
    nbar1=0.1,
    nbar2=0.05,
)


def _params_close(a, b, tol):
    for name in ("n1", "n2", "m1", "m2", "ms", "mc"):
        assert abs(getattr(a, name) - getattr(b, name)) < tol, name


class TestHelpers:
    def test_annihilation(self):
        a = annihilation(4)
        assert np.allclose(a @ a.T - a.T @ a, np.diag([1, 1, 1, -3]))

    def test_thermal_populations(self):
        p = thermal_populations(1.0, 60)
        assert p.sum() == pytest.approx(1.0)
        assert p[1] / p[0] == pytest.approx(0.5)

    def test_thermal_populations_zero(self):
        p = thermal_populations(0.0, 5)
        assert list(p) == [1.0, 0.0, 0.0, 0.0, 0.0]

    def test_photon_distribution(self):
        rho = np.diag([0.5, 0.3, 0.2]).astype(complex)
        assert np.allclose(photon_distribution(rho), [0.5, 0.3, 0.2])

    def test_hermite_functions_orthonormal(self):
        x = np.linspace(-12.0, 12.0, 6001)
        psi = hermite_functions(10, x)
        gram = trapezoid(psi[:, None, :] * psi[None, :, :], x, axis=2)
        assert np.allclose(gram, np.eye(11), atol=1e-8)

    def test_vacuum_quadrature(self):
        x = np.linspace(-3.0, 3.0, 13)
        rho = np.zeros((5, 5), dtype=complex)
        rho[0, 0] = 1.0
        for theta in (0.0, 0.7):
            assert np.allclose(quadrature_pdf(rho, theta, x), np.exp(-x * x) / math.sqrt(math.pi))

    def test_quadrature_variance_of_squeezed_mode(self):
        oracle = FockOracle(cutoff=30)
        state = oracle.build_state(GaussianCircuit(gates=(Squeezer(1, 0.3, 0.0),)))
        x = np.linspace(-8.0, 8.0, 4001)
        pdf = quadrature_pdf(state.reduced(1), 0.0, x)
        # x is squeezed: ⟨x²⟩ = e^{-2s} / 2
        assert trapezoid(x * x * pdf, x) == pytest.approx(math.exp(-0.6) / 2, abs=1e-6)


class TestGaussianCircuit:
    def test_tmsv_covariance(self):
        _params_close(GaussianCircuit.tmsv(0.6).covariance(), tmsv(0.6), 1e-12)

    def test_thermal_squeezed_circuit(self):
        v = GaussianCircuit.thermal_squeezed(1.0, 1.2).covariance()
        _params_close(v, thermal_squeezed(1.0, 1.2), 1e-12)

    def test_thermal_squeezed_unphysical(self):
        with pytest.raises(InvalidInput):
            GaussianCircuit.thermal_squeezed(0.5, 1.0)

    def test_then(self):
        c = GaussianCircuit.tmsv(0.2).then(BeamSplitter(0.1))
        assert c.gates == (TwoModeSqueezer(0.2), BeamSplitter(0.1))

    def test_validate_squeezing_limit(self):
        with pytest.raises(InvalidInput, match="exceeds"):
            GaussianCircuit.tmsv(5.0).validate()

    def test_validate_thermal(self):
        with pytest.raises(InvalidInput):
            GaussianCircuit(nbar1=-0.1).validate()

    def test_bad_mode(self):
        with pytest.raises(InvalidInput):
            PhaseShifter(3, 0.1)

    def test_suggested_cutoff_grows(self):
        assert GaussianCircuit.tmsv(1.0).suggested_cutoff() > GaussianCircuit.tmsv(0.3).suggested_cutoff()

    def test_to_dict(self):
        d = GaussianCircuit.tmsv(0.5).to_dict()
        assert d["gates"] == [{"r": 0.5, "kind": "two_mode_squeeze"}]


class TestBuildState:
    def test_tmsv_populations(self):
        r = 0.5
        state = FockOracle(cutoff=30).build_state(GaussianCircuit.tmsv(r))
        t = state.tensor
        for k in range(5):
            expected = math.tanh(r) ** (2 * k) / math.cosh(r) ** 2
            assert t[k, k, k, k].real == pytest.approx(expected, abs=1e-10)
        assert abs(t[1, 0, 1, 0]) < 1e-12

    def test_trace_and_hermiticity(self):
        state = FockOracle(cutoff=20).build_state(GENERAL)
        assert np.trace(state.matrix).real == pytest.approx(1.0)
        assert np.allclose(state.matrix, state.matrix.conj().T)

    def test_cutoff_too_small(self):
        with pytest.raises(CutoffTooSmall) as exc:
            FockOracle(cutoff=8).build_state(GaussianCircuit.tmsv(0.8))
        assert exc.value.leakage > 1e-8

    def test_built_state_is_positive(self):
        state = FockOracle(cutoff=20).build_state(GENERAL)
        assert np.linalg.eigvalsh(state.matrix)[0] >= -1e-8

    def test_negative_eigenvalue_rejected(self):
        matrix = np.diag([0.6, 0.401, -1e-3, 0.0]).astype(complex)
        with pytest.raises(NumericalInconsistency, match="eigenvalue"):
            FockOracle.check_positive(matrix)
        FockOracle.check_positive(np.diag([0.5, 0.5, -1e-9, 0.0]))

    def test_invalid_cutoff(self):
        with pytest.raises(InvalidInput):
            FockOracle(cutoff=1)

    def test_nonzero_displacement(self):
        d = 3
        psi = np.zeros(d * d, dtype=complex)
        psi[0] = psi[d] = 1 / math.sqrt(2)  # (|00⟩ + |10⟩)/√2
        state = FockState(matrix=np.outer(psi, psi.conj()), cutoff=d - 1)
        with pytest.raises(NonzeroDisplacement):
            FockOracle.covariance_from_state(state)


class TestOracleIdentities:
    @pytest.mark.parametrize("circuit", [
        GaussianCircuit.tmsv(0.5),
        GaussianCircuit.thermal_squeezed(0.5, 0.6),
        GENERAL,
    ], ids=["tmsv", "thermal_squeezed", "general"])
    def test_covariance_matches_symplectic(self, circuit):
        state = FockOracle(cutoff=30).build_state(circuit)
        _params_close(FockOracle.covariance_from_state(state), circuit.covariance(), 1e-8)

    @pytest.mark.parametrize("circuit", [
        GaussianCircuit.tmsv(0.3),
        GaussianCircuit.tmsv(0.8),
        GaussianCircuit.thermal_squeezed(0.3, 0.4),
        GaussianCircuit.thermal_squeezed(0.5, 0.6),
        GENERAL,
    ], ids=["tmsv0.3", "tmsv0.8", "sgs0.3", "sgs0.5", "general"])
    def test_gamma1_matches_schur(self, circuit):
        state = FockOracle(cutoff=30).build_state(circuit)
        oracle = FockOracle.gamma1_oracle(state)
        exact = schur_gamma1(circuit.covariance())
        assert abs(oracle.n - exact.n) < 1e-6
        assert abs(oracle.m - exact.m) < 1e-6

    def test_plain_difference_fails(self):
        state = FockOracle(cutoff=30).build_state(GaussianCircuit.tmsv(0.5))
        exact = schur_gamma1(tmsv(0.5))
        plain = FockOracle.gamma1_oracle(state, "plain_difference")
        assert exact.n == pytest.approx(-0.176, abs=1e-3)
        assert plain.n == pytest.approx(-1.0, abs=1e-6)
        assert abs(plain.n - exact.n) > 0.5

    def test_mean_parity(self):
        state = FockOracle(cutoff=30).build_state(GENERAL)
        dec = FockOracle.parity_decompose(state)
        assert dec.mean_parity == pytest.approx(mean_parity(GENERAL.covariance().v2), abs=1e-8)
        assert np.trace(dec.sigma1).real == pytest.approx(dec.mean_parity)

    @pytest.mark.parametrize("circuit", [
        GaussianCircuit.tmsv(0.5),
        GaussianCircuit.thermal_squeezed(0.5, 0.6),
    ], ids=["tmsv", "thermal_squeezed"])
    def test_gamma1_stable_between_cutoffs(self, circuit):
        g30 = FockOracle.gamma1_oracle(FockOracle(cutoff=30).build_state(circuit))
        g34 = FockOracle.gamma1_oracle(FockOracle(cutoff=34).build_state(circuit))
        assert abs(g30.n - g34.n) < 1e-6
        assert abs(g30.m - g34.m) < 1e-6

    def test_bob_local_unitary_leaves_gamma1(self):
        oracle = FockOracle(cutoff=30)
        base = FockOracle.gamma1_oracle(oracle.build_state(GaussianCircuit.tmsv(0.4)))
        moved_circuit = GaussianCircuit.tmsv(0.4).then(Squeezer(2, 0.3, 0.5)).then(PhaseShifter(2, 0.4))
        moved = FockOracle.gamma1_oracle(oracle.build_state(moved_circuit))
        assert abs(moved.n - base.n) < 1e-6
        assert abs(moved.m - base.m) < 1e-6

    def test_pure_state(self):
        state = FockOracle(cutoff=30).build_state(GaussianCircuit.tmsv(0.6))
        assert FockOracle.purity(state) == pytest.approx(1.0, abs=1e-8)
        assert FockOracle.reduced_entropy(state) == pytest.approx(thermal_entropy(math.sinh(0.6) ** 2), abs=1e-6)

    def test_vacuum_purity_and_entropy(self):
        state = FockOracle(cutoff=4).build_state(GaussianCircuit())
        assert FockOracle.purity(state) == pytest.approx(1.0, abs=1e-12)
        assert FockOracle.reduced_entropy(state) == pytest.approx(0.0, abs=1e-12)

    def test_mixed_state_purity(self):
        circuit = GaussianCircuit.thermal_squeezed(1.0, 1.0)
        state = FockOracle(cutoff=circuit.suggested_cutoff()).build_state(circuit)
        assert FockOracle.purity(state) == pytest.approx(0.2, abs=1e-4)


@pytest.mark.slow
class TestNegativityOracle:
    @pytest.mark.parametrize("r", [0.25, 0.5, 0.75, 1.0])
    def test_tmsv(self, r):
        state = FockOracle(cutoff=40).build_state(GaussianCircuit.tmsv(r))
        expected = log_negativity(invariants_direct(tmsv(r)))
        assert FockOracle.log_negativity(state) == pytest.approx(expected, abs=1e-4)

    @pytest.mark.parametrize("n,mc", [(0.2, 0.35), (0.5, 0.7), (0.5, 0.8), (1.0, 1.2), (1.0, 1.35)])
    def test_thermal_squeezed(self, n, mc):
        circuit = GaussianCircuit.thermal_squeezed(n, mc)
        state = FockOracle(cutoff=40).build_state(circuit)
        expected = log_negativity(invariants_direct(circuit.covariance()))
        assert FockOracle.log_negativity(state) == pytest.approx(expected, abs=1e-3)

    def test_separable_state(self):
        state = FockOracle(cutoff=30).build_state(GaussianCircuit.thermal_squeezed(1.0, 0.5))
        assert FockOracle.log_negativity(state) == pytest.approx(0.0, abs=1e-6)
