"""LOCC protocol harness tests."""

import json
import math

import numpy as np
import pytest

from gaussent.errors import InvalidInput, Unsupported
from gaussent.schemas.protocol import V2Report
from gaussent.services.channels import ChannelKind, ProtocolTranscript, in_process_pair
from gaussent.services.entanglement import thermal_entropy
from gaussent.services.fock_oracle import GaussianCircuit
from gaussent.services.gaussian_core import CovarianceMatrix, thermal_squeezed, tmsv
from gaussent.services.locc_harness import (
    AliceRole,
    Observable,
    PairSource,
    ShotPlan,
    ShotRecords,
    circuit_for,
    estimate_conditioned_moments,
    estimate_from_records,
    estimate_local_block,
    replay_alice,
    run_protocol,
    sample_parity_and_conditional,
)
from gaussent.services.reconstruction import gamma1_from_conditioned, schur_gamma1


def _small_plan(**overrides) -> ShotPlan:
    params = dict(n_local=2000, n_parity=2000, seed=7, batch_size=500, bootstrap=20, photocount_only=True)
    params.update(overrides)
    return ShotPlan(**params)


def _dump(result) -> str:
    return json.dumps(result.to_dict(), sort_keys=True)


class TestShotPlan:
    def test_defaults_from_settings(self):
        plan = ShotPlan()
        assert plan.n_local == 100_000
        assert plan.n_parity == 100_000
        assert plan.seed == 1729

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("GAUSSENT_DEFAULT_SEED", "99")
        assert ShotPlan().seed == 99

    @pytest.mark.parametrize("kwargs", [
        {"n_local": 1},
        {"n_parity": 0},
        {"batch_size": 0},
        {"bootstrap": 1},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidInput):
            ShotPlan(**kwargs)

    def test_local_schedule_cycles_angles(self):
        assert ShotPlan().local_schedule(5).tolist() == [1, 2, 3, 1, 2]

    def test_parity_schedule_is_positional(self):
        plan = ShotPlan()
        assert plan.parity_schedule(2, 4).tolist() == [2, 3, 0, 1]
        assert plan.parity_schedule(6, 2).tolist() == plan.parity_schedule(2, 2).tolist()

    def test_photocount_only_schedules(self):
        plan = ShotPlan(photocount_only=True)
        assert not plan.local_schedule(4).any()
        assert not plan.parity_schedule(3, 5).any()


class TestEstimators:
    def test_local_block_from_exact_variances(self):
        # n = 0.3, m = 0.2 + 0.1i: ⟨x²⟩ = 1.0, 0.9, 0.6 at 0, π/4, π/2
        kinds, values = [], []
        for kind, var in ((Observable.X0, 1.0), (Observable.X45, 0.9), (Observable.X90, 0.6)):
            kinds += [kind, kind]
            values += [math.sqrt(var), -math.sqrt(var)]
        block = estimate_local_block(ShotRecords(np.array(kinds), np.array(values)))
        assert block.n == pytest.approx(0.3)
        assert block.m == pytest.approx(0.2 + 0.1j)

    def test_local_block_photocount(self):
        records = ShotRecords(np.zeros(4, dtype=np.int8), np.array([0.0, 1.0, 2.0, 1.0]))
        block = estimate_local_block(records, photocount_only=True)
        assert block.n == 1.0
        assert block.m == 0j

    def test_missing_angle(self):
        records = ShotRecords(np.array([1, 1, 3]), np.array([0.1, 0.2, 0.3]))
        with pytest.raises(InvalidInput, match="angle"):
            estimate_local_block(records)

    def test_too_few_shots(self):
        with pytest.raises(InvalidInput):
            estimate_local_block(ShotRecords(np.array([0]), np.array([1.0])), photocount_only=True)

    def test_conditioned_moments(self):
        records = ShotRecords(
            kinds=np.zeros(4, dtype=np.int8),
            values=np.array([1.0, 3.0, 0.0, 2.0]),
            bits=np.array([0, 0, 1, 1]),
        )
        m = estimate_conditioned_moments(records, photocount_only=True)
        assert (m.p_even, m.p_odd) == (0.5, 0.5)
        assert (m.n_even, m.n_odd) == (2.0, 1.0)
        assert m.sq_even == 0j

    def test_conditioned_quadratures(self):
        kinds = np.array([1, 1, 2, 2, 3, 3, 0, 0])
        values = np.array([1.0, -1.0, math.sqrt(0.9), -math.sqrt(0.9), math.sqrt(0.6), -math.sqrt(0.6), 4.0, 2.0])
        m = estimate_conditioned_moments(ShotRecords(kinds, values, np.zeros(8, dtype=np.int8)))
        assert m.p_odd == 0.0
        assert m.n_even == 3.0
        assert m.sq_even == pytest.approx(0.2 + 0.1j)

    def test_degenerate_resamples_are_dropped(self):
        # p_even = 2/3 overall; a 3/3 split in a resample has no usable parity
        local = ShotRecords(np.zeros(6, dtype=np.int8), np.array([0.0, 1.0, 0.0, 0.0, 1.0, 0.0]))
        conditioned = ShotRecords(
            kinds=np.zeros(6, dtype=np.int8),
            values=np.array([0.0, 0.0, 0.0, 0.0, 1.0, 1.0]),
            bits=np.array([0, 0, 0, 0, 1, 1], dtype=np.int8),
        )
        plan = ShotPlan(n_local=6, n_parity=6, seed=3, bootstrap=100, photocount_only=True)
        result = estimate_from_records(local, conditioned, V2Report(n=1 / 3, shots=6), plan)
        assert result.gamma1.n == pytest.approx(-1.0)
        assert result.stderr["eta1"] is not None


class TestCircuitFor:
    def test_circuit_passes_through(self):
        circuit = GaussianCircuit.tmsv(0.3)
        assert circuit_for(circuit) is circuit

    def test_standard_form_covariance(self):
        circuit = circuit_for(thermal_squeezed(1.0, 1.2))
        v = circuit.covariance()
        assert v.n1 == pytest.approx(1.0)
        assert v.mc.real == pytest.approx(1.2)

    def test_general_covariance_unsupported(self):
        with pytest.raises(Unsupported):
            circuit_for(CovarianceMatrix(n1=1.0, n2=0.5, mc=0.5))


class TestSampleParityAndConditional:
    def test_vacuum_mode2_is_always_even(self):
        moments, stderr = sample_parity_and_conditional(GaussianCircuit.tmsv(0.0), _small_plan())
        assert moments.p_even == 1.0
        assert moments.n_even == 0.0
        assert stderr["p_even"] == 0.0

    def test_tmsv_even_probability(self):
        moments, stderr = sample_parity_and_conditional(GaussianCircuit.tmsv(0.5), _small_plan(n_parity=20000))
        exact = (1.0 + 1.0 / (1.0 + 2.0 * math.sinh(0.5) ** 2)) / 2.0
        assert abs(moments.p_even - exact) < 3 * stderr["p_even"]
        assert moments.n_odd >= 1.0 > moments.n_even
        assert stderr["eta1"] > 0


class TestProtocol:
    def test_vacuum_is_separable(self):
        result, transcript = run_protocol(GaussianCircuit.tmsv(0.0), _small_plan())
        assert result.verdict == "separable"
        assert result.report.eof == 0.0
        assert result.v1.n == 0.0
        # V2 report, then per batch request, parity bits and an ack, then the closing request
        assert len(transcript) == 2 + 3 * 4 + 1

    def test_deterministic(self):
        first, t1 = run_protocol(GaussianCircuit.tmsv(0.5), _small_plan())
        second, t2 = run_protocol(GaussianCircuit.tmsv(0.5), _small_plan())
        assert _dump(first) == _dump(second)
        assert t1.to_jsonl() == t2.to_jsonl()

    def test_seed_changes_outcome(self):
        first, _ = run_protocol(GaussianCircuit.tmsv(0.5), _small_plan())
        second, _ = run_protocol(GaussianCircuit.tmsv(0.5), _small_plan(seed=8))
        assert _dump(first) != _dump(second)

    def test_socket_matches_in_process(self):
        plan = _small_plan()
        local, t_local = run_protocol(GaussianCircuit.tmsv(0.5), plan, ChannelKind.IN_PROCESS)
        remote, t_remote = run_protocol(GaussianCircuit.tmsv(0.5), plan, ChannelKind.SOCKET)
        assert _dump(local) == _dump(remote)
        assert t_local.to_jsonl() == t_remote.to_jsonl()

    def test_replay_reproduces_alice(self):
        plan = _small_plan()
        result, transcript = run_protocol(GaussianCircuit.tmsv(0.5), plan)
        recorded = ProtocolTranscript.from_jsonl(transcript.to_jsonl())
        assert _dump(replay_alice(recorded, GaussianCircuit.tmsv(0.5), plan)) == _dump(result)

    def test_alice_holds_only_her_side(self):
        plan = _small_plan()
        source = PairSource(GaussianCircuit.tmsv(0.2), plan)
        alice_end, _ = in_process_pair(ProtocolTranscript())
        alice = AliceRole(source.alice_station(), alice_end, plan)
        assert set(vars(alice)) == {"station", "endpoint", "plan"}
        assert set(vars(alice.station)) == {"_marginal", "_measure", "_rng"}

    def test_result_dict(self):
        result, _ = run_protocol(GaussianCircuit.tmsv(0.3), _small_plan())
        d = result.to_dict()
        assert set(d) == {"verdict", "boundary_uncertain", "estimates", "report", "stderr", "plan"}
        assert d["plan"]["photocount_only"] is True
        assert d["stderr"]["simon_gap"] is not None


@pytest.mark.slow
class TestProtocolAccuracy:
    def test_tmsv_r1_eof(self):
        plan = ShotPlan(photocount_only=True)
        result, _ = run_protocol(GaussianCircuit.tmsv(1.0), plan)
        expected = thermal_entropy(math.sinh(1.0) ** 2)
        assert result.verdict == "entangled"
        assert result.report.eof is not None
        assert abs(result.report.eof - expected) <= 3 * result.stderr["eof_bits"] + 1e-3

    def test_thermal_squeezed_entangled(self):
        result, _ = run_protocol(thermal_squeezed(1.0, 1.2), ShotPlan(photocount_only=True))
        assert result.verdict == "entangled"
        assert not result.boundary_uncertain

    def test_thermal_squeezed_separable(self):
        result, _ = run_protocol(thermal_squeezed(1.0, 0.5), ShotPlan(photocount_only=True))
        assert result.verdict == "separable"

    def test_full_tomography(self):
        plan = ShotPlan(n_local=20_000, n_parity=20_000, bootstrap=50)
        result, _ = run_protocol(GaussianCircuit.tmsv(0.5), plan)
        assert result.verdict == "entangled"
        assert abs(result.gamma1.n - (-math.tanh(0.5) ** 2 / (1 + math.tanh(0.5) ** 2))) < 0.08

    def test_boundary_state_is_flagged(self):
        # n = 1, m_c = 1 sits exactly on the separability boundary
        plan = ShotPlan(n_local=100_000, n_parity=100_000, photocount_only=True)
        result, _ = run_protocol(thermal_squeezed(1.0, 1.0), plan)
        assert result.boundary_uncertain
        assert abs(result.report.simon_gap) <= 3 * result.stderr["simon_gap"]

    def test_eta1_error_shrinks_with_shots(self):
        exact = schur_gamma1(tmsv(0.5)).n
        errors = []
        for shots in (10_000, 100_000, 1_000_000):
            plan = ShotPlan(n_local=2, n_parity=shots, bootstrap=50, photocount_only=True)
            moments, stderr = sample_parity_and_conditional(GaussianCircuit.tmsv(0.5), plan)
            assert abs(gamma1_from_conditioned(moments).n - exact) <= 4 * stderr["eta1"]
            errors.append(stderr["eta1"])
        for coarse, fine in zip(errors, errors[1:]):
            assert math.sqrt(10) / 1.5 < coarse / fine < math.sqrt(10) * 1.5
