"""Command-line interface tests."""

import csv
import json
import logging
import math

import pytest

import cli
from cli import EXIT_FAILED, EXIT_OK, EXIT_UNPHYSICAL, EXIT_USAGE, main, parse_grid
from gaussent.errors import InvalidInput, NumericalInconsistency

SMALL_RUN = ["--shots", "2000", "--bootstrap", "20", "--batch-size", "500"]


def _read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestParseGrid:
    def test_points(self):
        assert parse_grid("0:1:5") == [0.0, 0.25, 0.5, 0.75, 1.0]

    def test_single_point(self):
        assert parse_grid("2:2:1") == [2.0]

    @pytest.mark.parametrize("spec", ["0:3", "a:b:3", "0:1:0", "0:1:1", "0:inf:4"])
    def test_invalid(self, spec):
        with pytest.raises(InvalidInput):
            parse_grid(spec)


class TestAnalyzeCommand:
    def test_vacuum(self, write_json, capsys):
        path = write_json("vacuum.json", {"n1": 0.0, "n2": 0.0})
        assert main(["analyze", path]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["separable"] is True
        assert report["boundary_flag"] is True
        assert report["purity"] == pytest.approx(1.0)
        assert report["eof_bits"] == 0.0

    def test_tmsv(self, write_json, tmp_path):
        s, c = math.sinh(1.0), math.cosh(1.0)
        path = write_json("tmsv.json", {"n1": s * s, "n2": s * s, "mc": [s * c, 0.0]})
        out = tmp_path / "report.json"
        assert main(["analyze", path, "-o", str(out)]) == EXIT_OK
        report = json.loads(out.read_text())
        assert report["separable"] is False
        assert report["log_negativity_bits"] == pytest.approx(2 * math.log2(math.e), rel=1e-9)
        assert report["eof_bits"] == pytest.approx(2.337, abs=1e-3)
        assert report["invariants_direct"]["i3_sign"] == "negative"
        assert report["local_pipeline"]["separable"] is False

    def test_asymmetric_has_no_eof(self, write_json, capsys):
        path = write_json("asym.json", {"n1": 1.0, "n2": 0.5, "mc": [0.9, 0.0]})
        assert main(["analyze", path]) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["eof_bits"] is None

    def test_unphysical(self, write_json, capsys):
        path = write_json("bad.json", {"n1": -0.6, "n2": 0.0})
        assert main(["analyze", path]) == EXIT_UNPHYSICAL
        assert "Unphysical state: uncertainty principle violated" in capsys.readouterr().err

    def test_bad_field(self, write_json, capsys):
        path = write_json("bad.json", {"n1": "lots", "n2": 0.0})
        assert main(["analyze", path]) == EXIT_USAGE
        assert "n1" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        assert main(["analyze", str(tmp_path / "nope.json")]) == EXIT_USAGE
        assert "File not found" in capsys.readouterr().err

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{")
        assert main(["analyze", str(path)]) == EXIT_USAGE

    def test_numerical_failure_exits_3(self, write_json, monkeypatch, capsys):
        def fail(*args):
            raise NumericalInconsistency("EoF argument vanished (infinite squeezing)")

        monkeypatch.setattr(cli, "log_negativity", fail)
        path = write_json("tmsv.json", {"n1": 1.0, "n2": 1.0, "mc": [1.2, 0.0]})
        assert main(["analyze", path]) == EXIT_FAILED
        assert "NumericalInconsistency" in capsys.readouterr().err

    def test_relative_symmetry_tolerance(self, write_json, capsys):
        path = write_json("near.json", {"n1": 0.0, "n2": 0.004})
        assert main(["analyze", path, "--symmetry-tol", "1e-2"]) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["eof_bits"] is None


class TestPhaseDiagramCommand:
    def test_cell_classes(self, tmp_path):
        out = tmp_path / "grid.csv"
        code = main(["phase-diagram", "--n-grid", "1:1:1", "--eta1-grid=-0.5:0.5:3", "-o", str(out)])
        assert code == EXIT_OK
        rows = _read_csv(out)
        assert [r["class"] for r in rows] == ["unphysical", "entangled", "separable"]
        assert rows[0]["ef_bits"] == ""
        assert float(rows[1]["ef_bits"]) > 0
        assert (tmp_path / "grid.gp").exists()

    def test_boundary_cell(self, tmp_path):
        out = tmp_path / "edge.csv"
        third = "0.3333333333333333"
        assert main(["phase-diagram", "--n-grid", "1:1:1", "--eta1-grid", f"{third}:{third}:1", "-o", str(out)]) == 0
        (row,) = _read_csv(out)
        assert row["class"] == "boundary"
        assert float(row["ef_bits"]) == 0.0

    def test_custom_plot_path(self, tmp_path):
        plot = tmp_path / "plots" / "fig.gp"
        out = tmp_path / "fig.csv"
        main(["phase-diagram", "--n-grid", "0:1:3", "--eta1-grid=-0.2:0.2:3", "-o", str(out), "--plot", str(plot)])
        assert "'fig.csv'" in plot.read_text()

    def test_stdout(self, capsys):
        assert main(["phase-diagram", "--n-grid", "0.5:1:2", "--eta1-grid", "0:0.1:2"]) == EXIT_OK
        captured = capsys.readouterr()
        assert captured.out.startswith("n,eta1,class,ef_bits\n")
        assert "Cells:" in captured.err

    def test_invalid_grid(self, capsys):
        assert main(["phase-diagram", "--n-grid", "0:3"]) == EXIT_USAGE

    def test_negative_n(self):
        assert main(["phase-diagram", "--n-grid=-1:1:3", "--eta1-grid", "0:0.1:2"]) == EXIT_USAGE


class TestOracleCommand:
    def test_cutoff_too_low(self, capsys):
        assert main(["oracle", "--cutoff", "4"]) == EXIT_USAGE
        assert "at least 8" in capsys.readouterr().err

    def test_truncation_failure(self, tmp_path):
        out = tmp_path / "oracle.json"
        assert main(["oracle", "--suite", "identities", "--cutoff", "8", "-o", str(out)]) == EXIT_FAILED
        report = json.loads(out.read_text())
        assert report["passed"] is False
        assert all(c["error"].startswith("CutoffTooSmall") for c in report["cases"])

    @pytest.mark.slow
    def test_identities_pass(self, capsys):
        assert main(["oracle", "--suite", "identities", "--cutoff", "30"]) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["passed"] is True


class TestSimulateCommand:
    def test_vacuum_is_separable(self, tmp_path, capsys):
        out = tmp_path / "run.json"
        code = main(["simulate", "--family", "tmsv", "--r", "0", *SMALL_RUN, "-o", str(out)])
        assert code == EXIT_OK
        result = json.loads(out.read_text())
        assert result["verdict"] == "separable"
        assert result["family"] == "tmsv"
        assert result["channel"] == "in-process"
        assert "Seed: 1729" in capsys.readouterr().err

    def test_reproducible(self, tmp_path):
        paths = []
        for label in ("a", "b"):
            out, transcript = tmp_path / f"{label}.json", tmp_path / f"{label}.jsonl"
            args = ["simulate", "--family", "tmsv", "--r", "0.5", "--seed", "5", *SMALL_RUN,
                    "-o", str(out), "--transcript", str(transcript)]
            assert main(args) == EXIT_OK
            paths.append((out, transcript))
        (out_a, tr_a), (out_b, tr_b) = paths
        assert out_a.read_bytes() == out_b.read_bytes()
        assert tr_a.read_bytes() == tr_b.read_bytes()
        first = json.loads(tr_a.read_text().splitlines()[0])
        assert first["direction"] == "bob->alice"
        assert first["message"]["kind"] == "v2_report"

    def test_unphysical_family(self, capsys):
        code = main(["simulate", "--family", "eq14", "--n", "0.5", "--mc", "1.0", *SMALL_RUN])
        assert code == EXIT_UNPHYSICAL

    def test_circuit_needs_file(self, capsys):
        assert main(["simulate", "--family", "circuit"]) == EXIT_USAGE
        assert "--circuit" in capsys.readouterr().err

    def test_circuit_file(self, write_json, tmp_path):
        path = write_json("circuit.json", {"gates": [{"kind": "two_mode_squeeze", "r": 0.4}]})
        out = tmp_path / "run.json"
        code = main(["simulate", "--family", "circuit", "--circuit", path, *SMALL_RUN, "-o", str(out)])
        assert code == EXIT_OK
        result = json.loads(out.read_text())
        assert result["plan"]["photocount_only"] is False

    def test_bad_shot_count(self):
        assert main(["simulate", "--family", "tmsv", "--shots", "1"]) == EXIT_USAGE


class TestUsage:
    def test_no_command(self, capsys):
        assert main([]) == EXIT_USAGE
        assert "analyze" in capsys.readouterr().out

    def test_missing_required_option(self):
        with pytest.raises(SystemExit) as exc:
            main(["simulate"])
        assert exc.value.code == EXIT_USAGE

    def test_unknown_command(self):
        with pytest.raises(SystemExit) as exc:
            main(["teleport"])
        assert exc.value.code == EXIT_USAGE

    def test_help_names_app(self, monkeypatch, capsys):
        monkeypatch.setenv("GAUSSENT_APP_NAME", "LabBench")
        assert main([]) == EXIT_USAGE
        assert "LabBench: two-mode Gaussian entanglement" in capsys.readouterr().out

    def test_debug_enables_debug_logging(self, monkeypatch, write_json):
        monkeypatch.setenv("GAUSSENT_DEBUG", "true")
        path = write_json("vacuum.json", {"n1": 0.0, "n2": 0.0})
        assert main(["analyze", path]) == EXIT_OK
        assert logging.getLogger("gaussent").level == logging.DEBUG
