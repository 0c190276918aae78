"""GaussEnt-LOCC command-line tool.

Usage:
    python -m cli analyze state.json
    python -m cli analyze state.json -o report.json
    python -m cli simulate --family tmsv --r 1 --shots 100000
    python -m cli simulate --family eq14 --n 1 --mc 1.2 --channel socket --transcript run.jsonl
    python -m cli simulate --family circuit --circuit circuit.json --full-tomography
    python -m cli phase-diagram --n-grid 0:3:200 --eta1-grid=-0.5:0.5:200 -o fig.csv
    python -m cli oracle --suite identities --cutoff 30
    python -m cli oracle --suite negativity --cutoff 40

Exit codes: 0 success, 1 usage or parse error, 2 unphysical input,
3 verification or protocol failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from gaussent.config import get_settings
from gaussent.errors import ChannelError, CutoffTooSmall, GaussEntError, InvalidInput, ProtocolViolation
from gaussent.schemas import CircuitIn, StateIn
from gaussent.services.channels import ChannelKind
from gaussent.services.entanglement import (
    LocalData,
    analyze,
    eof_symmetric,
    is_symmetric,
    log_negativity,
    p_representable,
    simon_test,
)
from gaussent.services.export import ExportService
from gaussent.services.fock_oracle import GaussianCircuit
from gaussent.services.gaussian_core import (
    check_physical,
    invariants_direct,
    purity,
    thermal_squeezed,
)
from gaussent.services.locc_harness import ShotPlan, run_protocol
from gaussent.services.reconstruction import CellClass, phase_diagram
from gaussent.services.verification import Suite, run_suite

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNPHYSICAL = 2
EXIT_FAILED = 3

MIN_ORACLE_CUTOFF = 8

logger = logging.getLogger("gaussent.cli")


class CLIParser(argparse.ArgumentParser):
    """Usage errors exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> CLIParser:
    parser = CLIParser(
        prog="gaussent",
        description=f"{get_settings().app_name}: two-mode Gaussian entanglement from local measurements",
    )
    sub = parser.add_subparsers(dest="command", help="Top-level command")

    # ── Analyze ──────────────────────────────────────────
    an = sub.add_parser("analyze", help="Analyze a covariance-matrix JSON file")
    an.add_argument("state", help="State JSON file")
    an.add_argument("--output", "-o", help="Write the report here instead of stdout")
    an.add_argument("--boundary-tol", type=float, help="Simon boundary tolerance")
    an.add_argument("--symmetry-tol", type=float, help="Relative I1 = I2 tolerance")

    # ── Simulate ─────────────────────────────────────────
    sim = sub.add_parser("simulate", help="Run the two-party protocol on a simulated source")
    sim.add_argument("--family", choices=["tmsv", "eq14", "circuit"], required=True, help="State family")
    sim.add_argument("--r", type=float, default=1.0, help="Two-mode squeezing (tmsv)")
    sim.add_argument("--n", type=float, default=1.0, help="Mean photon number per mode (eq14)")
    sim.add_argument("--mc", type=float, default=1.2, help="Cross correlation m_c (eq14)")
    sim.add_argument("--circuit", help="Circuit JSON file (circuit)")
    sim.add_argument("--shots", type=int, help="Local and parity shots")
    sim.add_argument("--local-shots", type=int, help="Local tomography shots per party")
    sim.add_argument("--parity-shots", type=int, help="Parity-conditioned shots")
    sim.add_argument("--seed", type=int, help="RNG seed")
    sim.add_argument("--bootstrap", type=int, help="Bootstrap resamples")
    sim.add_argument("--batch-size", type=int, help="Parity outcomes per message")
    sim.add_argument("--channel", choices=[k.value for k in ChannelKind], default=ChannelKind.IN_PROCESS.value)
    sim.add_argument("--full-tomography", action="store_true",
                     help="Measure quadratures too (default for tmsv/eq14 is photon counting only)")
    sim.add_argument("--output", "-o", help="EstimationResult JSON file")
    sim.add_argument("--transcript", help="Transcript JSONL file")

    # ── Phase diagram ────────────────────────────────────
    pd = sub.add_parser("phase-diagram", help="Classify the symmetric thermal-squeezed family on a grid")
    pd.add_argument("--n-grid", default="0:3:200", help="a:b:points for n")
    pd.add_argument("--eta1-grid", default="-0.5:0.5:200", help="a:b:points for eta1 (write --eta1-grid=-a:b:k)")
    pd.add_argument("--output", "-o", help="CSV file (stdout if omitted)")
    pd.add_argument("--plot", help="gnuplot script (defaults to the CSV name with .gp)")
    pd.add_argument("--workers", type=int, default=1, help="Worker processes")

    # ── Oracle ───────────────────────────────────────────
    orc = sub.add_parser("oracle", help="Verify closed forms against the Fock-space oracle")
    orc.add_argument("--suite", choices=[s.value for s in Suite], default=Suite.ALL.value)
    orc.add_argument("--cutoff", type=int, default=get_settings().default_cutoff, help="Fock cutoff per mode")
    orc.add_argument("--seed", type=int, help="RNG seed for the protocol suite")
    orc.add_argument("--output", "-o", help="Report JSON file")

    return parser


def main(argv: list[str] | None = None) -> int:
    settings = get_settings()
    level = "DEBUG" if settings.debug else settings.log_level
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    logging.getLogger("gaussent").setLevel(level)
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_USAGE

    handlers = {
        "analyze": handle_analyze,
        "simulate": handle_simulate,
        "phase-diagram": handle_phase_diagram,
        "oracle": handle_oracle,
    }
    return handlers[args.command](args)


# ── Helpers ─────────────────────────────────────────────

def _say(message: str) -> None:
    print(message, file=sys.stderr)


def _emit(content: str, output: str | None) -> None:
    if output:
        ExportService.write_atomic(output, content)
        _say(f"Saved to {output}")
    else:
        sys.stdout.write(content)


def _fields(exc: ValidationError) -> str:
    return ", ".join(".".join(str(p) for p in e["loc"]) or "<root>" for e in exc.errors())


def _load_json(path: str):
    """Parsed JSON, or None after reporting the problem."""
    p = Path(path)
    if not p.exists():
        _say(f"File not found: {path}")
        return None
    try:
        return json.loads(p.read_text(encoding="utf-8-sig"))
    except json.JSONDecodeError as exc:
        _say(f"❌ {path} is not valid JSON: {exc}")
        return None


def parse_grid(spec: str) -> list[float]:
    """'a:b:points' -> points evenly spaced values from a to b inclusive."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise InvalidInput(f"Grid '{spec}' must look like a:b:points")
    try:
        lo, hi, points = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise InvalidInput(f"Grid '{spec}' has a non-numeric field") from exc
    if points < 1 or not np.isfinite(lo) or not np.isfinite(hi):
        raise InvalidInput(f"Grid '{spec}' needs finite bounds and at least one point")
    if points == 1 and lo != hi:
        raise InvalidInput(f"Grid '{spec}' has one point but two different bounds")
    return [float(x) for x in np.linspace(lo, hi, points)]


# ── Command Handlers ────────────────────────────────────

def handle_analyze(args) -> int:
    data = _load_json(args.state)
    if data is None:
        return EXIT_USAGE
    try:
        state = StateIn.model_validate(data)
    except ValidationError as exc:
        _say(f"❌ Invalid state file, offending field(s): {_fields(exc)}")
        return EXIT_USAGE

    v = state.to_covariance()
    check = check_physical(v)
    if not check.ok:
        _say(f"❌ Unphysical state: {check.reason}")
        return EXIT_UNPHYSICAL

    inv = invariants_direct(v)
    verdict = simon_test(inv, args.boundary_tol)
    symmetric = is_symmetric(inv, args.symmetry_tol)

    try:
        report = {
            "physical": check.to_dict(),
            "purity": purity(v),
            "p_representable": p_representable(v),
            "invariants_direct": inv.to_dict(),
            "separable": verdict.separable,
            "boundary_flag": verdict.boundary,
            "simon_gap": verdict.gap,
            "eof_bits": eof_symmetric(inv, args.symmetry_tol, args.boundary_tol) if symmetric else None,
            "log_negativity_bits": log_negativity(inv, args.boundary_tol),
        }
    except GaussEntError as exc:
        _say(f"❌ {type(exc).__name__}: {exc}")
        return EXIT_FAILED

    try:
        local = LocalData.from_covariance(v)
        report["local_data"] = local.to_dict()
        report["local_pipeline"] = analyze(local, args.symmetry_tol, args.boundary_tol).to_dict()
    except GaussEntError as exc:
        logger.warning(f"Local pipeline unavailable: {exc}")
        report["local_data"] = None
        report["local_pipeline"] = None

    status = "✅ separable" if verdict.separable else "⚠️  entangled"
    _say(f"{status} (purity {report['purity']:.6f}, E_N {report['log_negativity_bits']:.6f} bits)")
    _emit(ExportService.to_json(report, pretty=True) + "\n", args.output)
    return EXIT_OK


def _plan_from_args(args, photocount_only: bool) -> ShotPlan:
    overrides = {
        "n_local": args.local_shots if args.local_shots is not None else args.shots,
        "n_parity": args.parity_shots if args.parity_shots is not None else args.shots,
        "seed": args.seed,
        "bootstrap": args.bootstrap,
        "batch_size": args.batch_size,
    }
    return ShotPlan(photocount_only=photocount_only, **{k: v for k, v in overrides.items() if v is not None})


def _circuit_from_args(args) -> tuple[GaussianCircuit | None, int]:
    if args.family == "tmsv":
        return GaussianCircuit.tmsv(args.r), EXIT_OK
    if args.family == "eq14":
        check = check_physical(thermal_squeezed(args.n, args.mc))
        if not check.ok:
            _say(f"❌ Unphysical state: {check.reason}")
            return None, EXIT_UNPHYSICAL
        return GaussianCircuit.thermal_squeezed(args.n, args.mc), EXIT_OK

    if not args.circuit:
        _say("❌ --family circuit needs --circuit FILE")
        return None, EXIT_USAGE
    data = _load_json(args.circuit)
    if data is None:
        return None, EXIT_USAGE
    try:
        return CircuitIn.model_validate(data).to_circuit(), EXIT_OK
    except ValidationError as exc:
        _say(f"❌ Invalid circuit file, offending field(s): {_fields(exc)}")
        return None, EXIT_USAGE


def handle_simulate(args) -> int:
    try:
        circuit, code = _circuit_from_args(args)
    except GaussEntError as exc:
        _say(f"❌ Unphysical state: {exc}")
        return EXIT_UNPHYSICAL
    if circuit is None:
        return code

    photocount_only = args.family in ("tmsv", "eq14") and not args.full_tomography
    try:
        plan = _plan_from_args(args, photocount_only)
    except InvalidInput as exc:
        _say(f"❌ {exc}")
        return EXIT_USAGE
    _say(f"Seed: {plan.seed}")

    try:
        circuit.validate()
        result, transcript = run_protocol(circuit, plan, channel=args.channel)
    except (ChannelError, ProtocolViolation) as exc:
        _say(f"❌ Protocol failed: {exc}")
        partial = getattr(exc, "transcript", None)
        if args.transcript and partial is not None:
            ExportService.write_atomic(args.transcript, partial.to_jsonl())
        return EXIT_FAILED
    except CutoffTooSmall as exc:
        _say(f"❌ Fock cutoff too small (leakage {exc.leakage:.2e}): {exc}")
        return EXIT_FAILED
    except GaussEntError as exc:
        _say(f"❌ {type(exc).__name__}: {exc}")
        return EXIT_UNPHYSICAL

    out = {"family": args.family, "circuit": circuit.to_dict(), "channel": args.channel, **result.to_dict()}
    if args.transcript:
        ExportService.write_atomic(args.transcript, transcript.to_jsonl())
        _say(f"Transcript: {len(transcript)} messages -> {args.transcript}")

    report = result.report
    flag = " (boundary-uncertain)" if result.boundary_uncertain else ""
    symbol = "✅" if report.separable else "⚠️ "
    _say(f"{symbol} Verdict: {result.verdict}{flag}")
    for label, key, value in (
        ("E_f", "eof_bits", report.eof),
        ("E_N", "log_negativity_bits", report.log_negativity),
    ):
        if value is not None:
            se = result.stderr.get(key)
            _say(f"  {label}: {value:.4f} bits" + (f" ± {se:.4f}" if se is not None else ""))
    _emit(ExportService.to_json(out, pretty=True) + "\n", args.output)
    return EXIT_OK


def handle_phase_diagram(args) -> int:
    try:
        n_grid = parse_grid(args.n_grid)
        eta1_grid = parse_grid(args.eta1_grid)
        if args.workers > 1:
            with ProcessPoolExecutor(max_workers=args.workers) as pool:
                cells = phase_diagram(n_grid, eta1_grid, executor=pool)
        else:
            cells = phase_diagram(n_grid, eta1_grid)
    except InvalidInput as exc:
        _say(f"❌ {exc}")
        return EXIT_USAGE

    content = ExportService.to_csv(
        ExportService.phase_diagram_rows(cells), columns=["n", "eta1", "class", "ef_bits"]
    )
    _emit(content, args.output)

    plot = args.plot or (str(Path(args.output).with_suffix(".gp")) if args.output else None)
    if plot:
        csv_name = Path(args.output).name if args.output else "phase_diagram.csv"
        ExportService.write_atomic(plot, ExportService.phase_diagram_plot_script(csv_name, max(n_grid)))
        _say(f"Plot script saved to {plot}")

    counts = {c.value: 0 for c in CellClass}
    for cell in cells:
        counts[cell.cls.value] += 1
    _say("Cells: " + ", ".join(f"{k}={v}" for k, v in counts.items()))
    return EXIT_OK


def handle_oracle(args) -> int:
    if args.cutoff < MIN_ORACLE_CUTOFF:
        _say(f"❌ --cutoff must be at least {MIN_ORACLE_CUTOFF}")
        return EXIT_USAGE

    cases = run_suite(args.suite, args.cutoff, args.seed)
    passed = all(c.passed for c in cases)
    report = {
        "suite": args.suite,
        "cutoff": args.cutoff,
        "passed": passed,
        "cases": [c.to_dict() for c in cases],
    }
    _emit(ExportService.to_json(report, pretty=True) + "\n", args.output)

    for c in cases:
        if not c.passed:
            detail = c.error or f"|diff| = {c.diff:.3e} > {c.tol:.1e}"
            _say(f"❌ {c.suite}/{c.case}/{c.identity}: {detail}")
    _say(f"{'✅' if passed else '❌'} {sum(c.passed for c in cases)}/{len(cases)} checks passed")
    return EXIT_OK if passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
