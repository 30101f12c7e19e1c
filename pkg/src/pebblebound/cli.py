"""Command-line driver tying generators, validators, oracles, and bounds.

Exit codes: 0 success, 1 domain failure (invalid game, infeasible
instance), 2 usage error, 3 search budget exhausted.

Two output streams: the default human-readable text (which may mention
wall time), and ``--kv``, a deterministic line-oriented ``key=value``
stream that is byte-identical across runs on identical inputs.  With
``--record PATH`` every command appends a run record carrying the command
line, sha256 digests of every file input, and its outputs.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .balance import AnalysisReport, analyze, load_machine
from .bounds import (
    analytic_lb,
    mincut_divide_bound,
    mincut_lower_bound,
    spart_lower_bound,
    umax_bruteforce,
    wmax,
)
from .cdag import Cdag, Partition
from .errors import BudgetExhaustedError, FormatError, GameError, InfeasibleGameError, PebbleboundError
from .formats import (
    format_annotations,
    format_cdag,
    format_trace,
    parse_annotations,
    parse_cdag,
    parse_hierarchy,
    parse_trace,
)
from .games import heuristic_game, validate_prbw, validate_rb, validate_rbw
from .generators import ALGORITHMS, AlgorithmParams, generate
from .oracle import DEFAULT_BUDGET, optimal_io
from .reports import BoundReport


class _Run:
    """Collects key=value outputs and run-record bookkeeping."""

    def __init__(self, args, argv):
        self.kv = bool(getattr(args, "kv", False))
        self.record_path = getattr(args, "record", None)
        self.argv = argv
        self.pairs: list[tuple[str, str]] = []
        self.digests: list[tuple[str, str]] = []
        self.started = time.monotonic()

    def emit(self, key: str, value) -> None:
        self.pairs.append((key, _render(value)))

    def digest(self, path: str) -> None:
        data = Path(path).read_bytes()
        self.digests.append((path, hashlib.sha256(data).hexdigest()))

    def finish(self) -> None:
        if self.kv:
            for k, v in self.pairs:
                print(f"{k}={v}")
        else:
            for k, v in self.pairs:
                print(f"{k} = {v}")
            print(f"(wall time {time.monotonic() - self.started:.3f}s)")
        if self.record_path:
            with open(self.record_path, "a", encoding="utf-8") as fh:
                fh.write("record 1\n")
                fh.write("command=" + " ".join(self.argv) + "\n")
                fh.write(f"version={__version__}\n")
                fh.write(f"walltime={time.monotonic() - self.started:.3f}\n")
                for path, digest in self.digests:
                    fh.write(f"input.{path}.sha256={digest}\n")
                for k, v in self.pairs:
                    fh.write(f"output.{k}={v}\n")


def _render(value) -> str:
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator} ({float(value):.6g})"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _emit_report(run: _Run, prefix: str, rep: BoundReport) -> None:
    run.emit(f"{prefix}.kind", rep.kind)
    run.emit(f"{prefix}.method", rep.method)
    run.emit(f"{prefix}.value", rep.value)
    if rep.symbolic:
        run.emit(f"{prefix}.symbolic", rep.symbolic)
    if rep.asymptotic:
        run.emit(f"{prefix}.asymptotic", rep.asymptotic)
    for k in sorted(rep.params):
        run.emit(f"{prefix}.param.{k}", rep.params[k])
    for i, step in enumerate(rep.provenance):
        run.emit(f"{prefix}.provenance.{i}", step)


def _load_cdag(run: _Run, path: str) -> Cdag:
    run.digest(path)
    return parse_cdag(Path(path).read_text(encoding="utf-8"))


def _params_from_args(args) -> AlgorithmParams:
    return AlgorithmParams(
        algorithm=args.alg,
        n=args.n,
        d=args.d,
        T=args.T,
        m=args.m,
        stencil_points=args.stencil_points,
    )


def _add_alg_flags(p, with_alg=True):
    if with_alg:
        p.add_argument("--alg", required=True, choices=ALGORITHMS)
    p.add_argument("--n", type=int, default=1, help="grid/matrix extent per dimension")
    p.add_argument("--d", type=int, default=1, help="spatial dimension")
    p.add_argument("--T", type=int, default=1, help="outer iteration count")
    p.add_argument("--m", type=int, default=1, help="Krylov iteration count")
    p.add_argument("--stencil-points", type=int, default=None, dest="stencil_points")


def cmd_generate(args, argv) -> int:
    run = _Run(args, argv)
    ann = generate(_params_from_args(args))
    Path(args.out).write_text(format_cdag(ann.cdag), encoding="utf-8")
    run.emit("cdag", args.out)
    run.emit("vertices", len(ann.cdag.vertices))
    run.emit("edges", len(ann.cdag.edges))
    run.emit("inputs", len(ann.cdag.inputs))
    run.emit("outputs", len(ann.cdag.outputs))
    if args.annotations:
        Path(args.annotations).write_text(format_annotations(ann), encoding="utf-8")
        run.emit("annotations", args.annotations)
        run.emit("slabs", len(ann.slabs))
        run.emit("anchors", " ".join(str(a) for a in ann.wavefront_anchors))
    run.finish()
    return 0


def cmd_validate(args, argv) -> int:
    run = _Run(args, argv)
    cdag = _load_cdag(run, args.cdag)
    run.digest(args.trace)
    game, moves = parse_trace(Path(args.trace).read_text(encoding="utf-8"))
    if game == "prbw":
        if not args.hier:
            raise FormatError("hierarchical traces need --hier")
        run.digest(args.hier)
        config = parse_hierarchy(Path(args.hier).read_text(encoding="utf-8"))
        tally = validate_prbw(cdag, config, moves)
        run.emit("game", "prbw")
        run.emit("loads", tally.loads)
        run.emit("stores", tally.stores)
        for (l, u), cnt in sorted(tally.vertical_down.items()):
            run.emit(f"vertical_down.L{l}.u{u}", cnt)
        for (l, u), cnt in sorted(tally.vertical_up.items()):
            run.emit(f"vertical_up.L{l}.u{u}", cnt)
        for u, cnt in sorted(tally.horizontal.items()):
            run.emit(f"horizontal.u{u}", cnt)
        for p, cnt in sorted(tally.computes.items()):
            run.emit(f"computes.p{p}", cnt)
    else:
        if args.S is None:
            raise FormatError("flat traces need --S")
        if args.game == "rb":
            tally = validate_rb(cdag, args.S, moves)
        else:
            tally = validate_rbw(cdag, args.S, moves)
        run.emit("game", args.game)
        run.emit("loads", tally.loads)
        run.emit("stores", tally.stores)
        run.emit("io", tally.io)
    run.finish()
    return 0


def cmd_play(args, argv) -> int:
    run = _Run(args, argv)
    cdag = _load_cdag(run, args.cdag)
    trace, tally = heuristic_game(cdag, args.S)
    run.emit("S", args.S)
    run.emit("loads", tally.loads)
    run.emit("stores", tally.stores)
    run.emit("io", tally.io)
    if args.trace_out:
        Path(args.trace_out).write_text(format_trace("rbw", trace), encoding="utf-8")
        run.emit("trace", args.trace_out)
    run.finish()
    return 0


def cmd_oracle(args, argv) -> int:
    run = _Run(args, argv)
    cdag = _load_cdag(run, args.cdag)
    rep = optimal_io(cdag, args.S, game=args.game, budget=args.budget)
    run.emit("game", args.game)
    run.emit("S", args.S)
    run.emit("optimum", rep.value)
    run.finish()
    return 0


def cmd_bound(args, argv) -> int:
    run = _Run(args, argv)
    if args.method == "analytic":
        if not args.alg:
            raise FormatError("--method analytic needs --alg")
        rep = analytic_lb(args.alg, _params_from_args(args), P=args.P, S=args.S or 0)
        _emit_report(run, "bound", rep)
        run.finish()
        return 0
    if not args.cdag:
        raise FormatError(f"--method {args.method} needs --cdag")
    if args.S is None:
        raise FormatError(f"--method {args.method} needs --S")
    cdag = _load_cdag(run, args.cdag)
    if args.method == "oracle":
        rep = optimal_io(cdag, args.S, game=args.game, budget=args.budget)
    elif args.method == "spart":
        umax = args.umax
        if umax is None:
            umax = umax_bruteforce(cdag, 2 * args.S, budget=args.budget)
            run.emit("umax.bruteforced", umax)
        rep = spart_lower_bound(cdag, args.S, umax)
    elif args.method == "mincut":
        anchors = None
        if args.anchors:
            run.digest(args.anchors)
            anchors = parse_annotations(Path(args.anchors).read_text(encoding="utf-8")).anchors
        rep = mincut_lower_bound(cdag, args.S, anchors or None)
    elif args.method == "mincut-divide":
        if not args.partition:
            raise FormatError("--method mincut-divide needs --partition")
        run.digest(args.partition)
        ann = parse_annotations(Path(args.partition).read_text(encoding="utf-8"))
        part = Partition.of(ann.slabs.values())
        rep = mincut_divide_bound(cdag, part, args.S)
    else:
        raise FormatError(f"unknown method {args.method!r}")
    _emit_report(run, "bound", rep)
    run.finish()
    return 0


def cmd_analyze(args, argv) -> int:
    run = _Run(args, argv)
    machine_path = Path(str(args.machine))
    if machine_path.is_file():
        run.digest(str(machine_path))
    machine = load_machine(args.machine)
    report = analyze(args.alg, _params_from_args(args), machine)
    _emit_analysis(run, report, args.level)
    run.finish()
    return 0


def _emit_analysis(run: _Run, report: AnalysisReport, level=None) -> None:
    run.emit("algorithm", report.algorithm)
    run.emit("machine", report.machine)
    run.emit("operations", report.v_size)
    if level in (None, "vertical"):
        run.emit("intensity.vertical", report.vertical.algorithm_intensity)
        run.emit("balance.vertical", report.vertical.machine_balance)
        run.emit("verdict.vertical", report.vertical.verdict)
    if level in (None, "horizontal"):
        run.emit("intensity.horizontal", report.horizontal.algorithm_intensity)
        run.emit("intensity.horizontal.asymptotic", report.horizontal_intensity_asymptotic)
        run.emit("balance.horizontal", report.horizontal.machine_balance)
        run.emit("verdict.horizontal", report.horizontal.verdict)
    for name, thr in report.jacobi_thresholds:
        run.emit(f"threshold.{name}.exact", "inf" if thr.exact == float("inf") else f"{thr.exact:.4g}")
        run.emit(f"threshold.{name}.published", f"{thr.published:.4g}")


def cmd_report(args, argv) -> int:
    for path in args.records:
        text = Path(path).read_text(encoding="utf-8")
        print(f"# {path}")
        print(text.rstrip())
    return 0


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="pebblebound",
        description="I/O-complexity analysis of computational DAGs under pebble games",
    )
    top.add_argument("--version", action="version", version=f"pebblebound {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--kv", action="store_true", help="deterministic key=value output")
        p.add_argument("--record", default=None, help="append a run record to this file")

    p = sub.add_parser("generate", help="emit a CDAG file plus annotation sidecar")
    _add_alg_flags(p)
    p.add_argument("--out", required=True)
    p.add_argument("--annotations", default=None)
    common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("validate", help="check a trace and print its I/O tally")
    p.add_argument("--cdag", required=True)
    p.add_argument("--trace", required=True)
    p.add_argument("--S", type=int, default=None)
    p.add_argument("--game", choices=("rb", "rbw"), default="rbw")
    p.add_argument("--hier", default=None)
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("play", help="run the heuristic player for an upper bound")
    p.add_argument("--cdag", required=True)
    p.add_argument("--S", type=int, required=True)
    p.add_argument("--trace-out", dest="trace_out", default=None)
    common(p)
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("oracle", help="exact optimum by exhaustive search")
    p.add_argument("--cdag", required=True)
    p.add_argument("--S", type=int, required=True)
    p.add_argument("--game", choices=("rb", "rbw"), default="rbw")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bound", help="run a lower-bound engine")
    p.add_argument("--method", required=True, choices=("spart", "mincut", "mincut-divide", "analytic", "oracle"))
    p.add_argument("--cdag", default=None)
    p.add_argument("--S", type=int, default=None)
    p.add_argument("--P", type=int, default=1)
    p.add_argument("--umax", type=int, default=None)
    p.add_argument("--anchors", default=None)
    p.add_argument("--partition", default=None)
    p.add_argument("--game", choices=("rb", "rbw"), default="rbw")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--alg", choices=ALGORITHMS, default=None)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--T", type=int, default=1)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--stencil-points", type=int, default=None, dest="stencil_points")
    common(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("analyze", help="machine-balance verdicts for an algorithm")
    _add_alg_flags(p)
    p.add_argument("--machine", required=True, help="shipped machine name or spec file path")
    p.add_argument("--level", choices=("vertical", "horizontal"), default=None)
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("report", help="print previously recorded run records")
    p.add_argument("records", nargs="+")
    common(p)
    p.set_defaults(func=cmd_report)
    return top


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, ["pebblebound"] + argv)
    except BudgetExhaustedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (GameError, InfeasibleGameError, FormatError, PebbleboundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
