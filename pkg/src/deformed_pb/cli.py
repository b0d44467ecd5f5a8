"""``deformed-pb`` command line.

Exit codes: 0 when every checked inequality holds, 1 when a violation or a
per-trial accuracy error was recorded, 2 for usage and configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .core import DeformedDomainError, ParameterError, parse_matrix_json
from .harness import (
    Command,
    ConfigError,
    OutputFormat,
    RunConfig,
    format_grids,
    replay,
    run,
    run_single,
)
from .quadrature import QuadratureSpec

__all__ = ["main", "build_parser", "config_from_args"]


class _Parser(argparse.ArgumentParser):
    # argparse already exits with 2 on usage errors; keep the usage text on stderr
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _dims(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"dims must be integers, got {text!r}")


def _shared(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("shared options")
    g.add_argument("--dims", type=_dims, default=(2, 3, 4, 8), help="comma-separated dimensions")
    g.add_argument("--trials", type=int, default=1000, help="trials per dimension (per row for convexity)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--q", type=float, default=None, help="single parameter point instead of a grid")
    g.add_argument("--r", type=float, default=None)
    g.add_argument("--grid", default=None, help="named grid, see --print-grids")
    g.add_argument("--nodes", type=int, default=400, help="initial quadrature nodes")
    g.add_argument("--tol", type=float, default=None, help="override the relative tolerance")
    g.add_argument("--out", default=None, help="report path (default stdout)")
    g.add_argument("--format", choices=[f.value for f in OutputFormat], default="jsonl")
    g.add_argument("--jobs", type=int, default=1)
    g.add_argument("--functional", choices=("trace", "conjugated", "mixed"), default="mixed",
                   help="positive functional for the main theorem")
    g.add_argument("--matrix-a", default=None, help="JSON matrix (file or literal) for a single instance")
    g.add_argument("--matrix-b", default=None)
    g.add_argument("--replay-trial", type=int, default=None, help="re-run one trial and print it")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="deformed-pb", description=__doc__.splitlines()[0])
    parser.add_argument("--print-grids", action="store_true", help="list the built-in grids and exit")
    top = parser.add_subparsers(dest="group", parser_class=_Parser)

    verify = top.add_parser("verify", help="randomized inequality sweeps")
    vsub = verify.add_subparsers(dest="suite_name", required=True, parser_class=_Parser)
    p = vsub.add_parser("main", help="generalized Peierls-Bogolyubov inequality")
    p.add_argument("--case", required=True, choices=("i", "ii", "iii", "iv", "v"))
    _shared(p)
    p = vsub.add_parser("variant", help="variant inequality for x -> x^p")
    p.add_argument("--direction", required=True, choices=("convex", "concave"))
    _shared(p)
    p = vsub.add_parser("convexity", help="midpoint convexity probes")
    p.add_argument("--target", required=True, choices=("G", "F", "trace-power", "trace-power-conj"))
    _shared(p)
    p = vsub.add_parser("entropy", help="relative-entropy lemma, bound and limits")
    p.add_argument("--suite", required=True, choices=("lemma", "bound", "limits"))
    _shared(p)

    frechet = top.add_parser("frechet", help="Frechet differential cross-checks")
    fsub = frechet.add_subparsers(dest="suite_name", required=True, parser_class=_Parser)
    p = fsub.add_parser("check", help="quadrature vs divided difference vs finite difference")
    p.add_argument("--method", default="both", choices=("dd", "quad", "both"))
    _shared(p)
    return parser


def _selector(args) -> tuple[Command, str]:
    if args.group == "frechet":
        return Command.FrechetCheck, args.method
    return {
        "main": (Command.VerifyMain, getattr(args, "case", None)),
        "variant": (Command.VerifyVariant, getattr(args, "direction", None)),
        "convexity": (Command.VerifyConvexity, getattr(args, "target", None)),
        "entropy": (Command.VerifyEntropy, getattr(args, "suite", None)),
    }[args.suite_name]


def config_from_args(args) -> RunConfig:
    command, selector = _selector(args)
    grid = args.grid
    if args.q is not None or args.r is not None:
        if grid is not None:
            raise ConfigError("--grid cannot be combined with --q/--r")
        if command is Command.FrechetCheck:
            if args.q is None:
                raise ConfigError("frechet check takes --q (exp_q parameter)")
            grid = (("exp", args.q),)
        elif command is Command.VerifyEntropy:
            if args.q is None:
                raise ConfigError("entropy suites take --q only")
            grid = ((args.q, 0.0),)
        else:
            if args.q is None or args.r is None:
                raise ConfigError("--q and --r must be given together")
            grid = ((args.q, args.r),)
    try:
        quad = QuadratureSpec(nodes=args.nodes)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return RunConfig(
        command=command,
        selector=selector,
        dims=args.dims,
        trials=args.trials,
        seed=args.seed,
        grid=grid,
        quadrature=quad,
        out=args.out,
        format=OutputFormat(args.format),
        jobs=args.jobs,
        tol=args.tol,
        functional=args.functional,
    ).validate()


def _single(cfg: RunConfig, args) -> int:
    if args.matrix_a is None or args.matrix_b is None:
        raise ConfigError("--matrix-a and --matrix-b must be given together")
    if args.q is None or args.r is None:
        raise ConfigError("single-instance checks need --q and --r")
    A = parse_matrix_json(args.matrix_a)
    B = parse_matrix_json(args.matrix_b)
    if A.dim != B.dim:
        raise ConfigError(f"matrix dimensions differ: {A.dim} vs {B.dim}")
    rec = run_single(cfg, A, B, args.q, args.r)
    print(json.dumps(rec))
    return 0 if rec["holds"] else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.print_grids:
        print(format_grids())
        return 0
    if args.group is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        cfg = config_from_args(args)
        if args.matrix_a is not None or args.matrix_b is not None:
            return _single(cfg, args)
        if args.replay_trial is not None:
            rec = replay(cfg, args.replay_trial)
            print(json.dumps(rec))
            return 0 if rec["holds"] else 1
        code, _ = run(cfg)
        return code
    except (ConfigError, DeformedDomainError, ParameterError, ValueError) as exc:
        # ValueError covers malformed or non-Hermitian matrix JSON
        print(f"deformed-pb: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"deformed-pb: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
