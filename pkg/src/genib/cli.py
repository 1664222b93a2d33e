"""Command-line interface: ``genib solve | sweep | reproduce-paper``.

Exit status: 0 on success, 2 when some solve did not converge, 1 on usage,
input or output errors (and on a failed reproduction).
"""

from __future__ import annotations

import argparse
import logging
import sys
import warnings

import numpy as np

from . import instance
from .errors import GenIBError, NotConvergedWarning, ReproductionMismatch
from .functionals import FUNCTIONALS
from .io import FILE_RENORM_TOL, emit_csv, load_problem
from .solver import STOP_RULES, SolverConfig, solve
from .sweep import (
    DEFAULT_BETA_COUNT,
    DEFAULT_BETA_MAX,
    DEFAULT_BETA_MIN,
    SweepConfig,
    TradeoffPoint,
    reproduce_paper,
    run_sweep,
)

log = logging.getLogger("genib")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common(p):
    p.add_argument("--input", help="problem file (CSV matrix or JSON); default: built-in 3x3 example")
    p.add_argument("--functional", default="shannon", choices=sorted(FUNCTIONALS))
    p.add_argument("--t-size", type=int, default=2)
    p.add_argument("--epsilon", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=10_000)
    p.add_argument("--stop-rule", choices=STOP_RULES, default="objective")
    p.add_argument("--renormalize-tol", type=float, default=FILE_RENORM_TOL)
    p.add_argument("--output", help="CSV output path")


def build_parser():
    parser = _Parser(prog="genib", description="Generalized information bottleneck solver")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ps = sub.add_parser("solve", help="single solve at one beta")
    _common(ps)
    ps.add_argument("--beta", type=float, required=True)

    pw = sub.add_parser("sweep", help="tradeoff curve over a beta grid")
    _common(pw)
    pw.add_argument("--beta", type=float, action="append", help="explicit beta (repeatable)")
    pw.add_argument("--beta-min", type=float, default=DEFAULT_BETA_MIN)
    pw.add_argument("--beta-max", type=float, default=DEFAULT_BETA_MAX)
    pw.add_argument("--beta-count", type=int, default=DEFAULT_BETA_COUNT)
    pw.add_argument("--beta-spacing", choices=("linear", "log"), default="log")
    pw.add_argument("--restarts", type=int, default=1)
    pw.add_argument("--jobs", type=int, default=1)

    pr = sub.add_parser("reproduce-paper", help="rerun the published 3x3 example")
    pr.add_argument("--strict", action="store_true", help="also require the printed functional/matrix pairing")
    pr.add_argument("--tolerance", type=float, default=1e-3)
    pr.add_argument("--stop-rule", choices=STOP_RULES, default="channel")
    return parser


def _joint(args):
    if args.input:
        return load_problem(args.input, args.renormalize_tol)
    return instance.example_joint()


def _initial(args, joint):
    # the built-in example ships its printed starting encoder
    if not args.input and args.t_size == 2:
        return instance.INITIAL_ENCODER
    return None


def _cmd_solve(args):
    joint = _joint(args)
    cfg = SolverConfig(
        beta=args.beta, epsilon=args.epsilon, max_iterations=args.max_iters, t_size=args.t_size,
        functional=args.functional, seed=args.seed, initial_channel=_initial(args, joint),
        stop_rule=args.stop_rule,
    )
    report, state = solve(joint, cfg, warn=False)
    print(f"beta={cfg.beta:g} functional={report.functional} iterations={report.iterations} "
          f"converged={report.converged}")
    print(f"I(X;T)={report.final_I_xt:.10f} I_H(Y;T)={report.final_I_h_yt:.10f} G={report.objective:.12g}")
    print("p(t|x) =")
    print(np.array2string(state.p_t_x.rows, precision=8))
    if args.output:
        emit_csv([TradeoffPoint(cfg.beta, report.final_I_xt, report.final_I_h_yt, report.iterations,
                                report.converged, 0, report.objective, True)], args.output)
    return 0 if report.converged else 2


def _cmd_sweep(args):
    joint = _joint(args)
    cfg = SweepConfig(
        input_path=args.input, functional=args.functional,
        beta_grid=tuple(args.beta) if args.beta else None,
        beta_min=args.beta_min, beta_max=args.beta_max, beta_count=args.beta_count,
        beta_spacing=args.beta_spacing, t_size=args.t_size, epsilon=args.epsilon, seed=args.seed,
        restarts=args.restarts, output_path=args.output, max_iterations=args.max_iters,
        stop_rule=args.stop_rule, initial_channel=_initial(args, joint), jobs=args.jobs,
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NotConvergedWarning)
        points = run_sweep(cfg, joint)
    if args.output:
        emit_csv(points, args.output)
        log.info("wrote %d points to %s", len(points), args.output)
    else:
        for p in points:
            if p.best:
                print(f"{p.beta:.6g}\t{p.compression:.8f}\t{p.utility:.8f}\t{p.iterations}\t{int(p.converged)}")
    return 0 if all(p.converged for p in points) else 2


def _cmd_reproduce(args):
    try:
        report = reproduce_paper(strict=args.strict, tolerance=args.tolerance, stop_rule=args.stop_rule)
    except ReproductionMismatch as exc:
        print(f"reproduction mismatch: {exc}", file=sys.stderr)
        return 1
    print(report.summary())
    return 0 if all(r.converged for r in report.runs) else 2


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    handlers = {"solve": _cmd_solve, "sweep": _cmd_sweep, "reproduce-paper": _cmd_reproduce}
    try:
        return handlers[args.command](args)
    except (GenIBError, OSError, ValueError, KeyError) as exc:
        print(f"genib: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
