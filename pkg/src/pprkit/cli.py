"""``pprkit`` command line: gen, exact, estimate, bench, verify.

Exit codes: 0 ok, 1 a check failed, 2 file or I/O problem, 3 the access
model does not offer what the algorithm needs, 4 bad usage.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import checks
from .bench import (
    ALGORITHMS,
    RunOptions,
    TrialJob,
    exact_value,
    family_points,
    geometric_grid,
    graph_points,
    run_sweep,
    run_trials,
    write_records,
)
from .config import EstimatorConfig, RandomStream
from .errors import GraphFormatError, ModelViolationError, PPRError
from .exact import exact_pagerank, exact_single_source, exact_single_target
from .graph import AccessModel, read_graph, write_graph
from .instances import FAMILY_NAMES, gen_family, resolve_family

EXIT_OK, EXIT_CHECK, EXIT_IO, EXIT_MODEL, EXIT_USAGE = 0, 1, 2, 3, 4

# exponent each (algo, sweep) pair is expected to show; used when --expect is absent
TARGET_EXPONENTS = {
    ("bmc-node", "m"): 0.5,
    ("single-node", "n"): 0.5,
    ("mc", "delta"): 1.0,
    ("hybrid", "delta"): 0.5,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _global_flags():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("estimator and output settings")
    g.add_argument("--alpha", type=float, default=None, help="termination probability (default 0.2)")
    g.add_argument("--c", type=float, default=None, help="relative error (default 0.1)")
    g.add_argument("--pf", type=float, default=None, help="failure probability (default 0.1)")
    g.add_argument("--delta", type=float, default=None, help="threshold (default 0.1)")
    g.add_argument("--seed", type=int, default=None, help="base seed (default 0)")
    g.add_argument("--model", default=None,
                   help="extra queries, e.g. jump,sorted,adj (default: whatever the algorithm needs)")
    g.add_argument("--csv", metavar="PATH", default=None, help="write CSV here instead of stdout")
    return p


def _config(args):
    base = EstimatorConfig()
    pick = lambda v, d: d if v is None else v
    return EstimatorConfig(pick(args.alpha, base.alpha), pick(args.c, base.c), pick(args.pf, base.p_f),
                           pick(args.delta, base.delta), pick(args.seed, base.seed))


def _model(args, algo=None):
    if args.model is not None:
        return AccessModel.parse(args.model)
    return ALGORITHMS[algo].model if algo else AccessModel()


def build_parser():
    parent = _global_flags()
    parser = _Parser(prog="pprkit", description="Personalized PageRank estimators on an instrumented graph.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", parents=[parent], help="write a hard-instance family to disk")
    g.add_argument("--family", required=True, help=f"one of {', '.join(FAMILY_NAMES)} (aliases accepted)")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--out", required=True, help="path of the base graph file")
    g.add_argument("--swap-out", default=None, help="directory for swapped instances and swaps.tsv")
    g.add_argument("--swaps", type=int, default=1)
    g.add_argument("--strict", action="store_true", help="reject case tables that need slack")

    e = sub.add_parser("exact", parents=[parent], help="exact PPR values from a linear solve")
    e.add_argument("--graph", required=True)
    what = e.add_mutually_exclusive_group(required=True)
    what.add_argument("--target", type=int, help="print pi(u, target) for every u")
    what.add_argument("--source", type=int, help="print pi(source, v) for every v")
    what.add_argument("--pagerank", action="store_true", help="print pi(v) for every v")

    s = sub.add_parser("estimate", parents=[parent], help="run an estimator and emit CSV records")
    s.add_argument("--algo", required=True, choices=sorted(ALGORITHMS))
    s.add_argument("--graph", required=True)
    s.add_argument("--source", type=int, default=None, help="defaults to the target")
    s.add_argument("--target", type=int, default=None, help="defaults to the source, else 0")
    s.add_argument("--trials", type=int, default=1)
    s.add_argument("--with-exact", action="store_true")
    _run_options(s)

    b = sub.add_parser("bench", parents=[parent], help="sweep sizes or thresholds and fit a slope")
    b.add_argument("--algo", required=True, choices=sorted(ALGORITHMS))
    src = b.add_mutually_exclusive_group(required=True)
    src.add_argument("--family", help="regenerate this family at every grid point")
    src.add_argument("--graph", help="fixed graph file (only with --sweep delta)")
    b.add_argument("--sweep", choices=("n", "m", "delta"), required=True)
    b.add_argument("--grid", required=True,
                   help="comma list (1024,2048,...) or lo:hi:points for a geometric grid")
    b.add_argument("--degree", type=float, default=4.0, help="m/n ratio when only one of them is swept")
    b.add_argument("--n", type=int, default=None, help="fixed n (delta sweep, or m sweep)")
    b.add_argument("--m", type=int, default=None, help="fixed m (delta sweep, or n sweep)")
    b.add_argument("--family-delta", type=float, default=None, help="delta used to build the family")
    b.add_argument("--source", type=int, default=None)
    b.add_argument("--target", type=int, default=None)
    b.add_argument("--trials", type=int, default=10)
    b.add_argument("--expect", type=float, default=None, help="target exponent")
    b.add_argument("--slope-tol", type=float, default=0.15)
    _run_options(b)

    v = sub.add_parser("verify", parents=[parent], help="run a verification suite")
    v.add_argument("--suite", required=True, choices=checks.SUITES)
    v.add_argument("--algo", choices=checks.CONTRACT_ALGOS, default=None)
    v.add_argument("--family", default=None)
    v.add_argument("--n", type=int, default=None)
    v.add_argument("--m", type=int, default=None)
    return parser


def _run_options(p):
    p.add_argument("--rmax", type=float, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--rounds", type=int, default=None)
    p.add_argument("--variant", choices=("worst", "avg"), default="worst")
    p.add_argument("--lazy", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-timing", action="store_true", help="write wall_ns = 0 for byte-stable output")


def _options(args):
    return RunOptions(args.rmax, args.theta, args.rounds, args.variant, args.lazy)


def _open_out(args):
    if args.csv:
        return open(args.csv, "w", newline="", encoding="utf-8")
    return None


def _emit_records(args, records):
    fh = _open_out(args)
    try:
        write_records(records, fh if fh is not None else sys.stdout)
    finally:
        if fh is not None:
            fh.close()


# --- subcommands ----------------------------------------------------------

def cmd_gen(args):
    cfg = _config(args)
    fam = gen_family(args.family, args.n, args.m, cfg.delta, cfg, strict=args.strict)
    write_graph(fam.base, args.out, comment=f"{fam.name} n={args.n} m={args.m} delta={cfg.delta}")
    info = {"family": fam.name, "vertices": fam.base.n, "edges": fam.base.m, "case": fam.case,
            "params": fam.params, "quadruples": fam.quadruple_space.size, "s": fam.s, "t": fam.t}
    if args.swap_out:
        if args.swaps < 1:
            raise UsageError("--swaps must be at least 1")
        out = Path(args.swap_out)
        out.mkdir(parents=True, exist_ok=True)
        rng = RandomStream(cfg.seed, 0x5A4)
        rows = []
        for k in range(args.swaps):
            q = fam.quadruple_space.sample(rng)
            write_graph(fam.swapped(q), out / f"swap_{k}.graph", comment=f"{fam.name} swap {k}")
            rows.append((k, *q))
        with open(out / "swaps.tsv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, delimiter="\t", lineterminator="\n")
            w.writerow(("index", "q1", "q2", "q3", "q4"))
            w.writerows(rows)
        info["swaps"] = args.swaps
    print(json.dumps(info, sort_keys=True))
    return EXIT_OK


def cmd_exact(args):
    cfg = _config(args)
    g = read_graph(args.graph)
    if args.pagerank:
        header, rows = ("vertex", "pagerank"), [(v, exact_pagerank(g, cfg, v)) for v in range(g.n)]
    elif args.target is not None:
        vec = exact_single_target(g, cfg, args.target)
        header, rows = ("vertex", f"ppr_to_{args.target}"), list(enumerate(vec.values.tolist()))
    else:
        vec = exact_single_source(g, cfg, args.source)
        header, rows = ("vertex", f"ppr_from_{args.source}"), list(enumerate(vec.values.tolist()))
    fh = _open_out(args)
    try:
        w = csv.writer(fh if fh is not None else sys.stdout, lineterminator="\r\n")
        w.writerow(header)
        w.writerows((v, repr(float(x))) for v, x in rows)
    finally:
        if fh is not None:
            fh.close()
    return EXIT_OK


def _endpoints(args, g):
    s = args.source if args.source is not None else args.target
    t = args.target if args.target is not None else args.source
    s, t = (0, 0) if s is None else (s, t)
    if not (0 <= s < g.n and 0 <= t < g.n):
        raise UsageError(f"source/target must lie in [0, {g.n})")
    return s, t


def _checked_model(args):
    model = _model(args, args.algo)
    need = ALGORITHMS[args.algo].model
    if not model.covers(need):
        raise ModelViolationError(
            f"{args.algo} needs {need.flags or 'base'} queries, model offers {model.flags or 'base'}")
    return model


def cmd_estimate(args):
    cfg = _config(args)
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    g = read_graph(args.graph)
    model = _checked_model(args)
    s, t = _endpoints(args, g)
    exact = exact_value(args.algo, g, cfg, s, t) if args.with_exact else None
    label = Path(args.graph).stem
    jobs = [TrialJob(g, label, args.algo, model, cfg.with_(seed=cfg.seed + k), s, t, k, _options(args),
                     exact, not args.no_timing) for k in range(args.trials)]
    _emit_records(args, run_trials(jobs, args.workers))
    return EXIT_OK


def _parse_grid(text):
    try:
        if ":" in text:
            lo, hi, pts = text.split(":")
            return geometric_grid(float(lo), float(hi), int(pts))
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --grid {text!r}: {exc}") from None


def cmd_bench(args):
    cfg = _config(args)
    grid = _parse_grid(args.grid)
    if len(grid) < 3:
        raise UsageError(f"need at least 3 grid points, got {len(grid)}")
    if args.trials < 5:
        raise UsageError("--trials must be at least 5")
    model = _checked_model(args)
    if args.graph:
        if args.sweep != "delta":
            raise UsageError("a fixed --graph only supports --sweep delta")
        g = read_graph(args.graph)
        s, t = _endpoints(args, g)
        points = graph_points(g, Path(args.graph).stem, grid, cfg, s, t)
    else:
        if args.sweep == "delta" and (args.n is None or args.m is None):
            raise UsageError("--sweep delta on a family needs --n and --m")
        points = family_points(resolve_family(args.family), args.sweep, grid, cfg, n=args.n, m=args.m,
                               degree=args.degree, family_delta=args.family_delta)
    records, fit = run_sweep(points, args.algo, model, args.trials, _options(args), args.workers,
                             timing=not args.no_timing)
    _emit_records(args, records)
    expect = args.expect if args.expect is not None else TARGET_EXPONENTS.get((args.algo, args.sweep))
    summary = {"algo": args.algo, "sweep": args.sweep, "x": list(fit.x_values), "mean_queries": list(fit.y_values),
               "slope": fit.slope, "intercept": fit.intercept, "r2": fit.r2, "expect": expect,
               "tolerance": args.slope_tol}
    ok = True if expect is None else fit.within(expect, args.slope_tol)
    summary["passed"] = ok
    print(json.dumps(summary), file=sys.stderr if args.csv is None else sys.stdout)
    return EXIT_OK if ok else EXIT_CHECK


def cmd_verify(args):
    if args.suite == "separation" and args.family is not None:
        resolve_family(args.family)
    results = checks.run_suite(args.suite, algo=args.algo, family=args.family, n=args.n, m=args.m,
                               delta=args.delta)
    for r in results:
        print(json.dumps(r.as_dict()), flush=True)
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK


COMMANDS = {"gen": cmd_gen, "exact": cmd_exact, "estimate": cmd_estimate, "bench": cmd_bench,
            "verify": cmd_verify}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help or a usage error
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except ModelViolationError as exc:
        print(f"pprkit: model violation: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except (GraphFormatError, OSError) as exc:
        print(f"pprkit: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, PPRError, ValueError) as exc:
        print(f"pprkit: {exc}", file=sys.stderr)
        return EXIT_USAGE


