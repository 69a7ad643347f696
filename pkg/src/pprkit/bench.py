"""Experiment records, CSV I/O, algorithm registry and scaling sweeps."""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields

import numpy as np

from .bidirectional import bippr_avg_pair, jump_bidirectional_st, single_node
from .config import trial_stream
from .errors import PreconditionError
from .exact import exact_pagerank, exact_single_source, exact_single_target
from .graph import AccessModel, AccessSession
from .instances import gen_family
from .montecarlo import bmc_single_node, bmc_single_target, mc_single_source
from .push import (
    HybridParams,
    backwards_push,
    backwards_push_avg,
    bp_avg_r_max,
    hybrid_params,
    hybrid_single_target,
    power_method_target,
    power_rounds,
    rand_push,
    randpush_params,
    PushState,
)


@dataclass(frozen=True)
class ExperimentRecord:
    family: str
    n: int
    m: int
    delta: float
    algo: str
    model_flags: str
    trial: int
    seed: int
    queries_deg: int
    queries_neigh: int
    queries_sorted: int
    queries_jump: int
    queries_adj: int
    queries_total: int
    estimate: float
    exact: float | None
    abs_err: float | None
    rel_err: float | None
    wall_ns: int


FIELDNAMES = tuple(f.name for f in fields(ExperimentRecord))
_INTS = {"n", "m", "trial", "seed", "queries_deg", "queries_neigh", "queries_sorted",
         "queries_jump", "queries_adj", "queries_total", "wall_ns"}
_FLOATS = {"delta", "estimate", "exact", "abs_err", "rel_err"}


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_records(records, stream, header=True):
    w = csv.writer(stream, lineterminator="\r\n")
    if header:
        w.writerow(FIELDNAMES)
    for rec in records:
        w.writerow([_cell(v) for v in astuple(rec)])


def records_to_csv(records):
    buf = io.StringIO()
    write_records(records, buf)
    return buf.getvalue()


def read_records(stream):
    """Parse CSV produced by :func:`write_records`."""
    reader = csv.DictReader(stream)
    if tuple(reader.fieldnames or ()) != FIELDNAMES:
        raise PreconditionError(f"unexpected CSV header {reader.fieldnames}")
    out = []
    for row in reader:
        vals = {}
        for k, v in row.items():
            if k in _INTS:
                vals[k] = int(v)
            elif k in _FLOATS:
                vals[k] = float(v) if v != "" else None
            else:
                vals[k] = v
        out.append(ExperimentRecord(**vals))
    return out


# --- algorithms -------------------------------------------------------------

@dataclass(frozen=True)
class AlgoSpec:
    name: str
    kind: str  # "source", "target", "pair" or "node"
    model: AccessModel
    summary: str


ALGORITHMS = {
    entry.name: entry for entry in (
        AlgoSpec("mc", "source", AccessModel(), "forward Monte Carlo, single source"),
        AlgoSpec("bmc", "target", AccessModel(), "backward Monte Carlo, single target"),
        AlgoSpec("bmc-node", "node", AccessModel(), "backward Monte Carlo, PageRank of one vertex"),
        AlgoSpec("bp", "target", AccessModel(), "deterministic backward push"),
        AlgoSpec("power", "target", AccessModel(), "synchronous push rounds"),
        AlgoSpec("randpush", "target", AccessModel(sorted_enabled=True), "randomized push rounds"),
        AlgoSpec("hybrid", "target", AccessModel(sorted_enabled=True), "backward push then randomized push"),
        AlgoSpec("bp-avg", "target", AccessModel(), "backward push skipping high-degree neighbors"),
        AlgoSpec("bippr-avg", "pair", AccessModel(), "push plus walks, single pair"),
        AlgoSpec("jump-st", "target", AccessModel(jump_enabled=True), "push plus JUMP walks, single target"),
        AlgoSpec("single-node", "node", AccessModel.full(), "PageRank of one vertex with all queries"),
    )
}


@dataclass(frozen=True)
class RunOptions:
    """Optional overrides shared by the command line and the sweeps."""

    r_max: float | None = None
    theta: float | None = None
    rounds: int | None = None
    variant: str = "worst"
    lazy: bool = False


def _hybrid_params(session, cfg, target, opts):
    if opts.r_max is None and opts.theta is None and opts.rounds is None:
        return None
    base = hybrid_params(cfg, session.n, session.graph.degree(target))
    return HybridParams(opts.r_max if opts.r_max is not None else base.r_max,
                        opts.theta if opts.theta is not None else base.theta,
                        opts.rounds if opts.rounds is not None else base.rounds_L)


def _spec(algo, session):
    entry = ALGORITHMS.get(algo)
    if entry is None:
        raise PreconditionError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGORITHMS)}")
    session.require(jump=entry.model.jump_enabled, sorted=entry.model.sorted_enabled,
                    adj=entry.model.adj_enabled, who=algo)
    return entry


def run_vector(algo, session, cfg, vertex, opts=RunOptions()):
    """Whole-row estimate: ``pi(vertex, .)`` for source algorithms, ``pi(., vertex)`` for target ones."""
    entry = _spec(algo, session)
    if entry.kind == "source":
        return mc_single_source(session, vertex, cfg)
    if entry.kind != "target":
        raise PreconditionError(f"{algo} estimates a single number, not a vector")
    t = vertex
    if algo == "bmc":
        return bmc_single_target(session, t, cfg)
    if algo == "bp":
        r_max = opts.r_max if opts.r_max is not None else cfg.c * cfg.delta
        return backwards_push(session, t, r_max, cfg).reserves()
    if algo == "power":
        rounds = opts.rounds if opts.rounds is not None else power_rounds(cfg)
        return power_method_target(session, t, rounds, cfg).reserves()
    if algo == "randpush":
        theta, rounds = randpush_params(cfg)
        theta = opts.theta if opts.theta is not None else theta
        rounds = opts.rounds if opts.rounds is not None else rounds
        return rand_push(session, PushState(t, {}, {t: 1.0}), theta, rounds, cfg)
    if algo == "hybrid":
        return hybrid_single_target(session, t, cfg, _hybrid_params(session, cfg, t, opts))
    if algo == "bp-avg":
        r_max = opts.r_max if opts.r_max is not None else bp_avg_r_max(cfg)
        return backwards_push_avg(session, t, r_max, cfg).reserves()
    return jump_bidirectional_st(session, t, cfg, opts.variant, opts.r_max)


def run_algorithm(algo, session, cfg, source, target, opts=RunOptions()):
    """Run ``algo`` and return its scalar estimate for the requested vertex.

    Source and target algorithms report ``pi(source, target)`` taken from
    their row; PageRank algorithms report ``pi(target)``.
    """
    entry = _spec(algo, session)
    if entry.kind == "source":
        return run_vector(algo, session, cfg, source, opts)[target]
    if entry.kind == "target":
        return run_vector(algo, session, cfg, target, opts)[source]
    if algo == "bippr-avg":
        return bippr_avg_pair(session, source, target, cfg, lazy=opts.lazy)
    if algo == "bmc-node":
        return bmc_single_node(session, target, cfg)
    return single_node(session, target, cfg)


def exact_value(algo, graph, cfg, source, target):
    kind = ALGORITHMS[algo].kind
    if kind == "node":
        return exact_pagerank(graph, cfg, target)
    if kind == "source":
        return exact_single_source(graph, cfg, source)[target]
    return exact_single_target(graph, cfg, target)[source]


@dataclass(frozen=True)
class TrialJob:
    graph: object
    family: str
    algo: str
    model: AccessModel
    cfg: object
    source: int
    target: int
    trial: int
    opts: RunOptions = RunOptions()
    exact: float | None = None
    timing: bool = True


def run_trial(job):
    """One estimator run on a fresh session; returns an :class:`ExperimentRecord`."""
    cfg = job.cfg
    session = AccessSession(job.graph, job.model, trial_stream(cfg.seed, job.trial))
    t0 = time.perf_counter_ns()
    est = float(run_algorithm(job.algo, session, cfg, job.source, job.target, job.opts))
    wall = time.perf_counter_ns() - t0 if job.timing else 0
    q = session.counters
    abs_err = rel_err = None
    if job.exact is not None:
        abs_err = abs(est - job.exact)
        rel_err = abs_err / max(job.exact, cfg.delta)
    return ExperimentRecord(
        job.family, job.graph.n, job.graph.m, cfg.delta, job.algo, job.model.flags, job.trial, cfg.seed,
        q.deg, q.neigh, q.neigh_sorted, q.jump, q.adj, q.total, est, job.exact, abs_err, rel_err, wall)


def run_trials(jobs, workers=1):
    """Run jobs (optionally in a process pool); output order matches input order."""
    jobs = list(jobs)
    if workers <= 1 or len(jobs) <= 1:
        return [run_trial(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_trial, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


# --- scaling ------------------------------------------------------------------

@dataclass(frozen=True)
class ScalingFit:
    x_values: tuple
    y_values: tuple
    slope: float
    intercept: float
    r2: float

    def within(self, target, tol):
        return abs(self.slope - target) <= tol


def fit_scaling(x_values, y_values):
    """Least-squares line through ``(log x, log y)``."""
    x = np.asarray(x_values, dtype=float)
    y = np.asarray(y_values, dtype=float)
    if x.size < 3:
        raise PreconditionError(f"need at least 3 grid points, got {x.size}")
    if np.any(x <= 0) or np.any(y <= 0):
        raise PreconditionError("scaling fit needs positive values")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    r2 = min(1.0, max(0.0, r2))
    return ScalingFit(tuple(x.tolist()), tuple(y.tolist()), float(slope), float(intercept), r2)


@dataclass(frozen=True)
class SweepPoint:
    """Graph and query vertices for one grid value."""

    x: float
    graph: object
    family: str
    source: int
    target: int
    cfg: object


def family_points(family, sweep, grid, cfg, *, n=None, m=None, degree=None, family_delta=None):
    """Sweep points that regenerate ``family`` for every grid value.

    ``sweep`` is ``"n"`` (with ``m = degree * n`` unless ``m`` is fixed),
    ``"m"`` (with ``n = m / degree`` unless ``n`` is fixed) or ``"delta"``
    (graph fixed, estimator threshold varies; x is ``1/delta``).
    """
    fam_delta = family_delta if family_delta is not None else cfg.delta
    points = []
    if sweep == "delta":
        fam = gen_family(family, n, m, fam_delta, cfg)
        s, t = _query_vertices(fam)
        for d in grid:
            points.append(SweepPoint(1.0 / d, fam.base, fam.name, s, t, cfg.with_(delta=float(d))))
        return points
    for v in grid:
        v = int(v)
        if sweep == "n":
            nn = v
            mm = m if m is not None else int(round(degree * v))
        elif sweep == "m":
            mm = v
            nn = n if n is not None else max(4, int(round(v / degree)))
        else:
            raise PreconditionError(f"sweep must be n, m or delta, got {sweep!r}")
        fam = gen_family(family, nn, mm, fam_delta, cfg)
        s, t = _query_vertices(fam)
        x = fam.base.n if sweep == "n" else fam.base.m
        points.append(SweepPoint(float(x), fam.base, fam.name, s, t, cfg))
    return points


def _query_vertices(fam):
    q = next(iter(fam.quadruple_space))
    s = fam.source_for(q)
    t = fam.target_for(q)
    if t is None:
        t = fam.t
    if s is None:
        s = t
    return s, t


def graph_points(graph, label, grid, cfg, source, target):
    """Delta sweep on a fixed graph."""
    return [SweepPoint(1.0 / d, graph, label, source, target, cfg.with_(delta=float(d))) for d in grid]


def run_sweep(points, algo, model, trials, opts=RunOptions(), workers=1, timing=True):
    """Run ``trials`` per point; returns ``(records, fit)`` with y = mean total queries."""
    if len(points) < 3:
        raise PreconditionError(f"need at least 3 grid points, got {len(points)}")
    jobs = [TrialJob(p.graph, p.family, algo, model, p.cfg, p.source, p.target, k, opts, None, timing)
            for p in points for k in range(trials)]
    records = run_trials(jobs, workers)
    ys = []
    for i in range(len(points)):
        chunk = records[i * trials:(i + 1) * trials]
        ys.append(sum(r.queries_total for r in chunk) / len(chunk))
    return records, fit_scaling([p.x for p in points], ys)


def geometric_grid(lo, hi, points):
    """``points`` values spaced evenly in log between ``lo`` and ``hi``."""
    if points < 2:
        return [lo]
    r = (hi / lo) ** (1.0 / (points - 1))
    return [lo * r ** k for k in range(points)]


def violation_rate(estimates, truth, c, delta):
    """Fraction of entries with ``|est - truth| > c max(truth, delta)``."""
    est = np.asarray(estimates, dtype=float)
    tru = np.asarray(truth, dtype=float)
    bad = np.abs(est - tru) > c * np.maximum(tru, delta)
    return float(bad.mean()) if bad.size else 0.0


