"""Verification suites shared by ``pprkit verify`` and the test-suite.

Every check returns a :class:`CheckResult`.  Suites are plain lists of
zero-argument callables so callers can time or filter them.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import corpus
from .bench import ALGORITHMS, RunOptions, family_points, run_sweep, violation_rate
from .bidirectional import (
    SingleNodeParams,
    bippr_avg_pair,
    jump_bidirectional_st,
    low_degree_prefix,
    single_node,
    single_node_variance_bound,
)
from .config import EstimatorConfig, RandomStream, trial_stream
from .exact import (
    dp_rounds,
    exact_pagerank,
    exact_ppr_matrix,
    exact_single_source,
    exact_single_target,
    truncated_dp_oracle,
)
from .graph import AccessModel, AccessSession, Graph
from .instances import FAMILY_NAMES, compute_overlap_K, gen_family, verify_separation
from .montecarlo import bmc_single_node, bmc_single_target, mc_single_source
from .push import (
    PushState,
    backwards_push,
    backwards_push_avg,
    bp_avg_r_max,
    hybrid_single_target,
    power_method_target,
    rand_push,
)

SUITES = ("invariants", "separation", "accuracy", "scaling-smoke")

# Config used by the accuracy suite: the library default c = p_f = 0.1 needs
# ~10^9 walk steps for the 7 x 2 x 200 runs, so c is relaxed while p_f keeps
# its default.
ACCURACY_CONFIG = EstimatorConfig(alpha=0.2, c=0.3, p_f=0.1, delta=0.2, seed=0)
ACCURACY_DELTAS = (0.2, 0.05)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    limit: float
    detail: str = ""
    seconds: float = 0.0

    def as_dict(self):
        return asdict(self)

    def summary(self):
        text = f"{self.name}: value={self.value:.6g} limit={self.limit:.6g}"
        return f"{text} ({self.detail})" if self.detail else text

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.summary()}"


def _timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    res = fn(*args, **kwargs)
    return CheckResult(res.name, res.passed, res.value, res.limit, res.detail,
                       time.perf_counter() - t0)


def small_random_graphs(count, n_lo, n_hi, seed, p_lo=0.08, p_hi=0.3):
    """Seeded G(n, p) graphs for the statistical suites."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        n = int(rng.integers(n_lo, n_hi + 1))
        p = float(rng.uniform(p_lo, p_hi))
        out.append(corpus.gnp(n, p, seed * 7919 + k))
    return out


# --- exact identities -------------------------------------------------------

def check_oracle_equivalence(graphs=None, cfg=EstimatorConfig(), tol=1e-10):
    graphs = corpus.standard_corpus(50, 50) if graphs is None else graphs
    L = dp_rounds(cfg.alpha)
    worst = 0.0
    for g in graphs:
        for t in range(g.n):
            a = exact_single_target(g, cfg, t).values
            b = truncated_dp_oracle(g, cfg, t, L).values
            worst = max(worst, float(np.max(np.abs(a - b))))
    return CheckResult("oracle-equivalence", worst <= tol, worst, tol, f"{len(graphs)} graphs")


def check_reversibility(graphs=None, cfg=EstimatorConfig(), tol=1e-9):
    graphs = small_random_graphs(20, 10, 100, seed=2) if graphs is None else graphs
    worst = 0.0
    for g in graphs:
        P = exact_ppr_matrix(g, cfg)
        D = np.asarray(g.degrees, dtype=float)[:, None]
        A = D * P
        worst = max(worst, float(np.max(np.abs(A - A.T))))
    return CheckResult("reversibility", worst <= tol, worst, tol, f"{len(graphs)} graphs")


def _invariant_gap(P, state, t, extra=None):
    """max_u |pi(u,t) - p(u) - sum_w r(w) pi(u,w) - extra(u)|."""
    n = P.shape[0]
    p = np.zeros(n)
    for v, x in state.p.items():
        p[v] = x
    r = np.zeros(n)
    for v, x in state.r.items():
        r[v] = x
    rhs = p + P @ r
    if extra is not None:
        rhs = rhs + extra
    return float(np.max(np.abs(P[:, t] - rhs)))


def _push_corpus():
    graphs = [g for g in corpus.standard_corpus(50, 20) if g.n <= 20]
    graphs += [corpus.with_hub_neighbor(12), corpus.star(15),
               corpus.disjoint_union(corpus.star(12), corpus.path(4))]
    return graphs


def check_push_invariant(graphs=None, cfg=EstimatorConfig(), tol=1e-9, r_maxes=(0.3, 0.05, 0.01)):
    graphs = _push_corpus() if graphs is None else graphs
    worst_inv = 0.0
    worst_bound = 0.0
    pushes = 0
    for g in graphs:
        P = exact_ppr_matrix(g, cfg)
        for t in range(g.n):
            for r_max in r_maxes:
                def hook(state, _t=t):
                    nonlocal worst_inv, pushes
                    pushes += 1
                    worst_inv = max(worst_inv, _invariant_gap(P, state, _t))
                session = AccessSession(g)
                st = backwards_push(session, t, r_max, cfg, on_push=hook)
                worst_inv = max(worst_inv, _invariant_gap(P, st, t))
                gap = P[:, t] - _dense(st.p, g.n)
                worst_bound = max(worst_bound, float(max(-gap.min(), gap.max() - r_max, 0.0)))
    ok = worst_inv <= tol and worst_bound <= tol
    return CheckResult("push-invariant", ok, max(worst_inv, worst_bound), tol,
                       f"{pushes} pushes; invariant {worst_inv:.2e}, bound excess {worst_bound:.2e}")


def _dense(d, n):
    out = np.zeros(n)
    for v, x in d.items():
        out[v] = x
    return out


def check_push_avg_invariant(graphs=None, cfg=EstimatorConfig(), tol=1e-9, r_maxes=(0.3, 0.1, 0.02)):
    graphs = _push_corpus() if graphs is None else graphs
    worst_inv = 0.0
    worst_bound = 0.0
    with_x = 0
    for g in graphs:
        P = exact_ppr_matrix(g, cfg)
        a = cfg.alpha
        for t in range(g.n):
            for r_max in r_maxes:
                X = [x for x in g.neighbors(t) if g.degree(x) > 1.0 / r_max]
                extra = np.zeros(g.n)
                for x in X:
                    extra += (1.0 - a) / g.degree(x) * P[:, x]
                with_x += bool(X)

                def hook(state, _t=t, _e=extra):
                    nonlocal worst_inv
                    worst_inv = max(worst_inv, _invariant_gap(P, state, _t, _e))
                for use_sorted, model in ((True, AccessModel(sorted_enabled=True)), (False, AccessModel())):
                    session = AccessSession(g, model)
                    st = backwards_push_avg(session, t, r_max, cfg, on_push=hook, use_sorted=use_sorted)
                    worst_inv = max(worst_inv, _invariant_gap(P, st, t, extra))
                    gap = P[:, t] - _dense(st.p, g.n)
                    worst_bound = max(worst_bound, float(max(-gap.min(), gap.max() - 2 * r_max, 0.0)))
    ok = worst_inv <= tol and worst_bound <= tol and with_x > 0
    return CheckResult("push-avg-invariant", ok, max(worst_inv, worst_bound), tol,
                       f"{with_x} runs with skipped neighbors; invariant {worst_inv:.2e}, "
                       f"bound excess {worst_bound:.2e}")


def check_power_residuals(graphs=None, cfg=EstimatorConfig(), max_L=40, rel_slack=1e-12):
    if graphs is None:
        graphs = [corpus.clique(2), corpus.star(9), corpus.path(12), corpus.with_hub_neighbor(7),
                  corpus.gnp(30, 0.15, 5)]
    worst = 0.0
    for g in graphs:
        for t in (0, g.n - 1):
            for L in range(max_L + 1):
                st = power_method_target(AccessSession(g), t, L, cfg)
                bound = (1.0 - cfg.alpha) ** L
                worst = max(worst, st.max_residual() / bound - 1.0)
    # the residual is a product of L float roundings, so allow a few ulps
    return CheckResult("power-residuals", worst <= rel_slack, worst, rel_slack,
                       f"L in 0..{max_L}, {len(graphs)} graphs; value is max r_L/(1-alpha)^L - 1")


def invariant_checks():
    return [check_oracle_equivalence, check_reversibility, check_push_invariant,
            check_push_avg_invariant, check_power_residuals]


# --- statistical checks -----------------------------------------------------

def check_randpush_statistics(graphs=None, cfg=EstimatorConfig(), theta=0.05, rounds=20,
                              runs=5000, seed=11):
    graphs = [corpus.clique(3), corpus.gnp(16, 0.25, 3)] if graphs is None else graphs
    worst_z = 0.0
    worst_var = 0.0
    model = AccessModel(sorted_enabled=True)
    for gi, g in enumerate(graphs):
        t = 0
        ref = _dense(power_method_target(AccessSession(g), t, rounds, cfg).p, g.n)
        samples = np.empty((runs, g.n))
        for k in range(runs):
            session = AccessSession(g, model, RandomStream(seed, gi, k))
            est = rand_push(session, PushState(t, {}, {t: 1.0}), theta, rounds, cfg)
            samples[k] = est.to_dense(g.n)
        mean = samples.mean(axis=0)
        var = samples.var(axis=0, ddof=1)
        se = np.sqrt(var / runs)
        for u in range(g.n):
            diff = abs(mean[u] - ref[u])
            if se[u] > 0:
                worst_z = max(worst_z, diff / se[u])
            elif diff > 1e-12:
                worst_z = math.inf
            cap = 1.5 * rounds * theta * ref[u]
            if cap > 0:
                worst_var = max(worst_var, var[u] / cap)
            elif var[u] > 0:
                worst_var = math.inf
    ok = worst_z <= 4.0 and worst_var <= 1.0
    return CheckResult("randpush-statistics", ok, worst_z, 4.0,
                       f"max |bias|/SE {worst_z:.2f}; max Var/(1.5 L theta p) {worst_var:.3f}")


def single_node_instance():
    """32-vertex graph whose target has both low- and high-degree neighbors."""
    edges = [(0, k) for k in range(1, 6)]           # five leaves, degree 1
    hubs = (6, 7, 8)
    for h in hubs:
        edges.append((0, h))
    nxt = 9
    for h in hubs:                                   # each hub gets 7 more leaves
        for _ in range(7):
            edges.append((h, nxt))
            nxt += 1
    edges += [(nxt, nxt + 1), (nxt + 1, nxt + 2)]    # a disjoint path
    return Graph.from_edges(nxt + 3, edges), 0


def check_single_node_statistics(cases=None, cfg=EstimatorConfig(), runs=5000, seed=13):
    if cases is None:
        g, t = single_node_instance()
        cases = [(corpus.clique(5), 0, SingleNodeParams(3, 20, 20)),
                 (g, t, SingleNodeParams(4, 20, 20))]
    worst_z = 0.0
    worst_ratio = 0.0
    model = AccessModel.full()
    for ci, (g, t, params) in enumerate(cases):
        pi_t = exact_pagerank(g, cfg, t)
        x_low = low_degree_prefix(AccessSession(g, model), t, params.tau)
        bound = single_node_variance_bound(params, x_low, g.n, cfg.alpha, pi_t)
        vals = np.array([single_node(AccessSession(g, model, RandomStream(seed, ci, k)), t, cfg, params)
                         for k in range(runs)])
        se = vals.std(ddof=1) / math.sqrt(runs)
        z = abs(vals.mean() - pi_t) / se if se > 0 else (0.0 if abs(vals.mean() - pi_t) < 1e-12 else math.inf)
        worst_z = max(worst_z, z)
        worst_ratio = max(worst_ratio, vals.var(ddof=1) / (1.5 * bound) if bound > 0 else math.inf)
    ok = worst_z <= 4.0 and worst_ratio <= 1.0
    return CheckResult("single-node-statistics", ok, worst_z, 4.0,
                       f"max |bias|/SE {worst_z:.2f}; max Var/(1.5 bound) {worst_ratio:.3f}")


# --- accuracy contract ------------------------------------------------------

CONTRACT_ALGOS = ("mc", "bmc", "hybrid", "bp-avg", "bippr-avg", "jump-st", "single-node")


def _contract_errors(algo, g, cfg, rng, stream):
    """(estimates, truths) for one run; vector algorithms contribute all vertices."""
    entry = ALGORITHMS[algo]
    n = g.n
    session = AccessSession(g, AccessModel.full(), stream)
    if entry.kind == "node":
        t = rng.randbelow(n)
        return [single_node(session, t, cfg)], [exact_pagerank(g, cfg, t)]
    if entry.kind == "pair":
        s, t = rng.randbelow(n), rng.randbelow(n)
        return [bippr_avg_pair(session, s, t, cfg)], [exact_single_target(g, cfg, t)[s]]
    if entry.kind == "source":
        s = rng.randbelow(n)
        return mc_single_source(session, s, cfg).to_dense(n), exact_single_source(g, cfg, s).values
    t = rng.randbelow(n)
    truth = exact_single_target(g, cfg, t).values
    if algo == "bmc":
        est = bmc_single_target(session, t, cfg).to_dense(n)
    elif algo == "hybrid":
        est = hybrid_single_target(session, t, cfg).to_dense(n)
    elif algo == "bp-avg":
        est = _dense(backwards_push_avg(session, t, bp_avg_r_max(cfg), cfg).p, n)
    else:
        est = jump_bidirectional_st(session, t, cfg).to_dense(n)
        keep = truth > cfg.delta
        return est[keep], truth[keep]
    return est, truth


def check_accuracy(algo, cfg=ACCURACY_CONFIG, deltas=ACCURACY_DELTAS, graphs=None, runs_per_graph=20):
    graphs = small_random_graphs(10, 16, 64, seed=5) if graphs is None else graphs
    worst = 0.0
    parts = []
    for delta in deltas:
        c = cfg.with_(delta=delta)
        est, tru = [], []
        for gi, g in enumerate(graphs):
            for k in range(runs_per_graph):
                pick = RandomStream(cfg.seed, 0xACC, gi, k)
                e, t = _contract_errors(algo, g, c, pick, trial_stream(cfg.seed, gi * 1000 + k))
                est.extend(np.asarray(e, dtype=float).tolist())
                tru.extend(np.asarray(t, dtype=float).tolist())
        rate = violation_rate(est, tru, c.c, delta)
        worst = max(worst, rate)
        parts.append(f"delta={delta}: {rate:.4f} over {len(est)} comparisons")
    runs = len(graphs) * runs_per_graph
    limit = cfg.p_f + 0.05
    return CheckResult(f"accuracy[{algo}]", worst <= limit, worst, limit,
                       f"{runs} runs per delta; " + "; ".join(parts))


def accuracy_checks(algo=None):
    algos = CONTRACT_ALGOS if algo is None else (algo,)
    checks = [lambda a=a: check_accuracy(a) for a in algos]
    if algo is None:
        checks += [check_randpush_statistics, check_single_node_statistics]
    return checks


# --- separation -------------------------------------------------------------

SEPARATION_DEFAULT = (16, 40, 0.1)


def check_separation(family, n=None, m=None, delta=None, cfg=EstimatorConfig(), samples=20):
    n = SEPARATION_DEFAULT[0] if n is None else n
    m = SEPARATION_DEFAULT[1] if m is None else m
    delta = SEPARATION_DEFAULT[2] if delta is None else delta
    fam = gen_family(family, n, m, delta, cfg)
    rep = verify_separation(fam, cfg, samples=samples)
    return CheckResult(f"separation[{fam.name}]", rep.passed, rep.pi_swapped_min, rep.threshold,
                       f"{rep.kind}; base {rep.pi_base:.4g}; {rep.samples} swaps; c_eff {rep.c_eff:.3g}")


def check_overlap_closed_forms(cfg=EstimatorConfig()):
    cases = [("sp-worst", 16, 40, 0.1), ("st-worst-adj", 16, 40, 0.1), ("sp-worst", 8, 16, 0.1)]
    bad = []
    for name, n, m, delta in cases:
        fam = gen_family(name, n, m, delta, cfg)
        closed = compute_overlap_K(fam, method="closed")
        brute = compute_overlap_K(fam, method="brute")
        expect = fam.params["x"] * fam.params["y"] if name == "sp-worst" else 1
        if not closed == brute == expect:
            bad.append(f"{name}({n},{m}): closed {closed} brute {brute} expected {expect}")
    return CheckResult("overlap-closed-forms", not bad, len(bad), 0, "; ".join(bad) or f"{len(cases)} cases")


def separation_checks(family=None, n=None, m=None, delta=None):
    fams = FAMILY_NAMES if family is None else (family,)
    checks = [lambda f=f: check_separation(f, n, m, delta) for f in fams]
    if family is None:
        checks.append(check_overlap_closed_forms)
    return checks


# --- scaling smoke ------------------------------------------------------------

def check_scaling_smoke(cfg=EstimatorConfig(c=0.45, p_f=0.5, seed=11), tol=0.15):
    grid = [2 ** k for k in range(8, 13)]
    pts = family_points("sn-worst", "m", grid, cfg, degree=4)
    _, fit = run_sweep(pts, "bmc-node", AccessModel(), 3, RunOptions(), timing=False)
    return CheckResult("scaling-smoke[bmc-node vs m]", fit.within(0.5, tol), fit.slope, 0.5,
                       f"target 0.5 +/- {tol}; r2 {fit.r2:.4f}")


def scaling_checks():
    return [check_scaling_smoke]


def run_suite(name, *, algo=None, family=None, n=None, m=None, delta=None):
    if name == "invariants":
        checks = invariant_checks()
    elif name == "separation":
        checks = separation_checks(family, n, m, delta)
    elif name == "accuracy":
        checks = accuracy_checks(algo)
    elif name == "scaling-smoke":
        checks = scaling_checks()
    else:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return [_timed(fn) for fn in checks]
