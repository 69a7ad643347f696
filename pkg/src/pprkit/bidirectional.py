"""Estimators that combine a push phase with random walks."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._validation import check_count, safe_ceil
from .errors import InvalidVertexError, PreconditionError
from .montecarlo import SparseEstimate, mc_walk_constant, walk_endpoint
from .push import backwards_push, backwards_push_avg


def _check_vertex(session, v):
    if not 0 <= v < session.n:
        raise InvalidVertexError(f"vertex {v!r} outside [0, {session.n})")


# --- PageRank of a single vertex -------------------------------------------

@dataclass(frozen=True)
class SingleNodeParams:
    """Degree threshold ``tau`` and the two walk budgets."""

    tau: int
    w_L: int
    w_H: int

    def __post_init__(self):
        check_count("tau", self.tau, minimum=1)
        check_count("w_L", self.w_L)
        check_count("w_H", self.w_H)


def single_node_params(cfg, n, d_t):
    """Budgets that give relative error ``c`` with probability ``1 - p_f``."""
    a = cfg.alpha
    root = math.sqrt(n)
    tau = n if d_t <= root else safe_ceil(root)
    k = cfg.c * cfg.c * a * cfg.p_f
    w_L = safe_ceil(2.0 * min(tau, (1.0 - a) * d_t) / k)
    w_H = safe_ceil(2.0 * (1.0 - a) * n / (tau * k))
    return SingleNodeParams(tau, w_L, w_H)


def low_degree_prefix(session, t, tau, d_t=None):
    """Number of neighbors of ``t`` with degree at most ``tau``.

    Binary search over the degree-sorted list; each probe costs one
    NEIGH-SORTED and one DEG query.
    """
    if d_t is None:
        d_t = session.deg(t)
    lo, hi = 0, d_t  # answer lies in [lo, hi]
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if session.deg(session.neigh_sorted(t, mid)) <= tau:
            lo = mid
        else:
            hi = mid - 1
    return lo


def single_node_variance_bound(params, x_low, n, alpha, pi_t):
    """Upper bound on the estimator's variance for given ``|X_L|``."""
    low = x_low / (n * params.w_L) if params.w_L and x_low else 0.0
    high = 1.0 / (params.w_H * params.tau) if params.w_H else 0.0
    return (low + high) * (1.0 - alpha) * pi_t


def single_node(session, t, cfg, params=None):
    """Estimate ``pi(t)`` with JUMP, NEIGH-SORTED and ADJ.

    Splits ``N(t)`` into low-degree neighbors X_L (``d <= tau``) and the
    rest.  Mass arriving through X_L is sampled with walks started at a
    uniform member of X_L.  Mass through high-degree neighbors is sampled
    with walks from uniform vertices and kept only when the endpoint is a
    high-degree neighbor of ``t``.
    """
    session.require(jump=True, sorted=True, adj=True, who="single_node")
    _check_vertex(session, t)
    n = session.n
    a = cfg.alpha
    d_t = session.deg(t)
    if d_t == 0:
        return 1.0 / n
    if params is None:
        params = single_node_params(cfg, n, d_t)
    tau = params.tau
    x_low = low_degree_prefix(session, t, tau, d_t)
    est = a / n
    if x_low and params.w_L:
        acc = 0.0
        for _ in range(params.w_L):
            x = session.neigh_sorted(t, session.rng.randbelow(x_low) + 1)
            u = walk_endpoint(session, x, a)
            acc += 1.0 / session.deg(u)
        est += (1.0 - a) * x_low * acc / (n * params.w_L)
    if params.w_H:
        acc = 0.0
        for _ in range(params.w_H):
            x = walk_endpoint(session, session.jump(), a)
            if x == t:
                continue
            dx = session.deg(x)
            if dx > tau and session.adj(x, t):
                acc += 1.0 / dx
        est += (1.0 - a) * acc / params.w_H
    return est


# --- single pair -------------------------------------------------------------

@dataclass(frozen=True)
class BiPprParams:
    r_max: float
    n_r: int

    def __post_init__(self):
        if not 0.0 < self.r_max < 1.0:
            raise PreconditionError(f"r_max must lie in (0, 1), got {self.r_max}")
        check_count("n_r", self.n_r, minimum=1)


def bippr_params(cfg):
    r_max = min(0.5, cfg.delta ** (1.0 / 3.0))
    n_r = max(1, safe_ceil(2.0 * r_max / (cfg.c * cfg.c * cfg.delta * cfg.p_f)))
    return BiPprParams(r_max, n_r)


def correct_excluded(session, state, cfg):
    """Add ``(1 - alpha)/d(x)`` to the residual of every skipped neighbor x.

    After this the plain invariant ``pi(u, t) = p(u) + sum r(v) pi(u, v)``
    holds again.  Reuses the push phase's scan when it enumerated X.
    """
    a = cfg.alpha
    t = state.target
    if state.excluded is None:
        limit = 1.0 / state.r_max
        excluded = []
        for i in range(1, session.deg(t) + 1):
            x = session.neigh(t, i)
            dx = session.deg(x)
            if dx > limit:
                excluded.append((x, dx))
    else:
        excluded = [(x, session.deg(x)) for x in state.excluded]
    state.excluded = [x for x, _ in excluded]
    for x, dx in excluded:
        state.r[x] = state.r.get(x, 0.0) + (1.0 - a) / dx
    return state


def bippr_avg_pair(session, s, t, cfg, lazy=False, params=None):
    """Unbiased estimate of ``pi(s, t)``.

    Runs :func:`backwards_push_avg` on ``t``, restores the residual of the
    skipped high-degree neighbors, then averages ``r(endpoint)`` over walks
    from ``s`` and adds ``p(s)``.  In lazy mode the restoration is done at
    walk endpoints with DEG and ADJ instead of scanning ``N(t)``; with the
    same seed both modes return the same number.
    """
    if lazy:
        session.require(sorted=True, adj=True, who="lazy bippr_avg_pair")
    _check_vertex(session, s)
    _check_vertex(session, t)
    a = cfg.alpha
    if params is None:
        params = bippr_params(cfg)
    state = backwards_push_avg(session, t, params.r_max, cfg)
    r = state.r
    limit = 1.0 / params.r_max
    if lazy:
        lazy_bonus = {}
    else:
        correct_excluded(session, state, cfg)
        lazy_bonus = None
    acc = 0.0
    for _ in range(params.n_r):
        u = walk_endpoint(session, s, a)
        if lazy_bonus is None:
            acc += r.get(u, 0.0)
            continue
        val = lazy_bonus.get(u)
        if val is None:
            val = r.get(u, 0.0)
            if u != t:
                du = session.deg(u)
                if du > limit and session.adj(u, t):
                    val = val + (1.0 - a) / du
            lazy_bonus[u] = val
        acc += val
    return state.p.get(s, 0.0) + acc / params.n_r


# --- single target with JUMP -----------------------------------------------

def jump_st_r_max(cfg, n, d_t, variant):
    if variant == "worst":
        r = math.sqrt(cfg.delta * d_t / n)
    elif variant == "avg":
        r = (cfg.delta / n) ** (1.0 / 3.0)
    else:
        raise PreconditionError(f"variant must be 'worst' or 'avg', got {variant!r}")
    r = min(0.5, r)
    return r if r > 0.0 else 0.5


def jump_bidirectional_st(session, t, cfg, variant="worst", r_max=None):
    """Single-target estimate from a push phase plus JUMP-started walks.

    ``W = ceil(kappa_mc n r_max / delta)`` walks start at uniform vertices.
    For every start ``u`` that got walks, the estimate is ``p(u)`` plus the
    mean residual at their endpoints; other vertices get ``p(u)``.
    """
    session.require(jump=True, who="jump_bidirectional_st")
    _check_vertex(session, t)
    n = session.n
    d_t = session.deg(t)
    if r_max is None:
        r_max = jump_st_r_max(cfg, n, d_t, variant)
    if variant == "worst":
        state = backwards_push(session, t, r_max, cfg)
    elif variant == "avg":
        state = backwards_push_avg(session, t, r_max, cfg, use_sorted=False)
        correct_excluded(session, state, cfg)
    else:
        raise PreconditionError(f"variant must be 'worst' or 'avg', got {variant!r}")
    r = state.r
    est = SparseEstimate(state.p)
    if not r:
        return est
    W = max(1, safe_ceil(mc_walk_constant(cfg) * n * r_max / cfg.delta))
    sums = {}
    counts = {}
    a = cfg.alpha
    for _ in range(W):
        u = session.jump()
        x = walk_endpoint(session, u, a)
        sums[u] = sums.get(u, 0.0) + r.get(x, 0.0)
        counts[u] = counts.get(u, 0) + 1
    for u, k in counts.items():
        val = state.p.get(u, 0.0) + sums[u] / k
        if val > 0.0:
            est[u] = val
    return est
