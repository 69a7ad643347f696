"""Forward and backward Monte Carlo estimators built on the discounted walk."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ._validation import safe_ceil


class SparseEstimate(dict):
    """Vertex -> estimate map; absent vertices read as 0."""

    def __missing__(self, key):
        return 0.0

    def to_dense(self, n):
        out = np.zeros(n)
        for v, x in self.items():
            out[v] = x
        return out


class WalkOutcome(NamedTuple):
    endpoint: int
    steps: int


def walk_endpoint(session, start, alpha):
    """Endpoint of one discounted walk (two queries per step)."""
    rng = session.rng
    v = start
    while rng.random() >= alpha:
        d = session.deg(v)
        if d == 0:
            break
        v = session.neigh(v, rng.randbelow(d) + 1)
    return v


def random_walk(session, start, alpha):
    """Run one walk from ``start``; stop w.p. ``alpha`` before every move.

    A walk sitting on an isolated vertex cannot move and ends there.
    """
    if not 0 <= start < session.n:
        session.deg(start)  # raises the usual invalid-vertex error
    rng = session.rng
    v = start
    steps = 0
    while rng.random() >= alpha:
        d = session.deg(v)
        if d == 0:
            break
        v = session.neigh(v, rng.randbelow(d) + 1)
        steps += 1
    return WalkOutcome(v, steps)


def mc_walk_constant(cfg):
    """kappa_mc = 3 / (c^2 p_f): walks per unit of 1/delta."""
    return 3.0 / (cfg.c * cfg.c * cfg.p_f)


def mc_walk_count(cfg, scale=1.0):
    return max(1, safe_ceil(mc_walk_constant(cfg) * scale / cfg.delta))


def mc_single_source(session, s, cfg, walks=None):
    """Estimate ``pi(s, .)`` by endpoint frequencies of ``W`` walks."""
    W = mc_walk_count(cfg) if walks is None else walks
    counts = {}
    for _ in range(W):
        u = walk_endpoint(session, s, cfg.alpha)
        counts[u] = counts.get(u, 0) + 1
    return SparseEstimate((u, k / W) for u, k in counts.items())


def bmc_single_target(session, t, cfg, walks=None):
    """Estimate ``pi(., t)`` from walks started at ``t``.

    Reversibility gives ``pi(u, t) = pi(t, u) d(t) / d(u)``.
    """
    d_t = session.deg(t)
    if d_t == 0:
        return SparseEstimate({t: 1.0})
    W = mc_walk_count(cfg, d_t) if walks is None else walks
    counts = {}
    for _ in range(W):
        u = walk_endpoint(session, t, cfg.alpha)
        counts[u] = counts.get(u, 0) + 1
    return SparseEstimate((u, k / W * d_t / session.deg(u)) for u, k in counts.items())


def bmc_node_walk_count(cfg, d_t, m):
    """Walks needed for the PageRank variant of backward Monte Carlo.

    Each walk contributes ``X = d(t) / (n d(u))`` with ``X <= d(t)/n``, so
    ``Var X <= pi(t) d(t) / n``.  Combined with ``pi(t) >= alpha/n`` and
    ``pi(t) >= (1-alpha) alpha d(t)^2 / (2 m n)`` this gives the count below,
    which is ``O(min(d(t), m / d(t))) = O(m^{1/2})``.
    """
    a = cfg.alpha
    need = min(d_t / a, 2.0 * m / ((1.0 - a) * a * d_t))
    return max(1, safe_ceil(need / (cfg.c * cfg.c * cfg.p_f)))


def bmc_single_node(session, t, cfg, walks=None):
    """Estimate PageRank ``pi(t)`` from walks started at ``t``.

    ``pi(t) = (1/n) sum_u pi(t, u) d(t) / d(u)``, so averaging
    ``d(t) / (n d(endpoint))`` over walks is unbiased.
    """
    n = session.n
    d_t = session.deg(t)
    if d_t == 0:
        return 1.0 / n
    W = bmc_node_walk_count(cfg, d_t, session.m) if walks is None else walks
    inv = {}
    acc = 0.0
    for _ in range(W):
        u = walk_endpoint(session, t, cfg.alpha)
        w = inv.get(u)
        if w is None:
            w = inv[u] = 1.0 / session.deg(u)
        acc += w
    return d_t * acc / (n * W)
