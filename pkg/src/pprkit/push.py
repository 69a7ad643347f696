"""Local push algorithms for single-target PPR.

All routines keep reserves ``p`` and residuals ``r`` so that, after every
push, ``pi(u, t) = p(u) + sum_w r(w) pi(u, w)`` holds for every ``u``.

A push at an isolated vertex moves the whole residual into the reserve.
That is the closed form of repeatedly pushing along the implicit self-loop
a stuck walk uses, so the invariant is preserved.
"""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass, field

from ._validation import ceil_log, check_count, check_positive
from .errors import InvalidVertexError
from .montecarlo import SparseEstimate

RESIDUAL_FLOOR = 1e-15


@dataclass
class PushState:
    """Reserves, residuals and bookkeeping left by a push run.

    ``excluded`` lists the high-degree neighbors of the target that
    :func:`backwards_push_avg` skipped (``None`` when the scan stopped early
    on a degree-sorted prefix and never enumerated them).
    """

    target: int
    p: dict = field(default_factory=dict)
    r: dict = field(default_factory=dict)
    r_max: float | None = None
    excluded: list | None = None
    pushes: Counter = field(default_factory=Counter)

    @property
    def frontier(self):
        if self.r_max is None:
            return []
        return [v for v, x in self.r.items() if x > self.r_max]

    def reserves(self):
        return SparseEstimate(self.p)

    def max_residual(self):
        return max(self.r.values(), default=0.0)


class _Degrees(dict):
    """Per-run memo of DEG answers (each vertex is queried once)."""

    __slots__ = ("session",)

    def __init__(self, session):
        super().__init__()
        self.session = session

    def __missing__(self, v):
        d = self[v] = self.session.deg(v)
        return d


def _check_vertex(session, v):
    if not 0 <= v < session.n:
        raise InvalidVertexError(f"vertex {v!r} outside [0, {session.n})")


def _drain(session, state, queue, degs, alpha, on_push):
    """FIFO push loop until every residual is at most ``state.r_max``."""
    p, r, r_max = state.p, state.r, state.r_max
    queued = set(queue)
    neigh = session.neigh
    while queue:
        v = queue.popleft()
        queued.discard(v)
        rv = r.get(v, 0.0)
        if rv <= r_max:
            continue
        del r[v]
        state.pushes[v] += 1
        d = degs[v]
        if d == 0:
            p[v] = p.get(v, 0.0) + rv
        else:
            p[v] = p.get(v, 0.0) + alpha * rv
            share = (1.0 - alpha) * rv
            for i in range(1, d + 1):
                u = neigh(v, i)
                ru = r.get(u, 0.0) + share / degs[u]
                r[u] = ru
                if ru > r_max and u not in queued:
                    queue.append(u)
                    queued.add(u)
        if on_push is not None:
            on_push(state)


def backwards_push(session, t, r_max, cfg, on_push=None):
    """Deterministic backward push from ``t`` with threshold ``r_max``.

    On return every residual is at most ``r_max`` and
    ``0 <= pi(u, t) - p(u) <= r_max``.  ``on_push(state)`` is called after
    each push.
    """
    r_max = check_positive("r_max", r_max)
    _check_vertex(session, t)
    state = PushState(t, {}, {t: 1.0}, r_max)
    queue = deque([t]) if 1.0 > r_max else deque()
    _drain(session, state, queue, _Degrees(session), cfg.alpha, on_push)
    return state


def power_method_target(session, t, rounds_L, cfg):
    """``rounds_L`` synchronous rounds of backward push from ``t``.

    Afterwards ``max_u r(u) <= (1 - alpha)^rounds_L``.
    """
    rounds_L = check_count("rounds_L", rounds_L)
    alpha = cfg.alpha
    degs = _Degrees(session)
    _check_vertex(session, t)
    p = {}
    r = {t: 1.0}
    neigh = session.neigh
    for _ in range(rounds_L):
        nxt = {}
        for v, rv in r.items():
            d = degs[v]
            if d == 0:
                p[v] = p.get(v, 0.0) + rv
                continue
            p[v] = p.get(v, 0.0) + alpha * rv
            share = (1.0 - alpha) * rv
            for i in range(1, d + 1):
                u = neigh(v, i)
                nxt[u] = nxt.get(u, 0.0) + share / degs[u]
        r = {u: x for u, x in nxt.items() if x >= RESIDUAL_FLOOR}
    return PushState(t, p, r)


def power_method_source(session, s, rounds_L, cfg):
    """Forward counterpart: ``p`` converges to ``pi(s, .)``.

    A push at ``v`` hands ``(1 - alpha) r(v) / d(v)`` to each neighbor, and
    after ``L`` rounds the leftover residual mass is at most
    ``(1 - alpha)^L``.
    """
    rounds_L = check_count("rounds_L", rounds_L)
    alpha = cfg.alpha
    _check_vertex(session, s)
    p = {}
    r = {s: 1.0}
    neigh = session.neigh
    for _ in range(rounds_L):
        nxt = {}
        for v, rv in r.items():
            d = session.deg(v)
            if d == 0:
                p[v] = p.get(v, 0.0) + rv
                continue
            p[v] = p.get(v, 0.0) + alpha * rv
            share = (1.0 - alpha) * rv / d
            for i in range(1, d + 1):
                u = neigh(v, i)
                nxt[u] = nxt.get(u, 0.0) + share
        r = {u: x for u, x in nxt.items() if x >= RESIDUAL_FLOOR}
    return PushState(s, p, r)


def rand_push(session, init, theta, rounds_L, cfg):
    """Randomized synchronous push seeded from ``init``.

    Each vertex ``v`` holding residual draws ``tau ~ U[0, theta)`` and scans
    its degree-sorted neighbors.  Neighbor ``u`` would receive
    ``D = (1 - alpha) r(v) / d(u)``; it gets ``max(D, theta)`` when
    ``D >= tau`` and the scan stops at the first neighbor with ``D < tau``.
    Each increment is unbiased, so the returned reserves (including the
    ones in ``init``) have the same mean as the deterministic rounds, with
    variance at most ``L * theta * p(u)``.
    """
    session.require(sorted=True, who="rand_push")
    theta = check_positive("theta", theta)
    rounds_L = check_count("rounds_L", rounds_L)
    alpha = cfg.alpha
    rng = session.rng
    degs = _Degrees(session)
    nsorted = session.neigh_sorted
    p = dict(init.p)
    r = {v: x for v, x in init.r.items() if x > 0.0}
    for _ in range(rounds_L):
        nxt = {}
        for v, rv in r.items():
            d = degs[v]
            if d == 0:
                p[v] = p.get(v, 0.0) + rv
                continue
            p[v] = p.get(v, 0.0) + alpha * rv
            share = (1.0 - alpha) * rv
            tau = rng.random() * theta
            for j in range(1, d + 1):
                u = nsorted(v, j)
                delta = share / degs[u]
                if delta >= theta:
                    nxt[u] = nxt.get(u, 0.0) + delta
                elif delta >= tau:
                    nxt[u] = nxt.get(u, 0.0) + theta
                else:
                    break
        r = {u: x for u, x in nxt.items() if x >= RESIDUAL_FLOOR}
    return SparseEstimate(p)


@dataclass(frozen=True)
class HybridParams:
    r_max: float
    theta: float
    rounds_L: int


def hybrid_params(cfg, n, d_t):
    a, c, delta = cfg.alpha, cfg.c, cfg.delta
    r_max = min(0.5, math.sqrt(d_t * delta / n)) if d_t > 0 else 0.5
    L = max(1, ceil_log(1.0 - a, c * delta / 2.0))
    theta = c * c * delta * cfg.p_f / (4.0 * L)
    return HybridParams(r_max, theta, L)


def hybrid_single_target(session, t, cfg, params=None):
    """Backward push down to ``r_max``, then randomized rounds on the rest."""
    session.require(sorted=True, who="hybrid_single_target")
    d_t = session.deg(t)
    if params is None:
        params = hybrid_params(cfg, session.n, d_t)
    state = backwards_push(session, t, params.r_max, cfg)
    return rand_push(session, state, params.theta, params.rounds_L, cfg)


def backwards_push_avg(session, t, r_max, cfg, on_push=None, use_sorted=True):
    """Backward push that never pays for the high-degree neighbors of ``t``.

    The first step from ``t`` is done by hand: ``p(t) = alpha`` and each
    neighbor ``y`` with ``d(y) <= 1/r_max`` receives ``(1 - alpha)/d(y)``.
    Neighbors above that degree (the set X) are left out, which is what
    makes ``0 <= pi(u, t) - p(u) <= 2 r_max`` the guarantee here.  With
    NEIGH-SORTED the scan reads only the low-degree prefix.
    """
    r_max = check_positive("r_max", r_max)
    alpha = cfg.alpha
    _check_vertex(session, t)
    degs = _Degrees(session)
    d_t = degs[t]
    state = PushState(t, {}, {}, r_max)
    if d_t == 0:
        state.p[t] = 1.0
        state.excluded = []
        return state
    state.p[t] = alpha
    r = state.r
    limit = 1.0 / r_max
    if use_sorted and session.model.sorted_enabled:
        for j in range(1, d_t + 1):
            y = session.neigh_sorted(t, j)
            dy = degs[y]
            if dy > limit:
                break
            r[y] = r.get(y, 0.0) + (1.0 - alpha) / dy
    else:
        state.excluded = []
        low = []
        for i in range(1, d_t + 1):
            y = session.neigh(t, i)
            dy = degs[y]
            if dy > limit:
                state.excluded.append(y)
            else:
                low.append((dy, y))
        # seed in degree-sorted order so both scans leave identical states
        for dy, y in sorted(low):
            r[y] = (1.0 - alpha) / dy
    queue = deque(v for v, x in r.items() if x > r_max)
    _drain(session, state, queue, degs, alpha, on_push)
    return state


def bp_avg_r_max(cfg):
    """Threshold that makes the push alone meet the contract: ``2 r_max <= c delta``."""
    return cfg.c * cfg.delta / 2.0


def randpush_params(cfg):
    """Default ``(theta, L)`` for running randomized push from scratch."""
    L = max(1, ceil_log(1.0 - cfg.alpha, cfg.c * cfg.delta / 2.0))
    return cfg.c * cfg.c * cfg.delta * cfg.p_f / (4.0 * L), L


def power_rounds(cfg):
    return ceil_log(1.0 - cfg.alpha, cfg.c * cfg.delta)


__all__ = [
    "PushState", "HybridParams", "backwards_push", "power_method_target", "power_method_source",
    "rand_push", "hybrid_params", "hybrid_single_target", "backwards_push_avg",
    "bp_avg_r_max", "randpush_params", "power_rounds", "RESIDUAL_FLOOR",
]
