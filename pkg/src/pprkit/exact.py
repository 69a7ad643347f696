"""Ground-truth PPR values.

Two independent routes are provided.  The solver route builds the
row-stochastic walk matrix and solves the first-step linear system (dense
LU for small graphs, fixed-point sweeps over a sparse matrix otherwise).
The DP route sums walk-length probabilities directly from the adjacency
lists.  Neither is query-counted.

Isolated vertices follow the walk semantics: a walk there cannot move, so
it stops in place and ``pi(u, u) = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ._validation import ceil_log, check_count, check_positive
from .errors import InvalidVertexError

DEFAULT_EPS = 1e-12
DENSE_LIMIT = 2500


@dataclass(frozen=True)
class PprVector:
    """Exact PPR values around one vertex.

    ``kind`` is ``"target"`` for ``pi(., vertex)`` and ``"source"`` for
    ``pi(vertex, .)``.
    """

    values: np.ndarray
    kind: str
    vertex: int

    def __getitem__(self, u):
        return float(self.values[u])

    def __len__(self):
        return len(self.values)


def _check_vertex(g, v):
    if not 0 <= v < g.n:
        raise InvalidVertexError(f"vertex {v!r} outside [0, {g.n})")


def walk_matrix(g):
    """Sparse row-stochastic P with a self-loop at every isolated vertex."""
    rows, cols, vals = [], [], []
    for v in range(g.n):
        row = g.neighbors(v)
        if row:
            rows.extend([v] * len(row))
            cols.extend(row)
            vals.extend([1.0 / len(row)] * len(row))
        else:
            rows.append(v)
            cols.append(v)
            vals.append(1.0)
    return sp.csr_matrix((vals, (rows, cols)), shape=(g.n, g.n))


def _solve(g, alpha, rhs_vertex, transpose, eps):
    n = g.n
    P = walk_matrix(g)
    if transpose:
        P = P.T.tocsr()
    b = np.zeros(n)
    b[rhs_vertex] = alpha
    if n <= DENSE_LIMIT:
        A = np.eye(n) - (1.0 - alpha) * P.toarray()
        x = np.linalg.solve(A, b)
    else:
        # x = sum_k (1-alpha)^k P^k b; remaining tail after L terms is
        # bounded by (1-alpha)^L in sup norm for the target direction and in
        # l1 norm for the source direction.
        rounds = ceil_log(1.0 - alpha, eps) + 1
        x = b.copy()
        term = b.copy()
        for _ in range(rounds):
            term = (1.0 - alpha) * (P @ term)
            x += term
    np.clip(x, 0.0, None, out=x)
    return x


def exact_single_target(g, cfg, t, eps=DEFAULT_EPS):
    """``pi(u, t)`` for every ``u``."""
    _check_vertex(g, t)
    check_positive("eps", eps)
    return PprVector(_solve(g, cfg.alpha, t, False, eps), "target", t)


def exact_single_source(g, cfg, s, eps=DEFAULT_EPS):
    """``pi(s, v)`` for every ``v`` (solves the transposed system)."""
    _check_vertex(g, s)
    check_positive("eps", eps)
    return PprVector(_solve(g, cfg.alpha, s, True, eps), "source", s)


def exact_pagerank(g, cfg, t, eps=DEFAULT_EPS):
    """PageRank centrality ``pi(t) = mean_u pi(u, t)``."""
    return float(exact_single_target(g, cfg, t, eps).values.mean())


def exact_ppr_matrix(g, cfg):
    """Dense matrix ``M[u, v] = pi(u, v)``; meant for small graphs only."""
    P = walk_matrix(g).toarray()
    return cfg.alpha * np.linalg.inv(np.eye(g.n) - (1.0 - cfg.alpha) * P)


def truncated_dp_oracle(g, cfg, t, max_len):
    """Walk-length DP: ``sum_{k<=max_len} alpha (1-alpha)^k P[X_k = t | X_0 = u]``.

    ``h_k(u) = P[X_k = t | X_0 = u]`` obeys ``h_{k+1}(u) = mean_{w in N(u)} h_k(w)``
    (``h_{k+1}(u) = h_k(u)`` at isolated ``u``).  The result undershoots
    ``pi(., t)`` by at most ``(1 - alpha)^(max_len + 1)``.
    """
    _check_vertex(g, t)
    max_len = check_count("max_len", max_len)
    alpha = cfg.alpha
    n = g.n
    deg = np.asarray(g.degrees, dtype=np.float64)
    flat = np.fromiter((u for v in range(n) for u in g.neighbors(v)), dtype=np.int64, count=2 * g.m)
    starts = np.concatenate(([0], np.cumsum(g.degrees)[:-1])).astype(np.int64) if n else np.zeros(0, np.int64)
    has = deg > 0
    h = np.zeros(n)
    h[t] = 1.0
    out = alpha * h
    weight = alpha
    for _ in range(max_len):
        nxt = h.copy()  # isolated rows keep their value
        if flat.size:
            sums = np.add.reduceat(h[flat], starts[has])
            nxt[has] = sums / deg[has]
        h = nxt
        weight *= 1.0 - alpha
        out = out + weight * h
    return PprVector(out, "target", t)


def dp_rounds(alpha, eps=DEFAULT_EPS):
    """Length cut-off that brings the DP within ``eps`` of the exact value."""
    return ceil_log(1.0 - alpha, eps)
