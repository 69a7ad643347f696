"""scikit-learn style wrappers around the functional estimators.

``fit`` takes a :class:`~pprkit.graph.Graph` or an integer edge array of
shape ``(k, 2)``.  Queries are vertex ids (``predict`` on PageRank
algorithms, ``transform``) or ``(s, t)`` rows (``predict`` on the others).
Randomness is keyed on ``(random_state, query vertex)``, so a result does
not depend on which other vertices were asked in the same call.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .bench import ALGORITHMS, RunOptions, run_algorithm, run_vector
from .config import EstimatorConfig, RandomStream
from .errors import InvalidVertexError, PreconditionError
from .exact import exact_ppr_matrix
from .graph import AccessModel, AccessSession, Graph, QueryCounts


def _as_graph(X, n_vertices):
    if isinstance(X, Graph):
        if n_vertices is not None and n_vertices != X.n:
            raise PreconditionError(f"n_vertices={n_vertices} but the graph has {X.n} vertices")
        return X
    edges = check_array(X, dtype=np.int64, ensure_min_samples=0)
    if edges.shape[1] != 2:
        raise PreconditionError(f"edge array must have two columns, got {edges.shape[1]}")
    n = n_vertices
    if n is None:
        n = int(edges.max()) + 1 if edges.size else 0
    return Graph.from_edges(n, [tuple(e) for e in edges.tolist()])


def _vertices(X, n):
    v = check_array(np.asarray(X).reshape(-1, 1) if np.ndim(X) <= 1 else X,
                    dtype=np.int64, ensure_min_samples=0)
    if v.shape[1] != 1:
        raise PreconditionError(f"expected a 1-d array of vertex ids, got shape {np.shape(X)}")
    v = v[:, 0]
    _check_range(v, n)
    return v


def _pairs(X, n):
    q = check_array(X, dtype=np.int64, ensure_min_samples=0)
    if q.shape[1] != 2:
        raise PreconditionError(f"expected (s, t) rows, got {q.shape[1]} columns")
    _check_range(q, n)
    return q


def _check_range(a, n):
    if a.size and (a.min() < 0 or a.max() >= n):
        raise InvalidVertexError(f"vertex ids must lie in [0, {n})")


class PPREstimator(BaseEstimator):
    """Any registered estimator behind ``fit`` / ``predict`` / ``transform``.

    Parameters mirror :class:`~pprkit.config.EstimatorConfig` plus the
    algorithm id, the access model (``"jump,sorted,adj"`` style, or
    ``None`` for the algorithm's own requirement) and the optional
    push overrides.

    After ``fit``: ``graph_``, ``config_``, ``model_``; every estimating
    call adds its oracle queries to ``queries_``.
    """

    def __init__(self, algo="hybrid", alpha=0.2, c=0.1, p_f=0.1, delta=0.1, random_state=0,
                 model=None, n_vertices=None, r_max=None, theta=None, rounds=None,
                 variant="worst", lazy=False):
        self.algo = algo
        self.alpha = alpha
        self.c = c
        self.p_f = p_f
        self.delta = delta
        self.random_state = random_state
        self.model = model
        self.n_vertices = n_vertices
        self.r_max = r_max
        self.theta = theta
        self.rounds = rounds
        self.variant = variant
        self.lazy = lazy

    def fit(self, X, y=None):
        if self.algo not in ALGORITHMS:
            raise PreconditionError(f"unknown algorithm {self.algo!r}; choose from {', '.join(ALGORITHMS)}")
        seed = 0 if self.random_state is None else int(self.random_state)
        self.config_ = EstimatorConfig(self.alpha, self.c, self.p_f, self.delta, seed)
        entry = ALGORITHMS[self.algo]
        self.model_ = entry.model if self.model is None else (
            self.model if isinstance(self.model, AccessModel) else AccessModel.parse(self.model))
        self.graph_ = _as_graph(X, self.n_vertices)
        self.kind_ = entry.kind
        self.options_ = RunOptions(self.r_max, self.theta, self.rounds, self.variant, self.lazy)
        self.queries_ = QueryCounts()
        return self

    def _session(self, *key):
        return AccessSession(self.graph_, self.model_, RandomStream(self.config_.seed, *key))

    def _charge(self, session):
        q, c = self.queries_, session.counters
        self.queries_ = QueryCounts(q.deg + c.deg, q.neigh + c.neigh, q.neigh_sorted + c.neigh_sorted,
                                    q.jump + c.jump, q.adj + c.adj)

    def predict(self, X):
        """``pi(s, t)`` per ``(s, t)`` row, or ``pi(t)`` per vertex for PageRank algorithms."""
        check_is_fitted(self, "graph_")
        n = self.graph_.n
        if self.kind_ == "node":
            ts = _vertices(X, n)
            out = np.empty(ts.size)
            cache = {}
            for i, t in enumerate(ts.tolist()):
                if t not in cache:
                    session = self._session(t)
                    cache[t] = float(run_algorithm(self.algo, session, self.config_, t, t, self.options_))
                    self._charge(session)
                out[i] = cache[t]
            return out
        pairs = _pairs(X, n)
        out = np.empty(len(pairs))
        if self.kind_ == "pair":
            for i, (s, t) in enumerate(pairs.tolist()):
                session = self._session(s, t)
                out[i] = run_algorithm(self.algo, session, self.config_, s, t, self.options_)
                self._charge(session)
            return out
        col = 0 if self.kind_ == "source" else 1
        rows = {}
        for i, pair in enumerate(pairs.tolist()):
            v = pair[col]
            if v not in rows:
                session = self._session(v)
                rows[v] = run_vector(self.algo, session, self.config_, v, self.options_)
                self._charge(session)
            out[i] = rows[v][pair[1 - col]]
        return out

    def transform(self, X):
        """Dense rows: ``pi(v, .)`` for source algorithms, ``pi(., v)`` for target ones."""
        check_is_fitted(self, "graph_")
        if self.kind_ not in ("source", "target"):
            raise PreconditionError(f"{self.algo} returns one number per query; use predict")
        vs = _vertices(X, self.graph_.n)
        out = np.zeros((vs.size, self.graph_.n))
        for i, v in enumerate(vs.tolist()):
            session = self._session(v)
            out[i] = run_vector(self.algo, session, self.config_, v, self.options_).to_dense(self.graph_.n)
            self._charge(session)
        return out


class ExactPPR(BaseEstimator):
    """Exact PPR from a dense linear solve; the reference for the estimators."""

    def __init__(self, alpha=0.2, n_vertices=None):
        self.alpha = alpha
        self.n_vertices = n_vertices

    def fit(self, X, y=None):
        self.config_ = EstimatorConfig(alpha=self.alpha)
        self.graph_ = _as_graph(X, self.n_vertices)
        self.matrix_ = exact_ppr_matrix(self.graph_, self.config_)
        return self

    def predict(self, X):
        """``pi(s, t)`` for each ``(s, t)`` row."""
        check_is_fitted(self, "matrix_")
        q = _pairs(X, self.graph_.n)
        return self.matrix_[q[:, 0], q[:, 1]]

    def transform(self, X):
        """Row ``v`` of the result is ``pi(., v)``, the single-target vector of ``v``."""
        check_is_fitted(self, "matrix_")
        vs = _vertices(X, self.graph_.n)
        return self.matrix_[:, vs].T.copy()

    def pagerank(self, X):
        check_is_fitted(self, "matrix_")
        vs = _vertices(X, self.graph_.n)
        return self.matrix_[:, vs].mean(axis=0)
