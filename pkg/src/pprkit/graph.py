"""Immutable graph storage and the instrumented query oracle.

Estimators never touch :class:`Graph` directly.  They receive an
:class:`AccessSession`, which answers DEG, NEIGH, NEIGH-SORTED, JUMP and ADJ
queries, refuses the ones its :class:`AccessModel` leaves out, and counts
every call.
"""

from __future__ import annotations

import heapq
import logging
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from .config import RandomStream
from .errors import (
    GraphFormatError,
    InvalidIndexError,
    InvalidVertexError,
    ModelViolationError,
    PreconditionError,
)

log = logging.getLogger(__name__)


class Graph:
    """Simple undirected graph with fixed neighbor orders.

    ``neighbors(v)`` follows insertion (file) order and ``sorted_neighbors(v)``
    is ordered by ``(degree, id)``.  Instances are immutable and can be shared
    between threads and sessions.
    """

    __slots__ = ("_n", "_m", "_neigh", "_deg", "__dict__")

    def __init__(self, n, neighbors):
        if n < 0:
            raise GraphFormatError(f"vertex count must be >= 0, got {n}")
        if len(neighbors) != n:
            raise GraphFormatError(f"expected {n} adjacency lists, got {len(neighbors)}")
        neigh = tuple(tuple(int(u) for u in row) for row in neighbors)
        sets = []
        for v, row in enumerate(neigh):
            s = set(row)
            if len(s) != len(row):
                raise GraphFormatError(f"duplicate neighbor in list of vertex {v}")
            if v in s:
                raise GraphFormatError(f"self-loop at vertex {v}")
            for u in row:
                if not 0 <= u < n:
                    raise GraphFormatError(f"neighbor {u} of vertex {v} out of range")
            sets.append(s)
        for v, row in enumerate(neigh):
            for u in row:
                if v not in sets[u]:
                    raise GraphFormatError(f"edge {v}-{u} is not symmetric")
        self._n = n
        self._neigh = neigh
        self._deg = tuple(len(row) for row in neigh)
        self._m = sum(self._deg) // 2

    @classmethod
    def from_edges(cls, n, edges):
        """Build from an edge sequence; list order follows edge order."""
        rows = [[] for _ in range(n)]
        seen = set()
        for k, (u, v) in enumerate(edges):
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"edge {k} ({u}, {v}) has an endpoint outside [0, {n})")
            if u == v:
                raise GraphFormatError(f"edge {k} is a self-loop at {u}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise GraphFormatError(f"edge {k} ({u}, {v}) is a duplicate")
            seen.add(key)
            rows[u].append(v)
            rows[v].append(u)
        return cls(n, rows)

    @property
    def n(self):
        return self._n

    @property
    def m(self):
        return self._m

    @property
    def average_degree(self):
        return self._m / self._n if self._n else 0.0

    def degree(self, v):
        return self._deg[v]

    @property
    def degrees(self):
        return self._deg

    def neighbors(self, v):
        return self._neigh[v]

    @cached_property
    def _sorted(self):
        deg = self._deg
        return tuple(tuple(sorted(row, key=lambda u: (deg[u], u))) for row in self._neigh)

    def sorted_neighbors(self, v):
        return self._sorted[v]

    @cached_property
    def _adjsets(self):
        return tuple(frozenset(row) for row in self._neigh)

    def has_edge(self, u, v):
        return v in self._adjsets[u]

    def edges(self):
        """Each edge once as ``(u, v)`` with ``u < v``, ordered by ``u``."""
        for u, row in enumerate(self._neigh):
            for v in row:
                if u < v:
                    yield (u, v)

    @cached_property
    def components(self):
        """Component label per vertex (labels are 0, 1, ... by first vertex)."""
        label = [-1] * self._n
        nxt = 0
        for root in range(self._n):
            if label[root] >= 0:
                continue
            label[root] = nxt
            queue = deque([root])
            while queue:
                v = queue.popleft()
                for u in self._neigh[v]:
                    if label[u] < 0:
                        label[u] = nxt
                        queue.append(u)
            nxt += 1
        return tuple(label)

    def __eq__(self, other):
        return isinstance(other, Graph) and self._n == other._n and self._neigh == other._neigh

    def __hash__(self):
        return hash((self._n, self._neigh))

    def __repr__(self):
        return f"Graph(n={self._n}, m={self._m})"

    def __getstate__(self):
        return {"n": self._n, "neigh": self._neigh}

    def __setstate__(self, state):
        self.__init__(state["n"], state["neigh"])


@dataclass(frozen=True)
class AccessModel:
    """Which optional queries a session answers (DEG and NEIGH always are)."""

    jump_enabled: bool = False
    sorted_enabled: bool = False
    adj_enabled: bool = False

    _NAMES = ("jump", "sorted", "adj")

    @classmethod
    def parse(cls, text):
        """Parse ``"jump,sorted,adj"`` style flag lists ("" or "base" = none)."""
        flags = {t.strip().lower() for t in (text or "").split(",") if t.strip()}
        flags.discard("base")
        unknown = flags - set(cls._NAMES)
        if unknown:
            raise PreconditionError(f"unknown model flag(s): {', '.join(sorted(unknown))}")
        return cls("jump" in flags, "sorted" in flags, "adj" in flags)

    @classmethod
    def full(cls):
        return cls(True, True, True)

    @property
    def flags(self):
        on = [name for name, f in zip(self._NAMES, (self.jump_enabled, self.sorted_enabled, self.adj_enabled)) if f]
        return ",".join(on) if on else "base"

    def covers(self, other):
        """True when every query enabled in ``other`` is enabled here."""
        return (
            (self.jump_enabled or not other.jump_enabled)
            and (self.sorted_enabled or not other.sorted_enabled)
            and (self.adj_enabled or not other.adj_enabled)
        )

    def __str__(self):
        return self.flags


@dataclass(frozen=True)
class QueryCounts:
    deg: int = 0
    neigh: int = 0
    neigh_sorted: int = 0
    jump: int = 0
    adj: int = 0

    @property
    def total(self):
        return self.deg + self.neigh + self.neigh_sorted + self.jump + self.adj


class AccessSession:
    """Counted, model-restricted view of a graph for a single estimator run.

    Vertex count ``n`` and edge count ``m`` are public metadata and are not
    charged.  All five oracles cost one unit per call.
    """

    __slots__ = ("graph", "model", "rng", "_neigh", "_sorted", "_deg", "_n",
                 "c_deg", "c_neigh", "c_sorted", "c_jump", "c_adj")

    def __init__(self, graph, model=None, rng=None):
        self.graph = graph
        self.model = model if model is not None else AccessModel()
        self.rng = rng if rng is not None else RandomStream(0)
        self._n = graph.n
        self._neigh = graph._neigh
        self._deg = graph._deg
        self._sorted = graph._sorted if self.model.sorted_enabled else None
        if self.model.adj_enabled:
            graph._adjsets  # build the cache up front, outside the timed loop
        self.c_deg = self.c_neigh = self.c_sorted = self.c_jump = self.c_adj = 0

    @property
    def n(self):
        return self._n

    @property
    def m(self):
        return self.graph.m

    @property
    def counters(self):
        return QueryCounts(self.c_deg, self.c_neigh, self.c_sorted, self.c_jump, self.c_adj)

    def require(self, *, jump=False, sorted=False, adj=False, who="this estimator"):
        """Raise :class:`ModelViolationError` unless the named queries are on."""
        missing = [name for name, need, have in (
            ("JUMP", jump, self.model.jump_enabled),
            ("NEIGH-SORTED", sorted, self.model.sorted_enabled),
            ("ADJ", adj, self.model.adj_enabled),
        ) if need and not have]
        if missing:
            raise ModelViolationError(f"{who} needs {', '.join(missing)}; session model is '{self.model.flags}'")

    def _check_vertex(self, v):
        if not 0 <= v < self._n:
            raise InvalidVertexError(f"vertex {v!r} outside [0, {self._n})")

    def deg(self, v):
        if not 0 <= v < self._n:
            self._check_vertex(v)
        self.c_deg += 1
        return self._deg[v]

    def neigh(self, v, i):
        if not 0 <= v < self._n:
            self._check_vertex(v)
        row = self._neigh[v]
        if not 1 <= i <= len(row):
            raise InvalidIndexError(f"index {i} outside [1, {len(row)}] for vertex {v}")
        self.c_neigh += 1
        return row[i - 1]

    def neigh_sorted(self, v, i):
        if self._sorted is None:
            raise ModelViolationError("NEIGH-SORTED is disabled in this session")
        if not 0 <= v < self._n:
            self._check_vertex(v)
        row = self._sorted[v]
        if not 1 <= i <= len(row):
            raise InvalidIndexError(f"index {i} outside [1, {len(row)}] for vertex {v}")
        self.c_sorted += 1
        return row[i - 1]

    def jump(self):
        if not self.model.jump_enabled:
            raise ModelViolationError("JUMP is disabled in this session")
        self.c_jump += 1
        return self.rng.randbelow(self._n)

    def adj(self, u, v):
        if not self.model.adj_enabled:
            raise ModelViolationError("ADJ is disabled in this session")
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v:
            raise PreconditionError("ADJ(u, u) is undefined on a simple graph")
        self.c_adj += 1
        return v in self.graph._adjsets[u]


# --- file format -----------------------------------------------------------

def load_graph(text):
    """Parse the text edge-list format into a :class:`Graph`.

    Line 1 holds ``n m``; exactly ``m`` edge lines ``u v`` follow.  Lines
    starting with ``#`` and blank lines are skipped.
    """
    header = None
    rows = None
    seen = set()
    count = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"expected two integers, got {line!r}", lineno)
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"expected two integers, got {line!r}", lineno) from None
        if header is None:
            if a < 0 or b < 0:
                raise GraphFormatError("n and m must be non-negative", lineno)
            header = (a, b)
            rows = [[] for _ in range(a)]
            continue
        n, m = header
        count += 1
        if count > m:
            raise GraphFormatError(f"more than the declared {m} edges", lineno)
        if not (0 <= a < n and 0 <= b < n):
            raise GraphFormatError(f"vertex id out of range [0, {n}) in edge ({a}, {b})", lineno)
        if a == b:
            raise GraphFormatError(f"self-loop at vertex {a}", lineno)
        key = (a, b) if a < b else (b, a)
        if key in seen:
            raise GraphFormatError(f"duplicate edge ({a}, {b})", lineno)
        seen.add(key)
        rows[a].append(b)
        rows[b].append(a)
    if header is None:
        raise GraphFormatError("missing 'n m' header", 1)
    if count != header[1]:
        raise GraphFormatError(f"declared {header[1]} edges but found {count}", lineno if text else 1)
    return Graph(header[0], rows)


def read_graph(path):
    return load_graph(Path(path).read_text(encoding="utf-8"))


def _edge_order(graph):
    """Edge sequence whose replay reproduces every neighbor list's order.

    Each list imposes a chain of precedences on its edges; a topological
    order of the union exists for graphs built from an edge file and for
    their swapped variants in practice.  When the constraints are cyclic we
    fall back to a stable approximation and log a warning.
    """
    n = graph.n
    index = {}
    edges = []
    for u in range(n):
        for v in graph.neighbors(u):
            if u < v:
                index[(u, v)] = len(edges)
                edges.append((u, v))
    indeg = [0] * len(edges)
    succ = [[] for _ in edges]
    for v in range(n):
        row = graph.neighbors(v)
        prev = None
        for u in row:
            e = index[(v, u) if v < u else (u, v)]
            if prev is not None:
                succ[prev].append(e)
                indeg[e] += 1
            prev = e
    # priority = position of the edge in its earlier endpoint's list keeps
    # output close to the natural order
    pos = {}
    for v in range(n):
        for i, u in enumerate(graph.neighbors(v)):
            key = (v, u) if v < u else (u, v)
            pos[key] = min(pos.get(key, i), i)
    heap = [(pos[edges[e]], e) for e in range(len(edges)) if indeg[e] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, e = heapq.heappop(heap)
        order.append(edges[e])
        for f in succ[e]:
            indeg[f] -= 1
            if indeg[f] == 0:
                heapq.heappush(heap, (pos[edges[f]], f))
    if len(order) != len(edges):
        log.warning("neighbor orders are not realizable by a single edge sequence; file order is approximate")
        done = set(order)
        order.extend(sorted((e for e in edges if e not in done), key=lambda e: pos[e]))
    return order


def format_graph(graph, comment=None):
    """Serialize ``graph`` so that :func:`load_graph` rebuilds its lists."""
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(f"{graph.n} {graph.m}")
    lines.extend(f"{u} {v}" for u, v in _edge_order(graph))
    return "\n".join(lines) + "\n"


def write_graph(graph, path, comment=None):
    Path(path).write_text(format_graph(graph, comment), encoding="utf-8")
