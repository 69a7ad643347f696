"""Hard instances built from complete bipartite blocks, and edge swaps.

A family is a base graph ``G`` plus a set ``Q`` of swappable quadruples
such that ``G`` and every swapped graph ``G_q`` look alike to a query
algorithm, yet the PPR quantity of interest differs by more than the
allowed error.  ``Q`` is stored as a union of Cartesian products of vertex
ranges and is never materialized.

Parameter choices follow a case table on ``delta`` per family.  Those
tables meet the product constraint (for example ``x^2 y delta <= 1``) only
up to a small constant; by default that constant is accepted and recorded
as ``delta_slack``, while ``strict=True`` demands the literal constraint.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import product as iproduct

from ._validation import safe_floor
from .config import EstimatorConfig, RandomStream
from .errors import ConstructionError, GenerationError, PreconditionError, SwapViolationError
from .exact import exact_pagerank, exact_single_target
from .graph import AccessModel, Graph

BRUTE_FORCE_LIMIT = 100_000
ORACLE_ZERO = 1e-12


# --- quadruples and swaps ----------------------------------------------------

@dataclass(frozen=True)
class SwapQuadruple:
    q1: int
    q2: int
    q3: int
    q4: int

    def __iter__(self):
        return iter((self.q1, self.q2, self.q3, self.q4))

    @property
    def removed(self):
        """The two edges a swap deletes, ``{q1,q2}`` and ``{q3,q4}``."""
        return ((self.q1, self.q2), (self.q3, self.q4))

    @property
    def added(self):
        """The two edges a swap inserts, ``{q1,q3}`` and ``{q2,q4}``."""
        return ((self.q1, self.q3), (self.q2, self.q4))


def swap_violation(g, q):
    """Reason ``q`` is not swappable in ``g``, or ``None``."""
    for v in q:
        if not 0 <= v < g.n:
            return f"vertex {v} outside [0, {g.n})"
    for a, b in q.removed + q.added:
        if a == b:
            return f"pair ({a}, {b}) is degenerate"
    if not g.has_edge(q.q1, q.q2):
        return f"{{q1,q2}} = {{{q.q1},{q.q2}}} is not an edge"
    if not g.has_edge(q.q3, q.q4):
        return f"{{q3,q4}} = {{{q.q3},{q.q4}}} is not an edge"
    if g.has_edge(q.q1, q.q3):
        return f"{{q1,q3}} = {{{q.q1},{q.q3}}} is already an edge"
    if g.has_edge(q.q2, q.q4):
        return f"{{q2,q4}} = {{{q.q2},{q.q4}}} is already an edge"
    if {q.q1, q.q2} == {q.q3, q.q4}:
        return "the two removed edges coincide"
    return None


def is_swappable(g, q):
    return swap_violation(g, q) is None


def _replace(rows, v, old, new):
    row = rows[v]
    row[row.index(old)] = new


def apply_swap(g, q):
    """``G_q``: the removed edges' slots are taken over by the added edges.

    Every affected list keeps its length and all other entries keep their
    index, so degrees do not change.
    """
    q = q if isinstance(q, SwapQuadruple) else SwapQuadruple(*q)
    reason = swap_violation(g, q)
    if reason:
        raise SwapViolationError(reason)
    rows = [list(g.neighbors(v)) for v in range(g.n)]
    _replace(rows, q.q1, q.q2, q.q3)
    _replace(rows, q.q2, q.q1, q.q4)
    _replace(rows, q.q3, q.q4, q.q1)
    _replace(rows, q.q4, q.q3, q.q2)
    return Graph(g.n, rows)


def subdivide_swap(g, q, reserved):
    """Like :func:`apply_swap` with each added edge routed through a spare vertex.

    ``reserved = (w1, w2)`` must be isolated in ``g``; the result contains
    the paths ``q1 - w1 - q3`` and ``q2 - w2 - q4``.
    """
    q = q if isinstance(q, SwapQuadruple) else SwapQuadruple(*q)
    reason = swap_violation(g, q)
    if reason:
        raise SwapViolationError(reason)
    if reserved is None or len(reserved) != 2 or reserved[0] == reserved[1]:
        raise ConstructionError("subdivision needs two distinct reserved vertices")
    w1, w2 = reserved
    for w in reserved:
        if not 0 <= w < g.n:
            raise ConstructionError(f"reserved vertex {w} outside [0, {g.n})")
        if g.degree(w) != 0:
            raise ConstructionError(f"reserved vertex {w} is not isolated")
        if w in tuple(q):
            raise ConstructionError(f"reserved vertex {w} is part of the quadruple")
    rows = [list(g.neighbors(v)) for v in range(g.n)]
    _replace(rows, q.q1, q.q2, w1)
    _replace(rows, q.q3, q.q4, w1)
    _replace(rows, q.q2, q.q1, w2)
    _replace(rows, q.q4, q.q3, w2)
    rows[w1] = [q.q1, q.q3]
    rows[w2] = [q.q2, q.q4]
    return Graph(g.n, rows)


@dataclass(frozen=True)
class QuadrupleSpace:
    """Union of disjoint products ``S1 x S2 x S3 x S4`` of vertex ranges."""

    products: tuple

    def __post_init__(self):
        object.__setattr__(self, "products", tuple(tuple(_as_seq(s) for s in p) for p in self.products))
        for p in self.products:
            if len(p) != 4:
                raise PreconditionError("each product needs four factors")

    @property
    def size(self):
        return sum(math.prod(len(s) for s in p) for p in self.products)

    def __len__(self):
        return self.size

    def __iter__(self):
        for p in self.products:
            for t in iproduct(*p):
                yield SwapQuadruple(*t)

    def __contains__(self, q):
        q = tuple(q)
        return any(all(v in s for v, s in zip(q, p)) for p in self.products)

    def sample(self, rng):
        sizes = [math.prod(len(s) for s in p) for p in self.products]
        k = rng.randbelow(sum(sizes))
        for p, sz in zip(self.products, sizes):
            if k < sz:
                break
            k -= sz
        return SwapQuadruple(*(s[rng.randbelow(len(s))] for s in p))


def _as_seq(s):
    if isinstance(s, range):
        return s
    if isinstance(s, int):
        return range(s, s + 1)
    return tuple(s)


# --- families ------------------------------------------------------------------

@dataclass(frozen=True)
class SwapFamily:
    """A generated hard instance.

    ``s_slot`` / ``t_slot`` name the quadruple coordinate (0..3) that plays
    source / target when these vary with ``q``; otherwise ``s`` / ``t`` are
    fixed.  ``hidden`` lists vertices excluded from the overlap count in
    addition to the reserved ones.
    """

    name: str
    base: Graph
    quadruple_space: QuadrupleSpace
    params: dict
    n: int
    m: int
    delta: float
    case: int
    kind: str  # "pair" or "node"
    model: AccessModel
    c_bound: float
    K_closed: int
    s: int | None = None
    t: int | None = None
    s_slot: int | None = None
    t_slot: int | None = None
    swap_mode: str = "swap"
    reserved: tuple = ()
    hidden: frozenset = frozenset()
    pi_lower: float | None = None
    delta_slack: float = 1.0
    filler_spec: tuple = (0, 0)
    blocks: dict = field(default_factory=dict)

    @property
    def problem(self):
        """``"sp"``, ``"ss"``, ``"st"`` or ``"sn"``, read off the family name."""
        return self.name[:2]

    @property
    def witnesses(self):
        """Vertices handed to the algorithm; without JUMP it sees only their components."""
        if self.problem == "sp":
            return (self.s, self.t)
        if self.problem == "ss":
            return (self.s,)
        return (self.t,)

    def source_for(self, q):
        return tuple(q)[self.s_slot] if self.s_slot is not None else self.s

    def target_for(self, q):
        return tuple(q)[self.t_slot] if self.t_slot is not None else self.t

    def swapped(self, q):
        if self.swap_mode == "subdivide":
            return subdivide_swap(self.base, q, self.reserved)
        return apply_swap(self.base, q)

    def changed_pairs(self, q):
        """Vertex pairs whose adjacency differs between ``G`` and ``G_q``."""
        q = q if isinstance(q, SwapQuadruple) else SwapQuadruple(*q)
        if self.swap_mode == "subdivide":
            w1, w2 = self.reserved
            return q.removed + ((q.q1, w1), (w1, q.q3), (q.q2, w2), (w2, q.q4))
        return q.removed + q.added


class _Builder:
    def __init__(self):
        self.n = 0
        self.edges = []

    def block(self, size):
        r = range(self.n, self.n + size)
        self.n += size
        return r

    def biclique(self, X, Y):
        self.edges.extend((x, y) for x in X for y in Y)

    def filler(self, n, m):
        n_f, k = filler_shape(n, m)
        base = self.block(n_f).start
        for i in range(n_f):
            for j in range(1, k + 1):
                self.edges.append((base + i, base + (i + j) % n_f))
        return (n_f, n_f * k)

    def graph(self):
        return Graph.from_edges(self.n, self.edges)


def filler_shape(n, m):
    """``(n_f, k)`` for the circulant filler: ``i ~ i+j`` for ``j = 1..k``."""
    n_f = max(n, 3)
    k = -(-m // n_f)
    while k > (n_f - 1) // 2:
        n_f += 1
        k = -(-m // n_f)
    return n_f, k


class _Constraints:
    def __init__(self, name, strict):
        self.name = name
        self.strict = strict

    def need(self, ok, text):
        if not ok:
            raise GenerationError(f"{self.name}: constraint {text} violated")

    def product(self, value, slack, text):
        """Product constraint ``value <= 1`` relaxed to ``<= slack`` unless strict."""
        bound = 1.0 if self.strict else slack
        self.need(value <= bound * (1 + 1e-9), f"{text} <= {bound:g} (value {value:.4g})")


def _fl(x):
    return safe_floor(x)


def _sp_worst(n, m, delta, a, chk):
    d = m / n
    if delta <= 1.0 / (m * d):
        case, x, y = 1, _fl(2 * d), 2 * n
    elif delta <= 1.0 / n:
        case, x, y = 2, _fl(2 / math.sqrt(n * delta)), 2 * n
    else:
        case, x, y = 3, 2, _fl(2 / delta)
    chk.need(min(x, y) >= 2, "2 <= min(x, y)")
    chk.need(max(x, y) <= 2 * n, "max(x, y) <= 2n")
    chk.need(x * y <= 4 * m, "x*y <= 4m")
    chk.product(x * x * y * delta, 8, "x^2 y delta")
    b = _Builder()
    A, B, C, D = b.block(x), b.block(y), b.block(y), b.block(x)
    b.biclique(A, B)
    b.biclique(C, D)
    lower = (1 - a) ** 6 * a * (1 - 1 / x) * (1 - 1 / y) ** 2 / (x * x * y)
    return dict(builder=b, case=case, params=dict(x=x, y=y), blocks=dict(A=A, B=B, C=C, D=D),
                Q=[(A, B, C, D)], s=A[0], t=D[0], K=x * y, c_bound=(1 - a) ** 6 * a / 16,
                pi_lower=lower, slack=8, model=AccessModel.full())


def _sp_avg(n, m, delta, a, chk):
    d = m / n
    if delta <= 1.0 / (m * n):
        case, x, y = 1, 2 * n, _fl(2 * d)
    elif delta <= 1.0 / d ** 3:
        case, x, y = 2, _fl(2 / math.sqrt(d * delta)), _fl(2 * d)
    else:
        case = 3
        x = y = _fl(2 * delta ** (-1 / 3))
    chk.need(2 <= y <= x <= 2 * n, "2 <= y <= x <= 2n")
    chk.need(y <= 2 * d + 1e-9, "y <= 2d")
    chk.product(x * x * y * delta, 8, "x^2 y delta")
    copies = max(1, n // x)
    b = _Builder()
    parts = [(b.block(x), b.block(y), b.block(y), b.block(x)) for _ in range(copies)]
    for A, B, C, D in parts:
        b.biclique(A, B)
        b.biclique(C, D)
    A0, B0 = parts[0][0], parts[0][1]
    C1, D1 = parts[-1][2], parts[-1][3]
    lower = (1 - a) ** 6 * a * (1 - 1 / x) * (1 - 1 / y) ** 2 / (x * x * y)
    return dict(builder=b, case=case, params=dict(x=x, y=y, copies=copies),
                blocks=dict(A=A0, B=B0, C=C1, D=D1), Q=[(A0, B0, C1, D1)], s=A0[0], t=D1[0],
                K=x * y, c_bound=(1 - a) ** 4 * a / 16, pi_lower=lower, slack=8, model=AccessModel.full())


def _sp_avg_xor(subdivide):
    def build(n, m, delta, a, chk):
        d = m / n
        x = _fl(min(d, 1 / delta))
        chk.need(x >= 1, "x >= 1")
        chk.need(x <= d + 1e-9, "x <= d")
        chk.product(x * delta, 1, "x delta")
        copies = max(1, n // x)
        b = _Builder()
        parts = [(b.block(x), b.block(x), b.block(x), b.block(x)) for _ in range(copies)]
        for A, B, C, D in parts:
            b.biclique(A, B)
            b.biclique(C, D)
        reserved = tuple(b.block(2)) if subdivide else ()
        A0, B0 = parts[0][0], parts[0][1]
        C1, D1 = parts[-1][2], parts[-1][3]
        s, t = A0[0], D1[0]
        if subdivide:
            lower = (1 - a) ** 2 * a / (2 * x)
            model = AccessModel(jump_enabled=True, adj_enabled=True)
        else:
            lower = (1 - a) * a / x
            model = AccessModel(jump_enabled=True, sorted_enabled=True)
        return dict(builder=b, case=1, params=dict(x=x, y=x, copies=copies),
                    blocks=dict(A=A0, B=B0, C=C1, D=D1), Q=[(s, B0, t, C1)], s=s, t=t, K=x,
                    c_bound=(1 - a) ** 4 * a / 4, pi_lower=lower, slack=1, model=model,
                    reserved=reserved, swap_mode="subdivide" if subdivide else "swap")
    return build


def _ss_avg(n, m, delta, a, chk):
    d = m / n
    if delta <= 1.0 / m:
        case, x, y = 1, 2 * n, _fl(2 * d)
    elif delta <= 1.0 / n:
        case, x, y = 2, 2 * n, _fl(2 / (n * delta))
    else:
        case, x, y = 3, _fl(2 / delta), 2
    chk.need(2 <= y <= x <= 2 * n, "2 <= y <= x <= 2n")
    chk.need(y <= 2 * d + 1e-9, "y <= 2d")
    chk.product(x * y * delta, 4, "x y delta")
    copies = max(1, n // x)
    b = _Builder()
    parts = [(b.block(x), b.block(y), b.block(y), b.block(x)) for _ in range(copies)]
    for A, B, C, D in parts:
        b.biclique(A, B)
        b.biclique(C, D)
    A0, B0, C1, D1 = parts[0]
    lower = (1 - a) ** 3 * a * (1 - 1 / y) / (x * y)
    return dict(builder=b, case=case, params=dict(x=x, y=y, copies=copies),
                blocks=dict(A=A0, B=B0, C=C1, D=D1), Q=[(A0, B0, C1, D1)], s=A0[0], t_slot=2,
                K=x * y, c_bound=(1 - a) ** 3 * a / 4, pi_lower=lower, slack=4, model=AccessModel.full())


def _st_worst_adj(n, m, delta, a, chk):
    d = m / n
    if delta <= 1.0 / d:
        case, x = 1, _fl(d)
    else:
        case, x = 2, _fl(1 / delta)
    chk.need(x >= 1, "x >= 1")
    chk.need(x <= d + 1e-9, "x <= d")
    chk.product(x * delta, 1, "x delta")
    b = _Builder()
    A, B, C, D = b.block(1), b.block(1), b.block(n), b.block(x)
    b.biclique(A, B)
    b.biclique(C, D)
    lower = (1 - a) ** 3 * a * (1 - 1 / n) / x
    return dict(builder=b, case=case, params=dict(x=x, k=1, l=1, n_A=1, n_B=1, n_C=n, n_D=x),
                blocks=dict(A=A, B=B, C=C, D=D), Q=[(A, B, C, D)], s=B[0], t=D[0], K=1,
                c_bound=(1 - a) ** 3 * a / 4, pi_lower=lower, slack=1,
                model=AccessModel(adj_enabled=True))


def _st_worst(n, m, delta, a, chk):
    d = m / n
    if delta <= 1.0 / d ** 2:
        case, x = 1, _fl(d)
    else:
        case, x = 2, _fl(delta ** -0.5)
    chk.need(x >= 1, "x >= 1")
    chk.need(x <= d + 1e-9, "x <= d")
    chk.product(x * x * delta, 1, "x^2 delta")
    b = _Builder()
    A, B, C, D = b.block(x), b.block(n), b.block(n), b.block(x)
    b.biclique(A, B)
    b.biclique(C, D)
    lower = (1 - a) ** 3 * (1 - 1 / n) * a / (x * x)
    return dict(builder=b, case=case, params=dict(x=x, k=1, l=1, n_A=x, n_B=n, n_C=n, n_D=x),
                blocks=dict(A=A, B=B, C=C, D=D), Q=[(A, B, C, D)], t=D[0], s_slot=1, K=x * n,
                c_bound=(1 - a) ** 3 * a / 4, pi_lower=lower, slack=1, model=AccessModel.full())


def _st_avg_degree(n, m, delta, a, chk):
    d = m / n
    y = _fl(d)
    chk.need(y >= 1, "n_C = floor(d) >= 1")
    b = _Builder()
    A, B, C, D = b.block(1), b.block(1), b.block(y), b.block(n)
    b.biclique(A, B)
    b.biclique(C, D)
    t = D[0]
    return dict(builder=b, case=1, params=dict(k=1, l=1, n_A=1, n_B=1, n_C=y, n_D=n),
                blocks=dict(A=A, B=B, C=C, D=D), Q=[(A, B, C, t)], s=B[0], t=t, K=1,
                c_bound=(1 - a) * a / 2, pi_lower=(1 - a) * a, slack=1,
                model=AccessModel(jump_enabled=True, adj_enabled=True), hidden=frozenset(A) | frozenset(B))


def _st_avg_adj(n, m, delta, a, chk):
    d = m / n
    if delta <= 1.0 / n:
        case, x, y = 1, 2 * n, _fl(2 * d)
    elif delta <= 1.0 / d:
        case, x, y = 2, _fl(2 / delta), _fl(2 * d)
    else:
        case = 3
        x = y = _fl(2 / delta)
    chk.need(2 <= y <= x <= 2 * n, "2 <= y <= x <= 2n")
    chk.need(y <= 2 * d + 1e-9, "y <= 2d")
    chk.product(x * delta, 2, "x delta")
    copies = max(1, n // x)
    b = _Builder()
    A, B = b.block(1), b.block(1)
    b.biclique(A, B)
    parts = [(b.block(y), b.block(x)) for _ in range(copies)]
    for C, D in parts:
        b.biclique(C, D)
    C1, D1 = parts[-1]
    lower = (1 - a) ** 3 * a * (1 - 1 / y) / x
    return dict(builder=b, case=case, params=dict(x=x, y=y, k=1, l=copies, n_A=1, n_B=1, n_C=y, n_D=x),
                blocks=dict(A=A, B=B, C=C1, D=D1), Q=[(A, B, C1, D1)], s=B[0], t=D1[0], K=1,
                c_bound=(1 - a) ** 3 * a / 4, pi_lower=lower, slack=2, model=AccessModel(adj_enabled=True))


def _st_avg_jump_adj(n, m, delta, a, chk):
    d = m / n
    if delta <= 1.0 / m:
        case, x, y, z = 1, _fl(2 * d), _fl(2 * d), 2 * n
    elif delta <= min(d / n, n / d ** 3):
        case = 2
        x, y, z = _fl(math.sqrt(d / (n * delta))), _fl(2 * d), _fl(2 * math.sqrt(n / (d * delta)))
    elif d / n <= delta <= 1.0 / d:
        case, x, y, z = 3, 1, _fl(2 * d), _fl(2 / delta)
    elif n / d ** 3 <= delta <= n ** -0.5:
        case = 4
        x = _fl(n ** (-1 / 3) * delta ** (-2 / 3))
        y = z = _fl(2 * n ** (1 / 3) * delta ** (-1 / 3))
    elif max(1.0 / d, n ** -0.5) <= delta <= 1.0:
        case, x = 5, 1
        y = z = _fl(2 / delta)
    else:
        raise GenerationError(f"st-avg-jump-adj: no parameter case covers delta={delta:g} at n={n}, m={m}")
    chk.need(x >= 1, "x >= 1")
    chk.need(2 <= y <= z <= 2 * n, "2 <= y <= z <= 2n")
    chk.need(max(x, y) <= 2 * d + 1e-9, "max(x, y) <= 2d")
    chk.product(x * z * delta, 4, "x z delta")
    k = max(1, n // x)
    l = max(1, n // z)
    b = _Builder()
    AB = [(b.block(x), b.block(x)) for _ in range(k)]
    for A, B in AB:
        b.biclique(A, B)
    CD = [(b.block(y), b.block(z)) for _ in range(l)]
    for C, D in CD:
        b.biclique(C, D)
    C1, D1 = CD[-1]
    lower = (1 - a) ** 3 * a * (1 - 1 / y) / (x * z)
    K = max(y * z, k * x * x, x * z, x * y)
    return dict(builder=b, case=case, params=dict(x=x, y=y, z=z, k=k, l=l, n_A=x, n_B=x, n_C=y, n_D=z),
                blocks=dict(A=AB[0][0], B=AB[0][1], C=C1, D=D1), Q=[(A, B, C1, D1) for A, B in AB],
                t=D1[0], s_slot=1, K=K, c_bound=(1 - a) ** 3 * a / 4, pi_lower=lower, slack=4,
                model=AccessModel(jump_enabled=True, adj_enabled=True))


def _st_avg(n, m, delta, a, chk):
    d = m / n
    if delta <= 1.0 / m:
        case, x, y = 1, 2 * n, _fl(2 * d)
    elif delta <= 1.0 / n:
        case, x, y = 2, 2 * n, _fl(2 / (n * delta))
    else:
        case, x, y = 3, _fl(2 / delta), 2
    chk.need(2 <= y <= x <= 2 * n, "2 <= y <= x <= 2n")
    chk.need(y <= 2 * d + 1e-9, "y <= 2d")
    chk.product(x * y * delta, 4, "x y delta")
    l = max(1, n // x)
    b = _Builder()
    A, B = b.block(x), b.block(y)
    b.biclique(A, B)
    CD = [(b.block(y), b.block(x)) for _ in range(l)]
    for C, D in CD:
        b.biclique(C, D)
    C1, D1 = CD[-1]
    lower = (1 - a) ** 4 * a * (1 - 1 / x) * (1 - 1 / y) / (y * x)
    return dict(builder=b, case=case, params=dict(x=x, y=y, k=1, l=l, n_A=x, n_B=y, n_C=y, n_D=x),
                blocks=dict(A=A, B=B, C=C1, D=D1), Q=[(A, B, C1, D1)], t=D1[0], s_slot=0, K=x * y,
                c_bound=(1 - a) ** 4 * a / 8, pi_lower=lower, slack=4, model=AccessModel.full())


def _sn(variant):
    """PageRank families: ``K_{A,{b}} + K_{B,C} + copies of K_{D,F}``."""

    def build(n, m, delta, a, chk):
        d = m / n
        copies = 1
        if variant in ("worst", "worst-adj"):
            x = _fl(math.sqrt(m))
            chk.need(x * x <= m, "x^2 <= m")
        elif variant == "worst-all":
            x = _fl(math.sqrt(n))
        elif variant == "avg":
            x = _fl(d)
            copies = max(1, _fl(n / d))
        else:  # avg-all
            x = _fl(min(d, math.sqrt(n)))
            copies = max(1, _fl(n / d))
        chk.need(x >= 1, "x >= 1")
        b = _Builder()
        A, B, C = b.block(x), b.block(x), b.block(x)
        DF = [(b.block(x), b.block(2 * x)) for _ in range(copies)]
        bb = B[0]
        b.biclique(A, [bb])
        b.biclique(B, C)
        for D, F in DF:
            b.biclique(D, F)
        subdivide = variant == "worst-adj"
        reserved = tuple(b.block(2)) if subdivide else ()
        D0, F0 = DF[0]
        t = F0[0]
        if variant in ("worst-all", "avg-all"):
            model, hidden = AccessModel.full(), frozenset(A) | frozenset(B) | frozenset(C)
        elif subdivide:
            model, hidden = AccessModel(jump_enabled=True, adj_enabled=True), frozenset()
        else:
            model, hidden = AccessModel(jump_enabled=True, sorted_enabled=True), frozenset()
        return dict(builder=b, case=1, params=dict(x=x, copies=copies, F=2 * x),
                    blocks=dict(A=A, B=B, C=C, D=D0, F=F0), Q=[(bb, C, t, D0)], t=t, K=x,
                    c_bound=(1 - a) ** 2 * a / 84, pi_lower=None, slack=1, model=model, kind="node",
                    hidden=hidden, reserved=reserved, swap_mode="subdivide" if subdivide else "swap")

    return build


_FAMILIES = {
    "sp-worst": (_sp_worst, ("sp-wc-j-s-a",)),
    "sp-avg": (_sp_avg, ("sp-ac-j-s-a",)),
    "sp-avg-sorted": (_sp_avg_xor(False), ("sp-ac-j-s-xor-a",)),
    "sp-avg-adj": (_sp_avg_xor(True), ("sp-ac-j-a-xor-s",)),
    "ss-avg": (_ss_avg, ("ss-ac-j-s-a",)),
    "st-worst-adj": (_st_worst_adj, ("st-wc-a",)),
    "st-worst": (_st_worst, ("st-wc-j-s-a",)),
    "st-avg-degree": (_st_avg_degree, ("st-ac-degree",)),
    "st-avg-adj": (_st_avg_adj, ("st-ac-a",)),
    "st-avg-jump-adj": (_st_avg_jump_adj, ("st-ac-j-a",)),
    "st-avg": (_st_avg, ("st-ac-j-s-a",)),
    "sn-worst": (_sn("worst"), ("sn-wc-not-all",)),
    "sn-worst-adj": (_sn("worst-adj"), ("sn-wc-not-all-adj",)),
    "sn-worst-all": (_sn("worst-all"), ("sn-wc-all",)),
    "sn-avg": (_sn("avg"), ("sn-ac-not-all",)),
    "sn-avg-all": (_sn("avg-all"), ("st-ac-all", "sn-ac-all")),
}
_ALIASES = {alias: name for name, (_, aliases) in _FAMILIES.items() for alias in aliases}

FAMILY_NAMES = tuple(_FAMILIES)


def resolve_family(name):
    key = _ALIASES.get(name, name)
    if key not in _FAMILIES:
        raise PreconditionError(f"unknown family {name!r}; choose from {', '.join(FAMILY_NAMES)}")
    return key


def gen_family(name, n, m, delta, cfg=None, strict=False):
    """Build the named family for size ``(n, m)`` and threshold ``delta``.

    Requires ``4 <= n <= m <= n^2`` and ``0 < delta <= 1``.  A circulant
    filler with at least ``n`` vertices and ``m`` edges is added as a
    separate component.
    """
    key = resolve_family(name)
    cfg = cfg or EstimatorConfig()
    n, m = int(n), int(m)
    if n < 4:
        raise GenerationError(f"{key}: need n >= 4, got {n}")
    if not n <= m <= n * n:
        raise GenerationError(f"{key}: need n <= m <= n^2, got n={n}, m={m}")
    if not 0.0 < delta <= 1.0:
        raise GenerationError(f"{key}: need 0 < delta <= 1, got {delta}")
    entry = _FAMILIES[key][0](n, m, float(delta), cfg.alpha, _Constraints(key, strict))
    b = entry.pop("builder")
    filler = b.filler(n, m)
    g = b.graph()
    return SwapFamily(
        name=key, base=g, quadruple_space=QuadrupleSpace(tuple(entry["Q"])), params=entry["params"],
        n=n, m=m, delta=float(delta), case=entry["case"], kind=entry.get("kind", "pair"),
        model=entry["model"], c_bound=entry["c_bound"], K_closed=entry["K"], s=entry.get("s"),
        t=entry.get("t"), s_slot=entry.get("s_slot"), t_slot=entry.get("t_slot"),
        swap_mode=entry.get("swap_mode", "swap"), reserved=entry.get("reserved", ()),
        hidden=entry.get("hidden", frozenset()), pi_lower=entry.get("pi_lower"),
        delta_slack=entry["slack"], filler_spec=filler, blocks=entry["blocks"],
    )


# --- overlap parameter K ---------------------------------------------------------

def _visible(fam, model):
    g = fam.base
    skip = set(fam.hidden) | set(fam.reserved)
    if model.jump_enabled:
        return frozenset(v for v in range(g.n) if v not in skip)
    labels = {g.components[w] for w in fam.witnesses}
    return frozenset(v for v in range(g.n) if g.components[v] in labels and v not in skip)


def _pair_filter(fam, model):
    visible = _visible(fam, model)
    g = fam.base

    def ok(u, v):
        return u in visible and v in visible and (model.adj_enabled or g.has_edge(u, v))

    return ok


def _overlap_brute(fam, model):
    size = fam.quadruple_space.size
    if size > BRUTE_FORCE_LIMIT:
        raise PreconditionError(f"|Q| = {size} exceeds the brute-force limit {BRUTE_FORCE_LIMIT}")
    ok = _pair_filter(fam, model)
    counts = Counter()
    for q in fam.quadruple_space:
        for u, v in fam.changed_pairs(q):
            if ok(u, v):
                counts[frozenset((u, v))] += 1
    return max(counts.values(), default=0)


def _overlap_counting(fam, model):
    """Exact K without enumerating Q, by counting per factor pair."""
    ok = _pair_filter(fam, model)
    counts = Counter()
    for factors in fam.quadruple_space.products:
        sets = list(factors)
        if fam.swap_mode == "subdivide":
            w1, w2 = fam.reserved
            sets += [range(w1, w1 + 1), range(w2, w2 + 1)]
            slots = [(0, 1), (2, 3), (0, 4), (4, 2), (1, 5), (5, 3)]
        else:
            slots = [(0, 1), (2, 3), (0, 2), (1, 3)]
        sizes = [len(s) for s in sets]
        for i, j in slots:
            mult = math.prod(sz for k, sz in enumerate(sizes[:4]) if k not in (i, j))
            for u in sets[i]:
                for v in sets[j]:
                    if u != v and ok(u, v):
                        counts[frozenset((u, v))] += mult
    return max(counts.values(), default=0)


def compute_overlap_K(fam, model=None, method="auto"):
    """``K = max_e |{q in Q : e changes under q}|`` over the visible pairs.

    Visible pairs lie inside the components of the fixed vertices when JUMP
    is off (everywhere else when it is on) and must be edges of ``G`` when
    ADJ is off.  ``method`` is ``"closed"``, ``"counting"``, ``"brute"`` or
    ``"auto"``; auto uses the family's formula for its own access model,
    cross-checked by brute force when ``|Q| <= 10^5``, and counting
    otherwise.
    """
    model = fam.model if model is None else model
    if method == "brute":
        return _overlap_brute(fam, model)
    if method == "counting":
        return _overlap_counting(fam, model)
    if method == "closed":
        if model != fam.model:
            raise PreconditionError(f"{fam.name}: closed form only covers model '{fam.model.flags}'")
        return fam.K_closed
    if method != "auto":
        raise PreconditionError(f"unknown method {method!r}")
    if model == fam.model:
        if fam.quadruple_space.size <= BRUTE_FORCE_LIMIT:
            brute = _overlap_brute(fam, model)
            if brute != fam.K_closed:
                raise AssertionError(f"{fam.name}: closed-form K={fam.K_closed} but brute force gives {brute}")
        return fam.K_closed
    return _overlap_counting(fam, model)


# --- separation ---------------------------------------------------------------------

@dataclass(frozen=True)
class SeparationReport:
    family: str
    kind: str
    pi_base: float
    pi_swapped_min: float
    threshold: float
    c_eff: float
    samples: int
    passed: bool


def verify_separation(fam, cfg=None, samples=20):
    """Compare exact PPR on ``G`` and on sampled ``G_q``.

    Pair families pass when the base value is zero (up to solver noise) and
    every swapped value exceeds ``2 c_eff delta``.  PageRank families pass
    when every swapped value is at least ``(1 + 4 c_eff)`` times the base.
    ``c_eff`` is the smaller of ``cfg.c`` and the family's bound on ``c``.
    """
    cfg = cfg or EstimatorConfig()
    rng = RandomStream(cfg.seed, 0x5E9)
    qs = [fam.quadruple_space.sample(rng) for _ in range(samples)]
    c_eff = min(cfg.c, fam.c_bound)
    if fam.kind == "node":
        base = exact_pagerank(fam.base, cfg, fam.t)
        swapped = [exact_pagerank(fam.swapped(q), cfg, fam.t) for q in qs]
        threshold = (1.0 + 4.0 * c_eff) * base
        low = min(swapped, default=math.inf)
        passed = low >= threshold
    else:
        base_cache = {}
        base = 0.0
        swapped = []
        for q in qs:
            s, t = fam.source_for(q), fam.target_for(q)
            if t not in base_cache:
                base_cache[t] = exact_single_target(fam.base, cfg, t)
            base = max(base, base_cache[t][s])
            swapped.append(exact_single_target(fam.swapped(q), cfg, t)[s])
        threshold = 2.0 * c_eff * fam.delta
        low = min(swapped, default=math.inf)
        passed = base <= ORACLE_ZERO and low > threshold
    return SeparationReport(fam.name, fam.kind, base, low, threshold, c_eff, samples, bool(passed))
