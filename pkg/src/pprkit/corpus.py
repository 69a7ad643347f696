"""Small deterministic graphs used by the verification suites and tests."""

from __future__ import annotations

import numpy as np

from .graph import Graph


def path(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star(leaves):
    """Center 0 joined to leaves ``1..leaves``."""
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def clique(n):
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def biclique(a, b):
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def gnp(n, p, seed):
    """Erdos-Renyi graph; edge order is the row-major scan order."""
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    edges = list(zip(iu[keep].tolist(), ju[keep].tolist()))
    order = rng.permutation(len(edges))
    return Graph.from_edges(n, [edges[k] for k in order])


def random_regular(n, d, seed, max_tries=100):
    """Uniform-ish simple ``d``-regular graph from the pairing model with restarts."""
    if n * d % 2 or d >= n:
        raise ValueError("need n*d even and d < n")
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n), d)
    for _ in range(max_tries):
        pairs = rng.permutation(stubs).reshape(-1, 2)
        lo, hi = pairs.min(axis=1), pairs.max(axis=1)
        if np.any(lo == hi):
            continue
        keys = lo.astype(np.int64) * n + hi
        if np.unique(keys).size != keys.size:
            continue
        return Graph.from_edges(n, list(zip(lo.tolist(), hi.tolist())))
    raise RuntimeError("pairing model kept producing loops or multi-edges")


def disjoint_union(*graphs):
    edges, off = [], 0
    for g in graphs:
        edges.extend((u + off, v + off) for u, v in g.edges())
        off += g.n
    return Graph.from_edges(off, edges)


def with_hub_neighbor(hub_degree):
    """Vertex 0 joined to a leaf 1 and to a hub 2 of degree ``hub_degree``."""
    edges = [(0, 1), (0, 2)]
    edges += [(2, 3 + i) for i in range(hub_degree - 1)]
    return Graph.from_edges(3 + hub_degree - 1, edges)


def standard_corpus(count=50, max_n=50, seed=7):
    """Mix of paths, stars, cliques, bicliques and random graphs (``n <= max_n``)."""
    rng = np.random.default_rng(seed)
    out = [Graph(1, [[]]), clique(2), clique(3), path(5), star(6), cycle(7), biclique(3, 4),
           disjoint_union(clique(2), Graph(1, [[]])), with_hub_neighbor(10)]
    makers = [
        lambda k: path(int(rng.integers(2, max_n + 1))),
        lambda k: star(int(rng.integers(2, max_n))),
        lambda k: clique(int(rng.integers(2, min(max_n, 20) + 1))),
        lambda k: biclique(int(rng.integers(1, 10)), int(rng.integers(1, 10))),
        lambda k: gnp(int(rng.integers(5, max_n + 1)), float(rng.uniform(0.05, 0.5)), seed * 1000 + k),
        lambda k: gnp(int(rng.integers(5, max_n + 1)), float(rng.uniform(0.05, 0.5)), seed * 1000 + k),
    ]
    k = 0
    while len(out) < count:
        out.append(makers[k % len(makers)](k))
        k += 1
    return out[:count]
