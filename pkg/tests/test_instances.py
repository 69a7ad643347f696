import pytest
from hypothesis import given, settings, strategies as st

from pprkit.config import EstimatorConfig, RandomStream
from pprkit.errors import ConstructionError, GenerationError, PreconditionError, SwapViolationError
from pprkit.exact import exact_single_target
from pprkit.graph import Graph
from pprkit.instances import (
    FAMILY_NAMES,
    SwapQuadruple,
    apply_swap,
    compute_overlap_K,
    gen_family,
    resolve_family,
    subdivide_swap,
    verify_separation,
)


def two_bicliques(x, y):
    """K_{A,B} and K_{C,D} with |A| = |D| = x, |B| = |C| = y."""
    A = list(range(x))
    B = list(range(x, x + y))
    C = list(range(x + y, x + 2 * y))
    D = list(range(x + 2 * y, 2 * x + 2 * y))
    edges = [(a, b) for a in A for b in B] + [(c, d) for c in C for d in D]
    return Graph.from_edges(2 * x + 2 * y, edges), A, B, C, D


def test_swap_moves_edges_across_blocks():
    g, A, B, C, D = two_bicliques(4, 3)
    q = SwapQuadruple(A[0], B[0], C[0], D[0])
    h = apply_swap(g, q)
    assert h.has_edge(A[0], C[0]) and h.has_edge(B[0], D[0])
    assert not h.has_edge(A[0], B[0]) and not h.has_edge(C[0], D[0])
    assert h.degrees == g.degrees
    # the new neighbor sits where the old one was
    assert h.neighbors(A[0]).index(C[0]) == g.neighbors(A[0]).index(B[0])
    assert exact_single_target(g, EstimatorConfig(), D[1])[A[1]] == 0
    assert exact_single_target(h, EstimatorConfig(), D[1])[A[1]] > 0


def test_swap_rejects_existing_edge():
    g, A, B, C, D = two_bicliques(2, 2)
    with pytest.raises(SwapViolationError, match="already an edge"):
        apply_swap(g, SwapQuadruple(A[0], B[0], B[1], A[1]))


def test_subdivide_swap_toy():
    g = Graph.from_edges(6, [(0, 1), (2, 3)])
    h = subdivide_swap(g, SwapQuadruple(0, 1, 2, 3), (4, 5))
    assert h.has_edge(0, 4) and h.has_edge(4, 2) and not h.has_edge(0, 1)
    assert h.degree(4) == 2 and h.degree(5) == 2
    with pytest.raises(ConstructionError):
        subdivide_swap(g, SwapQuadruple(0, 1, 2, 3), (4, 4))


def test_sp_worst_parameters_and_overlap():
    fam = gen_family("sp-worst", 100, 400, 0.05)
    assert fam.case == 3
    assert (fam.params["x"], fam.params["y"]) == (2, 40)
    assert compute_overlap_K(fam, method="closed") == 2 * 40


def test_sp_worst_strict_constraint():
    with pytest.raises(GenerationError, match="x\\^2 y delta"):
        gen_family("sp-worst", 100, 400, 0.05, strict=True)


def test_sn_worst_parameters():
    fam = gen_family("sn-worst", 100, 10_000, 0.05)
    assert fam.params["x"] == 100 and fam.params["F"] == 200


def test_st_worst_adj_overlap_is_one():
    fam = gen_family("st-worst-adj", 16, 40, 0.1)
    assert compute_overlap_K(fam, method="brute") == 1
    assert compute_overlap_K(fam, method="closed") == 1


def test_aliases():
    assert resolve_family("sp-wc-j-s-a") == "sp-worst"
    with pytest.raises(PreconditionError):
        resolve_family("no-such-family")


def test_size_preconditions():
    with pytest.raises(GenerationError):
        gen_family("sp-worst", 3, 5, 0.1)
    with pytest.raises(GenerationError):
        gen_family("sp-worst", 10, 200, 0.1)


@pytest.mark.parametrize("name", FAMILY_NAMES)
def test_every_family_separates(name):
    fam = gen_family(name, 16, 40, 0.1)
    rep = verify_separation(fam, samples=10)
    assert rep.passed, rep


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(FAMILY_NAMES), st.integers(0, 10_000))
def test_sampled_swaps_preserve_degrees(name, seed):
    fam = gen_family(name, 12, 30, 0.1)
    q = fam.quadruple_space.sample(RandomStream(seed))
    assert q in fam.quadruple_space
    h = fam.swapped(q)
    for v in range(h.n):
        if v in fam.reserved:
            assert h.degree(v) in (0, 2)
        else:
            assert h.degree(v) == fam.base.degree(v)
    changed = {frozenset(p) for p in fam.changed_pairs(q)}
    for u, v in changed:
        assert fam.base.has_edge(u, v) != h.has_edge(u, v)
