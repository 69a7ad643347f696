import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pprkit import corpus
from pprkit.config import EstimatorConfig, RandomStream
from pprkit.errors import ModelViolationError
from pprkit.exact import exact_ppr_matrix, exact_single_target
from pprkit.graph import AccessModel, AccessSession, Graph
from pprkit.push import (
    PushState,
    backwards_push,
    backwards_push_avg,
    hybrid_params,
    hybrid_single_target,
    power_method_source,
    power_method_target,
    rand_push,
)

CFG = EstimatorConfig()
SORTED = AccessModel(sorted_enabled=True)


def test_no_push_when_threshold_is_one():
    st_ = backwards_push(AccessSession(corpus.clique(2)), 0, 1.0, CFG)
    assert st_.p == {} and st_.r == {0: 1.0}


def test_k2_hand_trace():
    st_ = backwards_push(AccessSession(corpus.clique(2)), 0, 0.5, CFG)
    assert st_.p[0] == pytest.approx(0.328)
    assert st_.p[1] == pytest.approx(0.2624)
    assert st_.r[0] == pytest.approx(0.4096)
    assert st_.r.get(1, 0.0) == 0.0
    assert st_.p[0] + st_.r[0] / 1.8 == pytest.approx(1 / 1.8)


def test_each_degree_is_queried_once():
    g = corpus.gnp(30, 0.2, 3)
    s = AccessSession(g)
    st_ = backwards_push(s, 0, 0.001, CFG)
    assert s.counters.deg <= g.n
    assert s.counters.neigh == sum(k * g.degree(v) for v, k in st_.pushes.items())


def test_power_method_limits():
    s = AccessSession(corpus.clique(2))
    st0 = power_method_target(s, 0, 0, CFG)
    assert st0.p == {} and st0.r == {0: 1.0}
    st10 = power_method_target(AccessSession(corpus.path(6)), 2, 10, CFG)
    assert st10.max_residual() <= 0.8 ** 10
    st30 = power_method_target(AccessSession(corpus.clique(2)), 0, 30, CFG)
    exact = exact_single_target(corpus.clique(2), CFG, 0).values
    assert np.max(np.abs(exact - [st30.p.get(0, 0), st30.p.get(1, 0)])) <= 0.8 ** 30


def test_power_method_source_converges():
    g = corpus.gnp(15, 0.3, 2)
    st_ = power_method_source(AccessSession(g), 0, 80, CFG)
    P = exact_ppr_matrix(g, CFG)
    est = np.array([st_.p.get(v, 0.0) for v in range(g.n)])
    assert np.max(np.abs(est - P[0])) < 1e-6


def test_rand_push_needs_sorted():
    with pytest.raises(ModelViolationError):
        rand_push(AccessSession(corpus.clique(3)), PushState(0, {}, {0: 1.0}), 0.01, 5, CFG)


def test_rand_push_deterministic_when_theta_tiny():
    g = corpus.gnp(12, 0.4, 5)
    det = power_method_target(AccessSession(g), 0, 6, CFG).p
    rnd = rand_push(AccessSession(g, SORTED, RandomStream(1)), PushState(0, {}, {0: 1.0}), 1e-12, 6, CFG)
    for v in range(g.n):
        assert rnd[v] == pytest.approx(det.get(v, 0.0), abs=1e-12)


def test_rand_push_unbiased_k3():
    g = corpus.clique(3)
    ref = power_method_target(AccessSession(g), 0, 20, CFG).p
    runs = np.array([rand_push(AccessSession(g, SORTED, RandomStream(7, k)), PushState(0, {}, {0: 1.0}),
                               0.05, 20, CFG).to_dense(3) for k in range(5000)])
    se = runs.std(axis=0, ddof=1) / math.sqrt(len(runs))
    for u in range(3):
        assert abs(runs[:, u].mean() - ref[u]) <= 4 * se[u] + 1e-12
        assert runs[:, u].var(ddof=1) <= 1.5 * 20 * 0.05 * ref[u]


def test_hybrid_parameters():
    cfg = EstimatorConfig(alpha=0.2, c=0.1, p_f=0.1, delta=0.01)
    hp = hybrid_params(cfg, 100, 4)
    assert hp.rounds_L == 35
    assert hp.theta == pytest.approx(7.142857e-8, rel=1e-6)
    assert hp.r_max == pytest.approx(math.sqrt(4 * 0.01 / 100))


def test_hybrid_isolated_target():
    cfg = EstimatorConfig(delta=0.05)
    est = hybrid_single_target(AccessSession(Graph.from_edges(3, [(0, 1)]), SORTED), 2, cfg)
    assert 1 - cfg.c * cfg.delta <= est[2] <= 1
    assert est[0] == 0.0


def test_bp_avg_on_k2_matches_plain_push():
    a = backwards_push_avg(AccessSession(corpus.clique(2)), 0, 0.5, CFG)
    assert a.p[0] == pytest.approx(0.328)
    assert a.p[1] == pytest.approx(0.2624)


def test_bp_avg_skips_hub():
    g = Graph.from_edges(12, [(0, 1)] + [(1, k) for k in range(2, 11)] + [(10, 11)])
    assert g.degree(1) == 10
    st_ = backwards_push_avg(AccessSession(g, SORTED), 0, 0.5, CFG)
    assert st_.p == {0: pytest.approx(0.2)} and st_.r == {}
    P = exact_ppr_matrix(g, CFG)
    assert P[0, 0] - st_.p[0] <= 2 * 0.5
    # modified invariant: the skipped hub carries (1 - alpha)/d(h) implicitly
    rhs = 0.8 / 10 * P[:, 1]
    rhs[0] += 0.2
    assert np.max(np.abs(P[:, 0] - rhs)) <= 1e-9


def test_bp_avg_scans_agree():
    g = corpus.disjoint_union(corpus.with_hub_neighbor(15), corpus.gnp(10, 0.4, 1))
    for t in range(g.n):
        a = backwards_push_avg(AccessSession(g, SORTED), t, 0.05, CFG)
        b = backwards_push_avg(AccessSession(g), t, 0.05, CFG, use_sorted=False)
        assert a.p == b.p and a.r == b.r


@st.composite
def small_graphs(draw):
    return corpus.gnp(draw(st.integers(1, 16)), draw(st.floats(0.05, 0.7)), draw(st.integers(0, 9999)))


@settings(max_examples=40, deadline=None)
@given(small_graphs(), st.floats(0.005, 0.9), st.data())
def test_push_invariant_after_every_push(g, r_max, data):
    t = data.draw(st.integers(0, g.n - 1))
    P = exact_ppr_matrix(g, CFG)

    def gap(state):
        p = np.zeros(g.n)
        r = np.zeros(g.n)
        for v, x in state.p.items():
            p[v] = x
        for v, x in state.r.items():
            r[v] = x
        assert np.all(p >= 0) and np.all(r >= 0)
        return np.max(np.abs(P[:, t] - p - P @ r))

    gaps = []
    st_ = backwards_push(AccessSession(g), t, r_max, CFG, on_push=lambda s: gaps.append(gap(s)))
    assert max(gaps + [gap(st_)]) <= 1e-9
    assert st_.max_residual() <= r_max
    diff = P[:, t] - np.array([st_.p.get(u, 0.0) for u in range(g.n)])
    assert diff.min() >= -1e-12 and diff.max() <= r_max + 1e-12
