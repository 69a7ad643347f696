import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pprkit import corpus
from pprkit.bidirectional import (
    BiPprParams,
    SingleNodeParams,
    bippr_avg_pair,
    bippr_params,
    jump_bidirectional_st,
    jump_st_r_max,
    low_degree_prefix,
    single_node,
    single_node_params,
)
from pprkit.config import EstimatorConfig, RandomStream
from pprkit.errors import ModelViolationError
from pprkit.exact import exact_pagerank, exact_single_target
from pprkit.graph import AccessModel, AccessSession, Graph

CFG = EstimatorConfig()
FULL = AccessModel.full()


def test_bippr_walk_budget():
    cfg = EstimatorConfig(c=0.1, p_f=0.1, delta=0.064)
    p = bippr_params(cfg)
    assert p.r_max == pytest.approx(0.4)
    assert p.n_r == 12500


def test_jump_st_threshold():
    cfg = EstimatorConfig(delta=0.04)
    assert jump_st_r_max(cfg, 100, 4, "worst") == pytest.approx(0.04)
    assert jump_st_r_max(cfg, 1, 100, "worst") == 0.5


def test_single_node_needs_every_query():
    with pytest.raises(ModelViolationError):
        single_node(AccessSession(corpus.clique(3), AccessModel(jump_enabled=True)), 0, CFG)


def test_single_node_degenerate_inputs():
    assert single_node(AccessSession(Graph(1, [[]]), FULL), 0, CFG) == 1.0
    g = Graph.from_edges(4, [(0, 1), (1, 2)])
    assert single_node(AccessSession(g, FULL, RandomStream(1)), 3, CFG) == pytest.approx(0.25)


def test_low_degree_prefix():
    g = corpus.with_hub_neighbor(10)
    s = AccessSession(g, FULL)
    assert low_degree_prefix(s, 0, 1) == 1
    assert low_degree_prefix(s, 0, 10) == 2
    assert low_degree_prefix(s, 0, 0) == 0


def test_single_node_params_switch_at_root_n():
    lo = single_node_params(CFG, 100, 5)
    hi = single_node_params(CFG, 100, 50)
    assert lo.tau == 100 and hi.tau == 10


def test_single_node_unbiased_k3():
    vals = [single_node(AccessSession(corpus.clique(3), FULL, RandomStream(3, k)), 0, CFG,
                        SingleNodeParams(1, 10, 10)) for k in range(2000)]
    se = np.std(vals, ddof=1) / math.sqrt(len(vals))
    assert abs(np.mean(vals) - 1 / 3) <= 4 * se + 1e-12


def test_bippr_unbiased_k3():
    params = BiPprParams(0.3, 20)
    truth = exact_single_target(corpus.clique(3), CFG, 1)[0]
    vals = [bippr_avg_pair(AccessSession(corpus.clique(3), rng=RandomStream(5, k)), 0, 1, CFG, params=params)
            for k in range(2000)]
    se = np.std(vals, ddof=1) / math.sqrt(len(vals))
    assert abs(np.mean(vals) - truth) <= 4 * se + 1e-12


def test_bippr_pair_model():
    g = corpus.with_hub_neighbor(30)
    with pytest.raises(ModelViolationError):
        bippr_avg_pair(AccessSession(g), 1, 0, CFG, lazy=True)


@st.composite
def graph_and_pair(draw):
    g = corpus.disjoint_union(corpus.with_hub_neighbor(draw(st.integers(3, 14))),
                              corpus.gnp(draw(st.integers(2, 14)), draw(st.floats(0.1, 0.8)),
                                         draw(st.integers(0, 999))))
    s = draw(st.integers(0, g.n - 1))
    t = draw(st.integers(0, g.n - 1))
    return g, s, t


@settings(max_examples=40, deadline=None)
@given(graph_and_pair(), st.integers(0, 2**31), st.sampled_from([0.5, 0.2, 0.08]))
def test_bippr_eager_and_lazy_agree(case, seed, r_max):
    g, s, t = case
    params = BiPprParams(r_max, 40)
    a = bippr_avg_pair(AccessSession(g, FULL, RandomStream(seed)), s, t, CFG, params=params)
    b = bippr_avg_pair(AccessSession(g, FULL, RandomStream(seed)), s, t, CFG, lazy=True, params=params)
    assert a == b


def test_jump_st_zero_residual_degenerates_to_push():
    # an isolated target leaves no residual, so no walks are spent
    g = Graph.from_edges(4, [(0, 1), (1, 2)])
    s = AccessSession(g, FULL, RandomStream(1))
    est = jump_bidirectional_st(s, 3, EstimatorConfig(delta=0.2), r_max=0.01)
    assert dict(est) == {3: 1.0}
    assert s.counters.jump == 0


@pytest.mark.parametrize("variant", ["worst", "avg"])
def test_jump_st_close_to_truth(variant):
    g = corpus.gnp(25, 0.25, 4)
    cfg = EstimatorConfig(c=0.3, delta=0.05)
    truth = exact_single_target(g, cfg, 0).values
    est = jump_bidirectional_st(AccessSession(g, FULL, RandomStream(2)), 0, cfg, variant).to_dense(g.n)
    big = truth > cfg.delta
    assert np.all(np.abs(est - truth)[big] <= cfg.c * truth[big])


def test_single_node_close_to_truth():
    g = corpus.gnp(40, 0.15, 8)
    cfg = EstimatorConfig(c=0.3)
    est = single_node(AccessSession(g, FULL, RandomStream(4)), 3, cfg)
    assert est == pytest.approx(exact_pagerank(g, cfg, 3), rel=0.3)
