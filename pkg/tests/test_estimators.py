import numpy as np
import pytest
from sklearn.base import clone

from pprkit import corpus
from pprkit.errors import InvalidVertexError, ModelViolationError, PreconditionError
from pprkit.estimators import ExactPPR, PPREstimator
from pprkit.graph import Graph


G = corpus.gnp(25, 0.25, 6)


def test_params_round_trip_and_clone():
    est = PPREstimator(algo="bmc", c=0.3, random_state=4)
    assert est.get_params()["algo"] == "bmc"
    twin = clone(est)
    assert twin.get_params() == est.get_params()
    est.set_params(delta=0.05)
    assert est.delta == 0.05


def test_fit_from_edge_array():
    edges = np.array(list(G.edges()))
    a = PPREstimator(algo="bp", c=0.2).fit(edges).predict([[0, 1], [2, 1]])
    same = Graph.from_edges(G.n, [tuple(e) for e in edges.tolist()])
    b = PPREstimator(algo="bp", c=0.2).fit(same).predict([[0, 1], [2, 1]])
    assert a.tolist() == b.tolist()
    with pytest.raises(PreconditionError):
        PPREstimator(n_vertices=3).fit(G)


def test_exact_model():
    ex = ExactPPR().fit(corpus.clique(2))
    assert ex.predict([[0, 0], [0, 1]]) == pytest.approx([5 / 9, 4 / 9])
    assert ex.transform([1])[0] == pytest.approx([4 / 9, 5 / 9])
    assert ex.pagerank([0]) == pytest.approx([0.5])


@pytest.mark.parametrize("algo", ["mc", "bmc", "hybrid", "bp-avg", "power", "jump-st"])
def test_transform_close_to_exact(algo):
    est = PPREstimator(algo=algo, c=0.3, delta=0.05, random_state=1).fit(G)
    rows = est.transform([0, 3])
    exact = ExactPPR().fit(G)
    truth = exact.predict([[u, v] for u in range(G.n) for v in (0, 3)]).reshape(G.n, 2).T
    if algo == "mc":
        truth = exact.matrix_[[0, 3]]
    assert np.all(np.abs(rows - truth) <= 0.3 * np.maximum(truth, 0.05))
    assert est.queries_.total > 0


def test_predict_is_order_independent():
    est = PPREstimator(algo="bmc", c=0.3, random_state=2).fit(G)
    a = est.predict([[1, 0], [2, 5]])
    b = est.predict([[2, 5], [1, 0]])
    assert a[0] == b[1] and a[1] == b[0]


def test_pagerank_algorithms_take_vertices():
    est = PPREstimator(algo="single-node", c=0.3, random_state=0).fit(G)
    got = est.predict([4, 4, 5])
    assert got[0] == got[1]
    assert got == pytest.approx(ExactPPR().fit(G).pagerank([4, 4, 5]), rel=0.3)
    with pytest.raises(PreconditionError):
        est.transform([1])


def test_validation_errors():
    with pytest.raises(PreconditionError):
        PPREstimator(algo="nope").fit(G)
    est = PPREstimator(algo="bp").fit(G)
    with pytest.raises(InvalidVertexError):
        est.predict([[0, G.n]])
    with pytest.raises(PreconditionError):
        est.predict([[0, 1, 2]])
    with pytest.raises(ModelViolationError):
        PPREstimator(algo="single-node", model="jump").fit(G).predict([0])
    with pytest.raises(Exception):
        PPREstimator().predict([[0, 1]])
