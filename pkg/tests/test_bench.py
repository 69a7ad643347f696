import io

import pytest
from hypothesis import given, settings, strategies as st

from pprkit import corpus
from pprkit.bench import (
    ALGORITHMS,
    FIELDNAMES,
    ExperimentRecord,
    RunOptions,
    TrialJob,
    fit_scaling,
    geometric_grid,
    read_records,
    records_to_csv,
    run_trial,
    run_trials,
    violation_rate,
    write_records,
)
from pprkit.config import EstimatorConfig
from pprkit.errors import ModelViolationError, PreconditionError
from pprkit.graph import AccessModel


def test_fit_recovers_exact_power():
    fit = fit_scaling([100, 400, 1600], [10, 20, 40])
    assert fit.slope == pytest.approx(0.5)
    assert fit.r2 == pytest.approx(1.0)
    with pytest.raises(PreconditionError):
        fit_scaling([1, 2], [1, 2])


def test_geometric_grid():
    g = geometric_grid(2 ** 10, 2 ** 16, 7)
    assert g[0] == pytest.approx(1024) and g[-1] == pytest.approx(65536)
    assert g[1] / g[0] == pytest.approx(2.0)


def test_violation_rate():
    assert violation_rate([0.5, 0.0], [0.5, 0.2], 0.1, 0.1) == 0.5


def test_header_matches_record_fields():
    text = records_to_csv([])
    assert text.strip() == ",".join(FIELDNAMES)


def _job(algo, trial=0, **kw):
    g = corpus.gnp(20, 0.3, 1)
    return TrialJob(g, "gnp", algo, AccessModel.full(), EstimatorConfig(c=0.3, delta=0.1), 1, 0, trial,
                    RunOptions(), kw.get("exact"), kw.get("timing", True))


@pytest.mark.parametrize("algo", sorted(ALGORITHMS))
def test_every_algorithm_produces_a_consistent_record(algo):
    rec = run_trial(_job(algo, exact=0.05))
    assert rec.queries_total == (rec.queries_deg + rec.queries_neigh + rec.queries_sorted
                                 + rec.queries_jump + rec.queries_adj)
    assert rec.rel_err == pytest.approx(rec.abs_err / max(rec.exact, rec.delta))
    assert rec.algo == algo and rec.wall_ns >= 0


def test_model_is_enforced():
    job = _job("single-node")
    bad = TrialJob(job.graph, job.family, job.algo, AccessModel(jump_enabled=True), job.cfg, 0, 0, 0)
    with pytest.raises(ModelViolationError):
        run_trial(bad)


def test_base_model_algorithm_uses_no_extra_queries():
    g = corpus.clique(2)
    rec = run_trial(TrialJob(g, "k2", "bp", AccessModel(), EstimatorConfig(), 1, 1, 0))
    assert rec.queries_jump == rec.queries_sorted == rec.queries_adj == 0


def test_round_trip_and_reproducibility():
    jobs = [_job(a, k, exact=0.04, timing=False) for a in ("mc", "hybrid", "single-node") for k in range(2)]
    first = records_to_csv(run_trials(jobs))
    again = records_to_csv(run_trials(jobs, workers=2))
    assert first == again
    back = read_records(io.StringIO(first))
    assert records_to_csv(back) == first


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=60, deadline=None)
@given(st.text(st.characters(blacklist_categories=("Cc", "Cs")), min_size=1, max_size=12), st.integers(0, 10**9), finite, st.one_of(st.none(), finite))
def test_rows_round_trip(family, count, value, maybe):
    rec = ExperimentRecord(family, count, count, 0.1, "mc", "jump,sorted", 1, 2, 1, 2, 3, 4, 5, 15,
                           value, maybe, None, None, count)
    buf = io.StringIO()
    write_records([rec], buf)
    buf.seek(0)
    assert read_records(buf) == [rec]
