import pytest
from hypothesis import given, strategies as st

from conftest import FOUR_PERIOD_BLOCK, micro_instance
from mpcsp.harness import (LOSS, TIE, WIN, Report, Row, classify, clamp_sigma, gap_percent, parse_report_csv,
                           rows_to_csv, run_experiment, run_method, sweep, sweep_grid, wtl)
from mpcsp.matheuristic import TrainingConfig


@pytest.mark.parametrize("fa, fb, gap", [
    (182_258_424, 444_536_794, -59.0004),
    (400_703_843, 314_108_050, 27.5688),
    (12345, 12345, 0.0),
])
def test_gap_examples(fa, fb, gap):
    assert gap_percent(fa, fb) == gap


def test_gap_zero_reference():
    with pytest.raises(ZeroDivisionError):
        gap_percent(5, 0)


@pytest.mark.parametrize("mine, theirs, gap, label", FOUR_PERIOD_BLOCK)
def test_reference_block_row(mine, theirs, gap, label):
    assert gap_percent(theirs[0], mine[0]) == gap
    assert classify(theirs[1], theirs[2], mine[1], mine[2]) == label


def test_reference_block_tally():
    labels = [classify(b[1], b[2], a[1], a[2]) for a, b, _, _ in FOUR_PERIOD_BLOCK]
    assert wtl(labels) == (3, 6, 1)


@pytest.mark.parametrize("args, label", [
    ((6715, 0, 6715, 0), TIE),
    ((11679, 2647, 9155, 0), LOSS),
    ((5, 10, 5, 9), WIN),
    ((5, 9, 5, 10), LOSS),
    ((4, 0, 5, 100), WIN),
])
def test_classify_examples(args, label):
    assert classify(*args) == label


pairs = st.tuples(st.integers(0, 50), st.integers(0, 50))


@given(pairs, pairs)
def test_classify_antisymmetric(a, b):
    ab, ba = classify(*a, *b), classify(*b, *a)
    assert {ab, ba} in ({TIE}, {WIN, LOSS})
    assert (ab == TIE) == (a == b)


@given(st.integers(1, 10**9), st.integers(1, 10**9))
def test_gap_sign(fa, fb):
    g = gap_percent(fa, fb)
    assert (g < 0) <= (fa < fb) and (g > 0) <= (fa > fb)


def test_sweep_grid_and_clamp():
    grid = sweep_grid()
    assert len(grid) == 11 and grid[0] == 0.5 and grid[-1] == 1.0
    assert clamp_sigma(1.0) == 0.999 and clamp_sigma(0.7) == 0.7


def test_run_method_unknown(toy1):
    with pytest.raises(ValueError, match="unknown method"):
        run_method(toy1, "genetic")


def test_run_method_reports_infeasible(toy1):
    bad = toy1.with_objects(1, ()).with_xi(0)
    plan, info = run_method(bad, "myopic")
    assert plan is None and info == {"status": "infeasible", "failed_at": 1}
    assert run_method(bad, "oracle")[0] is None


def test_empty_experiment():
    report = run_experiment([], ["myopic"])
    assert report.rows == [] and report.summary() == []
    assert parse_report_csv(report.to_csv()) == []


@pytest.fixture(scope="module")
def toy_report(toy1, toy2):
    cfg = TrainingConfig(delta_ini=1.0)
    return run_experiment([("toy2", toy2), ("toy1", toy1.with_xi(1))], ["oracle", "myopic", "flook"], cfg)


def test_toy_report(toy_report):
    rows = toy_report.by_instance()
    assert list(rows) == ["toy2", "toy1"]
    assert rows["toy2"]["oracle"].cost == 477
    assert rows["toy2"]["myopic"].cost == 592
    assert rows["toy2"]["flook"].cycles >= 1
    out = dict(toy_report.outcomes("myopic", "oracle"))
    assert out["toy2"].label == LOSS and out["toy2"].gap > 0


def test_report_csv_roundtrip(toy_report):
    parsed = parse_report_csv(toy_report.to_csv())
    assert len(parsed) == 6
    for rec, row in zip(parsed, toy_report.rows):
        assert (rec["instance"], rec["method"], rec["cost"], rec["leftover_value"]) == \
               (row.instance, row.method, row.cost, row.leftover_value)
        assert rec["seconds"] == pytest.approx(row.seconds, abs=1e-4)


def test_report_text_and_summary(toy_report):
    text = toy_report.to_text()
    assert "avg_objective" in text and "wtl" in text
    summ = toy_report.summary()
    assert {e["method"] for e in summ} == {"oracle", "myopic", "flook"}
    assert all("wtl" in e for e in summ if e["method"] != "oracle")


def test_errors_are_recorded(monkeypatch, toy2):
    import mpcsp.harness as h

    def boom(*a, **k):
        raise RuntimeError("solver crashed")

    monkeypatch.setattr(h, "run_method", boom)
    report = run_experiment([("toy2", toy2)], ["myopic"])
    assert report.rows[0].status == "error" and "solver crashed" in report.rows[0].error


def test_parallel_rows_keep_order():
    insts = [(f"m{s}", micro_instance(s)) for s in range(3)]
    serial = run_experiment(insts, ["myopic"], workers=1)
    parallel = run_experiment(insts, ["myopic"], workers=2)
    assert [(r.instance, r.cost) for r in serial.rows] == [(r.instance, r.cost) for r in parallel.rows]


def test_summary_skips_failed_rows():
    rows = [Row("a", 2, 1, "myopic", "ok", 10, 5, 0), Row("a", 2, 1, "flook", "infeasible")]
    summ = Report(["myopic", "flook"], rows).summary()
    assert summ[1]["solved"] == 0 and summ[1]["wtl"] == "0/0/0"


def test_sweep_small_grid(toy2):
    rows = sweep([("toy2", toy2)], deltas=[1.0], sigmas=[0.9, 1.0], reference="oracle")
    assert [r["sigma_used"] for r in rows] == [0.9, 0.999]
    assert rows[0]["avg_gap"] == 0.0
    text = rows_to_csv(rows)
    assert text.splitlines()[0].startswith("delta_ini,sigma,sigma_used,avg_gap")
    assert rows_to_csv([]) == ""
