"""Metric tests: worked examples, brute-force oracles, report determinism."""

import numpy as np
import pytest

from blockcast.errors import ConfigError
from blockcast.evaluation import (
    LATENCY_HIT_MS,
    LATENCY_MISS_MS,
    ProblemResult,
    confusion,
    emit_report,
    evaluate,
    latency,
    mae_std,
    top1,
)
from blockcast.io_utils import load_json, read_csv


# ---------- top-1 ----------

def test_top1_worked_examples():
    assert top1([1, 0, 1], [1, 0, 1]) == 1.0
    assert top1([1, 1, 1], [0, 0, 0]) == 0.0
    assert top1([1, 0, 1, 0], [1, 0, 1, 1]) == 0.75


def test_top1_validation():
    with pytest.raises(ConfigError):
        top1([], [])
    with pytest.raises(ConfigError):
        top1([1, 2], [1])


# ---------- MAE / std ----------

def test_mae_std_worked_examples():
    assert mae_std([1.0, 2.0], [1.0, 2.0]) == (0.0, 0.0)
    mae, std = mae_std([2.0, 3.0, 4.0], [1.0, 2.0, 3.0])
    assert mae == 1.0 and std == 0.0
    # |errors| = {0, 2}: population divisor gives std exactly 1.
    mae, std = mae_std([5.0, 5.0], [5.0, 3.0])
    assert mae == 1.0 and std == 1.0


def test_mae_std_population_divisor():
    # Sample std of {0, 2} would be sqrt(2); population std is 1.
    _, std = mae_std([0.0, 0.0], [0.0, 2.0])
    assert std == 1.0 != pytest.approx(np.sqrt(2.0))


# ---------- confusion ----------

def test_confusion_perfect_identity():
    m = confusion([1, 2, 3, 1], [1, 2, 3, 1], classes=(1, 2, 3))
    assert np.allclose(m, np.eye(3))


def test_confusion_single_class_row():
    m = confusion([2, 2, 3], [2, 2, 2], classes=(2, 3))
    assert np.allclose(m[0], [2 / 3, 1 / 3])
    assert np.all(m[1] == 0.0)


def test_confusion_unknown_label_errors():
    with pytest.raises(ConfigError):
        confusion([1, 9], [1, 1], classes=(1, 2))
    with pytest.raises(ConfigError):
        confusion([1], [9], classes=(1, 2))
    with pytest.raises(ConfigError):
        confusion([1], [1], classes=(1, 1))


def test_confusion_rows_sum_to_one():
    rng = np.random.default_rng(0)
    preds = rng.integers(0, 4, size=200)
    targets = rng.integers(0, 4, size=200)
    m = confusion(preds, targets, classes=range(4))
    sums = m.sum(axis=1)
    assert np.all(np.abs(sums - 1.0) < 1e-9)


# ---------- metric oracles ----------

def test_metrics_match_brute_force():
    rng = np.random.default_rng(5)
    for _ in range(200):
        n = int(rng.integers(1, 60))
        preds = rng.integers(0, 5, size=n).astype(float)
        targets = rng.integers(0, 5, size=n).astype(float)

        acc = sum(1 for p, t in zip(preds, targets) if p == t) / n
        assert abs(top1(preds, targets) - acc) < 1e-12

        errs = [abs(p - t) for p, t in zip(preds, targets)]
        mae = sum(errs) / n
        var = sum((e - mae) ** 2 for e in errs) / n
        got_mae, got_std = mae_std(preds, targets)
        assert abs(got_mae - mae) < 1e-12
        assert abs(got_std - var ** 0.5) < 1e-12

        classes = list(range(5))
        tally = [[0] * 5 for _ in range(5)]
        for p, t in zip(preds, targets):
            tally[int(t)][int(p)] += 1
        m = confusion(preds, targets, classes)
        for i in range(5):
            row_n = sum(tally[i])
            for j in range(5):
                want = tally[i][j] / row_n if row_n else 0.0
                assert abs(m[i, j] - want) < 1e-12


# ---------- latency ----------

def test_latency_endpoints():
    assert latency(1.0) == LATENCY_HIT_MS == 11.4
    assert latency(0.0) == LATENCY_MISS_MS == 222.8


def test_latency_known_operating_point():
    assert abs(latency(0.99186) - 13.12) < 0.01


def test_latency_validation():
    with pytest.raises(ConfigError):
        latency(-0.01)
    with pytest.raises(ConfigError):
        latency(1.01)


def test_latency_linearity():
    rng = np.random.default_rng(1)
    for _ in range(50):
        p1, p2, a = rng.uniform(0, 1, size=3)
        mixed = latency(a * p1 + (1 - a) * p2)
        assert abs(mixed - (a * latency(p1) + (1 - a) * latency(p2))) < 1e-9


# ---------- reports ----------

def _sample_results():
    return [
        ProblemResult(problem=1, horizon=1,
                      preds=[1, 0, 1, 1], targets=[1, 0, 0, 1], classes=(0, 1)),
        ProblemResult(problem=2, horizon=1,
                      preds=[2.5, 4.0], targets=[2.0, 5.0]),
        ProblemResult(problem=4, horizon=2,
                      preds=[0, 1, 1], targets=[0, 1, 0], classes=(0, 1)),
    ]


def test_evaluate_fields_match_metric_recomputation():
    report = evaluate(_sample_results(), manifest={"windows": 4})
    by_key = {(e["problem"], e["horizon"]): e for e in report["results"]}
    occ = by_key[(1, 1)]
    assert occ["top1"] == top1([1, 0, 1, 1], [1, 0, 0, 1])
    assert occ["latency_ms"] == latency(occ["top1"])
    assert np.allclose(np.array(occ["confusion"]).sum(axis=1), 1.0)
    inst = by_key[(2, 1)]
    mae, std = mae_std([2.5, 4.0], [2.0, 5.0])
    assert inst["mae"] == mae and inst["std"] == std
    assert "top1" not in inst
    assert report["manifest"] == {"windows": 4}


def test_evaluate_requires_results():
    with pytest.raises(ConfigError):
        evaluate([])


def test_problem_result_validation():
    with pytest.raises(ConfigError):
        ProblemResult(problem=5, horizon=1, preds=[1], targets=[1])
    with pytest.raises(ConfigError):
        ProblemResult(problem=1, horizon=0, preds=[1], targets=[1])


def test_emit_report_deterministic(tmp_path):
    report = evaluate(_sample_results())
    emit_report(report, tmp_path / "a")
    emit_report(report, tmp_path / "b")
    for name in ("report.json", "report.txt", "curves.csv"):
        a = (tmp_path / "a" / name).read_bytes()
        b = (tmp_path / "b" / name).read_bytes()
        assert a == b, name
    again = load_json(tmp_path / "a" / "report.json")
    assert again["results"][0]["top1"] == 0.75
    header, rows = read_csv(tmp_path / "a" / "curves.csv",
                            ["problem", "horizon", "metric", "value"])
    metrics = {(r[0], r[1], r[2]) for r in rows}
    assert ("1", "1", "top1") in metrics
    assert ("2", "1", "mae") in metrics


def test_emit_report_rejects_empty(tmp_path):
    with pytest.raises(ConfigError):
        emit_report({"results": []}, tmp_path)
