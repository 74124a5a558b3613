"""Metrics, the hand-off latency model, and report files.

Alongside exact-match accuracy and MAE, a prediction accuracy p maps to an
expected hand-off latency: a proactively predicted blockage costs the
contention-free delay (11.4 ms), a missed one costs the full reactive
recovery (222.8 ms), so the expected cost is the p-weighted mix of the two.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import ConfigError
from .io_utils import dump_json, ensure_dir, fmt_float, write_csv

LATENCY_HIT_MS = 11.4
LATENCY_MISS_MS = 222.8

PROBLEM_NAMES = {
    1: "occurrence",
    2: "instance",
    3: "severity",
    4: "direction",
}
REGRESSION_PROBLEMS = (2,)


def _paired(preds, targets, op_name):
    preds = np.asarray(preds, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if preds.shape != targets.shape or preds.ndim != 1:
        raise ConfigError(f"{op_name}: preds and targets must be equal-length 1-D")
    if len(preds) == 0:
        raise ConfigError(f"{op_name}: empty input")
    return preds, targets


def top1(preds, targets) -> float:
    """Fraction of exact matches."""
    preds, targets = _paired(preds, targets, "top1")
    return float(np.mean(preds == targets))


def mae_std(preds, targets):
    """Mean absolute error and the population std of the absolute errors."""
    preds, targets = _paired(preds, targets, "mae_std")
    err = np.abs(preds - targets)
    return float(err.mean()), float(err.std(ddof=0))


def confusion(preds, targets, classes) -> np.ndarray:
    """Row-normalized confusion matrix; row = truth, column = prediction.

    Rows without samples stay all-zero.
    """
    classes = list(classes)
    if not classes or len(set(classes)) != len(classes):
        raise ConfigError("confusion: classes must be non-empty and unique")
    preds, targets = _paired(preds, targets, "confusion")
    index = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)))
    for p, t in zip(preds, targets):
        if p not in index or t not in index:
            raise ConfigError(f"confusion: label {p if p not in index else t} "
                              "not in classes")
        counts[index[t], index[p]] += 1
    out = counts.copy()
    row_sums = counts.sum(axis=1)
    populated = row_sums > 0
    out[populated] /= row_sums[populated, None]
    return out


def latency(p_hat: float) -> float:
    """Expected hand-off latency in ms for prediction accuracy p_hat."""
    if not (0.0 <= p_hat <= 1.0):
        raise ConfigError("latency: p_hat must be in [0, 1]")
    return p_hat * LATENCY_HIT_MS + (1.0 - p_hat) * LATENCY_MISS_MS


@dataclass
class ProblemResult:
    """Predictions and targets for one (problem, horizon) slice."""

    problem: int
    horizon: int
    preds: np.ndarray
    targets: np.ndarray
    classes: tuple | None = None

    def __post_init__(self):
        if self.problem not in PROBLEM_NAMES:
            raise ConfigError("ProblemResult: problem must be 1..4")
        if not (1 <= self.horizon <= 10):
            raise ConfigError("ProblemResult: horizon must be 1..10")
        self.preds = np.asarray(self.preds, dtype=float)
        self.targets = np.asarray(self.targets, dtype=float)

    @property
    def is_regression(self) -> bool:
        return self.problem in REGRESSION_PROBLEMS


def evaluate(results, manifest=None) -> dict:
    """Metric table for a batch of per-problem results.

    Classification problems get top-1, expected latency, and a confusion
    matrix; the instance problem gets MAE and error std.
    """
    results = list(results)
    if not results:
        raise ConfigError("evaluate: no results")
    entries = []
    for r in sorted(results, key=lambda r: (r.problem, r.horizon)):
        entry = {
            "problem": r.problem,
            "name": PROBLEM_NAMES[r.problem],
            "horizon": r.horizon,
            "count": int(len(r.preds)),
        }
        if r.is_regression:
            mae, std = mae_std(r.preds, r.targets)
            entry["mae"] = mae
            entry["std"] = std
        else:
            acc = top1(r.preds, r.targets)
            entry["top1"] = acc
            entry["latency_ms"] = latency(acc)
            classes = r.classes
            if classes is None:
                classes = tuple(sorted(set(r.targets.tolist())
                                       | set(r.preds.tolist())))
            entry["classes"] = [int(c) for c in classes]
            entry["confusion"] = confusion(r.preds, r.targets, classes).tolist()
        entries.append(entry)
    return {
        "tool_version": __version__,
        "manifest": manifest or {},
        "results": entries,
    }


def _format_text(report: dict) -> str:
    lines = ["blockage prediction report",
             f"tool version: {report['tool_version']}", ""]
    header = f"{'problem':<12}{'horizon':>8}{'count':>8}{'metric':>12}{'value':>14}"
    lines.append(header)
    lines.append("-" * len(header))
    for e in report["results"]:
        tag = f"{e['name']:<12}{e['horizon']:>8}{e['count']:>8}"
        if "top1" in e:
            lines.append(f"{tag}{'top1':>12}{fmt_float(e['top1']):>14}")
            lines.append(f"{'':<28}{'latency_ms':>12}{fmt_float(e['latency_ms']):>14}")
        else:
            lines.append(f"{tag}{'mae':>12}{fmt_float(e['mae']):>14}")
            lines.append(f"{'':<28}{'std':>12}{fmt_float(e['std']):>14}")
    lines.append("")
    return "\n".join(lines)


def _curve_rows(report: dict):
    rows = []
    for e in report["results"]:
        for metric in ("top1", "latency_ms", "mae", "std"):
            if metric in e:
                rows.append([e["problem"], e["horizon"], metric, e[metric]])
    return rows


def emit_report(report: dict, out_dir) -> None:
    """Write report.json, report.txt, and curves.csv under out_dir."""
    if not report.get("results"):
        raise ConfigError("emit_report: report has no results")
    out = ensure_dir(out_dir)
    dump_json(out / "report.json", report)
    (out / "report.txt").write_text(_format_text(report), encoding="utf-8")
    write_csv(out / "curves.csv", ["problem", "horizon", "metric", "value"],
              _curve_rows(report))
