"""Scoring and paired significance testing.

Per-class precision/recall/F1 use the 0-when-undefined convention, macro F1
is the unweighted mean over the full class list, and weighted F1 (support-
weighted) is reported alongside. McNemar's test uses the exact two-sided
binomial when the discordant count is small and the continuity-corrected
chi-square approximation otherwise.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np
from scipy import stats

from .errors import ConfigError, DataError

# Exact binomial below this many discordant pairs, chi-square from there on.
MCNEMAR_EXACT_LIMIT = 25


@dataclass(frozen=True)
class ClassScore:
    label: str
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    per_class: tuple[ClassScore, ...]
    macro_f1: float
    weighted_f1: float
    confusion: np.ndarray  # gold rows x predicted columns, class order
    classes: tuple[str, ...]
    n: int

    def __post_init__(self):
        conf = np.asarray(self.confusion, dtype=np.int64)
        conf.setflags(write=False)
        object.__setattr__(self, "confusion", conf)


def _class_indices(labels: Sequence[str], classes: Sequence[str],
                   what: str) -> np.ndarray:
    index = {c: i for i, c in enumerate(classes)}
    try:
        return np.array([index[lab] for lab in labels], dtype=np.int64)
    except KeyError as exc:
        raise DataError(f"{what} label {exc.args[0]!r} not in class list") from exc


def evaluate(pred: Sequence[str], gold: Sequence[str],
             classes: Sequence[str]) -> EvalReport:
    """Accuracy, per-class P/R/F1, macro and weighted F1, confusion matrix."""
    if len(pred) != len(gold):
        raise DataError(f"{len(pred)} predictions for {len(gold)} gold labels")
    if len(gold) == 0:
        raise DataError("cannot evaluate zero samples")
    classes = tuple(classes)
    if len(set(classes)) != len(classes):
        raise DataError("duplicate class names")
    gi = _class_indices(gold, classes, "gold")
    pi = _class_indices(pred, classes, "predicted")

    n_cls = len(classes)
    confusion = np.zeros((n_cls, n_cls), dtype=np.int64)
    np.add.at(confusion, (gi, pi), 1)

    tp = np.diag(confusion).astype(np.float64)
    gold_counts = confusion.sum(axis=1).astype(np.float64)
    pred_counts = confusion.sum(axis=0).astype(np.float64)

    with np.errstate(divide="ignore", invalid="ignore"):
        precision = np.where(pred_counts > 0, tp / pred_counts, 0.0)
        recall = np.where(gold_counts > 0, tp / gold_counts, 0.0)
        pr_sum = precision + recall
        f1 = np.where(pr_sum > 0, 2 * precision * recall / pr_sum, 0.0)

    n = len(gold)
    per_class = tuple(
        ClassScore(label=c, precision=float(precision[i]),
                   recall=float(recall[i]), f1=float(f1[i]))
        for i, c in enumerate(classes))
    return EvalReport(
        accuracy=float(tp.sum() / n),
        per_class=per_class,
        macro_f1=float(f1.mean()),
        weighted_f1=float((f1 * gold_counts).sum() / n),
        confusion=confusion,
        classes=classes,
        n=n,
    )


class McNemarResult(NamedTuple):
    statistic: float
    p_value: float
    significant: bool
    b: int  # first system correct, second wrong
    c: int  # first system wrong, second correct


def mcnemar(pred_a: Sequence[str], pred_b: Sequence[str],
            gold: Sequence[str], alpha: float = 0.05) -> McNemarResult:
    """Paired test on discordant correctness counts of two systems.

    Swapping the two prediction lists leaves the p-value unchanged.
    """
    if not 0 < alpha < 1:
        raise ConfigError(f"alpha must be in (0,1), got {alpha}")
    if not (len(pred_a) == len(pred_b) == len(gold)):
        raise DataError(
            f"length mismatch: {len(pred_a)}, {len(pred_b)}, {len(gold)}")
    b = sum(1 for pa, pb, g in zip(pred_a, pred_b, gold)
            if pa == g and pb != g)
    c = sum(1 for pa, pb, g in zip(pred_a, pred_b, gold)
            if pa != g and pb == g)
    n_disc = b + c
    if n_disc < MCNEMAR_EXACT_LIMIT:
        k = min(b, c)
        statistic = float(k)
        p_value = min(1.0, 2.0 * float(stats.binom.cdf(k, n_disc, 0.5)))
    else:
        statistic = (abs(b - c) - 1) ** 2 / n_disc
        p_value = float(stats.chi2.sf(statistic, df=1))
    return McNemarResult(statistic=statistic, p_value=p_value,
                         significant=p_value < alpha, b=b, c=c)


def export_confusion(report: EvalReport, path) -> None:
    """CSV: header row of class names, then one row of counts per gold class."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(report.classes)
        for row in report.confusion:
            writer.writerow([int(x) for x in row])


def read_confusion(path) -> tuple[tuple[str, ...], np.ndarray]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        rows = [row for row in reader if row]
    if not rows:
        raise DataError(f"{path}: empty confusion file")
    classes = tuple(rows[0])
    matrix = np.array([[int(x) for x in row] for row in rows[1:]],
                      dtype=np.int64)
    if matrix.shape != (len(classes), len(classes)):
        raise DataError(f"{path}: confusion shape {matrix.shape} does not "
                        f"match {len(classes)} classes")
    return classes, matrix


def render_report(report: EvalReport) -> str:
    """Human-readable report: key-value lines plus the confusion CSV block."""
    lines = [
        f"n: {report.n}",
        f"accuracy: {report.accuracy:.6f}",
        f"macro_f1: {report.macro_f1:.6f}",
        f"weighted_f1: {report.weighted_f1:.6f}",
        "per_class:",
    ]
    for cs in report.per_class:
        lines.append(f"  {cs.label}: precision={cs.precision:.6f} "
                     f"recall={cs.recall:.6f} f1={cs.f1:.6f}")
    lines.append("confusion_csv:")
    lines.append(",".join(report.classes))
    for row in report.confusion:
        lines.append(",".join(str(int(x)) for x in row))
    return "\n".join(lines) + "\n"


def write_report(report: EvalReport, path) -> None:
    Path(path).write_text(render_report(report), encoding="utf-8")
