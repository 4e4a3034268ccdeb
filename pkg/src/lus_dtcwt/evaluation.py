"""Leave-one-out and leave-one-subject-out evaluation with in-fold selection."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .lda import lda_train
from .pipeline import FeatureTable
from .selection import chi2_rank


class FoldError(RuntimeError):
    """A cross-validation fold cannot be trained (e.g. it lost a class)."""


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with rows = true class and columns = predicted class."""

    classes: tuple
    counts: np.ndarray

    @classmethod
    def from_predictions(cls, classes, y_true, y_pred):
        index = {c: i for i, c in enumerate(classes)}
        counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
        for t, p in zip(y_true, y_pred):
            counts[index[t], index[p]] += 1
        return cls(tuple(classes), counts)

    @property
    def total(self):
        return int(self.counts.sum())

    @property
    def accuracy(self):
        return float(np.trace(self.counts) / self.counts.sum())

    @property
    def row_percentages(self):
        rows = self.counts.sum(axis=1, keepdims=True)
        if np.any(rows == 0):
            raise ValueError("confusion matrix has a class with no samples")
        return 100.0 * self.counts / rows


@dataclass(frozen=True)
class CVResult:
    confusion: ConfusionMatrix
    accuracy: float
    predictions: np.ndarray

    def __iter__(self):
        return iter((self.confusion, self.accuracy))


@dataclass(frozen=True)
class SweepCurve:
    """Accuracy (percent) per number of selected image features."""

    points: tuple
    best_k: int
    best_accuracy: float

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["k", "accuracy"])
            for k, acc in self.points:
                w.writerow([k, f"{acc:.4f}"])


def loo_folds(table: FeatureTable):
    return [np.array([i]) for i in range(len(table))]


def loso_folds(table: FeatureTable):
    subjects = sorted(set(table.subject_ids), key=str)
    return [np.flatnonzero(table.subject_ids == s) for s in subjects]


def _check_loso(table):
    for c in table.classes:
        subjects = set(table.subject_ids[table.labels == c])
        if len(subjects) < 2:
            raise FoldError(
                f"class {c} is represented by a single subject; LOSO would drop it from a fold")


def _design(table, rows, columns):
    return np.hstack([table.X[np.ix_(rows, columns)], table.clinical[rows]])


def run_folds(table: FeatureTable, folds, ks, priors="equal"):
    """Predictions for every k, ranking features inside each training fold.

    Returns an object array of shape (len(ks), n_samples).
    """
    n = len(table)
    ks = [int(k) for k in ks]
    n_features = table.X.shape[1]
    if any(k < 1 or k > n_features for k in ks):
        raise ValueError(f"k must be in 1..{n_features}")
    classes = set(table.classes)
    if len(classes) < 2:
        raise ValueError("evaluation needs at least two classes")
    preds = np.empty((len(ks), n), dtype=object)
    seen = np.zeros(n, dtype=int)
    for fold_no, test in enumerate(folds):
        train = np.setdiff1d(np.arange(n), test)
        assert not np.isin(test, train).any()
        seen[test] += 1
        lost = classes - set(table.labels[train])
        if lost:
            raise FoldError(f"fold {fold_no} training set has no samples of {sorted(lost)}")
        y_train = table.labels[train]
        ranking = chi2_rank(table.X[train], y_train)
        for j, k in enumerate(ks):
            cols = ranking.order[:k]
            try:
                model = lda_train(_design(table, train, cols), y_train, priors)
            except ValueError as exc:
                raise FoldError(f"fold {fold_no}: {exc}") from exc
            scores = model.scores(_design(table, test, cols))
            preds[j, test] = np.asarray(model.class_labels, dtype=object)[scores.argmax(axis=1)]
    if not np.all(seen == 1):
        raise FoldError("folds must cover every row exactly once")
    return preds


def _result(table, preds):
    cm = ConfusionMatrix.from_predictions(table.classes, table.labels, preds)
    return CVResult(cm, cm.accuracy, preds)


def loo_cv(table: FeatureTable, k: int = 15, priors="equal") -> CVResult:
    """Leave-one-image-out evaluation with top-``k`` image features + clinical."""
    return _result(table, run_folds(table, loo_folds(table), [k], priors)[0])


def loso_cv(table: FeatureTable, k: int = 15, priors="equal") -> CVResult:
    """Leave-one-subject-out evaluation; accuracy is counted per image."""
    _check_loso(table)
    return _result(table, run_folds(table, loso_folds(table), [k], priors)[0])


def sweep_feature_count(table: FeatureTable, k_max: int, cv="loso", priors="equal") -> SweepCurve:
    """Accuracy for k = 1..k_max; reports the first k reaching the maximum."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    if cv == "loo":
        folds = loo_folds(table)
    elif cv == "loso":
        _check_loso(table)
        folds = loso_folds(table)
    else:
        raise ValueError(f"cv must be 'loo' or 'loso', got {cv!r}")
    ks = list(range(1, k_max + 1))
    preds = run_folds(table, folds, ks, priors)
    points = tuple((k, 100.0 * _result(table, p).accuracy) for k, p in zip(ks, preds))
    best = max(points, key=lambda kv: kv[1])
    return SweepCurve(points, best[0], best[1])


def format_table(cm: ConfusionMatrix) -> str:
    """Plain-text confusion matrix of row percentages, true classes down the side."""
    pct = cm.row_percentages
    width = max(8, max(len(c) for c in cm.classes) + 1)
    head = "True \\ Predicted".ljust(18) + "".join(c.rjust(width + 1) for c in cm.classes)
    lines = [head]
    for c, row in zip(cm.classes, pct):
        cells = "".join(f"{v:.2f}%".rjust(width + 1) for v in row)
        lines.append(c.ljust(18) + cells)
    lines.append("")
    lines.append(f"Overall accuracy: {100.0 * cm.accuracy:.2f}% ({np.trace(cm.counts)}/{cm.total})")
    return "\n".join(lines) + "\n"


def report(cm: ConfusionMatrix, path) -> str:
    """Write ``<path>.csv`` (counts and row percentages) and ``<path>.txt``."""
    path = Path(path)
    text = format_table(cm)
    pct = cm.row_percentages
    with open(path.with_suffix(".csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["true_class"] + [f"n_{c}" for c in cm.classes]
                   + [f"pct_{c}" for c in cm.classes])
        for c, counts, row in zip(cm.classes, cm.counts, pct):
            w.writerow([c] + [int(v) for v in counts] + [f"{v:.2f}" for v in row])
    path.with_suffix(".txt").write_text(text, encoding="utf-8")
    return text
