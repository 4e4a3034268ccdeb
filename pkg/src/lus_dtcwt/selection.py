"""Univariate chi-square feature ranking."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc
from sklearn.base import BaseEstimator
from sklearn.feature_selection import SelectorMixin
from sklearn.utils.validation import check_is_fitted

from .validation import check_Xy

N_BINS = 10


@dataclass(frozen=True)
class FeatureRanking:
    """``order`` lists feature indices from most to least class-dependent."""

    order: np.ndarray
    p_values: np.ndarray
    statistics: np.ndarray


def chi2_pvalue(stat, dof):
    """Upper tail of the chi-square distribution, Q(dof/2, stat/2).

    ``dof == 0`` yields 1.
    """
    stat = np.asarray(stat, dtype=float)
    dof = np.asarray(dof, dtype=float)
    p = np.ones(np.broadcast(stat, dof).shape)
    ok = np.broadcast_to(dof > 0, p.shape)
    p[ok] = gammaincc(np.broadcast_to(dof, p.shape)[ok] / 2.0,
                      np.broadcast_to(stat, p.shape)[ok] / 2.0)
    return p


def bin_features(X, n_bins=N_BINS):
    """Equal-width bin index per value over each column's observed range.

    Constant columns map entirely to bin 0.
    """
    lo = X.min(axis=0)
    span = X.max(axis=0) - lo
    safe = np.where(span > 0, span, 1.0)
    bins = np.floor((X - lo) / safe * n_bins).astype(np.int64)
    return np.clip(bins, 0, n_bins - 1)


def chi2_statistics(X, y, n_bins=N_BINS):
    """Pearson chi-square statistic and degrees of freedom per column.

    Each column is binned, cross-tabulated against ``y``, and
    dof = (non-empty bins - 1) * (classes - 1).
    """
    X, y = check_Xy(X, y)
    classes, y_idx = np.unique(y, return_inverse=True)
    n_classes = len(classes)
    if n_classes < 2:
        raise ValueError("chi-square ranking needs at least two classes")
    n, d = X.shape
    bins = bin_features(X, n_bins)
    cell = (np.arange(d)[None, :] * n_bins + bins) * n_classes + y_idx[:, None]
    table = np.bincount(cell.ravel(), minlength=d * n_bins * n_classes)
    table = table.reshape(d, n_bins, n_classes).astype(float)
    bin_tot = table.sum(axis=2, keepdims=True)
    class_tot = table.sum(axis=1, keepdims=True)
    expected = bin_tot * class_tot / n
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(expected > 0, (table - expected) ** 2 / expected, 0.0)
    stat = terms.sum(axis=(1, 2))
    nonempty = (bin_tot[:, :, 0] > 0).sum(axis=1)
    dof = (nonempty - 1) * (n_classes - 1)
    return stat, dof


def chi2_rank(X, y, n_bins=N_BINS) -> FeatureRanking:
    """Rank columns by ascending p-value, then descending statistic, then index."""
    stat, dof = chi2_statistics(X, y, n_bins)
    p = chi2_pvalue(stat, dof)
    if not np.any(dof > 0):
        raise ValueError("no feature takes at least two distinct values")
    order = np.lexsort((np.arange(len(p)), -stat, p))
    return FeatureRanking(order=order, p_values=p, statistics=stat)


class Chi2TopK(SelectorMixin, BaseEstimator):
    """Keep the ``k`` columns ranked highest by :func:`chi2_rank`.

    Parameters
    ----------
    k : int, default=15
    n_bins : int, default=10
    """

    def __init__(self, k=15, n_bins=N_BINS):
        self.k = k
        self.n_bins = n_bins

    def fit(self, X, y):
        X, y = check_Xy(X, y)
        if not 1 <= self.k <= X.shape[1]:
            raise ValueError(f"k must be in 1..{X.shape[1]}, got {self.k}")
        self.ranking_ = chi2_rank(X, y, self.n_bins)
        self.scores_ = self.ranking_.statistics
        self.pvalues_ = self.ranking_.p_values
        self.n_features_in_ = X.shape[1]
        return self

    def _get_support_mask(self):
        check_is_fitted(self, "ranking_")
        mask = np.zeros(self.n_features_in_, dtype=bool)
        mask[self.ranking_.order[:self.k]] = True
        return mask
