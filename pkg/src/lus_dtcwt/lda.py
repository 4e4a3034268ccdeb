"""Linear discriminant analysis with a pooled, ridge-stabilised covariance."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .validation import CLASSES, check_Xy

RIDGE = 1e-6
MODEL_FORMAT = "lus-dtcwt-lda"
MODEL_VERSION = 1


@dataclass(frozen=True)
class LdaModel:
    class_labels: tuple
    class_means: np.ndarray
    pooled_cov_inverse: np.ndarray
    log_priors: np.ndarray

    @property
    def n_features(self):
        return self.class_means.shape[1]

    def scores(self, X):
        """Linear discriminant ``x' S^-1 mu_c - mu_c' S^-1 mu_c / 2 + log pi_c``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {X.shape[1]}")
        if not np.all(np.isfinite(X)):
            raise ValueError("features must be finite")
        w = self.class_means @ self.pooled_cov_inverse
        bias = -0.5 * np.einsum("ij,ij->i", w, self.class_means) + self.log_priors
        return X @ w.T + bias

    def to_text(self) -> str:
        payload = {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "class_labels": list(self.class_labels),
            "log_priors": self.log_priors.tolist(),
            "class_means": self.class_means.tolist(),
            "pooled_cov_inverse": self.pooled_cov_inverse.tolist(),
        }
        return json.dumps(payload, indent=1) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LdaModel":
        payload = json.loads(text)
        if payload.get("format") != MODEL_FORMAT or payload.get("version") != MODEL_VERSION:
            raise ValueError("unsupported model file format or version")
        return cls(tuple(payload["class_labels"]), np.array(payload["class_means"]),
                   np.array(payload["pooled_cov_inverse"]), np.array(payload["log_priors"]))


def _class_order(labels):
    present = set(labels)
    known = [c for c in CLASSES if c in present]
    # labels outside the canonical six (e.g. toy problems) sort after them
    return tuple(known + sorted(present - set(known), key=str))


def lda_train(X, y, priors="equal", ridge: float = RIDGE) -> LdaModel:
    """Fit class means, the pooled within-class covariance and log-priors.

    The pooled covariance divides by ``n - C``; ``ridge * trace / d`` is
    added to its diagonal before inversion.
    """
    X, y = check_Xy(X, y)
    labels = _class_order(y)
    if len(labels) < 2:
        raise ValueError("LDA needs at least two classes")
    n, d = X.shape
    means, counts = [], []
    scatter = np.zeros((d, d))
    for c in labels:
        Xc = X[y == c]
        if len(Xc) < 2:
            raise ValueError(f"class {c!r} has fewer than 2 samples")
        mu = Xc.mean(axis=0)
        dev = Xc - mu
        scatter += dev.T @ dev
        means.append(mu)
        counts.append(len(Xc))
    cov = scatter / (n - len(labels))
    trace = np.trace(cov)
    if trace <= 0:
        raise ValueError("pooled covariance has zero trace (all rows identical within classes)")
    cov = cov + ridge * trace / d * np.eye(d)
    cov_inv = np.linalg.inv(cov)
    cov_inv = 0.5 * (cov_inv + cov_inv.T)
    counts = np.asarray(counts, dtype=float)
    if priors == "equal":
        pri = np.full(len(labels), 1.0 / len(labels))
    elif priors == "proportional":
        pri = counts / counts.sum()
    else:
        raise ValueError(f"priors must be 'equal' or 'proportional', got {priors!r}")
    return LdaModel(labels, np.vstack(means), cov_inv, np.log(pri))


def lda_predict(model: LdaModel, x):
    """Label and per-class scores for one sample; ties go to the earlier class."""
    scores = model.scores(np.asarray(x, dtype=float).reshape(1, -1))[0]
    return model.class_labels[int(np.argmax(scores))], scores


class PooledLDA(ClassifierMixin, BaseEstimator):
    """scikit-learn classifier wrapping :func:`lda_train`.

    Parameters
    ----------
    priors : {"equal", "proportional"}, default="equal"
    ridge : float, default=1e-6
        Trace-relative diagonal loading of the pooled covariance.
    """

    def __init__(self, priors="equal", ridge=RIDGE):
        self.priors = priors
        self.ridge = ridge

    def fit(self, X, y):
        self.model_ = lda_train(X, y, self.priors, self.ridge)
        self.classes_ = np.asarray(self.model_.class_labels, dtype=object)
        self.n_features_in_ = self.model_.n_features
        return self

    def decision_function(self, X):
        check_is_fitted(self, "model_")
        return self.model_.scores(X)

    def predict(self, X):
        return self.classes_[np.argmax(self.decision_function(X), axis=1)]
