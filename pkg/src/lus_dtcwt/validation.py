"""Input validation helpers shared across the package."""

from __future__ import annotations

import numpy as np

CLASSES = ("Normal", "CLD", "CON", "PTX", "RDS", "TTN")


def check_gray_image(img, min_shape=(1, 1)) -> np.ndarray:
    """Return ``img`` as a float array after checking the grayscale contract.

    The image must be 2-D, at least ``min_shape``, finite, and every
    intensity must lie in [0, 1].
    """
    x = np.asarray(img, dtype=float)
    if x.ndim != 2:
        raise ValueError(f"expected a 2-D grayscale image, got shape {x.shape}")
    if x.shape[0] < min_shape[0] or x.shape[1] < min_shape[1]:
        raise ValueError(f"image of shape {x.shape} is smaller than {min_shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("image contains non-finite intensities")
    if x.min() < 0.0 or x.max() > 1.0:
        raise ValueError(
            f"intensities must lie in [0, 1], got range [{x.min()}, {x.max()}]")
    return x


def check_quantized(q, levels: int = 8) -> np.ndarray:
    q = np.asarray(q)
    if q.ndim != 2 or q.size == 0:
        raise ValueError(f"expected a non-empty 2-D level image, got shape {q.shape}")
    if not np.issubdtype(q.dtype, np.integer):
        raise ValueError("quantized image must have an integer dtype")
    if q.min() < 1 or q.max() > levels:
        raise ValueError(f"levels must lie in 1..{levels}")
    return q


def check_labels(y) -> np.ndarray:
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError("labels must be one-dimensional")
    return y


def check_Xy(X, y):
    """Validate a finite 2-D feature matrix and matching 1-D labels."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D feature matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("feature matrix contains NaN or infinite values")
    y = check_labels(y)
    if len(y) != X.shape[0]:
        raise ValueError(f"{X.shape[0]} samples but {len(y)} labels")
    return X, y
