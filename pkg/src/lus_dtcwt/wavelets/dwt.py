"""Separable 2-D discrete wavelet transform (Haar), the shift-variant baseline.

The Haar pair is both orthonormal and symmetric, so half-sample symmetric
extension (needed only to pad odd sizes) keeps the transform orthogonal on
even-sized inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HAAR_LOWPASS = np.array([1.0, 1.0]) / np.sqrt(2.0)
HAAR_HIGHPASS = np.array([1.0, -1.0]) / np.sqrt(2.0)


@dataclass(frozen=True)
class DwtPyramid:
    """Approximation image plus per-level (Dh, Dv, Dd) detail images.

    ``Dh`` is lowpass down the rows and highpass along the columns, ``Dv``
    the converse, ``Dd`` highpass in both directions. ``details[0]`` is the
    finest level. ``shapes`` records the input shape of every level so the
    inverse can undo odd-size padding.
    """

    approx: np.ndarray
    details: tuple
    shapes: tuple

    @property
    def levels(self) -> int:
        return len(self.details)


def _analysis(x, axis):
    x = np.moveaxis(x, axis, 0)
    if x.shape[0] % 2:
        x = np.concatenate([x, x[-1:]])
    even, odd = x[0::2], x[1::2]
    lo = HAAR_LOWPASS[0] * even + HAAR_LOWPASS[1] * odd
    hi = HAAR_HIGHPASS[0] * even + HAAR_HIGHPASS[1] * odd
    return np.moveaxis(lo, 0, axis), np.moveaxis(hi, 0, axis)


def _synthesis(lo, hi, axis, n):
    lo = np.moveaxis(lo, axis, 0)
    hi = np.moveaxis(hi, axis, 0)
    x = np.empty((2 * lo.shape[0],) + lo.shape[1:])
    x[0::2] = HAAR_LOWPASS[0] * lo + HAAR_HIGHPASS[0] * hi
    x[1::2] = HAAR_LOWPASS[1] * lo + HAAR_HIGHPASS[1] * hi
    return np.moveaxis(x[:n], 0, axis)


def dwt2_forward(img, levels: int = 1) -> DwtPyramid:
    x = np.asarray(img, dtype=float)
    if x.ndim != 2:
        raise ValueError(f"expected a 2-D image, got shape {x.shape}")
    if int(levels) != levels or levels < 1:
        raise ValueError(f"levels must be a positive integer, got {levels!r}")
    if min(x.shape) < 2 ** levels:
        raise ValueError(
            f"image of shape {x.shape} is too small for {levels} levels")
    details, shapes = [], []
    for _ in range(levels):
        shapes.append(x.shape)
        row_lo, row_hi = _analysis(x, axis=0)
        approx, dh = _analysis(row_lo, axis=1)
        dv, dd = _analysis(row_hi, axis=1)
        details.append((dh, dv, dd))
        x = approx
    return DwtPyramid(approx=x, details=tuple(details), shapes=tuple(shapes))


def dwt2_inverse(pyr: DwtPyramid) -> np.ndarray:
    x = pyr.approx
    for (dh, dv, dd), (rows, cols) in zip(reversed(pyr.details), reversed(pyr.shapes)):
        row_lo = _synthesis(x, dh, axis=1, n=cols)
        row_hi = _synthesis(dv, dd, axis=1, n=cols)
        x = _synthesis(row_lo, row_hi, axis=0, n=rows)
    return x
