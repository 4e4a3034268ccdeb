"""Column filtering primitives shared by the DWT and DTCWT.

Every routine filters along axis 0. Boundaries use half-sample symmetric
extension (edge samples repeated), computed by index reflection so that
filters longer than the signal still see the periodic-symmetric extension.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=256)
def reflect_indices(n: int, pad: int) -> np.ndarray:
    """Indices into a length-``n`` axis for symmetric extension by ``pad``."""
    p = np.arange(-pad, n + pad) % (2 * n)
    idx = np.where(p >= n, 2 * n - 1 - p, p)
    idx.setflags(write=False)
    return idx


def _fold(xe: np.ndarray, n: int, pad: int) -> np.ndarray:
    """Adjoint of symmetric extension: sum extended samples back onto the axis."""
    out = np.zeros((n,) + xe.shape[1:], dtype=xe.dtype)
    np.add.at(out, reflect_indices(n, pad), xe)
    return out


def colfilter(x: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Undecimated filtering of the columns of ``x`` by an odd-length filter.

    Output sample ``n`` is centred on input sample ``n``.
    """
    m = len(h)
    if m % 2 != 1:
        raise ValueError("colfilter needs an odd-length filter")
    half = m // 2
    xe = x[reflect_indices(x.shape[0], half)]
    n = x.shape[0]
    y = np.zeros(x.shape, dtype=np.result_type(x, h))
    # convolution: y[n] = sum_i h[i] x[n + half - i]
    for i, c in enumerate(h):
        if c != 0.0:
            y += c * xe[m - 1 - i:m - 1 - i + n]
    return y


# Dual-tree decimation layout. The composite input interleaves the two
# trees on even and odd rows; both trees read a window of taps centred on
# their own group of four input rows, which keeps the operator equivariant
# under the symmetric extension and hence orthogonal for q-shift filters.
_PAD_EXTRA = 4


def coldfilt(x: np.ndarray, h_even: np.ndarray, h_odd: np.ndarray,
             odd_first: bool = False) -> np.ndarray:
    """Decimate-by-two column filtering of a dual-tree composite.

    ``h_even`` filters the tree stored on even rows and ``h_odd`` the tree on
    odd rows. Outputs are interleaved again; by default the even-row tree
    lands on even output rows. ``odd_first`` swaps the output slots.
    """
    r = x.shape[0]
    if r % 4 != 0:
        raise ValueError(f"coldfilt needs a row count divisible by 4, got {r}")
    m = len(h_even)
    if m % 2 != 0 or len(h_odd) != m:
        raise ValueError("coldfilt needs two even-length filters of equal length")
    pad = m + _PAD_EXTRA
    xe = x[reflect_indices(r, pad)]
    k = r // 4
    half = m // 2
    shape = (k,) + x.shape[1:]
    ye = np.zeros(shape, dtype=np.result_type(x, h_even))
    yo = np.zeros(shape, dtype=ye.dtype)
    for i in range(m):
        # even tree: rows 4k + 2*half - 2i ; odd tree: rows 4k + 2*half + 1 - 2i
        start = pad + 2 * half - 2 * i
        ye += h_even[i] * xe[start:start + 4 * k:4]
        yo += h_odd[i] * xe[start + 1:start + 1 + 4 * k:4]
    y = np.empty((2 * k,) + x.shape[1:], dtype=ye.dtype)
    first, second = (yo, ye) if odd_first else (ye, yo)
    y[0::2] = first
    y[1::2] = second
    return y


def colifilt(y: np.ndarray, h_even: np.ndarray, h_odd: np.ndarray,
             odd_first: bool = False) -> np.ndarray:
    """Exact adjoint of :func:`coldfilt` with the same filters.

    For orthonormal q-shift filters the decimating operator is orthogonal, so
    its adjoint is its inverse and this is the synthesis step.
    """
    rk = y.shape[0]
    if rk % 2 != 0:
        raise ValueError("colifilt needs an even row count")
    k = rk // 2
    r = 4 * k
    m = len(h_even)
    half = m // 2
    pad = m + _PAD_EXTRA
    if odd_first:
        yo, ye = y[0::2], y[1::2]
    else:
        ye, yo = y[0::2], y[1::2]
    xe = np.zeros((r + 2 * pad,) + y.shape[1:], dtype=np.result_type(y, h_even))
    for i in range(m):
        start = pad + 2 * half - 2 * i
        xe[start:start + 4 * k:4] += h_even[i] * ye
        xe[start + 1:start + 1 + 4 * k:4] += h_odd[i] * yo
    return _fold(xe, r, pad)
