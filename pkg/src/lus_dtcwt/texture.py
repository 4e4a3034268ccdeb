"""Texture and first-order statistics of a single grayscale region.

Four families: intensity statistics, grey-level co-occurrence (GLCM),
grey-level run length (GLRLM) and rotation-invariant uniform LBP.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .validation import check_gray_image, check_quantized

N_LEVELS = 8
HISTOGRAM_BINS = 256

STAT_NAMES = ("mean", "sd", "skewness", "kurtosis", "entropy")
GLCM_OFFSETS = ((0, 1), (1, 0), (0, 2), (2, 0), (1, 1), (2, 2))
GLCM_NAMES = ("contrast", "correlation", "energy", "homogeneity", "entropy")
GLRLM_DIRECTIONS = (0, 45, 90, 135)
GLRLM_NAMES = ("lre", "sre", "gln", "rln", "rp", "lgre", "hgre",
               "srlge", "srhge", "lrlge", "lrhge")
LBP_BINS = 10

# east first, then anticlockwise
_LBP_NEIGHBOURS = ((0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1))


def _plogp_sum(p):
    p = p[p > 0]
    # + 0.0 turns -0.0 into 0.0
    return float(-(p * np.log2(p)).sum()) + 0.0


def stat_features(img, entropy: str = "histogram") -> np.ndarray:
    """Mean, population SD, skewness, excess kurtosis and entropy.

    ``entropy="histogram"`` uses the normalised 256-bin intensity histogram;
    ``entropy="pixelwise"`` sums ``-I log2 I`` over the pixels directly.
    Skewness and kurtosis are 0 when all pixels are equal or the spread is
    too small for their normalisation to be representable.
    """
    x = check_gray_image(img)
    mean = float(x.mean())
    dev = x - mean
    n = x.size
    sd = 0.0 if np.ptp(x) == 0 else float(np.sqrt((dev ** 2).sum() / n))
    # higher moments underflow for spreads below ~1e-77; report them as 0
    if sd ** 4 == 0.0:
        skew = kurt = 0.0
    else:
        skew = float((dev ** 3).sum() / (n * sd ** 3))
        kurt = float((dev ** 4).sum() / (n * sd ** 4) - 3.0)
    if entropy == "histogram":
        bins = np.minimum((x * HISTOGRAM_BINS).astype(int), HISTOGRAM_BINS - 1)
        counts = np.bincount(bins.ravel(), minlength=HISTOGRAM_BINS)
        ent = _plogp_sum(counts / x.size)
    elif entropy == "pixelwise":
        ent = _plogp_sum(x.ravel())
    else:
        raise ValueError(f"entropy must be 'histogram' or 'pixelwise', got {entropy!r}")
    return np.array([mean, sd, skew, kurt, ent])


def quantize8(img) -> np.ndarray:
    """Map [0, 1] intensities to levels 1..8 by eight equal-width bins."""
    x = check_gray_image(img)
    return np.minimum(np.floor(x * N_LEVELS).astype(np.int64) + 1, N_LEVELS)


@dataclass(frozen=True)
class Glcm:
    """Directed co-occurrence counts for one offset.

    ``level_mean`` and ``level_var`` are the mean and population variance of
    the quantized region the matrix came from; the correlation feature uses
    them.
    """

    matrix: np.ndarray
    offset: tuple
    level_mean: float
    level_var: float


def glcm_compute(q, offset) -> Glcm:
    """Count level pairs (q[r, c], q[r + dr, c + dc]) over all valid pixels."""
    q = check_quantized(q)
    dr, dc = offset
    if dr < 0 or dc < 0:
        raise ValueError(f"offsets must be non-negative, got {offset}")
    h, w = q.shape
    if dr >= h or dc >= w:
        raise ValueError(f"image of shape {q.shape} too small for offset {offset}")
    a = q[:h - dr, :w - dc] - 1
    b = q[dr:, dc:] - 1
    counts = np.bincount((a * N_LEVELS + b).ravel(), minlength=N_LEVELS ** 2)
    return Glcm(matrix=counts.reshape(N_LEVELS, N_LEVELS).astype(float),
                offset=(int(dr), int(dc)),
                level_mean=float(q.mean()), level_var=float(q.var()))


def glcm_features(g: Glcm) -> np.ndarray:
    """Contrast, correlation, energy, homogeneity and entropy of ``g``."""
    total = g.matrix.sum()
    if total <= 0:
        raise ValueError("GLCM has no counts")
    p = g.matrix / total
    i, j = np.indices(p.shape) + 1
    contrast = float(((i - j) ** 2 * p).sum())
    if g.level_var > 0:
        u = g.level_mean
        correlation = float(((i - u) * (j - u) * p).sum() / g.level_var)
    else:
        correlation = 0.0
    energy = float((p ** 2).sum())
    homogeneity = float((p / (1.0 + (i - j) ** 2)).sum())
    return np.array([contrast, correlation, energy, homogeneity, _plogp_sum(p)])


@dataclass(frozen=True)
class Glrlm:
    """Run counts ``matrix[level - 1, length - 1]`` along one direction."""

    matrix: np.ndarray
    direction: int
    n_pixels: int


@lru_cache(maxsize=64)
def _run_order(shape, direction):
    """Pixel order walking each collinear line, plus the line id per pixel."""
    h, w = shape
    r, c = np.indices(shape)
    if direction == 0:
        line, t = r, c
    elif direction == 90:
        line, t = c, r
    elif direction == 45:
        line, t = r + c, c
    elif direction == 135:
        line, t = c - r, r
    else:
        raise ValueError(f"direction must be one of {GLRLM_DIRECTIONS}, got {direction}")
    line, t = line.ravel(), t.ravel()
    order = np.lexsort((t, line))
    line_sorted = line[order]
    new_line = np.empty(order.size, dtype=bool)
    new_line[0] = True
    new_line[1:] = line_sorted[1:] != line_sorted[:-1]
    max_run = {0: w, 90: h}.get(direction, min(h, w))
    order.setflags(write=False)
    new_line.setflags(write=False)
    return order, new_line, max_run


def glrlm_compute(q, direction) -> Glrlm:
    """Count maximal equal-level runs along lines at ``direction`` degrees.

    45 degrees runs up and to the right, 135 degrees down and to the right.
    """
    q = check_quantized(q)
    order, new_line, max_run = _run_order(q.shape, int(direction))
    seq = q.ravel()[order]
    starts = new_line.copy()
    starts[1:] |= seq[1:] != seq[:-1]
    idx = np.flatnonzero(starts)
    lengths = np.diff(np.append(idx, seq.size))
    levels = seq[idx]
    counts = np.bincount((levels - 1) * max_run + (lengths - 1),
                         minlength=N_LEVELS * max_run)
    return Glrlm(matrix=counts.reshape(N_LEVELS, max_run).astype(float),
                 direction=int(direction), n_pixels=int(q.size))


def glrlm_features(r: Glrlm) -> np.ndarray:
    """The eleven run-length features, in :data:`GLRLM_NAMES` order."""
    R = r.matrix
    total = R.sum()
    if total <= 0:
        raise ValueError("GLRLM has no runs")
    i, j = np.indices(R.shape) + 1.0
    i2, j2 = i ** 2, j ** 2

    def ratio(weights):
        return float((weights * R).sum() / total)

    return np.array([
        ratio(j2),
        ratio(1.0 / j2),
        float((R.sum(axis=1) ** 2).sum() / total),
        float((R.sum(axis=0) ** 2).sum() / total),
        float(total / r.n_pixels),
        ratio(1.0 / i2),
        ratio(i2),
        ratio(1.0 / (i2 * j2)),
        ratio(i2 / j2),
        ratio(j2 / i2),
        ratio(i2 * j2),
    ])


def lbp_riu2_histogram(img) -> np.ndarray:
    """10-bin rotation-invariant uniform LBP histogram over interior pixels.

    A neighbour at least as bright as the centre codes 1. Patterns with at
    most two circular transitions go to the bin equal to their number of
    ones (0..8); all others go to bin 9.
    """
    x = check_gray_image(img, min_shape=(3, 3))
    h, w = x.shape
    centre = x[1:-1, 1:-1]
    bits = np.stack([x[1 + dr:h - 1 + dr, 1 + dc:w - 1 + dc] >= centre
                     for dr, dc in _LBP_NEIGHBOURS]).astype(np.int8)
    transitions = np.abs(bits - np.roll(bits, -1, axis=0)).sum(axis=0)
    codes = np.where(transitions <= 2, bits.sum(axis=0), LBP_BINS - 1)
    return np.bincount(codes.ravel(), minlength=LBP_BINS)
