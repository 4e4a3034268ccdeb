"""Two-dimensional dual-tree complex wavelet transform.

The image is processed as a composite in which the four real separable
trees (tree a/b along columns times tree a/b along rows) are interleaved
on the even/odd rows and columns. Each 2x2 quad of a detail composite holds
one coefficient from each tree; :func:`_q2c` turns quads into the two
complex coefficients of opposite orientation.

Orientation labels give the direction of the wave vector measured
anticlockwise from the image x axis (columns increase to the right, rows
increase downwards, so "up" is decreasing row). A horizontal line therefore
lands in the +-75 degree bands and a vertical line in the +-15 degree bands.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._lowlevel import coldfilt, colfilter, colifilt
from .filters import FilterBank, default_filter_bank

ORIENTATIONS = (15, 45, 75, -75, -45, -15)
BAND_NAMES = ("p15", "p45", "p75", "m75", "m45", "m15")

_SQRT_HALF = np.sqrt(0.5)

# tree assignment at levels >= 2: False puts the tree-a q-shift filter on the
# even composite rows, which carry tree a from level 1
_ODD_ROWS_TREE_A = False


@dataclass(frozen=True)
class DtcwtPyramid:
    """Result of :func:`dtcwt_forward`.

    Attributes
    ----------
    lowpass : ndarray
        Composite lowpass after the deepest level, twice the size of the
        deepest detail subbands.
    highpasses : tuple of ndarray
        One complex array of shape ``(6, h, w)`` per level, subbands in
        :data:`ORIENTATIONS` order.
    scales : tuple of ndarray
        Composite lowpass after each level (``scales[-1] is lowpass``).
    input_shape : tuple of int
        Shape of the transformed image.
    """

    lowpass: np.ndarray
    highpasses: tuple
    scales: tuple
    input_shape: tuple

    @property
    def levels(self) -> int:
        return len(self.highpasses)

    def lowpass_image(self, level: int) -> np.ndarray:
        """Smoothed image at ``level``: the four tree lowpasses averaged.

        Same shape as that level's detail subbands.
        """
        _check_level(self, level)
        comp = self.scales[level - 1]
        return 0.25 * (comp[0::2, 0::2] + comp[0::2, 1::2]
                       + comp[1::2, 0::2] + comp[1::2, 1::2])


def _check_level(pyr, level):
    if not 1 <= level <= pyr.levels:
        raise ValueError(f"level must be in 1..{pyr.levels}, got {level}")


def _q2c(y):
    """Split a real detail composite into two complex subbands.

    Quad corners a (even, even), b (even, odd), c (odd, even), d (odd, odd)
    give p = (a + jb)/sqrt2 and q = (d - jc)/sqrt2; returns (p - q, p + q).
    """
    p = (y[0::2, 0::2] + 1j * y[0::2, 1::2]) * _SQRT_HALF
    q = (y[1::2, 1::2] - 1j * y[1::2, 0::2]) * _SQRT_HALF
    return p - q, p + q


def _c2q(w1, w2):
    """Inverse of :func:`_q2c`."""
    p = (w1 + w2) * _SQRT_HALF
    q = (w2 - w1) * _SQRT_HALF
    x = np.empty((2 * w1.shape[0], 2 * w1.shape[1]))
    x[0::2, 0::2] = p.real
    x[0::2, 1::2] = p.imag
    x[1::2, 0::2] = -q.imag
    x[1::2, 1::2] = q.real
    return x


def _qfilters(bank, highpass):
    ha = bank.qshift_highpass_a if highpass else bank.qshift_lowpass_a
    hb = bank.qshift_highpass_b if highpass else bank.qshift_lowpass_b
    # (even-row filter, odd-row filter)
    return (hb, ha) if _ODD_ROWS_TREE_A else (ha, hb)


def _pack(lh, hl, hh):
    """Assemble the six subbands in ORIENTATIONS order.

    ``lh``: column highpass / row lowpass (horizontal structure, +-75 deg);
    ``hl``: column lowpass / row highpass (vertical structure, +-15 deg);
    ``hh``: both highpass (+-45 deg).
    """
    h1, h2 = _q2c(lh)
    v1, v2 = _q2c(hl)
    d1, d2 = _q2c(hh)
    return np.stack([v1, d2, h1, h2, d1, v2])


def _unpack(bands):
    v1, d2, h1, h2, d1, v2 = bands
    return _c2q(h1, h2), _c2q(v1, v2), _c2q(d1, d2)


def _check_image(img, levels):
    x = np.asarray(img, dtype=float)
    if x.ndim != 2:
        raise ValueError(f"expected a 2-D image, got shape {x.shape}")
    if int(levels) != levels or levels < 1:
        raise ValueError(f"levels must be a positive integer, got {levels!r}")
    if min(x.shape) < 2 ** levels:
        raise ValueError(
            f"image of shape {x.shape} is too small for {levels} levels "
            f"(needs at least {2 ** levels} pixels per side)")
    return x


def dtcwt_forward(img, levels: int = 1, bank: FilterBank | None = None) -> DtcwtPyramid:
    """Forward 2-D DTCWT of ``img`` to ``levels`` levels.

    Odd dimensions are extended by repeating the last row/column, and
    composites whose size is not a multiple of four before a q-shift level
    are extended by one repeated row/column on each side, so subband sizes
    are ceil(n / 2) per level.
    """
    x = _check_image(img, levels)
    bank = bank or default_filter_bank()
    input_shape = x.shape
    if x.shape[0] % 2:
        x = np.vstack([x, x[-1:]])
    if x.shape[1] % 2:
        x = np.hstack([x, x[:, -1:]])

    h0o, h1o = bank.level1_lowpass_a, bank.level1_highpass_a
    lo = colfilter(x, h0o)
    hi = colfilter(x, h1o)
    lolo = colfilter(lo.T, h0o).T
    highpasses = [_pack(colfilter(hi.T, h0o).T, colfilter(lo.T, h1o).T,
                        colfilter(hi.T, h1o).T)]
    scales = [lolo]

    h0 = _qfilters(bank, highpass=False)
    h1 = _qfilters(bank, highpass=True)
    for _ in range(1, levels):
        if lolo.shape[0] % 4:
            lolo = np.vstack([lolo[:1], lolo, lolo[-1:]])
        if lolo.shape[1] % 4:
            lolo = np.hstack([lolo[:, :1], lolo, lolo[:, -1:]])
        lo = coldfilt(lolo, *h0)
        hi = coldfilt(lolo, *h1)
        lolo = coldfilt(lo.T, *h0).T
        highpasses.append(_pack(coldfilt(hi.T, *h0).T, coldfilt(lo.T, *h1).T,
                                coldfilt(hi.T, *h1).T))
        scales.append(lolo)

    return DtcwtPyramid(lowpass=lolo, highpasses=tuple(highpasses),
                        scales=tuple(scales), input_shape=tuple(input_shape))


def _validate_pyramid(pyr):
    if not isinstance(pyr, DtcwtPyramid) or pyr.levels < 1:
        raise ValueError("expected a DtcwtPyramid with at least one level")
    for j, bands in enumerate(pyr.highpasses, start=1):
        if bands.ndim != 3 or bands.shape[0] != 6:
            raise ValueError(f"level {j} must hold 6 subbands, got shape {bands.shape}")
    deepest = pyr.highpasses[-1].shape[1:]
    if pyr.lowpass.shape != (2 * deepest[0], 2 * deepest[1]):
        raise ValueError(
            f"lowpass shape {pyr.lowpass.shape} does not match deepest subbands {deepest}")


def dtcwt_inverse(pyr: DtcwtPyramid, bank: FilterBank | None = None) -> np.ndarray:
    """Reconstruct the image from a pyramid made by :func:`dtcwt_forward`."""
    _validate_pyramid(pyr)
    bank = bank or default_filter_bank()
    g0 = _qfilters(bank, highpass=False)
    g1 = _qfilters(bank, highpass=True)

    z = pyr.lowpass
    for level in range(pyr.levels, 1, -1):
        lh, hl, hh = _unpack(pyr.highpasses[level - 1])
        y1 = colifilt(z, *g0) + colifilt(lh, *g1)
        y2 = colifilt(hl, *g0) + colifilt(hh, *g1)
        z = colifilt(y1.T, *g0).T + colifilt(y2.T, *g1).T
        target = pyr.highpasses[level - 2].shape[1:]
        if z.shape[0] != 2 * target[0]:
            z = z[1:-1]
        if z.shape[1] != 2 * target[1]:
            z = z[:, 1:-1]

    g0o, g1o = bank.level1_synthesis_lowpass, bank.level1_synthesis_highpass
    lh, hl, hh = _unpack(pyr.highpasses[0])
    y1 = colfilter(z, g0o) + colfilter(lh, g1o)
    y2 = colfilter(hl, g0o) + colfilter(hh, g1o)
    z = colfilter(y1.T, g0o).T + colfilter(y2.T, g1o).T
    rows, cols = pyr.input_shape
    return z[:rows, :cols]


def magnitude_subimages(pyr: DtcwtPyramid, level: int) -> list:
    """Seven [0, 1] images for ``level``: lowpass then the six |subbands|.

    Each image is rescaled by its own min/max. Images whose peak-to-peak
    range is at rounding-noise level relative to the lowpass map to zeros.
    """
    _check_level(pyr, level)
    low = pyr.lowpass_image(level)
    atol = 1e-10 * max(1.0, float(np.abs(low).max()))
    images = [low] + [np.abs(b) for b in pyr.highpasses[level - 1]]
    return [_rescale(im, atol) for im in images]


def _rescale(im, atol):
    lo, hi = float(im.min()), float(im.max())
    if hi - lo <= atol:
        return np.zeros(im.shape)
    return np.clip((im - lo) / (hi - lo), 0.0, 1.0)
