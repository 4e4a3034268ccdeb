"""Grayscale image I/O and the preprocessing chain.

Images are plain 2-D float arrays with intensities in [0, 1]; helpers in
:mod:`lus_dtcwt.validation` enforce that contract.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image
from scipy import ndimage
from skimage.transform import resize

from .validation import check_gray_image

RESIZE_SHAPE = (520, 420)
CROP_BORDER = 10
NORMALIZED_SHAPE = (RESIZE_SHAPE[0] - 2 * CROP_BORDER, RESIZE_SHAPE[1] - 2 * CROP_BORDER)


class ImageFormatError(ValueError):
    """Raised for unreadable, colour, or non-8-bit image files."""


@dataclass(frozen=True)
class RoiRect:
    """Inclusive pixel rectangle."""

    top: int
    left: int
    bottom: int
    right: int

    def validate(self, shape) -> None:
        h, w = shape
        if not (0 <= self.top <= self.bottom < h and 0 <= self.left <= self.right < w):
            raise ValueError(f"{self} does not fit inside an image of shape {shape}")

    @property
    def slices(self):
        return slice(self.top, self.bottom + 1), slice(self.left, self.right + 1)


def load_image(path) -> np.ndarray:
    """Read an 8-bit grayscale PNG or binary PGM and scale it to [0, 1]."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"image not found: {path}")
    try:
        with Image.open(path) as im:
            mode = im.mode
            fmt = im.format
            data = np.asarray(im)
    except (OSError, ValueError) as exc:
        raise ImageFormatError(f"cannot read image {path}: {exc}") from exc
    if fmt not in ("PNG", "PPM"):
        raise ImageFormatError(f"{path}: unsupported container {fmt}; use PNG or PGM")
    if mode != "L":
        raise ImageFormatError(
            f"{path}: expected 8-bit grayscale, got PIL mode {mode!r}")
    return data.astype(float) / 255.0


def save_pgm(img, path) -> None:
    """Write a [0, 1] image as binary PGM (P5), rounding to 8 bits."""
    x = check_gray_image(img)
    data = np.round(x * 255.0).astype(np.uint8)
    header = f"P5\n{x.shape[1]} {x.shape[0]}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data.tobytes())


def remove_artifacts(img, roi: RoiRect) -> np.ndarray:
    """Replace bright overlay pixels inside ``roi`` by the ROI median.

    Pixels strictly brighter than half the ROI maximum are selected together
    with their 8-connected neighbours (clipped to the ROI). Pixels outside the
    ROI are untouched.
    """
    x = check_gray_image(img)
    roi.validate(x.shape)
    region = x[roi.slices]
    peak = region.max()
    out = x.copy()
    if peak <= 0:
        return out
    selected = region > 0.5 * peak
    selected = ndimage.binary_dilation(selected, structure=np.ones((3, 3), dtype=bool))
    patch = region.copy()
    patch[selected] = np.median(region)
    out[roi.slices] = patch
    return out


def normalize_size(img) -> np.ndarray:
    """Bilinear resize to 520x420 (rows x cols), then crop 10 px per side."""
    x = check_gray_image(img)
    if min(x.shape) < 2:
        raise ValueError(f"image must be at least 2x2, got {x.shape}")
    if x.shape != RESIZE_SHAPE:
        x = resize(x, RESIZE_SHAPE, order=1, mode="edge", anti_aliasing=False,
                   preserve_range=True)
        x = np.clip(x, 0.0, 1.0)
    b = CROP_BORDER
    return x[b:-b, b:-b].copy()


def split_halves(img):
    """Split rows into a top half of floor(h/2) rows and the remaining bottom."""
    x = np.asarray(img)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError(f"need a 2-D image with at least 2 rows, got shape {x.shape}")
    mid = x.shape[0] // 2
    return x[:mid], x[mid:]
