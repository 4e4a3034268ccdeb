"""Seeded synthetic lung-ultrasound-like images and feature tables.

Each class is a pattern recipe loosely modelled on sonographic signs:
horizontal reverberation lines, vertical streaks, a bright pleural band
and blotchy consolidation. They exist to exercise the pipeline, not to
simulate clinical images.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter

from .imaging import save_pgm
from .pipeline import CLINICAL_COLUMNS, MANIFEST_COLUMNS, ROI_COLUMNS, FeatureTable
from .validation import CLASSES

# (ga weeks, cgats weeks, dol days) ranges per class; CLD infants are older
CLINICAL_RANGES = {
    "Normal": ((34, 40), (36, 42), (1, 14)),
    "CLD": ((24, 30), (36, 44), (40, 120)),
    "CON": ((30, 40), (32, 42), (2, 30)),
    "PTX": ((30, 40), (31, 41), (1, 10)),
    "RDS": ((26, 34), (26, 35), (0, 5)),
    "TTN": ((35, 41), (35, 41), (0, 3)),
}

# marker artifact and the ROI declared around it, at generator resolution
_MARKER = (6, 6, 20, 40)
_ROI = (2, 2, 28, 50)


@dataclass(frozen=True)
class SynthSpec:
    """Dataset shape and seed for :func:`generate_dataset`."""

    subjects_per_class: int = 4
    images_per_subject: int = 30
    seed: int = 0
    noise_level: float = 0.08
    shape: tuple = (260, 210)
    classes: tuple = CLASSES

    def __post_init__(self):
        if self.subjects_per_class < 1 or self.images_per_subject < 1:
            raise ValueError("subject and image counts must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.noise_level < 0:
            raise ValueError("noise_level must be >= 0")
        unknown = set(self.classes) - set(CLASSES)
        if unknown:
            raise ValueError(f"no recipe for classes {sorted(unknown)}")
        if self.shape[0] < 64 or self.shape[1] < 64:
            raise ValueError("synthetic images must be at least 64x64")


def _rng(seed, *key):
    return np.random.default_rng([seed, *key])


def _subject_params(rng):
    return {
        "pleura": rng.uniform(0.22, 0.30),
        "gain": rng.uniform(0.85, 1.1),
        "spacing": rng.uniform(0.9, 1.1),
        "phase": rng.uniform(0, 1),
    }


def _hline(h, w, row, width, amp):
    r = np.arange(h)[:, None]
    return np.broadcast_to(amp * np.exp(-0.5 * ((r - row) / width) ** 2), (h, w))


def _vstreaks(h, w, rng, n, top, amp, width=2.5):
    out = np.zeros((h, w))
    c = np.arange(w)[None, :]
    r = np.arange(h)[:, None]
    fade = np.clip((r - top) / 6.0, 0, 1) * np.exp(-(r - top).clip(0) / (3.0 * h))
    for x in rng.uniform(0.08 * w, 0.92 * w, size=n):
        out += amp * np.exp(-0.5 * ((c - x) / width) ** 2) * fade
    return out


def _blotches(h, w, rng, top, amp, sigma):
    field = gaussian_filter(rng.standard_normal((h, w)), sigma)
    field = np.clip(field / (field.std() + 1e-12), 0, None)
    r = np.arange(h)[:, None]
    return amp * field * (r > top)


def _pattern(label, h, w, sp, rng):
    pleura = sp["pleura"] * h
    img = _hline(h, w, pleura, 2.0, 0.55).copy()
    gap = pleura * sp["spacing"]
    if label == "Normal":
        for k in (1, 2, 3):
            img += _hline(h, w, pleura + k * gap, 2.0, 0.35 / k)
    elif label == "PTX":
        img = _hline(h, w, pleura, 1.5, 0.7).copy()
        for k in (1, 2, 3):
            img += _hline(h, w, pleura + k * 0.6 * gap, 1.2, 0.5 / np.sqrt(k))
    elif label == "RDS":
        img += _vstreaks(h, w, rng, int(rng.integers(14, 20)), pleura, 0.22)
    elif label == "TTN":
        img += _hline(h, w, pleura + gap, 2.0, 0.3)
        low = _vstreaks(h, w, rng, int(rng.integers(5, 8)), pleura + 1.6 * gap, 0.35)
        img += low
    elif label == "CLD":
        img = _hline(h, w, pleura, 5.0, 0.45).copy()
        img += _vstreaks(h, w, rng, int(rng.integers(3, 6)), pleura, 0.3, width=4.0)
        img += _blotches(h, w, rng, pleura, 0.12, 6.0)
    elif label == "CON":
        img += _blotches(h, w, rng, pleura, 0.3, 3.0)
    else:
        raise ValueError(f"no recipe for class {label!r}")
    return img


def synth_image(label, spec: SynthSpec, subject_params, rng) -> np.ndarray:
    """One image of class ``label`` in [0, 1]."""
    h, w = spec.shape
    img = _pattern(label, h, w, subject_params, rng) * subject_params["gain"]
    # multiplicative speckle plus additive noise
    speckle = gaussian_filter(rng.rayleigh(1.0, (h, w)), 0.8) / 1.2533
    img = 0.06 + img * speckle + spec.noise_level * np.abs(rng.standard_normal((h, w)))
    t, l, b, r = _MARKER
    img[t:b, l:r] = 1.0
    return np.clip(img, 0.0, 1.0)


def generate_dataset(spec: SynthSpec, out_dir) -> Path:
    """Write PGM images and ``manifest.csv`` into ``out_dir``; return the manifest path."""
    out = Path(out_dir)
    (out / "images").mkdir(parents=True, exist_ok=True)
    manifest = out / "manifest.csv"
    rows = []
    for ci, label in enumerate(spec.classes):
        for s in range(spec.subjects_per_class):
            subject = f"{label}_S{s + 1:02d}"
            srng = _rng(spec.seed, ci, s)
            params = _subject_params(srng)
            clin = [round(float(srng.uniform(lo, hi)), 2) for lo, hi in CLINICAL_RANGES[label]]
            for i in range(spec.images_per_subject):
                img = synth_image(label, spec, params, _rng(spec.seed, ci, s, i + 1))
                rel = Path("images") / f"{subject}_{i + 1:03d}.pgm"
                save_pgm(img, out / rel)
                rows.append([rel.as_posix(), subject, f"{subject}_V{i % 3 + 1}", label,
                             *clin, *_ROI])
    with open(manifest, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(MANIFEST_COLUMNS) + list(ROI_COLUMNS))
        w.writerows(rows)
    return manifest


def gaussian_table(n_per_class=20, n_features=30, n_informative=5, separation=8.0,
                   subjects_per_class=4, subject_shift=0.0, seed=0) -> FeatureTable:
    """Feature-level toy data: spread Gaussian class means in a few columns.

    ``subject_shift`` adds a per-subject offset to the informative columns.
    """
    rng = _rng(seed, 1000)
    classes = list(CLASSES)
    d = n_features
    centres = rng.standard_normal((len(classes), n_informative))
    centres *= separation / np.sqrt(n_informative)
    X, clinical, labels, subjects = [], [], [], []
    for ci, label in enumerate(classes):
        for i in range(n_per_class):
            s = i % subjects_per_class
            srng = _rng(seed, 2000, ci, s)
            offset = subject_shift * srng.standard_normal(n_informative)
            row = rng.standard_normal(d)
            row[:n_informative] += centres[ci] + offset
            X.append(row)
            clinical.append([srng.uniform(lo, hi) for lo, hi in CLINICAL_RANGES[label]])
            labels.append(label)
            subjects.append(f"{label}_S{s + 1:02d}")
    names = tuple(f"f{j}" for j in range(d))
    return FeatureTable(names, np.array(X), np.array(clinical), labels, subjects)


__all__ = ["SynthSpec", "synth_image", "generate_dataset", "gaussian_table",
           "CLINICAL_RANGES", "CLINICAL_COLUMNS"]
