"""Per-image feature vectors and manifest-driven dataset construction."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import texture
from .imaging import (RoiRect, load_image, normalize_size, remove_artifacts, save_pgm,
                      split_halves)
from .validation import CLASSES
from .wavelets.dtcwt import BAND_NAMES, dtcwt_forward, magnitude_subimages

FAMILIES = ("stat", "glcm", "glrlm", "lbp")
HALVES = ("top", "bot")
CLINICAL_COLUMNS = ("ga_weeks", "cgats_weeks", "dol_days")
MANIFEST_COLUMNS = ("image_path", "subject_id", "video_id", "label") + CLINICAL_COLUMNS
ROI_COLUMNS = ("roi_top", "roi_left", "roi_bottom", "roi_right")


class ManifestError(ValueError):
    """One or more manifest rows could not be turned into samples."""

    def __init__(self, problems):
        self.problems = list(problems)
        lines = [f"row {row}: {msg}" for row, msg in self.problems]
        super().__init__("manifest has invalid rows:\n  " + "\n  ".join(lines))


@dataclass(frozen=True)
class FeatureConfig:
    levels: int = 1
    include_lowpass: bool = True
    families: tuple = FAMILIES
    entropy: str = "histogram"

    def __post_init__(self):
        if int(self.levels) != self.levels or self.levels < 1:
            raise ValueError(f"levels must be a positive integer, got {self.levels!r}")
        unknown = set(self.families) - set(FAMILIES)
        if unknown or not self.families:
            raise ValueError(f"families must be a non-empty subset of {FAMILIES}")
        if self.entropy not in ("histogram", "pixelwise"):
            raise ValueError(f"unknown entropy mode {self.entropy!r}")
        # canonical order so equal configs name features identically
        object.__setattr__(self, "families", tuple(f for f in FAMILIES if f in self.families))

    @property
    def bands(self):
        return (("lp",) if self.include_lowpass else ()) + BAND_NAMES


def _family_names(family):
    if family == "stat":
        return [f"stat_{n}" for n in texture.STAT_NAMES]
    if family == "glcm":
        return [f"glcm{dr}{dc}_{n}" for dr, dc in texture.GLCM_OFFSETS
                for n in texture.GLCM_NAMES]
    if family == "glrlm":
        return [f"glrlm{d:03d}_{n}" for d in texture.GLRLM_DIRECTIONS
                for n in texture.GLRLM_NAMES]
    return [f"lbp_bin{b}" for b in range(texture.LBP_BINS)]


@lru_cache(maxsize=32)
def feature_names(config: FeatureConfig = FeatureConfig()) -> tuple:
    """Ordered names ``L{level}_{band}_{half}_{family}_{feature}``."""
    per_region = [n for fam in config.families for n in _family_names(fam)]
    return tuple(
        f"L{level}_{band}_{half}_{name}"
        for level in range(1, config.levels + 1)
        for band in config.bands
        for half in HALVES
        for name in per_region
    )


def region_features(region, config: FeatureConfig) -> np.ndarray:
    """All enabled feature families for one half-subimage."""
    parts = []
    if "stat" in config.families:
        parts.append(texture.stat_features(region, entropy=config.entropy))
    q = None
    if "glcm" in config.families or "glrlm" in config.families:
        q = texture.quantize8(region)
    if "glcm" in config.families:
        parts.extend(texture.glcm_features(texture.glcm_compute(q, off))
                     for off in texture.GLCM_OFFSETS)
    if "glrlm" in config.families:
        parts.extend(texture.glrlm_features(texture.glrlm_compute(q, d))
                     for d in texture.GLRLM_DIRECTIONS)
    if "lbp" in config.families:
        parts.append(texture.lbp_riu2_histogram(region).astype(float))
    return np.concatenate(parts)


@dataclass(frozen=True)
class FeatureVector:
    names: tuple
    values: np.ndarray


def extract_features(img, config: FeatureConfig = FeatureConfig(), dump_dir=None) -> FeatureVector:
    """DTCWT texture features of one preprocessed image.

    For every level and every magnitude subimage (lowpass optional), the
    subimage is split into top and bottom halves and each half contributes
    the enabled feature families. ``dump_dir``, when given, receives the
    subimages as PGM files.
    """
    pyr = dtcwt_forward(img, config.levels)
    if dump_dir is not None:
        Path(dump_dir).mkdir(parents=True, exist_ok=True)
    values = []
    for level in range(1, config.levels + 1):
        subimages = dict(zip(("lp",) + BAND_NAMES, magnitude_subimages(pyr, level)))
        for band in config.bands:
            sub = subimages[band]
            if dump_dir is not None:
                save_pgm(sub, Path(dump_dir) / f"L{level}_{band}.pgm")
            for half in split_halves(sub):
                values.append(region_features(half, config))
    vec = np.concatenate(values)
    if not np.all(np.isfinite(vec)):
        raise FloatingPointError("feature extraction produced non-finite values")
    return FeatureVector(names=feature_names(config), values=vec)


@dataclass(frozen=True)
class ClinicalFeatures:
    ga: float
    cgats: float
    dol: float

    def __post_init__(self):
        for name in ("ga", "cgats", "dol"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"clinical feature {name} must be finite and >= 0, got {v}")

    def as_array(self):
        return np.array([self.ga, self.cgats, self.dol], dtype=float)


@dataclass(frozen=True)
class SampleRecord:
    features: FeatureVector
    clinical: ClinicalFeatures
    label: str
    subject_id: str
    video_id: str = ""


@dataclass
class FeatureTable:
    """Feature matrix with per-row clinical values and identifiers.

    ``X`` holds the image-derived features (the chi-square candidates);
    ``clinical`` the three clinical columns, always kept apart from ``X``.
    """

    feature_names: tuple
    X: np.ndarray
    clinical: np.ndarray
    labels: np.ndarray
    subject_ids: np.ndarray
    video_ids: np.ndarray = field(default=None)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        n = self.X.shape[0]
        self.clinical = np.asarray(self.clinical, dtype=float).reshape(n, len(CLINICAL_COLUMNS))
        self.labels = np.asarray(self.labels, dtype=object)
        self.subject_ids = np.asarray(self.subject_ids, dtype=object)
        if self.video_ids is None:
            self.video_ids = np.array([""] * n, dtype=object)
        self.video_ids = np.asarray(self.video_ids, dtype=object)
        if self.X.shape[1] != len(self.feature_names):
            raise ValueError("feature_names length does not match X columns")
        for arr in (self.labels, self.subject_ids, self.video_ids):
            if len(arr) != n:
                raise ValueError("all per-row arrays must have the same length")
        bad = sorted(set(self.labels) - set(CLASSES))
        if bad:
            raise ValueError(f"unknown labels {bad}; expected {CLASSES}")
        if any(not str(s) for s in self.subject_ids):
            raise ValueError("subject_id must be non-empty")

    def __len__(self):
        return self.X.shape[0]

    @property
    def classes(self):
        """Present labels in canonical class order."""
        present = set(self.labels)
        return tuple(c for c in CLASSES if c in present)

    @classmethod
    def from_records(cls, records):
        records = list(records)
        if not records:
            raise ValueError("no records")
        names = records[0].features.names
        if any(r.features.names != names for r in records):
            raise ValueError("records do not share one feature ordering")
        return cls(
            feature_names=names,
            X=np.vstack([r.features.values for r in records]),
            clinical=np.vstack([r.clinical.as_array() for r in records]),
            labels=[r.label for r in records],
            subject_ids=[r.subject_id for r in records],
            video_ids=[r.video_id for r in records],
        )

    def records(self):
        for i in range(len(self)):
            yield SampleRecord(
                features=FeatureVector(self.feature_names, self.X[i]),
                clinical=ClinicalFeatures(*self.clinical[i]),
                label=self.labels[i], subject_id=self.subject_ids[i],
                video_id=self.video_ids[i])

    def subset(self, rows):
        rows = np.asarray(rows)
        return FeatureTable(self.feature_names, self.X[rows], self.clinical[rows],
                            self.labels[rows], self.subject_ids[rows], self.video_ids[rows])


@dataclass(frozen=True)
class ManifestRow:
    row: int
    image_path: Path
    subject_id: str
    video_id: str
    label: str
    clinical: ClinicalFeatures
    roi: RoiRect | None


def read_manifest(path) -> list:
    """Parse and validate every manifest row; raise listing all bad rows."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"manifest not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in MANIFEST_COLUMNS if c not in header]
        if missing:
            raise ManifestError([(1, f"missing columns {missing}")])
        rows, problems = [], []
        for line, raw in enumerate(reader, start=2):
            try:
                rows.append(_parse_row(line, raw, path.parent))
            except (ValueError, TypeError) as exc:
                problems.append((line, str(exc)))
    if problems:
        raise ManifestError(problems)
    if not rows:
        raise ValueError("no records")
    return rows


def _parse_row(line, raw, base):
    label = (raw.get("label") or "").strip()
    if label not in CLASSES:
        raise ValueError(f"unknown label {label!r}")
    subject = (raw.get("subject_id") or "").strip()
    if not subject:
        raise ValueError("empty subject_id")
    clinical = ClinicalFeatures(*(float(raw[c]) for c in CLINICAL_COLUMNS))
    roi_vals = [(raw.get(c) or "").strip() for c in ROI_COLUMNS]
    if all(roi_vals):
        roi = RoiRect(*(int(v) for v in roi_vals))
    elif any(roi_vals):
        raise ValueError("roi columns must be all present or all empty")
    else:
        roi = None
    image_path = Path(raw["image_path"].strip())
    if not image_path.is_absolute():
        image_path = base / image_path
    return ManifestRow(line, image_path, subject, (raw.get("video_id") or "").strip(),
                       label, clinical, roi)


def preprocess(img, roi=None):
    """Artifact removal (when an ROI is given) followed by size normalisation."""
    if roi is not None:
        img = remove_artifacts(img, roi)
    return normalize_size(img)


def _process_row(row: ManifestRow, config: FeatureConfig, dump_dir=None):
    if dump_dir is not None:
        dump_dir = Path(dump_dir) / f"row{row.row:05d}_{row.image_path.stem}"
    try:
        img = load_image(row.image_path)
        feats = extract_features(preprocess(img, row.roi), config, dump_dir)
    except (OSError, ValueError, FloatingPointError) as exc:
        return row.row, str(exc)
    return row.row, SampleRecord(feats, row.clinical, row.label, row.subject_id, row.video_id)


def build_dataset(manifest, config: FeatureConfig = FeatureConfig(), n_jobs: int = 1,
                  dump_dir=None) -> FeatureTable:
    """Load, preprocess and featurise every manifest row, preserving order.

    ``dump_dir`` receives one folder of PGM subimages per row.
    """
    rows = read_manifest(manifest)
    args = ([config] * len(rows), [dump_dir] * len(rows))
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(_process_row, rows, *args, chunksize=8))
    else:
        results = list(map(_process_row, rows, *args))
    problems = [(line, res) for line, res in results if isinstance(res, str)]
    if problems:
        raise ManifestError(problems)
    return FeatureTable.from_records(res for _, res in results)


def write_feature_csv(table: FeatureTable, path) -> None:
    """Header: feature names, clinical columns, label, subject_id."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(table.feature_names) + list(CLINICAL_COLUMNS)
                        + ["label", "subject_id"])
        for i in range(len(table)):
            writer.writerow([repr(float(v)) for v in table.X[i]]
                            + [repr(float(v)) for v in table.clinical[i]]
                            + [table.labels[i], table.subject_ids[i]])


def read_feature_csv(path) -> FeatureTable:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        tail = list(CLINICAL_COLUMNS) + ["label", "subject_id"]
        if header is None or header[-len(tail):] != tail:
            raise ValueError(f"{path}: not a feature CSV (expected trailing columns {tail})")
        rows = list(reader)
    if not rows:
        raise ValueError("no records")
    nf = len(header) - len(tail)
    data = np.array([[float(v) for v in r[:nf + 3]] for r in rows])
    return FeatureTable(tuple(header[:nf]), data[:, :nf], data[:, nf:],
                        [r[-2] for r in rows], [r[-1] for r in rows])


class DtcwtFeatureExtractor(TransformerMixin, BaseEstimator):
    """Transformer from preprocessed images to DTCWT texture features.

    Parameters
    ----------
    levels : int, default=1
        DTCWT decomposition depth; features are taken at every level.
    include_lowpass : bool, default=True
        Whether the smoothed lowpass image contributes features.
    families : tuple of str, default=("stat", "glcm", "glrlm", "lbp")
        Feature families to compute per half-subimage.
    entropy : {"histogram", "pixelwise"}, default="histogram"
        Entropy flavour of the statistical family.
    """

    def __init__(self, levels=1, include_lowpass=True, families=FAMILIES, entropy="histogram"):
        self.levels = levels
        self.include_lowpass = include_lowpass
        self.families = families
        self.entropy = entropy

    def _config(self):
        return FeatureConfig(self.levels, self.include_lowpass, tuple(self.families), self.entropy)

    def fit(self, X, y=None):
        self.config_ = self._config()
        self.n_features_out_ = len(feature_names(self.config_))
        return self

    def transform(self, X):
        check_is_fitted(self, "config_")
        return np.vstack([extract_features(img, self.config_).values for img in X])

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "config_")
        return np.asarray(feature_names(self.config_), dtype=object)
