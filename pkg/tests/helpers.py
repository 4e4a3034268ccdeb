import numpy as np

from lus_dtcwt.pipeline import FeatureTable
from lus_dtcwt.wavelets.dtcwt import dtcwt_forward
from lus_dtcwt.wavelets.dwt import dwt2_forward

ONE_PIXEL_SHIFTS = ((0, 1), (1, 0), (0, -1), (-1, 0))


def oriented_line(size=64, angle_deg=45.0, width=1.0, taper=12.0):
    """Gaussian-profile line through the image centre, faded towards the borders."""
    r, c = np.indices((size, size)) - (size - 1) / 2.0
    t = np.deg2rad(angle_deg)
    across = -r * np.cos(t) - c * np.sin(t)
    along = c * np.cos(t) - r * np.sin(t)
    return np.exp(-0.5 * (across / width) ** 2) * np.exp(-0.5 * (along / taper) ** 2)


def dtcwt_band_totals(img, level=2):
    return np.abs(dtcwt_forward(img, level).highpasses[level - 1]).sum(axis=(1, 2))


def dwt_band_energies(img, level=2):
    return np.array([(d ** 2).sum() for d in dwt2_forward(img, level).details[level - 1]])


def relative_change(base, shifted):
    return np.abs(shifted - base) / base


def random_table(rng, n_per_class=6, n_features=8, classes=("Normal", "CLD", "CON"),
                 subjects_per_class=2, spread=3.0):
    labels, subjects, X = [], [], []
    for ci, c in enumerate(classes):
        for i in range(n_per_class):
            labels.append(c)
            subjects.append(f"{c}_{i % subjects_per_class}")
            row = rng.standard_normal(n_features)
            row[0] += spread * ci
            X.append(row)
    clinical = rng.uniform(1, 40, size=(len(labels), 3))
    names = tuple(f"f{j}" for j in range(n_features))
    return FeatureTable(names, np.array(X), clinical, labels, subjects)
