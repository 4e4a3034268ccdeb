"""Filter coefficients for the dual-tree complex wavelet transform.

Level 1 uses Kingsbury's near-symmetric 13/19-tap biorthogonal pair
("near_sym_b"). Both trees share the same odd-length filters; tree b is
tree a delayed by one sample, which the transform realises by keeping the
odd-phase samples of the undecimated level-1 output.

Levels >= 2 use Kingsbury's 14-tap quarter-sample-shift orthonormal filter
("qshift_b", N. G. Kingsbury, "Image processing with complex wavelets",
Phil. Trans. R. Soc. Lond. A 357, 1999). Tree b is the time reverse of tree a.

The near_sym_b coefficients are stored as exact rationals. The 19-tap
synthesis lowpass was solved symbolically from the 13-tap analysis lowpass
under the perfect-reconstruction constraints, with its two free parameters
matching the published values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _mirror(half):
    """Build an odd-length symmetric filter from its first half plus centre."""
    half = np.asarray(half, dtype=float)
    return np.concatenate([half, half[-2::-1]])


def _modulate(h):
    """Negate every other tap, counted from the centre of an odd-length filter."""
    h = np.asarray(h, dtype=float)
    centre = len(h) // 2
    sign = (-1.0) ** (np.arange(len(h)) - centre)
    return sign * h


NEAR_SYM_B_H0 = _mirror([
    -0.0017578125, 0.0, 0.022265625, -0.046875, -0.0482421875, 0.296875, 0.55546875,
])

NEAR_SYM_B_G0 = _mirror([
    81 / 1146880, 0.0, -1539 / 1146880, -27 / 14336, 513 / 71680,
    171 / 7168, -7977 / 143360, -741 / 14336, 171893 / 573440, 2005 / 3584,
])

NEAR_SYM_B_H1 = _modulate(NEAR_SYM_B_G0)
NEAR_SYM_B_G1 = _modulate(NEAR_SYM_B_H0)

# Kingsbury's H_L prototype; this is the tree-b lowpass.
QSHIFT_B_PROTOTYPE = np.array([
    0.0032531427636532, -0.0038832119991585, 0.0346603468448535,
    -0.0388728012688278, -0.1172038876991153, 0.2752953846688820,
    0.7561456438925225, 0.5688104207121227, 0.0118660920337970,
    -0.1067118046866654, 0.0238253847949203, 0.0170252238815540,
    -0.0054394759372741, -0.0045568956284755,
])


@dataclass(frozen=True)
class FilterBank:
    """Analysis and synthesis filters for both trees of the transform.

    Level-1 arrays are odd length and shared by the two trees; the
    ``level1_*_b`` properties expose tree b's effective one-sample-delayed
    filters. Q-shift arrays are even length with tree b the time reverse of
    tree a. Synthesis filters for the orthonormal q-shift pair are the time
    reverses of the analysis filters.
    """

    level1_lowpass_a: np.ndarray
    level1_highpass_a: np.ndarray
    level1_synthesis_lowpass: np.ndarray
    level1_synthesis_highpass: np.ndarray
    qshift_lowpass_a: np.ndarray
    qshift_highpass_a: np.ndarray

    @property
    def level1_lowpass_b(self):
        return np.concatenate([[0.0], self.level1_lowpass_a])

    @property
    def level1_highpass_b(self):
        return np.concatenate([[0.0], self.level1_highpass_a])

    @property
    def qshift_lowpass_b(self):
        return self.qshift_lowpass_a[::-1].copy()

    @property
    def qshift_highpass_b(self):
        return self.qshift_highpass_a[::-1].copy()


def default_filter_bank() -> FilterBank:
    h0b = QSHIFT_B_PROTOTYPE
    h1a = QSHIFT_B_PROTOTYPE.copy()
    h1a[0::2] *= -1
    return FilterBank(
        level1_lowpass_a=NEAR_SYM_B_H0.copy(),
        level1_highpass_a=NEAR_SYM_B_H1.copy(),
        level1_synthesis_lowpass=NEAR_SYM_B_G0.copy(),
        level1_synthesis_highpass=NEAR_SYM_B_G1.copy(),
        qshift_lowpass_a=h0b[::-1].copy(),
        qshift_highpass_a=h1a,
    )
