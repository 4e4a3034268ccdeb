"""Lung-ultrasound texture classification with the dual-tree complex wavelet transform."""

from .evaluation import (ConfusionMatrix, FoldError, SweepCurve, loo_cv, loso_cv, report,
                         sweep_feature_count)
from .imaging import RoiRect, load_image, normalize_size, remove_artifacts, save_pgm
from .lda import LdaModel, PooledLDA, lda_predict, lda_train
from .pipeline import (DtcwtFeatureExtractor, FeatureConfig, FeatureTable, build_dataset,
                       extract_features, feature_names)
from .selection import Chi2TopK, chi2_rank
from .wavelets.dtcwt import dtcwt_forward, dtcwt_inverse, magnitude_subimages

__version__ = "0.1.0"

__all__ = [
    "ConfusionMatrix", "FoldError", "SweepCurve", "loo_cv", "loso_cv", "report",
    "sweep_feature_count", "RoiRect", "load_image", "normalize_size", "remove_artifacts",
    "save_pgm", "LdaModel", "PooledLDA", "lda_predict", "lda_train", "DtcwtFeatureExtractor",
    "FeatureConfig", "FeatureTable", "build_dataset", "extract_features", "feature_names",
    "Chi2TopK", "chi2_rank", "dtcwt_forward", "dtcwt_inverse", "magnitude_subimages",
]
