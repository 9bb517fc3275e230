"""sklearn-style wrappers around the preprocessing stages.

All transformers are stateless: fit is a no-op that returns self, and
transform applies the wrapped operation to a single HxWx3 uint8 image.
Inheriting BaseEstimator provides get_params/set_params so the stages
compose with sklearn pipelines and grid search.
"""

from sklearn.base import BaseEstimator, TransformerMixin

from . import preprocess
from .core import normalize_saliency


class ClaheL(BaseEstimator, TransformerMixin):
    """Adaptive histogram equalization on the CIELAB L channel."""

    def __init__(self, tiles_x=8, tiles_y=8, clip_limit=2.0):
        self.tiles_x = tiles_x
        self.tiles_y = tiles_y
        self.clip_limit = clip_limit

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        return preprocess.clahe_l(X, self.tiles_x, self.tiles_y, self.clip_limit)


class ColorRangeMasker(BaseEstimator, TransformerMixin):
    """Binary mask of pixels inside an inclusive per-channel range,
    optionally refined with morphology."""

    def __init__(self, lower=(0, 0, 0), upper=(255, 255, 255), kernel=3,
                 fill_holes=False, refine=True):
        self.lower = lower
        self.upper = upper
        self.kernel = kernel
        self.fill_holes = fill_holes
        self.refine = refine

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        mask = preprocess.color_range_mask(X, self.lower, self.upper)
        if self.refine:
            mask = preprocess.morph_refine(mask, self.kernel, self.fill_holes)
        return mask


class LinearContrast(BaseEstimator, TransformerMixin):
    """Per-channel affine gain/bias with clamping."""

    def __init__(self, alpha=1.0, beta=0.0):
        self.alpha = alpha
        self.beta = beta

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        return preprocess.linear_contrast(X, self.alpha, self.beta)


class SaliencyNormalizer(BaseEstimator, TransformerMixin):
    """Min-max rescale raw saliency scores to [0, 1]."""

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        return normalize_saliency(X)
