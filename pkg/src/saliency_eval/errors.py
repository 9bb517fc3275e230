"""Exception types shared across the toolkit."""


class SaliencyEvalError(Exception):
    """Base class for all toolkit errors."""


class InvalidRaster(SaliencyEvalError):
    """A grid input is empty, non-finite, or otherwise malformed."""


class InvalidInput(SaliencyEvalError):
    """A non-raster argument violates its contract (e.g. empty list)."""


class ShapeMismatch(SaliencyEvalError):
    """Two rasters that must share a shape do not."""

    def __init__(self, shape_a, shape_b, context=""):
        self.shape_a = tuple(shape_a)
        self.shape_b = tuple(shape_b)
        msg = f"shape mismatch: {self.shape_a} vs {self.shape_b}"
        if context:
            msg = f"{context}: {msg}"
        super().__init__(msg)


class BoxOutOfBounds(SaliencyEvalError):
    """A bounding box does not fit inside its image."""

    def __init__(self, box, width, height):
        self.box = box
        self.width = width
        self.height = height
        super().__init__(
            f"box {box} does not fit in {height}x{width} image (rows must be "
            f"< {height}, cols < {width})"
        )


class EmptyMask(SaliencyEvalError):
    """A mask that must contain positives is all zeros."""


class DegenerateMask(SaliencyEvalError):
    """Ground truth is all-positive or all-negative, so the metric is undefined."""


class InvalidRange(SaliencyEvalError):
    """Channel bounds are inverted."""


class InvalidKernel(SaliencyEvalError):
    """Morphology kernel size is not an odd positive integer."""


class ImageTooSmall(SaliencyEvalError):
    """Image has fewer pixels than the requested tile grid."""


class UnknownCategory(SaliencyEvalError):
    """Annotation category is not one of the known cell types."""

    def __init__(self, category):
        self.category = category
        super().__init__(f"unknown annotation category: {category!r}")


class ParseError(SaliencyEvalError):
    """An annotation or manifest document is malformed."""


class EmptyGroundTruth(SaliencyEvalError):
    """An image has no usable ground-truth regions for the requested source."""


class FormatError(SaliencyEvalError):
    """A raster file has the wrong channel count or bit depth."""


class InsufficientSources(SaliencyEvalError):
    """A cross-source comparison needs at least two mask sources."""
