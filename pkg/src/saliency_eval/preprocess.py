"""Image-enhancement pipeline stages.

Covers color-range masking with morphological refinement, adaptive
histogram equalization on the CIELAB L channel, linear contrast, and
weighted blending. RGB images are HxWx3 uint8 arrays; Lab images are
HxWx3 float64 arrays with L in [0, 100].
"""

import numpy as np
from scipy import ndimage

from .core import as_mask
from .errors import (
    ImageTooSmall,
    InvalidInput,
    InvalidKernel,
    InvalidRange,
    ShapeMismatch,
)

# sRGB <-> CIEXYZ (D65 white point)
_RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_XYZ_TO_RGB = np.linalg.inv(_RGB_TO_XYZ)
_WHITE = np.array([0.95047, 1.0, 1.08883])
_DELTA = 6.0 / 29.0

_N_BINS = 256


def _as_rgb(img):
    arr = np.asarray(img)
    if arr.ndim != 3 or arr.shape[2] != 3 or arr.size == 0:
        raise InvalidInput(f"expected HxWx3 RGB image, got shape {arr.shape}")
    return arr.astype(np.uint8)


def rgb_to_lab(img):
    """Convert an 8-bit sRGB image to CIELAB (D65)."""
    rgb = _as_rgb(img).astype(np.float64) / 255.0
    lin = np.where(rgb <= 0.04045, rgb / 12.92, ((rgb + 0.055) / 1.055) ** 2.4)
    xyz = lin @ _RGB_TO_XYZ.T
    t = xyz / _WHITE
    f = np.where(t > _DELTA**3, np.cbrt(t), t / (3 * _DELTA**2) + 4.0 / 29.0)
    lab = np.empty_like(xyz)
    lab[..., 0] = np.clip(116.0 * f[..., 1] - 16.0, 0.0, 100.0)
    lab[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return lab


def lab_to_rgb(lab):
    """Convert CIELAB back to 8-bit sRGB, clamping to [0, 255]."""
    lab = np.asarray(lab, dtype=np.float64)
    fy = (lab[..., 0] + 16.0) / 116.0
    f = np.stack([fy + lab[..., 1] / 500.0, fy, fy - lab[..., 2] / 200.0], axis=-1)
    t = np.where(f > _DELTA, f**3, 3 * _DELTA**2 * (f - 4.0 / 29.0))
    xyz = t * _WHITE
    lin = xyz @ _XYZ_TO_RGB.T
    rgb = np.where(
        lin <= 0.0031308, 12.92 * lin, 1.055 * np.maximum(lin, 0.0) ** (1.0 / 2.4) - 0.055
    )
    return np.clip(np.round(rgb * 255.0), 0, 255).astype(np.uint8)


def _tile_edges(extent, tiles):
    # edge tiles absorb the remainder
    base = extent // tiles
    edges = [i * base for i in range(tiles)]
    edges.append(extent)
    return edges


def _tile_mapping(bins, clip_limit):
    """Equalization lookup table for one tile's histogram of L bins."""
    hist = np.bincount(bins, minlength=_N_BINS).astype(np.float64)
    total = hist.sum()
    clip_at = clip_limit * total / _N_BINS
    excess = np.sum(np.maximum(hist - clip_at, 0.0))
    hist = np.minimum(hist, clip_at) + excess / _N_BINS
    cdf = np.cumsum(hist) / total
    return np.clip(np.round(255.0 * cdf), 0, 255)


def clahe_l(img, tiles_x=8, tiles_y=8, clip_limit=2.0):
    """Contrast-limited adaptive histogram equalization on the L channel.

    L is quantized to 256 bins over [0, 100]; per-tile histograms are
    clipped at clip_limit times the uniform level with the excess spread
    evenly, then each pixel's new L interpolates bilinearly between the
    four nearest tile mappings. a and b channels pass through unchanged.
    Conversion back to 8-bit sRGB clamps out-of-gamut results.
    """
    rgb = _as_rgb(img)
    lab = rgb_to_lab(rgb)
    out = lab.copy()
    out[..., 0] = clahe_l_bins(img, tiles_x, tiles_y, clip_limit) * 100.0 / 255.0
    return lab_to_rgb(out)


def clahe_l_bins(img, tiles_x=8, tiles_y=8, clip_limit=2.0):
    """Equalized L-channel bin values (0..255 floats) before RGB conversion."""
    rgb = _as_rgb(img)
    h, w = rgb.shape[:2]
    if tiles_x < 1 or tiles_y < 1:
        raise InvalidInput("tile counts must be >= 1")
    if clip_limit < 1.0:
        raise InvalidInput("clip_limit must be >= 1.0")
    if w < tiles_x or h < tiles_y:
        raise ImageTooSmall(f"{h}x{w} image cannot hold a {tiles_y}x{tiles_x} tile grid")

    lab = rgb_to_lab(rgb)
    bins = np.clip(np.round(lab[..., 0] * 255.0 / 100.0), 0, 255).astype(np.int64)

    row_edges = _tile_edges(h, tiles_y)
    col_edges = _tile_edges(w, tiles_x)
    maps = np.empty((tiles_y, tiles_x, _N_BINS))
    centers_r = np.empty(tiles_y)
    centers_c = np.empty(tiles_x)
    for ti in range(tiles_y):
        r0, r1 = row_edges[ti], row_edges[ti + 1]
        centers_r[ti] = (r0 + r1 - 1) / 2.0
        for tj in range(tiles_x):
            c0, c1 = col_edges[tj], col_edges[tj + 1]
            centers_c[tj] = (c0 + c1 - 1) / 2.0
            maps[ti, tj] = _tile_mapping(bins[r0:r1, c0:c1].ravel(), clip_limit)

    # bilinear weights between neighboring tile centers; pixels beyond the
    # outermost centers clamp to the edge tiles
    def _axis_interp(coords, centers):
        idx0 = np.clip(np.searchsorted(centers, coords) - 1, 0, len(centers) - 1)
        idx1 = np.clip(idx0 + 1, 0, len(centers) - 1)
        span = centers[idx1] - centers[idx0]
        frac = np.where(span > 0, (coords - centers[idx0]) / np.where(span > 0, span, 1.0), 0.0)
        return idx0, idx1, np.clip(frac, 0.0, 1.0)

    r0, r1, fr = _axis_interp(np.arange(h, dtype=np.float64), centers_r)
    c0, c1, fc = _axis_interp(np.arange(w, dtype=np.float64), centers_c)

    rr0 = r0[:, None]
    rr1 = r1[:, None]
    frr = fr[:, None]
    cc0 = c0[None, :]
    cc1 = c1[None, :]
    fcc = fc[None, :]

    m00 = maps[rr0, cc0, bins]
    m01 = maps[rr0, cc1, bins]
    m10 = maps[rr1, cc0, bins]
    m11 = maps[rr1, cc1, bins]
    top = m00 * (1.0 - fcc) + m01 * fcc
    bot = m10 * (1.0 - fcc) + m11 * fcc
    return top * (1.0 - frr) + bot * frr


def color_range_mask(img, lower, upper):
    """Binary mask of pixels whose channels all lie within [lower, upper]."""
    rgb = _as_rgb(img)
    lower = np.asarray(lower, dtype=np.int64)
    upper = np.asarray(upper, dtype=np.int64)
    if lower.shape != (3,) or upper.shape != (3,):
        raise InvalidInput("lower and upper must each have three channel bounds")
    if np.any(lower > upper):
        raise InvalidRange(f"inverted channel bounds: lower={lower.tolist()} upper={upper.tolist()}")
    inside = np.all((rgb >= lower) & (rgb <= upper), axis=2)
    return inside.astype(np.uint8)


def _square(kernel):
    if kernel < 1 or kernel % 2 == 0:
        raise InvalidKernel(f"kernel must be odd and >= 1, got {kernel}")
    return np.ones((kernel, kernel), dtype=bool)


def dilate(mask, kernel=3):
    """Binary dilation with a square structuring element; outside is 0."""
    return ndimage.binary_dilation(as_mask(mask).astype(bool), _square(kernel)).astype(np.uint8)


def erode(mask, kernel=3):
    """Binary erosion with a square structuring element; outside is 0."""
    return ndimage.binary_erosion(as_mask(mask).astype(bool), _square(kernel)).astype(np.uint8)


def morph_refine(mask, kernel=3, fill_holes=False):
    """Smooth a binary mask: closing, then opening, then optional hole fill.

    Uses a square structuring element; pixels outside the image count as
    background. Hole filling uses 4-connectivity for background
    reachability.
    """
    mask = as_mask(mask)
    _square(kernel)
    out = mask
    if kernel > 1:
        out = dilate(erode(erode(dilate(out, kernel), kernel), kernel), kernel)
    if fill_holes:
        out = ndimage.binary_fill_holes(out.astype(bool)).astype(np.uint8)
    return out


def linear_contrast(img, alpha=1.0, beta=0.0):
    """Per-channel affine remap: clamp(round(alpha * v + beta), 0, 255)."""
    rgb = _as_rgb(img)
    if alpha < 0:
        raise InvalidInput("alpha must be >= 0")
    return np.clip(np.round(alpha * rgb.astype(np.float64) + beta), 0, 255).astype(np.uint8)


def weighted_blend(original, enhanced, w):
    """Convex per-channel blend of two same-shape images."""
    a = _as_rgb(original)
    b = _as_rgb(enhanced)
    if a.shape != b.shape:
        raise ShapeMismatch(a.shape, b.shape, "weighted_blend")
    if not 0.0 <= w <= 1.0:
        raise InvalidInput(f"blend weight must be in [0, 1], got {w}")
    mixed = w * b.astype(np.float64) + (1.0 - w) * a.astype(np.float64)
    return np.clip(np.round(mixed), 0, 255).astype(np.uint8)
