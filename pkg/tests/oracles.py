"""Independent brute-force reference implementations used by the tests.

Everything here is deliberately written with plain Python loops and no
shared code with the package, so disagreements point at real bugs.
"""


def oracle_auc_judd(sal, truth):
    """Exhaustive threshold sweep + trapezoid, loops only."""
    flat = [(float(v), int(t)) for row_v, row_t in zip(sal, truth) for v, t in zip(row_v, row_t)]
    p = sum(t for _, t in flat)
    n = len(flat) - p
    assert p > 0 and n > 0
    thresholds = sorted({v for v, t in flat if t == 1}, reverse=True)
    points = [(0.0, 0.0)]
    for tau in thresholds:
        tp = sum(1 for v, t in flat if t == 1 and v >= tau)
        fp = sum(1 for v, t in flat if t == 0 and v >= tau)
        pt = (fp / n, tp / p)
        if pt != points[-1]:
            points.append(pt)
    if points[-1] != (1.0, 1.0):
        points.append((1.0, 1.0))
    area = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return area


def oracle_pr_points(sal, truth):
    """Cumulative counts over descending unique values, loops only."""
    flat = [(float(v), int(t)) for row_v, row_t in zip(sal, truth) for v, t in zip(row_v, row_t)]
    p = sum(t for _, t in flat)
    assert p > 0
    points = []
    tp = 0
    pp = 0
    for tau in sorted({v for v, _ in flat}, reverse=True):
        block = [t for v, t in flat if v == tau]
        pp += len(block)
        tp += sum(block)
        points.append((tp / p, tp / pp))
    return points


def oracle_auprc(sal, truth):
    flat = [(float(v), int(t)) for row_v, row_t in zip(sal, truth) for v, t in zip(row_v, row_t)]
    p = sum(t for _, t in flat)
    assert p > 0
    area = 0.0
    tp = 0
    pp = 0
    prev_tp = 0
    for tau in sorted({v for v, _ in flat}, reverse=True):
        block = [t for v, t in flat if v == tau]
        pp += len(block)
        tp += sum(block)
        area += ((tp - prev_tp) / p) * (tp / pp)
        prev_tp = tp
    return area


def oracle_union_count(masks):
    """Number of pixels set in at least one input mask."""
    h = len(masks[0])
    w = len(masks[0][0])
    count = 0
    for r in range(h):
        for c in range(w):
            if any(m[r][c] for m in masks):
                count += 1
    return count


def oracle_srgb_to_lab(r8, g8, b8):
    """Scalar sRGB (D65) -> CIELAB for a single pixel."""

    def lin(u):
        u /= 255.0
        return u / 12.92 if u <= 0.04045 else ((u + 0.055) / 1.055) ** 2.4

    rl, gl, bl = lin(r8), lin(g8), lin(b8)
    x = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl
    y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl
    z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl

    def f(t):
        return t ** (1.0 / 3.0) if t > (6.0 / 29.0) ** 3 else t / (3 * (6.0 / 29.0) ** 2) + 4.0 / 29.0

    fx, fy, fz = f(x / 0.95047), f(y / 1.0), f(z / 1.08883)
    return 116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)


def oracle_global_equalized_bins(bins_flat):
    """Global (single-tile, unclipped) equalization of 256-bin values."""
    hist = [0] * 256
    for b in bins_flat:
        hist[int(b)] += 1
    total = len(bins_flat)
    cum = 0
    lut = []
    for h in hist:
        cum += h
        lut.append(round(255.0 * cum / total))
    return [lut[int(b)] for b in bins_flat]


def oracle_fill_holes(mask):
    """Set every 0-region that cannot reach the border 4-connectedly."""
    h = len(mask)
    w = len(mask[0])
    reach = [[False] * w for _ in range(h)]
    stack = []
    for r in range(h):
        for c in range(w):
            if (r in (0, h - 1) or c in (0, w - 1)) and mask[r][c] == 0:
                reach[r][c] = True
                stack.append((r, c))
    while stack:
        r, c = stack.pop()
        for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            rr, cc = r + dr, c + dc
            if 0 <= rr < h and 0 <= cc < w and mask[rr][cc] == 0 and not reach[rr][cc]:
                reach[rr][cc] = True
                stack.append((rr, cc))
    return [[1 if (mask[r][c] or not reach[r][c]) else 0 for c in range(w)] for r in range(h)]


def oracle_dilate(mask, kernel):
    """Square-element dilation with outside-image pixels treated as 0."""
    h = len(mask)
    w = len(mask[0])
    k = kernel // 2
    out = [[0] * w for _ in range(h)]
    for r in range(h):
        for c in range(w):
            hit = False
            for rr in range(r - k, r + k + 1):
                for cc in range(c - k, c + k + 1):
                    if 0 <= rr < h and 0 <= cc < w and mask[rr][cc]:
                        hit = True
            out[r][c] = 1 if hit else 0
    return out


def oracle_erode(mask, kernel):
    """Square-element erosion with outside-image pixels treated as 0."""
    h = len(mask)
    w = len(mask[0])
    k = kernel // 2
    out = [[0] * w for _ in range(h)]
    for r in range(h):
        for c in range(w):
            ok = True
            for rr in range(r - k, r + k + 1):
                for cc in range(c - k, c + k + 1):
                    if not (0 <= rr < h and 0 <= cc < w and mask[rr][cc]):
                        ok = False
            out[r][c] = 1 if ok else 0
    return out
