"""Hand isolation from a skin mask.

Pipeline order: ``chamfer_dt`` -> ``feature_pixels`` -> ``select_hand`` ->
``wrist_cut`` -> ``recenter``; ``trace_contour`` and ``smooth_contour``
produce the smoothed outline of the result.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ContourError, DegenerateInputError, NoHandFoundError, OrientationError, PreconditionError, SizeError
from .imaging import connected_components, morphology

ORTHO = 3
DIAG = 4
_INF = np.iinfo(np.int64).max // 4


class FeaturePixel(NamedTuple):
    x: int
    y: int
    value: int


@dataclass(frozen=True)
class HandParams:
    feat_lo: int = 4
    feat_hi: int = 12
    erosion_radius: int = 0
    min_feature_count: int = 1
    cut_fraction: float = 0.75
    frame_size: int = 176
    fingers_up: bool = True

    def __post_init__(self):
        if self.feat_lo > self.feat_hi:
            raise PreconditionError("feat_lo must be <= feat_hi")
        if not 0 < self.cut_fraction <= 1:
            raise PreconditionError("cut_fraction must lie in (0, 1]")
        if self.erosion_radius < 0 or self.frame_size < 1:
            raise PreconditionError("erosion_radius must be >= 0 and frame_size >= 1")


def round_half_away(x):
    """Round half away from zero (the usual numeric-package ``round``)."""
    x = np.asarray(x, dtype=np.float64)
    out = np.sign(x) * np.floor(np.abs(x) + 0.5)
    return out if out.ndim else float(out)


def chamfer_dt(mask):
    """3-4 chamfer distance from each foreground pixel to the nearest background.

    One forward and one backward raster pass. Pixels outside the frame count
    as background, so the result is always finite. Each row's horizontal
    recurrence ``d[x] = min(c[x], d[x-1] + 3)`` is unrolled into a running
    minimum of ``c[j] - 3j``.
    """
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    d = np.where(np.pad(mask, 1), _INF, 0).astype(np.int64)
    ramp = ORTHO * np.arange(w + 2, dtype=np.int64)

    for y in range(1, h + 1):
        up = d[y - 1]
        c = d[y].copy()
        np.minimum(c[1:-1], up[1:-1] + ORTHO, out=c[1:-1])
        np.minimum(c[1:-1], up[:-2] + DIAG, out=c[1:-1])
        np.minimum(c[1:-1], up[2:] + DIAG, out=c[1:-1])
        d[y] = ramp + np.minimum.accumulate(c - ramp)

    rramp = ramp[::-1]
    for y in range(h, 0, -1):
        down = d[y + 1]
        c = d[y].copy()
        np.minimum(c[1:-1], down[1:-1] + ORTHO, out=c[1:-1])
        np.minimum(c[1:-1], down[:-2] + DIAG, out=c[1:-1])
        np.minimum(c[1:-1], down[2:] + DIAG, out=c[1:-1])
        d[y] = (rramp + np.minimum.accumulate((c - rramp)[::-1])[::-1])

    return d[1:-1, 1:-1]


def feature_mask(dt):
    """Foreground pixels whose distance is >= all eight neighbours.

    Out-of-frame neighbours never disqualify a pixel.
    """
    dt = np.asarray(dt)
    h, w = dt.shape
    padded = np.pad(dt.astype(np.int64), 1, constant_values=np.iinfo(np.int64).min)
    keep = dt > 0
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy or dx:
                keep &= dt >= padded[1 + dy:1 + dy + h, 1 + dx:1 + dx + w]
    return keep


def feature_pixels(dt):
    """Distance-based feature pixels, value in orthogonal steps (dist / 3, rounded)."""
    dt = np.asarray(dt)
    ys, xs = np.nonzero(feature_mask(dt))
    values = round_half_away(dt[ys, xs] / ORTHO).astype(int)
    return [FeaturePixel(int(x), int(y), int(v)) for x, y, v in zip(xs, ys, values)]


def in_interval(feats, p):
    return [f for f in feats if p.feat_lo <= f.value <= p.feat_hi]


def select_hand(mask, feats, p=HandParams()):
    """Pick the component carrying the most in-interval feature pixels.

    Ties go to the larger component, then to the one met first in raster
    order. With ``erosion_radius > 0`` the components are those of the eroded
    mask; the winner is grown back by the same radius inside the original.
    """
    mask = np.asarray(mask, dtype=bool)
    work = morphology(mask, "erode", p.erosion_radius) if p.erosion_radius > 0 else mask
    table = connected_components(work, 8)
    if table.count == 0:
        raise NoHandFoundError("mask has no foreground components")

    counts = np.zeros(table.count + 1, dtype=int)
    for f in in_interval(feats, p):
        counts[table.labels[f.y, f.x]] += 1
    counts = counts[1:]

    best = None
    for i in range(table.count):
        if counts[i] < p.min_feature_count:
            continue
        key = (counts[i], table.sizes[i])
        if best is None or key > best[0]:
            best = (key, i + 1)
    if best is None:
        raise NoHandFoundError(f"no component reaches {p.min_feature_count} feature pixels "
                               f"(best has {counts.max(initial=0)})")
    hand = table.labels == best[1]
    if p.erosion_radius > 0:
        hand = morphology(hand, "dilate", p.erosion_radius) & mask
    return hand


def centroid(mask):
    mask = np.asarray(mask, dtype=bool)
    ys, xs = np.nonzero(mask)
    if xs.size == 0:
        raise DegenerateInputError("centroid of an empty mask")
    return float(xs.mean()), float(ys.mean())


def cut_point(c, m, fraction):
    """Point on the wrist side of the centroid, opposite the finger mean."""
    cx, cy = c
    mx, my = m
    return (cx - round_half_away(fraction * (mx - cx)), cy - round_half_away(fraction * (my - cy)))


def wrist_cut(mask, p, feats):
    """Remove the forearm below the line perpendicular to centroid->finger axis.

    The finger mean M averages in-interval feature pixels on the finger side
    of the centroid C (above it when ``p.fingers_up``). Pixels with
    ``(q - P) . (M - C) < 0`` are dropped; pixels on the line are kept.
    """
    mask = np.asarray(mask, dtype=bool)
    cx, cy = centroid(mask)
    pts = [(f.x, f.y) for f in in_interval(feats, p) if mask[f.y, f.x]]
    if p.fingers_up:
        pts = [q for q in pts if q[1] < cy]
    else:
        pts = [q for q in pts if q[1] > cy]
    if not pts:
        raise OrientationError("no feature pixels on the finger side of the centroid")
    mx, my = np.mean(np.asarray(pts, dtype=np.float64), axis=0)
    ax, ay = mx - cx, my - cy
    if ax == 0 and ay == 0:
        raise OrientationError("finger mean coincides with the centroid")
    px, py = cut_point((cx, cy), (mx, my), p.cut_fraction)
    ys, xs = np.mgrid[:mask.shape[0], :mask.shape[1]]
    return mask & ((xs - px) * ax + (ys - py) * ay >= 0)


def recenter(mask, frame_size):
    """Translate the mask into a square frame with its centroid at the centre."""
    mask = np.asarray(mask, dtype=bool)
    cx, cy = centroid(mask)
    ys, xs = np.nonzero(mask)
    half = frame_size / 2
    sx = int(round_half_away(half - cx))
    sy = int(round_half_away(half - cy))
    nx, ny = xs + sx, ys + sy
    if (xs.max() - xs.min() >= frame_size or ys.max() - ys.min() >= frame_size
            or nx.min() < 0 or ny.min() < 0 or nx.max() >= frame_size or ny.max() >= frame_size):
        raise SizeError(f"hand of extent {np.ptp(xs) + 1}x{np.ptp(ys) + 1} does not fit a "
                        f"{frame_size}x{frame_size} frame once centred")
    out = np.zeros((frame_size, frame_size), dtype=bool)
    out[ny, nx] = True
    return out


# clockwise on screen (y down): E, SE, S, SW, W, NW, N, NE
_DIRS = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]


def trace_contour(mask):
    """Moore-neighbour trace of the outer boundary, clockwise from the first raster pixel.

    Returns an (n, 2) integer array of (x, y) points forming a closed loop
    (the last point is adjacent to the first and not repeated).
    """
    mask = np.asarray(mask, dtype=bool)
    ys, xs = np.nonzero(mask)
    if xs.size == 0:
        raise ContourError("cannot trace an empty mask")
    h, w = mask.shape
    start = (int(xs[0]), int(ys[0]))

    def fg(x, y):
        return 0 <= x < w and 0 <= y < h and mask[y, x]

    # entered the start pixel from the west (a guaranteed background neighbour)
    start_back = 4
    loop = [start]
    cur, back = start, start_back
    for _ in range(8 * mask.size + 8):
        for k in range(1, 9):
            d = (back + k) % 8
            nx, ny = cur[0] + _DIRS[d][0], cur[1] + _DIRS[d][1]
            if fg(nx, ny):
                prev = (back + k - 1) % 8
                px, py = cur[0] + _DIRS[prev][0], cur[1] + _DIRS[prev][1]
                nxt = (nx, ny)
                # direction from the new pixel back to the last background cell checked
                back = _DIRS.index((px - nx, py - ny)) if (px - nx, py - ny) in _DIRS else (d + 4) % 8
                cur = nxt
                break
        else:
            return np.asarray(loop, dtype=int)  # isolated pixel
        if cur == start and back == start_back:
            break
        if cur == start:
            # same pixel, different entry: keep walking (Jacob's stopping criterion)
            loop.append(cur)
            continue
        loop.append(cur)
    else:
        raise ContourError("contour trace did not close")
    if len(loop) > 1 and loop[-1] == start:
        loop.pop()
    return np.asarray(loop, dtype=int)


def _segments_cross(p):
    """True if any two non-adjacent segments of the closed polygon cross properly."""
    n = len(p)
    if n < 4:
        return False
    a = p
    b = np.roll(p, -1, axis=0)

    def orient(p0, p1, q):
        return np.sign((p1[..., 0] - p0[..., 0]) * (q[..., 1] - p0[..., 1])
                       - (p1[..., 1] - p0[..., 1]) * (q[..., 0] - p0[..., 0]))

    for i in range(n):
        j = np.arange(i + 2, n)
        if i == 0:
            j = j[j != n - 1]
        if j.size == 0:
            continue
        a0 = np.broadcast_to(a[i], (j.size, 2))
        a1 = np.broadcast_to(b[i], (j.size, 2))
        o1 = orient(a0, a1, a[j])
        o2 = orient(a0, a1, b[j])
        o3 = orient(a[j], b[j], a0)
        o4 = orient(a[j], b[j], a1)
        if np.any((o1 * o2 < 0) & (o3 * o4 < 0)):
            return True
    return False


def smooth_contour(contour, window=5):
    """Circular moving average of a closed contour; same length, float coordinates."""
    if window < 3 or window % 2 == 0:
        raise PreconditionError(f"smoothing window must be odd and >= 3, got {window}")
    pts = np.asarray(contour, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) == 0:
        raise ContourError("contour must be a non-empty (n, 2) point list")
    n = len(pts)
    if n <= window:
        return np.repeat(pts.mean(axis=0, keepdims=True), n, axis=0)
    steps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    gap = np.linalg.norm(pts[-1] - pts[0])
    if gap > 2 * steps.max() + 1e-12:
        raise ContourError(f"contour is open: closing gap {gap:.3g} vs max step {steps.max():.3g}")
    if _segments_cross(pts):
        raise ContourError("contour crosses itself")
    half = window // 2
    acc = np.zeros_like(pts)
    for k in range(-half, half + 1):
        acc += np.roll(pts, k, axis=0)
    return acc / window


def extract_hand(mask, p=HandParams()):
    """Skin mask -> recentred hand mask, plus the intermediates for inspection."""
    dt = chamfer_dt(mask)
    feats = feature_pixels(dt)
    hand = select_hand(mask, feats, p)
    cut = wrist_cut(hand, p, feats)
    return recenter(cut, p.frame_size), {"dt": dt, "features": feats, "selected": hand, "cut": cut}
