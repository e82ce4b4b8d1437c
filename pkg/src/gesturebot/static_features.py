"""Geometric-moment descriptors of a binary hand silhouette.

Moments are discrete sums over foreground pixels. Central moments are
accumulated in exact integer arithmetic and rounded once, so symmetric
shapes give exactly symmetric results (a square has elongation 0.0).
"""
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DegenerateInputError
from .imaging import boundary_pixels, sobel_edges

NAMES = ("P4/Imin", "A2/Imax", "A2/Imin", "Dmax/Dmin", "P2/A", "(Imin+Imax)/A2", "(Imax-Imin)/(Imax+Imin)")
DMIN_EPS = 1e-6


@dataclass(frozen=True)
class StaticVector:
    values: np.ndarray
    label: int | None = None
    parts: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def _coords(mask):
    mask = np.asarray(mask, dtype=bool)
    ys, xs = np.nonzero(mask)
    return xs.astype(np.int64), ys.astype(np.int64)


def raw_moment(mask, p, q):
    xs, ys = _coords(mask)
    return float(sum(x ** p * y ** q for x, y in zip(xs.tolist(), ys.tolist())))


def central_moment(mask, p, q):
    """Exact mu_pq = sum (x - xbar)^p (y - ybar)^q, returned as float."""
    xs, ys = _coords(mask)
    n = xs.size
    if n == 0:
        raise DegenerateInputError("central moment of an empty mask")
    m10, m01 = int(xs.sum()), int(ys.sum())
    # sum (n x - m10)^p (n y - m01)^q / n^(p+q), all in Python ints
    dx = (n * xs - m10).tolist()
    dy = (n * ys - m01).tolist()
    num = sum(a ** p * b ** q for a, b in zip(dx, dy))
    return float(Fraction(num, n ** (p + q)))


def principal_moments(mask):
    """(Imax, Imin) from mu20, mu02, mu11."""
    mu20 = central_moment(mask, 2, 0)
    mu02 = central_moment(mask, 0, 2)
    mu11 = central_moment(mask, 1, 1)
    root = np.sqrt(4 * mu11 ** 2 + (mu20 - mu02) ** 2)
    imax = (mu20 + mu02 + root) / 2
    imin = (mu20 + mu02 - root) / 2
    if imin <= 1e-9 * max(1.0, imax):
        raise DegenerateInputError(f"collinear or single-point mask (Imin={imin:.3g})")
    return imax, imin


def radial_extents(mask, mode="radial", contour=None):
    """(Dmax, Dmin) distances from the centroid.

    ``radial``: max/min Euclidean distance from the centroid to contour
    pixels (Sobel outline unless ``contour`` is given as (x, y) points).
    ``literal``: per-axis max/min of |x - xbar|, |y - ybar| over all
    foreground pixels, combined as sqrt(dx^2 + dy^2).
    """
    xs, ys = _coords(mask)
    if xs.size == 0:
        raise DegenerateInputError("radial extents of an empty mask")
    cx, cy = xs.mean(), ys.mean()
    if mode == "radial":
        if contour is None:
            ex, ey = _coords(sobel_edges(mask))
        else:
            pts = np.asarray(contour, dtype=np.float64)
            ex, ey = pts[:, 0], pts[:, 1]
        r = np.hypot(ex - cx, ey - cy)
        dmax, dmin = r.max(), r.min()
    elif mode == "literal":
        adx, ady = np.abs(xs - cx), np.abs(ys - cy)
        dmax = np.hypot(adx.max(), ady.max())
        dmin = np.hypot(adx.min(), ady.min())
    else:
        raise ValueError(f"unknown radial_extents mode {mode!r}")
    if dmin < DMIN_EPS:
        raise DegenerateInputError(f"Dmin={dmin:.3g} is too small for a stable Dmax/Dmin ratio")
    return float(dmax), float(dmin)


def perimeter(mask):
    return int(boundary_pixels(mask).sum())


def static_vector(mask, label=None, mode="radial", contour=None):
    """Seven-element shape vector of an extracted, recentred hand mask."""
    mask = np.asarray(mask, dtype=bool)
    area = float(mask.sum())
    if area == 0:
        raise DegenerateInputError("static vector of an empty mask")
    per = float(perimeter(mask))
    imax, imin = principal_moments(mask)
    dmax, dmin = radial_extents(mask, mode, contour)
    values = [
        per ** 4 / imin,
        area ** 2 / imax,
        area ** 2 / imin,
        dmax / dmin,
        per ** 2 / area,
        (imin + imax) / area ** 2,
        (imax - imin) / (imax + imin),
    ]
    parts = dict(P=per, A=area, Imax=imax, Imin=imin, Dmax=dmax, Dmin=dmin)
    return StaticVector(np.array(values), label, parts)
