"""Horn-Schunck optical flow, moving-region tracking and the amplitude gate."""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import NoMotionError, PreconditionError
from .imaging import as_gray, connected_components, median_filter, morphology


class Amplitude(str, Enum):
    SMALL = "Small"
    LARGE = "Large"


@dataclass(frozen=True)
class FlowParams:
    alpha: float = 1.0
    iterations: int = 100
    vel_threshold: float = 0.5
    median_window: int = 3
    close_radius: int = 2
    min_region: int = 30
    gate_threshold: float = 40.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise PreconditionError("alpha must be positive")
        if self.iterations < 1:
            raise PreconditionError("iterations must be >= 1")


@dataclass(frozen=True)
class FlowField:
    u: np.ndarray
    v: np.ndarray

    @property
    def width(self):
        return self.u.shape[1]

    @property
    def height(self):
        return self.u.shape[0]

    def magnitude(self):
        return np.hypot(self.u, self.v)


@dataclass(frozen=True)
class TrackRecord:
    """Largest moving region of one frame pair; ``area == 0`` marks an empty record."""

    rect: tuple | None = None  # (xmin, ymin, xmax, ymax), inclusive
    centroid: tuple | None = None
    area: int = 0

    @property
    def empty(self):
        return self.area == 0


def _as_float(img):
    if isinstance(img, np.ndarray) and img.ndim == 2:
        return img.astype(np.float64)
    return as_gray(img).astype(np.float64)


def derivatives(f1, f2):
    """(Ix, Iy, It), each the mean of four first differences over the 2x2x2 cube.

    The cube at (x, y) spans columns x..x+1, rows y..y+1 and both frames;
    indices past the last row/column clamp to the edge.
    """
    a = _as_float(f1)
    b = _as_float(f2)
    if a.shape != b.shape:
        raise PreconditionError(f"frame sizes differ: {a.shape} vs {b.shape}")
    pa = np.pad(a, ((0, 1), (0, 1)), mode="edge")
    pb = np.pad(b, ((0, 1), (0, 1)), mode="edge")

    def at(p, dy, dx):
        h, w = a.shape
        return p[dy:dy + h, dx:dx + w]

    ix = 0.25 * (at(pa, 0, 1) - at(pa, 0, 0) + at(pa, 1, 1) - at(pa, 1, 0)
                 + at(pb, 0, 1) - at(pb, 0, 0) + at(pb, 1, 1) - at(pb, 1, 0))
    iy = 0.25 * (at(pa, 1, 0) - at(pa, 0, 0) + at(pa, 1, 1) - at(pa, 0, 1)
                 + at(pb, 1, 0) - at(pb, 0, 0) + at(pb, 1, 1) - at(pb, 0, 1))
    it = 0.25 * (at(pb, 0, 0) - at(pa, 0, 0) + at(pb, 1, 0) - at(pa, 1, 0)
                 + at(pb, 0, 1) - at(pa, 0, 1) + at(pb, 1, 1) - at(pa, 1, 1))
    return ix, iy, it


def neighbour_average(f):
    """1/6 on the 4-neighbours, 1/12 on the diagonals; edges replicate."""
    p = np.pad(f, 1, mode="edge")
    h, w = f.shape
    ortho = p[:-2, 1:w + 1] + p[2:, 1:w + 1] + p[1:h + 1, :-2] + p[1:h + 1, 2:]
    diag = p[:-2, :-2] + p[:-2, 2:] + p[2:, :-2] + p[2:, 2:]
    return ortho / 6.0 + diag / 12.0


def hs_energy(ix, iy, it, u, v, alpha):
    """Data term plus alpha^2 times the weighted neighbour-difference smoothness.

    The smoothness sums w_pq (u_p - u_q)^2 over unordered neighbour pairs
    with the same weights as :func:`neighbour_average`; away from the frame
    edge the Jacobi update is the per-pixel minimiser of this energy with the
    neighbours frozen.
    """
    data = ((ix * u + iy * v + it) ** 2).sum()
    smooth = 0.0
    for f in (u, v):
        smooth += ((f[:, 1:] - f[:, :-1]) ** 2).sum() / 6.0
        smooth += ((f[1:, :] - f[:-1, :]) ** 2).sum() / 6.0
        smooth += ((f[1:, 1:] - f[:-1, :-1]) ** 2).sum() / 12.0
        smooth += ((f[1:, :-1] - f[:-1, 1:]) ** 2).sum() / 12.0
    return float(data + alpha ** 2 * smooth)


def horn_schunck(f1, f2, p=FlowParams(), callback=None):
    """Dense flow by ``p.iterations`` Jacobi sweeps starting from zero.

    ``callback(k, u, v)`` is invoked after every sweep when given.
    """
    ix, iy, it = derivatives(f1, f2)
    u = np.zeros_like(ix)
    v = np.zeros_like(ix)
    denom = p.alpha ** 2 + ix ** 2 + iy ** 2
    for k in range(1, p.iterations + 1):
        ub = neighbour_average(u)
        vb = neighbour_average(v)
        t = (ix * ub + iy * vb + it) / denom
        u = ub - ix * t
        v = vb - iy * t
        if callback is not None:
            callback(k, u, v)
    return FlowField(u, v)


def motion_mask(flow, p=FlowParams()):
    """Speed threshold, then median filter, then morphological closing."""
    mask = flow.magnitude() >= p.vel_threshold
    mask = median_filter(mask, p.median_window)
    if p.close_radius > 0:
        mask = morphology(mask, "close", p.close_radius)
    return mask


def largest_region(mask, min_region):
    table = connected_components(mask, 8)
    if table.count == 0:
        return TrackRecord()
    i = int(np.argmax(table.sizes))
    if table.sizes[i] < min_region:
        return TrackRecord()
    ys, xs = np.nonzero(table.labels == i + 1)
    # flow sample (x, y) belongs to the centre of its 2x2x2 derivative cube
    return TrackRecord(rect=table.bboxes[i], centroid=(float(xs.mean()) + 0.5, float(ys.mean()) + 0.5),
                       area=int(table.sizes[i]))


def track(seq, p=FlowParams()):
    """One record per consecutive frame pair: the largest moving region."""
    frames = seq.frames if hasattr(seq, "frames") else list(seq)
    if len(frames) < 2:
        raise PreconditionError("tracking needs >= 2 frames")
    records = []
    for a, b in zip(frames[:-1], frames[1:]):
        flow = horn_schunck(a, b, p)
        records.append(largest_region(motion_mask(flow, p), p.min_region))
    if all(r.empty for r in records):
        raise NoMotionError("no frame pair produced a moving region")
    return records


def centroid_transition(first, last):
    """Euclidean distance between two tracked centroids."""
    if isinstance(first, TrackRecord) or isinstance(last, TrackRecord):
        if first.empty or last.empty:
            raise PreconditionError("centroid transition needs two non-empty records")
        first, last = first.centroid, last.centroid
    return float(np.hypot(last[0] - first[0], last[1] - first[1]))


def track_transition(records):
    """Transition between the first and last non-empty records."""
    full = [r for r in records if not r.empty]
    if not full:
        raise NoMotionError("no tracked region")
    return centroid_transition(full[0], full[-1])


def amplitude_gate(transition, p=FlowParams()):
    if transition < 0:
        raise PreconditionError("transition must be >= 0")
    return Amplitude.SMALL if transition < p.gate_threshold else Amplitude.LARGE


def flow_to_gray(component, scale=16.0, offset=128.0):
    """Map a flow component to uint8 as ``clip(offset + scale * value)``."""
    return np.clip(np.rint(offset + scale * np.asarray(component)), 0, 255).astype(np.uint8)
