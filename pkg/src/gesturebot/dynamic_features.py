"""Motion descriptors from frame differences.

Small-amplitude gestures: histogram-intersection key frames, one difference
image, one 12-element motion vector. Large-amplitude gestures: five
consecutive difference "states" concatenated into a 60-element vector.
"""
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations

import numpy as np

from .errors import (DegenerateInputError, InsufficientCandidatesError, NoMotionError,
                     PreconditionError, SequenceTooShortError)
from .imaging import as_gray, connected_components, threshold

N_STATES = 5


class Axiality(str, Enum):
    COAXIAL = "CoAxial"
    BIAXIAL = "BiAxial"


@dataclass(frozen=True)
class DynamicParams:
    lag: int = 2
    group: int = 5
    bins: int = 64
    diff_threshold: int = 30
    min_region: int = 30
    max_regions: int = 2
    coaxial_size: int = 400

    def __post_init__(self):
        if self.lag < 1 or self.group < 1:
            raise PreconditionError("lag and group must be >= 1")
        if self.bins < 1 or 256 % self.bins:
            raise PreconditionError(f"bins must divide 256, got {self.bins}")
        if self.max_regions not in (1, 2):
            raise PreconditionError("max_regions must be 1 or 2")


@dataclass(frozen=True)
class FrameSequence:
    frames: list
    fps: float | None = None

    def __post_init__(self):
        if len(self.frames) < 2:
            raise SequenceTooShortError(f"a sequence needs >= 2 frames, got {len(self.frames)}")
        shapes = {as_gray(f).shape for f in self.frames}
        if len(shapes) != 1:
            raise PreconditionError(f"frames differ in size: {sorted(shapes)}")

    def __len__(self):
        return len(self.frames)

    def gray(self, i):
        return as_gray(self.frames[i])

    def reversed(self):
        return FrameSequence(self.frames[::-1], self.fps)


@dataclass(frozen=True)
class MotionVector:
    values: np.ndarray
    label: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


@dataclass(frozen=True)
class SequenceVector:
    states: tuple
    label: int | None = None
    regions: list = field(default_factory=list, compare=False)

    def __post_init__(self):
        if len(self.states) != N_STATES:
            raise PreconditionError(f"a sequence vector has {N_STATES} states, got {len(self.states)}")

    @property
    def values(self):
        return np.concatenate([np.asarray(s) for s in self.states])

    def __array__(self, dtype=None, copy=None):
        v = self.values
        return v if dtype is None else v.astype(dtype)


def histogram(img, n_bins=64):
    gray = as_gray(img)
    if 256 % n_bins:
        raise PreconditionError(f"n_bins must divide 256, got {n_bins}")
    return np.bincount(((gray.astype(np.int64) * n_bins) >> 8).ravel(), minlength=n_bins)


def histogram_intersection(h1, h2):
    """sum(min(h1, h2)) / sum(h1); asymmetric in its denominator."""
    h1 = np.asarray(h1, dtype=np.float64)
    h2 = np.asarray(h2, dtype=np.float64)
    if h1.shape != h2.shape:
        raise PreconditionError("histograms must have the same bin count")
    total = h1.sum()
    if total <= 0:
        raise DegenerateInputError("first histogram is empty")
    return float(np.minimum(h1, h2).sum() / total)


def dissimilarity_curve(seq, lag=2, n_bins=64):
    hists = [histogram(seq.gray(i), n_bins) for i in range(len(seq))]
    return np.array([1.0 - histogram_intersection(hists[i], hists[i + lag])
                     for i in range(len(seq) - lag)])


def local_maxima(d):
    """Interior strict local maxima; a flat-topped peak reports its first index."""
    d = np.asarray(d, dtype=np.float64)
    out = []
    i = 1
    while i < len(d) - 1:
        j = i
        while j + 1 < len(d) and d[j + 1] == d[i]:
            j += 1
        if j < len(d) - 1 and d[i] > d[i - 1] and d[j] > d[j + 1]:
            out.append(i)
        i = j + 1
    return out


def group_peaks(d, maxima, group):
    """Split maxima into consecutive runs of ``group`` and keep each run's argmax."""
    d = np.asarray(d)
    picks = []
    for start in range(0, len(maxima), group):
        run = maxima[start:start + group]
        picks.append(run[int(np.argmax(d[run]))])
    return picks


def key_frame_candidates(seq, lag=2, group=5, n_bins=64):
    """Frames whose histogram changes fastest against their ``lag``-th successor."""
    if lag < 1 or group < 1:
        raise PreconditionError("lag and group must be >= 1")
    if len(seq) - lag < 3:
        raise SequenceTooShortError(f"{len(seq)} frames leave fewer than 3 samples at lag {lag}")
    d = dissimilarity_curve(seq, lag, n_bins)
    return group_peaks(d, local_maxima(d), group)


def pick_two_keyframes(seq, candidates, n_bins=64):
    """The candidate pair whose histograms intersect least (earliest pair on ties)."""
    candidates = sorted(set(candidates))
    if len(candidates) < 2:
        raise InsufficientCandidatesError(f"need >= 2 key-frame candidates, got {len(candidates)}")
    hists = {i: histogram(seq.gray(i), n_bins) for i in candidates}
    best = None
    for a, b in combinations(candidates, 2):
        hi = histogram_intersection(hists[a], hists[b])
        if best is None or hi < best[0]:
            best = (hi, a, b)
    return best[1], best[2]


def difference_image(fa, fb):
    a = as_gray(fa).astype(np.int16)
    b = as_gray(fb).astype(np.int16)
    if a.shape != b.shape:
        raise PreconditionError(f"frame sizes differ: {a.shape} vs {b.shape}")
    return np.abs(a - b).astype(np.uint8)


def motion_regions(diff, t, min_size, max_regions=2):
    """Thresholded, size-filtered motion blobs, largest ``max_regions``, left to right."""
    table = connected_components(threshold(np.asarray(diff), t), 8)
    ids = [i + 1 for i in range(table.count) if table.sizes[i] >= min_size]
    if not ids:
        raise NoMotionError()
    # stable sort keeps raster order among equal sizes
    ids = sorted(ids, key=lambda i: -table.sizes[i - 1])[:max_regions]
    regions = [table.labels == i for i in ids]
    return sorted(regions, key=lambda r: np.nonzero(r)[1].mean())


def region_stats(diff, region):
    """(xbar, ybar, sigma_x, sigma_y, intensity) of |D| over one region."""
    ys, xs = np.nonzero(region)
    wts = np.abs(np.asarray(diff, dtype=np.float64)[ys, xs])
    total = wts.sum()
    if total == 0:
        raise DegenerateInputError("motion region has zero difference energy")
    xbar = (xs * wts).sum() / total
    ybar = (ys * wts).sum() / total
    sx = (wts * np.abs(xs - xbar)).sum() / total
    sy = (wts * np.abs(ys - ybar)).sum() / total
    return xbar, ybar, sx, sy, total / xs.size


def motion_vector(diff, regions, label=None):
    """12-element vector; the second-region slots stay zero with one region."""
    if len(regions) not in (1, 2):
        raise PreconditionError(f"motion_vector takes 1 or 2 regions, got {len(regions)}")
    x1, y1, sx1, sy1, i1 = region_stats(diff, regions[0])
    if len(regions) == 2:
        x2, y2, sx2, sy2, i2 = region_stats(diff, regions[1])
    else:
        x2 = y2 = sx2 = sy2 = i2 = 0.0
    v = [x1, y1, x2, y2, sx1, sy1, sx2, sy2, abs(x1 - x2), abs(y1 - y2), i1, i2]
    return MotionVector(np.array(v), label)


def coaxial_split(regions, size_t):
    if not regions:
        raise PreconditionError("coaxial_split needs at least one region")
    largest = max(int(np.count_nonzero(r)) for r in regions)
    return Axiality.BIAXIAL if largest >= size_t else Axiality.COAXIAL


def small_amplitude_vector(seq, p=DynamicParams(), label=None):
    """Key frames -> difference image -> 12-element vector.

    Returns ``(vector, info)``; ``info`` holds the key frames, the difference
    image, the regions and the co-axial decision.
    """
    cands = key_frame_candidates(seq, p.lag, p.group, p.bins)
    if len(cands) < 2:
        # short clips hold fewer than two full groups of peaks; use every peak
        cands = key_frame_candidates(seq, p.lag, 1, p.bins)
    fa, fb = pick_two_keyframes(seq, cands, p.bins)
    diff = difference_image(seq.frames[fa], seq.frames[fb])
    regions = motion_regions(diff, p.diff_threshold, p.min_region, p.max_regions)
    axis = coaxial_split(regions, p.coaxial_size)
    info = {"keyframes": (fa, fb), "candidates": cands, "diff": diff, "regions": regions, "axiality": axis}
    return motion_vector(diff, regions, label), info


def state_frames(n_frames):
    """Six evenly spaced frame indices bracketing the five states."""
    if n_frames < N_STATES + 1:
        raise SequenceTooShortError(f"need >= {N_STATES + 1} frames, got {n_frames}")
    return [int(np.floor(j * (n_frames - 1) / N_STATES + 0.5)) for j in range(N_STATES + 1)]


def sequence_vector(seq, p=DynamicParams(), label=None):
    idx = state_frames(len(seq))
    states, regs = [], []
    for s in range(N_STATES):
        diff = difference_image(seq.frames[idx[s]], seq.frames[idx[s + 1]])
        try:
            regions = motion_regions(diff, p.diff_threshold, p.min_region, p.max_regions)
        except NoMotionError:
            raise NoMotionError(state=s + 1) from None
        states.append(motion_vector(diff, regions))
        regs.append(regions)
    return SequenceVector(tuple(states), label, regs)
