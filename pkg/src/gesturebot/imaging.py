"""Pixel-level primitives shared by the static and dynamic pipelines.

Rasters are numpy arrays indexed ``[y, x]`` (row, column) with y growing
downward. Colour images travel inside :class:`Image` so the colorspace tag
can be checked; masks are plain boolean arrays.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import PreconditionError

RGB = "RGB"
YCBCR = "YCbCr"
GRAY = "Gray"

_EIGHT = np.ones((3, 3), dtype=bool)
_FOUR = ndimage.generate_binary_structure(2, 1)


@dataclass(frozen=True)
class Image:
    """An 8-bit raster with a colorspace tag.

    ``data`` has shape (h, w, 3) for RGB/YCbCr and (h, w) for Gray.
    """

    data: np.ndarray
    colorspace: str = RGB

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.dtype != np.uint8:
            data = np.clip(np.rint(data), 0, 255).astype(np.uint8)
        if self.colorspace == GRAY:
            if data.ndim != 2:
                raise PreconditionError(f"gray image must be 2-D, got shape {data.shape}")
        elif self.colorspace in (RGB, YCBCR):
            if data.ndim != 3 or data.shape[2] != 3:
                raise PreconditionError(f"{self.colorspace} image must be (h, w, 3), got {data.shape}")
        else:
            raise PreconditionError(f"unknown colorspace {self.colorspace!r}")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise PreconditionError("image must be at least 1x1")
        data = data.copy()
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def channels(self):
        return 1 if self.data.ndim == 2 else 3

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)


@dataclass(frozen=True)
class ComponentTable:
    """Connected-component labelling of a mask.

    Label ids run 1..count in raster order of each component's first pixel;
    ``sizes[i]`` and ``bboxes[i]`` describe label ``i + 1``. Boxes are
    inclusive ``(xmin, ymin, xmax, ymax)``.
    """

    labels: np.ndarray
    count: int
    sizes: np.ndarray
    bboxes: list = field(default_factory=list)

    def mask(self, label):
        return self.labels == label


def as_gray(img):
    """Return a 2-D uint8 array: luma for colour images, the raster itself otherwise."""
    if isinstance(img, Image):
        if img.colorspace == GRAY:
            return img.data
        if img.colorspace == YCBCR:
            return img.data[..., 0]
        return _luma(img.data)
    arr = np.asarray(img)
    if arr.ndim == 3:
        return _luma(arr)
    return arr


def _luma(rgb):
    rgb = rgb.astype(np.float64)
    y = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return np.clip(np.rint(y), 0, 255).astype(np.uint8)


def rgb_to_ycbcr(img):
    """Full-range BT.601 conversion with 128-offset chroma."""
    if not isinstance(img, Image) or img.colorspace != RGB:
        tag = img.colorspace if isinstance(img, Image) else type(img).__name__
        raise PreconditionError(f"rgb_to_ycbcr needs an RGB Image, got {tag}")
    rgb = img.data.astype(np.float64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cb = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b
    cr = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b
    out = np.stack([y, cb, cr], axis=-1)
    return Image(np.clip(np.rint(out), 0, 255).astype(np.uint8), YCBCR)


def _catmull_rom(t):
    t = np.abs(t)
    out = np.zeros_like(t)
    near = t <= 1
    far = (t > 1) & (t < 2)
    out[near] = 1.5 * t[near] ** 3 - 2.5 * t[near] ** 2 + 1
    out[far] = -0.5 * t[far] ** 3 + 2.5 * t[far] ** 2 - 4 * t[far] + 2
    return out


def _resample_matrix(n_in, n_out):
    # pixel-centre alignment: src = (dst + 0.5) * n_in / n_out - 0.5
    src = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
    base = np.floor(src).astype(int)
    mat = np.zeros((n_out, n_in))
    rows = np.arange(n_out)
    for offset in (-1, 0, 1, 2):
        idx = base + offset
        w = _catmull_rom(src - idx)
        np.add.at(mat, (rows, np.clip(idx, 0, n_in - 1)), w)
    return mat


def resize(img, new_w, new_h):
    """Bicubic (Catmull-Rom) resampling with edge-clamped borders.

    Accepts an :class:`Image` (returns one with the same tag) or a bare
    2-D/3-D uint8 array (returns an array).
    """
    if new_w < 1 or new_h < 1:
        raise PreconditionError(f"target size must be positive, got {new_w}x{new_h}")
    wrapped = isinstance(img, Image)
    arr = img.data if wrapped else np.asarray(img)
    h, w = arr.shape[:2]
    wy = _resample_matrix(h, new_h)
    wx = _resample_matrix(w, new_w)
    src = arr.astype(np.float64)
    if src.ndim == 2:
        out = wy @ src @ wx.T
    else:
        out = np.einsum("yh,hwc,xw->yxc", wy, src, wx, optimize=True)
    out = np.clip(np.rint(out), 0, 255).astype(np.uint8)
    return Image(out, img.colorspace) if wrapped else out


def threshold(img, t):
    """Binary mask of pixels with value >= t."""
    gray = as_gray(img) if isinstance(img, Image) else np.asarray(img)
    if gray.ndim != 2:
        raise PreconditionError("threshold expects a single-channel image")
    return gray >= t


def connected_components(mask, connectivity=8):
    """Label foreground components of ``mask`` (4- or 8-connectivity)."""
    if connectivity not in (4, 8):
        raise PreconditionError(f"connectivity must be 4 or 8, got {connectivity}")
    mask = np.asarray(mask, dtype=bool)
    structure = _EIGHT if connectivity == 8 else _FOUR
    labels, count = ndimage.label(mask, structure=structure)
    labels = _raster_order(labels, count)
    sizes = np.bincount(labels.ravel(), minlength=count + 1)[1:]
    bboxes = []
    for sl in ndimage.find_objects(labels, max_label=count):
        ys, xs = sl
        bboxes.append((xs.start, ys.start, xs.stop - 1, ys.stop - 1))
    return ComponentTable(labels=labels, count=int(count), sizes=sizes, bboxes=bboxes)


def _raster_order(labels, count):
    # scipy already numbers by first raster occurrence; enforce it rather than rely on it
    if count == 0:
        return labels
    flat = labels.ravel()
    fg = np.flatnonzero(flat)
    _, first = np.unique(flat[fg], return_index=True)
    order = np.argsort(fg[first])
    if np.array_equal(order, np.arange(count)):
        return labels
    remap = np.zeros(count + 1, dtype=labels.dtype)
    remap[order + 1] = np.arange(1, count + 1)
    return remap[labels]


def morphology(mask, op, radius):
    """Binary erosion/dilation/closing with a (2r+1)^2 square element.

    Pixels outside the frame count as background. Closing pads the frame so
    it stays extensive (``close(m) >= m``) right up to the border.
    """
    if radius < 1:
        raise PreconditionError(f"radius must be >= 1, got {radius}")
    mask = np.asarray(mask, dtype=bool)
    size = 2 * radius + 1
    if op == "erode":
        return ndimage.minimum_filter(mask, size=size, mode="constant", cval=0)
    if op == "dilate":
        return ndimage.maximum_filter(mask, size=size, mode="constant", cval=0)
    if op == "close":
        padded = np.pad(mask, radius)
        grown = ndimage.maximum_filter(padded, size=size, mode="constant", cval=0)
        shrunk = ndimage.minimum_filter(grown, size=size, mode="constant", cval=0)
        return shrunk[radius:-radius, radius:-radius]
    raise PreconditionError(f"unknown morphology op {op!r}")


def median_filter(mask, window=3):
    """Per-pixel majority vote over a square window, edges replicated."""
    if window < 3 or window % 2 == 0:
        raise PreconditionError(f"median window must be odd and >= 3, got {window}")
    mask = np.asarray(mask, dtype=bool)
    return ndimage.median_filter(mask.astype(np.uint8), size=window, mode="nearest").astype(bool)


_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]])


def sobel_edges(mask):
    """One-pixel outer contour: foreground pixels with nonzero L1 Sobel magnitude."""
    mask = np.asarray(mask, dtype=bool)
    m = mask.astype(np.int32)
    gx = ndimage.correlate(m, _SOBEL_X, mode="constant", cval=0)
    gy = ndimage.correlate(m, _SOBEL_X.T, mode="constant", cval=0)
    return mask & ((np.abs(gx) + np.abs(gy)) > 0)


def boundary_pixels(mask):
    """Foreground pixels with at least one background 4-neighbour (frame edge counts)."""
    mask = np.asarray(mask, dtype=bool)
    padded = np.pad(mask, 1)
    inner = padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
    return mask & ~inner
