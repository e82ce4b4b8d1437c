"""Light compensation, YCbCr skin masking and the two noise-cleaning passes."""
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, PreconditionError
from .imaging import RGB, YCBCR, Image, connected_components, rgb_to_ycbcr


@dataclass(frozen=True)
class SkinParams:
    """Chroma box for skin plus the noise-size thresholds.

    ``min_region_size`` / ``max_hole_size`` of ``None`` resolve to 0.5% and
    0.1% of the image area at call time.
    """

    cb_lo: int = 77
    cb_hi: int = 127
    cr_lo: int = 133
    cr_hi: int = 173
    min_region_size: int | None = None
    max_hole_size: int | None = None
    apply_gray_world: bool = True

    def __post_init__(self):
        if not (0 <= self.cb_lo <= self.cb_hi <= 255 and 0 <= self.cr_lo <= self.cr_hi <= 255):
            raise PreconditionError("chroma bounds must satisfy 0 <= lo <= hi <= 255")
        for name in ("min_region_size", "max_hole_size"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise PreconditionError(f"{name} must be >= 0")

    def region_sizes(self, area):
        lo = self.min_region_size if self.min_region_size is not None else round(0.005 * area)
        hole = self.max_hole_size if self.max_hole_size is not None else round(0.001 * area)
        return int(lo), int(hole)


def gray_world(img):
    """Scale each RGB channel by (1/mean_c) / max_c'(1/mean_c').

    The brightest-mean channels get pulled down to the darkest channel mean.
    """
    if not isinstance(img, Image) or img.colorspace != RGB:
        raise PreconditionError("gray_world needs an RGB Image")
    rgb = img.data.astype(np.float64)
    means = rgb.reshape(-1, 3).mean(axis=0)
    if np.any(means == 0):
        raise DegenerateInputError(f"channel with zero mean: {means.tolist()}")
    inv = 1.0 / means
    scale = inv / inv.max()
    out = np.clip(np.rint(rgb * scale), 0, 255).astype(np.uint8)
    return Image(out, RGB)


def skin_mask(img, p=SkinParams()):
    if not isinstance(img, Image) or img.colorspace != YCBCR:
        raise PreconditionError("skin_mask needs a YCbCr Image")
    cb = img.data[..., 1]
    cr = img.data[..., 2]
    return (cb >= p.cb_lo) & (cb <= p.cb_hi) & (cr >= p.cr_lo) & (cr <= p.cr_hi)


def remove_small_regions(mask, min_size, connectivity=8):
    mask = np.asarray(mask, dtype=bool)
    if min_size <= 0:
        return mask.copy()
    table = connected_components(mask, connectivity)
    keep = np.concatenate([[False], table.sizes >= min_size])
    return keep[table.labels]


def fill_small_holes(mask, max_hole_size):
    """Set background components smaller than ``max_hole_size`` to foreground.

    Background is labelled with 4-connectivity (the dual of 8-connected
    foreground); components touching the frame edge are never filled.
    """
    mask = np.asarray(mask, dtype=bool)
    if max_hole_size <= 0:
        return mask.copy()
    table = connected_components(~mask, 4)
    labels = table.labels
    border = np.unique(np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]]))
    fill = np.concatenate([[False], table.sizes < max_hole_size])
    fill[border] = False
    return mask | fill[labels]


def filter_noise(mask, p=SkinParams()):
    """Drop speckle components (type-1 noise), then close small holes (type-2)."""
    mask = np.asarray(mask, dtype=bool)
    min_size, hole = p.region_sizes(mask.size)
    return fill_small_holes(remove_small_regions(mask, min_size), hole)


def detect_skin(img, p=SkinParams()):
    """RGB image -> cleaned skin mask, with optional gray-world compensation first."""
    if p.apply_gray_world:
        img = gray_world(img)
    return filter_noise(skin_mask(rgb_to_ycbcr(img), p), p)
