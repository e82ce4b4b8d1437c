"""Seeded synthetic gestures with known ground truth.

Static samples are skin-coloured hand silhouettes (palm, fingers, forearm,
sometimes a face) on a dark neutral background. Dynamic samples are textured
blobs moving over a static shaded background along per-gesture
trajectories. Every output is a pure function of the :class:`SynthSpec`.
"""
import os
from dataclasses import dataclass

import numpy as np

from . import pnm
from .imaging import GRAY, RGB, Image

STATIC_GESTURES = ("fist", "index", "victory", "three", "four", "open_hand", "thumb_out")
SMALL_GESTURES = ("bye_two_hands", "bye_right_hand", "bye_left_hand", "stop", "yes", "no")
LARGE_GESTURES = ("kowtow", "walk_left_to_right", "walk_right_to_left", "right_arm_up",
                  "right_arm_down", "right_arm_rotation_cw", "right_arm_rotation_ccw",
                  "right_arm_point_right", "left_arm_point_left")
ALL_GESTURES = STATIC_GESTURES + SMALL_GESTURES + LARGE_GESTURES
KIND_NAMES = {"static": STATIC_GESTURES, "small": SMALL_GESTURES, "large": LARGE_GESTURES}

# RGB (210, 160, 130) sits near the middle of the Cb/Cr skin box (Cb ~ 106, Cr ~ 152)
SKIN_RGB = np.array([210.0, 160.0, 130.0])
BACKGROUND_RGB = np.array([40.0, 44.0, 48.0])
STATIC_SIZE = (176, 144)
SEQUENCE_SIZE = (160, 120)


@dataclass(frozen=True)
class SynthSpec:
    kind: str                 # "static" | "small" | "large"
    archetype: int            # 0-based index into the kind's gesture list
    seed: int = 0             # person / variation seed
    width: int | None = None  # None: 176x144 stills, 160x120 sequences
    height: int | None = None
    noise: float = 0.0        # gray levels of additive Gaussian noise

    def __post_init__(self):
        w, h = STATIC_SIZE if self.kind == "static" else SEQUENCE_SIZE
        if self.width is None:
            object.__setattr__(self, "width", w)
        if self.height is None:
            object.__setattr__(self, "height", h)
        if self.kind not in KIND_NAMES:
            raise ValueError(f"unknown kind {self.kind!r}")
        if not 0 <= self.archetype < len(KIND_NAMES[self.kind]):
            raise ValueError(f"{self.kind} archetype {self.archetype} out of range")

    @property
    def name(self):
        return KIND_NAMES[self.kind][self.archetype]

    @property
    def label(self):
        """1-based index into :data:`ALL_GESTURES`."""
        return ALL_GESTURES.index(self.name) + 1

    def rng(self, salt=0):
        kind_id = list(KIND_NAMES).index(self.kind)
        return np.random.default_rng([self.seed, kind_id, self.archetype, salt])


def _grid(h, w):
    ys, xs = np.mgrid[:h, :w]
    return xs.astype(np.float64), ys.astype(np.float64)


def _capsule(xs, ys, a, b, r):
    """Pixels within ``r`` of segment a-b."""
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    t = np.clip(((xs - ax) * dx + (ys - ay) * dy) / max(dx * dx + dy * dy, 1e-12), 0, 1)
    return np.hypot(xs - ax - t * dx, ys - ay - t * dy) <= r


def _ellipse(xs, ys, c, rx, ry, angle=0.0):
    ca, sa = np.cos(angle), np.sin(angle)
    u = (xs - c[0]) * ca + (ys - c[1]) * sa
    v = -(xs - c[0]) * sa + (ys - c[1]) * ca
    return (u / rx) ** 2 + (v / ry) ** 2 <= 1.0


# finger layout per static archetype: (angle from vertical in degrees, length factor)
_FINGERS = {
    "fist": [(-30, 0.45), (-10, 0.5), (10, 0.5), (30, 0.45)],
    "index": [(-8, 1.0)],
    "victory": [(-22, 1.0), (12, 1.0)],
    "three": [(-28, 0.95), (-5, 1.05), (18, 1.0)],
    "four": [(-32, 0.85), (-11, 1.0), (10, 1.05), (31, 0.9)],
    "open_hand": [(-32, 0.85), (-11, 1.0), (10, 1.05), (31, 0.9), (-80, 0.8)],
    "thumb_out": [(-85, 0.9)],
}


def hand_mask(spec):
    """Ground-truth skin silhouette (hand + forearm, optional face)."""
    rng = spec.rng()
    h, w = spec.height, spec.width
    xs, ys = _grid(h, w)
    s = rng.uniform(0.9, 1.1) * min(w / 176, h / 144)
    cx = w / 2 + rng.uniform(-10, 10) * s
    cy = h * 0.58 + rng.uniform(-6, 6) * s
    tilt = np.deg2rad(rng.uniform(-8, 8))
    palm_rx, palm_ry = 17 * s, 20 * s
    mask = _ellipse(xs, ys, (cx, cy), palm_rx, palm_ry, tilt)
    # forearm runs from the palm centre down past the bottom edge
    down = (np.sin(-tilt), np.cos(tilt))
    mask |= _capsule(xs, ys, (cx, cy), (cx + down[0] * 2 * h, cy + down[1] * 2 * h), 10.5 * s)

    finger_len = 30 * s * rng.uniform(0.92, 1.08)
    finger_r = 4.6 * s
    for deg, frac in _FINGERS[spec.name]:
        ang = tilt + np.deg2rad(deg + rng.uniform(-4, 4))
        ux, uy = np.sin(ang), -np.cos(ang)
        # base on the palm rim along the finger direction
        bx, by = cx + ux * palm_rx * 0.8, cy + uy * palm_ry * 0.8
        length = finger_len * frac
        mask |= _capsule(xs, ys, (bx, by), (bx + ux * length, by + uy * length), finger_r)

    if rng.random() < 0.5:
        side = -1 if rng.random() < 0.5 else 1
        fx = w / 2 + side * w * 0.36
        mask |= _ellipse(xs, ys, (fx, h * 0.2), 14 * s, 17 * s)
    return mask


def gen_static(spec):
    """Render a static gesture; returns ``(Image[RGB], label)``."""
    mask = hand_mask(spec)
    rng = spec.rng(1)
    skin = SKIN_RGB + rng.uniform(-8, 8, 3)
    bg = BACKGROUND_RGB + rng.uniform(-6, 6, 3)
    img = np.where(mask[..., None], skin, bg)
    if spec.noise > 0:
        img = img + rng.normal(0, spec.noise, img.shape)
    return Image(np.clip(np.rint(img), 0, 255).astype(np.uint8), RGB), spec.label


# --- dynamic sequences ---------------------------------------------------

def _texture(rng, size=96):
    return rng.uniform(110, 235, (size, size))


def _paint(frame, xs, ys, center, rx, ry, tex):
    inside = ((xs - center[0]) / rx) ** 2 + ((ys - center[1]) / ry) ** 2 <= 1
    n = tex.shape[0]
    # texture is glued to the blob: sample it in blob-local integer coordinates
    tx = (np.rint(xs - center[0]).astype(int) + n // 2) % n
    ty = (np.rint(ys - center[1]).astype(int) + n // 2) % n
    frame[inside] = tex[ty[inside], tx[inside]]
    return inside


def _trajectory(name, t, w, h, rng):
    """Blob list [(cx, cy, rx, ry)] at phase t in [0, 1] for one gesture."""
    jx, jy = rng.uniform(-6, 6, 2)
    amp = rng.uniform(0.85, 1.15)
    cycles = rng.uniform(2.6, 3.4)
    osc = np.sin(2 * np.pi * cycles * t)
    r = rng.uniform(0.92, 1.08)
    sx, sy = w / 160, h / 120

    def blob(x, y, rx, ry):
        return ((x + jx) * sx, (y + jy) * sy, rx * r * sx, ry * r * sy)

    if name == "bye_two_hands":
        return [blob(45 + 9 * amp * osc, 45, 15, 17), blob(115 - 9 * amp * osc, 45, 9, 10)]
    if name == "bye_right_hand":
        return [blob(45 + 10 * amp * osc, 42, 13, 15)]
    if name == "bye_left_hand":
        return [blob(115 + 10 * amp * osc, 42, 13, 15)]
    if name == "stop":
        return [blob(80, 62 + 6 * amp * osc, 16, 12)]
    if name == "yes":
        return [blob(80, 30 + 4 * amp * osc, 12, 14)]
    if name == "no":
        return [blob(80 + 4 * amp * osc, 30, 12, 14)]

    s = t * amp
    if name == "kowtow":
        return [blob(80, 28 + 62 * s, 17, 19)]
    if name == "walk_left_to_right":
        return [blob(28 + 100 * s, 64, 18, 34)]
    if name == "walk_right_to_left":
        return [blob(132 - 100 * s, 64, 18, 34)]
    if name == "right_arm_up":
        return [blob(108, 100 - 70 * s, 11, 11)]
    if name == "right_arm_down":
        return [blob(108, 30 + 70 * s, 11, 11)]
    if name in ("right_arm_rotation_cw", "right_arm_rotation_ccw"):
        # semicircle over the top, 9 o'clock -> 3 o'clock for clockwise
        phi = np.pi * (1 - s) if name == "right_arm_rotation_cw" else np.pi * s
        return [blob(80 + 40 * np.cos(phi), 75 - 40 * np.sin(phi), 11, 11)]
    if name == "right_arm_point_right":
        return [blob(75 + 65 * s, 48, 12, 10)]
    if name == "left_arm_point_left":
        return [blob(85 - 65 * s, 48, 12, 10)]
    raise ValueError(f"no trajectory for {name!r}")


def default_frames(kind):
    return 20 if kind == "small" else 12


def gen_sequence(spec, n_frames=None):
    """Render a moving-blob gesture.

    Returns ``(frames, label, path)`` where ``frames`` is a list of gray
    Images and ``path`` the (n_frames, 2) true centroid of the primary
    (first, largest) blob.
    """
    if spec.kind == "static":
        raise ValueError("gen_sequence needs a small or large archetype")
    n_frames = default_frames(spec.kind) if n_frames is None else n_frames
    if n_frames < 6:
        raise ValueError("a gesture sequence needs >= 6 frames")
    h, w = spec.height, spec.width
    xs, ys = _grid(h, w)
    shape_rng = spec.rng(2)
    traj_params = shape_rng.integers(0, 2 ** 31)
    textures = [_texture(spec.rng(3)), _texture(spec.rng(4))]
    # static texture on the backdrop pins the flow to zero there, as real scenery does
    background = 25 + 50 * xs / w + 15 * ys / h + spec.rng(6).uniform(-8, 8, (h, w))
    noise_rng = spec.rng(5)
    frames, path = [], []
    for i in range(n_frames):
        t = i / (n_frames - 1)
        blobs = _trajectory(spec.name, t, w, h, np.random.default_rng(traj_params))
        frame = background.copy()
        for b, tex in zip(blobs, textures):
            inside = _paint(frame, xs, ys, b[:2], b[2], b[3], tex)
            if len(path) == i:
                path.append((xs[inside].mean(), ys[inside].mean()) if inside.any() else b[:2])
        if spec.noise > 0:
            frame = frame + noise_rng.normal(0, spec.noise, frame.shape)
        frames.append(Image(np.clip(np.rint(frame), 0, 255).astype(np.uint8), GRAY))
    return frames, spec.label, np.asarray(path)


def true_transition(path):
    return float(np.hypot(*(path[-1] - path[0])))


def write_dataset(root, kind, n_variants=10, noise=None, width=None, height=None, base_seed=0):
    """Write ``<root>/<gesture>/<person>/<sample>`` for every archetype of ``kind``.

    Static samples are single ``.ppm`` files; dynamic samples are frame
    directories. Returns the number of samples written.
    """
    count = 0
    for a, name in enumerate(KIND_NAMES[kind]):
        for person in range(n_variants):
            kw = {}
            if width:
                kw["width"] = width
            if height:
                kw["height"] = height
            if noise is not None:
                kw["noise"] = noise
            spec = SynthSpec(kind, a, seed=base_seed + person, **kw)
            pdir = os.path.join(root, name, f"p{person:02d}")
            os.makedirs(pdir, exist_ok=True)
            if kind == "static":
                img, _ = gen_static(spec)
                pnm.write(os.path.join(pdir, "s01.ppm"), img)
            else:
                frames, _, _ = gen_sequence(spec)
                pnm.write_frames(os.path.join(pdir, "s01"), frames)
            count += 1
    return count
