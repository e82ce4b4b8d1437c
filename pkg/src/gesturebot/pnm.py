"""Binary netpbm I/O: P5 (gray / mask) and P6 (RGB), maxval 255."""
import os
import re

import numpy as np

from .errors import ParseError
from .imaging import GRAY, RGB, Image

_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n?)*(\S+)")


def _header(buf):
    fields = []
    pos = 0
    for _ in range(4):
        m = _TOKEN.match(buf, pos)
        if m is None:
            raise ParseError("truncated netpbm header")
        fields.append(m.group(1))
        pos = m.end()
    # exactly one whitespace byte separates maxval from the raster
    if pos >= len(buf) or buf[pos:pos + 1] not in (b" ", b"\t", b"\n", b"\r"):
        raise ParseError("missing separator after netpbm header")
    return fields, pos + 1


def decode(buf):
    if len(buf) < 2 or buf[:2] not in (b"P5", b"P6"):
        raise ParseError("not a binary PGM/PPM file (expected P5 or P6 magic)")
    fields, start = _header(buf)
    magic = fields[0]
    try:
        width, height, maxval = (int(f) for f in fields[1:])
    except ValueError:
        raise ParseError(f"non-integer netpbm header fields {fields[1:]!r}") from None
    if width < 1 or height < 1:
        raise ParseError(f"invalid dimensions {width}x{height}")
    if maxval != 255:
        raise ParseError(f"only maxval 255 is supported, got {maxval}")
    channels = 3 if magic == b"P6" else 1
    need = width * height * channels
    raster = buf[start:start + need]
    if len(raster) < need:
        raise ParseError(f"raster truncated: expected {need} bytes, got {len(raster)}")
    data = np.frombuffer(raster, dtype=np.uint8)
    if channels == 3:
        return Image(data.reshape(height, width, 3), RGB)
    return Image(data.reshape(height, width), GRAY)


def read(path):
    with open(path, "rb") as fh:
        return decode(fh.read())


def encode(img):
    if isinstance(img, Image):
        data = img.data
    else:
        data = np.asarray(img)
        if data.dtype == bool:
            data = data.astype(np.uint8) * 255
    data = np.ascontiguousarray(data, dtype=np.uint8)
    if data.ndim == 2:
        magic = b"P5"
    elif data.ndim == 3 and data.shape[2] == 3:
        magic = b"P6"
    else:
        raise ValueError(f"cannot encode array of shape {data.shape}")
    h, w = data.shape[:2]
    return magic + f"\n{w} {h}\n255\n".encode() + data.tobytes()


def write(path, img):
    """Write an Image, uint8 array, or boolean mask (stored as 0/255)."""
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(encode(img))
    os.replace(tmp, path)


def read_mask(path):
    return np.asarray(read(path).data) >= 128


def read_frames(directory):
    """Load the numbered frames of a sequence directory in filename order."""
    names = sorted(n for n in os.listdir(directory) if n.lower().endswith((".ppm", ".pgm")))
    if not names:
        raise ParseError(f"no .ppm/.pgm frames in {directory}")
    return [read(os.path.join(directory, n)) for n in names]


def write_frames(directory, frames, prefix="frame_"):
    os.makedirs(directory, exist_ok=True)
    for i, frame in enumerate(frames, start=1):
        ext = "ppm" if np.asarray(frame).ndim == 3 else "pgm"
        write(os.path.join(directory, f"{prefix}{i:04d}.{ext}"), frame)
