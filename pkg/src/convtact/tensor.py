"""Dense float64 tensors and their file formats.

Tensors are plain numpy arrays (C-order, float64) everywhere in this package;
a video stack is a 3-D tensor [frames, height, width], an image is 2-D [h, w]
with x = column, y = row. This module owns creation plus the NDT and PGM
codecs shared by every other module.

NDT layout (little-endian): magic b"NDT1", u32 ndim, ndim x u64 extents
(outermost first), then product(extents) f64 values row-major.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

NDT_MAGIC = b"NDT1"
# Hard cap on total elements read from a file header (payload would be 8 TiB);
# anything above this is a corrupt or hostile header, not data.
_MAX_ELEMENTS = 1 << 40


class FormatError(Exception):
    """Malformed NDT/PGM content. `offset` is the byte position of the fault."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


def tensor_create(dims, fill: float = 0.0) -> np.ndarray:
    dims = tuple(int(d) for d in dims)
    if len(dims) < 1 or any(d < 1 for d in dims):
        raise ValueError(f"every extent must be >= 1, got {dims}")
    return np.full(dims, float(fill), dtype=np.float64)


def as_tensor(a) -> np.ndarray:
    """Coerce to the canonical in-memory form: C-contiguous float64."""
    return np.ascontiguousarray(a, dtype=np.float64)


def tensor_write(t: np.ndarray, path) -> None:
    t = as_tensor(t)
    with open(path, "wb") as f:
        f.write(NDT_MAGIC)
        f.write(struct.pack("<I", t.ndim))
        f.write(struct.pack(f"<{t.ndim}Q", *t.shape))
        f.write(t.tobytes(order="C"))


def tensor_read(path) -> np.ndarray:
    blob = Path(path).read_bytes()
    if blob[:4] != NDT_MAGIC:
        raise FormatError(f"bad magic {blob[:4]!r}, expected {NDT_MAGIC!r}", offset=0)
    if len(blob) < 8:
        raise FormatError("truncated header", offset=len(blob))
    (ndim,) = struct.unpack_from("<I", blob, 4)
    if not 1 <= ndim <= 32:
        raise FormatError(f"unsupported ndim {ndim}", offset=4)
    header_end = 8 + 8 * ndim
    if len(blob) < header_end:
        raise FormatError("truncated extent list", offset=len(blob))
    dims = struct.unpack_from(f"<{ndim}Q", blob, 8)
    count = 1
    for i, d in enumerate(dims):
        if d < 1 or d > _MAX_ELEMENTS or count * d > _MAX_ELEMENTS:
            raise FormatError(f"extent overflow: {dims}", offset=8 + 8 * i)
        count *= d
    expected = header_end + 8 * count
    if len(blob) < expected:
        raise FormatError(
            f"truncated payload: need {count} f64 values, have {(len(blob) - header_end) // 8}",
            offset=len(blob),
        )
    if len(blob) > expected:
        raise FormatError("trailing bytes after payload", offset=expected)
    data = np.frombuffer(blob, dtype="<f8", count=count, offset=header_end)
    return data.astype(np.float64).reshape(dims)


def _pgm_tokens(blob: bytes):
    """Yield (token, offset) over a PGM header, skipping whitespace and # comments."""
    i = 0
    while True:
        while i < len(blob) and blob[i : i + 1].isspace():
            i += 1
        if i < len(blob) and blob[i : i + 1] == b"#":
            while i < len(blob) and blob[i : i + 1] != b"\n":
                i += 1
            continue
        if i >= len(blob):
            raise FormatError("truncated header", offset=len(blob))
        start = i
        while i < len(blob) and not blob[i : i + 1].isspace() and blob[i : i + 1] != b"#":
            i += 1
        yield blob[start:i], start, i


def image_read_pgm(path) -> np.ndarray:
    """Read binary PGM (P5, maxval 255 or 65535) to an [h, w] image in [0, 1]."""
    blob = Path(path).read_bytes()
    tokens = _pgm_tokens(blob)
    magic, start, _ = next(tokens)
    if magic == b"P2":
        raise FormatError("ASCII PGM (P2) not supported, use binary P5", offset=start)
    if magic != b"P5":
        raise FormatError(f"bad magic {magic!r}, expected b'P5'", offset=start)
    fields = []
    for _ in range(3):
        tok, start, end = next(tokens)
        try:
            fields.append((int(tok), start, end))
        except ValueError:
            raise FormatError(f"non-numeric header field {tok!r}", offset=start) from None
    (width, wo, _), (height, ho, _), (maxval, mo, raster_at) = fields
    if width < 1:
        raise FormatError(f"bad width {width}", offset=wo)
    if height < 1:
        raise FormatError(f"bad height {height}", offset=ho)
    if maxval not in (255, 65535):
        raise FormatError(f"maxval must be 255 or 65535, got {maxval}", offset=mo)
    # Exactly one whitespace byte separates the maxval from the raster.
    raster = raster_at + 1
    dtype = np.dtype(">u2") if maxval == 65535 else np.dtype("u1")
    need = width * height * dtype.itemsize
    if len(blob) - raster < need:
        raise FormatError(
            f"short raster: need {need} bytes, have {len(blob) - raster}", offset=len(blob)
        )
    pixels = np.frombuffer(blob, dtype=dtype, count=width * height, offset=raster)
    return pixels.reshape(height, width).astype(np.float64) / maxval


def image_write_pgm(img: np.ndarray, path) -> None:
    """Write an [h, w] image to 8-bit binary PGM; values clamped to [0, 1] then rounded."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError(f"image must be 2-D, got ndim {img.ndim}")
    h, w = img.shape
    quantized = np.rint(np.clip(img, 0.0, 1.0) * 255.0).astype(np.uint8)
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        f.write(quantized.tobytes(order="C"))
