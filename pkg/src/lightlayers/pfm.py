"""Portable float map (PFM) reader and writer.

Layout written by this module: header line ``PF`` (color) or ``Pf``
(grayscale), a ``<width> <height>`` line, a scale line fixed to ``-1.0``
(negative scale = little-endian), then rows of float32 samples in
bottom-up order.  Round trips are bit-exact for float32 data; float64
arrays are cast to float32 on write (the format is 32-bit).
"""

from __future__ import annotations

import numpy as np

from .image import ImageRGB, ImageScalar

_SCALE_LINE = b"-1.0"


class PFMError(ValueError):
    """Malformed or truncated PFM data."""


def write_pfm(img: ImageRGB | ImageScalar, path) -> None:
    if isinstance(img, ImageRGB):
        if not img.is_linear:
            raise ValueError("PFM stores linear data; decode gamma images first")
        tag = b"PF"
    elif isinstance(img, ImageScalar):
        tag = b"Pf"
    else:
        raise TypeError(f"cannot write {type(img).__name__} as PFM")
    data = img.data
    if not np.isfinite(data).all():
        raise ValueError("refusing to write non-finite values to PFM")
    payload = np.flipud(np.ascontiguousarray(data, dtype="<f4"))
    with open(path, "wb") as f:
        f.write(tag + b"\n")
        f.write(f"{img.width} {img.height}\n".encode("ascii"))
        f.write(_SCALE_LINE + b"\n")
        f.write(np.ascontiguousarray(payload).tobytes())


def _read_token_line(f, what: str) -> bytes:
    line = f.readline()
    if not line.endswith(b"\n"):
        raise PFMError(f"truncated PFM header: missing {what} line")
    return line[:-1]


def read_pfm(path) -> ImageRGB | ImageScalar:
    with open(path, "rb") as f:
        tag = _read_token_line(f, "format tag")
        if tag == b"PF":
            channels = 3
        elif tag == b"Pf":
            channels = 1
        else:
            raise PFMError(f"not a PFM file: bad tag {tag!r}")
        dims = _read_token_line(f, "dimensions").split()
        if len(dims) != 2:
            raise PFMError(f"malformed PFM dimensions line: {dims!r}")
        try:
            width, height = int(dims[0]), int(dims[1])
        except ValueError as exc:
            raise PFMError(f"malformed PFM dimensions line: {dims!r}") from exc
        if width < 1 or height < 1:
            raise PFMError(f"invalid PFM dimensions {width}x{height}")
        try:
            scale = float(_read_token_line(f, "scale"))
        except ValueError as exc:
            raise PFMError("malformed PFM scale line") from exc
        if scale == 0.0:
            raise PFMError("PFM scale must be non-zero")
        dtype = "<f4" if scale < 0 else ">f4"
        count = width * height * channels
        raw = f.read(4 * count)
        if len(raw) < 4 * count:
            raise PFMError(f"truncated PFM payload: expected {4 * count} bytes, got {len(raw)}")
    data = np.frombuffer(raw, dtype=dtype).astype(np.float32)
    shape = (height, width, 3) if channels == 3 else (height, width)
    data = np.flipud(data.reshape(shape)).copy()
    if channels == 3:
        return ImageRGB(data)
    return ImageScalar(data)
