"""8-bit PNG I/O for LDR composites (gamma 2.0 convention)."""

from __future__ import annotations

import numpy as np
from PIL import Image as PILImage

from .image import DEFAULT_GAMMA, ImageRGB


def write_png(img: ImageRGB, path) -> None:
    """Quantize a gamma-encoded image to 8-bit RGB and write a PNG."""
    if img.is_linear:
        raise ValueError("write_png expects a gamma-encoded image; call gamma_encode first")
    quantized = np.rint(np.clip(img.data, 0.0, 1.0) * 255.0).astype(np.uint8)
    PILImage.fromarray(quantized, mode="RGB").save(path, format="PNG")


def read_png(path, gamma: float = DEFAULT_GAMMA) -> ImageRGB:
    """Read an 8-bit PNG as a gamma-tagged float image in [0, 1]."""
    with PILImage.open(path) as pil:
        rgb = pil.convert("RGB")
        data = np.asarray(rgb, dtype=np.float32) / 255.0
    return ImageRGB(data, gamma=gamma)
