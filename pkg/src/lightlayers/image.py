"""Image containers, gamma conversion, and exposure normalization.

Images are thin immutable wrappers around numpy arrays in row-major
``(height, width[, 3])`` layout.  Pixel data is physically linear radiance
unless an explicit gamma tag is set.  LDR interchange images carry
``gamma=2.0`` and live in [0, 1]; linear images are unbounded above.

File I/O lives in :mod:`lightlayers.pfm` and :mod:`lightlayers.pngio`;
arrays are float32 when they come from files and may be float64 when they
are intermediate computation results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Rec.709 luma weights, applied to linear RGB.
LUMA_WEIGHTS = np.array([0.2126, 0.7152, 0.0722], dtype=np.float64)

# Stored LDR composites use this gamma throughout the toolkit.
DEFAULT_GAMMA = 2.0

_FLOAT_DTYPES = (np.float32, np.float64)


def _prepare(data, ndim: int) -> np.ndarray:
    arr = np.asarray(data)
    if arr.dtype not in _FLOAT_DTYPES:
        arr = arr.astype(np.float32)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {arr.shape}")
    if ndim == 3 and arr.shape[2] != 3:
        raise ValueError(f"expected 3 channels, got {arr.shape[2]}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"degenerate image shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("image data contains non-finite values")
    return arr


@dataclass(frozen=True)
class ImageRGB:
    """RGB raster. ``gamma=None`` means linear radiance; a float gamma tag
    means the values are gamma-encoded and constrained to [0, 1]."""

    data: np.ndarray
    gamma: float | None = None

    def __post_init__(self):
        arr = _prepare(self.data, 3)
        object.__setattr__(self, "data", arr)
        if self.gamma is not None:
            if self.gamma <= 0:
                raise ValueError(f"gamma must be positive, got {self.gamma}")
            if arr.min() < 0.0 or arr.max() > 1.0:
                raise ValueError("gamma-encoded images must lie in [0, 1]")

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def is_linear(self) -> bool:
        return self.gamma is None

    @classmethod
    def constant(cls, width: int, height: int, rgb, dtype=np.float32) -> "ImageRGB":
        data = np.empty((height, width, 3), dtype=dtype)
        data[:] = np.asarray(rgb, dtype=dtype)
        return cls(data)

    @classmethod
    def zeros(cls, width: int, height: int, dtype=np.float32) -> "ImageRGB":
        return cls(np.zeros((height, width, 3), dtype=dtype))


@dataclass(frozen=True)
class ImageScalar:
    """Single-channel raster (occlusion fields, masks, luminance)."""

    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", _prepare(self.data, 2))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @classmethod
    def constant(cls, width: int, height: int, value: float, dtype=np.float32) -> "ImageScalar":
        return cls(np.full((height, width), value, dtype=dtype))


@dataclass(frozen=True)
class ExposureResult:
    """Exposure-normalized image plus the scale that was applied."""

    image: ImageRGB
    scale: float


def luminance(img: ImageRGB) -> np.ndarray:
    """Rec.709 luminance of a linear RGB image, as a float64 (H, W) array."""
    if not img.is_linear:
        raise ValueError("luminance is defined on linear images")
    return img.data.astype(np.float64) @ LUMA_WEIGHTS


def gamma_encode(img: ImageRGB, gamma: float = DEFAULT_GAMMA) -> ImageRGB:
    """Encode a linear image: clamp to [0, 1], then v ** (1/gamma).

    Clamping happens here rather than in linear storage so HDR layer data
    survives untouched until the moment an LDR image is produced.
    """
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if not img.is_linear:
        raise ValueError("gamma_encode expects a linear image")
    encoded = np.clip(img.data, 0.0, 1.0) ** np.asarray(1.0 / gamma, dtype=img.data.dtype)
    return ImageRGB(encoded, gamma=gamma)


def gamma_decode(img: ImageRGB, gamma: float | None = None) -> ImageRGB:
    """Invert :func:`gamma_encode`: v ** gamma, returning a linear image."""
    if gamma is None:
        gamma = img.gamma if img.gamma is not None else DEFAULT_GAMMA
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    decoded = np.clip(img.data, 0.0, 1.0) ** np.asarray(gamma, dtype=img.data.dtype)
    return ImageRGB(decoded, gamma=None)


def luminance_quantile(img: ImageRGB, percentile: float) -> float:
    """Nearest-rank quantile of per-pixel luminance over all pixels.

    Index convention: ceil(p * N) - 1 into the ascending sorted array.
    """
    if not 0.0 < percentile <= 1.0:
        raise ValueError(f"percentile must be in (0, 1], got {percentile}")
    lum = np.sort(luminance(img).ravel())
    idx = int(np.ceil(percentile * lum.size)) - 1
    return float(lum[idx])


def exposure_normalize(img: ImageRGB, percentile: float = 0.95) -> ExposureResult:
    """Scale a linear image so its luminance percentile maps to 1.

    The quantile is taken deterministically over all pixels (nearest rank).
    Values may exceed 1 after scaling; they are only clamped when the image
    is gamma-encoded for LDR output.
    """
    lum = luminance(img)
    if not (lum > 0.0).any():
        raise ValueError("cannot normalize exposure of an all-black image")
    q = luminance_quantile(img, percentile)
    if q <= 0.0:
        raise ValueError(f"luminance {percentile:g}-quantile is zero; image is too dark")
    scale = 1.0 / q
    scaled = img.data * np.asarray(scale, dtype=img.data.dtype)
    return ExposureResult(image=ImageRGB(scaled), scale=scale)
