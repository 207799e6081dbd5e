"""Directional illumination bases and lat-long environment maps.

Two bases are provided: the six-face soft-cube partition of unity (clamped
face-axis dot products raised to a sharpening power and normalized across
faces) and order-2 real spherical harmonics for irradiance.

Conventions fixed here and relied on by everything downstream:

* Environment maps are lat-long with width = 2 * height.  Row r maps to
  polar angle theta = pi * (r + 0.5) / height from the top (+y pole),
  column c to azimuth phi = 2 * pi * (c + 0.5) / width.
* Up axis is +y:  direction(theta, phi) = (sin t cos p, cos t, sin t sin p).
* Cube faces are ordered (+x, -x, +y, -y, +z, -z); this order is part of
  the d0..d5 / s0..s5 / env0..env5 file-name contract.
* A texel's solid angle is (2 pi / W) * (pi / H) * sin(theta).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .image import ImageRGB

DEFAULT_SHARPNESS = 20.0

CUBE_FACES = np.array(
    [
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ],
    dtype=np.float64,
)

# Real SH basis constants, orders 0..2.
_C0 = 0.28209479177387814  # 1 / (2 sqrt(pi))
_C1 = 0.4886025119029199   # sqrt(3 / (4 pi))
_C2 = 1.0925484305920792   # sqrt(15 / (4 pi))
_C3 = 0.31539156525252005  # sqrt(5 / (16 pi))
_C4 = 0.5462742152960396   # sqrt(15 / (16 pi))

# Clamped-cosine convolution weights per coefficient (pi, 2pi/3, pi/4 bands).
_A_HAT = np.array(
    [np.pi] + [2.0 * np.pi / 3.0] * 3 + [np.pi / 4.0] * 5, dtype=np.float64
)


@dataclass(frozen=True)
class SoftCubeBasis:
    """Six-direction partition of unity with sharpening exponent sigma."""

    sharpness: float = DEFAULT_SHARPNESS
    faces: np.ndarray = field(default_factory=lambda: CUBE_FACES.copy())

    def __post_init__(self):
        if self.sharpness <= 0:
            raise ValueError(f"sharpness must be positive, got {self.sharpness}")
        faces = np.asarray(self.faces, dtype=np.float64)
        if faces.shape != (6, 3) or not np.array_equal(np.abs(faces).sum(axis=1), np.ones(6)):
            raise ValueError("faces must be the six signed unit axes")
        object.__setattr__(self, "faces", faces)


def normalize_directions(dirs) -> np.ndarray:
    """Normalize an (..., 3) array of vectors to unit length."""
    d = np.asarray(dirs, dtype=np.float64)
    norm = np.linalg.norm(d, axis=-1, keepdims=True)
    if (norm == 0).any():
        raise ValueError("cannot normalize a zero vector")
    return d / norm


def softcube_weights(dirs, sharpness: float = DEFAULT_SHARPNESS) -> np.ndarray:
    """Evaluate all six soft-cube weights at unit directions.

    Returns an (..., 6) array with max(<dir, face>, 0) ** sigma per face,
    normalized so the six weights sum to exactly 1 at every direction.
    """
    if sharpness <= 0:
        raise ValueError(f"sharpness must be positive, got {sharpness}")
    d = np.asarray(dirs, dtype=np.float64)
    dots = np.maximum(d @ CUBE_FACES.T, 0.0)
    powered = dots**sharpness
    total = powered.sum(axis=-1, keepdims=True)
    return powered / total


def eval_softcube(direction, face: int, sharpness: float = DEFAULT_SHARPNESS) -> float:
    """Weight of one cube face at one unit direction."""
    if not 0 <= face < 6:
        raise ValueError(f"face index must be in [0, 6), got {face}")
    d = np.asarray(direction, dtype=np.float64)
    if abs(np.linalg.norm(d) - 1.0) > 1e-6:
        raise ValueError("direction must be unit length")
    return float(softcube_weights(d, sharpness)[face])


@dataclass(frozen=True)
class EnvironmentMap:
    """Lat-long HDR radiance map with non-negative values and 2:1 aspect."""

    image: ImageRGB

    def __post_init__(self):
        if not self.image.is_linear:
            raise ValueError("environment maps must hold linear radiance")
        if self.image.width != 2 * self.image.height:
            raise ValueError(
                f"lat-long maps need width = 2 * height, got "
                f"{self.image.width}x{self.image.height}"
            )
        if self.image.data.min() < 0.0:
            raise ValueError("environment radiance must be non-negative")

    @property
    def width(self) -> int:
        return self.image.width

    @property
    def height(self) -> int:
        return self.image.height

    @property
    def data(self) -> np.ndarray:
        return self.image.data

    def directions(self) -> np.ndarray:
        """Unit direction of every texel center as an (H, W, 3) float64 array."""
        return latlong_directions(self.width, self.height)

    def solid_angles(self) -> np.ndarray:
        """Solid angle of every texel as an (H, W) float64 array."""
        h, w = self.height, self.width
        theta = np.pi * (np.arange(h, dtype=np.float64) + 0.5) / h
        sa_row = (2.0 * np.pi / w) * (np.pi / h) * np.sin(theta)
        return np.broadcast_to(sa_row[:, None], (h, w)).copy()

    def sample_bilinear(self, dirs) -> np.ndarray:
        """Bilinear radiance lookup at unit directions; (..., 3) float64."""
        return _bilinear_latlong(self.data, np.asarray(dirs, dtype=np.float64))


def latlong_directions(width: int, height: int) -> np.ndarray:
    theta = np.pi * (np.arange(height, dtype=np.float64) + 0.5) / height
    phi = 2.0 * np.pi * (np.arange(width, dtype=np.float64) + 0.5) / width
    sin_t = np.sin(theta)[:, None]
    dirs = np.empty((height, width, 3), dtype=np.float64)
    dirs[..., 0] = sin_t * np.cos(phi)[None, :]
    dirs[..., 1] = np.cos(theta)[:, None]
    dirs[..., 2] = sin_t * np.sin(phi)[None, :]
    return dirs


def _bilinear_latlong(data: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    h, w = data.shape[:2]
    y = np.clip(dirs[..., 1], -1.0, 1.0)
    theta = np.arccos(y)
    phi = np.arctan2(dirs[..., 2], dirs[..., 0]) % (2.0 * np.pi)
    u = phi / (2.0 * np.pi) * w - 0.5
    v = theta / np.pi * h - 0.5
    u0 = np.floor(u).astype(np.int64)
    v0 = np.floor(v).astype(np.int64)
    fu = u - u0
    fv = v - v0
    u0w = u0 % w
    u1w = (u0 + 1) % w
    v0c = np.clip(v0, 0, h - 1)
    v1c = np.clip(v0 + 1, 0, h - 1)
    channels = data.shape[2] if data.ndim == 3 else 1
    plane = data.reshape(h * w, channels).astype(np.float64)
    f00 = plane[v0c * w + u0w]
    f10 = plane[v0c * w + u1w]
    f01 = plane[v1c * w + u0w]
    f11 = plane[v1c * w + u1w]
    fu = fu[..., None]
    fv = fv[..., None]
    top = f00 * (1.0 - fu) + f10 * fu
    bot = f01 * (1.0 - fu) + f11 * fu
    out = top * (1.0 - fv) + bot * fv
    out = out.reshape(dirs.shape[:-1] + (channels,))
    return out[..., 0] if data.ndim == 2 else out


def split_envmap(
    env: EnvironmentMap, basis: SoftCubeBasis | None = None
) -> list[EnvironmentMap]:
    """Split radiance into six per-face maps, L_i = L * b_i per texel.

    The soft-cube weights form a partition of unity, so the six outputs
    sum back to the input texel-exactly (up to float rounding).
    """
    if basis is None:
        basis = SoftCubeBasis()
    weights = softcube_weights(env.directions(), basis.sharpness)
    dtype = env.data.dtype
    out = []
    for i in range(6):
        data = (env.data * weights[..., i, None].astype(dtype)).astype(dtype)
        out.append(EnvironmentMap(ImageRGB(data)))
    return out


@dataclass(frozen=True)
class SH9:
    """Order-2 real SH coefficients of a radiance map, one column per channel."""

    coeffs: np.ndarray  # (9, 3) float64

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=np.float64)
        if arr.shape != (9, 3):
            raise ValueError(f"expected (9, 3) coefficients, got {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("SH coefficients must be finite")
        object.__setattr__(self, "coeffs", arr)

    def __add__(self, other: "SH9") -> "SH9":
        return SH9(self.coeffs + other.coeffs)


def sh_basis(dirs) -> np.ndarray:
    """Evaluate the 9 real SH basis functions at unit directions; (..., 9)."""
    d = np.asarray(dirs, dtype=np.float64)
    x, y, z = d[..., 0], d[..., 1], d[..., 2]
    out = np.empty(d.shape[:-1] + (9,), dtype=np.float64)
    out[..., 0] = _C0
    out[..., 1] = _C1 * y
    out[..., 2] = _C1 * z
    out[..., 3] = _C1 * x
    out[..., 4] = _C2 * x * y
    out[..., 5] = _C2 * y * z
    out[..., 6] = _C3 * (3.0 * z * z - 1.0)
    out[..., 7] = _C2 * x * z
    out[..., 8] = _C4 * (x * x - y * y)
    return out


def project_sh9(env: EnvironmentMap) -> SH9:
    """Project a radiance map onto order-2 SH by solid-angle-weighted texel sums."""
    basis = sh_basis(env.directions()).reshape(-1, 9)
    sa = env.solid_angles().reshape(-1)
    radiance = env.data.reshape(-1, 3).astype(np.float64)
    coeffs = basis.T @ (radiance * sa[:, None])
    return SH9(coeffs)


def eval_irradiance_sh(sh: SH9, normals) -> np.ndarray:
    """Irradiance at unit normals from SH coefficients, as (..., 3) float64.

    Uses the order-2 clamped-cosine convolution weights, normalized so a
    constant radiance map reproduces itself:
    E(n) = (1/pi) * integral of L(w) * max(<w, n>, 0) over the sphere.
    """
    weighted = (_A_HAT[:, None] / np.pi) * sh.coeffs
    return sh_basis(normals) @ weighted
