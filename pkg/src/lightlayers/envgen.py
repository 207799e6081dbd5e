"""Procedural HDR environment maps.

Bundled stand-ins for captured lighting: a vertical sky gradient plus a
few randomized area lights, with presets roughly covering outdoor sun,
indoor fixtures, and studio softboxes.  ``smooth_envmap`` produces
low-frequency maps (wide cosine lobes only) for validating the SH
irradiance path against brute-force quadrature.

All maps are 512x256 by default, float32, strictly positive.
"""

from __future__ import annotations

import numpy as np

from .basis import EnvironmentMap, latlong_directions, normalize_directions
from .image import ImageRGB

PRESETS = ("outdoor", "indoor", "studio")

DEFAULT_ENV_WIDTH = 512
DEFAULT_ENV_HEIGHT = 256


def _gradient(dirs, zenith, horizon, ground):
    """Vertical gradient: horizon->zenith above, dim ground below."""
    y = dirs[..., 1]
    up = np.clip(y, 0.0, 1.0)[..., None]
    down = np.clip(-y, 0.0, 1.0)[..., None]
    sky = horizon + (zenith - horizon) * np.sqrt(up)
    return sky * (1.0 - down) + ground * down


def _area_light(dirs, axis, angular_radius, softness):
    """Smooth disc of light around an axis; 1 inside, eased falloff at the rim."""
    cos_r = np.cos(angular_radius)
    cos_soft = np.cos(angular_radius * (1.0 + softness))
    d = dirs @ axis
    t = np.clip((d - cos_soft) / max(cos_r - cos_soft, 1e-9), 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def _random_axis(rng, min_y=-0.2):
    while True:
        v = rng.normal(size=3)
        norm = np.linalg.norm(v)
        if norm < 1e-9:
            continue
        v = v / norm
        if v[1] >= min_y:
            return v


def random_envmap(
    seed,
    preset: str = "outdoor",
    width: int = DEFAULT_ENV_WIDTH,
    height: int = DEFAULT_ENV_HEIGHT,
) -> EnvironmentMap:
    """Deterministic random environment in one of the bundled presets."""
    if preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}; expected one of {PRESETS}")
    rng = np.random.default_rng(seed)
    dirs = latlong_directions(width, height)
    warm = rng.uniform(0.7, 1.0, size=3)

    if preset == "outdoor":
        zenith = np.array([0.35, 0.5, 0.9]) * rng.uniform(0.6, 1.4)
        horizon = np.array([0.8, 0.85, 1.0]) * rng.uniform(0.5, 1.2)
        ground = np.array([0.25, 0.22, 0.18]) * rng.uniform(0.4, 1.0)
        radiance = _gradient(dirs, zenith, horizon, ground)
        sun_axis = _random_axis(rng, min_y=0.25)
        sun = _area_light(dirs, sun_axis, rng.uniform(0.03, 0.1), 0.6)
        radiance += sun[..., None] * (warm * rng.uniform(20.0, 80.0))
    elif preset == "indoor":
        base = np.array([0.35, 0.3, 0.25]) * rng.uniform(0.3, 0.8)
        radiance = _gradient(dirs, base * 1.4, base, base * 0.5)
        for _ in range(rng.integers(2, 5)):
            axis = _random_axis(rng, min_y=0.0)
            lobe = _area_light(dirs, axis, rng.uniform(0.1, 0.35), 0.8)
            color = rng.uniform(0.5, 1.0, size=3) * warm
            radiance += lobe[..., None] * color * rng.uniform(3.0, 12.0)
    else:  # studio
        base = np.full(3, rng.uniform(0.02, 0.06))
        radiance = np.broadcast_to(base, dirs.shape).copy()
        for _ in range(rng.integers(2, 4)):
            axis = _random_axis(rng, min_y=-0.1)
            lobe = _area_light(dirs, axis, rng.uniform(0.25, 0.55), 0.5)
            color = rng.uniform(0.7, 1.0, size=3)
            radiance += lobe[..., None] * color * rng.uniform(5.0, 18.0)

    radiance = np.maximum(radiance, 1e-4)
    return EnvironmentMap(ImageRGB(radiance.astype(np.float32)))


def smooth_envmap(
    seed,
    width: int = DEFAULT_ENV_WIDTH,
    height: int = DEFAULT_ENV_HEIGHT,
) -> EnvironmentMap:
    """Low-frequency test map: gradient plus 1-3 wide cosine lobes."""
    rng = np.random.default_rng(seed)
    dirs = latlong_directions(width, height)
    zenith = rng.uniform(0.3, 1.0, size=3)
    horizon = rng.uniform(0.2, 0.8, size=3)
    ground = rng.uniform(0.05, 0.3, size=3)
    radiance = _gradient(dirs, zenith, horizon, ground)
    for _ in range(rng.integers(1, 4)):
        axis = normalize_directions(rng.normal(size=3))
        power = rng.uniform(1.0, 4.0)
        lobe = np.clip(dirs @ axis, 0.0, 1.0) ** power
        radiance += lobe[..., None] * rng.uniform(0.3, 1.5, size=3)
    radiance = np.maximum(radiance, 1e-4)
    return EnvironmentMap(ImageRGB(radiance.astype(np.float32)))
