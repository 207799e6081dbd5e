"""Pre-convolved illumination maps.

Diffuse shading uses order-2 SH irradiance evaluated on a lat-long grid
indexed by surface normal.  Specular shading uses a normalized Phong lobe
summed directly over environment texels (exponents up to 3**10 are far
beyond low-order SH bandwidth, so correctness wins over elegance here) and
is indexed by mirror-reflection direction.  Both maps send constant
environments to themselves.

``brute_irradiance`` is the slow quadrature reference the SH path is
validated against; keep it independent of the SH code.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .basis import (
    EnvironmentMap,
    eval_irradiance_sh,
    latlong_directions,
    project_sh9,
    softcube_weights,
)
from .image import ImageRGB

DEFAULT_PREFILTER_WIDTH = 64
DEFAULT_PREFILTER_HEIGHT = 32

# Drop lobe terms below dot_min: their weight is under 1e-14 of the peak.
_LOBE_TAIL = 1e-14


@dataclass(frozen=True)
class PrefilteredMap:
    """Environment map convolved with a reflectance lobe.

    ``kind`` is "irradiance" (indexed by normal) or "glossy" (indexed by
    reflection direction, with the Phong exponent recorded).
    """

    map: EnvironmentMap
    kind: str
    exponent: float | None = None

    def __post_init__(self):
        if self.kind not in ("irradiance", "glossy"):
            raise ValueError(f"unknown prefilter kind {self.kind!r}")
        if self.kind == "glossy" and (self.exponent is None or self.exponent < 1.0):
            raise ValueError("glossy prefilters need an exponent >= 1")

    def sample(self, dirs) -> np.ndarray:
        """Bilinear lookup at unit directions (normals or reflections)."""
        return self.map.sample_bilinear(dirs)


def irradiance_map(
    env: EnvironmentMap,
    out_width: int = DEFAULT_PREFILTER_WIDTH,
    out_height: int = DEFAULT_PREFILTER_HEIGHT,
) -> PrefilteredMap:
    """Evaluate SH irradiance at every output texel direction."""
    sh = project_sh9(env)
    dirs = latlong_directions(out_width, out_height)
    data = eval_irradiance_sh(sh, dirs)
    return PrefilteredMap(
        map=EnvironmentMap(ImageRGB(np.maximum(data, 0.0).astype(np.float32))),
        kind="irradiance",
    )


def lobe_dot_cutoff(exponent: float, env_width: int, env_height: int) -> float:
    """Smallest cosine whose lobe weight still matters at this exponent.

    Dropping texels below the cutoff only skips terms under 1e-14 of the
    peak weight, but the window must always contain at least the texel
    nearest to the lobe axis, so the cutoff never shrinks below twice the
    texel spacing of the environment grid.
    """
    if exponent < 32.0:
        return 0.0
    tail = _LOBE_TAIL ** (1.0 / exponent)
    spacing = 0.5 * np.hypot(np.pi / env_height, 2.0 * np.pi / env_width)
    return float(min(tail, np.cos(2.0 * spacing)))


def glossy_prefilter(
    env: EnvironmentMap,
    exponent: float,
    out_width: int = DEFAULT_PREFILTER_WIDTH,
    out_height: int = DEFAULT_PREFILTER_HEIGHT,
) -> PrefilteredMap:
    """Normalized Phong-lobe prefilter.

    P(r) = sum_j L_j * max(<w_j, r>, 0)**n * sa_j / sum_j max(<w_j, r>, 0)**n * sa_j

    The unit-sum lobe makes every output a convex combination of input
    texels, so constants map to themselves and outputs stay within
    [min L, max L] per channel.
    """
    total, _, _ = _glossy_with_basis(env, None, exponent, out_width, out_height)
    return PrefilteredMap(
        map=EnvironmentMap(ImageRGB(total.astype(np.float32))),
        kind="glossy",
        exponent=exponent,
    )


def glossy_prefilter_split(
    env: EnvironmentMap,
    sharpness: float,
    exponent: float,
    out_width: int = DEFAULT_PREFILTER_WIDTH,
    out_height: int = DEFAULT_PREFILTER_HEIGHT,
) -> tuple[PrefilteredMap, list[PrefilteredMap]]:
    """Glossy prefilter of an env map and of its six soft-cube splits.

    One accumulation pass produces all seven maps; the six split maps use
    the same lobe normalization as the total, so they sum to it exactly
    (matching ``glossy_prefilter(split_envmap(env)[i], n)`` texel for
    texel, up to summation order).
    """
    basis_w = softcube_weights(latlong_directions(env.width, env.height), sharpness)
    total, per_basis, _ = _glossy_with_basis(env, basis_w, exponent, out_width, out_height)
    total_map = PrefilteredMap(
        map=EnvironmentMap(ImageRGB(total.astype(np.float32))),
        kind="glossy",
        exponent=exponent,
    )
    split_maps = [
        PrefilteredMap(
            map=EnvironmentMap(ImageRGB(per_basis[:, :, i, :].astype(np.float32))),
            kind="glossy",
            exponent=exponent,
        )
        for i in range(6)
    ]
    return total_map, split_maps


def _glossy_with_basis(env, basis_weights, exponent, out_width, out_height):
    if exponent < 1.0:
        raise ValueError(f"gloss exponent must be >= 1, got {exponent}")
    env_dirs = env.directions().reshape(-1, 3)
    env_sa = env.solid_angles().reshape(-1)
    env_rgb = env.data.reshape(-1, 3).astype(np.float64)
    if basis_weights is None:
        basis_flat = np.zeros((env_rgb.shape[0], 0), dtype=np.float64)
    else:
        basis_flat = basis_weights.reshape(-1, 6)
    out_dirs = latlong_directions(out_width, out_height).reshape(-1, 3)
    total, per_basis, wsum = kernels.glossy_accumulate(
        env_rgb, env_dirs, env_sa, basis_flat, out_dirs,
        float(exponent), lobe_dot_cutoff(exponent, env.width, env.height),
    )
    total = (total / wsum[:, None]).reshape(out_height, out_width, 3)
    if basis_weights is None:
        return total, None, wsum
    per_basis = (per_basis / wsum[:, None, None]).reshape(out_height, out_width, 6, 3)
    return total, per_basis, wsum


def brute_irradiance(env: EnvironmentMap, normals) -> np.ndarray:
    """Quadrature irradiance reference: (1/pi) sum L * max(<w, n>, 0) * sa.

    Accepts one normal or an (..., 3) batch; returns float64 RGB.
    """
    n = np.asarray(normals, dtype=np.float64)
    flat = n.reshape(-1, 3)
    env_dirs = env.directions().reshape(-1, 3)
    weighted = env.data.reshape(-1, 3).astype(np.float64) * env.solid_angles().reshape(-1, 1)
    out = np.empty((flat.shape[0], 3), dtype=np.float64)
    for i, normal in enumerate(flat):
        cos = np.maximum(env_dirs @ normal, 0.0)
        out[i] = cos @ weighted / np.pi
    return out.reshape(n.shape[:-1] + (3,))
