"""Energy-conserving layer upsampling.

Lifts a fixed-resolution layer decomposition to the resolution of a given
high-resolution image so that the composition equation reproduces that
image, while drifting as little as possible from the coarse decomposition.

Every high-resolution pixel is treated independently: layers initialize
from bilinear upsampling (see :func:`initialize_hd_layers`), then a fixed
number of sweeps each solve one layer in closed form from the color and
the other three (order: specular, irradiance, albedo, occlusion), blend
the solution in with a small weight, and back-project out-of-cube values
to [0, 1].  Irradiance updates are chroma-locked: the solved value only
rescales the current irradiance, never changes its channel ratios.  An
optional final unblended specular solve makes the recomposition exact
wherever occlusion is at least the division guard; that final specular
value is stored signed and unclamped.

Refinement operates inside the unit RGB cube (the target is an LDR image
decoded to linear), so initialization clamps the upsampled layers to
[0, 1].  Pixels whose initial composition already equals the target color
exactly are returned untouched, which makes consistent inputs a true
fixed point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .image import LUMA_WEIGHTS, ImageRGB, ImageScalar
from .model import LayerSet

SOLVE_ORDER = ("S", "I", "rho", "O")


@dataclass(frozen=True)
class RefineConfig:
    iterations: int = 100
    blend_weight: float = 0.001
    epsilon: float = 1e-4
    exact_finalize: bool = True

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0.0 < self.blend_weight <= 1.0:
            raise ValueError("blend_weight must be in (0, 1]")
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be positive")


def bilinear_resize(data: np.ndarray, out_width: int, out_height: int) -> np.ndarray:
    """Half-pixel-centered bilinear resize with edge clamping; float64 out."""
    h, w = data.shape[:2]
    u = (np.arange(out_width, dtype=np.float64) + 0.5) * (w / out_width) - 0.5
    v = (np.arange(out_height, dtype=np.float64) + 0.5) * (h / out_height) - 0.5
    u0 = np.floor(u).astype(np.int64)
    v0 = np.floor(v).astype(np.int64)
    fu = u - u0
    fv = v - v0
    u0c = np.clip(u0, 0, w - 1)
    u1c = np.clip(u0 + 1, 0, w - 1)
    v0c = np.clip(v0, 0, h - 1)
    v1c = np.clip(v0 + 1, 0, h - 1)

    d = data.astype(np.float64)
    squeeze = d.ndim == 2
    if squeeze:
        d = d[..., None]
    fu = fu[None, :, None]
    fv = fv[:, None, None]
    top = d[v0c][:, u0c] * (1.0 - fu) + d[v0c][:, u1c] * fu
    bot = d[v1c][:, u0c] * (1.0 - fu) + d[v1c][:, u1c] * fu
    out = top * (1.0 - fv) + bot * fv
    return out[..., 0] if squeeze else out


def initialize_hd_layers(layers_lo: LayerSet, out_width: int, out_height: int) -> LayerSet:
    """Bilinear-upsampled, cube-clamped starting point for refinement."""
    if out_width < layers_lo.width or out_height < layers_lo.height:
        raise ValueError(
            f"target {out_width}x{out_height} is smaller than the layers "
            f"{layers_lo.width}x{layers_lo.height}"
        )

    def up(data):
        return np.clip(bilinear_resize(data, out_width, out_height), 0.0, 1.0)

    return LayerSet(
        occlusion=ImageScalar(up(layers_lo.occlusion.data)),
        irradiance=ImageRGB(up(layers_lo.irradiance.data)),
        albedo=ImageRGB(up(layers_lo.albedo.data)),
        specular=ImageRGB(up(layers_lo.specular.data)),
    )


def project_chroma(candidate, reference) -> np.ndarray:
    """Rescale ``reference`` to the candidate's luminance, keeping its chroma.

    Works on single RGB triples or (..., 3) batches.  Where the reference
    has no positive luminance there is no chroma to keep, so the candidate
    passes through unchanged.
    """
    cand = np.asarray(candidate, dtype=np.float64)
    ref = np.asarray(reference, dtype=np.float64)
    lum_c = cand @ LUMA_WEIGHTS
    lum_r = ref @ LUMA_WEIGHTS
    scale = lum_c / np.where(lum_r > 0.0, lum_r, 1.0)
    return np.where((lum_r > 0.0)[..., None], ref * scale[..., None], cand)


def solve_layer(c, occ, irr, alb, spec, which: str, eps: float = 1e-4):
    """Closed-form solve of one layer from the color and the other three.

    S = C/O - I*rho and rho = (C/O - S)/I per channel; I likewise but then
    chroma-locked against the current irradiance; O is the least-squares
    fit <C, v>/<v, v> with v = I*rho + S, collapsing the three channels to
    the one scalar, returned unclamped.

    For a pixel already consistent with the color (C == O * (I*rho + S)
    exactly) every solve returns the current value unchanged, and so do
    solves whose divisor falls below ``eps``.
    """
    c = np.asarray(c, dtype=np.float64)
    irr = np.asarray(irr, dtype=np.float64)
    alb = np.asarray(alb, dtype=np.float64)
    spec = np.asarray(spec, dtype=np.float64)
    occ = float(occ)
    current = {"S": spec, "I": irr, "rho": alb, "O": occ}.get(which)
    if current is None:
        raise ValueError(f"unknown layer {which!r}; expected one of {SOLVE_ORDER}")
    if np.array_equal(occ * (alb * irr + spec), c):
        return current if which == "O" else current.copy()
    if which == "O":
        v = irr * alb + spec
        den = float(v @ v)
        if den < eps * eps:
            return occ
        return float(c @ v / den)
    if occ < eps:
        return current.copy()
    q = c / occ
    if which == "S":
        return q - irr * alb
    if which == "I":
        cand = np.where(alb >= eps, (q - spec) / np.maximum(alb, eps), irr)
        return project_chroma(cand, irr)
    return np.where(irr >= eps, (q - spec) / np.maximum(irr, eps), alb)


def upsample_layers(
    layers_lo: LayerSet, c_hd: ImageRGB, cfg: RefineConfig | None = None
) -> LayerSet:
    """Refine bilinear-upsampled layers until they recompose to ``c_hd``.

    ``c_hd`` must be linear (decode gamma images first) and at least as
    large as the coarse layers.  Returns float64 layers; with
    ``exact_finalize`` the specular layer holds the signed exact residual
    wherever occlusion >= epsilon.
    """
    if cfg is None:
        cfg = RefineConfig()
    if not c_hd.is_linear:
        raise ValueError("c_hd must be linear; gamma_decode it first")
    w, h = c_hd.width, c_hd.height
    init = initialize_hd_layers(layers_lo, w, h)
    occ = init.occlusion.data.reshape(-1).copy()
    irr = init.irradiance.data.reshape(-1, 3).copy()
    alb = init.albedo.data.reshape(-1, 3).copy()
    spec = init.specular.data.reshape(-1, 3).copy()

    c = c_hd.data.astype(np.float64).reshape(-1, 3)
    consistent = (occ[:, None] * (alb * irr + spec) == c).all(axis=1)
    frozen = (occ[consistent], irr[consistent], alb[consistent], spec[consistent])

    kernels.refine_sweeps(
        c, occ, irr, alb, spec,
        int(cfg.iterations), float(cfg.blend_weight), float(cfg.epsilon),
        LUMA_WEIGHTS.copy(),
    )
    if cfg.exact_finalize:
        ok = occ >= cfg.epsilon
        spec[ok] = c[ok] / occ[ok, None] - irr[ok] * alb[ok]

    occ[consistent], irr[consistent] = frozen[0], frozen[1]
    alb[consistent], spec[consistent] = frozen[2], frozen[3]

    return LayerSet(
        occlusion=ImageScalar(occ.reshape(h, w)),
        irradiance=ImageRGB(irr.reshape(h, w, 3)),
        albedo=ImageRGB(alb.reshape(h, w, 3)),
        specular=ImageRGB(spec.reshape(h, w, 3)),
    )
