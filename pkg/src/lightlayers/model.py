"""Image formation models and their composition operators.

The non-directional model forms a pixel color from four layers:

    C = O * (albedo * irradiance + specular)

where O is the unoccluded visibility fraction in [0, 1] (O = 1 means fully
visible; the multiplicative role in the model forces visibility semantics),
irradiance is the diffuse illumination color, albedo the diffuse
reflectance in [0, 1], and specular the combined view-dependent highlight
term.

The directional model replaces irradiance and specular with six
per-direction layers each, composed as

    C = O * (albedo * sum(D_i) + sum(S_i))
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image import ImageRGB, ImageScalar

N_DIRECTIONS = 6

# Division guard for occlusion in the normalized recombination residuals.
RESIDUAL_EPS = 1e-4


def _check_same_size(name: str, img, width: int, height: int) -> None:
    if img.width != width or img.height != height:
        raise ValueError(
            f"{name} is {img.width}x{img.height}, expected {width}x{height}"
        )


@dataclass(frozen=True)
class LayerSet:
    """One non-directional decomposition {O, irradiance, albedo, specular}.

    Construction validates dimensions and the hard range constraints
    (O and albedo in [0, 1], irradiance >= 0).  Specular is allowed to be
    signed because exact refinement stores the signed residual there; use
    :meth:`validate_ranges` where a physically non-negative set is required.
    """

    occlusion: ImageScalar
    irradiance: ImageRGB
    albedo: ImageRGB
    specular: ImageRGB

    def __post_init__(self):
        w, h = self.occlusion.width, self.occlusion.height
        for name in ("irradiance", "albedo", "specular"):
            _check_same_size(name, getattr(self, name), w, h)
        occ = self.occlusion.data
        if occ.min() < 0.0 or occ.max() > 1.0:
            raise ValueError("occlusion must lie in [0, 1]")
        alb = self.albedo.data
        if alb.min() < 0.0 or alb.max() > 1.0:
            raise ValueError("albedo must lie in [0, 1]")
        if self.irradiance.data.min() < 0.0:
            raise ValueError("irradiance must be non-negative")

    @property
    def width(self) -> int:
        return self.occlusion.width

    @property
    def height(self) -> int:
        return self.occlusion.height

    def validate_ranges(self) -> None:
        """Additionally require non-negative specular (pre-refinement data)."""
        if self.specular.data.min() < 0.0:
            raise ValueError("specular must be non-negative")


@dataclass(frozen=True)
class DirectionalLayerSet:
    """Decomposition {O, albedo, D_0..5, S_0..5} for the six-direction model."""

    occlusion: ImageScalar
    albedo: ImageRGB
    diffuse: tuple[ImageRGB, ...]
    specular: tuple[ImageRGB, ...]

    def __post_init__(self):
        object.__setattr__(self, "diffuse", tuple(self.diffuse))
        object.__setattr__(self, "specular", tuple(self.specular))
        if len(self.diffuse) != N_DIRECTIONS or len(self.specular) != N_DIRECTIONS:
            raise ValueError(
                f"expected {N_DIRECTIONS} diffuse and specular layers, got "
                f"{len(self.diffuse)} and {len(self.specular)}"
            )
        w, h = self.occlusion.width, self.occlusion.height
        _check_same_size("albedo", self.albedo, w, h)
        for i, img in enumerate(self.diffuse):
            _check_same_size(f"diffuse[{i}]", img, w, h)
        for i, img in enumerate(self.specular):
            _check_same_size(f"specular[{i}]", img, w, h)
        occ = self.occlusion.data
        if occ.min() < 0.0 or occ.max() > 1.0:
            raise ValueError("occlusion must lie in [0, 1]")
        alb = self.albedo.data
        if alb.min() < 0.0 or alb.max() > 1.0:
            raise ValueError("albedo must lie in [0, 1]")

    @property
    def width(self) -> int:
        return self.occlusion.width

    @property
    def height(self) -> int:
        return self.occlusion.height


@dataclass(frozen=True)
class IntrinsicPair:
    """Classic intrinsic-image reduction: shading = O * irradiance, plus albedo."""

    shading: ImageRGB
    reflectance: ImageRGB


def compose(layers: LayerSet) -> ImageRGB:
    """Evaluate C = O * (albedo * irradiance + specular) per pixel/channel."""
    o = layers.occlusion.data[..., None]
    c = o * (layers.albedo.data * layers.irradiance.data + layers.specular.data)
    return ImageRGB(c)


def compose_directional(layers: DirectionalLayerSet) -> ImageRGB:
    """Evaluate C = O * (albedo * sum(D_i) + sum(S_i)) per pixel/channel."""
    d_total = layers.diffuse[0].data.copy()
    s_total = layers.specular[0].data.copy()
    for i in range(1, N_DIRECTIONS):
        d_total += layers.diffuse[i].data
        s_total += layers.specular[i].data
    o = layers.occlusion.data[..., None]
    return ImageRGB(o * (layers.albedo.data * d_total + s_total))


def shading_intrinsic(layers: LayerSet) -> IntrinsicPair:
    """Collapse occlusion and diffuse illumination into one shading image.

    shading = O * irradiance, reflectance = albedo; the specular layer is
    ignored, so shading * reflectance equals the specular-free composition.
    """
    shading = layers.occlusion.data[..., None] * layers.irradiance.data
    return IntrinsicPair(shading=ImageRGB(shading), reflectance=layers.albedo)


def recombination_residuals(
    layers: LayerSet,
    composite: ImageRGB,
    reference: LayerSet | None = None,
    eps: float = RESIDUAL_EPS,
) -> tuple[ImageRGB, ImageRGB, ImageRGB]:
    """The three recombination residual images for a decomposition of C.

    r1 = C - O * (I*rho + S)        the layers reproduce the input
    r2 = C / O - (I*rho + S)        the layers explain the input without O
    r3 = C / O - S - I*rho          diffuse light explains the rest

    All three are signed RGB-difference images; norms live in
    :mod:`lightlayers.metrics`.  Divisions are guarded with ``eps``.

    With a single layer set, r2 and r3 describe the same quantity; where
    the division is live (O >= eps) they are computed in the algebraically
    equal factored form r1 / O, which cancels bitwise whenever C was
    composed from the layers.  Passing ``reference`` evaluates r2 and r3
    with the reference set's occlusion (and, for r3, its specular) in
    place of the decomposition's own, which is the form used when scoring
    a prediction against ground truth; the two residuals then genuinely
    differ.
    """
    if composite.width != layers.width or composite.height != layers.height:
        raise ValueError(
            f"composite is {composite.width}x{composite.height}, layers are "
            f"{layers.width}x{layers.height}"
        )
    c = composite.data.astype(np.float64)
    o = layers.occlusion.data.astype(np.float64)[..., None]
    diffuse = layers.albedo.data.astype(np.float64) * layers.irradiance.data.astype(np.float64)
    # r1 goes through compose() itself so that a composite produced by
    # compose cancels bitwise, whatever dtype the layers carry.
    r1 = c - compose(layers).data.astype(np.float64)
    if reference is None:
        # Where the division is live (O >= eps), C/O - (I*rho + S) is evaluated
        # in the algebraically equal factored form r1/O, which cancels exactly
        # for consistent input; guarded pixels use the literal formula.
        s = layers.specular.data.astype(np.float64)
        r2 = np.where(o >= eps, r1 / np.maximum(o, eps), c / eps - (diffuse + s))
        r3 = r2.copy()
    else:
        _check_same_size("reference", reference.occlusion, layers.width, layers.height)
        o_ref = np.maximum(reference.occlusion.data.astype(np.float64)[..., None], eps)
        s = layers.specular.data.astype(np.float64)
        r2 = c / o_ref - (diffuse + s)
        r3 = c / o_ref - reference.specular.data.astype(np.float64) - diffuse
    return ImageRGB(r1), ImageRGB(r2), ImageRGB(r3)
