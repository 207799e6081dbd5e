"""Light-transport layer toolkit.

Decomposes images into occlusion, diffuse illumination, albedo, and
specular layers (plus a six-direction variant), generates layered
synthetic training data, prefilters environment maps, refines coarse
decompositions to recompose a high-resolution input exactly, and scores
decompositions.
"""

from .basis import (
    CUBE_FACES,
    DEFAULT_SHARPNESS,
    EnvironmentMap,
    SH9,
    SoftCubeBasis,
    eval_irradiance_sh,
    eval_softcube,
    project_sh9,
    softcube_weights,
    split_envmap,
)
from .image import (
    DEFAULT_GAMMA,
    ExposureResult,
    ImageRGB,
    ImageScalar,
    exposure_normalize,
    gamma_decode,
    gamma_encode,
    luminance,
)
from .metrics import EvalReport, dssim, evaluate_decomposition, l2_loss, nrmse, ssim
from .model import (
    DirectionalLayerSet,
    IntrinsicPair,
    LayerSet,
    compose,
    compose_directional,
    recombination_residuals,
    shading_intrinsic,
)
from .pfm import read_pfm, write_pfm
from .pngio import read_png, write_png
from .prefilter import (
    PrefilteredMap,
    brute_irradiance,
    glossy_prefilter,
    irradiance_map,
)
from .refine import RefineConfig, project_chroma, solve_layer, upsample_layers

__version__ = "0.1.0"

__all__ = [
    "CUBE_FACES",
    "DEFAULT_GAMMA",
    "DEFAULT_SHARPNESS",
    "DirectionalLayerSet",
    "EnvironmentMap",
    "EvalReport",
    "ExposureResult",
    "ImageRGB",
    "ImageScalar",
    "IntrinsicPair",
    "LayerSet",
    "PrefilteredMap",
    "RefineConfig",
    "SH9",
    "SoftCubeBasis",
    "brute_irradiance",
    "compose",
    "compose_directional",
    "dssim",
    "eval_irradiance_sh",
    "eval_softcube",
    "evaluate_decomposition",
    "exposure_normalize",
    "gamma_decode",
    "gamma_encode",
    "glossy_prefilter",
    "irradiance_map",
    "l2_loss",
    "luminance",
    "nrmse",
    "project_chroma",
    "project_sh9",
    "read_pfm",
    "read_png",
    "recombination_residuals",
    "shading_intrinsic",
    "softcube_weights",
    "solve_layer",
    "split_envmap",
    "ssim",
    "upsample_layers",
    "write_pfm",
    "write_png",
]
