"""File-name conventions for layer sets and the metadata sidecar.

A layer set with stem ``s`` lives in:

    s.composed.png   LDR composite (gamma 2.0)
    s.occ.pfm        occlusion (scalar)
    s.irr.pfm        diffuse illumination
    s.alb.pfm        albedo
    s.spec.pfm       specular shading

The directional variant adds ``s.d0.pfm`` .. ``s.d5.pfm`` and ``s.s0.pfm``
.. ``s.s5.pfm`` in soft-cube face order (+x, -x, +y, -y, +z, -z).  Split
environment maps follow ``s.env0.pfm`` .. ``s.env5.pfm``.  ``s.meta.txt``
holds ``key=value`` metadata (notably the exposure ``scale``).
"""

from __future__ import annotations

import os

from .image import ImageRGB, ImageScalar
from .model import N_DIRECTIONS, DirectionalLayerSet, LayerSet
from .pfm import read_pfm, write_pfm

COMPOSED_SUFFIX = ".composed.png"
LAYER_SUFFIXES = {
    "occlusion": ".occ.pfm",
    "irradiance": ".irr.pfm",
    "albedo": ".alb.pfm",
    "specular": ".spec.pfm",
}


def layer_paths(stem) -> dict[str, str]:
    stem = os.fspath(stem)
    return {name: stem + suffix for name, suffix in LAYER_SUFFIXES.items()}


def directional_paths(stem) -> dict[str, list[str]]:
    stem = os.fspath(stem)
    return {
        "diffuse": [f"{stem}.d{i}.pfm" for i in range(N_DIRECTIONS)],
        "specular": [f"{stem}.s{i}.pfm" for i in range(N_DIRECTIONS)],
    }


def split_env_paths(stem) -> list[str]:
    stem = os.fspath(stem)
    return [f"{stem}.env{i}.pfm" for i in range(N_DIRECTIONS)]


def composed_path(stem) -> str:
    return os.fspath(stem) + COMPOSED_SUFFIX


def meta_path(stem) -> str:
    return os.fspath(stem) + ".meta.txt"


def save_layers(stem, layers: LayerSet) -> None:
    paths = layer_paths(stem)
    write_pfm(layers.occlusion, paths["occlusion"])
    write_pfm(layers.irradiance, paths["irradiance"])
    write_pfm(layers.albedo, paths["albedo"])
    write_pfm(layers.specular, paths["specular"])


def load_layers(stem) -> LayerSet:
    paths = layer_paths(stem)
    occ = read_pfm(paths["occlusion"])
    if not isinstance(occ, ImageScalar):
        raise ValueError(f"{paths['occlusion']} should be a scalar PFM")
    images = {}
    for name in ("irradiance", "albedo", "specular"):
        img = read_pfm(paths[name])
        if not isinstance(img, ImageRGB):
            raise ValueError(f"{paths[name]} should be an RGB PFM")
        images[name] = img
    return LayerSet(occlusion=occ, **images)


def save_directional(stem, layers: DirectionalLayerSet) -> None:
    paths = directional_paths(stem)
    for i in range(N_DIRECTIONS):
        write_pfm(layers.diffuse[i], paths["diffuse"][i])
        write_pfm(layers.specular[i], paths["specular"][i])


def load_directional(stem) -> DirectionalLayerSet:
    """Directional set sharing the stem's occlusion and albedo files."""
    base = load_layers(stem)
    paths = directional_paths(stem)
    diffuse = [read_pfm(p) for p in paths["diffuse"]]
    specular = [read_pfm(p) for p in paths["specular"]]
    return DirectionalLayerSet(
        occlusion=base.occlusion,
        albedo=base.albedo,
        diffuse=tuple(diffuse),
        specular=tuple(specular),
    )


def save_meta(stem, meta: dict) -> None:
    with open(meta_path(stem), "w", encoding="utf-8") as f:
        for key in sorted(meta):
            f.write(f"{key}={meta[key]}\n")


def load_meta(stem) -> dict[str, str]:
    meta = {}
    with open(meta_path(stem), "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            meta[key] = value
    return meta
