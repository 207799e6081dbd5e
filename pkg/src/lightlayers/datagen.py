"""Synthetic layered training data on procedural scenes.

Each record renders a small primitive scene (ground plane plus spheres and
boxes) under a procedural HDR environment, producing every layer of the
image-formation model individually: ray-cast primary visibility only, no
indirect light.  Occlusion is the fraction of cosine-weighted hemisphere
rays that escape the scene within a range tied to the scene size.  Diffuse
shading comes from the SH irradiance map indexed by normal, specular from
a normalized Phong prefilter indexed by the mirror direction.

The composite is exposure-normalized (0.95 luminance percentile -> 1),
gamma-encoded at 2.0, and stored as 8-bit PNG; layers are stored in raw
linear units as PFM, with the exposure scale recorded in the metadata
sidecar, so ``compose(layers) * scale`` reproduces the composite after
gamma encoding.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .basis import (
    DEFAULT_SHARPNESS,
    EnvironmentMap,
    SoftCubeBasis,
    normalize_directions,
    softcube_weights,
    split_envmap,
)
from .envgen import DEFAULT_ENV_HEIGHT, DEFAULT_ENV_WIDTH, PRESETS, random_envmap
from .image import ImageRGB, ImageScalar, exposure_normalize, gamma_encode
from .layerfiles import (
    composed_path,
    directional_paths,
    layer_paths,
    save_directional,
    save_layers,
    save_meta,
)
from .model import DirectionalLayerSet, LayerSet, compose
from .pfm import write_pfm
from .pngio import write_png
from .prefilter import glossy_prefilter, glossy_prefilter_split, irradiance_map

PRIM_SPHERE = 0
PRIM_BOX = 1
PRIM_PLANE = 2

_PARAM_SLOTS = 8
_OCC_CHUNK_ROWS = 4096
_RAY_OFFSET_FACTOR = 1e-4


# ---------------------------------------------------------------------------
# Materials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AlbedoTexture:
    """Flat color or a 3-d checker of two colors with cell size ``scale``."""

    kind: str
    color_a: np.ndarray
    color_b: np.ndarray | None = None
    scale: float = 0.5

    def __post_init__(self):
        if self.kind not in ("flat", "checker"):
            raise ValueError(f"unknown texture kind {self.kind!r}")
        object.__setattr__(self, "color_a", np.asarray(self.color_a, dtype=np.float64))
        if self.kind == "checker":
            if self.color_b is None:
                raise ValueError("checker textures need two colors")
            object.__setattr__(self, "color_b", np.asarray(self.color_b, dtype=np.float64))

    def sample(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if self.kind == "flat":
            return np.broadcast_to(self.color_a, pts.shape).copy()
        cells = np.floor(pts / self.scale).astype(np.int64).sum(axis=1)
        odd = (cells % 2).astype(bool)
        out = np.where(odd[:, None], self.color_b, self.color_a)
        return out

    def spatial_mean(self) -> np.ndarray:
        """Per-channel mean over the texture domain (exact for both kinds)."""
        if self.kind == "flat":
            return self.color_a.copy()
        return (self.color_a + self.color_b) / 2.0


@dataclass(frozen=True)
class Material:
    """Phong-style material: diffuse texture, single specular color, gloss."""

    kind: str  # "electric" | "dielectric"
    texture: AlbedoTexture
    specular: np.ndarray
    gloss: float

    def __post_init__(self):
        if self.kind not in ("electric", "dielectric"):
            raise ValueError(f"unknown material kind {self.kind!r}")
        if self.gloss < 1.0:
            raise ValueError(f"gloss exponent must be >= 1, got {self.gloss}")
        object.__setattr__(self, "specular", np.asarray(self.specular, dtype=np.float64))


def gloss_from_unit(xi: float) -> float:
    """Map a uniform variate to a Phong exponent: n = 3.0 ** (10 * xi)."""
    return float(3.0 ** (10.0 * xi))


def sample_texture(rng) -> AlbedoTexture:
    if rng.random() < 0.6:
        return AlbedoTexture("flat", rng.uniform(0.05, 0.95, size=3))
    return AlbedoTexture(
        "checker",
        rng.uniform(0.05, 0.95, size=3),
        rng.uniform(0.05, 0.95, size=3),
        scale=float(rng.uniform(0.2, 0.6)),
    )


def sample_material(rng, texture: AlbedoTexture | None = None) -> Material:
    """Random material: 50/50 electric/dielectric.

    Electric materials take their specular color from the per-channel
    spatial mean of the diffuse texture; dielectrics use a uniform random
    grey.  Gloss follows n = 3 ** (10 * xi) with xi ~ U[0, 1].
    """
    if texture is None:
        texture = sample_texture(rng)
    electric = rng.random() < 0.5
    if electric:
        specular = texture.spatial_mean()
        kind = "electric"
    else:
        specular = np.full(3, rng.random())
        kind = "dielectric"
    return Material(
        kind=kind,
        texture=texture,
        specular=specular,
        gloss=gloss_from_unit(rng.random()),
    )


# ---------------------------------------------------------------------------
# Scene
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Primitive:
    kind: int
    params: np.ndarray  # 8 float64 slots, meaning depends on kind
    material: Material

    def __post_init__(self):
        params = np.zeros(_PARAM_SLOTS, dtype=np.float64)
        given = np.asarray(self.params, dtype=np.float64)
        params[: given.size] = given
        object.__setattr__(self, "params", params)
        if self.kind == PRIM_SPHERE and params[3] <= 0.0:
            raise ValueError("sphere radius must be positive")
        if self.kind == PRIM_BOX and not (params[0:3] < params[3:6]).all():
            raise ValueError("box must have strictly positive extent")


def sphere(center, radius: float, material: Material) -> Primitive:
    return Primitive(PRIM_SPHERE, np.r_[np.asarray(center, float), radius], material)


def box(corner_min, corner_max, material: Material) -> Primitive:
    return Primitive(
        PRIM_BOX, np.r_[np.asarray(corner_min, float), np.asarray(corner_max, float)], material
    )


def ground_plane(height: float, material: Material) -> Primitive:
    return Primitive(PRIM_PLANE, np.array([height]), material)


@dataclass(frozen=True)
class Scene:
    """Primitive soup with +y up; at least one primitive, none degenerate."""

    primitives: tuple[Primitive, ...]

    def __post_init__(self):
        object.__setattr__(self, "primitives", tuple(self.primitives))
        if not self.primitives:
            raise ValueError("a scene needs at least one primitive")

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        kinds = np.array([p.kind for p in self.primitives], dtype=np.int64)
        params = np.stack([p.params for p in self.primitives])
        return kinds, params

    def diameter(self) -> float:
        """Bounding-box diagonal of the finite primitives (planes excluded)."""
        lo = np.full(3, np.inf)
        hi = np.full(3, -np.inf)
        for p in self.primitives:
            if p.kind == PRIM_SPHERE:
                center, radius = p.params[0:3], p.params[3]
                lo = np.minimum(lo, center - radius)
                hi = np.maximum(hi, center + radius)
            elif p.kind == PRIM_BOX:
                lo = np.minimum(lo, p.params[0:3])
                hi = np.maximum(hi, p.params[3:6])
        if not np.isfinite(lo).all():
            return 2.0
        return float(np.linalg.norm(hi - lo))

    def contains(self, point) -> bool:
        pt = np.asarray(point, dtype=np.float64)
        for p in self.primitives:
            if p.kind == PRIM_SPHERE:
                if np.linalg.norm(pt - p.params[0:3]) <= p.params[3]:
                    return True
            elif p.kind == PRIM_BOX:
                if (pt >= p.params[0:3]).all() and (pt <= p.params[3:6]).all():
                    return True
        return False


def surface_normals(scene: Scene, idx: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Outward unit normals for hit points; idx selects the primitive."""
    normals = np.zeros_like(points)
    for k, prim in enumerate(scene.primitives):
        mask = idx == k
        if not mask.any():
            continue
        pts = points[mask]
        if prim.kind == PRIM_SPHERE:
            n = (pts - prim.params[0:3]) / prim.params[3]
        elif prim.kind == PRIM_BOX:
            center = (prim.params[0:3] + prim.params[3:6]) / 2.0
            half = (prim.params[3:6] - prim.params[0:3]) / 2.0
            rel = (pts - center) / half
            axis = np.abs(rel).argmax(axis=1)
            n = np.zeros_like(pts)
            rows = np.arange(pts.shape[0])
            n[rows, axis] = np.sign(rel[rows, axis])
        else:
            n = np.tile(np.array([0.0, 1.0, 0.0]), (pts.shape[0], 1))
        normals[mask] = n
    return normalize_directions(normals)


# ---------------------------------------------------------------------------
# Camera
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Camera:
    origin: np.ndarray
    look_at: np.ndarray
    fov_deg: float = 40.0
    up: np.ndarray = field(default_factory=lambda: np.array([0.0, 1.0, 0.0]))

    def __post_init__(self):
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=np.float64))
        object.__setattr__(self, "look_at", np.asarray(self.look_at, dtype=np.float64))
        object.__setattr__(self, "up", np.asarray(self.up, dtype=np.float64))
        if not 0.0 < self.fov_deg < 180.0:
            raise ValueError(f"fov must be in (0, 180), got {self.fov_deg}")

    def rays(self, width: int, height: int) -> tuple[np.ndarray, np.ndarray]:
        forward = normalize_directions(self.look_at - self.origin)
        right = normalize_directions(np.cross(forward, self.up))
        upv = np.cross(right, forward)
        tan_half = np.tan(np.radians(self.fov_deg) / 2.0)
        aspect = width / height
        px = (2.0 * (np.arange(width) + 0.5) / width - 1.0) * tan_half * aspect
        py = (1.0 - 2.0 * (np.arange(height) + 0.5) / height) * tan_half
        dirs = (
            forward[None, None, :]
            + px[None, :, None] * right[None, None, :]
            + py[:, None, None] * upv[None, None, :]
        )
        dirs = normalize_directions(dirs)
        origins = np.broadcast_to(self.origin, dirs.shape).copy()
        return origins, dirs


# ---------------------------------------------------------------------------
# Occlusion
# ---------------------------------------------------------------------------

def _stratified_grid(samples: int) -> tuple[int, int]:
    gu = int(np.sqrt(samples))
    while samples % gu:
        gu -= 1
    return gu, samples // gu


def occlusion_field(
    scene: Scene,
    points: np.ndarray,
    normals: np.ndarray,
    samples: int = 256,
    max_range: float | None = None,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Visibility fraction of the upper hemisphere for a batch of points.

    Stratified, jittered, cosine-weighted hemisphere sampling; a ray
    counts as open when it hits nothing within ``max_range`` (default:
    half the scene diameter).  Returns values in [0, 1].
    """
    if rng is None:
        rng = np.random.default_rng(0)
    if max_range is None:
        max_range = 0.5 * scene.diameter()
    kinds, params = scene.arrays()
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    nrm = np.atleast_2d(np.asarray(normals, dtype=np.float64))
    offset = _RAY_OFFSET_FACTOR * max(scene.diameter(), 1.0)
    origins = pts + offset * nrm
    gu, gv = _stratified_grid(samples)
    out = np.empty(pts.shape[0], dtype=np.float64)
    for start in range(0, pts.shape[0], _OCC_CHUNK_ROWS):
        stop = min(start + _OCC_CHUNK_ROWS, pts.shape[0])
        jitter = rng.random((stop - start, samples, 2))
        out[start:stop] = kernels.occlusion_batch(
            kinds, params, origins[start:stop], nrm[start:stop],
            jitter, gu, gv, float(max_range),
        )
    return out


def occlusion(
    scene: Scene,
    point,
    normal,
    samples: int = 256,
    max_range: float | None = None,
    rng: np.random.Generator | None = None,
) -> float:
    """Monte-Carlo visibility fraction at a single surface point."""
    result = occlusion_field(
        scene,
        np.asarray(point, dtype=np.float64)[None, :],
        np.asarray(normal, dtype=np.float64)[None, :],
        samples=samples,
        max_range=max_range,
        rng=rng,
    )
    return float(result[0])


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def render_layers(
    scene: Scene,
    env: EnvironmentMap,
    camera: Camera,
    resolution: int = 256,
    *,
    directional: bool = False,
    occ_samples: int = 256,
    occ_range_scale: float = 0.5,
    prefilter_width: int = 64,
    prefilter_height: int = 32,
    sharpness: float = DEFAULT_SHARPNESS,
    rng: np.random.Generator | None = None,
) -> tuple[LayerSet, DirectionalLayerSet | None]:
    """Render ground-truth layers for the first visible surface per pixel.

    Surface pixels get O from hemisphere occlusion, irradiance from the
    prefiltered irradiance map at the normal, albedo from the material
    texture, and specular as k_s times the glossy prefilter at the mirror
    direction.  Background pixels carry the environment in the specular
    layer (clamped to [0, 1]) with O=1, I=0, albedo=0, which keeps the
    composition equation valid everywhere.
    """
    if scene.contains(camera.origin):
        raise ValueError("camera origin is inside scene geometry")
    if rng is None:
        rng = np.random.default_rng(0)
    res = int(resolution)
    kinds, params = scene.arrays()
    origins, dirs = camera.rays(res, res)
    flat_o = origins.reshape(-1, 3)
    flat_d = dirs.reshape(-1, 3)
    idx, t_hit = kernels.trace_rays(kinds, params, flat_o, flat_d)
    hit = idx >= 0

    n_px = res * res
    occ = np.ones(n_px, dtype=np.float64)
    irr = np.zeros((n_px, 3), dtype=np.float64)
    alb = np.zeros((n_px, 3), dtype=np.float64)
    spec = np.zeros((n_px, 3), dtype=np.float64)

    irr_map = irradiance_map(env, prefilter_width, prefilter_height)
    basis = SoftCubeBasis(sharpness)
    n_dir = 6
    if directional:
        splits = split_envmap(env, basis)
        d_maps = [irradiance_map(s, prefilter_width, prefilter_height) for s in splits]
        dif_i = np.zeros((n_dir, n_px, 3), dtype=np.float64)
        spec_i = np.zeros((n_dir, n_px, 3), dtype=np.float64)

    if hit.any():
        pts = flat_o[hit] + t_hit[hit, None] * flat_d[hit]
        nrm = surface_normals(scene, idx[hit], pts)
        occ[hit] = occlusion_field(
            scene, pts, nrm,
            samples=occ_samples,
            max_range=occ_range_scale * scene.diameter(),
            rng=rng,
        )
        irr[hit] = irr_map.sample(nrm)
        if directional:
            for i in range(n_dir):
                dif_i[i, hit] = d_maps[i].sample(nrm)
        view = flat_d[hit]
        refl = view - 2.0 * np.einsum("nd,nd->n", view, nrm)[:, None] * nrm
        refl = normalize_directions(refl)
        hit_rows = np.flatnonzero(hit)
        gloss_cache: dict[float, tuple] = {}
        for k, prim in enumerate(scene.primitives):
            mask = idx[hit] == k
            if not mask.any():
                continue
            rows = hit_rows[mask]
            mat = prim.material
            alb[rows] = mat.texture.sample(pts[mask])
            if mat.gloss not in gloss_cache:
                if directional:
                    gloss_cache[mat.gloss] = glossy_prefilter_split(
                        env, sharpness, mat.gloss, prefilter_width, prefilter_height
                    )
                else:
                    gloss_cache[mat.gloss] = (
                        glossy_prefilter(env, mat.gloss, prefilter_width, prefilter_height),
                        None,
                    )
            g_total, g_splits = gloss_cache[mat.gloss]
            if directional:
                for i in range(n_dir):
                    spec_i[i, rows] = mat.specular * g_splits[i].sample(refl[mask])
            spec[rows] = mat.specular * g_total.sample(refl[mask])

    bg = ~hit
    if bg.any():
        env_look = np.clip(env.sample_bilinear(flat_d[bg]), 0.0, 1.0)
        spec[bg] = env_look
        if directional:
            shares = softcube_weights(flat_d[bg], sharpness)
            for i in range(n_dir):
                spec_i[i, bg] = env_look * shares[:, i, None]

    shape3 = (res, res, 3)
    layers = LayerSet(
        occlusion=ImageScalar(np.clip(occ, 0.0, 1.0).reshape(res, res).astype(np.float32)),
        irradiance=ImageRGB(irr.reshape(shape3).astype(np.float32)),
        albedo=ImageRGB(np.clip(alb, 0.0, 1.0).reshape(shape3).astype(np.float32)),
        specular=ImageRGB(spec.reshape(shape3).astype(np.float32)),
    )
    if not directional:
        return layers, None
    dir_layers = DirectionalLayerSet(
        occlusion=layers.occlusion,
        albedo=layers.albedo,
        diffuse=tuple(ImageRGB(dif_i[i].reshape(shape3).astype(np.float32)) for i in range(n_dir)),
        specular=tuple(ImageRGB(spec_i[i].reshape(shape3).astype(np.float32)) for i in range(n_dir)),
    )
    return layers, dir_layers


# ---------------------------------------------------------------------------
# Scene and camera sampling
# ---------------------------------------------------------------------------

def sample_scene(rng) -> Scene:
    prims = [ground_plane(0.0, sample_material(rng))]
    for _ in range(int(rng.integers(1, 3))):
        mat = sample_material(rng)
        if rng.random() < 0.6:
            radius = float(rng.uniform(0.3, 0.8))
            center = np.array([rng.uniform(-0.8, 0.8), radius, rng.uniform(-0.8, 0.8)])
            prims.append(sphere(center, radius, mat))
        else:
            half = rng.uniform(0.2, 0.55, size=3)
            center = np.array([rng.uniform(-0.8, 0.8), half[1], rng.uniform(-0.8, 0.8)])
            prims.append(box(center - half, center + half, mat))
    return Scene(tuple(prims))


def sample_camera(rng, scene: Scene) -> Camera:
    """Random orbit view (rotation about the vertical only)."""
    radius = max(scene.diameter(), 1.0)
    target = np.array([0.0, 0.3 * radius, 0.0])
    for _ in range(64):
        azimuth = rng.uniform(0.0, 2.0 * np.pi)
        elevation = rng.uniform(np.radians(12.0), np.radians(35.0))
        distance = rng.uniform(1.4, 2.0) * radius
        origin = target + distance * np.array(
            [
                np.cos(elevation) * np.cos(azimuth),
                np.sin(elevation),
                np.cos(elevation) * np.sin(azimuth),
            ]
        )
        if not scene.contains(origin) and origin[1] > 0.05:
            return Camera(origin=origin, look_at=target, fov_deg=float(rng.uniform(35.0, 50.0)))
    raise RuntimeError("could not place a camera outside the scene")


# ---------------------------------------------------------------------------
# Dataset generation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DatasetConfig:
    count: int = 10
    seed: int = 0
    resolution: int = 64
    out_dir: str = "dataset"
    directional: bool = True
    env_count: int = 6
    env_presets: tuple[str, ...] = PRESETS
    env_width: int = DEFAULT_ENV_WIDTH
    env_height: int = DEFAULT_ENV_HEIGHT
    occ_samples: int = 256
    occ_range_scale: float = 0.5
    # 32x16 keeps the per-material glossy prefilter cheap at desk scale;
    # the shading signals are low-frequency enough for 64x64 records.
    prefilter_width: int = 32
    prefilter_height: int = 16
    threads: int = 1

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.resolution < 4:
            raise ValueError("resolution must be >= 4")
        if self.env_count < 1:
            raise ValueError("env_count must be >= 1")
        for preset in self.env_presets:
            if preset not in PRESETS:
                raise ValueError(f"unknown env preset {preset!r}")


@dataclass(frozen=True)
class DatasetRecord:
    stem: str  # relative to out_dir
    index: int
    env_id: str
    scale: float
    files: tuple[str, ...]


_CONFIG_KEYS = {
    "count": int,
    "seed": int,
    "resolution": int,
    "out_dir": str,
    "directional": lambda v: v.lower() in ("1", "true", "yes", "on"),
    "env_count": int,
    "env_presets": lambda v: tuple(s.strip() for s in v.split(",") if s.strip()),
    "env_width": int,
    "env_height": int,
    "occ_samples": int,
    "occ_range_scale": float,
    "prefilter_width": int,
    "prefilter_height": int,
    "threads": int,
}


def load_config(path, **overrides) -> DatasetConfig:
    """Parse a key=value config file; keyword overrides win over the file."""
    values = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep or key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: bad config line {line!r}")
            values[key] = _CONFIG_KEYS[key](value.strip())
    values.update({k: v for k, v in overrides.items() if v is not None})
    return DatasetConfig(**values)


def _format_float(x: float) -> str:
    return repr(float(x))


def _generate_record(cfg: DatasetConfig, index: int, seed_seq, envs) -> DatasetRecord:
    rng = np.random.default_rng(seed_seq)
    env_idx = int(rng.integers(len(envs)))
    env_id, env = envs[env_idx]
    scene = sample_scene(rng)
    camera = sample_camera(rng, scene)
    layers, dir_layers = render_layers(
        scene,
        env,
        camera,
        resolution=cfg.resolution,
        directional=cfg.directional,
        occ_samples=cfg.occ_samples,
        occ_range_scale=cfg.occ_range_scale,
        prefilter_width=cfg.prefilter_width,
        prefilter_height=cfg.prefilter_height,
        rng=rng,
    )
    exposure = exposure_normalize(compose(layers))
    composite = gamma_encode(exposure.image)

    stem_rel = os.path.join("records", f"rec{index:05d}")
    stem = os.path.join(cfg.out_dir, stem_rel)
    write_png(composite, composed_path(stem))
    save_layers(stem, layers)
    if dir_layers is not None:
        save_directional(stem, dir_layers)

    meta = {
        "index": index,
        "master_seed": cfg.seed,
        "env": env_id,
        "scale": _format_float(exposure.scale),
        "resolution": cfg.resolution,
        "directional": int(cfg.directional),
        "occ_samples": cfg.occ_samples,
        "camera.origin": ",".join(_format_float(v) for v in camera.origin),
        "camera.look_at": ",".join(_format_float(v) for v in camera.look_at),
        "camera.fov_deg": _format_float(camera.fov_deg),
    }
    for k, prim in enumerate(scene.primitives):
        mat = prim.material
        meta[f"material{k}.kind"] = mat.kind
        meta[f"material{k}.gloss"] = _format_float(mat.gloss)
        meta[f"material{k}.specular"] = ",".join(_format_float(v) for v in mat.specular)
        meta[f"material{k}.texture"] = mat.texture.kind
    save_meta(stem, meta)

    files = [composed_path(stem_rel)] + sorted(layer_paths(stem_rel).values())
    if dir_layers is not None:
        dpaths = directional_paths(stem_rel)
        files += dpaths["diffuse"] + dpaths["specular"]
    return DatasetRecord(
        stem=stem_rel,
        index=index,
        env_id=env_id,
        scale=exposure.scale,
        files=tuple(files),
    )


def generate_dataset(cfg: DatasetConfig) -> list[DatasetRecord]:
    """Produce ``cfg.count`` records plus a manifest; pure function of cfg.

    Every record derives its own seed from the master seed, so records are
    independent and the output tree is byte-identical across runs of the
    same config, regardless of thread count.
    """
    os.makedirs(os.path.join(cfg.out_dir, "records"), exist_ok=True)
    os.makedirs(os.path.join(cfg.out_dir, "envs"), exist_ok=True)

    root = np.random.SeedSequence(cfg.seed)
    children = root.spawn(cfg.env_count + cfg.count)
    envs = []
    for i in range(cfg.env_count):
        preset = cfg.env_presets[i % len(cfg.env_presets)]
        env = random_envmap(children[i], preset, cfg.env_width, cfg.env_height)
        env_id = f"env{i:02d}"
        write_pfm(env.image, os.path.join(cfg.out_dir, "envs", f"{env_id}.pfm"))
        envs.append((env_id, env))

    def job(i):
        return _generate_record(cfg, i, children[cfg.env_count + i], envs)

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            records = list(pool.map(job, range(cfg.count)))
    else:
        records = [job(i) for i in range(cfg.count)]

    manifest = os.path.join(cfg.out_dir, "manifest.txt")
    with open(manifest, "w", encoding="utf-8") as f:
        f.write("# lightlayers dataset manifest\n")
        f.write(
            f"# count={cfg.count} seed={cfg.seed} resolution={cfg.resolution} "
            f"directional={int(cfg.directional)} env_count={cfg.env_count}\n"
        )
        for rec in records:
            f.write(
                f"{rec.stem} index={rec.index} env={rec.env_id} "
                f"scale={_format_float(rec.scale)} files={','.join(rec.files)}\n"
            )
    return records


def read_manifest(path) -> list[dict]:
    """Parse manifest lines into dicts with stem plus key=value fields."""
    records = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            rec = {"stem": parts[0]}
            for part in parts[1:]:
                key, _, value = part.partition("=")
                rec[key] = value
            records.append(rec)
    return records
