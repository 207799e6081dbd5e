"""Hot numeric loops with two interchangeable backends.

The numba backend JIT-compiles scalar loops; the numpy backend runs the
same math as vectorized array expressions.  Selection happens once at
import from the environment:

    LIGHTLAYERS_BACKEND=auto    numba when importable, else numpy (default)
    LIGHTLAYERS_BACKEND=numba   require numba, fail loudly if missing
    LIGHTLAYERS_BACKEND=numpy   pure-numpy fallback

``use_backend()`` switches at runtime (tests and benchmarks compare the
two).  Both backends are deterministic; results may differ in the last
few ulps because summation order differs.

Kernels exposed here:

    trace_rays        nearest primitive hit per ray
    occlusion_batch   stratified cosine-hemisphere visibility fractions
    glossy_accumulate normalized Phong-lobe weighted sums over env texels
    refine_sweeps     per-pixel iterative layer solves (see lightlayers.refine)
"""

from __future__ import annotations

import importlib
import os

_BACKENDS = ("numba", "numpy")
_active = None
_active_name = ""


def _load(name: str):
    return importlib.import_module(f".{name}_backend", __package__)


def _resolve(requested: str):
    if requested == "numpy":
        return _load("numpy"), "numpy"
    if requested == "numba":
        return _load("numba"), "numba"
    if requested == "auto":
        try:
            return _load("numba"), "numba"
        except ImportError:
            return _load("numpy"), "numpy"
    raise ValueError(
        f"unknown backend {requested!r}; expected one of auto, numba, numpy"
    )


def use_backend(name: str) -> None:
    """Switch the active kernel backend at runtime."""
    global _active, _active_name
    _active, _active_name = _resolve(name)


def active_backend() -> str:
    return _active_name


use_backend(os.environ.get("LIGHTLAYERS_BACKEND", "auto").lower())


def trace_rays(kinds, params, origins, dirs):
    return _active.trace_rays(kinds, params, origins, dirs)


def occlusion_batch(kinds, params, origins, normals, jitter, grid_u, grid_v, t_max):
    return _active.occlusion_batch(
        kinds, params, origins, normals, jitter, grid_u, grid_v, t_max
    )


def glossy_accumulate(env_rgb, env_dirs, env_sa, basis_w, out_dirs, exponent, dot_min):
    return _active.glossy_accumulate(
        env_rgb, env_dirs, env_sa, basis_w, out_dirs, exponent, dot_min
    )


def refine_sweeps(c, occ, irr, alb, spec, iters, weight, eps, lum_w):
    return _active.refine_sweeps(c, occ, irr, alb, spec, iters, weight, eps, lum_w)
