#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Runs each hot kernel on a representative workload under both backends and
prints wall times plus speedups.  First numba timings include nothing but
the cached-compiled code: a warmup call triggers (or loads) compilation
before measurement.

Usage: python benchmarks/bench_backends.py [--repeats 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from lightlayers import kernels
from lightlayers.basis import latlong_directions
from lightlayers.envgen import smooth_envmap


def make_scene():
    kinds = np.array([0, 1, 2], dtype=np.int64)
    params = np.zeros((3, 8))
    params[0, 0:4] = (0.0, 1.0, 0.0, 1.0)
    params[1, 0:6] = (-2.5, 0.0, -1.0, -1.0, 1.2, 0.5)
    params[2, 0] = 0.0
    return kinds, params


def bench_trace(res=512):
    kinds, params = make_scene()
    rng = np.random.default_rng(0)
    n = res * res
    origins = np.tile(np.array([0.0, 1.5, 4.0]), (n, 1))
    dirs = rng.normal(size=(n, 3))
    dirs[:, 2] -= 1.5
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return lambda: kernels.trace_rays(kinds, params, origins, dirs)


def bench_occlusion(n_points=4096, samples=256):
    kinds, params = make_scene()
    rng = np.random.default_rng(1)
    points = rng.uniform(-2, 2, (n_points, 3))
    points[:, 1] = 0.001
    normals = np.tile(np.array([0.0, 1.0, 0.0]), (n_points, 1))
    jitter = rng.random((n_points, samples, 2))
    return lambda: kernels.occlusion_batch(
        kinds, params, points, normals, jitter, 16, 16, 3.0
    )


def bench_glossy(out_w=64, out_h=32, exponent=3.0):
    env = smooth_envmap(0)
    env_dirs = env.directions().reshape(-1, 3)
    env_sa = env.solid_angles().reshape(-1)
    env_rgb = env.data.reshape(-1, 3).astype(np.float64)
    basis = np.zeros((env_rgb.shape[0], 0))
    out_dirs = latlong_directions(out_w, out_h).reshape(-1, 3)
    return lambda: kernels.glossy_accumulate(
        env_rgb, env_dirs, env_sa, basis, out_dirs, exponent, 0.0
    )


def bench_refine(n_pixels=512 * 512, iters=100):
    rng = np.random.default_rng(2)
    c = rng.uniform(0.05, 1.0, (n_pixels, 3))
    state = {
        "occ": rng.uniform(0.1, 1.0, n_pixels),
        "irr": rng.uniform(0.1, 1.0, (n_pixels, 3)),
        "alb": rng.uniform(0.1, 1.0, (n_pixels, 3)),
        "spec": rng.uniform(0.0, 0.3, (n_pixels, 3)),
    }
    lum = np.array([0.2126, 0.7152, 0.0722])

    def run():
        kernels.refine_sweeps(
            c, state["occ"].copy(), state["irr"].copy(),
            state["alb"].copy(), state["spec"].copy(), iters, 0.001, 1e-4, lum,
        )

    return run


BENCHES = {
    "trace_rays (512^2 rays, 3 prims)": bench_trace,
    "occlusion (4096 px, 256 spp)": bench_occlusion,
    "glossy prefilter (512x256 -> 64x32, n=3)": bench_glossy,
    "refine (512^2 px, 100 iters)": bench_refine,
}


def time_call(fn, repeats):
    fn()  # warmup: JIT compile / page in
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    backends = []
    for name in ("numba", "numpy"):
        try:
            kernels.use_backend(name)
            backends.append(name)
        except ImportError:
            print(f"note: backend {name} unavailable, skipping")
    results = {}
    for backend in backends:
        kernels.use_backend(backend)
        for label, make in BENCHES.items():
            results[(backend, label)] = time_call(make(), args.repeats)

    width = max(len(label) for label in BENCHES)
    header = f"{'kernel':<{width}}  " + "".join(f"{b:>10}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label in BENCHES:
        row = f"{label:<{width}}  "
        for backend in backends:
            row += f"{results[(backend, label)] * 1e3:>8.1f}ms"
        if len(backends) == 2:
            ratio = results[("numpy", label)] / results[("numba", label)]
            row += f"{ratio:>9.2f}x"
        print(row)


if __name__ == "__main__":
    main()
