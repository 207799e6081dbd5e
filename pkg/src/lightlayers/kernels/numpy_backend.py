"""Vectorized numpy implementations of the hot kernels.

Primitive encoding shared with the numba backend:

    kind 0  sphere       params[0:3] center, params[3] radius
    kind 1  box          params[0:3] min corner, params[3:6] max corner
    kind 2  ground plane params[0] height (plane y = h, normal +y)

All kernels take and return float64 arrays.
"""

from __future__ import annotations

import numpy as np

T_MIN = 1e-9

# Chunk sizes keep the big broadcast temporaries bounded (~35 MB each).
_GLOSSY_CHUNK = 32
_OCC_CHUNK = 2048


def _ray_intervals(kinds, params, origins, dirs):
    """Entry/exit parameters per (primitive, ray); (-inf, +inf) conventions.

    Returns (t_enter, t_exit) arrays of shape (P, N).  A ray misses a
    primitive iff t_enter > t_exit.  For planes both are the single
    crossing parameter.
    """
    n = origins.shape[0]
    p = kinds.shape[0]
    t_enter = np.full((p, n), np.inf)
    t_exit = np.full((p, n), -np.inf)
    for k in range(p):
        kind = kinds[k]
        if kind == 0:
            center = params[k, 0:3]
            radius = params[k, 3]
            oc = origins - center
            b = np.einsum("nd,nd->n", oc, dirs)
            c = np.einsum("nd,nd->n", oc, oc) - radius * radius
            disc = b * b - c
            hit = disc > 0.0
            root = np.sqrt(np.where(hit, disc, 0.0))
            t_enter[k] = np.where(hit, -b - root, np.inf)
            t_exit[k] = np.where(hit, -b + root, -np.inf)
        elif kind == 1:
            with np.errstate(divide="ignore", invalid="ignore"):
                t1 = (params[k, 0:3] - origins) / dirs
                t2 = (params[k, 3:6] - origins) / dirs
            lo = np.nan_to_num(np.fmin(t1, t2), nan=-np.inf)
            hi = np.nan_to_num(np.fmax(t1, t2), nan=np.inf)
            t_enter[k] = lo.max(axis=1)
            t_exit[k] = hi.min(axis=1)
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                t = (params[k, 0] - origins[:, 1]) / dirs[:, 1]
            ok = np.isfinite(t)
            t_enter[k] = np.where(ok, t, np.inf)
            t_exit[k] = np.where(ok, t, -np.inf)
    return t_enter, t_exit


def trace_rays(kinds, params, origins, dirs):
    """Nearest hit per ray: (index | -1, t) with t = +inf on miss."""
    t_enter, t_exit = _ray_intervals(kinds, params, origins, dirs)
    valid = t_enter <= t_exit
    t_near = np.where(valid & (t_enter > T_MIN), t_enter, np.inf)
    t_far = np.where(valid & (t_exit > T_MIN), t_exit, np.inf)
    t_hit = np.minimum(t_near, t_far)
    idx = t_hit.argmin(axis=0).astype(np.int64)
    t_best = t_hit[idx, np.arange(t_hit.shape[1])]
    idx[~np.isfinite(t_best)] = -1
    return idx, t_best


def _any_hit(kinds, params, origins, dirs, t_max):
    """True where a ray hits any primitive with t in (T_MIN, t_max)."""
    t_enter, t_exit = _ray_intervals(kinds, params, origins, dirs)
    hit = (t_enter <= t_exit) & (t_exit > T_MIN) & (t_enter < t_max)
    return hit.any(axis=0)


def _tangent_frames(normals):
    helper = np.zeros_like(normals)
    ax = np.abs(normals[:, 0]) < 0.6
    ay = ~ax & (np.abs(normals[:, 1]) < 0.6)
    az = ~ax & ~ay
    helper[ax, 0] = 1.0
    helper[ay, 1] = 1.0
    helper[az, 2] = 1.0
    tangent = np.cross(helper, normals)
    tangent /= np.linalg.norm(tangent, axis=1, keepdims=True)
    bitangent = np.cross(normals, tangent)
    return tangent, bitangent


def occlusion_batch(kinds, params, origins, normals, jitter, grid_u, grid_v, t_max):
    """Fraction of stratified cosine-weighted hemisphere rays that escape.

    jitter has shape (N, S, 2) with S = grid_u * grid_v; sample s covers
    stratum (s // grid_v, s % grid_v).
    """
    n_pts, n_smp = jitter.shape[0], jitter.shape[1]
    out = np.empty(n_pts, dtype=np.float64)
    su = (np.arange(n_smp) // grid_v).astype(np.float64)
    sv = (np.arange(n_smp) % grid_v).astype(np.float64)
    for start in range(0, n_pts, _OCC_CHUNK):
        stop = min(start + _OCC_CHUNK, n_pts)
        m = stop - start
        u1 = (su[None, :] + jitter[start:stop, :, 0]) / grid_u
        u2 = (sv[None, :] + jitter[start:stop, :, 1]) / grid_v
        r = np.sqrt(u1)
        phi = 2.0 * np.pi * u2
        lx = r * np.cos(phi)
        ly = r * np.sin(phi)
        lz = np.sqrt(1.0 - u1)
        tangent, bitangent = _tangent_frames(normals[start:stop])
        world = (
            lx[..., None] * tangent[:, None, :]
            + ly[..., None] * bitangent[:, None, :]
            + lz[..., None] * normals[start:stop, None, :]
        )
        ray_o = np.repeat(origins[start:stop], n_smp, axis=0)
        ray_d = world.reshape(m * n_smp, 3)
        blocked = _any_hit(kinds, params, ray_o, ray_d, t_max).reshape(m, n_smp)
        out[start:stop] = 1.0 - blocked.sum(axis=1) / float(n_smp)
    return out


def glossy_accumulate(env_rgb, env_dirs, env_sa, basis_w, out_dirs, exponent, dot_min):
    """Phong-lobe weighted sums over environment texels.

    Returns (total, per_basis, wsum):
        total[t]     = sum_j L_j * w_j
        per_basis[t] = sum_j L_j * w_j * b_j   (empty when basis_w has 0 cols)
        wsum[t]      = sum_j w_j
    with w_j = max(<dir_j, out_dir_t>, 0) ** exponent * solid_angle_j and
    terms below dot_min dropped (they are <= dot_min ** exponent of the peak).
    """
    n_out = out_dirs.shape[0]
    n_basis = basis_w.shape[1]
    total = np.zeros((n_out, 3))
    per_basis = np.zeros((n_out, n_basis, 3))
    wsum = np.zeros(n_out)
    cut = max(dot_min, 0.0)
    for start in range(0, n_out, _GLOSSY_CHUNK):
        stop = min(start + _GLOSSY_CHUNK, n_out)
        dots = env_dirs @ out_dirs[start:stop].T
        w = np.zeros_like(dots)
        active = dots > cut
        w[active] = dots[active] ** exponent
        w *= env_sa[:, None]
        wsum[start:stop] = w.sum(axis=0)
        total[start:stop] = w.T @ env_rgb
        for b in range(n_basis):
            per_basis[start:stop, b, :] = (w * basis_w[:, b : b + 1]).T @ env_rgb
    return total, per_basis, wsum


def refine_sweeps(c, occ, irr, alb, spec, iters, weight, eps, lum_w):
    """Iterative per-pixel layer solves; updates occ/irr/alb/spec in place.

    Sweep order per iteration: specular, irradiance (chroma-locked), albedo,
    occlusion.  Each solve blends (1 - weight) * old + weight * solved and
    back-projects to [0, 1].  Solves whose divisor falls under eps keep the
    current value (a dark pixel carries no information about that layer).
    """
    keep = 1.0 - weight
    eps2 = eps * eps
    for _ in range(iters):
        valid_o = (occ >= eps)[:, None]
        q = c / np.maximum(occ, eps)[:, None]

        cand = np.where(valid_o, q - irr * alb, spec)
        np.copyto(spec, keep * spec + weight * cand)
        np.clip(spec, 0.0, 1.0, out=spec)

        cand = np.where(
            valid_o & (alb >= eps), (q - spec) / np.maximum(alb, eps), irr
        )
        lum_cand = cand @ lum_w
        lum_ref = irr @ lum_w
        scale = lum_cand / np.where(lum_ref > 0.0, lum_ref, 1.0)
        locked = np.where((lum_ref > 0.0)[:, None], irr * scale[:, None], cand)
        np.copyto(irr, keep * irr + weight * locked)
        np.clip(irr, 0.0, 1.0, out=irr)

        cand = np.where(
            valid_o & (irr >= eps), (q - spec) / np.maximum(irr, eps), alb
        )
        np.copyto(alb, keep * alb + weight * cand)
        np.clip(alb, 0.0, 1.0, out=alb)

        v = irr * alb + spec
        den = np.einsum("nd,nd->n", v, v)
        num = np.einsum("nd,nd->n", c, v)
        o_new = np.where(den >= eps2, num / np.maximum(den, eps2), occ)
        np.copyto(occ, keep * occ + weight * o_new)
        np.clip(occ, 0.0, 1.0, out=occ)
