"""Numba-compiled implementations of the hot kernels.

Same primitive encoding and semantics as
:mod:`lightlayers.kernels.numpy_backend`; see that module for the shared
contracts.  Kernels are cached to disk after first compilation.
"""

from __future__ import annotations

import numpy as np
from numba import njit

T_MIN = 1e-9


@njit(cache=True)
def _interval(kind, params, ox, oy, oz, dx, dy, dz):
    """Entry/exit parameters of one ray against one primitive."""
    if kind == 0:
        cx, cy, cz, radius = params[0], params[1], params[2], params[3]
        ocx, ocy, ocz = ox - cx, oy - cy, oz - cz
        b = ocx * dx + ocy * dy + ocz * dz
        c = ocx * ocx + ocy * ocy + ocz * ocz - radius * radius
        disc = b * b - c
        if disc <= 0.0:
            return np.inf, -np.inf
        root = np.sqrt(disc)
        return -b - root, -b + root
    if kind == 1:
        lo = -np.inf
        hi = np.inf
        for axis in range(3):
            if axis == 0:
                o, d = ox, dx
            elif axis == 1:
                o, d = oy, dy
            else:
                o, d = oz, dz
            mn = params[axis]
            mx = params[3 + axis]
            if d == 0.0:
                if o < mn or o > mx:
                    return np.inf, -np.inf
            else:
                t1 = (mn - o) / d
                t2 = (mx - o) / d
                if t1 > t2:
                    t1, t2 = t2, t1
                if t1 > lo:
                    lo = t1
                if t2 < hi:
                    hi = t2
        return lo, hi
    # ground plane y = params[0]
    if dy == 0.0:
        return np.inf, -np.inf
    t = (params[0] - oy) / dy
    return t, t


@njit(cache=True)
def trace_rays(kinds, params, origins, dirs):
    n = origins.shape[0]
    idx = np.full(n, -1, dtype=np.int64)
    t_best = np.full(n, np.inf)
    for i in range(n):
        ox, oy, oz = origins[i, 0], origins[i, 1], origins[i, 2]
        dx, dy, dz = dirs[i, 0], dirs[i, 1], dirs[i, 2]
        for k in range(kinds.shape[0]):
            lo, hi = _interval(kinds[k], params[k], ox, oy, oz, dx, dy, dz)
            if lo > hi:
                continue
            t = lo if lo > T_MIN else hi
            if t > T_MIN and t < t_best[i]:
                t_best[i] = t
                idx[i] = k
    return idx, t_best


@njit(cache=True)
def _blocked(kinds, params, ox, oy, oz, dx, dy, dz, t_max):
    for k in range(kinds.shape[0]):
        lo, hi = _interval(kinds[k], params[k], ox, oy, oz, dx, dy, dz)
        if lo <= hi and hi > T_MIN and lo < t_max:
            return True
    return False


@njit(cache=True)
def occlusion_batch(kinds, params, origins, normals, jitter, grid_u, grid_v, t_max):
    n_pts = origins.shape[0]
    n_smp = jitter.shape[1]
    out = np.empty(n_pts)
    for i in range(n_pts):
        nx, ny, nz = normals[i, 0], normals[i, 1], normals[i, 2]
        if abs(nx) < 0.6:
            hx, hy, hz = 1.0, 0.0, 0.0
        elif abs(ny) < 0.6:
            hx, hy, hz = 0.0, 1.0, 0.0
        else:
            hx, hy, hz = 0.0, 0.0, 1.0
        tx = hy * nz - hz * ny
        ty = hz * nx - hx * nz
        tz = hx * ny - hy * nx
        inv = 1.0 / np.sqrt(tx * tx + ty * ty + tz * tz)
        tx, ty, tz = tx * inv, ty * inv, tz * inv
        bx = ny * tz - nz * ty
        by = nz * tx - nx * tz
        bz = nx * ty - ny * tx
        ox, oy, oz = origins[i, 0], origins[i, 1], origins[i, 2]
        misses = 0
        for s in range(n_smp):
            u1 = ((s // grid_v) + jitter[i, s, 0]) / grid_u
            u2 = ((s % grid_v) + jitter[i, s, 1]) / grid_v
            r = np.sqrt(u1)
            phi = 2.0 * np.pi * u2
            lx = r * np.cos(phi)
            ly = r * np.sin(phi)
            lz = np.sqrt(1.0 - u1)
            dx = lx * tx + ly * bx + lz * nx
            dy = lx * ty + ly * by + lz * ny
            dz = lx * tz + ly * bz + lz * nz
            if not _blocked(kinds, params, ox, oy, oz, dx, dy, dz, t_max):
                misses += 1
        out[i] = misses / n_smp
    return out


@njit(cache=True)
def glossy_accumulate(env_rgb, env_dirs, env_sa, basis_w, out_dirs, exponent, dot_min):
    n_out = out_dirs.shape[0]
    n_env = env_dirs.shape[0]
    n_basis = basis_w.shape[1]
    total = np.zeros((n_out, 3))
    per_basis = np.zeros((n_out, n_basis, 3))
    wsum = np.zeros(n_out)
    cut = dot_min if dot_min > 0.0 else 0.0
    for t in range(n_out):
        rx, ry, rz = out_dirs[t, 0], out_dirs[t, 1], out_dirs[t, 2]
        for j in range(n_env):
            d = env_dirs[j, 0] * rx + env_dirs[j, 1] * ry + env_dirs[j, 2] * rz
            if d <= cut:
                continue
            w = d**exponent * env_sa[j]
            wsum[t] += w
            total[t, 0] += w * env_rgb[j, 0]
            total[t, 1] += w * env_rgb[j, 1]
            total[t, 2] += w * env_rgb[j, 2]
            for b in range(n_basis):
                wb = w * basis_w[j, b]
                per_basis[t, b, 0] += wb * env_rgb[j, 0]
                per_basis[t, b, 1] += wb * env_rgb[j, 1]
                per_basis[t, b, 2] += wb * env_rgb[j, 2]
    return total, per_basis, wsum


@njit(cache=True)
def refine_sweeps(c, occ, irr, alb, spec, iters, weight, eps, lum_w):
    n = c.shape[0]
    keep = 1.0 - weight
    eps2 = eps * eps
    for i in range(n):
        o = occ[i]
        i0, i1, i2 = irr[i, 0], irr[i, 1], irr[i, 2]
        a0, a1, a2 = alb[i, 0], alb[i, 1], alb[i, 2]
        s0, s1, s2 = spec[i, 0], spec[i, 1], spec[i, 2]
        c0, c1, c2 = c[i, 0], c[i, 1], c[i, 2]
        for _ in range(iters):
            og = o if o >= eps else eps
            valid_o = o >= eps
            q0, q1, q2 = c0 / og, c1 / og, c2 / og

            cand0 = (q0 - i0 * a0) if valid_o else s0
            cand1 = (q1 - i1 * a1) if valid_o else s1
            cand2 = (q2 - i2 * a2) if valid_o else s2
            s0 = keep * s0 + weight * cand0
            s1 = keep * s1 + weight * cand1
            s2 = keep * s2 + weight * cand2
            s0 = min(max(s0, 0.0), 1.0)
            s1 = min(max(s1, 0.0), 1.0)
            s2 = min(max(s2, 0.0), 1.0)

            cand0 = (q0 - s0) / a0 if (valid_o and a0 >= eps) else i0
            cand1 = (q1 - s1) / a1 if (valid_o and a1 >= eps) else i1
            cand2 = (q2 - s2) / a2 if (valid_o and a2 >= eps) else i2
            lum_cand = cand0 * lum_w[0] + cand1 * lum_w[1] + cand2 * lum_w[2]
            lum_ref = i0 * lum_w[0] + i1 * lum_w[1] + i2 * lum_w[2]
            if lum_ref > 0.0:
                scale = lum_cand / lum_ref
                l0, l1, l2 = i0 * scale, i1 * scale, i2 * scale
            else:
                l0, l1, l2 = cand0, cand1, cand2
            i0 = keep * i0 + weight * l0
            i1 = keep * i1 + weight * l1
            i2 = keep * i2 + weight * l2
            i0 = min(max(i0, 0.0), 1.0)
            i1 = min(max(i1, 0.0), 1.0)
            i2 = min(max(i2, 0.0), 1.0)

            cand0 = (q0 - s0) / i0 if (valid_o and i0 >= eps) else a0
            cand1 = (q1 - s1) / i1 if (valid_o and i1 >= eps) else a1
            cand2 = (q2 - s2) / i2 if (valid_o and i2 >= eps) else a2
            a0 = keep * a0 + weight * cand0
            a1 = keep * a1 + weight * cand1
            a2 = keep * a2 + weight * cand2
            a0 = min(max(a0, 0.0), 1.0)
            a1 = min(max(a1, 0.0), 1.0)
            a2 = min(max(a2, 0.0), 1.0)

            v0 = i0 * a0 + s0
            v1 = i1 * a1 + s1
            v2 = i2 * a2 + s2
            den = v0 * v0 + v1 * v1 + v2 * v2
            num = c0 * v0 + c1 * v1 + c2 * v2
            o_new = num / den if den >= eps2 else o
            o = keep * o + weight * o_new
            o = min(max(o, 0.0), 1.0)
        occ[i] = o
        irr[i, 0], irr[i, 1], irr[i, 2] = i0, i1, i2
        alb[i, 0], alb[i, 1], alb[i, 2] = a0, a1, a2
        spec[i, 0], spec[i, 1], spec[i, 2] = s0, s1, s2
