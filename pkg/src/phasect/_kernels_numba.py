"""Numba-accelerated kernels.

Loop-level implementations of the same sampling protocol as the numpy
fallback (see that module for the contract); results agree with the
fallback to round-off.  Kernels are sequential and cache their compiled
form on disk.
"""

from __future__ import annotations

import numpy as np
from numba import njit

BACKEND_NAME = "numba"

_JIT = dict(cache=True, nogil=True)


@njit(**_JIT)
def _bilinear_point(image, col, row, n):
    if col < 0.0:
        col = 0.0
    elif col > n - 1.0:
        col = n - 1.0
    if row < 0.0:
        row = 0.0
    elif row > n - 1.0:
        row = n - 1.0
    ix = int(col)
    iy = int(row)
    if ix > n - 2:
        ix = n - 2
    if iy > n - 2:
        iy = n - 2
    fx = col - ix
    fy = row - iy
    return ((1.0 - fy) * ((1.0 - fx) * image[iy, ix] + fx * image[iy, ix + 1])
            + fy * ((1.0 - fx) * image[iy + 1, ix] + fx * image[iy + 1, ix + 1]))


@njit(**_JIT)
def forward_project(image, cos_a, sin_a, m, pitch_px, step_px):
    n = image.shape[0]
    c = (n - 1) / 2.0
    n_views = cos_a.shape[0]
    out = np.zeros((n_views, m), dtype=np.float64)
    for v in range(n_views):
        ca = cos_a[v]
        sa = sin_a[v]
        for q in range(m):
            u = (q - (m - 1) / 2.0) * pitch_px
            px = u * ca
            py = u * sa
            # intersect the ray (px - t*sa, py + t*ca) with [-c, c]^2
            t_min = -np.inf
            t_max = np.inf
            empty = False
            if abs(sa) > 1e-12:
                t1 = (-c - px) / (-sa)
                t2 = (c - px) / (-sa)
                lo = min(t1, t2)
                hi = max(t1, t2)
                if lo > t_min:
                    t_min = lo
                if hi < t_max:
                    t_max = hi
            elif abs(px) > c:
                empty = True
            if abs(ca) > 1e-12:
                t1 = (-c - py) / ca
                t2 = (c - py) / ca
                lo = min(t1, t2)
                hi = max(t1, t2)
                if lo > t_min:
                    t_min = lo
                if hi < t_max:
                    t_max = hi
            elif abs(py) > c:
                empty = True
            rng = t_max - t_min
            if empty or not (rng > 0.0):
                continue
            nsteps = int(np.ceil(rng / step_px))
            if nsteps < 1:
                nsteps = 1
            dt = rng / nsteps
            acc = 0.0
            for i in range(nsteps):
                t = t_min + (i + 0.5) * dt
                x = px - t * sa
                y = py + t * ca
                acc += _bilinear_point(image, x + c, y + c, n)
            out[v, q] = acc * dt
    return out


@njit(**_JIT)
def backproject(rows, cos_a, sin_a, n_out, ratio):
    n_views = rows.shape[0]
    m = rows.shape[1]
    c = (n_out - 1) / 2.0
    cm = (m - 1) / 2.0
    a = np.empty(n_out, dtype=np.float64)
    for i in range(n_out):
        a[i] = (i - c) * ratio
    out = np.zeros((n_out, n_out), dtype=np.float64)
    for v in range(n_views):
        ca = cos_a[v]
        sa = sin_a[v]
        for r in range(n_out):
            base = a[r] * sa + cm
            for cl in range(n_out):
                pos = a[cl] * ca + base
                if pos < 0.0 or pos > m - 1.0:
                    continue
                iu = int(pos)
                if iu > m - 2:
                    iu = m - 2
                f = pos - iu
                out[r, cl] += (1.0 - f) * rows[v, iu] + f * rows[v, iu + 1]
    return out


@njit(**_JIT)
def _band_matvec(x, offsets, coefs, out):
    m = x.shape[0]
    for i in range(m):
        out[i] = 0.0
    for j in range(offsets.shape[0]):
        o = offsets[j]
        cf = coefs[j]
        lo = 0 if o >= 0 else -o
        hi = m - o if o >= 0 else m
        for i in range(lo, hi):
            out[i] += cf * x[i + o]
    return out


@njit(**_JIT)
def _band_matvec_t(x, offsets, coefs, out):
    m = x.shape[0]
    for i in range(m):
        out[i] = 0.0
    for j in range(offsets.shape[0]):
        o = offsets[j]
        cf = coefs[j]
        lo = 0 if o <= 0 else o
        hi = m + o if o <= 0 else m
        for i in range(lo, hi):
            out[i] += cf * x[i - o]
    return out


@njit(**_JIT)
def _tv_gradient(phi, tv_eps, out):
    m = phi.shape[0]
    for i in range(m):
        out[i] = 0.0
    for q in range(1, m):
        d = phi[q] - phi[q - 1]
        w = d / np.sqrt(d * d + tv_eps)
        out[q] += w
        out[q - 1] -= w
    return out


@njit(**_JIT)
def _objective(phi, meas, offsets, coefs, inv_var, alpha, tv_eps, work):
    m = phi.shape[0]
    _band_matvec(phi, offsets, coefs, work)
    fid = 0.0
    for i in range(m):
        r = work[i] - meas[i]
        fid += inv_var[i] * r * r
    if alpha <= 0.0:
        return fid
    tv = 0.0
    for q in range(1, m):
        d = phi[q] - phi[q - 1]
        tv += np.sqrt(d * d + tv_eps)
    return fid + alpha * tv


@njit(**_JIT)
def pwls_solve(init, meas, offsets, coefs, inv_var, alpha, tau, tv_eps,
               max_iters, rel_tol, nonneg):
    m = init.shape[0]
    phi = init.copy()
    resid = np.empty(m, dtype=np.float64)
    grad = np.empty(m, dtype=np.float64)
    bg = np.empty(m, dtype=np.float64)
    tg = np.empty(m, dtype=np.float64)
    work = np.empty(m, dtype=np.float64)
    trace = np.zeros(max_iters + 1, dtype=np.float64)
    trace[0] = _objective(phi, meas, offsets, coefs, inv_var, alpha, tv_eps, work)
    n_iters = 0
    converged = False
    for it in range(1, max_iters + 1):
        _band_matvec(phi, offsets, coefs, resid)
        for i in range(m):
            resid[i] = inv_var[i] * (resid[i] - meas[i])
        _band_matvec_t(resid, offsets, coefs, grad)
        gg = 0.0
        for i in range(m):
            gg += grad[i] * grad[i]
        if gg > 0.0:
            _band_matvec(grad, offsets, coefs, bg)
            denom = 0.0
            for i in range(m):
                denom += inv_var[i] * bg[i] * bg[i]
            eta = gg / denom
            for i in range(m):
                phi[i] -= eta * grad[i]
        if alpha > 0.0 and tau > 0.0:
            _tv_gradient(phi, tv_eps, tg)
            tnorm = 0.0
            for i in range(m):
                tnorm += tg[i] * tg[i]
            tnorm = np.sqrt(tnorm)
            if tnorm > 0.0:
                scale = tau / tnorm
                for i in range(m):
                    phi[i] -= scale * tg[i]
        if nonneg:
            for i in range(m):
                if phi[i] < 0.0:
                    phi[i] = 0.0
        obj = _objective(phi, meas, offsets, coefs, inv_var, alpha, tv_eps, work)
        trace[it] = obj
        n_iters = it
        prev = trace[it - 1]
        bound = rel_tol * (abs(prev) if abs(prev) > 1e-300 else 1e-300)
        if abs(prev - obj) <= bound:
            converged = True
            break
    return phi, trace, n_iters, converged
