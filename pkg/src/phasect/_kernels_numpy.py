"""Pure-numpy fallback kernels.

Same signatures and same sampling protocol as the numba kernels so the two
backends agree to floating-point round-off:

* ``forward_project``: per-ray midpoint quadrature over the ray's exact
  intersection with the pixel-center hull, step adapted down so an integer
  number of samples covers the chord;
* ``backproject``: pixel-driven accumulation with linear interpolation
  along each filtered detector row;
* ``pwls_solve``: penalized weighted-least-squares descent on one detector
  row (exact line search on the fidelity term, fixed-length smoothed-TV
  step, optional nonnegativity clamp).

All length quantities are in pixel units; callers apply physical scalings.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"


def forward_project(image: np.ndarray, cos_a: np.ndarray, sin_a: np.ndarray,
                    m: int, pitch_px: float, step_px: float) -> np.ndarray:
    """Line integrals of ``image`` (values x pixel-unit length) for every
    (view, element) pair.  Element q's ray passes at signed distance
    ``(q - (m-1)/2) * pitch_px`` from the grid center, perpendicular to the
    view direction."""
    n = image.shape[0]
    c = (n - 1) / 2.0
    n_views = cos_a.shape[0]
    u = (np.arange(m, dtype=np.float64) - (m - 1) / 2.0) * pitch_px
    out = np.empty((n_views, m), dtype=np.float64)
    for v in range(n_views):
        ca = cos_a[v]
        sa = sin_a[v]
        px = u * ca
        py = u * sa
        t_lo, t_hi = _slab_range(px, -sa, c)
        t_lo2, t_hi2 = _slab_range(py, ca, c)
        t_min = np.maximum(t_lo, t_lo2)
        t_max = np.minimum(t_hi, t_hi2)
        rng = t_max - t_min
        valid = rng > 0.0
        t_min = np.where(valid, t_min, 0.0)
        rng = np.where(valid, rng, 0.0)
        nsteps = np.where(valid, np.ceil(rng / step_px), 1.0)
        dt = rng / nsteps
        n_max = int(nsteps.max())
        idx = np.arange(n_max, dtype=np.float64)
        t = t_min[:, None] + (idx[None, :] + 0.5) * dt[:, None]
        active = idx[None, :] < nsteps[:, None]
        x = px[:, None] - t * sa
        y = py[:, None] + t * ca
        vals = _bilinear(image, x + c, y + c)
        out[v, :] = (vals * active).sum(axis=1) * dt
    return out


def _slab_range(p: np.ndarray, d: float, c: float) -> tuple[np.ndarray, np.ndarray]:
    """Parameter range where coordinate ``p + t*d`` stays inside [-c, c]."""
    if abs(d) > 1e-12:
        t1 = (-c - p) / d
        t2 = (c - p) / d
        return np.minimum(t1, t2), np.maximum(t1, t2)
    inside = np.abs(p) <= c
    lo = np.where(inside, -np.inf, 1.0)
    hi = np.where(inside, np.inf, 0.0)
    return lo, hi


def _bilinear(image: np.ndarray, col: np.ndarray, row: np.ndarray) -> np.ndarray:
    """Bilinear samples at fractional (row, col); coordinates are clamped to
    the valid hull (callers only pass points inside up to round-off)."""
    n = image.shape[0]
    col = np.clip(col, 0.0, n - 1.0)
    row = np.clip(row, 0.0, n - 1.0)
    ix = np.minimum(col.astype(np.int64), n - 2)
    iy = np.minimum(row.astype(np.int64), n - 2)
    fx = col - ix
    fy = row - iy
    v00 = image[iy, ix]
    v01 = image[iy, ix + 1]
    v10 = image[iy + 1, ix]
    v11 = image[iy + 1, ix + 1]
    return ((1.0 - fy) * ((1.0 - fx) * v00 + fx * v01)
            + fy * ((1.0 - fx) * v10 + fx * v11))


def backproject(rows: np.ndarray, cos_a: np.ndarray, sin_a: np.ndarray,
                n_out: int, ratio: float) -> np.ndarray:
    """Accumulate filtered detector rows over all views onto an
    ``n_out x n_out`` grid.  ``ratio`` converts output pixels to detector
    elements; samples outside the detector contribute zero.  The angular
    weight (pi / n_views) is applied by the caller."""
    n_views, m = rows.shape
    c = (n_out - 1) / 2.0
    cm = (m - 1) / 2.0
    a = (np.arange(n_out, dtype=np.float64) - c) * ratio
    out = np.zeros((n_out, n_out), dtype=np.float64)
    for v in range(n_views):
        pos = a[None, :] * cos_a[v] + a[:, None] * sin_a[v] + cm
        inside = (pos >= 0.0) & (pos <= m - 1.0)
        posc = np.clip(pos, 0.0, m - 1.0)
        iu = np.minimum(posc.astype(np.int64), m - 2)
        f = posc - iu
        row = rows[v]
        out += inside * ((1.0 - f) * row[iu] + f * row[iu + 1])
    return out


def pwls_solve(init: np.ndarray, meas: np.ndarray, offsets: np.ndarray,
               coefs: np.ndarray, inv_var: np.ndarray, alpha: float,
               tau: float, tv_eps: float, max_iters: int, rel_tol: float,
               nonneg: bool) -> tuple[np.ndarray, np.ndarray, int, bool]:
    """One-row penalized weighted-least-squares solve.

    Returns ``(phi, trace, n_iters, converged)`` where ``trace`` has length
    ``max_iters + 1`` and entries ``[0 .. n_iters]`` are meaningful.
    """
    m = init.shape[0]
    phi = init.copy()
    trace = np.zeros(max_iters + 1, dtype=np.float64)
    trace[0] = _objective(phi, meas, offsets, coefs, inv_var, alpha, tv_eps)
    n_iters = 0
    converged = False
    for it in range(1, max_iters + 1):
        resid = _band_matvec(phi, offsets, coefs) - meas
        grad = _band_matvec_t(inv_var * resid, offsets, coefs)
        gg = float(grad @ grad)
        if gg > 0.0:
            bg = _band_matvec(grad, offsets, coefs)
            denom = float((inv_var * bg) @ bg)
            phi = phi - (gg / denom) * grad
        if alpha > 0.0 and tau > 0.0:
            tg = _tv_gradient(phi, tv_eps)
            tnorm = float(np.sqrt(tg @ tg))
            if tnorm > 0.0:
                phi = phi - (tau / tnorm) * tg
        if nonneg:
            phi = np.maximum(phi, 0.0)
        obj = _objective(phi, meas, offsets, coefs, inv_var, alpha, tv_eps)
        trace[it] = obj
        n_iters = it
        prev = trace[it - 1]
        if abs(prev - obj) <= rel_tol * max(abs(prev), 1e-300):
            converged = True
            break
    return phi, trace, n_iters, converged


def _band_matvec(x: np.ndarray, offsets: np.ndarray, coefs: np.ndarray) -> np.ndarray:
    """y_i = sum_o c_o * x_{i+o}, entries outside [0, m) dropped."""
    m = x.shape[0]
    y = np.zeros(m, dtype=np.float64)
    for o, cf in zip(offsets, coefs):
        o = int(o)
        if o >= 0:
            y[:m - o] += cf * x[o:]
        else:
            y[-o:] += cf * x[:m + o]
    return y


def _band_matvec_t(x: np.ndarray, offsets: np.ndarray, coefs: np.ndarray) -> np.ndarray:
    """Transpose of ``_band_matvec``: y_i = sum_o c_o * x_{i-o}."""
    m = x.shape[0]
    y = np.zeros(m, dtype=np.float64)
    for o, cf in zip(offsets, coefs):
        o = int(o)
        if o >= 0:
            y[o:] += cf * x[:m - o]
        else:
            y[:m + o] += cf * x[-o:]
    return y


def _tv_gradient(phi: np.ndarray, tv_eps: float) -> np.ndarray:
    d = np.diff(phi)
    w = d / np.sqrt(d * d + tv_eps)
    g = np.zeros_like(phi)
    g[1:] += w
    g[:-1] -= w
    return g


def _objective(phi: np.ndarray, meas: np.ndarray, offsets: np.ndarray,
               coefs: np.ndarray, inv_var: np.ndarray, alpha: float,
               tv_eps: float) -> float:
    resid = _band_matvec(phi, offsets, coefs) - meas
    fid = float((inv_var * resid) @ resid)
    if alpha <= 0.0:
        return fid
    d = np.diff(phi)
    return fid + alpha * float(np.sum(np.sqrt(d * d + tv_eps)))
