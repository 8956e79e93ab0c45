"""Low-level numerical kernels shared by the measure and transform modules."""

import numpy as np
from scipy.fft import dct

from .errors import NumericalError


def log1p_minus_id(q):
    """Return ``log(1 + q) - q`` without cancellation for small ``q``.

    Works for real or complex ``q`` with ``1 + q`` off the negative real axis.
    """
    q = np.asarray(q)
    out = np.log1p(q) - q
    small = np.abs(q) < 1e-3
    if np.any(small):
        qs = q[small]
        # alternating series, |q| < 1e-3 so seven terms reach double precision
        acc = np.zeros_like(qs)
        power = qs * qs
        for k in range(2, 9):
            acc = acc + ((-1) ** (k + 1)) * power / k
            power = power * qs
        out = np.array(out, copy=True)
        out[small] = acc
    return out


def log1p_minus_id_pos(q):
    """``log(1 + q) - q`` for real ``q >= 0``; the Taylor branch is in Horner form."""
    out = np.log1p(q) - q
    small = q < 1e-3
    if np.any(small):
        qs = q[small]
        out[small] = qs * qs * (-0.5 + qs * (1 / 3 - qs * (0.25 - qs * (0.2 - qs / 6))))
    return out


def chebyshev_edges(lo, hi, n):
    """Arcsine-clustered nodes on ``[lo, hi]``, endpoints included."""
    theta = np.linspace(0.0, np.pi, n)
    x = lo + 0.5 * (hi - lo) * (1.0 - np.cos(theta))
    x[0], x[-1] = lo, hi
    return x


def chebyshev_midpoints(lo, hi, n):
    """Interior nodes ``lo + L (1 - cos(theta_k)) / 2`` at ``theta_k = pi (k + 1/2) / n``."""
    theta = np.pi * (np.arange(n) + 0.5) / n
    return lo + 0.5 * (hi - lo) * (1.0 - np.cos(theta)), theta


def cumulative_mass_cosine(density_mid, lo, hi, n_out):
    """Integrate a density sampled at :func:`chebyshev_midpoints`.

    After the substitution ``x = lo + L (1 - cos theta) / 2`` the integrand
    ``rho(x(theta)) * (L / 2) * sin(theta)`` is smooth for densities with
    square-root or inverse-square-root behaviour at both edges.  It is
    expanded in a cosine series (DCT-II of the midpoint samples) and
    integrated term by term.

    Returns ``(x_nodes, cumulative)`` on ``n_out`` arcsine-clustered nodes
    with ``cumulative[0] == 0``.
    """
    density_mid = np.asarray(density_mid, dtype=float)
    n = density_mid.size
    theta_mid = np.pi * (np.arange(n) + 0.5) / n
    g = density_mid * 0.5 * (hi - lo) * np.sin(theta_mid)
    coef = dct(g, type=2) / n
    theta_out = np.linspace(0.0, np.pi, n_out)
    m = np.arange(1, n)
    # F(theta) = c0/2 * theta + sum_m c_m sin(m theta) / m
    cum = 0.5 * coef[0] * theta_out
    cum = cum + np.sin(np.outer(theta_out, m)) @ (coef[1:] / m)
    cum[0] = 0.0
    x = chebyshev_edges(lo, hi, n_out)
    return x, cum


def newton_upper_half_plane(residual, z, w0, scale, tol=1e-13, maxiter=60):
    """Continue roots of ``residual(w, z) = 0`` from far above the axis down to ``z``.

    ``residual`` returns ``(h, dh)`` for arrays ``w`` and ``z``.  The
    imaginary part of the target points is lowered geometrically from
    ``max(scale, Im z)`` to ``Im z``; at each level Newton's method is
    restarted from the previous solution with step halving to stay in the
    upper half-plane.  ``w0(z)`` supplies the starting value at the top
    level.

    Returns ``(w, iterations, residual_norm)``.
    """
    z = np.asarray(z, dtype=complex)
    target_im = z.imag
    top = np.maximum(scale, target_im)
    n_levels = int(np.ceil(np.log10(np.max(top / target_im)))) + 1
    n_levels = max(n_levels, 1)
    iters = 0
    w = None
    for level in range(n_levels + 1):
        frac = min(level / max(n_levels, 1), 1.0)
        im = np.exp((1.0 - frac) * np.log(top) + frac * np.log(target_im))
        zz = z.real + 1j * im
        if w is None:
            w = np.asarray(w0(zz), dtype=complex)
        w, k, res = _newton_level(residual, zz, w, tol, maxiter)
        iters += k
    return w, iters, res


def _newton_level(residual, z, w, tol, maxiter):
    # stop on the step size, measured against Im w so that near-real roots
    # keep their relative accuracy in the imaginary direction
    h, dh = residual(w, z)
    active = np.ones(w.shape, dtype=bool)
    prev = np.full(w.shape, np.inf)
    k = 0
    for k in range(1, maxiter + 1):
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(active, h / dh, 0.0)
        step = np.where(np.isfinite(step), step, 0.0)
        lam = np.ones(w.shape)
        w_new = w - step
        for _ in range(40):
            bad = (w_new.imag <= 0.0) & active
            if not np.any(bad):
                break
            lam = np.where(bad, 0.5 * lam, lam)
            w_new = w - lam * step
        h_new, dh_new = residual(w_new, z)
        # keep the iterate only where it does not blow up
        accept = np.isfinite(h_new) & np.isfinite(dh_new)
        w = np.where(accept, w_new, w)
        h = np.where(accept, h_new, h)
        dh = np.where(accept, dh_new, dh)
        size = np.abs(lam * step)
        # a step that no longer shrinks has reached round-off
        stalled = (size > 0.25 * prev) & (size < 1e-8 * (1.0 + np.abs(w)))
        active = active & (size > tol * w.imag + 4e-16 * np.abs(w)) & ~stalled
        prev = np.where(lam == 1.0, size, np.inf)
        if not np.any(active):
            break
    if not np.all(np.isfinite(w)):
        raise NumericalError("Newton continuation produced non-finite iterates")
    return w, k, np.abs(h)
