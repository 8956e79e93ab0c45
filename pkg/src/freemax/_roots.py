"""Vectorised bracketed root finding for monotone functions."""

import numpy as np

from .errors import NumericalError


def bisect_monotone(func, lo, hi, target=0.0, increasing=True, xtol=0.0,
                    rtol=4e-16, maxiter=200):
    """Solve ``func(x) = target`` elementwise for a monotone ``func``.

    ``lo`` and ``hi`` are broadcast against ``target``; each element is
    assumed to bracket its root.  The bracket is halved until its width drops
    below ``xtol + rtol * |x|``.  ``func`` must accept and return arrays.
    """
    target = np.asarray(target, dtype=float)
    lo = np.broadcast_to(np.asarray(lo, dtype=float), target.shape).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), target.shape).copy()
    sign = 1.0 if increasing else -1.0
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        width = hi - lo
        if np.all((width <= xtol + rtol * np.abs(mid)) | (mid == lo) | (mid == hi)):
            return mid
        above = sign * (func(mid) - target) > 0
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    width = hi - lo
    if np.any(width > 1e3 * (xtol + rtol * np.abs(lo)) + 1e-300):
        raise NumericalError("bisection did not converge within %d steps" % maxiter)
    return 0.5 * (lo + hi)


def illinois_monotone(func, lo, hi, target=0.0, increasing=True, xtol=1e-15,
                      rtol=4e-16, maxiter=100):
    """Bracketed Illinois iteration for a monotone ``func``, vectorised.

    Same contract as :func:`bisect_monotone` but converges superlinearly
    for smooth ``func``.  A bisection step replaces the secant point
    whenever a bracket fails to halve over two iterations.
    """
    target = np.asarray(target, dtype=float)
    sign = 1.0 if increasing else -1.0
    a = np.broadcast_to(np.asarray(lo, dtype=float), target.shape).copy()
    b = np.broadcast_to(np.asarray(hi, dtype=float), target.shape).copy()

    tflat = np.broadcast_to(target, a.shape).ravel()

    def g_at(x, idx):
        return sign * (np.asarray(func(x), dtype=float).ravel() - tflat[idx])

    everything = np.arange(a.size)
    fa = g_at(a.ravel(), everything).reshape(a.shape)
    fb = g_at(b.ravel(), everything).reshape(a.shape)
    # targets outside the bracket settle on the nearer end
    below = fa >= 0
    above = fb <= 0
    done = (below | above).copy()
    out = np.where(below, a, b)
    side = np.zeros(target.shape, dtype=int)
    width_ref = b - a
    prev = np.full(target.shape, np.nan)
    for it in range(maxiter):
        width = b - a
        conv = done | (width <= xtol + rtol * np.maximum(np.abs(a), np.abs(b)))
        act = np.flatnonzero(~conv)
        if not act.size:
            break
        aa, bb, fa_, fb_ = a.flat[act], b.flat[act], fa.flat[act], fb.flat[act]
        with np.errstate(divide="ignore", invalid="ignore"):
            x = bb - fb_ * (bb - aa) / (fb_ - fa_)
        slow = (it % 2 == 1) & (width.flat[act] > 0.5 * width_ref.flat[act])
        bad = ~np.isfinite(x) | (x <= aa) | (x >= bb) | slow
        x = np.where(bad, 0.5 * (aa + bb), x)
        if it % 2 == 1:
            width_ref = width.copy()
        fx = g_at(x, act)
        # consecutive secant iterates agreeing to within the tolerance; one
        # bracket end can stay put for many steps, so width alone is slow
        tol_x = xtol + rtol * np.abs(x)
        hit = (fx == 0) | (~bad & (np.abs(x - prev.flat[act]) <= 4.0 * tol_x))
        prev.flat[act] = x
        out.flat[act[hit]] = x[hit]
        done.flat[act[hit]] = True
        right = fx > 0
        sd = side.flat[act]
        # Illinois: halve the value kept at a stale end
        fa.flat[act] = np.where(right, np.where(sd == -1, 0.5 * fa_, fa_), fx)
        fb.flat[act] = np.where(right, fx, np.where(sd == 1, 0.5 * fb_, fb_))
        side.flat[act] = np.where(right, -1, 1)
        a.flat[act] = np.where(right, aa, x)
        b.flat[act] = np.where(right, x, bb)
    else:
        width = b - a
        if np.any(~done & (width > 1e3 * (xtol + rtol * np.maximum(np.abs(a), np.abs(b))))):
            raise NumericalError("Illinois iteration did not converge within %d steps" % maxiter)
    return np.where(done, out, 0.5 * (a + b))


def solve_log_negative(func, target, increasing=True, lo=1e-12, hi=1e12,
                       maxiter=100, transform=None):
    """Solve ``func(u) = target`` for ``u < 0`` bracketed in ``-[hi, lo]``.

    The search runs on ``s = log(-u)`` so that the bracket spans many decades
    at uniform cost.  ``increasing`` refers to monotonicity in ``u``.
    ``transform``, an increasing map applied to both ``func`` and ``target``,
    can straighten the curve in ``s`` so that secant steps converge fast.
    """
    if transform is None:
        def in_s(s):
            return func(-np.exp(s))
    else:
        def in_s(s):
            return transform(np.asarray(func(-np.exp(s)), dtype=float))
        target = transform(np.asarray(target, dtype=float))

    # one coarse table narrows every bracket to a single cell
    target = np.asarray(target, dtype=float)
    table_s = np.linspace(np.log(lo), np.log(hi), 97)
    table = np.asarray(in_s(table_s), dtype=float)
    # u increasing means s decreasing
    key = -table if increasing else table
    # enforce monotonicity against round-off before searching
    key = np.maximum.accumulate(key)
    tk = -target if increasing else target
    idx = np.clip(np.searchsorted(key, tk), 1, table_s.size - 1)
    s_lo, s_hi = table_s[idx - 1], table_s[idx]
    s = illinois_monotone(in_s, s_lo, s_hi, target=target,
                          increasing=not increasing, xtol=1e-15, rtol=4e-16,
                          maxiter=maxiter)
    return -np.exp(s)
