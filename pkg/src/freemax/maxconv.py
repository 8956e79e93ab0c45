"""Max-convolution algebra on distribution functions.

Every operation here acts pointwise on CDF values, so each one is a value
map ``y -> h(y)`` lifted to :class:`Cdf` objects.  Quantiles of the result
are obtained by pulling the level back through ``h`` and asking the input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dist_core import Cdf, GridMeasure, Law
from .errors import ContractError

KINDS = ("classical", "free", "boolean")
_E_INV = float(np.exp(-1.0))


def as_cdf(obj) -> Cdf:
    """Coerce laws, grid measures and objects with a ``cdf`` attribute to :class:`Cdf`."""
    if isinstance(obj, Cdf):
        return obj
    if isinstance(obj, (Law, GridMeasure)):
        return obj.to_cdf()
    inner = getattr(obj, "cdf", None)
    if isinstance(inner, Cdf):
        return inner
    raise ContractError(f"cannot interpret {type(obj).__name__} as a distribution function")


# ---------------------------------------------------------------------------
# value maps


def lambda_vee_value(y):
    """``max(0, 1 + log y)``, with value 0 at ``y = 0``."""
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.where(y > _E_INV, 1.0 + np.log(np.where(y > 0, y, 1.0)), 0.0)
    return out


def pi_vee_value(y):
    """``exp(-(1 - y))``."""
    return np.exp(-(1.0 - np.asarray(y, dtype=float)))


def x_vee_value(y):
    """``exp(1 - 1/y)``, with value 0 at ``y = 0``."""
    y = np.asarray(y, dtype=float)
    ys = np.where(y > 0, y, 1.0)
    with np.errstate(over="ignore"):
        return np.where(y > 0, np.exp(1.0 - 1.0 / ys), 0.0)


def x_vee_inv_value(y):
    """``1 / (1 - log y)``, with value 0 at ``y = 0``."""
    y = np.asarray(y, dtype=float)
    ys = np.where(y > 0, y, 1.0)
    return np.where(y > 0, 1.0 / (1.0 - np.log(ys)), 0.0)


def classical_max_value(y, t):
    return np.asarray(y, dtype=float) ** t


def free_max_value(y, t):
    return np.maximum(t * np.asarray(y, dtype=float) - (t - 1.0), 0.0)


def boolean_max_value(y, t):
    y = np.asarray(y, dtype=float)
    den = t - (t - 1.0) * y
    # t - (t-1) y >= min(1, t) > 0 on [0, 1]; the guard only matters for bad input
    den = np.where(np.abs(den) < 1e-300, 1e-300, den)
    return y / den


# generalized inverses ``inf{y : h(y) >= p}`` used for quantiles


def _inv_classical(p, t):
    return p ** (1.0 / t)


def _inv_free(p, t):
    return np.where(p > 0, (p + t - 1.0) / t, 0.0)


def _inv_boolean(p, t):
    return t * p / (1.0 + (t - 1.0) * p)


def _inv_lambda(p):
    return np.where(p > 0, np.exp(p - 1.0), 0.0)


def _inv_pi(p):
    with np.errstate(divide="ignore"):
        return np.where(p > _E_INV, 1.0 + np.log(np.where(p > 0, p, 1.0)), 0.0)


def _inv_x(p):
    return x_vee_inv_value(p)


def _inv_x_inv(p):
    return x_vee_value(p)


# value maps whose composition is exactly the identity; applied in floating
# point the inner map can underflow (exp(1 - 1/y) for small y) and lose F
_CANCELS = {("x_vee_inv", "x_vee"), ("x_vee", "x_vee_inv"), ("lambda_vee", "pi_vee")}


def _lift(f, h, h_inv, label, positive_only=False, lower_level=None, name=None):
    """Apply the value map ``h`` to the distribution function ``f``."""
    f = as_cdf(f)
    if name is not None and f.lifted_from is not None and (name, f.lifted_from[0]) in _CANCELS:
        return f.lifted_from[1]
    lo, hi = f.support_hint
    if positive_only and lo < 0:
        raise ContractError(f"{label} is defined for distributions on [0, inf) only")
    if f.is_positive:
        def ev(x):
            x_arr = np.asarray(x, dtype=float)
            val = np.where(x_arr < 0, 0.0, h(np.asarray(f.eval(x_arr), dtype=float)))
            return float(val) if np.ndim(x) == 0 else val
    else:
        if float(h(0.0)) != 0.0:
            raise ContractError(f"{label} maps 0 to a positive value; it needs a distribution on [0, inf)")

        def ev(x):
            val = h(np.asarray(f.eval(x), dtype=float))
            return float(val) if np.ndim(x) == 0 else val

    f0 = float(f.eval(0.0))
    if f.is_positive:
        atom0 = float(h(f0))
    else:
        atom0 = float(h(f0) - h(max(f0 - f.atom_zero, 0.0)))

    def qf(p):
        p_arr = np.asarray(p, dtype=float)
        val = np.asarray(f.quantile(np.clip(h_inv(p_arr), 0.0, 1.0)), dtype=float)
        if f.is_positive:
            # levels covered by the mass at 0
            val = np.where(p_arr <= atom0, 0.0, val)
        return float(val) if np.ndim(p) == 0 else val

    new_lo = lo
    if lower_level is not None and lower_level > 0:
        new_lo = max(lo, float(f.quantile(min(lower_level, 1.0))))
    if f.is_positive and atom0 > 0:
        new_lo = 0.0
    return Cdf(
        eval=ev,
        atom_zero=atom0,
        support_hint=(new_lo, hi),
        quantile_fn=qf,
        jumps=f.jumps,
        label=f"{label}({f.label})",
        lifted_from=None if name is None else (name, f),
    )


# ---------------------------------------------------------------------------
# max powers


@dataclass(frozen=True)
class MaxPowerSpec:
    """Kind and exponent of a max-convolution power; free powers need ``t >= 1``."""

    kind: str
    t: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ContractError(f"unknown max power kind {self.kind!r}")
        if not (self.t > 0 and np.isfinite(self.t)):
            raise ContractError(f"max power exponent must be > 0, got {self.t}")
        if self.kind == "free" and self.t < 1:
            raise ContractError("free max powers need t >= 1")

    def apply(self, f) -> Cdf:
        return {"classical": classical_max_pow, "free": free_max_pow, "boolean": boolean_max_pow}[
            self.kind
        ](f, self.t)


def classical_max_pow(f, t: float) -> Cdf:
    """``F^t``: distribution of the maximum of ``t`` independent copies."""
    if not t > 0:
        raise ContractError("classical max powers need t > 0")
    if t == 1:
        return as_cdf(f)
    return _lift(f, lambda y: classical_max_value(y, t), lambda p: _inv_classical(p, t), f"classical_max^{t:g}")


def free_max_pow(f, t: float) -> Cdf:
    """``max(t F - (t - 1), 0)`` for ``t >= 1``."""
    if not t >= 1:
        raise ContractError("free max powers need t >= 1")
    if t == 1:
        return as_cdf(f)
    return _lift(
        f,
        lambda y: free_max_value(y, t),
        lambda p: _inv_free(p, t),
        f"free_max^{t:g}",
        lower_level=1.0 - 1.0 / t,
    )


def boolean_max_pow(f, t: float) -> Cdf:
    """``F / (t - (t - 1) F)`` for distributions on ``[0, inf)``."""
    if not t > 0:
        raise ContractError("Boolean max powers need t > 0")
    f = as_cdf(f)
    if f.support_hint[0] < 0:
        raise ContractError("Boolean max powers are defined for distributions on [0, inf) only")
    if t == 1:
        return f
    return _lift(
        f, lambda y: boolean_max_value(y, t), lambda p: _inv_boolean(p, t), f"boolean_max^{t:g}", positive_only=True
    )


# ---------------------------------------------------------------------------
# value-map operators


def lambda_vee(f) -> Cdf:
    """``max(0, 1 + log F)``; not injective, so no inverse is provided."""
    return _lift(f, lambda_vee_value, _inv_lambda, "lambda_vee", lower_level=_E_INV, name="lambda_vee")


def pi_vee(f) -> Cdf:
    """``exp(-(1 - F))`` on ``[0, inf)``: the max-compound Poisson law built on ``F``."""
    return _lift(f, pi_vee_value, _inv_pi, "pi_vee", positive_only=True, name="pi_vee")


def x_vee(f) -> Cdf:
    """``exp(1 - 1/F)``."""
    return _lift(f, x_vee_value, _inv_x, "x_vee", name="x_vee")


def x_vee_inv(f) -> Cdf:
    """``1 / (1 - log F)``, inverse of :func:`x_vee`."""
    return _lift(f, x_vee_inv_value, _inv_x_inv, "x_vee_inv", name="x_vee_inv")


def b_t_vee(f, t: float) -> Cdf:
    """Max analogue of the Belinschi-Nica map: free max power ``1 + t`` then Boolean max power ``1/(1 + t)``."""
    if not t >= 0:
        raise ContractError("the max Belinschi-Nica map needs t >= 0")
    if t == 0:
        return as_cdf(f)
    return boolean_max_pow(free_max_pow(f, 1.0 + t), 1.0 / (1.0 + t))


# ---------------------------------------------------------------------------
# binary max-convolutions


def max_convolve(kind: str, f, g) -> Cdf:
    """Max-convolution of two distribution functions of the given independence kind."""
    if kind not in KINDS:
        raise ContractError(f"unknown max-convolution kind {kind!r}")
    f, g = as_cdf(f), as_cdf(g)
    if kind == "boolean" and (f.support_hint[0] < 0 or g.support_hint[0] < 0):
        raise ContractError("Boolean max-convolution is defined on [0, inf) only")

    def combine(a, b):
        if kind == "classical":
            return a * b
        if kind == "free":
            return np.maximum(a + b - 1.0, 0.0)
        den = a + b - a * b
        safe = np.where(den > 0, den, 1.0)
        return np.where(den > 0, a * b / safe, 0.0)

    def ev(x):
        val = combine(np.asarray(f.eval(x), dtype=float), np.asarray(g.eval(x), dtype=float))
        return float(val) if np.ndim(x) == 0 else val

    lo = max(f.support_hint[0], g.support_hint[0])
    hi = max(f.support_hint[1], g.support_hint[1])
    return Cdf(eval=ev, atom_zero=float(combine(f.atom_zero, g.atom_zero)) if lo >= 0 else 0.0,
               support_hint=(lo, hi), jumps=tuple(sorted(set(f.jumps) | set(g.jumps))),
               label=f"{kind}_max({f.label}, {g.label})")
