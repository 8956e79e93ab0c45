"""Probability measures on the half-line.

Three representations live here:

* :class:`Law` subclasses, a catalog of closed-form distributions;
* :class:`GridMeasure`, atoms plus a piecewise-linear continuous CDF on a grid;
* :class:`Cdf`, a bare distribution function with quantile access, which is
  all the max-convolution algebra needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, special, stats

from ._numeric import chebyshev_edges, log1p_minus_id, log1p_minus_id_pos
from ._roots import bisect_monotone
from .errors import ContractError, UnsupportedLawError

INF = math.inf

# masses below this are treated as absent
MASS_EPS = 1e-15


def _as_array(x):
    return np.asarray(x, dtype=float)


def _like_input(x, out):
    """Return a Python float for scalar input, an array otherwise."""
    if np.ndim(x) == 0:
        return float(np.asarray(out).reshape(()))
    return out


def _atomic_cdf(atoms, x):
    x = _as_array(x)
    out = np.zeros(x.shape)
    for loc, mass in atoms:
        out = out + mass * (x >= loc)
    return out


def _atomic_cauchy(atoms, z):
    z = np.asarray(z, dtype=complex)
    g = np.zeros(z.shape, dtype=complex)
    dg = np.zeros(z.shape, dtype=complex)
    for loc, mass in atoms:
        inv = 1.0 / (z - loc)
        g = g + mass * inv
        dg = dg - mass * inv * inv
    return g, dg


def _atomic_psi(atoms, u):
    u = _as_array(u)
    out = np.zeros(u.shape)
    for loc, mass in atoms:
        if loc > 0:
            out = out + mass * u * loc / (1.0 - u * loc)
    return out


def _check_negative_u(u):
    u = _as_array(u)
    if np.any(u >= 0) or np.any(np.isnan(u)):
        raise ContractError("the Psi-transform is only evaluated at u < 0")
    return u


# ---------------------------------------------------------------------------
# generic quantile


def _generic_quantile(cdf, p, lower, upper, jumps=(), xtol=1e-12):
    """Left-continuous generalized inverse ``inf{x : cdf(x) >= p}`` by bisection."""
    p_arr = _as_array(p)
    if np.any((p_arr < 0) | (p_arr > 1)) or np.any(np.isnan(p_arr)):
        raise ContractError("quantile levels must lie in [0, 1]")
    flat = p_arr.ravel()
    out = np.empty(flat.shape)
    low_edge = flat <= 0.0
    high_edge = flat >= 1.0
    out[low_edge] = lower
    out[high_edge] = upper
    mid = ~(low_edge | high_edge)
    if np.any(mid):
        q = flat[mid]
        lo = np.full(q.shape, lower if np.isfinite(lower) else -1.0)
        if not np.isfinite(lower):
            for _ in range(2100):
                need = cdf(lo) >= q
                if not np.any(need):
                    break
                lo = np.where(need, 2.0 * lo, lo)
        hi = np.full(q.shape, upper if np.isfinite(upper) else max(1.0, np.max(lo) + 1.0))
        if not np.isfinite(upper):
            for _ in range(2100):
                need = cdf(hi) < q
                if not np.any(need):
                    break
                hi = np.where(need, 2.0 * np.abs(hi) + 1.0, hi)
        # invariant: cdf(lo) < q (or lo is the support floor), cdf(hi) >= q
        for _ in range(400):
            width = hi - lo
            if np.all(width <= xtol + 4e-16 * np.abs(hi)):
                break
            m = lo + 0.5 * width
            ok = cdf(m) >= q
            hi = np.where(ok, m, hi)
            lo = np.where(ok, lo, m)
        for loc in jumps:
            near = np.abs(hi - loc) <= 1e-9 * (1.0 + abs(loc))
            if np.any(near):
                hit = near & (cdf(np.full(hi.shape, loc)) >= q)
                hi = np.where(hit, loc, hi)
        out[mid] = hi
    return _like_input(p, out.reshape(p_arr.shape))


# ---------------------------------------------------------------------------
# Cdf


@dataclass(frozen=True, eq=False)
class Cdf:
    """A distribution function with quantile access.

    Parameters
    ----------
    eval : callable
        Vectorized ``x -> F(x)``, nondecreasing and right-continuous.
    atom_zero : float
        Mass at the origin.
    support_hint : tuple of float
        ``(lower, upper)`` bounds of the support, possibly infinite.
    quantile_fn : callable, optional
        Closed-form generalized inverse; bisection on ``eval`` otherwise.
    jumps : tuple of float
        Known jump locations, used to snap bisection quantiles onto atoms.
    label : str
        Free-form description used in reports.
    lifted_from : tuple, optional
        ``(name, base)`` when this CDF is a named value map applied to ``base``.
    """

    eval: Callable
    atom_zero: float = 0.0
    support_hint: tuple = (-INF, INF)
    quantile_fn: Optional[Callable] = None
    jumps: tuple = ()
    label: str = ""
    lifted_from: Optional[tuple] = None

    def __call__(self, x):
        return self.eval(x)

    def quantile(self, p):
        if self.quantile_fn is not None:
            p_arr = _as_array(p)
            if np.any((p_arr < 0) | (p_arr > 1)) or np.any(np.isnan(p_arr)):
                raise ContractError("quantile levels must lie in [0, 1]")
            return self.quantile_fn(p)
        lo, hi = self.support_hint
        return _generic_quantile(self.eval, p, lo, hi, self.jumps)

    @property
    def is_positive(self) -> bool:
        """True when the distribution lives on ``[0, inf)``."""
        return self.support_hint[0] >= 0.0


# ---------------------------------------------------------------------------
# closed-form catalog


class Law:
    """Base class of the closed-form catalog.

    Subclasses are frozen dataclasses carrying their parameters.  Methods
    that a law cannot support raise :class:`UnsupportedLawError`.
    """

    #: laws living on [0, inf) may enter the transform pipeline
    positive = True

    @property
    def tag(self) -> str:
        return type(self).__name__

    def describe(self) -> str:
        return repr(self)

    # -- distribution function -------------------------------------------
    def cdf(self, x):
        raise UnsupportedLawError(f"{self.tag} has no distribution function")

    def pdf(self, x):
        """Density of the continuous part."""
        raise UnsupportedLawError(f"{self.tag} has no implemented density")

    def atoms(self) -> tuple:
        """Atoms as ``((location, mass), ...)``, sorted by location."""
        return ()

    @property
    def atom_zero(self) -> float:
        return float(sum(m for loc, m in self.atoms() if loc == 0.0))

    def support(self) -> tuple:
        raise NotImplementedError

    def continuous_support(self):
        """Interval carrying the absolutely continuous part, or None."""
        return None

    def continuous_cdf(self, x):
        """Cumulative mass of the continuous part only."""
        return self.cdf(x) - _atomic_cdf(self.atoms(), x)

    def quantile(self, p):
        lo, hi = self.support()
        return _generic_quantile(self.cdf, p, lo, hi, [a for a, _ in self.atoms()])

    def to_cdf(self) -> Cdf:
        return Cdf(
            eval=self.cdf,
            atom_zero=self.atom_zero,
            support_hint=self.support(),
            quantile_fn=self.quantile,
            jumps=tuple(a for a, _ in self.atoms()),
            label=self.describe(),
        )

    # -- analytic transforms ---------------------------------------------
    def cauchy(self, z):
        return self.cauchy_with_derivative(z)[0]

    def cauchy_with_derivative(self, z):
        raise UnsupportedLawError(f"no Cauchy transform implemented for {self.tag}")

    def psi(self, u):
        """``int u x / (1 - u x) dmu(x)`` for ``u < 0``, computed from the Cauchy transform."""
        u = _check_negative_u(u)
        w = 1.0 / u
        g = np.real(self.cauchy(w + 0j))
        return _like_input(u, w * g - 1.0)

    has_closed_s = False

    def s_eval(self, z):
        raise UnsupportedLawError(f"no closed S-transform for {self.tag}")

    def s_inverse(self, y):
        raise UnsupportedLawError(f"no closed S-transform for {self.tag}")

    # -- moments ----------------------------------------------------------
    def moments_ab(self) -> tuple:
        return self.numeric_moments_ab()

    def numeric_moments_ab(self) -> tuple:
        """``(a, b)`` by quadrature with decade-by-decade refinement at 0 and infinity."""
        return _numeric_moments_ab(self)


def _refined_sum(piece, max_pieces=80, cap=1e12):
    """Accumulate ``piece(k)`` over decades until it converges or clearly diverges."""
    total = 0.0
    growth = 0
    prev = None
    for k in range(max_pieces):
        inc = piece(k)
        total += inc
        if total > cap:
            return INF
        if inc <= 1e-15 * max(total, 1e-300):
            return total
        if prev is not None and prev > 0 and inc / prev >= 0.95:
            growth += 1
            if growth >= 4:
                return INF
        else:
            growth = 0
        prev = inc
    return INF


def _numeric_moments_ab(law: Law):
    if not law.positive:
        raise ContractError(f"{law.tag} is not supported on [0, inf)")
    atoms = law.atoms()
    atom0 = sum(m for loc, m in atoms if loc == 0.0)
    mean_atoms = sum(m * loc for loc, m in atoms)
    harm_atoms = sum(m / loc for loc, m in atoms if loc > 0)
    cs = law.continuous_support()
    if cs is None:
        b = mean_atoms
        a = 0.0 if atom0 > 0 else (1.0 / harm_atoms if harm_atoms > 0 else INF)
        return a, b
    lo, hi = cs
    anchor = float(law.quantile(0.5))
    if not (lo < anchor < hi):
        anchor = lo + 0.5 * (hi - lo) if np.isfinite(hi) else max(2.0 * lo, lo + 1.0)

    def log_quad(f, s0, s1):
        val, _ = integrate.quad(lambda s: f(math.exp(s)), s0, s1, limit=200)
        return val

    pdf = law.pdf
    # mean: bulk piece then decades upward
    up_lo = math.log(anchor)

    def mean_piece(k):
        s0 = up_lo + k * math.log(10.0)
        s1 = s0 + math.log(10.0)
        if np.isfinite(hi):
            s1 = min(s1, math.log(hi))
            if s0 >= s1:
                return 0.0
        return log_quad(lambda x: x * x * float(pdf(x)), s0, s1)

    def low_mean_piece(k):
        s1 = up_lo - k * math.log(10.0)
        s0 = s1 - math.log(10.0)
        if lo > 0:
            s0 = max(s0, math.log(lo))
            if s0 >= s1:
                return 0.0
        return log_quad(lambda x: x * x * float(pdf(x)), s0, s1)

    b = mean_atoms + _refined_sum(mean_piece) + _refined_sum(low_mean_piece)

    if atom0 > 0:
        return 0.0, b

    def harm_piece(k):
        s1 = up_lo - k * math.log(10.0)
        s0 = s1 - math.log(10.0)
        if lo > 0:
            s0 = max(s0, math.log(lo))
            if s0 >= s1:
                return 0.0
        return log_quad(lambda x: float(pdf(x)), s0, s1)

    def high_harm_piece(k):
        s0 = up_lo + k * math.log(10.0)
        s1 = s0 + math.log(10.0)
        if np.isfinite(hi):
            s1 = min(s1, math.log(hi))
            if s0 >= s1:
                return 0.0
        return log_quad(lambda x: float(pdf(x)), s0, s1)

    harm = harm_atoms + _refined_sum(harm_piece) + _refined_sum(high_harm_piece)
    a = 0.0 if not np.isfinite(harm) else 1.0 / harm
    return a, b


@dataclass(frozen=True)
class Dirac(Law):
    """Point mass at ``a >= 0``."""

    a: float = 0.0

    def __post_init__(self):
        if not (self.a >= 0 and np.isfinite(self.a)):
            raise ContractError(f"Dirac location must be finite and >= 0, got {self.a}")

    def cdf(self, x):
        return _like_input(x, (_as_array(x) >= self.a).astype(float))

    def pdf(self, x):
        return _like_input(x, np.zeros(np.shape(x)))

    def atoms(self):
        return ((float(self.a), 1.0),)

    def support(self):
        return (float(self.a), float(self.a))

    def quantile(self, p):
        p_arr = _as_array(p)
        if np.any((p_arr < 0) | (p_arr > 1)):
            raise ContractError("quantile levels must lie in [0, 1]")
        return _like_input(p, np.full(p_arr.shape, float(self.a)))

    def cauchy_with_derivative(self, z):
        return _atomic_cauchy(self.atoms(), z)

    def psi(self, u):
        u = _check_negative_u(u)
        return _like_input(u, u * self.a / (1.0 - u * self.a))

    @property
    def has_closed_s(self):
        return self.a > 0

    def s_eval(self, z):
        if self.a == 0:
            raise ContractError("the point mass at 0 has no S-transform")
        return _like_input(z, np.full(np.shape(z), 1.0 / self.a))

    def s_inverse(self, y):
        raise ContractError("the S-transform of a point mass is constant and has no inverse")

    def moments_ab(self):
        return (float(self.a), float(self.a))


@dataclass(frozen=True)
class Uniform01(Law):
    """Uniform law on ``[0, 1]``."""

    def cdf(self, x):
        return _like_input(x, np.clip(_as_array(x), 0.0, 1.0))

    def pdf(self, x):
        x = _as_array(x)
        return _like_input(x, ((x >= 0) & (x <= 1)).astype(float))

    def support(self):
        return (0.0, 1.0)

    def continuous_support(self):
        return (0.0, 1.0)

    def quantile(self, p):
        p_arr = _as_array(p)
        if np.any((p_arr < 0) | (p_arr > 1)):
            raise ContractError("quantile levels must lie in [0, 1]")
        return _like_input(p, p_arr.copy())

    def cauchy_with_derivative(self, z):
        z = np.asarray(z, dtype=complex)
        return np.log(z) - np.log(z - 1.0), 1.0 / z - 1.0 / (z - 1.0)

    def psi(self, u):
        u = _check_negative_u(u)
        return _like_input(u, -log1p_minus_id(-u) / u)

    def moments_ab(self):
        return (0.0, 0.5)


@dataclass(frozen=True)
class MarchenkoPastur(Law):
    """Free Poisson law with the given rate; rate 1 is supported on ``[0, 4]``."""

    rate: float = 1.0

    def __post_init__(self):
        if not (self.rate > 0 and np.isfinite(self.rate)):
            raise ContractError(f"Marchenko-Pastur rate must be > 0, got {self.rate}")

    @property
    def edges(self):
        r = math.sqrt(self.rate)
        return ((1.0 - r) ** 2, (1.0 + r) ** 2)

    def atoms(self):
        if self.rate < 1.0:
            return ((0.0, 1.0 - self.rate),)
        return ()

    def support(self):
        lo, hi = self.edges
        return (0.0 if self.rate < 1 else lo, hi)

    def continuous_support(self):
        return self.edges

    def pdf(self, x):
        x = _as_array(x)
        lo, hi = self.edges
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.sqrt(np.clip((hi - x) * (x - lo), 0.0, None)) / (2.0 * np.pi * x)
        val = np.where((x > lo) & (x < hi), val, 0.0)
        if self.rate == 1.0:
            val = np.where(x == 0.0, np.inf, val)
        return _like_input(x, val)

    def continuous_cdf(self, x):
        # x = c - r cos(theta); integrate the density in theta
        x = _as_array(x)
        lam = self.rate
        c, r = 1.0 + lam, 2.0 * math.sqrt(lam)
        theta = np.arccos(np.clip((c - x) / r, -1.0, 1.0))
        k = (1.0 + math.sqrt(lam)) / max(abs(1.0 - math.sqrt(lam)), 1e-300)
        half = 0.5 * theta
        arc = np.arctan2(k * np.sin(half), np.cos(half))
        val = (c * theta + r * np.sin(theta) - 2.0 * abs(1.0 - lam) * arc) / (2.0 * np.pi)
        return np.clip(val, 0.0, min(1.0, lam))

    def cdf(self, x):
        x = _as_array(x)
        out = self.continuous_cdf(x) + _atomic_cdf(self.atoms(), x)
        return _like_input(x, np.clip(out, 0.0, 1.0))

    def cauchy_with_derivative(self, z):
        z = np.asarray(z, dtype=complex)
        lo, hi = self.edges
        lam = self.rate
        root = np.sqrt(z - lo) * np.sqrt(z - hi)
        droot = (2.0 * z - lo - hi) / (2.0 * root)
        g = (z + 1.0 - lam - root) / (2.0 * z)
        dg = (root - droot * z - 1.0 + lam) / (2.0 * z * z)
        return g, dg

    def psi(self, u):
        u = _check_negative_u(u)
        lam = self.rate
        disc = 1.0 - 2.0 * u * (1.0 + lam) + (u * (1.0 - lam)) ** 2
        # smaller root of u z^2 + (u(1+lam) - 1) z + u lam = 0, rationalized
        val = 2.0 * u * lam / (1.0 - u * (1.0 + lam) + np.sqrt(disc))
        return _like_input(u, val)

    has_closed_s = True

    def s_eval(self, z):
        return 1.0 / (_as_array(z) + self.rate) if np.ndim(z) else 1.0 / (z + self.rate)

    def s_inverse(self, y):
        return 1.0 / _as_array(y) - self.rate if np.ndim(y) else 1.0 / y - self.rate

    def moments_ab(self):
        return (max(self.rate - 1.0, 0.0), float(self.rate))


@dataclass(frozen=True)
class TwoPoint(Law):
    """Mass ``p`` at 0 and ``1 - p`` at ``a``; ``TwoPoint(0.5, 2)`` is the law called sigma."""

    p: float = 0.5
    a: float = 2.0

    def __post_init__(self):
        if not (0.0 <= self.p <= 1.0):
            raise ContractError(f"TwoPoint mass p must be in [0, 1], got {self.p}")
        if not (self.a > 0 and np.isfinite(self.a)):
            raise ContractError(f"TwoPoint location must be > 0, got {self.a}")

    def atoms(self):
        out = []
        if self.p > 0:
            out.append((0.0, float(self.p)))
        if self.p < 1:
            out.append((float(self.a), 1.0 - float(self.p)))
        return tuple(out)

    def cdf(self, x):
        return _like_input(x, _atomic_cdf(self.atoms(), x))

    def pdf(self, x):
        return _like_input(x, np.zeros(np.shape(x)))

    def support(self):
        return (0.0 if self.p > 0 else float(self.a), float(self.a) if self.p < 1 else 0.0)

    def cauchy_with_derivative(self, z):
        return _atomic_cauchy(self.atoms(), z)

    def psi(self, u):
        u = _check_negative_u(u)
        return _like_input(u, (1.0 - self.p) * u * self.a / (1.0 - u * self.a))

    @property
    def has_closed_s(self):
        return self.p < 1.0

    def s_eval(self, z):
        if self.p == 1.0:
            raise ContractError("the point mass at 0 has no S-transform")
        z = _as_array(z)
        return _like_input(z, (z + 1.0) / (self.a * (1.0 - self.p + z)))

    def s_inverse(self, y):
        if self.p == 0.0:
            raise ContractError("the S-transform of a point mass is constant and has no inverse")
        y = _as_array(y)
        ya = y * self.a
        return _like_input(y, (1.0 - ya * (1.0 - self.p)) / (ya - 1.0))

    def moments_ab(self):
        a_mu = 0.0 if self.p > 0 else float(self.a)
        return (a_mu, (1.0 - self.p) * self.a)


@dataclass(frozen=True)
class Poisson(Law):
    """Poisson law with mean ``lam``, truncated where the tail mass drops below 1e-18."""

    lam: float = 1.0

    def __post_init__(self):
        if not (self.lam > 0 and np.isfinite(self.lam)):
            raise ContractError(f"Poisson mean must be > 0, got {self.lam}")

    def _table(self):
        k = np.arange(int(self.lam + 15.0 * math.sqrt(self.lam) + 45.0))
        w = stats.poisson.pmf(k, self.lam)
        tail = np.cumsum(w[::-1])[::-1]
        last = int(np.argmax(tail < 1e-18)) if np.any(tail < 1e-18) else k.size
        return k[:last].astype(float), w[:last]

    def atoms(self):
        k, w = self._table()
        return tuple((float(a), float(m)) for a, m in zip(k, w) if m > 0)

    def cdf(self, x):
        x = _as_array(x)
        val = np.where(x >= 0, stats.poisson.cdf(np.floor(np.where(x >= 0, x, 0.0)), self.lam), 0.0)
        return _like_input(x, val)

    def pdf(self, x):
        return _like_input(x, np.zeros(np.shape(x)))

    def support(self):
        k, _ = self._table()
        return (0.0, float(k[-1]))

    def cauchy_with_derivative(self, z):
        return _atomic_cauchy(self.atoms(), z)

    def psi(self, u):
        u = _check_negative_u(u)
        return _like_input(u, _atomic_psi(self.atoms(), u))

    def moments_ab(self):
        return (0.0, float(self.lam))


def _check_alpha(alpha, name):
    if not (0.0 < alpha < 1.0):
        raise ContractError(f"{name} index must lie in (0, 1), got {alpha}")


@dataclass(frozen=True)
class FreeStablePos(Law):
    """Positive free stable law with index ``alpha``.

    Normalized so that its S-transform is ``(-z)^((1-alpha)/alpha)``.  The
    reciprocal Cauchy transform ``w = F(z)`` solves
    ``w + (-w)^(1-alpha) = z``.
    """

    alpha: float = 0.5

    def __post_init__(self):
        _check_alpha(self.alpha, "free stable")

    @property
    def beta(self):
        return (1.0 - self.alpha) / self.alpha

    @property
    def lower_edge(self):
        a = self.alpha
        return a * (1.0 - a) ** ((1.0 - a) / a)

    def support(self):
        return (self.lower_edge, INF)

    def continuous_support(self):
        return (self.lower_edge, INF)

    def _boundary(self, x):
        """Polar form ``(r, theta)`` of the boundary value ``F(x + i0)`` for ``x`` above the edge.

        On the boundary curve ``r^alpha = sin((1-alpha)(pi-theta)) / sin(theta)``
        and ``x = r cos(theta) + r^(1-alpha) cos((1-alpha)(pi-theta))``, which
        decreases from infinity to the edge as theta runs over ``(0, pi)``.
        """
        a = self.alpha

        def radius(theta):
            return (np.sin((1.0 - a) * (np.pi - theta)) / np.sin(theta)) ** (1.0 / a)

        def real_part(theta):
            r = radius(theta)
            return r * np.cos(theta) + r ** (1.0 - a) * np.cos((1.0 - a) * (np.pi - theta))

        x = _as_array(x)
        theta = bisect_monotone(real_part, 1e-300, np.pi * (1 - 1e-16), target=x, increasing=False)
        return radius(theta), theta

    def pdf(self, x):
        x = _as_array(x)
        out = np.zeros(x.shape)
        inside = x > self.lower_edge
        if np.any(inside):
            r, theta = self._boundary(x[inside])
            out[inside] = np.sin(theta) / (np.pi * r)
        return _like_input(x, out)

    def cdf(self, x):
        # primitive of G along the boundary: log w + ((1-a)/a) (-w)^(-a)
        x = _as_array(x)
        a = self.alpha
        out = np.zeros(x.shape)
        inside = x > self.lower_edge
        if np.any(inside):
            r, theta = self._boundary(x[inside])
            im_prim = theta + ((1.0 - a) / a) * r ** (-a) * np.sin(a * (np.pi - theta))
            out[inside] = np.clip(1.0 - im_prim / np.pi, 0.0, 1.0)
        return _like_input(x, out)

    def f_transform(self, z):
        """Reciprocal Cauchy transform and its derivative on the upper half-plane."""
        from ._numeric import newton_upper_half_plane

        a = self.alpha
        z = np.asarray(z, dtype=complex)
        flat = z.ravel()

        def residual(w, zz):
            p = (-w) ** (1.0 - a)
            return w + p - zz, 1.0 + (1.0 - a) * p / w

        scale = 10.0 * (1.0 + float(np.max(np.abs(flat.real), initial=0.0)))
        w, _, _ = newton_upper_half_plane(residual, flat, lambda zz: zz, scale)
        dw = 1.0 / (1.0 + (1.0 - a) * (-w) ** (1.0 - a) / w)
        return w.reshape(z.shape), dw.reshape(z.shape)

    def cauchy_with_derivative(self, z):
        w, dw = self.f_transform(z)
        return 1.0 / w, -dw / (w * w)

    def psi(self, u):
        # invert Psi^{-1}(z) = -(-z)^(1/alpha) / (1 + z), increasing on (-1, 0)
        u = _check_negative_u(u)
        a = self.alpha

        def inv(z):
            return -((-z) ** (1.0 / a)) / (1.0 + z)

        z = bisect_monotone(inv, -1.0 + 1e-300, -1e-300, target=u, increasing=True)
        return _like_input(u, z)

    has_closed_s = True

    def s_eval(self, z):
        z = _as_array(z)
        return _like_input(z, (-z) ** self.beta)

    def s_inverse(self, y):
        y = _as_array(y)
        return _like_input(y, -(y ** (1.0 / self.beta)))

    def moments_ab(self):
        return (1.0, INF)


@dataclass(frozen=True)
class BooleanStablePos(Law):
    """Positive Boolean stable law with index ``alpha``.

    Normalized so that its self-energy is ``(-z)^(1-alpha)`` and its
    S-transform is ``(-z/(1+z))^((1-alpha)/alpha)``.
    """

    alpha: float = 0.5

    def __post_init__(self):
        _check_alpha(self.alpha, "Boolean stable")

    @property
    def beta(self):
        return (1.0 - self.alpha) / self.alpha

    def support(self):
        return (0.0, INF)

    def continuous_support(self):
        return (0.0, INF)

    def cdf(self, x):
        x = _as_array(x)
        a = self.alpha
        xp = np.where(x > 0, x, 0.0) ** a
        val = 1.0 - np.arctan2(np.sin(np.pi * a), xp + np.cos(np.pi * a)) / (np.pi * a)
        return _like_input(x, np.where(x > 0, np.clip(val, 0.0, 1.0), 0.0))

    def pdf(self, x):
        x = _as_array(x)
        a = self.alpha
        xs = np.where(x > 0, x, 1.0)
        f = xs - xs ** (1.0 - a) * np.exp(-1j * np.pi * (1.0 - a))
        val = xs ** (1.0 - a) * np.sin(np.pi * a) / (np.pi * np.abs(f) ** 2)
        return _like_input(x, np.where(x > 0, val, 0.0))

    def quantile(self, p):
        # invert the closed CDF: arg(x^a + e^{i pi a}) = pi a (1 - p)
        p_arr = _as_array(p)
        if np.any((p_arr < 0) | (p_arr > 1)):
            raise ContractError("quantile levels must lie in [0, 1]")
        a = self.alpha
        phi = np.pi * a * (1.0 - p_arr)
        with np.errstate(divide="ignore", invalid="ignore"):
            xa = np.sin(np.pi * a) / np.tan(phi) - np.cos(np.pi * a)
        xa = np.where(p_arr >= 1, np.inf, np.where(p_arr <= 0, 0.0, xa))
        return _like_input(p, np.clip(xa, 0.0, None) ** (1.0 / a))

    def cauchy_with_derivative(self, z):
        z = np.asarray(z, dtype=complex)
        a = self.alpha
        e = (-z) ** (1.0 - a)
        f = z - e
        df = 1.0 + (1.0 - a) * e / z
        return 1.0 / f, -df / (f * f)

    def psi(self, u):
        u = _check_negative_u(u)
        v = (-u) ** self.alpha
        return _like_input(u, -v / (1.0 + v))

    has_closed_s = True

    def s_eval(self, z):
        z = _as_array(z)
        return _like_input(z, (-z / (1.0 + z)) ** self.beta)

    def s_inverse(self, y):
        y = _as_array(y)
        v = y ** (1.0 / self.beta)
        return _like_input(y, -v / (1.0 + v))

    def moments_ab(self):
        return (0.0, INF)


@dataclass(frozen=True)
class ClassicalStablePos(Law):
    """Positive (one-sided) classical stable law with Laplace transform ``exp(-s^alpha / Gamma(1+alpha))``.

    Index 1/2 is the Levy law with scale ``2/pi``.
    """

    alpha: float = 0.5

    def __post_init__(self):
        _check_alpha(self.alpha, "classical stable")

    @property
    def _kappa(self):
        return 1.0 / special.gamma(1.0 + self.alpha)

    def _scipy(self):
        a = self.alpha
        scale = (math.cos(math.pi * a / 2.0) * self._kappa) ** (1.0 / a)
        return stats.levy_stable(a, 1.0, loc=0.0, scale=scale)

    def support(self):
        return (0.0, INF)

    def continuous_support(self):
        return (0.0, INF)

    def cdf(self, x):
        x = _as_array(x)
        xs = np.where(x > 0, x, 1.0)
        if self.alpha == 0.5:
            val = special.erfc(np.sqrt(1.0 / (np.pi * xs)))
        else:
            val = self._scipy().cdf(xs)
        return _like_input(x, np.where(x > 0, val, 0.0))

    def pdf(self, x):
        x = _as_array(x)
        xs = np.where(x > 0, x, 1.0)
        if self.alpha == 0.5:
            c = 2.0 / np.pi
            val = np.sqrt(c / (2.0 * np.pi)) * np.exp(-c / (2.0 * xs)) / xs**1.5
        else:
            val = self._scipy().pdf(xs)
        return _like_input(x, np.where(x > 0, val, 0.0))

    def moments_ab(self):
        # E[1/X] = int_0^inf exp(-kappa s^alpha) ds = Gamma(1 + 1/alpha) kappa^(-1/alpha)
        a = self.alpha
        harm = special.gamma(1.0 + 1.0 / a) * self._kappa ** (-1.0 / a)
        return (1.0 / harm, INF)


# -- extreme-value families -------------------------------------------------


def _check_index(alpha, name):
    if not (alpha > 0 and np.isfinite(alpha)):
        raise ContractError(f"{name} index must be > 0, got {alpha}")


def _checked_levels(p):
    p_arr = _as_array(p)
    if np.any((p_arr < 0) | (p_arr > 1)) or np.any(np.isnan(p_arr)):
        raise ContractError("quantile levels must lie in [0, 1]")
    return p_arr


@dataclass(frozen=True)
class Gumbel(Law):
    """``exp(-exp(-x))`` on the real line."""

    positive = False

    def cdf(self, x):
        return _like_input(x, np.exp(-np.exp(-_as_array(x))))

    def pdf(self, x):
        x = _as_array(x)
        return _like_input(x, np.exp(-x - np.exp(-x)))

    def support(self):
        return (-INF, INF)

    def continuous_support(self):
        return (-INF, INF)

    def quantile(self, p):
        p = _checked_levels(p)
        with np.errstate(divide="ignore"):
            return _like_input(p, -np.log(-np.log(p)))


@dataclass(frozen=True)
class Frechet(Law):
    """``exp(-x^(-alpha))`` for ``x > 0``."""

    alpha: float = 1.0

    def __post_init__(self):
        _check_index(self.alpha, "Frechet")

    def cdf(self, x):
        x = _as_array(x)
        xs = np.where(x > 0, x, 1.0)
        return _like_input(x, np.where(x > 0, np.exp(-(xs ** -self.alpha)), 0.0))

    def pdf(self, x):
        x = _as_array(x)
        xs = np.where(x > 0, x, 1.0)
        a = self.alpha
        val = a * xs ** (-a - 1.0) * np.exp(-(xs**-a))
        return _like_input(x, np.where(x > 0, val, 0.0))

    def support(self):
        return (0.0, INF)

    def continuous_support(self):
        return (0.0, INF)

    def quantile(self, p):
        p = _checked_levels(p)
        with np.errstate(divide="ignore"):
            return _like_input(p, (-np.log(p)) ** (-1.0 / self.alpha))


@dataclass(frozen=True)
class Weibull(Law):
    """``exp(-(-x)^alpha)`` for ``x <= 0`` and 1 above."""

    alpha: float = 1.0
    positive = False

    def __post_init__(self):
        _check_index(self.alpha, "Weibull")

    def cdf(self, x):
        x = _as_array(x)
        return _like_input(x, np.where(x < 0, np.exp(-(np.abs(x) ** self.alpha)), 1.0))

    def pdf(self, x):
        x = _as_array(x)
        a = self.alpha
        ax = np.abs(x)
        with np.errstate(divide="ignore"):
            val = a * ax ** (a - 1.0) * np.exp(-(ax**a))
        return _like_input(x, np.where(x < 0, val, 0.0))

    def support(self):
        return (-INF, 0.0)

    def continuous_support(self):
        return (-INF, 0.0)

    def quantile(self, p):
        p = _checked_levels(p)
        with np.errstate(divide="ignore"):
            return _like_input(p, -((-np.log(p)) ** (1.0 / self.alpha)))


@dataclass(frozen=True)
class Exponential(Law):
    """``1 - exp(-x)`` for ``x >= 0``."""

    def cdf(self, x):
        x = _as_array(x)
        return _like_input(x, np.where(x > 0, -np.expm1(-np.where(x > 0, x, 0.0)), 0.0))

    def pdf(self, x):
        x = _as_array(x)
        return _like_input(x, np.where(x >= 0, np.exp(-np.abs(x)), 0.0))

    def support(self):
        return (0.0, INF)

    def continuous_support(self):
        return (0.0, INF)

    def quantile(self, p):
        p = _checked_levels(p)
        with np.errstate(divide="ignore"):
            return _like_input(p, -np.log1p(-p))

    def moments_ab(self):
        return (0.0, 1.0)


@dataclass(frozen=True)
class Pareto(Law):
    """``max(0, 1 - x^(-alpha))``, supported on ``[1, inf)``."""

    alpha: float = 1.0

    def __post_init__(self):
        _check_index(self.alpha, "Pareto")

    def cdf(self, x):
        x = _as_array(x)
        xs = np.where(x > 1, x, 1.0)
        return _like_input(x, np.where(x > 1, -np.expm1(-self.alpha * np.log(xs)), 0.0))

    def pdf(self, x):
        x = _as_array(x)
        xs = np.where(x >= 1, x, 1.0)
        return _like_input(x, np.where(x >= 1, self.alpha * xs ** (-self.alpha - 1.0), 0.0))

    def support(self):
        return (1.0, INF)

    def continuous_support(self):
        return (1.0, INF)

    def quantile(self, p):
        p = _checked_levels(p)
        with np.errstate(divide="ignore"):
            return _like_input(p, (1.0 - p) ** (-1.0 / self.alpha))

    def moments_ab(self):
        a = self.alpha
        return ((a + 1.0) / a, a / (a - 1.0) if a > 1 else INF)


@dataclass(frozen=True)
class BetaLaw(Law):
    """``1 - |x|^alpha`` on ``[-1, 0]``."""

    alpha: float = 1.0
    positive = False

    def __post_init__(self):
        _check_index(self.alpha, "Beta-type")

    def cdf(self, x):
        x = _as_array(x)
        val = np.where(x < -1, 0.0, np.where(x < 0, 1.0 - np.abs(x) ** self.alpha, 1.0))
        return _like_input(x, val)

    def pdf(self, x):
        x = _as_array(x)
        a = self.alpha
        ax = np.abs(x)
        with np.errstate(divide="ignore"):
            val = a * ax ** (a - 1.0)
        return _like_input(x, np.where((x >= -1) & (x < 0), val, 0.0))

    def support(self):
        return (-1.0, 0.0)

    def continuous_support(self):
        return (-1.0, 0.0)

    def quantile(self, p):
        p = _checked_levels(p)
        return _like_input(p, -((1.0 - p) ** (1.0 / self.alpha)))


@dataclass(frozen=True)
class Dagum(Law):
    """``(1 + x^(-alpha))^(-1)`` for ``x > 0``."""

    alpha: float = 1.0

    def __post_init__(self):
        _check_index(self.alpha, "Dagum")

    def cdf(self, x):
        x = _as_array(x)
        xs = np.where(x > 0, x, 1.0)
        return _like_input(x, np.where(x > 0, 1.0 / (1.0 + xs ** (-self.alpha)), 0.0))

    def pdf(self, x):
        x = _as_array(x)
        a = self.alpha
        xs = np.where(x > 0, x, 1.0)
        val = a * xs ** (-a - 1.0) / (1.0 + xs ** (-a)) ** 2
        return _like_input(x, np.where(x > 0, val, 0.0))

    def support(self):
        return (0.0, INF)

    def continuous_support(self):
        return (0.0, INF)

    def quantile(self, p):
        p = _checked_levels(p)
        with np.errstate(divide="ignore"):
            return _like_input(p, (1.0 / p - 1.0) ** (-1.0 / self.alpha))

    def moments_ab(self):
        # E[X] and E[1/X] both equal Gamma(1 + 1/alpha) Gamma(1 - 1/alpha) when alpha > 1
        if self.alpha <= 1:
            return (0.0, INF)
        m = special.gamma(1.0 + 1.0 / self.alpha) * special.gamma(1.0 - 1.0 / self.alpha)
        return (1.0 / m, m)


@dataclass(frozen=True)
class MaxCompoundPoisson(Law):
    """Distribution function ``exp(-(1 - F(x)))`` on ``[0, inf)`` for a positive base law."""

    base: Law = field(default_factory=Uniform01)

    def __post_init__(self):
        if not self.base.positive:
            raise ContractError("the max-compound Poisson construction needs a base on [0, inf)")

    def cdf(self, x):
        x = _as_array(x)
        val = np.exp(-(1.0 - _as_array(self.base.cdf(x))))
        return _like_input(x, np.where(x >= 0, val, 0.0))

    def atoms(self):
        out = [(0.0, float(np.exp(-(1.0 - self.base.cdf(0.0)))))]
        for loc, mass in self.base.atoms():
            if loc > 0:
                f_right = float(self.base.cdf(loc))
                jump = math.exp(-(1.0 - f_right)) - math.exp(-(1.0 - f_right + mass))
                out.append((loc, jump))
        return tuple(out)

    def pdf(self, x):
        x = _as_array(x)
        val = np.exp(-(1.0 - _as_array(self.base.cdf(x)))) * _as_array(self.base.pdf(x))
        return _like_input(x, np.where(x > 0, val, 0.0))

    def support(self):
        return (0.0, self.base.support()[1])

    def continuous_support(self):
        return self.base.continuous_support()


@dataclass(frozen=True)
class Dilated(Law):
    """Pushforward of ``base`` under ``x -> c x``."""

    base: Law = field(default_factory=Uniform01)
    c: float = 1.0

    def __post_init__(self):
        if not (self.c > 0 and np.isfinite(self.c)):
            raise ContractError(f"dilation factor must be > 0, got {self.c}")

    @property
    def positive(self):
        return self.base.positive

    def describe(self):
        return f"Dilated({self.base.describe()}, c={self.c:g})"

    def cdf(self, x):
        return self.base.cdf(_as_array(x) / self.c) if np.ndim(x) else self.base.cdf(x / self.c)

    def pdf(self, x):
        return _like_input(x, _as_array(self.base.pdf(_as_array(x) / self.c)) / self.c)

    def atoms(self):
        return tuple((loc * self.c, m) for loc, m in self.base.atoms())

    def support(self):
        lo, hi = self.base.support()
        return (lo * self.c, hi * self.c)

    def continuous_support(self):
        cs = self.base.continuous_support()
        return None if cs is None else (cs[0] * self.c, cs[1] * self.c)

    def quantile(self, p):
        return _like_input(p, _as_array(self.base.quantile(p)) * self.c)

    def cauchy_with_derivative(self, z):
        g, dg = self.base.cauchy_with_derivative(np.asarray(z, dtype=complex) / self.c)
        return g / self.c, dg / self.c**2

    def psi(self, u):
        return self.base.psi(_as_array(u) * self.c) if np.ndim(u) else self.base.psi(u * self.c)

    @property
    def has_closed_s(self):
        return self.base.has_closed_s

    def s_eval(self, z):
        return _like_input(z, _as_array(self.base.s_eval(z)) / self.c)

    def s_inverse(self, y):
        return self.base.s_inverse(_as_array(y) * self.c) if np.ndim(y) else self.base.s_inverse(y * self.c)

    def moments_ab(self):
        a, b = self.base.moments_ab()
        return (a * self.c, b * self.c)


# ---------------------------------------------------------------------------
# grid measures

EDGE_LEVELS = 160
# matrix elements per block in the cellwise transform sums
CHUNK = 50_000
EDGE_RATIO = 2.0 ** -0.25
# cells next to each edge that get power-law sub-nodes, and sub-nodes per cell
EDGE_CELLS = 128
EDGE_SPLIT = 8


def _edge_exponent(m1, m2, h1, h2):
    # F(x0 + s) ~ c s^gamma fitted through the first two cells
    if m1 <= 0 or m2 <= m1:
        return 1.0
    gamma = float(np.clip(np.log(m2 / m1) / np.log(h2 / h1), 0.2, 4.0))
    # square-root type edges are the rule; snap fits that land close to one
    half = round(2.0 * gamma) / 2.0
    return half if half > 0 and abs(gamma - half) < 0.1 else gamma


def _power_cell(x0, x1, mass, gamma, from_left):
    """Split ``[x0, x1]`` geometrically towards the edge, masses following ``s^gamma``."""
    s = EDGE_RATIO ** np.arange(EDGE_LEVELS, -1, -1.0)
    frac = s**gamma
    frac[0] = 0.0
    s = np.concatenate([[0.0], s[1:]])
    if from_left:
        return x0 + (x1 - x0) * s, mass * frac
    return x1 - (x1 - x0) * s[::-1], mass * (1.0 - frac[::-1])


def _power_split(edge, xa, xb, mass, gamma, m):
    """Uniform sub-nodes of ``[xa, xb]`` with ``mass`` shared as ``|x - edge|^gamma``."""
    xs = np.linspace(xa, xb, m + 1)
    w = np.abs(xs - edge) ** gamma
    frac = (w - w[0]) / (w[-1] - w[0])
    return xs, mass * frac


def _refine_run(grid, cdfv, dF, i, j):
    # cells i..j carry positive mass; returns refined nodes for grid[i..j+1]
    x0, x1, x2 = grid[i], grid[i + 1], grid[i + 2]
    g_left = _edge_exponent(dF[i], dF[i] + dF[i + 1], x1 - x0, x2 - x0)
    y0, y1, y2 = grid[j + 1], grid[j], grid[j - 1]
    g_right = _edge_exponent(dF[j], dF[j] + dF[j - 1], y0 - y1, y0 - y2)
    k = min(EDGE_CELLS, (j - i + 1) // 2)
    xs_out, cs_out = [], []
    for c in range(i, j + 1):
        if c == i:
            xs, cs = _power_cell(grid[c], grid[c + 1], dF[c], g_left, True)
        elif c == j:
            xs, cs = _power_cell(grid[c], grid[c + 1], dF[c], g_right, False)
        elif c - i < k and g_left != 1.0:
            xs, cs = _power_split(x0, grid[c], grid[c + 1], dF[c], g_left, EDGE_SPLIT)
        elif j - c < k and g_right != 1.0:
            xs, cs = _power_split(y0, grid[c], grid[c + 1], dF[c], g_right, EDGE_SPLIT)
        else:
            xs, cs = grid[c : c + 1], np.zeros(1)
            xs_out.append(xs)
            cs_out.append(cdfv[c] + cs)
            continue
        # drop sub-nodes that would carry no mass, keeping the cell's left node
        keep = np.concatenate([[True], np.diff(cdfv[c] + cs[:-1]) > 0])
        xs_out.append(xs[:-1][keep])
        cs_out.append((cdfv[c] + cs[:-1])[keep])
    return xs_out, cs_out


def _refine_edges(grid, cdfv):
    """Insert sub-nodes into the cells next to the edges of each continuous interval.

    Densities of additive powers typically behave like a power of the distance
    to an edge; a linear CDF on the cells next to an edge misrepresents the
    mass there, which the transforms at large arguments are sensitive to.  The
    outermost cell is split geometrically, the next few uniformly, with each
    cell's mass kept and shared according to the fitted power.
    """
    dF = np.diff(cdfv)
    pos = dF > 0
    n = dF.size
    pieces_x = []
    pieces_c = []
    last = 0
    i = 0
    while i < n:
        if not pos[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and pos[j + 1]:
            j += 1
        if j - i >= 3:
            pieces_x.append(grid[last:i])
            pieces_c.append(cdfv[last:i])
            xs, cs = _refine_run(grid, cdfv, dF, i, j)
            pieces_x.extend(xs)
            pieces_c.extend(cs)
            last = j + 1
        i = j + 1
    pieces_x.append(grid[last:])
    pieces_c.append(cdfv[last:])
    rg = np.concatenate(pieces_x)
    rc = np.maximum.accumulate(np.concatenate(pieces_c))
    keep = np.concatenate([[True], np.diff(rg) > 0])
    return rg[keep], rc[keep]


@dataclass(frozen=True, eq=False)
class GridMeasure:
    """Atoms plus a continuous part with piecewise-linear CDF.

    Parameters
    ----------
    atom_zero : float
        Mass at the origin.
    atoms : tuple of (float, float)
        Further atoms ``(location, mass)`` with ``location > 0``.
    grid : ndarray
        Strictly increasing abscissas carrying the continuous part; may be empty.
    cdf_values : ndarray
        Cumulative mass of the continuous part at ``grid``, starting at 0.
    density_values : ndarray, optional
        Density samples at ``grid``, used only for display and ``pdf``.
    cauchy_fn : callable, optional
        Exact ``z -> (G(z), G'(z))`` when the measure came from an analytic
        construction; otherwise the Cauchy transform integrates the grid.
    info : dict
        Construction diagnostics (e.g. renormalization applied).
    """

    atom_zero: float
    atoms: tuple
    grid: np.ndarray
    cdf_values: np.ndarray
    density_values: Optional[np.ndarray] = None
    cauchy_fn: Optional[Callable] = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        cdfv = np.asarray(self.cdf_values, dtype=float)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "cdf_values", cdfv)
        atoms = tuple(sorted((float(a), float(m)) for a, m in self.atoms if m > MASS_EPS))
        object.__setattr__(self, "atoms", atoms)
        if self.density_values is not None:
            object.__setattr__(self, "density_values", np.asarray(self.density_values, dtype=float))
        if grid.shape != cdfv.shape or grid.ndim != 1:
            raise ContractError("grid and cdf_values must be 1-d arrays of equal length")
        if grid.size == 1:
            raise ContractError("a continuous part needs at least two grid points")
        if grid.size and np.any(np.diff(grid) <= 0):
            raise ContractError("grid must be strictly increasing")
        if grid.size and (grid[0] < 0):
            raise ContractError("grid measures live on [0, inf)")
        if grid.size and (abs(cdfv[0]) > 1e-15 or np.any(np.diff(cdfv) < -1e-15)):
            raise ContractError("cdf_values must start at 0 and be nondecreasing")
        if not 0.0 <= self.atom_zero <= 1.0 + 1e-12:
            raise ContractError("atom_zero must lie in [0, 1]")
        if any(a <= 0 for a, _ in atoms):
            raise ContractError("non-zero atoms must sit at positive locations")
        total = self.total_mass
        if abs(total - 1.0) > 1e-9:
            raise ContractError(f"total mass {total!r} differs from 1 by more than 1e-9")
        rg, rc = _refine_edges(grid, cdfv) if grid.size else (grid, cdfv)
        object.__setattr__(self, "_rgrid", rg)
        object.__setattr__(self, "_rcdf", rc)

    # -- bookkeeping -------------------------------------------------------
    @property
    def continuous_mass(self) -> float:
        return float(self.cdf_values[-1]) if self.grid.size else 0.0

    @property
    def total_mass(self) -> float:
        return self.atom_zero + sum(m for _, m in self.atoms) + self.continuous_mass

    def all_atoms(self) -> tuple:
        head = ((0.0, float(self.atom_zero)),) if self.atom_zero > MASS_EPS else ()
        return head + self.atoms

    def cells(self):
        """``(left, right, density)`` of cells carrying mass."""
        if not self.grid.size:
            return np.empty(0), np.empty(0), np.empty(0)
        grid, cdfv = self._rgrid, self._rcdf
        dF = np.diff(cdfv)
        h = np.diff(grid)
        keep = dF > 0
        return grid[:-1][keep], grid[1:][keep], dF[keep] / h[keep]

    def continuous_intervals(self, rel_gap=1e-12):
        """Maximal intervals on which the continuous part has positive density."""
        left, right, _ = self.cells()
        out = []
        for a, b in zip(left, right):
            if out and a <= out[-1][1] * (1 + rel_gap):
                out[-1][1] = b
            else:
                out.append([a, b])
        return [tuple(p) for p in out]

    def support(self):
        pts = [a for a, _ in self.all_atoms()]
        for a, b in self.continuous_intervals():
            pts.extend([a, b])
        return (min(pts), max(pts))

    # -- evaluation --------------------------------------------------------
    def cdf(self, x):
        x = _as_array(x)
        out = _atomic_cdf(self.all_atoms(), x)
        if self.grid.size:
            out = out + np.interp(x, self._rgrid, self._rcdf, left=0.0, right=self.continuous_mass)
        return _like_input(x, np.clip(out, 0.0, 1.0))

    def pdf(self, x):
        x = _as_array(x)
        if not self.grid.size:
            return _like_input(x, np.zeros(x.shape))
        if self.density_values is not None:
            val = np.interp(x, self.grid, self.density_values, left=0.0, right=0.0)
        else:
            left, right, rho = self.cells()
            idx = np.searchsorted(right, x, side="left")
            idx = np.clip(idx, 0, max(left.size - 1, 0))
            inside = (x >= left[idx]) & (x <= right[idx]) if left.size else np.zeros(x.shape, bool)
            val = np.where(inside, rho[idx] if left.size else 0.0, 0.0)
        return _like_input(x, val)

    def quantile(self, p):
        lo, hi = self.support()
        return _generic_quantile(self.cdf, p, lo, hi, [a for a, _ in self.all_atoms()])

    def to_cdf(self) -> Cdf:
        return Cdf(
            eval=self.cdf,
            atom_zero=self.atom_zero,
            support_hint=self.support(),
            quantile_fn=None,
            jumps=tuple(a for a, _ in self.all_atoms()),
            label="GridMeasure",
        )

    def density_consistency(self) -> float:
        """Largest gap between trapezoid integrals of ``density_values`` and CDF increments.

        Cells touching a non-finite density sample are skipped.
        """
        if self.density_values is None or not self.grid.size:
            return 0.0
        d = self.density_values
        h = np.diff(self.grid)
        trap = 0.5 * (d[1:] + d[:-1]) * h
        ok = np.isfinite(trap)
        return float(np.max(np.abs(trap[ok] - np.diff(self.cdf_values)[ok]), initial=0.0))

    # -- transforms --------------------------------------------------------
    def cauchy_with_derivative(self, z):
        """Cauchy transform by exact integration of the cellwise-constant density."""
        if self.cauchy_fn is not None:
            return self.cauchy_fn(z)
        z = np.asarray(z, dtype=complex)
        g, dg = _atomic_cauchy(self.all_atoms(), z)
        left, right, rho = self.cells()
        if left.size:
            flat = z.ravel()
            gc = np.empty(flat.shape, dtype=complex)
            dgc = np.empty(flat.shape, dtype=complex)
            step = max(1, CHUNK // left.size)
            for s in range(0, flat.size, step):
                zz = flat[s : s + step, None]
                gc[s : s + step] = np.log1p((right - left) / (zz - right)) @ rho
                dgc[s : s + step] = (1.0 / (zz - left) - 1.0 / (zz - right)) @ rho
            g = g + gc.reshape(z.shape)
            dg = dg + dgc.reshape(z.shape)
        return g, dg

    def cauchy(self, z):
        return self.cauchy_with_derivative(z)[0]

    def psi_over_u(self, u):
        """``Psi(u) / u``, which tends to the mean as ``u -> 0-``."""
        u = _check_negative_u(u)
        flat = u.ravel()
        out = np.zeros(flat.shape)
        for loc, mass in self.atoms:
            out = out + mass * loc / (1.0 - flat * loc)
        left, right, rho = self.cells()
        if left.size:
            width = right - left
            step = max(1, CHUNK // left.size)
            for s in range(0, flat.size, step):
                uu = flat[s : s + step, None]
                den = 1.0 - uu * left
                q = -uu * width / den
                cell = -log1p_minus_id_pos(q) / (uu * uu) + left * width / den
                out[s : s + step] += cell @ rho
        return _like_input(u, out.reshape(u.shape))

    def psi(self, u):
        u = _check_negative_u(u)
        return _like_input(u, u * _as_array(self.psi_over_u(u)))

    def moments_ab(self):
        left, right, rho = self.cells()
        b = sum(m * a for a, m in self.atoms) + float(np.sum(rho * 0.5 * (right**2 - left**2)))
        if self.atom_zero > MASS_EPS:
            return (0.0, b)
        if left.size and left[0] <= 0.0:
            return (0.0, b)
        harm = sum(m / a for a, m in self.atoms) + float(np.sum(rho * np.log(right / left)))
        if harm > 1e12:
            return (0.0, b)
        return (1.0 / harm if harm > 0 else INF, b)


# ---------------------------------------------------------------------------
# module-level operations


def cdf_eval(law, x):
    """Evaluate the distribution function of a law, grid measure or :class:`Cdf`."""
    if isinstance(law, Cdf):
        return law.eval(x)
    return law.cdf(x)


def quantile(m, p):
    """Left-continuous generalized inverse ``inf{x : F(x) >= p}``."""
    return m.quantile(p)


def dilate(m, c: float):
    """Pushforward under ``x -> c x``."""
    if not (c > 0 and np.isfinite(c)):
        raise ContractError(f"dilation factor must be > 0, got {c}")
    if isinstance(m, GridMeasure):
        cfn = None
        if m.cauchy_fn is not None:
            base = m.cauchy_fn

            def cfn(z, base=base):
                g, dg = base(np.asarray(z, dtype=complex) / c)
                return g / c, dg / c**2

        dens = None if m.density_values is None else m.density_values / c
        return GridMeasure(
            atom_zero=m.atom_zero,
            atoms=tuple((a * c, w) for a, w in m.atoms),
            grid=m.grid * c,
            cdf_values=m.cdf_values,
            density_values=dens,
            cauchy_fn=cfn,
            info=dict(m.info),
        )
    if c == 1.0:
        return m
    if isinstance(m, Cdf):
        base = m

        def ev(x):
            return base.eval(_as_array(x) / c) if np.ndim(x) else base.eval(x / c)

        qf = None
        if base.quantile_fn is not None:
            def qf(p):
                return _like_input(p, _as_array(base.quantile_fn(p)) * c)

        lo, hi = base.support_hint
        return Cdf(ev, base.atom_zero, (lo * c, hi * c), qf, tuple(j * c for j in base.jumps),
                   f"dilate({base.label}, {c:g})")
    if isinstance(m, Dirac):
        return Dirac(m.a * c)
    if isinstance(m, TwoPoint):
        return TwoPoint(m.p, m.a * c)
    if isinstance(m, Dilated):
        return Dilated(m.base, m.c * c) if m.c * c != 1.0 else m.base
    if isinstance(m, Law):
        return Dilated(m, c)
    raise ContractError(f"cannot dilate {type(m).__name__}")


def power_pushforward(m, s: float, n_points: int = 2048) -> GridMeasure:
    """Pushforward under ``x -> x^s`` as a grid measure."""
    if not (s > 0 and np.isfinite(s)):
        raise ContractError(f"power must be > 0, got {s}")
    if isinstance(m, GridMeasure):
        if m.grid.size:
            grid = m.grid**s
            keep = np.concatenate([[True], np.diff(grid) > 0])
            dens = None
            if m.density_values is not None:
                with np.errstate(divide="ignore", invalid="ignore"):
                    dens = m.density_values * np.where(grid > 0, m.grid ** (1.0 - s) / s, np.inf)
                dens = dens[keep]
            grid, cdfv = grid[keep], m.cdf_values[keep]
        else:
            grid, cdfv, dens = m.grid, m.cdf_values, None
        return GridMeasure(
            atom_zero=m.atom_zero,
            atoms=tuple((a**s, w) for a, w in m.atoms),
            grid=grid,
            cdf_values=cdfv,
            density_values=dens,
        )
    if not isinstance(m, Law):
        raise ContractError(f"cannot push forward {type(m).__name__}")
    if not m.positive:
        raise ContractError(f"{m.tag} has negative support")
    atoms = m.atoms()
    atom0 = sum(w for a, w in atoms if a == 0.0)
    rest = tuple((a**s, w) for a, w in atoms if a > 0)
    cs = m.continuous_support()
    if cs is None:
        return GridMeasure(atom0, rest, np.empty(0), np.empty(0))
    lo, hi = cs
    if not np.isfinite(hi):
        raise UnsupportedLawError(f"{m.tag} has unbounded continuous support")
    ygrid = chebyshev_edges(lo**s, hi**s, n_points)
    xgrid = ygrid ** (1.0 / s)
    xgrid[0], xgrid[-1] = lo, hi
    cont = _continuous_cdf_values(m, xgrid)
    with np.errstate(divide="ignore", invalid="ignore"):
        dens = _as_array(m.pdf(xgrid)) * xgrid ** (1.0 - s) / s
    return GridMeasure(atom0, rest, ygrid, cont, density_values=_fill_nonfinite(dens, ygrid, cont))


def moments_ab(m, numeric: bool = False):
    """``(a, b)``: reciprocal of the harmonic moment and the mean.

    ``a`` is 0 when there is an atom at 0 or the harmonic moment diverges;
    ``b`` may be infinite.  ``numeric=True`` forces quadrature for laws.
    """
    if isinstance(m, Law):
        return m.numeric_moments_ab() if numeric else m.moments_ab()
    return m.moments_ab()


def _continuous_cdf_values(law: Law, x):
    cont = _as_array(law.continuous_cdf(x))
    cont = np.maximum.accumulate(np.clip(cont - cont[0], 0.0, None))
    target = 1.0 - sum(w for _, w in law.atoms())
    if abs(cont[-1] - target) > 1e-9:
        raise ContractError(
            f"continuous mass {cont[-1]!r} of {law.tag} does not match 1 - atoms = {target!r}"
        )
    cont[-1] = target
    return np.minimum(cont, target)


def _fill_nonfinite(dens, grid, cont):
    dens = np.array(dens, dtype=float)
    bad = ~np.isfinite(dens)
    if np.any(bad):
        avg = np.diff(cont) / np.diff(grid)
        cell_avg = np.concatenate([avg[:1], 0.5 * (avg[1:] + avg[:-1]), avg[-1:]])
        dens[bad] = cell_avg[bad]
    return np.clip(dens, 0.0, None)


def grid_from_law(law: Law, n_points: int = 2048, support_pad: float = 0.0) -> GridMeasure:
    """Sample a closed-form law onto a grid measure.

    The continuous part is sampled at arcsine-clustered nodes, which resolve
    square-root and inverse-square-root edges.  Atoms are carried exactly.
    """
    if n_points < 64:
        raise ContractError("n_points must be at least 64")
    if not isinstance(law, Law):
        raise ContractError(f"expected a Law, got {type(law).__name__}")
    if not law.positive:
        raise UnsupportedLawError(f"{law.tag} is not supported on [0, inf)")
    atoms = law.atoms()
    atom0 = sum(w for a, w in atoms if a == 0.0)
    rest = tuple((a, w) for a, w in atoms if a > 0)
    cs = law.continuous_support()
    if cs is None:
        return GridMeasure(atom0, rest, np.empty(0), np.empty(0))
    lo, hi = cs
    if not np.isfinite(hi):
        raise UnsupportedLawError(
            f"{law.tag} has unbounded support; use its S-transform instead of a grid"
        )
    try:
        law.pdf(0.5 * (lo + hi))
    except UnsupportedLawError as exc:
        raise UnsupportedLawError(f"{law.tag} has no implemented density") from exc
    grid = chebyshev_edges(lo, hi, n_points)
    cont = _continuous_cdf_values(law, grid)
    dens = _fill_nonfinite(law.pdf(grid), grid, cont)
    if support_pad > 0:
        n_pad = max(8, n_points // 16)
        right = hi + support_pad * np.arange(1, n_pad + 1) / n_pad
        left_lo = max(0.0, lo - support_pad)
        left = np.linspace(left_lo, lo, n_pad + 1)[:-1] if lo > left_lo else np.empty(0)
        grid = np.concatenate([left, grid, right])
        cont = np.concatenate([np.zeros(left.size), cont, np.full(right.size, cont[-1])])
        dens = np.concatenate([np.zeros(left.size), dens, np.zeros(right.size)])
    return GridMeasure(atom0, rest, grid, cont, density_values=dens, info={"source": law.describe()})
