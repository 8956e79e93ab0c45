"""Analytic transforms of measures on the half-line and the additive and multiplicative powers built on them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from ._numeric import chebyshev_midpoints, cumulative_mass_cosine, newton_upper_half_plane
from ._roots import solve_log_negative
from .dist_core import (
    INF,
    MASS_EPS,
    Dirac,
    GridMeasure,
    Law,
    TwoPoint,
    moments_ab,
)
from .errors import ContractError, NumericalError, UnsupportedLawError

CLOSED = "closed-form"
GRID = "grid-numeric"
PRODUCT = "product-power"
#: output nodes per density sample when integrating a recovered density
OUTPUT_REFINE = 4


@dataclass(frozen=True)
class HalfPlanePoint:
    """A point of the open upper half-plane."""

    re: float
    im: float

    def __post_init__(self):
        if not self.im > 0:
            raise ContractError(f"imaginary part must be positive, got {self.im}")

    def __complex__(self):
        return complex(self.re, self.im)


def _upper(z):
    if isinstance(z, HalfPlanePoint):
        z = complex(z)
    z = np.asarray(z, dtype=complex)
    if np.any(~(z.imag > 0)):
        raise ContractError("Cauchy-type transforms are evaluated on the open upper half-plane")
    return z


def _out(z, val):
    return complex(val.reshape(())) if np.ndim(z) == 0 and not isinstance(z, np.ndarray) else val


# ---------------------------------------------------------------------------
# G, F, E and Psi


def cauchy(m, z):
    """Cauchy transform ``int 1/(z - x) dmu(x)`` on the upper half-plane."""
    zz = _upper(z)
    g = np.asarray(m.cauchy(zz))
    return _out(z, g)


def f_and_self_energy(m, z):
    """Reciprocal Cauchy transform ``F = 1/G`` and self-energy ``E = z - F``.

    Raises :class:`NumericalError` when ``G`` underflows or ``F`` violates
    ``Im F >= Im z``.
    """
    zz = _upper(z)
    g = np.asarray(m.cauchy(zz))
    if np.any(~np.isfinite(g)) or np.any(np.abs(g) < 1e-300):
        raise NumericalError("Cauchy transform underflowed or is not finite")
    f = 1.0 / g
    if np.any(f.imag < zz.imag - 1e-9 * (1.0 + np.abs(zz))):
        raise NumericalError("reciprocal Cauchy transform lost the Nevanlinna property")
    return _out(z, f), _out(z, zz - f)


def psi_transform(m, u):
    """``int u x / (1 - u x) dmu(x)`` at ``u < 0``."""
    return m.psi(u)


# ---------------------------------------------------------------------------
# S-transforms


@dataclass(frozen=True, eq=False)
class STransform:
    """A strictly decreasing function on ``(atom_zero - 1, 0)`` with its inverse.

    Parameters
    ----------
    eval_fn, inverse_fn : callable
        ``z -> S(z)`` on the domain and ``y -> S^{-1}(y)`` on ``(1/b_mu, 1/a_mu)``.
    a_mu, b_mu : float
        Endpoints of the support of the limit law; the image of ``S`` is
        ``(1/b_mu, 1/a_mu)``.
    atom_zero : float
        Mass of the underlying measure at 0.
    provenance : str
        One of ``closed-form``, ``grid-numeric``, ``product-power``.
    constant : float, optional
        Value of ``S`` for point masses, for which it is constant.
    """

    eval_fn: Callable
    inverse_fn: Optional[Callable]
    a_mu: float
    b_mu: float
    atom_zero: float
    provenance: str
    constant: Optional[float] = None

    @property
    def domain(self):
        return (self.atom_zero - 1.0, 0.0)

    @property
    def image(self):
        return (1.0 / self.b_mu if self.b_mu > 0 else INF, 1.0 / self.a_mu if self.a_mu > 0 else INF)

    @property
    def is_constant(self) -> bool:
        return self.constant is not None

    def eval(self, z):
        za = np.asarray(z, dtype=float)
        lo, hi = self.domain
        if np.any((za <= lo) | (za >= hi)) or np.any(np.isnan(za)):
            raise ContractError(f"S-transform argument outside its domain ({lo}, {hi})")
        if self.constant is not None:
            val = np.full(za.shape, self.constant)
        else:
            val = np.asarray(self.eval_fn(za), dtype=float)
        return float(val) if np.ndim(z) == 0 else val

    def __call__(self, z):
        return self.eval(z)

    def inverse(self, y):
        if self.constant is not None or self.inverse_fn is None:
            raise ContractError("a constant S-transform has no inverse")
        ya = np.asarray(y, dtype=float)
        lo, hi = self.image
        if np.any((ya <= lo) | (ya >= hi)) or np.any(np.isnan(ya)):
            raise ContractError(f"S-transform value outside its image ({lo}, {hi})")
        val = np.asarray(self.inverse_fn(ya), dtype=float)
        return float(val) if np.ndim(y) == 0 else val


def s_transform(m) -> STransform:
    """S-transform of a law or grid measure.

    Closed forms are used where the catalog provides them; otherwise both
    ``S`` and ``S^{-1}`` are computed by a bracketed secant search in
    ``log(-u)`` on ``Psi`` and on the monotone map
    ``u -> (1 + Psi(u)) u / Psi(u)``.
    """
    a_mu, b_mu = moments_ab(m)
    if isinstance(m, Dirac):
        if m.a == 0:
            raise ContractError("the point mass at 0 has no S-transform")
        return STransform(None, None, m.a, m.a, 0.0, CLOSED, constant=1.0 / m.a)
    atom0 = float(m.atom_zero)
    if atom0 >= 1.0 - MASS_EPS:
        raise ContractError("the point mass at 0 has no S-transform")
    # point masses hidden in other representations
    atoms = m.all_atoms() if isinstance(m, GridMeasure) else m.atoms()
    if isinstance(m, GridMeasure) and not m.grid.size and len(atoms) == 1:
        loc = atoms[0][0]
        return STransform(None, None, loc, loc, 0.0, CLOSED, constant=1.0 / loc)
    if isinstance(m, TwoPoint) and m.p == 0.0:
        return STransform(None, None, m.a, m.a, 0.0, CLOSED, constant=1.0 / m.a)
    if isinstance(m, Law) and m.has_closed_s:
        return STransform(m.s_eval, m.s_inverse, a_mu, b_mu, atom0, CLOSED)

    if isinstance(m, GridMeasure):
        psi_u = m.psi_over_u
    else:
        def psi_u(u):
            return np.asarray(m.psi(u)) / u

    def psi(u):
        return u * psi_u(u)

    def ratio(u):
        pu = np.asarray(psi_u(u))
        return (1.0 + u * pu) / pu

    # Psi(-e^s) and the ratio approach their limits exponentially in s;
    # these log-odds maps make both ends nearly linear for the root finder
    tiny = 1e-300

    def psi_odds(v):
        return np.log(np.maximum(1.0 - atom0 + v, tiny)) - np.log(np.maximum(-v, tiny))

    def ratio_odds(r):
        out = np.log(np.maximum(r - 1.0 / b_mu, tiny))
        if a_mu > 0:
            out = out - np.log(np.maximum(1.0 / a_mu - r, tiny))
        return out

    def eval_fn(z):
        u = solve_log_negative(psi, z, increasing=True, transform=psi_odds)
        return (1.0 + z) * u / z

    def inverse_fn(y):
        u = solve_log_negative(ratio, y, increasing=False, transform=ratio_odds)
        return psi(u)

    return STransform(eval_fn, inverse_fn, a_mu, b_mu, atom0, GRID)


def _free_atom_zero(atom0, t):
    return max(t * atom0 - (t - 1.0), 0.0)


def _boolean_atom_zero(atom0, t):
    return atom0 / (t - (t - 1.0) * atom0)


def free_add_power_s(s: STransform, t: float) -> STransform:
    """S-transform of the free additive power: ``z -> S(z/t) / t``."""
    if t < 1:
        raise ContractError("free additive powers need t >= 1")
    if s.is_constant:
        return STransform(None, None, s.a_mu * t, s.b_mu * t, 0.0, s.provenance, constant=s.constant / t)
    atom0 = _free_atom_zero(s.atom_zero, t)
    b = s.b_mu * t
    if atom0 > 0:
        a = 0.0
    elif -1.0 / t <= s.domain[0]:
        # S tends to 1/a_mu at the lower end of its domain
        a = t * s.a_mu
    else:
        a = t / float(s.eval(-1.0 / t))

    def ev(z):
        return s.eval(z / t) / t

    def inv(y):
        return t * s.inverse(t * y)

    return STransform(ev, inv, a, b, atom0, s.provenance)


def boolean_add_power_s(s: STransform, t: float) -> STransform:
    """S-transform of the Boolean additive power: ``z -> S(z / (t - z + t z)) / t``."""
    if t <= 0:
        raise ContractError("Boolean additive powers need t > 0")
    if s.is_constant:
        return STransform(None, None, s.a_mu * t, s.b_mu * t, 0.0, s.provenance, constant=s.constant / t)
    atom0 = _boolean_atom_zero(s.atom_zero, t)

    def ev(z):
        return s.eval(z / (t - z + t * z)) / t

    def inv(y):
        w = s.inverse(t * y)
        return w * t / (1.0 - (t - 1.0) * w)

    return STransform(ev, inv, s.a_mu * t, s.b_mu * t, atom0, s.provenance)


def dilation_s_rule(s: STransform, c: float) -> STransform:
    """S-transform of the dilation by ``c``: ``z -> S(z) / c``."""
    if not (c > 0 and np.isfinite(c)):
        raise ContractError(f"dilation factor must be > 0, got {c}")
    if s.is_constant:
        return STransform(None, None, s.a_mu * c, s.b_mu * c, 0.0, s.provenance, constant=s.constant / c)

    def ev(z):
        return s.eval(z) / c

    def inv(y):
        return s.inverse(c * y)

    return STransform(ev, inv, s.a_mu * c, s.b_mu * c, s.atom_zero, s.provenance)


def free_mult_power_s(s: STransform, n: int, atom0: Optional[float] = None) -> STransform:
    """S-transform of the ``n``-fold free multiplicative power: ``z -> S(z)^n``."""
    if int(n) != n or n < 1:
        raise ContractError("free multiplicative powers need an integer n >= 1")
    n = int(n)
    if n == 1:
        return s
    atom0 = s.atom_zero if atom0 is None else float(atom0)
    if s.is_constant:
        return STransform(None, None, s.a_mu**n, s.b_mu**n, 0.0, PRODUCT, constant=s.constant**n)

    def ev(z):
        return s.eval(z) ** n

    def inv(y):
        return s.inverse(y ** (1.0 / n))

    return STransform(ev, inv, s.a_mu**n, s.b_mu**n, atom0, PRODUCT)


# ---------------------------------------------------------------------------
# Stieltjes inversion


def default_eps_schedule():
    return 1e-2 * 2.0 ** -np.arange(7)


def stieltjes_density(g_eval, x_grid, eps_schedule=None, atoms=()):
    """Density ``-Im G(x + i eps) / pi`` extrapolated linearly to ``eps = 0``.

    The two smallest ``eps`` in the schedule are combined by linear
    Richardson extrapolation.  Known atoms ``(location, mass)`` are removed
    from ``G`` first; the rounding error of that subtraction sets the
    tolerance of the sign check.  Negative results are set to zero.  Raises
    :class:`ContractError` when ``Im G > 0`` is observed.
    """
    x = np.asarray(x_grid, dtype=float)
    eps = np.sort(np.asarray(default_eps_schedule() if eps_schedule is None else eps_schedule, dtype=float))
    if eps.size == 0 or np.any(eps <= 0):
        raise ContractError("eps schedule must contain positive values")
    vals = []
    for e in eps[:2]:
        z = x + 1j * e
        g = np.asarray(g_eval(z))
        noise = np.abs(g) + 1.0
        for loc, mass in atoms:
            pole = mass / (z - loc)
            g = g - pole
            noise = noise + np.abs(pole)
        if np.any(g.imag > 1e-10 * noise):
            raise ContractError("Im G > 0 detected: input is not a Cauchy transform")
        vals.append(-g.imag / np.pi)
    if eps.size == 1:
        dens = vals[0]
    else:
        e0, e1 = eps[0], eps[1]
        dens = vals[0] + (vals[0] - vals[1]) * e0 / (e1 - e0)
    return np.where(dens > 0, dens, 0.0)


# ---------------------------------------------------------------------------
# helpers shared by the additive powers


def _cauchy_pair(m):
    if isinstance(m, (Law, GridMeasure)):
        return m.cauchy_with_derivative
    raise ContractError(f"expected a Law or GridMeasure, got {type(m).__name__}")


def _atoms_of(m):
    return m.all_atoms() if isinstance(m, GridMeasure) else m.atoms()


def _single_atom(m):
    atoms = _atoms_of(m)
    if len(atoms) == 1 and atoms[0][1] >= 1.0 - 1e-14:
        if isinstance(m, GridMeasure) and m.grid.size:
            return None
        if isinstance(m, Law) and m.continuous_support() is not None:
            return None
        return atoms[0][0]
    return None


def _point_mass(loc, like):
    if isinstance(like, Law):
        return Dirac(loc)
    if loc == 0.0:
        return GridMeasure(1.0, (), np.empty(0), np.empty(0))
    return GridMeasure(0.0, ((loc, 1.0),), np.empty(0), np.empty(0))


def _hull(m):
    lo, hi = m.support()
    if not np.isfinite(hi):
        raise UnsupportedLawError("additive powers are computed for compactly supported measures only")
    return lo, hi


def _continuous_from_density(density_fn, intervals, n_nodes, target_mass):
    """Integrate ``density_fn`` over ``intervals`` into grid, cumulative and density arrays."""
    grids, cums, dens = [], [], []
    offset = 0.0
    for lo, hi in intervals:
        if hi <= lo:
            continue
        xm, _ = chebyshev_midpoints(lo, hi, n_nodes)
        rho = density_fn(xm)
        x, cum = cumulative_mass_cosine(rho, lo, hi, OUTPUT_REFINE * n_nodes + 1)
        cum = np.maximum.accumulate(np.clip(cum, 0.0, None))
        d = np.interp(x, xm, rho)
        if grids and x[0] <= grids[-1][-1]:
            x, cum, d = x[1:], cum[1:], d[1:]
        grids.append(x)
        cums.append(cum + offset)
        dens.append(d)
        offset += cum[-1]
    if not grids:
        return np.empty(0), np.empty(0), np.empty(0), {"renormalization": 0.0}
    grid = np.concatenate(grids)
    cdfv = np.concatenate(cums)
    dv = np.concatenate(dens)
    raw = cdfv[-1]
    info = {"raw_continuous_mass": float(raw), "target_continuous_mass": float(target_mass)}
    if raw <= 0:
        raise NumericalError("recovered continuous part has no mass")
    corr = target_mass / raw
    info["renormalization"] = float(abs(corr - 1.0))
    info["renormalization_flag"] = bool(abs(corr - 1.0) > 1e-6)
    return grid, cdfv * corr, dv * corr, info


def _find_intervals(density_fn, lo, hi, n_pilot=512, rel_threshold=1e-9):
    """Locate the intervals where ``density_fn`` exceeds a small fraction of its maximum."""
    xs = lo + (hi - lo) * (np.arange(n_pilot) + 0.5) / n_pilot
    d = density_fn(xs)
    peak = float(np.max(d, initial=0.0))
    if peak <= 0:
        return []
    thr = rel_threshold * peak
    inside = d > thr
    runs = []
    j = 0
    while j < n_pilot:
        if inside[j]:
            k = j
            while k + 1 < n_pilot and inside[k + 1]:
                k += 1
            runs.append((j, k))
            j = k + 1
        else:
            j += 1
    if not runs:
        return []

    def indicator(x):
        return (density_fn(x) > thr).astype(float)

    left_out = np.array([xs[a - 1] if a > 0 else lo for a, _ in runs])
    left_in = np.array([xs[a] for a, _ in runs])
    right_in = np.array([xs[b] for _, b in runs])
    right_out = np.array([xs[b + 1] if b + 1 < n_pilot else hi for _, b in runs])
    # bisect the indicator: 0 outside, 1 inside
    lo_l, hi_l = left_out.copy(), left_in.copy()
    lo_r, hi_r = right_in.copy(), right_out.copy()
    at_lo = np.array([a == 0 for a, _ in runs]) & (indicator(np.full(1, lo))[0] > 0)
    at_hi = np.array([b + 1 == n_pilot for _, b in runs]) & (indicator(np.full(1, hi))[0] > 0)
    for _ in range(60):
        if np.all(hi_l - lo_l <= 1e-15 * (hi - lo)) and np.all(hi_r - lo_r <= 1e-15 * (hi - lo)):
            break
        ml = 0.5 * (lo_l + hi_l)
        mr = 0.5 * (lo_r + hi_r)
        il = indicator(ml) > 0
        ir = indicator(mr) > 0
        hi_l = np.where(il, ml, hi_l)
        lo_l = np.where(il, lo_l, ml)
        lo_r = np.where(ir, mr, lo_r)
        hi_r = np.where(ir, hi_r, mr)
    left = np.where(at_lo, lo, 0.5 * (lo_l + hi_l))
    right = np.where(at_hi, hi, 0.5 * (lo_r + hi_r))
    return [(float(a), float(b)) for a, b in zip(left, right)]


# ---------------------------------------------------------------------------
# free additive powers


@dataclass(frozen=True, eq=False)
class SubordinationResult:
    """Subordination function of a free additive power.

    ``f_out(z) = F_mu(omega(z))`` is the reciprocal Cauchy transform of the
    power; ``iterations`` and ``residual`` describe the solve at the probe
    points used to build the result.
    """

    t: float
    omega: Callable
    f_out: Callable
    iterations: int
    residual: float
    info: dict = field(default_factory=dict)


def _damped_fixed_point(f_mu, z, t, gamma=0.8, tol=1e-12, maxiter=500):
    w = np.array(z, dtype=complex)
    c = 1.0 - 1.0 / t
    for k in range(1, maxiter + 1):
        w_new = (1.0 - gamma) * w + gamma * (z / t + c * f_mu(w))
        step = np.max(np.abs(w_new - w), initial=0.0)
        w = w_new
        if step < tol * (1.0 + np.max(np.abs(w))):
            return w, k
    raise NumericalError("subordination fixed point stagnated")


def subordination(m, t: float, scale: Optional[float] = None) -> SubordinationResult:
    """Solve ``omega = z/t + (1 - 1/t) F_mu(omega)`` on the upper half-plane.

    The damped fixed-point iteration starts the solve far from the real
    axis; Newton continuation then carries the root down to the requested
    points.
    """
    if t < 1:
        raise ContractError("free additive powers need t >= 1")
    pair = _cauchy_pair(m)
    c = 1.0 - 1.0 / t
    if scale is None:
        lo, hi = _hull(m)
        scale = 10.0 * max(t * hi, 1.0)

    def f_mu(w):
        return 1.0 / pair(w)[0]

    def residual(w, z):
        g, dg = pair(w)
        f = 1.0 / g
        df = -dg / (g * g)
        return w - z / t - c * f, 1.0 - c * df

    stats = {"iterations": 0, "residual": 0.0}

    def omega(z):
        z = _upper(z)
        flat = z.ravel()
        if t == 1.0:
            return z
        def start(zz):
            w, k = _damped_fixed_point(f_mu, zz, t)
            stats["iterations"] += k
            return w

        w, k, res = newton_upper_half_plane(residual, flat, start, scale)
        stats["iterations"] += k
        h, _ = residual(w, flat)
        rel = float(np.max(np.abs(h) / (1.0 + np.abs(w)), initial=0.0))
        stats["residual"] = max(stats["residual"], rel)
        if rel > 1e-9:
            raise NumericalError(f"subordination residual {rel:.3g} above tolerance")
        return w.reshape(z.shape)

    def f_out(z):
        return f_mu(omega(z))

    probe = np.array([0.5 * scale + 1j * scale / 10.0])
    omega(probe)
    return SubordinationResult(t, omega, f_out, stats["iterations"], stats["residual"], stats)


def free_add_power(m, t: float, n_points: int = 1024, pilot: int = 512):
    """Free additive convolution power ``mu^{boxplus t}`` for ``t >= 1``.

    Atoms follow the rule ``mass(t a) = t mass(a) - (t - 1)`` whenever the
    right side is positive.  The continuous part is recovered from the
    subordinated Cauchy transform with atoms removed, located by a pilot
    scan and integrated on each interval in a cosine basis.
    """
    if not t >= 1:
        raise ContractError("free additive powers need t >= 1")
    if t == 1.0:
        return m
    loc = _single_atom(m)
    if loc is not None:
        return _point_mass(t * loc, m)
    lo, hi = _hull(m)
    width = max(t * hi - t * lo, 1e-300)
    pair = _cauchy_pair(m)
    sub = subordination(m, t, scale=10.0 * max(t * hi, width))

    out_atoms = []
    for a, w in _atoms_of(m):
        mass = t * w - (t - 1.0)
        if mass > MASS_EPS:
            out_atoms.append((t * a, mass))

    def g_out_pair(z):
        z = _upper(z)
        w = sub.omega(z)
        g, dg = pair(w)
        f = 1.0 / g
        df = -dg / (g * g)
        dw = (1.0 / t) / (1.0 - (1.0 - 1.0 / t) * df)
        return g, dg * dw

    eps = 1e-13 * max(width, 1e-300)

    def density(x):
        return stieltjes_density(lambda z: g_out_pair(z)[0], x, (eps, 2.0 * eps), atoms=out_atoms)

    target = 1.0 - sum(w for _, w in out_atoms)
    if target <= 1e-12:
        intervals = []
    else:
        intervals = _find_intervals(density, t * lo, t * hi, n_pilot=pilot)
    grid, cdfv, dens, info = _continuous_from_density(density, intervals, n_points, target)
    atom0 = sum(w for a, w in out_atoms if a == 0.0)
    rest = tuple((a, w) for a, w in out_atoms if a > 0.0)
    if not grid.size and target > 1e-9:
        raise NumericalError("free additive power lost its continuous part")
    if not grid.size:
        # round-off leftover of purely atomic outputs goes to the largest atom
        rest = _fix_atomic_mass(atom0, rest)
        atom0 = 1.0 - sum(w for _, w in rest)
    info.update(
        {
            "operation": "free_add_power",
            "t": float(t),
            "intervals": intervals,
            "subordination_iterations": sub.iterations,
            "subordination_residual": sub.residual,
        }
    )
    return GridMeasure(atom0, rest, grid, cdfv, density_values=dens, cauchy_fn=g_out_pair, info=info)


def _fix_atomic_mass(atom0, rest):
    total = atom0 + sum(w for _, w in rest)
    if not rest:
        return rest
    k = int(np.argmax([w for _, w in rest]))
    rest = list(rest)
    rest[k] = (rest[k][0], rest[k][1] + (1.0 - total))
    return tuple(rest)


# ---------------------------------------------------------------------------
# Boolean additive powers


def _is_purely_atomic(m):
    if isinstance(m, GridMeasure):
        return not m.grid.size
    return m.continuous_support() is None


def _boolean_atomic(atoms, t):
    """Boolean power of a finitely atomic law by partial fractions.

    With ``G = P/Q`` the power has ``G_t = P / ((1 - t) z P + t Q)``; its
    atoms are the real roots of the denominator with residues
    ``P(r) / D'(r)``.
    """
    P = np.polynomial.Polynomial([0.0])
    Q = np.polynomial.Polynomial([1.0])
    for a, _ in atoms:
        Q = Q * np.polynomial.Polynomial([-a, 1.0])
    for k, (a, w) in enumerate(atoms):
        term = np.polynomial.Polynomial([w])
        for j, (b, _) in enumerate(atoms):
            if j != k:
                term = term * np.polynomial.Polynomial([-b, 1.0])
        P = P + term
    zpoly = np.polynomial.Polynomial([0.0, 1.0])
    D = (1.0 - t) * zpoly * P + t * Q
    D = D.trim(tol=0.0)
    roots = D.roots()
    if np.any(np.abs(roots.imag) > 1e-8 * (1.0 + np.abs(roots.real))):
        raise NumericalError("non-real poles in a Boolean power of an atomic law")
    roots = np.sort(roots.real)
    dD = D.deriv()
    out = []
    for r in roots:
        if abs(r) < 1e-13 * (1.0 + max(abs(a) for a, _ in atoms)):
            r = 0.0
        mass = P(r) / dD(r)
        if mass > MASS_EPS:
            out.append((float(r), float(mass)))
    return out


def boolean_add_power(m, t: float, n_points: int = 1024, scan_points: int = 4096):
    """Boolean additive convolution power ``mu^{uplus t}`` for ``t > 0``.

    The reciprocal Cauchy transform is ``(1 - t) z + t F_mu(z)``.  The atom
    at 0 has mass ``mu({0}) / (t - (t - 1) mu({0}))``; other atoms are the
    real zeros of the reciprocal transform off the continuous support, with
    mass ``1 / F_t'(r)``.  The continuous part lives on the continuous
    support of ``mu``.
    """
    if not t > 0:
        raise ContractError("Boolean additive powers need t > 0")
    if t == 1.0:
        return m
    loc = _single_atom(m)
    if loc is not None:
        return _point_mass(t * loc, m)
    lo, hi = _hull(m)
    atoms_in = _atoms_of(m)
    atom0_in = sum(w for a, w in atoms_in if a == 0.0)
    atom0 = _boolean_atom_zero(atom0_in, t)
    pair = _cauchy_pair(m)

    def g_out_pair(z):
        z = np.asarray(z, dtype=complex)
        g, dg = pair(z)
        f = 1.0 / g
        df = -dg / (g * g)
        ft = (1.0 - t) * z + t * f
        dft = (1.0 - t) + t * df
        return 1.0 / ft, -dft / (ft * ft)

    if _is_purely_atomic(m):
        found = _boolean_atomic(atoms_in, t)
        rest = tuple((a, w) for a, w in found if a > 0)
        zero_mass = sum(w for a, w in found if a == 0.0)
        if abs(zero_mass - atom0) > 1e-8:
            raise NumericalError("atom at 0 disagrees with the closed Boolean atom rule")
        rest = _fix_atomic_mass(atom0, rest)
        info = {"operation": "boolean_add_power", "t": float(t), "method": "partial-fractions"}
        return GridMeasure(atom0, rest, np.empty(0), np.empty(0), cauchy_fn=g_out_pair, info=info)

    if isinstance(m, GridMeasure):
        intervals = m.continuous_intervals()
    else:
        intervals = [m.continuous_support()]
    width = max(hi - lo, 1e-300)
    eta = 1e-13 * width
    upper = max(t, 1.0) * hi

    def ft_real(x):
        z = np.asarray(x, dtype=float) + 1j * eta
        g = pair(z)[0]
        return ((1.0 - t) * z + t / g).real

    rest = []
    gaps = _gaps(intervals, 0.0, upper)
    for a, b in gaps:
        rest.extend(_real_zeros(ft_real, a, b, scan_points, pair, t, eta))
    rest = [(r, w) for r, w in rest if r > 0 and w > MASS_EPS]

    def density(x):
        return stieltjes_density(lambda z: g_out_pair(z)[0], x, (eta, 2.0 * eta))

    target = 1.0 - atom0 - sum(w for _, w in rest)
    grid, cdfv, dens, info = _continuous_from_density(density, intervals, n_points, target)
    info.update({"operation": "boolean_add_power", "t": float(t), "intervals": intervals})
    return GridMeasure(atom0, tuple(rest), grid, cdfv, density_values=dens, cauchy_fn=g_out_pair, info=info)


def _gaps(intervals, lo, hi):
    out = []
    cur = lo
    for a, b in sorted(intervals):
        if a > cur:
            out.append((cur, a))
        cur = max(cur, b)
    if hi > cur:
        out.append((cur, hi))
    return out


def _real_zeros(fr, a, b, n, pair, t, eta):
    """Zeros of the real function ``fr`` on the open interval ``(a, b)`` with their residues."""
    span = b - a
    if span <= 0:
        return []
    # cluster scan points at both ends where zeros tend to approach an edge
    theta = np.linspace(0.0, np.pi, n)
    xs = a + 0.5 * span * (1.0 - np.cos(theta))
    xs = xs[1:-1]
    if xs.size < 2:
        return []
    vals = fr(xs)
    out = []
    sign = np.sign(vals)
    for j in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        r = optimize.brentq(fr, xs[j], xs[j + 1], xtol=1e-15, rtol=1e-15, maxiter=200)
        z = np.array([r + 1j * eta])
        g, dg = pair(z)
        f = 1.0 / g
        df = -dg / (g * g)
        val = ((1.0 - t) * z + t * f)[0]
        # a sign change across a pole of F is not a zero
        if abs(val) > 1e-7 * (1.0 + abs(r)):
            continue
        dft = ((1.0 - t) + t * df)[0].real
        if dft > 0:
            out.append((float(r), float(1.0 / dft)))
    return out
