"""The limit operator Phi, the composite operator Psi on the catalog, and numeric checks of the identities relating them to additive and max powers."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import maxconv
from .dist_core import (
    INF,
    MASS_EPS,
    BooleanStablePos,
    Cdf,
    ClassicalStablePos,
    Dirac,
    FreeStablePos,
    GridMeasure,
    Law,
    Poisson,
    TwoPoint,
    dilate,
)
from .errors import ContractError, FreemaxError, UnsupportedLawError
from .transforms import (
    CLOSED,
    PRODUCT,
    STransform,
    boolean_add_power,
    boolean_add_power_s,
    dilation_s_rule,
    free_add_power,
    free_add_power_s,
    free_mult_power_s,
    s_transform,
)

#: relative distance kept from the support endpoints when inverting S
ENDPOINT_DELTA = 1e-9
TOL_CLOSED = 1e-8
TOL_GRID = 1e-3


@dataclass(frozen=True, eq=False)
class PhiResult:
    """Image of a measure under Phi.

    ``cdf`` is constant equal to ``atom_zero`` on ``[0, a]``, strictly
    increasing on ``(a, b)`` and equal to 1 from ``b`` on, where
    ``support = (a, b)``.
    """

    cdf: Cdf
    atom_zero: float
    support: tuple
    method: str


def _dirac_result(loc: float) -> PhiResult:
    law = Dirac(loc)
    return PhiResult(law.to_cdf(), 1.0 if loc == 0 else 0.0, (loc, loc), "closed-form")


def phi(m) -> PhiResult:
    """Phi on a law, grid measure or S-transform: ``F(x) = S^{-1}(1/x) + 1`` on ``(a, b)``."""
    if isinstance(m, STransform):
        s = m
    else:
        if isinstance(m, Dirac):
            return _dirac_result(m.a)
        atoms = m.all_atoms() if isinstance(m, GridMeasure) else m.atoms()
        pure = (not m.grid.size) if isinstance(m, GridMeasure) else (m.continuous_support() is None)
        if pure and len(atoms) == 1:
            return _dirac_result(atoms[0][0])
        s = s_transform(m)
    if s.is_constant:
        return _dirac_result(1.0 / s.constant)
    a, b = float(s.a_mu), float(s.b_mu)
    if not a < b:
        raise ContractError("non-constant S-transform with a degenerate support interval")
    atom0 = float(s.atom_zero)
    x_lo = a * (1.0 + ENDPOINT_DELTA) if a > 0 else 0.0
    x_hi = b * (1.0 - ENDPOINT_DELTA) if np.isfinite(b) else INF

    def ev(x):
        x_arr = np.asarray(x, dtype=float)
        flat = x_arr.ravel()
        out = np.where(flat < 0, 0.0, np.where(flat <= a, atom0, 1.0))
        inside = (flat > a) & (flat < b)
        if np.any(inside):
            xe = np.clip(flat[inside], x_lo, x_hi)
            pos = xe > 0
            vals = np.full(xe.shape, atom0)
            if np.any(pos):
                vals[pos] = np.asarray(s.inverse(1.0 / xe[pos])) + 1.0
            out[inside] = np.clip(vals, atom0, 1.0)
        out = out.reshape(x_arr.shape)
        return float(out) if np.ndim(x) == 0 else out

    def qf(p):
        p_arr = np.asarray(p, dtype=float)
        flat = p_arr.ravel()
        out = np.where(flat <= atom0, 0.0 if atom0 > 0 else a, b)
        inside = (flat > atom0) & (flat < 1.0)
        if np.any(inside):
            z = np.clip(flat[inside] - 1.0, atom0 - 1.0 + 1e-16, -1e-300)
            out[inside] = 1.0 / np.asarray(s.eval(z))
        out = out.reshape(p_arr.shape)
        return float(out) if np.ndim(p) == 0 else out

    method = "closed-form" if s.provenance in (CLOSED, PRODUCT) else "s-numeric"
    cdf = Cdf(ev, atom0, (0.0 if atom0 > 0 else a, b), qf, (0.0,) if atom0 > 0 else (), f"phi[{s.provenance}]")
    return PhiResult(cdf, atom0, (a, b), method)


def stable_s_transforms(alpha: float, kind: str) -> STransform:
    """Closed S-transforms of the positive free and Boolean stable laws."""
    if kind == "free":
        return s_transform(FreeStablePos(alpha))
    if kind == "boolean":
        return s_transform(BooleanStablePos(alpha))
    raise ContractError(f"kind must be 'free' or 'boolean', got {kind!r}")


def _two_point_from_grid(g: GridMeasure):
    atoms = g.all_atoms()
    if g.grid.size or len(atoms) != 2 or atoms[0][0] != 0.0:
        return g
    (_, p), (loc, _) = atoms
    return TwoPoint(p, loc)


def chi_inverse_catalog(law: Law):
    """Preimage under the Boolean-to-classical bijection, on the catalog.

    Poisson laws map to Boolean powers of ``TwoPoint(0.5, 2)``; positive
    classical stable laws map to positive Boolean stable laws of the same
    index.
    """
    if isinstance(law, Poisson):
        g = boolean_add_power(TwoPoint(0.5, 2.0), law.lam)
        return _two_point_from_grid(g) if isinstance(g, GridMeasure) else g
    if isinstance(law, ClassicalStablePos):
        return BooleanStablePos(law.alpha)
    raise UnsupportedLawError(f"no catalog preimage for {type(law).__name__}")


def psi_op(law: Law) -> Cdf:
    """The composite ``x_vee o Phi o chi_inverse`` on the catalog."""
    return maxconv.x_vee(phi(chi_inverse_catalog(law)).cdf)


# ---------------------------------------------------------------------------
# verification


@dataclass(eq=False)
class VerificationReport:
    """Pointwise comparison of two distribution functions on a grid."""

    theorem_id: str
    t_or_n: float
    path: str
    grid: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    sup_norm: float
    tolerance: float
    passed: bool
    atom_lhs: float = 0.0
    atom_rhs: float = 0.0
    elapsed: float = 0.0
    error: Optional[str] = None
    extra: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "theorem": self.theorem_id,
            "param": float(self.t_or_n),
            "path": self.path,
            "sup_norm": float(self.sup_norm),
            "tolerance": float(self.tolerance),
            "passed": bool(self.passed),
            "error": self.error,
        }

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "lhs", "rhs", "abs_diff"])
            for x, a, b in zip(self.grid, self.lhs, self.rhs):
                w.writerow([repr(float(x)), repr(float(a)), repr(float(b)), repr(float(abs(a - b)))])


def verification_grid(rhs: Cdf, n: int = 512) -> np.ndarray:
    """Points spaced by quantiles of ``rhs`` over the levels above its atom at 0."""
    p0 = float(rhs.atom_zero) if rhs.is_positive else 0.0
    levels = p0 + (1.0 - p0) * (np.arange(n) + 0.5) / n
    x = np.asarray(rhs.quantile(levels), dtype=float)
    return np.unique(x[np.isfinite(x)])


def compare(theorem_id, param, path, lhs: Cdf, rhs: Cdf, tolerance, grid=None, n=512) -> VerificationReport:
    """Sup-norm distance of two CDFs on ``grid`` (quantile-spaced under ``rhs`` by default), atoms at 0 included."""
    x = verification_grid(rhs, n) if grid is None else np.asarray(grid, dtype=float)
    left = np.asarray(lhs.eval(x), dtype=float)
    right = np.asarray(rhs.eval(x), dtype=float)
    diffs = np.abs(left - right)
    atom_gap = abs(float(lhs.atom_zero) - float(rhs.atom_zero))
    sup = float(max(np.max(diffs, initial=0.0), atom_gap))
    return VerificationReport(
        theorem_id, float(param), path, x, left, right, sup, float(tolerance), bool(sup <= tolerance),
        float(lhs.atom_zero), float(rhs.atom_zero),
    )


def _failed(theorem_id, param, path, tolerance, exc) -> VerificationReport:
    empty = np.empty(0)
    return VerificationReport(theorem_id, float(param), path, empty, empty, empty, INF, float(tolerance), False,
                              error=f"{type(exc).__name__}: {exc}")


def _run(theorem_id, param, path, tolerance, build_lhs, rhs, grid, n):
    start = time.perf_counter()
    try:
        lhs = build_lhs()
        rep = compare(theorem_id, param, path, lhs, rhs, tolerance, grid, n)
    except FreemaxError as exc:
        rep = _failed(theorem_id, param, path, tolerance, exc)
    rep.elapsed = time.perf_counter() - start
    return rep


def _closed_s(m):
    return m if isinstance(m, STransform) else s_transform(m)


def verify_thm_free(m, t: float, grid=None, paths=("closed", "grid"), n=512,
                    tol_closed=TOL_CLOSED, tol_grid=TOL_GRID):
    """Phi of the rescaled free additive power against the free max power of Phi.

    The closed path rescales the S-transform identity of the additive power;
    the grid path computes the power by subordination and Stieltjes
    inversion.
    """
    if t < 1:
        raise ContractError("free additive powers need t >= 1")
    rhs = maxconv.free_max_pow(phi(m).cdf, t)
    reports = []
    if "closed" in paths:
        def lhs_closed():
            s = dilation_s_rule(free_add_power_s(_closed_s(m), t), 1.0 / t)
            return phi(s).cdf
        reports.append(_run("free", t, "closed", tol_closed, lhs_closed, rhs, grid, n))
    if "grid" in paths:
        def lhs_grid():
            return phi(dilate(free_add_power(m, t), 1.0 / t)).cdf
        reports.append(_run("free", t, "grid", tol_grid, lhs_grid, rhs, grid, n))
    return reports


def verify_thm_boolean(m, t: float, grid=None, paths=("closed", "grid"), n=512,
                       tol_closed=TOL_CLOSED, tol_grid=TOL_GRID):
    """Phi of the rescaled Boolean additive power against the Boolean max power of Phi."""
    if not t > 0:
        raise ContractError("Boolean additive powers need t > 0")
    rhs = maxconv.boolean_max_pow(phi(m).cdf, t)
    reports = []
    if "closed" in paths:
        def lhs_closed():
            s = dilation_s_rule(boolean_add_power_s(_closed_s(m), t), 1.0 / t)
            return phi(s).cdf
        reports.append(_run("boolean", t, "closed", tol_closed, lhs_closed, rhs, grid, n))
    if "grid" in paths:
        def lhs_grid():
            return phi(dilate(boolean_add_power(m, t), 1.0 / t)).cdf
        reports.append(_run("boolean", t, "grid", tol_grid, lhs_grid, rhs, grid, n))
    return reports


def belinschi_nica(m, t: float):
    """``(mu^{boxplus (1+t)})^{uplus 1/(1+t)}`` computed on grids."""
    if not t >= 0:
        raise ContractError("the Belinschi-Nica map needs t >= 0")
    if t == 0:
        return m
    return boolean_add_power(free_add_power(m, 1.0 + t), 1.0 / (1.0 + t))


def belinschi_nica_s(s: STransform, t: float) -> STransform:
    """S-transform of the Belinschi-Nica image."""
    if t == 0:
        return s
    return boolean_add_power_s(free_add_power_s(s, 1.0 + t), 1.0 / (1.0 + t))


def verify_thm_bn(m, t: float, grid=None, paths=("closed", "grid"), n=512,
                  tol_closed=TOL_CLOSED, tol_grid=TOL_GRID):
    """Phi of the Belinschi-Nica image against the max Belinschi-Nica image of Phi."""
    if not t >= 0:
        raise ContractError("the Belinschi-Nica map needs t >= 0")
    rhs = maxconv.b_t_vee(phi(m).cdf, t)
    reports = []
    if "closed" in paths:
        def lhs_closed():
            return phi(belinschi_nica_s(_closed_s(m), t)).cdf
        reports.append(_run("bn", t, "closed", tol_closed, lhs_closed, rhs, grid, n))
    if "grid" in paths:
        def lhs_grid():
            return phi(belinschi_nica(m, t)).cdf
        reports.append(_run("bn", t, "grid", tol_grid, lhs_grid, rhs, grid, n))
    return reports


def verify_thm_classical(lam: float, t: float, grid=None, n=512, tolerance=1e-10):
    """Psi of the rescaled Poisson convolution power against the classical max power of Psi."""
    if not (lam > 0 and t > 0):
        raise ContractError("need lam > 0 and t > 0")
    rhs = maxconv.classical_max_pow(psi_op(Poisson(lam)), t)

    def lhs():
        return dilate(psi_op(Poisson(lam * t)), 1.0 / t)

    rep = _run("classical", t, "closed", tolerance, lhs, rhs, grid, n)
    rep.extra["lambda"] = float(lam)
    return [rep]


def verify_mult_identity(m, n_power: int, grid=None, n=512, tolerance=TOL_GRID):
    """``Phi(mu^{boxtimes n})([0, x^n])`` against ``Phi(mu)([0, x])``."""
    if int(n_power) != n_power or n_power < 1:
        raise ContractError("n must be an integer >= 1")
    base = phi(m)
    rhs = base.cdf
    s = _closed_s(m)
    if s.is_constant:
        raise ContractError("the identity is trivial for point masses")

    def lhs():
        inner = phi(free_mult_power_s(s, int(n_power))).cdf

        def ev(x):
            x_arr = np.asarray(x, dtype=float)
            return inner.eval(np.sign(x_arr) * np.abs(x_arr) ** n_power)

        return Cdf(ev, inner.atom_zero, rhs.support_hint, None, (), "mult-power-rescaled")

    return [_run("mult", n_power, "closed", tolerance, lhs, rhs, grid, n)]


def free_prelimit(y, n):
    """``max(n y^(1/n) - (n - 1), 0)``."""
    y = np.asarray(y, dtype=float)
    return np.maximum(n * y ** (1.0 / n) - (n - 1.0), 0.0)


def boolean_prelimit(y, n):
    """``y^(1/n) / (n - (n - 1) y^(1/n))``."""
    r = np.asarray(y, dtype=float) ** (1.0 / n)
    return r / (n - (n - 1.0) * r)


def verify_limit_props(f, n_list, grid=None, n=512, tolerance=1e-2):
    """Prelimit CDF expressions against their limits ``lambda_vee(F)`` and ``x_vee_inv(F)``.

    Returns reports for the free and Boolean expressions at each ``n`` and
    records in ``extra['monotone']`` whether the distance decreases along
    ``n_list``.
    """
    f = maxconv.as_cdf(f)
    if grid is None:
        levels = np.concatenate([np.geomspace(1e-12, 1e-3, 64), (np.arange(n) + 0.5) / n])
        x = np.asarray(f.quantile(np.clip(levels, 1e-300, 1.0 - 1e-16)), dtype=float)
        grid = np.unique(x[np.isfinite(x)])
    out = []
    for kind, pre, limit in (
        ("limits-free", free_prelimit, maxconv.lambda_vee(f)),
        ("limits-boolean", boolean_prelimit, maxconv.x_vee_inv(f)),
    ):
        reps = []
        for k in n_list:
            def lhs(k=k, pre=pre):
                return Cdf(lambda x: pre(f.eval(x), k), float(pre(f.atom_zero, k)), f.support_hint, None, f.jumps,
                           f"{kind}-prelimit-{k}")
            reps.append(_run(kind, k, "closed", tolerance, lhs, limit, grid, n))
        sups = [r.sup_norm for r in reps]
        mono = all(b < a for a, b in zip(sups, sups[1:]))
        for r in reps:
            r.extra["monotone"] = mono
        out.extend(reps)
    return out


def verify_free_regular_formula(sigma: Law = TwoPoint(0.5, 2.0), grid=None, n=512, tolerance=TOL_GRID):
    """``Phi(B_1(sigma))`` against ``max(0, 2 - 1/Phi(sigma))``, with ``B_1`` computed on grids."""
    base = phi(sigma).cdf

    def rhs_eval(x):
        v = np.asarray(base.eval(x), dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(v > 0.5, 2.0 - 1.0 / np.where(v > 0, v, 1.0), 0.0)

    def rhs_q(p):
        # invert 2 - 1/v = p for v, then ask Phi(sigma)
        return base.quantile(np.where(np.asarray(p) > 0, 1.0 / (2.0 - np.asarray(p, dtype=float)), 0.5))

    rhs = Cdf(rhs_eval, float(rhs_eval(0.0)), base.support_hint, rhs_q, (), "free-regular-formula")
    return [
        _run("free-regular", 1.0, "grid", tolerance, lambda: phi(belinschi_nica(sigma, 1.0)).cdf, rhs, grid, n),
        _run("free-regular", 1.0, "closed", TOL_CLOSED,
             lambda: phi(belinschi_nica_s(s_transform(sigma), 1.0)).cdf, rhs, grid, n),
    ]


def verify_diagram_poisson(grid=None, n=512, tolerance=TOL_GRID):
    """``lambda_vee(Psi(Po(1)))`` against ``Phi`` of the free-regular image ``B_1(sigma)``."""
    lhs_cdf = maxconv.lambda_vee(psi_op(Poisson(1.0)))
    return [
        _run("diagram", 1.0, "grid", tolerance,
             lambda: phi(belinschi_nica(TwoPoint(0.5, 2.0), 1.0)).cdf, lhs_cdf, grid, n),
    ]
