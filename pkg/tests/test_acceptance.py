"""End-to-end acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line with the observed error,
the tolerance and the elapsed time against the runtime budget.
"""

import time

import numpy as np
import pytest

from freemax import (
    BooleanStablePos,
    Dagum,
    Frechet,
    FreeStablePos,
    Gumbel,
    MarchenkoPastur,
    Pareto,
    TwoPoint,
    Uniform01,
    b_t_vee,
    boolean_add_power,
    free_add_power,
    free_mult_power_s,
    grid_from_law,
    lambda_vee,
    max_convolve,
    mean_ks,
    phi,
    pi_vee,
    s_transform,
    sample_batch,
    sample_wishart_spectrum,
    ks_distance,
    verify_limit_props,
    verify_mult_identity,
    verify_thm_bn,
    verify_thm_boolean,
    verify_thm_classical,
    verify_thm_free,
    x_vee,
)
from freemax.maxconv import lambda_vee_value, pi_vee_value

SIGMA = TwoPoint(0.5, 2.0)
PI = MarchenkoPastur(1.0)


@pytest.fixture
def record(capsys):
    def emit(number, title, checks, elapsed, budget):
        """``checks`` is a list of ``(label, observed, tolerance)`` or ``(label, ok)`` items."""
        parts = []
        ok_all = True
        for item in checks:
            if len(item) == 3:
                label, observed, tol = item
                ok = bool(observed < tol)
                parts.append(f"{label}={observed:.2e}<{tol:.0e}")
            else:
                label, ok = item
                ok = bool(ok)
                parts.append(f"{label}={'yes' if ok else 'no'}")
            ok_all &= ok
        in_time = elapsed < budget
        flag = "PASS" if ok_all and in_time else "FAIL"
        with capsys.disabled():
            print(f"\n{flag} criterion {number:>2} {title}: " + "; ".join(parts)
                  + f"; time={elapsed:.2f}s<{budget:g}s")
        assert ok_all, f"criterion {number} accuracy: {parts}"
        assert in_time, f"criterion {number} took {elapsed:.2f}s, budget {budget}s"

    return emit


def _sup(reports):
    return max(r.sup_norm for r in reports)


def _clean(reports):
    return all(r.error is None for r in reports)


def test_criterion_01_grid_s_transform(record):
    start = time.perf_counter()
    z = -np.arange(1, 10) / 10
    s = s_transform(grid_from_law(PI))
    err = float(np.max(np.abs(s.eval(z) - 1 / (1 + z))))
    record(1, "numeric S of grid MP(1)", [("max|S-1/(1+z)|", err, 1e-4)], time.perf_counter() - start, 1.0)


def test_criterion_02_phi_catalog(record):
    start = time.perf_counter()
    x = np.linspace(0.001, 0.999, 999)
    e_pi = float(np.max(np.abs(phi(PI).cdf(x) - x)))
    res = phi(SIGMA)
    e_sigma = max(float(np.max(np.abs(res.cdf(x) - 1 / (2 - x)))), abs(res.atom_zero - 0.5))
    xp = np.geomspace(1.001, 1e4, 400)
    e_free = float(np.max(np.abs(phi(FreeStablePos(0.5)).cdf(xp) - Pareto(1.0).cdf(xp))))
    xd = np.geomspace(1e-4, 1e4, 400)
    e_bool = float(np.max(np.abs(phi(BooleanStablePos(0.5)).cdf(xd) - Dagum(1.0).cdf(xd))))
    record(2, "Phi catalog", [("pi", e_pi, 1e-6), ("sigma", e_sigma, 1e-8), ("fstable", e_free, 1e-8),
                              ("bstable", e_bool, 1e-8)], time.perf_counter() - start, 1.0)


def test_criterion_03_free_powers(record):
    start = time.perf_counter()
    reps = [r for m in (SIGMA, PI) for t in (1.5, 2.0, 3.0) for r in verify_thm_free(m, t)]
    closed = [r for r in reps if r.path == "closed"]
    grid = [r for r in reps if r.path == "grid"]
    record(3, "free additive vs free max powers",
           [("closed", _sup(closed), 1e-8), ("grid", _sup(grid), 1e-3), ("no errors", _clean(reps))],
           time.perf_counter() - start, 30.0)


def test_criterion_04_boolean_powers(record):
    start = time.perf_counter()
    reps = [r for m in (SIGMA, PI) for t in (0.5, 2.0, 3.0) for r in verify_thm_boolean(m, t)]
    closed = [r for r in reps if r.path == "closed"]
    grid = [r for r in reps if r.path == "grid"]
    atoms = boolean_add_power(SIGMA, 2.0).all_atoms()
    ref = ((0.0, 1 / 3), (3.0, 2 / 3))
    atom_err = max(max(abs(a - b), abs(p - q)) for (a, p), (b, q) in zip(atoms, ref)) if len(atoms) == 2 else 1.0
    record(4, "Boolean additive vs Boolean max powers",
           [("closed", _sup(closed), 1e-8), ("grid", _sup(grid), 1e-3), ("atoms", atom_err, 1e-6),
            ("no errors", _clean(reps))], time.perf_counter() - start, 30.0)


def test_criterion_05_belinschi_nica(record):
    start = time.perf_counter()
    reps = [r for t in (0.0, 1.0, 2.0) for r in verify_thm_bn(SIGMA, t)]
    stable = [r for t in (0.0, 1.0, 2.0) for r in verify_thm_bn(BooleanStablePos(0.5), t, paths=("closed",))]
    closed = [r for r in reps if r.path == "closed"] + stable
    grid = [r for r in reps if r.path == "grid"]
    # the stable pair is sent to the free stable law with the same index
    pair = stable[1]
    pair_err = float(np.max(np.abs(pair.rhs - Pareto(1.0).cdf(pair.grid)))) if pair.grid.size else 1.0
    record(5, "Belinschi-Nica vs max Belinschi-Nica",
           [("closed", _sup(closed), 1e-8), ("grid", _sup(grid), 1e-3), ("stable pair", pair_err, 1e-8),
            ("no errors", _clean(reps + stable))], time.perf_counter() - start, 30.0)


def test_criterion_06_poisson_classical(record):
    start = time.perf_counter()
    reps = [r for lam in (0.5, 1.0, 2.0) for t in (2.0, 3.0) for r in verify_thm_classical(lam, t)]
    atom_err = max(abs(r.atom_lhs - np.exp(-r.extra["lambda"]) ** r.t_or_n) for r in reps)
    record(6, "Poisson classical powers vs classical max powers",
           [("sup", _sup(reps), 1e-10), ("atom", atom_err, 1e-10)], time.perf_counter() - start, 1.0)


def test_criterion_07_multiplicative_powers(record):
    start = time.perf_counter()
    reps = [r for m in (PI, FreeStablePos(0.5)) for k in (2, 3) for r in verify_mult_identity(m, k)]
    x = np.linspace(0.001, 0.999, 999)
    sq = phi(free_mult_power_s(s_transform(PI), 2)).cdf
    sq_err = float(np.max(np.abs(sq(x) - np.sqrt(x))))
    record(7, "multiplicative powers under Phi",
           [("sup", _sup(reps), 1e-3), ("sqrt law", sq_err, 1e-6), ("no errors", _clean(reps))],
           time.perf_counter() - start, 5.0)


def test_criterion_08_prelimits(record):
    start = time.perf_counter()
    checks = []
    for name, law in (("frechet", Frechet(1.0)), ("gumbel", Gumbel())):
        reps = verify_limit_props(law, [100, 1000, 10000])
        last = [r for r in reps if r.t_or_n == 10000]
        checks.append((f"{name} n=1e4", _sup(last), 1e-2))
        checks.append((f"{name} monotone", all(r.extra["monotone"] for r in reps)))
    record(8, "free and Boolean prelimits", checks, time.perf_counter() - start, 1.0)


def test_criterion_09_property_suite(record):
    start = time.perf_counter()
    x = np.geomspace(1e-2, 1e2, 1000)
    f, g = Frechet(1.0).to_cdf(), Dagum(2.0).to_cdf()
    e_lambda = np.max(np.abs(lambda_vee(max_convolve("classical", f, g))(x)
                             - max_convolve("free", lambda_vee(f), lambda_vee(g))(x)))
    e_x = np.max(np.abs(x_vee(max_convolve("boolean", f, g))(x) - max_convolve("classical", x_vee(f), x_vee(g))(x)))
    e_semi = max(np.max(np.abs(b_t_vee(b_t_vee(g, s), t)(x) - b_t_vee(g, s + t)(x)))
                 for s in (0.5, 1.0) for t in (0.5, 1.0))
    e_b1 = max(np.max(np.abs(b_t_vee(h, 1.0)(x) - lambda_vee(x_vee(h))(x))) for h in (f, g))
    # value level, so the exact cancellation of the pair is not what is measured
    y = np.linspace(0.0, 1.0, 1000)
    e_pi = np.max(np.abs(lambda_vee_value(pi_vee_value(y)) - y))
    e_pi_cdf = np.max(np.abs(lambda_vee(pi_vee(Uniform01()))(y) - y))
    record(9, "max-convolution identities",
           [("lambda hom", e_lambda, 1e-12), ("x hom", e_x, 1e-12), ("B semigroup", e_semi, 1e-12),
            ("B1=lambda.x", e_b1, 1e-12), ("lambda.pi", max(e_pi, e_pi_cdf), 1e-12)],
           time.perf_counter() - start, 1.0)


def test_criterion_10_monte_carlo(record):
    start = time.perf_counter()
    ks_w = ks_distance(sample_wishart_spectrum(1024, seed=2024), PI)
    ks = {n: mean_ks(sample_batch("ginibre-product", 256, n, seed=7, repetitions=8), Uniform01()) for n in (2, 8, 32)}
    record(10, "random matrix spectra",
           [("wishart KS", ks_w, 0.03), ("trend 2>8>32", ks[2] > ks[8] > ks[32]), ("ginibre KS n=32", ks[32], 0.1)],
           time.perf_counter() - start, 120.0)


def test_criterion_11_free_power_density(record):
    start = time.perf_counter()
    checks = []
    for t in (1.5, 2.0, 4.0):
        g = free_add_power(PI, t)
        ref = MarchenkoPastur(t)
        lo, hi = ref.continuous_support()
        # arcsine substitution smooths the square-root edges
        theta = np.linspace(0.0, np.pi, 200_001)
        v = lo + 0.5 * (hi - lo) * (1.0 - np.cos(theta))
        jac = 0.5 * (hi - lo) * np.sin(theta)
        l1 = float(np.trapezoid(np.abs(g.pdf(v) - ref.pdf(v)) * jac, theta))
        checks.append((f"L1 t={t:g}", l1, 1e-3))
    record(11, "free additive power density", checks, time.perf_counter() - start, 10.0)
