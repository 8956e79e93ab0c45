import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freemax import (
    BooleanStablePos,
    ClassicalStablePos,
    Dagum,
    Dirac,
    Frechet,
    FreeStablePos,
    Gumbel,
    MarchenkoPastur,
    Pareto,
    Poisson,
    TwoPoint,
    Uniform01,
    chi_inverse_catalog,
    dilate,
    free_mult_power_s,
    grid_from_law,
    moments_ab,
    phi,
    psi_op,
    s_transform,
    stable_s_transforms,
    verify_diagram_poisson,
    verify_free_regular_formula,
    verify_limit_props,
    verify_mult_identity,
    verify_thm_bn,
    verify_thm_boolean,
    verify_thm_classical,
    verify_thm_free,
)
from freemax.errors import ContractError, UnsupportedLawError
from freemax.export import write_json
from freemax.phi_psi import ENDPOINT_DELTA, belinschi_nica_s, compare

SIGMA = TwoPoint(0.5, 2.0)
PI = MarchenkoPastur(1.0)
X = np.linspace(0.01, 0.99, 99)


def test_phi_of_marchenko_pastur_is_uniform():
    res = phi(PI)
    assert res.method == "closed-form"
    assert res.cdf(0.3) == pytest.approx(0.3, abs=1e-6)
    assert np.max(np.abs(res.cdf(X) - X)) < 1e-6
    assert res.support == (0.0, 1.0)


def test_phi_of_two_point():
    res = phi(SIGMA)
    assert res.atom_zero == 0.5
    assert np.max(np.abs(res.cdf(X) - 1 / (2 - X))) < 1e-8
    assert res.cdf(0.0) == 0.5 and res.cdf(1.0) == 1.0 and res.cdf(-1.0) == 0.0


def test_phi_of_stable_laws():
    x = np.geomspace(1.01, 1e3, 60)
    assert phi(FreeStablePos(0.5)).cdf(2.0) == pytest.approx(0.5, abs=1e-8)
    assert np.max(np.abs(phi(FreeStablePos(0.5)).cdf(x) - Pareto(1.0).cdf(x))) < 1e-8
    x = np.geomspace(1e-3, 1e3, 60)
    assert np.max(np.abs(phi(BooleanStablePos(0.5)).cdf(x) - Dagum(1.0).cdf(x))) < 1e-8


def test_stable_s_forms():
    z = np.linspace(-0.95, -0.05, 19)
    assert np.allclose(stable_s_transforms(0.5, "free").eval(z), -z, rtol=1e-14)
    assert np.allclose(stable_s_transforms(0.5, "boolean").eval(z), -z / (1 + z), rtol=1e-14)
    for alpha in (0.2, 0.5, 0.8):
        assert stable_s_transforms(alpha, "boolean").eval(-0.5) == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(ContractError):
        stable_s_transforms(0.5, "classical")
    with pytest.raises(ContractError):
        stable_s_transforms(1.5, "free")


@pytest.mark.parametrize("alpha", [0.3, 0.6])
def test_phi_of_stable_laws_other_indices(alpha):
    # index alpha/(1-alpha) for both families
    beta = alpha / (1 - alpha)
    x = np.geomspace(1.01, 1e2, 30)
    assert np.max(np.abs(phi(FreeStablePos(alpha)).cdf(x) - Pareto(beta).cdf(x))) < 1e-8
    x = np.geomspace(1e-2, 1e2, 30)
    assert np.max(np.abs(phi(BooleanStablePos(alpha)).cdf(x) - Dagum(beta).cdf(x))) < 1e-8


def test_phi_of_point_masses():
    res = phi(Dirac(3.0))
    assert res.support == (3.0, 3.0)
    assert res.cdf(2.9) == 0.0 and res.cdf(3.0) == 1.0
    assert phi(TwoPoint(0.0, 2.0)).support == (2.0, 2.0)


def test_phi_of_grid_sample_is_near_uniform():
    res = phi(grid_from_law(PI, 2048))
    assert res.method == "s-numeric"
    assert np.max(np.abs(res.cdf(X) - X)) < 1e-4


@pytest.mark.parametrize("law", [PI, SIGMA, MarchenkoPastur(0.5), MarchenkoPastur(3.0), FreeStablePos(0.5)])
def test_phi_preserves_atom_at_zero(law):
    assert phi(law).atom_zero == law.atom_zero


@settings(max_examples=20, deadline=None)
@given(c=st.floats(0.2, 5.0), frac=st.floats(0.02, 0.98), law=st.sampled_from([PI, SIGMA, MarchenkoPastur(2.5)]))
def test_phi_commutes_with_dilation(c, frac, law):
    a, b = moments_ab(law)
    x = a + frac * (b - a)
    lhs = phi(dilate(law, c)).cdf(c * x)
    assert lhs == pytest.approx(phi(law).cdf(x), abs=1e-8)


@pytest.mark.parametrize("law", [MarchenkoPastur(2.0), MarchenkoPastur(0.7), SIGMA])
def test_phi_support_contract(law):
    a, b = moments_ab(law)
    cdf = phi(law).cdf
    inside = a + (b - a) * np.linspace(0.001, 0.999, 400)
    assert np.all(np.diff(cdf(inside)) > 0)
    below = np.linspace(0.0, a, 20) if a > 0 else np.array([0.0])
    assert np.all(cdf(below) == law.atom_zero)
    assert np.all(cdf(np.linspace(b, 2 * b + 1, 20)) == 1.0)
    # value near the edges is pinned by the endpoint clamp
    assert cdf(b * (1 - ENDPOINT_DELTA / 2)) == pytest.approx(1.0, abs=1e-4)


def test_chi_inverse_catalog():
    tp = chi_inverse_catalog(Poisson(1.0))
    assert isinstance(tp, TwoPoint) and tp.p == pytest.approx(0.5) and tp.a == pytest.approx(2.0)
    tp = chi_inverse_catalog(Poisson(2.0))
    assert tp.p == pytest.approx(1 / 3, abs=1e-12) and tp.a == pytest.approx(3.0, abs=1e-12)
    assert chi_inverse_catalog(ClassicalStablePos(0.5)) == BooleanStablePos(0.5)
    with pytest.raises(UnsupportedLawError):
        chi_inverse_catalog(Frechet(1.0))


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0, 3.5])
def test_psi_of_poisson(lam):
    g = psi_op(Poisson(lam))
    x = np.linspace(0.01, lam - 0.01, 50)
    assert g.atom_zero == pytest.approx(np.exp(-lam), abs=1e-12)
    assert np.max(np.abs(g(x) - np.exp(x - lam))) < 1e-12
    assert g(lam) == 1.0 and g(lam + 1) == 1.0


def test_psi_of_classical_stable_is_frechet():
    x = np.geomspace(1e-2, 1e2, 40)
    assert np.max(np.abs(psi_op(ClassicalStablePos(0.5))(x) - Frechet(1.0).cdf(x))) < 1e-8


def _passed(reports):
    return all(r.passed for r in reports) and all(r.error is None for r in reports)


def test_free_identity_closed_paths():
    (rep,) = verify_thm_free(SIGMA, 2.0, paths=("closed",))
    assert rep.passed and rep.sup_norm < 1e-8
    (rep,) = verify_thm_free(PI, 2.0, paths=("closed",))
    assert rep.sup_norm < 1e-8
    assert np.allclose(rep.rhs, np.maximum(2 * rep.grid - 1, 0), atol=1e-8)


def test_free_identity_grid_path():
    reps = verify_thm_free(PI, 2.0)
    assert _passed(reps)
    assert {r.path for r in reps} == {"closed", "grid"}


@pytest.mark.parametrize("verify", [verify_thm_free, verify_thm_boolean, verify_thm_bn])
def test_unit_parameter_gives_identical_sides(verify):
    t = 0.0 if verify is verify_thm_bn else 1.0
    for rep in verify(SIGMA, t, paths=("closed",)):
        assert rep.sup_norm < 1e-12


def test_boolean_identity():
    reps = verify_thm_boolean(SIGMA, 2.0)
    assert _passed(reps)
    assert all(r.atom_lhs == pytest.approx(1 / 3, abs=1e-6) for r in reps)
    assert reps[0].atom_rhs == pytest.approx(1 / 3, abs=1e-12)
    (rep,) = verify_thm_boolean(PI, 3.0, paths=("closed",))
    assert np.allclose(rep.rhs, rep.grid / (3 - 2 * rep.grid), atol=1e-8)


def test_bn_identity():
    assert _passed(verify_thm_bn(SIGMA, 1.0))
    # stable pair through the closed S-forms
    s = belinschi_nica_s(stable_s_transforms(0.5, "boolean"), 1.0)
    x = np.geomspace(1.01, 1e3, 50)
    assert np.max(np.abs(phi(s).cdf(x) - Pareto(1.0).cdf(x))) < 1e-8
    (rep,) = verify_thm_bn(BooleanStablePos(0.5), 1.0, paths=("closed",))
    assert rep.sup_norm < 1e-8


@pytest.mark.parametrize("lam, t", [(1.0, 2.0), (0.5, 3.0), (2.0, 1.0)])
def test_classical_identity(lam, t):
    (rep,) = verify_thm_classical(lam, t)
    assert rep.passed and rep.sup_norm < 1e-10
    assert rep.atom_lhs == pytest.approx(np.exp(-lam * t), rel=1e-12)
    assert rep.atom_rhs == pytest.approx(np.exp(-lam) ** t, rel=1e-12)


def test_mult_identity():
    (rep,) = verify_mult_identity(PI, 2)
    assert rep.passed and rep.sup_norm < 1e-6
    inner = phi(free_mult_power_s(s_transform(PI), 2)).cdf
    assert np.max(np.abs(inner(X) - np.sqrt(X))) < 1e-6
    (rep,) = verify_mult_identity(FreeStablePos(0.5), 3)
    assert rep.passed
    (rep,) = verify_mult_identity(PI, 1)
    assert rep.sup_norm < 1e-14
    with pytest.raises(ContractError):
        verify_mult_identity(PI, 0)


def test_limit_props_frechet():
    reps = verify_limit_props(Frechet(1.0), [100, 1000, 10000])
    assert all(r.extra["monotone"] for r in reps)
    last = [r for r in reps if r.t_or_n == 10000]
    assert all(r.sup_norm < 1e-2 for r in last)
    boolean = [r for r in reps if r.theorem_id == "limits-boolean" and r.t_or_n == 10000][0]
    assert np.max(np.abs(boolean.rhs - Dagum(1.0).cdf(boolean.grid))) < 1e-12


def test_limit_props_gumbel():
    reps = verify_limit_props(Gumbel(), [100, 1000, 10000])
    assert all(r.extra["monotone"] for r in reps)
    assert all(r.sup_norm < 1e-2 for r in reps if r.t_or_n == 10000)


def test_limit_props_of_degenerate_one():
    from freemax.phi_psi import boolean_prelimit, free_prelimit

    one = np.ones(5)
    for k in (2, 50, 10000):
        assert np.array_equal(free_prelimit(one, k), one)
        assert np.allclose(boolean_prelimit(one, k), one, rtol=1e-15)


def test_free_regular_and_diagram():
    reps = verify_free_regular_formula()
    assert _passed(reps)
    # B_1(sigma) has Phi equal to U(0, 1)
    closed = [r for r in reps if r.path == "closed"][0]
    inner = closed.grid[(closed.grid > 0) & (closed.grid < 1)]
    assert np.allclose(closed.lhs[(closed.grid > 0) & (closed.grid < 1)], inner, atol=1e-8)
    assert _passed(verify_diagram_poisson())


def test_report_serialization(tmp_path):
    rep = compare("demo", 1.0, "closed", Uniform01().to_cdf(), Uniform01().to_cdf(), 1e-8, n=16)
    assert rep.passed and rep.sup_norm == 0.0
    path = tmp_path / "rep.csv"
    rep.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,lhs,rhs,abs_diff" and len(lines) == 17
    js = write_json(tmp_path / "rep.json", rep.summary())
    data = json.loads(js.read_text())
    assert set(data) >= {"theorem", "param", "sup_norm", "tolerance", "passed"}


def test_failures_are_annotated_not_raised():
    # an unbounded law has no grid path; the report records why
    reps = verify_thm_free(FreeStablePos(0.5), 2.0)
    grid = [r for r in reps if r.path == "grid"][0]
    assert not grid.passed and "UnsupportedLawError" in grid.error
    assert [r for r in reps if r.path == "closed"][0].passed


def test_passed_flag_tracks_tolerance():
    rep = compare("demo", 1.0, "closed", Uniform01().to_cdf(), MarchenkoPastur(1.0).to_cdf(), 1e-3, n=64)
    assert rep.passed == (rep.sup_norm <= rep.tolerance)
    assert not rep.passed
