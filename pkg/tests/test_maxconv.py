import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freemax import (
    Dagum,
    Exponential,
    Frechet,
    MarchenkoPastur,
    MaxPowerSpec,
    Pareto,
    TwoPoint,
    Uniform01,
    b_t_vee,
    boolean_max_pow,
    classical_max_pow,
    free_max_pow,
    lambda_vee,
    max_convolve,
    pi_vee,
    x_vee,
    x_vee_inv,
)
from freemax.errors import ContractError
from freemax.maxconv import lambda_vee_value, pi_vee_value, x_vee_inv_value, x_vee_value

X = np.geomspace(1e-3, 1e3, 1000)
U = Uniform01().to_cdf()


def test_max_powers_on_a_half_value():
    assert classical_max_pow(U, 2)(0.5) == pytest.approx(0.25)
    assert boolean_max_pow(U, 2)(0.5) == pytest.approx(1 / 3)
    assert free_max_pow(U, 2)(0.75) == pytest.approx(0.5)


@pytest.mark.parametrize("op", [classical_max_pow, free_max_pow, boolean_max_pow])
def test_unit_power_is_identity(op):
    f = Frechet(1.0).to_cdf()
    assert np.array_equal(op(f, 1.0)(X), f(X))


def test_frechet_is_classical_max_stable():
    f = Frechet(1.0)
    g = classical_max_pow(f, 3.0)
    assert np.allclose(g(X), np.exp(-3 / X), rtol=1e-14)
    assert np.allclose(g(3 * X), f.cdf(X), rtol=1e-14)


def test_free_max_power_atom_at_zero():
    g = free_max_pow(TwoPoint(0.8, 2.0), 2.0)
    assert g.atom_zero == pytest.approx(0.6)
    assert free_max_pow(TwoPoint(0.3, 2.0), 2.0).atom_zero == 0.0


def test_dagum_boolean_max_power():
    g = boolean_max_pow(Dagum(1.0), 2.0)
    assert g(1.0) == pytest.approx(1 / 3)
    # F/(2 - F) for F = x/(1+x) is x/(2+x): Dagum dilated by 2
    assert np.allclose(g(X), Dagum(1.0).cdf(X / 2), rtol=1e-13)


def test_power_contracts():
    with pytest.raises(ContractError):
        classical_max_pow(U, 0.0)
    with pytest.raises(ContractError):
        free_max_pow(U, 0.5)
    with pytest.raises(ContractError):
        boolean_max_pow(U, -1.0)
    with pytest.raises(ContractError):
        MaxPowerSpec("free", 0.7)
    with pytest.raises(ContractError):
        MaxPowerSpec("tropical", 2.0)
    with pytest.raises(ContractError):
        b_t_vee(U, -0.5)


def test_boolean_max_rejects_signed_support():
    from freemax import Gumbel

    with pytest.raises(ContractError):
        boolean_max_pow(Gumbel(), 2.0)
    with pytest.raises(ContractError):
        max_convolve("boolean", Gumbel(), U)


def test_value_map_boundaries():
    assert lambda_vee_value(np.exp(-1.0)) == 0.0
    assert lambda_vee_value(1.0) == 1.0
    assert lambda_vee_value(0.0) == 0.0
    assert pi_vee_value(1.0) == 1.0
    assert pi_vee_value(0.0) == pytest.approx(np.exp(-1.0))
    for h in (x_vee_value, x_vee_inv_value):
        assert h(0.0) == 0.0 and h(1.0) == 1.0


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.5])
def test_lambda_vee_sends_frechet_to_pareto(alpha):
    assert np.allclose(lambda_vee(Frechet(alpha))(X), Pareto(alpha).cdf(X), atol=1e-14)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.5])
def test_x_vee_sends_dagum_to_frechet(alpha):
    assert np.allclose(x_vee(Dagum(alpha))(X), Frechet(alpha).cdf(X), atol=1e-14)


def test_pi_vee_of_uniform():
    g = pi_vee(U)
    x = np.linspace(0.0, 1.0, 101)
    assert g.atom_zero == pytest.approx(np.exp(-1.0))
    assert np.allclose(g(x), np.exp(-(1 - x)), atol=1e-15)
    assert g(-0.1) == 0.0


@pytest.mark.parametrize("law", [Frechet(1.0), Exponential(), MarchenkoPastur(1.0), Dagum(0.7)])
def test_x_vee_round_trip(law):
    f = law.to_cdf()
    assert np.max(np.abs(x_vee_inv(x_vee(f))(X) - f(X))) < 1e-14


@pytest.mark.parametrize("law", [Frechet(1.0), Exponential(), Uniform01(), Dagum(2.0)])
def test_lambda_of_pi_is_identity(law):
    f = law.to_cdf()
    assert np.max(np.abs(lambda_vee(pi_vee(f))(X) - f(X))) < 1e-12


def test_b_one_is_lambda_after_x_vee():
    for law in (Dagum(1.0), Frechet(2.0), MarchenkoPastur(1.0)):
        lhs = b_t_vee(law, 1.0)(X)
        rhs = lambda_vee(x_vee(law))(X)
        assert np.max(np.abs(lhs - rhs)) < 1e-14
    assert np.allclose(b_t_vee(Dagum(1.0), 1.0)(X), Pareto(1.0).cdf(X), atol=1e-14)


@pytest.mark.parametrize("s, t", [(0.5, 0.5), (0.5, 1.0), (1.0, 1.0)])
def test_b_vee_semigroup(s, t):
    f = Dagum(1.3)
    lhs = b_t_vee(b_t_vee(f, s), t)(X)
    assert np.max(np.abs(lhs - b_t_vee(f, s + t)(X))) < 1e-12
    assert np.array_equal(b_t_vee(f, 0.0)(X), f.cdf(X))


def _random_cdf(draw_scale, draw_shape):
    return Frechet(draw_shape).to_cdf() if draw_scale < 0.5 else Dagum(draw_shape).to_cdf()


@settings(max_examples=40, deadline=None)
@given(a=st.floats(0.2, 4.0), b=st.floats(0.2, 4.0), c=st.floats(0.3, 3.0))
def test_lambda_vee_homomorphism(a, b, c):
    f = Frechet(a).to_cdf()
    g = Dagum(b).to_cdf()
    x = X * c
    lhs = lambda_vee(max_convolve("classical", f, g))(x)
    rhs = max_convolve("free", lambda_vee(f), lambda_vee(g))(x)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(a=st.floats(0.2, 4.0), b=st.floats(0.2, 4.0))
def test_x_vee_homomorphism(a, b):
    f = Dagum(a).to_cdf()
    g = Exponential().to_cdf() if a > 2 else Frechet(b).to_cdf()
    lhs = x_vee(max_convolve("boolean", f, g))(X)
    rhs = max_convolve("classical", x_vee(f), x_vee(g))(X)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(kind=st.sampled_from(["classical", "free", "boolean"]), s=st.floats(1.0, 4.0), t=st.floats(1.0, 4.0))
def test_power_composition(kind, s, t):
    f = Frechet(1.0).to_cdf()
    spec = MaxPowerSpec
    lhs = spec(kind, t).apply(spec(kind, s).apply(f))(X)
    rhs = spec(kind, s * t).apply(f)(X)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(kind=st.sampled_from(["classical", "free", "boolean"]), t=st.floats(1.0, 20.0))
def test_outputs_are_distribution_functions(kind, t):
    for law in (Frechet(1.0), MarchenkoPastur(1.0), TwoPoint(0.4, 1.5)):
        v = MaxPowerSpec(kind, t).apply(law)(np.concatenate([[0.0], X, [1e12]]))
        assert np.all(np.diff(v) >= -1e-15)
        assert v[-1] == pytest.approx(1.0) and np.all((v >= 0) & (v <= 1))


def test_quantiles_pull_levels_back():
    g = free_max_pow(U, 2.0)
    p = np.array([0.1, 0.5, 0.9])
    assert np.allclose(g.quantile(p), (p + 1) / 2)
    h = classical_max_pow(Frechet(1.0), 3.0)
    assert np.allclose(h(h.quantile(p)), p, rtol=1e-12)
    assert lambda_vee(Frechet(1.0)).support_hint[0] == pytest.approx(1.0)


def test_value_maps_round_trip_without_cancellation():
    y = np.linspace(0.0, 1.0, 1001)
    assert np.max(np.abs(lambda_vee_value(pi_vee_value(y)) - y)) < 1e-12
    # exp(1 - 1/y) stays representable for y above roughly 1/700
    y = np.linspace(0.01, 1.0, 1000)
    assert np.max(np.abs(x_vee_inv_value(x_vee_value(y)) - y)) < 1e-14


def test_inverse_pairs_cancel_exactly():
    f = Exponential().to_cdf()
    assert x_vee_inv(x_vee(f)) is f
    assert lambda_vee(pi_vee(f)) is f
    # the other order is not the identity for F below 1/e
    assert lambda_vee(x_vee(f)) is not f
