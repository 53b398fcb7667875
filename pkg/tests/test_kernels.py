import numpy as np
import pytest

from hamcone import BuiltinK1, BuiltinK2, CustomKernel, Expression, Grid, k1_constants, k2_constants
from hamcone.constants import compute_gamma_lower, compute_gamma_star, estimate_c
from hamcone.kernels import DIAGONAL, Kink, OutOfDomain, ParameterError, eval_kernel, parse_kinks, vertical

import oracles

ONE = Expression.parse("1", ["s"])
FINE = np.linspace(0.0, 1.0, 513)


def test_k1_point_values():
    assert eval_kernel(BuiltinK1(), 0.0, 0.0) == 2.0
    assert eval_kernel(BuiltinK1(), 0.3, 0.7) == pytest.approx(1.3)
    assert eval_kernel(BuiltinK1(), 0.7, 0.3) == pytest.approx(1.3)


def test_k2_point_values():
    k = BuiltinK2(0.25, 0.5)
    assert eval_kernel(k, 0.0, 0.0) == pytest.approx(7 / 6, abs=1e-15)
    assert eval_kernel(k, 0.0, 1.0) == 0.0


def test_k2_satisfies_nonlocal_condition():
    # u(1) = xi u(eta) holds for k(., s) with s fixed
    k = BuiltinK2(0.3, 0.6)
    for s in np.linspace(0, 1, 21):
        assert k(1.0, s) == pytest.approx(0.3 * k(0.6, s), abs=1e-14)


def test_matches_handwritten_oracle():
    k = BuiltinK2(0.25, 0.5)
    T, S = np.meshgrid(FINE[::8], FINE[::8], indexing="ij")
    want = np.vectorize(oracles.k2)(T, S)
    assert np.allclose(k.evaluate(T, S), want, atol=1e-15)
    assert np.allclose(BuiltinK1().evaluate(T, S), np.vectorize(oracles.k1)(T, S), atol=1e-15)


@pytest.mark.parametrize("xi, eta", [(0.0, 0.5), (1.0, 0.5), (0.5, 0.0), (0.5, 1.0), (-0.1, 0.2)])
def test_k2_parameter_domain(xi, eta):
    with pytest.raises(ParameterError):
        BuiltinK2(xi, eta)
    with pytest.raises(ParameterError):
        k2_constants(xi, eta)


def test_out_of_domain():
    with pytest.raises(OutOfDomain):
        BuiltinK1()(1.5, 0.0)


def test_kinks_declared():
    assert BuiltinK1().kinks == (DIAGONAL,)
    assert BuiltinK2(0.25, 0.5).kinks == (DIAGONAL, vertical(0.5))
    assert BuiltinK2(0.25, 0.5).breakpoints(0.3, 0.0, 1.0) == [0.3, 0.5]
    assert parse_kinks(["diagonal", "vertical:0.25"]) == (DIAGONAL, Kink("vertical", 0.25))
    with pytest.raises(ValueError):
        Kink.from_text("horizontal:0.3")


def test_diagonal_tie_uses_lower_branch():
    k = BuiltinK2(0.25, 0.5)
    t = 0.3
    assert k(t, t) == pytest.approx((1 - t) / 0.75 - (1 / 3) * (0.5 - t))


@pytest.mark.parametrize("k", [BuiltinK1(), BuiltinK2(0.25, 0.5), BuiltinK2(0.8, 0.3)], ids=str)
def test_continuous_across_kinks(k):
    eps = 1e-13
    for t in FINE[::16]:
        for p in k.breakpoints(t, 0.0, 1.0):
            left, right = k(t, p - eps), k(t, p + eps)
            assert abs(left - right) < 1e-12
        # diagonal crossed in t as well
        if 0 < t < 1:
            assert abs(k(t - eps, t) - k(t + eps, t)) < 1e-12


def test_nonnegative_on_fine_grid():
    T, S = np.meshgrid(FINE, FINE, indexing="ij")
    assert BuiltinK1().evaluate(T, S).min() >= 0
    for xi in np.arange(1, 10) / 10:
        for eta in np.arange(1, 10) / 10:
            assert BuiltinK2(xi, eta).evaluate(T, S).min() >= -1e-15


@pytest.mark.parametrize("xi, eta", [(0.25, 0.5), (0.1, 0.9), (0.9, 0.1), (0.5, 0.5), (0.7, 0.8)])
def test_envelope(xi, eta):
    kc = k2_constants(xi, eta)
    k = BuiltinK2(xi, eta)
    T, S = np.meshgrid(FINE, FINE, indexing="ij")
    phi = kc.phi2.evaluate_array(s=FINE)
    assert np.all(k.evaluate(T, S) <= phi[None, :] + 1e-12)
    tsub = np.linspace(0, kc.b2, 257)
    assert np.all(kc.c2 * phi[None, :] <= k.evaluate(tsub[:, None], FINE[None, :]) + 1e-12)


def test_k1_constants():
    kc = k1_constants()
    assert (kc.gamma1_star, kc.gamma1_lower, kc.c1, kc.interval) == (1.5, 1.0, 0.5, (0.0, 1.0))
    assert kc.phi1(s=0.25) == 1.75


def test_k2_constants_example():
    kc = k2_constants(0.25, 0.5)
    assert kc.b2 == pytest.approx(4 / 7, abs=1e-15)
    assert kc.gamma2_star == pytest.approx(5 / 8, abs=1e-15)
    assert kc.c2 == pytest.approx(25 / 49, abs=1e-15)
    assert kc.gamma2_lower == pytest.approx(19 / 56, abs=1e-15)
    assert kc.case == "1+xi*eta>2*eta"
    assert kc.interval == (0.0, kc.b2)


def test_k2_other_case():
    assert k2_constants(0.5, 0.9).case == "1+xi*eta<=2*eta"


@pytest.mark.parametrize("xi, eta", [(0.25, 0.5), (0.5, 0.9), (0.9, 0.2)])
def test_phi2_vanishes_at_one(xi, eta):
    assert k2_constants(xi, eta).phi2(s=1.0) == 0.0


def _random_params(count, seed):
    rng = np.random.default_rng(seed)
    return [tuple(x) for x in rng.uniform(0.02, 0.98, size=(count, 2))]


@pytest.mark.parametrize("xi, eta", _random_params(25, 2024))
def test_closed_forms_against_quadrature_search(xi, eta):
    kc = k2_constants(xi, eta)
    assert 0 < kc.b2 < 1 and 0 < kc.c2 < 1 and kc.gamma2_lower <= kc.gamma2_star
    k = BuiltinK2(xi, eta)
    grid = Grid(0.0, 1.0, 257)
    assert compute_gamma_star(k, ONE, grid).value == pytest.approx(kc.gamma2_star, abs=1e-8)
    assert compute_gamma_lower(k, ONE, kc.interval, grid).value == pytest.approx(kc.gamma2_lower, abs=1e-8)
    assert estimate_c(k, kc.phi2, kc.interval, grid) == pytest.approx(kc.c2, abs=1e-6)


@pytest.mark.parametrize("xi, eta", _random_params(4, 99))
def test_closed_forms_against_adaptive_quad(xi, eta):
    kc = k2_constants(xi, eta)
    k = lambda t, s: oracles.k2(t, s, xi, eta)
    top, _ = oracles.extremum(k, 0.0, 1.0, np.argmax, n=201, points=(eta,))
    assert top == pytest.approx(kc.gamma2_star, abs=1e-10)
    low, _ = oracles.extremum(k, 0.0, kc.b2, np.argmin, n=201, points=(eta,))
    assert low == pytest.approx(kc.gamma2_lower, abs=1e-10)


def test_custom_kernel():
    k = CustomKernel(Expression.parse("min(t, s)", ["t", "s"]), (DIAGONAL,))
    assert k(0.3, 0.6) == 0.3
    assert k.breakpoints(0.3, 0, 1) == [0.3]
    with pytest.raises(ParameterError):
        CustomKernel(Expression.parse("u1", ["u1"]))
    with pytest.raises(ParameterError):
        CustomKernel(Expression.parse("t", ["t", "s"]), (vertical(2.0),))
