import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thzris.quadrature import (
    GAUSS_WEIGHTS,
    KRONROD_WEIGHTS,
    NODES,
    NonConvergence,
    gk15,
    integrate_1d,
    integrate_2d,
    log_product,
    log_sum_exp,
)


def test_rule_exactness():
    # Kronrod 15 integrates degree 22 exactly, Gauss 7 degree 13
    for deg in range(23):
        exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
        assert np.dot(KRONROD_WEIGHTS, NODES ** deg) == pytest.approx(exact, abs=1e-14)
        if deg <= 13:
            assert np.dot(GAUSS_WEIGHTS, NODES ** deg) == pytest.approx(exact, abs=1e-14)


def test_linear():
    res = integrate_1d(lambda x: x, 0.0, 1.0, 1e-10)
    assert res.converged and abs(res.value - 0.5) <= 1e-10


def test_closed_form_decay():
    beta, rt = 0.2772, math.sqrt(140.0)
    exact = (1 - math.exp(-beta * rt) * (1 + beta * rt)) / beta ** 2
    res = integrate_1d(lambda r: np.exp(-beta * r) * r, 0.0, rt, 1e-10)
    assert res.converged
    assert abs(res.value - exact) <= max(res.error_estimate, 1e-12)
    assert res.value == pytest.approx(exact, rel=1e-12)


def test_empty_interval():
    res = integrate_1d(lambda x: 1 / x, 2.0, 2.0)
    assert res.value == 0.0 and res.converged and res.evaluations == 0


def test_bad_interval():
    with pytest.raises(ValueError):
        integrate_1d(lambda x: x, 1.0, 0.0)


def test_breakpoints_help_with_kinks():
    f = lambda x: np.abs(x - 0.3)
    exact = 0.5 * (0.3 ** 2 + 0.7 ** 2)
    with_bp = integrate_1d(f, 0.0, 1.0, 1e-12, breakpoints=(0.3,))
    assert with_bp.value == pytest.approx(exact, abs=1e-14)
    assert with_bp.evaluations == 30
    without = integrate_1d(f, 0.0, 1.0, 1e-12)
    assert without.value == pytest.approx(exact, abs=1e-12)
    assert without.evaluations > with_bp.evaluations


def test_budget_exhaustion():
    with pytest.raises(NonConvergence) as info:
        integrate_1d(lambda x: np.sin(1 / np.maximum(x, 1e-300)), 0.0, 1.0, 1e-14, max_evals=300)
    assert info.value.result is not None and not info.value.result.converged
    res = integrate_1d(lambda x: np.sin(1 / np.maximum(x, 1e-300)), 0.0, 1.0, 1e-14,
                       max_evals=300, raise_on_failure=False)
    assert not res.converged and res.evaluations <= 300


def test_relative_tolerance():
    res = integrate_1d(lambda x: 1e8 * np.exp(-x), 0.0, 5.0, 0.0, tol_rel=1e-10)
    assert res.value == pytest.approx(1e8 * (1 - math.exp(-5)), rel=1e-10)


def test_gk15_single_interval():
    val, err = gk15(lambda x: x ** 3, 0.0, 2.0)
    assert val == pytest.approx(4.0, rel=1e-15) and err < 1e-14


def test_2d_constant_and_zero():
    one = integrate_2d(lambda x, y: np.ones_like(y), (0.0, 1.0, 0.0, 1.0))
    assert one.value == pytest.approx(1.0, abs=1e-14)
    zero = integrate_2d(lambda x, y: np.zeros_like(y), (0.0, 1.0, 0.0, 1.0))
    assert zero.value == 0.0 and zero.error_estimate == 0.0


def test_2d_separable():
    res = integrate_2d(lambda x, y: math.exp(-x) * np.cos(y) ** 2, (0.0, 1.0, 0.0, math.pi), 1e-10)
    exact = (1 - math.exp(-1)) * (math.pi / 2)
    # product of two 1D oracles
    oracle = integrate_1d(lambda x: np.exp(-x), 0, 1, 1e-13).value * integrate_1d(
        lambda y: np.cos(y) ** 2, 0, math.pi, 1e-13).value
    assert res.converged
    assert res.value == pytest.approx(exact, abs=1e-10)
    assert res.value == pytest.approx(oracle, abs=1e-10)


def test_2d_inner_breakpoints():
    f = lambda x, y: np.abs(y - x)
    res = integrate_2d(f, (0.0, 1.0, 0.0, 1.0), 1e-10, inner_breakpoints=lambda x: (x,))
    assert res.value == pytest.approx(1 / 3, abs=1e-10)


def test_determinism():
    f = lambda x: np.exp(-3 * x) * np.sin(7 * x) ** 2
    a = integrate_1d(f, 0.0, 4.0, 1e-12)
    b = integrate_1d(f, 0.0, 4.0, 1e-12)
    assert a == b


def test_refinement_monotone():
    f = lambda x: 1 / (1 + 25 * x * x)
    errs = [integrate_1d(f, -1.0, 1.0, tol).error_estimate for tol in (1e-4, 1e-6, 1e-8, 1e-10, 1e-12)]
    assert all(b <= a for a, b in zip(errs, errs[1:]))


@settings(max_examples=40, deadline=None)
@given(alpha=st.floats(-5, 5), beta=st.floats(-5, 5), k=st.floats(0.1, 5.0))
def test_linearity(alpha, beta, k):
    tol = 1e-9
    f = lambda x: np.exp(-k * x)
    g = lambda x: np.cos(k * x)
    lhs = integrate_1d(lambda x: alpha * f(x) + beta * g(x), 0.0, 3.0, tol).value
    rhs = alpha * integrate_1d(f, 0.0, 3.0, tol).value + beta * integrate_1d(g, 0.0, 3.0, tol).value
    assert abs(lhs - rhs) <= 2 * tol * (1 + abs(alpha) + abs(beta))


def test_log_sum_exp():
    assert log_sum_exp([3.7]) == 3.7
    assert log_sum_exp([0.0, 0.0]) == pytest.approx(math.log(2), rel=1e-15)
    assert log_sum_exp([-1000.0, -1000.0]) == pytest.approx(-1000 + math.log(2), rel=1e-15)
    rng = np.random.default_rng(3)
    for _ in range(50):
        terms = rng.uniform(-690, 690, size=rng.integers(1, 6))
        direct = math.log(math.fsum(math.exp(t) for t in terms))
        assert log_sum_exp(terms) == pytest.approx(direct, rel=1e-12)


def test_log_product():
    assert log_product([math.log(2.0), math.log(3.0)]) == pytest.approx(math.log(6.0), rel=1e-15)
    assert log_product([-700.0, -700.0]) == -1400.0
