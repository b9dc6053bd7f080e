import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fibertaper import specfun as sf
from oracles import j0_first_zero, j_series, k_ref

ORDERS = range(sf.MAX_ORDER + 1)


def i_prime(n, x):
    below = sf.bessel_i(1, x) if n == 0 else sf.bessel_i(n - 1, x)
    return 0.5 * (below + sf.bessel_i(n + 1, x))


def wronskian_residual(n, x):
    w = sf.bessel_i(n, x) * sf.bessel_k_prime(n, x) - i_prime(n, x) * sf.bessel_k(n, x)
    return abs(w + 1.0 / x)


# --- examples ------------------------------------------------------------------

def test_j0_at_zero_is_one():
    assert sf.bessel_j(0, 0.0) == 1.0


def test_j1_at_zero_vanishes():
    assert sf.bessel_j(1, 0.0) == 0.0


def test_j0_first_zero_from_series_oracle():
    root = j0_first_zero()
    assert root == pytest.approx(2.404825557695773, abs=1e-14)
    assert abs(sf.bessel_j(0, root)) < 1e-15


def test_k0_at_one():
    assert sf.bessel_k(0, 1.0) == pytest.approx(k_ref(0, 1.0), rel=1e-12)
    assert sf.bessel_k(0, 1.0) == pytest.approx(0.4210244382, abs=1e-10)


def test_k1_small_argument_limit():
    x = 1e-5
    assert sf.bessel_k(1, x) * x == pytest.approx(1.0, rel=1e-4)


@pytest.mark.parametrize("x", [0.5, 1.0, 5.0])
@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_wronskian_examples(n, x):
    assert wronskian_residual(n, x) < 1e-10


def test_j0_prime_at_zero():
    assert sf.bessel_j_prime(0, 0.0) == 0.0


def test_j0_prime_is_minus_j1():
    assert sf.bessel_j_prime(0, 2.0) == pytest.approx(-sf.bessel_j(1, 2.0), abs=1e-12)


def test_k0_prime_at_one():
    assert sf.bessel_k_prime(0, 1.0) == pytest.approx(-k_ref(1, 1.0), rel=1e-12)
    assert sf.bessel_k_prime(0, 1.0) == pytest.approx(-0.6019072302, abs=1e-10)


# --- accuracy against the arbitrary-precision oracle ---------------------------

J_POINTS = [1e-6, 1e-3, 0.1, 0.5, 1.0, 2.0, 3.7, 5.0, 7.3, 10.0, 15.5, 20.0, 27.0, 33.3, 41.0, 50.0]


@pytest.mark.parametrize("n", ORDERS)
def test_bessel_j_matches_power_series(n):
    for x in J_POINTS:
        ref = float(j_series(n, x))
        got = sf.bessel_j(n, x)
        if abs(ref) >= 1e-3:
            assert got == pytest.approx(ref, rel=1e-12), (n, x)
        else:
            assert abs(got - ref) < 1e-14, (n, x)


@pytest.mark.parametrize("n", ORDERS)
def test_bessel_k_matches_mpmath(n):
    for x in np.geomspace(1e-6, 50.0, 41):
        assert sf.bessel_k(n, x) == pytest.approx(k_ref(n, x), rel=1e-12), (n, x)


@pytest.mark.parametrize("n", ORDERS)
def test_bessel_i_matches_mpmath(n):
    for x in np.geomspace(1e-3, 30.0, 25):
        assert sf.bessel_i(n, x) == pytest.approx(float(mp.besseli(n, x)), rel=1e-12)


@pytest.mark.parametrize("n", range(sf.MAX_ORDER))
def test_derivatives_match_mpmath(n):
    for x in [0.3, 1.0, 4.2, 11.0, 25.0]:
        assert sf.bessel_j_prime(n, x) == pytest.approx(
            float(mp.besselj(n, x, derivative=1)), rel=1e-11, abs=1e-14)
        assert sf.bessel_k_prime(n, x) == pytest.approx(
            float(mp.diff(lambda t: mp.besselk(n, t), x)), rel=1e-11)


# --- errors --------------------------------------------------------------------

@pytest.mark.parametrize("x", [-1.0, math.inf, math.nan])
def test_j_rejects_bad_argument(x):
    with pytest.raises(sf.DomainError):
        sf.bessel_j(0, x)


@pytest.mark.parametrize("x", [0.0, -2.0, math.nan])
def test_k_rejects_nonpositive(x):
    with pytest.raises(sf.DomainError):
        sf.bessel_k(1, x)


@pytest.mark.parametrize("n", [-1, 5, 2.5])
def test_unsupported_order(n):
    with pytest.raises(sf.DomainError):
        sf.bessel_j(n, 1.0)


def test_self_test_table_residuals_small():
    for label, _, _, resid in sf.self_test_table():
        assert resid < 1e-12, label


# --- invariants ----------------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(n=st.sampled_from([1, 2, 3]), x=st.floats(0.1, 30.0))
def test_recurrence(n, x):
    jm, j0, jp = sf.bessel_j(n - 1, x), sf.bessel_j(n, x), sf.bessel_j(n + 1, x)
    scale = max(abs(jm), abs(j0), abs(jp), abs(2 * n / x * j0))
    assert abs(jp - (2 * n / x * j0 - jm)) < 1e-10 * scale


@settings(max_examples=200, deadline=None)
@given(n=st.sampled_from(list(ORDERS)), x=st.floats(1e-6, 49.0), dx=st.floats(1e-3, 1.0))
def test_k_positive_and_decreasing(n, x, dx):
    a, b = sf.bessel_k(n, x), sf.bessel_k(n, x + dx)
    assert a > 0 and b > 0
    assert b < a


@settings(max_examples=300, deadline=None)
@given(n=st.sampled_from(list(ORDERS)), x=st.floats(0.0, 200.0))
def test_j_bounded_by_one(n, x):
    assert abs(sf.bessel_j(n, x)) <= 1.0


def test_wronskian_random_points():
    rng = np.random.default_rng(7)
    for x in rng.uniform(0.01, 30.0, 20):
        for n in range(sf.MAX_ORDER):
            assert wronskian_residual(n, x) < 1e-10 * max(1.0, 1.0 / x), (n, x)
