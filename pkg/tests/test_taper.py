import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fibertaper import taper as tp
from fibertaper.errors import DegenerateFit, ValidationError
from fibertaper.specfun import DomainError
from fibertaper.taper import TaperProfile
from oracles import trapezoid

UM, MM = 1e-6, 1e-3
PROFILE = TaperProfile(62.5 * UM, 3.05 * MM, 35 * MM)

profiles = st.builds(
    TaperProfile,
    r0=st.floats(5 * UM, 200 * UM),
    h=st.floats(0.5 * MM, 15 * MM),
    L=st.floats(0.0, 60 * MM),
)


def quadrature_volume(p: TaperProfile, n: int = 2_000_001) -> float:
    return trapezoid(lambda z: math.pi * tp.radius_at(p, z) ** 2, 0.0, p.length, n)


# --- radius_at / waist -----------------------------------------------------------------

def test_radius_at_start():
    assert tp.radius_at(PROFILE, 0.0) == pytest.approx(62.5 * UM, rel=1e-15)


def test_radius_at_half_length():
    expected = 62.5 * UM * math.exp(-35 / 6.1)
    assert tp.radius_at(PROFILE, PROFILE.L / 2) == pytest.approx(expected, rel=1e-14)
    assert tp.radius_at(PROFILE, PROFILE.L / 2) == pytest.approx(0.201 * UM, abs=0.001 * UM)


def test_waist_region_flat():
    assert tp.radius_at(PROFILE, PROFILE.length / 2) == tp.radius_at(PROFILE, PROFILE.L / 2)


def test_radius_domain():
    for z in (-1e-9, PROFILE.length + 1e-6, math.nan):
        with pytest.raises(DomainError):
            tp.radius_at(PROFILE, z)


def test_radius_vectorised():
    z = np.linspace(0, PROFILE.length, 11)
    r = tp.radius_at(PROFILE, z)
    assert r.shape == z.shape
    assert np.allclose(r, r[::-1], rtol=1e-12)


def test_waist_examples():
    assert tp.waist(TaperProfile(62.5 * UM, 7 * MM, 0.0)) == 62.5 * UM
    w = tp.waist(TaperProfile(62.5 * UM, 7 * MM, 35 * MM))
    assert w == pytest.approx(62.5 * UM * math.exp(-2.5), rel=1e-14)
    assert w == pytest.approx(5.13 * UM, abs=0.01 * UM)


def test_doubling_L_halves_log_ratio():
    a = tp.waist(TaperProfile(62.5 * UM, 7 * MM, 10 * MM))
    b = tp.waist(TaperProfile(62.5 * UM, 7 * MM, 20 * MM))
    assert math.log(b / (62.5 * UM)) == pytest.approx(2 * math.log(a / (62.5 * UM)), rel=1e-14)


def test_lengthening_inverse():
    L = np.linspace(0, 40 * MM, 9)
    w = tp.waist_at(62.5 * UM, 3.05 * MM, L)
    assert np.allclose(tp.lengthening_for_waist(62.5 * UM, 3.05 * MM, w), L, atol=1e-15)


def test_lengthening_from_time():
    assert tp.lengthening_from_time(100.0) == pytest.approx(8 * MM)


@pytest.mark.parametrize("kwargs", [
    {"r0": 0.0, "h": 1e-3}, {"r0": 1e-6, "h": -1.0}, {"r0": 1e-6, "h": 1e-3, "L": -1e-3}])
def test_invalid_profile(kwargs):
    with pytest.raises(ValidationError):
        TaperProfile(**kwargs)


# --- volume --------------------------------------------------------------------------

def test_volume_untapered():
    p = TaperProfile(62.5 * UM, 7 * MM, 0.0)
    assert tp.total_volume(p) == pytest.approx(math.pi * p.r0**2 * p.h, rel=1e-15)


def test_volume_after_pull():
    p = TaperProfile(40 * UM, 5 * MM, 35 * MM)
    assert tp.total_volume(p) == pytest.approx(math.pi * p.r0**2 * p.h, rel=1e-12)


def test_volume_quadrature_oracle():
    assert quadrature_volume(PROFILE) == pytest.approx(tp.total_volume(PROFILE), rel=1e-9)


# --- fit_exponential ---------------------------------------------------------------------

def synthetic(r0, h, n=30, L_max=35 * MM):
    L = np.linspace(0, L_max, n)
    return L, tp.waist_at(r0, h, L)


def test_fit_noiseless():
    L, w = synthetic(62.5 * UM, 7 * MM)
    r0, h, rms = tp.fit_exponential(list(zip(L, w)))
    assert r0 == pytest.approx(62.5 * UM, rel=1e-10)
    assert h == pytest.approx(7 * MM, rel=1e-10)
    assert rms < 1e-12


def test_fit_two_points_exact():
    r0, h, rms = tp.fit_exponential([(0.0, 62.5 * UM), (20 * MM, tp.waist_at(62.5 * UM, 7 * MM, 20 * MM))])
    assert h == pytest.approx(7 * MM, rel=1e-12)
    assert rms < 16 * np.finfo(float).eps * 10  # rounding of ln w ~ -10


def test_fit_monte_carlo_noise():
    L, w = synthetic(62.5 * UM, 7 * MM)
    ok = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        noisy = w * (1 + 0.02 * rng.standard_normal(w.size))
        _, h, _ = tp.fit_exponential(np.column_stack([L, noisy]))
        ok += abs(h / (7 * MM) - 1) < 0.05
    assert ok >= 95


def test_fit_degenerate():
    with pytest.raises(DegenerateFit):
        tp.fit_exponential([(1 * MM, 10 * UM), (1 * MM, 9 * UM), (1 * MM, 8 * UM)])
    with pytest.raises(DegenerateFit):
        tp.fit_exponential([(0.0, 10 * UM), (1 * MM, 11 * UM)])


def test_fit_invalid():
    with pytest.raises(ValidationError):
        tp.fit_exponential([(0.0, 10 * UM)])
    with pytest.raises(ValidationError):
        tp.fit_exponential([(0.0, 10 * UM), (1 * MM, -1.0)])


# --- invariants ----------------------------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(p=profiles)
def test_volume_conserved(p):
    assert tp.total_volume(p) == pytest.approx(math.pi * p.r0**2 * p.h, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(p=profiles)
def test_continuity_and_symmetry(p):
    eps = 1e-9
    mid = p.L / 2
    if mid > eps:
        left, right = tp.radius_at(p, mid - eps), tp.radius_at(p, mid + eps)
        assert left == pytest.approx(right, rel=2 * eps / p.h + 1e-12)
    c = p.length / 2
    for d in (eps, 0.3 * c, 0.9 * c):
        assert tp.radius_at(p, c - d) == pytest.approx(tp.radius_at(p, c + d), rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(p=profiles)
def test_waist_is_midpoint_radius(p):
    assert tp.waist(p) == tp.radius_at(p, p.L / 2)
    assert tp.waist(p) <= p.r0


@settings(max_examples=100, deadline=None)
@given(r0=st.floats(5 * UM, 200 * UM), h=st.floats(1 * MM, 15 * MM), n=st.integers(2, 40))
def test_fit_round_trip(r0, h, n):
    L, w = synthetic(r0, h, n=n, L_max=4 * h)
    r0_fit, h_fit, _ = tp.fit_exponential(np.column_stack([L, w]))
    assert r0_fit == pytest.approx(r0, rel=1e-10)
    assert h_fit == pytest.approx(h, rel=1e-10)
