import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from boxfractal.numerics import (BudgetError, DomainError, RangeError, adaptive_quad, complex_erf,
                                 fit_loglog_slope, fsum_complex, neumaier_sum, theta3,
                                 theta3_modular_residual, theta3_modular_scale,
                                 theta3_series)

finite = dict(allow_nan=False, allow_infinity=False)


def mp_erf(z):
    return complex(mpmath.erf(mpmath.mpc(z.real, z.imag)))


def taylor_erf(x):
    terms = [(-1) ** n * x ** (2 * n + 1) / (math.factorial(n) * (2 * n + 1)) for n in range(60)]
    return 2 / math.sqrt(math.pi) * math.fsum(terms)


# --- erf ---------------------------------------------------------------

def test_erf_origin_and_one():
    assert complex_erf(0) == 0
    assert complex_erf(1.0) == pytest.approx(taylor_erf(1.0), abs=1e-15)
    assert complex_erf(1.0).real == pytest.approx(0.842700792949715, abs=1e-15)


def test_erf_odd():
    z = 0.3 + 0.7j
    assert complex_erf(-z) == pytest.approx(-complex_erf(z), abs=1e-16)


@given(st.floats(-10, 10, **finite), st.floats(-10, 10, **finite))
def test_erf_relative_accuracy_against_mpmath(re, im):
    z = complex(re, im)
    if abs(z) > 10 or abs(im) > 6:     # |erf| grows like exp(im^2); keep well inside range
        return
    ref = mp_erf(z)
    assert abs(complex_erf(z) - ref) <= 1e-13 * max(abs(ref), 1e-300) + 1e-300


@given(st.floats(-8, 8, **finite))
def test_erf_matches_real_erf(x):
    assert abs(complex_erf(x).real - math.erf(x)) <= 1e-13 * max(abs(math.erf(x)), 1e-300)
    assert complex_erf(x).imag == 0


def test_erf_overflow_is_range_error():
    with pytest.raises(RangeError):
        complex_erf(1.0 + 40j)


def test_erf_rejects_nonfinite():
    with pytest.raises(DomainError):
        complex_erf(complex(math.nan, 0))


# --- summation ---------------------------------------------------------

@given(st.lists(st.floats(-1e6, 1e6, **finite), min_size=1, max_size=200))
def test_reversal_changes_sum_below_1e12_relative(xs):
    a = np.array(xs)
    fwd = neumaier_sum(a)
    rev = neumaier_sum(a[::-1])
    assert abs(fwd - rev) <= 1e-12 * max(np.sum(np.abs(a)), 1e-300)


def test_neumaier_handles_cancellation():
    assert neumaier_sum(np.array([1.0, 1e100, 1.0, -1e100])) == 2.0
    assert fsum_complex([1e100 + 1j, 1.0, -1e100]) == 1 + 1j


def test_neumaier_axis_and_complex():
    a = np.arange(12.0).reshape(3, 4) * (1 + 1j)
    assert np.allclose(neumaier_sum(a, axis=0), a.sum(axis=0))
    assert np.allclose(neumaier_sum(a, axis=-1), a.sum(axis=-1))


# --- theta -------------------------------------------------------------

def mp_theta3(z, s):
    q = mpmath.exp(1j * mpmath.pi * mpmath.mpc(s.real, s.imag))
    return complex(mpmath.jtheta(3, mpmath.mpc(z.real, z.imag), q))


def test_theta_at_i():
    r = theta3_series(0, 1j)
    assert r.value == pytest.approx(1.0864348113, abs=1e-10)
    assert r.value == pytest.approx(mp_theta3(0j, 1j), abs=1e-14)
    assert r.tail_bound < 1e-12


def test_theta_period_pi():
    z, s = 0.4, 0.3 + 0.2j
    assert abs(theta3(z + math.pi, s) - theta3(z, s)) < 1e-12


def test_theta_zero():
    s = 0.5 + 0.5j
    assert abs(theta3((1 + s) * math.pi / 2, s)) <= 1e-10


def test_theta_domain_and_budget():
    with pytest.raises(DomainError):
        theta3(0.1, 0.5)
    with pytest.raises(DomainError):
        theta3(0.1, 0.5 - 0.1j)
    with pytest.raises(BudgetError):
        theta3_series(0.0, 1e-12j + 0.3, max_terms=1000)


def test_theta_array_argument():
    z = np.array([0.1, 0.2 + 0.1j])
    out = theta3(z, 0.2 + 0.3j)
    assert out.shape == (2,)
    assert out[1] == theta3(z[1], 0.2 + 0.3j)


def test_modular_examples():
    assert theta3_modular_residual(0.3, 0.1 + 0.4j) < 1e-10
    assert theta3_modular_residual(0, 1j) < 1e-12
    assert theta3_modular_residual(1.1, 0.02 + 0.01j) < 1e-8


thetas = st.tuples(st.floats(-3, 3, **finite), st.floats(-1, 1, **finite),
                   st.floats(-2, 2, **finite), st.floats(0.05, 2, **finite))


@given(thetas)
def test_theta_quasiperiod(args):
    zr, zi, sr, si = args
    z, s = complex(zr, zi), complex(sr, si)
    lhs = theta3(z + math.pi * s, s)
    rhs = cmath.exp(-1j * math.pi * s - 2j * z) * theta3(z, s)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


@given(thetas)
def test_theta_matches_mpmath(args):
    zr, zi, sr, si = args
    z, s = complex(zr, zi), complex(sr, si)
    ref = mp_theta3(z, s)
    assert abs(theta3(z, s) - ref) <= 1e-11 * max(1.0, abs(ref))


@given(st.floats(-3, 3, **finite), st.floats(-1, 1, **finite),
       st.floats(-2, 2, **finite), st.floats(0.02, 2, **finite))
def test_modular_residual_relative_to_conditioning(zr, zi, sr, si):
    # rounding error is set by the largest terms, not by |theta|
    z, s = complex(zr, zi), complex(sr, si)
    assert theta3_modular_residual(z, s) <= 1e-13 * theta3_modular_scale(z, s)


@given(thetas)
def test_modular_residual_absolute_for_moderate_im_s(args):
    zr, zi, sr, si = args
    assert theta3_modular_residual(complex(zr, zi), complex(sr, si)) < 1e-10


# --- quadrature ----------------------------------------------------------

def test_quad_examples():
    assert adaptive_quad(np.sin, 0, math.pi).value == pytest.approx(2.0, abs=1e-12)
    fres = adaptive_quad(lambda x: np.exp(1j * x * x), 0, 1).value
    ref = complex(mpmath.quad(lambda x: mpmath.exp(1j * x * x), [0, 1]))
    assert abs(fres - ref) < 1e-12
    assert fres == pytest.approx(0.904524 + 0.310268j, abs=1e-6)
    assert adaptive_quad(lambda x: np.sin(math.pi * x), 0, 1).value == pytest.approx(2 / math.pi)


def test_quad_vector_valued():
    r = adaptive_quad(lambda x: np.array([x, x * x]), 0, 1)
    assert np.allclose(r.value, [0.5, 1 / 3])
    assert r.intervals >= 1 and r.evaluations > 0


def test_quad_budget_error_carries_best():
    with pytest.raises(BudgetError) as info:
        adaptive_quad(lambda x: np.sin(1 / x) / x, 1e-8, 1, tol=1e-14, limit=5)
    assert info.value.best is not None


def test_loglog_slope():
    x = np.logspace(0, 2, 10)
    s, r = fit_loglog_slope(x, 3 * x**1.5)
    assert s == pytest.approx(1.5) and r < 1e-12
