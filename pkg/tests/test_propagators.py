import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from boxfractal.numerics import DomainError, adaptive_quad
from boxfractal.propagators import (KernelParams, SpectralState, box_propagator_eigsum,
                                    box_propagator_imagesum, box_propagator_theta,
                                    constant_state_imagesum, damping_factors, derivative_series,
                                    dirichlet_mode, evolve_spectral, free_kernel,
                                    free_line_evolve_constant, image_count,
                                    project_constant_state, sample_wavefield, synthesize)
from boxfractal.zeno import ZenoSchedule, eigenmode_cutoff

unit = st.floats(0.02, 0.98)


# --- free line -------------------------------------------------------------

def test_free_kernel_at_origin():
    g = free_kernel(0.0, 1.0)
    assert g == pytest.approx(1 / np.sqrt(2j * math.pi))
    assert abs(g) == pytest.approx((2 * math.pi) ** -0.5)


@given(st.floats(-50, 50), st.floats(0.01, 10))
def test_free_kernel_modulus_independent_of_u(u, s):
    assert abs(free_kernel(u, s)) == pytest.approx((2 * math.pi * s) ** -0.5, rel=1e-12)


def test_free_kernel_regulated_decay():
    u, s, eps = 5.0, 1.0, 0.1
    ratio = abs(free_kernel(u, s, eps)) / abs(free_kernel(0.0, s, eps))
    assert ratio == pytest.approx(math.exp(-eps * u * u / (2 * (s * s + eps * eps))), rel=1e-12)


def test_free_kernel_domain():
    with pytest.raises(DomainError):
        free_kernel(1.0, 0.0)


@given(st.floats(-3, 4))
def test_free_line_mirror_symmetry(x):
    p = KernelParams(time=0.1)
    assert free_line_evolve_constant(p, x) == pytest.approx(free_line_evolve_constant(p, 1 - x),
                                                            abs=1e-13)


def test_free_line_derivative_identity():
    p = KernelParams(time=0.1)
    x, h = 0.3, 1e-5
    fd = (free_line_evolve_constant(p, x + h) - free_line_evolve_constant(p, x - h)) / (2 * h)
    exact = free_kernel(x, p.tau) - free_kernel(1 - x, p.tau)
    assert abs(fd - exact) < 1e-6


def test_free_line_unitarity():
    # the integral over |x| <= 20L misses ~1.6e-3 of the norm (tails fall as 1/x^2),
    # so integrate numerically to 1000L and add the analytic 1/x^2 tail beyond
    tau, L, X = 0.05, 1.0, 1000.0
    p = KernelParams(time=tau)
    f = lambda x: abs(free_line_evolve_constant(p, x)) ** 2
    pts = list(np.linspace(-X, X + L, 4002)[1:-1])
    inner = adaptive_quad(f, -X, X + L, 1e-11, limit=200_000, points=pts).value
    tail = 2 * tau / (2 * math.pi * L) * (1 / (X + L) + 1 / X)
    assert abs(inner + tail - 1) < 1e-6


def test_free_line_needs_time():
    with pytest.raises(DomainError):
        free_line_evolve_constant(KernelParams(), 0.5)


# --- Dirichlet basis -------------------------------------------------------

def test_mode_energy_and_boundary():
    u, E = dirichlet_mode(1, KernelParams())
    assert E == pytest.approx(math.pi**2 / 2)
    assert E == pytest.approx(4.9348, abs=1e-4)
    for n in (1, 2, 7):
        u, _ = dirichlet_mode(n, KernelParams())
        assert abs(u(0.0)) < 1e-15 and abs(u(1.0)) < 1e-14
    with pytest.raises(DomainError):
        dirichlet_mode(0, KernelParams())


@pytest.mark.parametrize("m,n", [(1, 1), (1, 2), (3, 5), (4, 4), (2, 6)])
def test_mode_orthonormality(m, n):
    p = KernelParams()
    um, _ = dirichlet_mode(m, p)
    un, _ = dirichlet_mode(n, p)
    val = adaptive_quad(lambda x: um(x) * un(x), 0, 1, 1e-12).value
    assert val == pytest.approx(float(m == n), abs=1e-10)


def test_constant_state_coefficients():
    s = project_constant_state(100_000, KernelParams())
    assert s.coeffs[0].real == pytest.approx(0.9003163161571061, abs=1e-12)
    assert s.coeffs[1] == 0
    assert abs(s.norm2() - 1) < 1e-5
    # oracle: projection by quadrature
    u3, _ = dirichlet_mode(3, KernelParams())
    assert s.coeffs[2].real == pytest.approx(adaptive_quad(u3, 0, 1, 1e-13).value, abs=1e-12)


# --- spectral evolution ----------------------------------------------------

def test_evolve_identity_and_unitary():
    s = project_constant_state(64, KernelParams())
    assert np.array_equal(evolve_spectral(s, 0.0).coeffs, s.coeffs)
    e = evolve_spectral(s, 0.37)
    assert np.allclose(np.abs(e.coeffs), np.abs(s.coeffs), rtol=0, atol=1e-15)
    with pytest.raises(DomainError):
        evolve_spectral(s, -1.0)


@given(st.floats(0, 5), st.floats(0, 5))
def test_group_property(t1, t2):
    s = project_constant_state(257, KernelParams())
    a = evolve_spectral(evolve_spectral(s, t1), t2).coeffs
    b = evolve_spectral(s, t1 + t2).coeffs
    # phases exp(-i t E_n) reach ~1e6 rad at n = 257, so equality is to rounding of t E_n
    assert np.max(np.abs(a - b)) < 1e-9


@given(st.floats(0.01, 10))
def test_norm_preserved(t):
    s = project_constant_state(1000, KernelParams())
    assert evolve_spectral(s, t).norm2() == pytest.approx(s.norm2(), rel=1e-13)


def test_damping_at_cutoff_is_e_minus_one():
    # substituting n_cut = 2 m L^2 N / (pi hbar T) into the damping exponent
    # gives exactly -(n/n_cut)^2, so the amplitude ratio at n_cut is e^-1 for every N
    p = KernelParams()
    for N, T in [(1000, 1000 * 2 / (math.pi * 500)), (10, 0.3), (512, 0.05)]:
        ncut = eigenmode_cutoff(ZenoSchedule(T / N, N), p)
        assert damping_factors(ncut, T, N, p) == pytest.approx(math.exp(-1), rel=1e-12)
    N, T = 1000, 1000 * 2 / (math.pi * 500)
    assert eigenmode_cutoff(ZenoSchedule(T / N, N), p) == pytest.approx(500)


def test_damped_evolution_applies_factor():
    p = KernelParams()
    s = project_constant_state(50, p)
    d = evolve_spectral(s, 0.2, damping=10)
    ratio = np.abs(d.coeffs[::2]) / np.abs(s.coeffs[::2])
    assert np.allclose(ratio, damping_factors(np.arange(1, 51, 2), 0.2, 10, p))


# --- synthesis -------------------------------------------------------------

def test_single_mode_synthesis():
    c = np.zeros(4, complex)
    c[0] = 1
    f = sample_wavefield(SpectralState(c, KernelParams()), 5)
    assert np.allclose(f.values, math.sqrt(2) * np.sin(math.pi * f.x), atol=1e-15)
    assert f.values[0] == 0 and f.values[-1] == 0


@pytest.mark.parametrize("M,grid", [(64, 513), (300, 257), (1000, 129)])
def test_dst_matches_direct(M, grid):
    s = evolve_spectral(project_constant_state(M, KernelParams()), 0.4501)
    a = sample_wavefield(s, grid, "direct").values
    b = sample_wavefield(s, grid, "dst").values
    assert np.max(np.abs(a - b)) < 1e-10


def test_parseval_on_grid():
    M = 200
    s = evolve_spectral(project_constant_state(M, KernelParams()), 0.3)
    f = sample_wavefield(s, 8 * M + 1)
    mean = np.mean(np.abs(f.values[:-1]) ** 2)     # periodic-trapezoid grid mean
    assert mean * 1.0 == pytest.approx(s.norm2(), abs=1e-6)


def test_synthesis_endpoints_vanish():
    s = evolve_spectral(project_constant_state(5000, KernelParams()), 0.45)
    f = sample_wavefield(s, 2**12 + 1)
    scale = np.max(np.abs(f.values))
    assert abs(f.values[0]) <= 1e-9 * scale and abs(f.values[-1]) <= 1e-9 * scale


# --- box propagators -------------------------------------------------------

eps_params = KernelParams(time=0.2, epsilon=0.05)


def test_representations_agree_example():
    x, y = 0.3, 0.6
    p = eps_params
    a = box_propagator_imagesum(x, y, p)
    b = box_propagator_theta(x, y, p)
    c = box_propagator_eigsum(x, y, p)
    assert abs(a - b) < 1e-10 and abs(b - c) < 1e-10


@given(unit, unit, st.floats(0.01, 2.0), st.floats(0.01, 0.3))
def test_representation_equivalence(x, y, t, eps):
    p = KernelParams(time=t, epsilon=eps)
    a = box_propagator_eigsum(x, y, p)
    b = box_propagator_imagesum(x, y, p)
    c = box_propagator_theta(x, y, p)
    scale = max(1.0, abs(a))
    assert abs(a - b) <= 1e-8 * scale
    assert abs(a - c) <= 1e-8 * scale


@given(unit, unit, st.floats(0.01, 2.0), st.floats(0.02, 0.3))
def test_kernel_symmetry(x, y, t, eps):
    p = KernelParams(time=t, epsilon=eps)
    assert box_propagator_theta(x, y, p) == pytest.approx(box_propagator_theta(y, x, p), abs=1e-12)
    assert box_propagator_eigsum(x, y, p) == pytest.approx(box_propagator_eigsum(y, x, p), abs=1e-12)


@given(unit, st.floats(0.01, 2.0), st.floats(0.02, 0.3))
def test_dirichlet_enforced_by_all_forms(y, t, eps):
    p = KernelParams(time=t, epsilon=eps)
    interior = abs(box_propagator_theta(0.5, y, p))
    for wall in (0.0, 1.0):
        for f in (box_propagator_eigsum, box_propagator_imagesum, box_propagator_theta):
            assert abs(f(wall, y, p)) <= 1e-9 * max(interior, 1.0)


def test_eigsum_requires_epsilon():
    with pytest.raises(DomainError):
        box_propagator_eigsum(0.3, 0.4, KernelParams(time=0.1))
    with pytest.raises(DomainError):
        box_propagator_theta(0.3, 0.4, KernelParams(time=0.1))


def test_eigsum_integrates_to_one_near_t0():
    p = KernelParams(time=0.0, epsilon=1e-3)
    x = 0.4
    val = adaptive_quad(lambda y: box_propagator_eigsum(x, y, p), 0, 1, 1e-8,
                        points=[x - 0.1, x, x + 0.1]).value
    assert abs(val - 1) < 1e-3


def test_imagesum_single_path_for_wide_box():
    L = 1000.0
    p = KernelParams(box_length=L, time=0.1, epsilon=0.01)
    x, y = 500.3, 500.1
    assert box_propagator_imagesum(x, y, p, n_max=0) == pytest.approx(free_kernel(x - y, p.tau),
                                                                       rel=1e-12)


def test_second_image_path_length():
    # the n = 1 mirror term g(x + y - 2L) is the path bouncing off both walls...
    # and n = 2 carries (x + y - 4L)^2, i.e. length 4L - x - y
    x, y = 0.3, 0.6
    p = KernelParams(time=0.2)
    full = box_propagator_imagesum(x, y, p, n_max=2) - box_propagator_imagesum(x, y, p, n_max=1)
    direct_2 = free_kernel(x - y - 4, p.tau) + free_kernel(x - y + 4, p.tau)
    mirror_2 = free_kernel(x + y - 4, p.tau) + free_kernel(x + y + 4, p.tau)
    assert full == pytest.approx(direct_2 - mirror_2, abs=1e-14)
    phase = np.angle(free_kernel(x + y - 4, p.tau) * np.sqrt(2j * math.pi * p.tau))
    expected = ((4 - x - y) ** 2 / (2 * 0.2) + math.pi) % (2 * math.pi) - math.pi
    assert phase == pytest.approx(expected, abs=1e-9)


def test_imagesum_negative_nmax():
    with pytest.raises(DomainError):
        box_propagator_imagesum(0.3, 0.4, eps_params, n_max=-1)


# --- evolved constant state via images and its derivative series ----------

def test_image_state_matches_spectral():
    p = KernelParams(time=0.2, epsilon=0.05)
    x = np.linspace(0.05, 0.95, 7)
    M = 400
    s = project_constant_state(M, p)
    n = s.modes
    c = s.coeffs * np.exp(-1j * p.complex_time * p.energy(n) / p.hbar)
    spectral = synthesize(c, x, p)
    assert np.max(np.abs(constant_state_imagesum(x, p) - spectral)) < 1e-10


@given(st.floats(0.05, 0.95))
def test_derivative_series_matches_finite_difference(x):
    p = KernelParams(time=0.2, epsilon=0.05)
    h = 1e-5
    fd = (constant_state_imagesum(x + h, p) - constant_state_imagesum(x - h, p)) / (2 * h)
    assert abs(fd - derivative_series(x, p)) < 1e-6


def test_derivative_series_leading_term_and_reflection():
    p = KernelParams(time=0.2, epsilon=0.05)
    assert derivative_series(0.3, p, n_max=0) == pytest.approx(2 * free_kernel(0.3, p.tau))
    # relabelling j -> 2 - j maps x to 2L - x with the same alternating signs,
    # and g is even, so the full series is symmetric under x -> 2L - x
    n = 2 * image_count(p) + 2
    assert derivative_series(0.3, p, n) == pytest.approx(derivative_series(1.7, p, n), abs=1e-10)
