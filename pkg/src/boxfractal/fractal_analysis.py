"""Dimension estimates from increment scaling and spectral decay, plus knee
(crossover) detection in structure functions.

A graph with dimension D has mean-square increments S(d) ~ d**(4 - 2D); a
random-phase Fourier series with |a_m|^2 ~ m**-beta has D = (5 - beta)/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .numerics import DomainError, FitError, adaptive_quad, neumaier_sum
from .propagators import KernelParams, SpectralState, WaveField

QUANTITIES = ("complex", "re", "im", "abs2")


class SingleRegimeError(FitError):
    def __init__(self, slope: float):
        super().__init__(f"structure function shows a single regime (slope {slope:.3f})")
        self.slope = slope


@dataclass
class StructureFunction:
    scales: np.ndarray
    values: np.ndarray
    counts: np.ndarray
    quantity: str = "complex"

    def __post_init__(self):
        self.scales = np.asarray(self.scales, float)
        self.values = np.asarray(self.values, float)
        self.counts = np.asarray(self.counts, int)
        if np.any(np.diff(self.scales) <= 0):
            raise DomainError("structure-function scales must be strictly increasing")
        if np.any(self.values < 0):
            raise DomainError("structure-function values must be non-negative")


@dataclass
class DimensionFit:
    slope: float
    dimension: float
    window: tuple[float, float]
    residual: float
    beta: float | None = None

    def __post_init__(self):
        assert abs(self.dimension - (4.0 - self.slope) / 2.0) < 1e-12


@dataclass
class Crossover:
    scale: float
    small_slope: float
    large_slope: float
    split_index: int
    intersection: float
    residual: float


def _select(values, quantity):
    if quantity == "complex":
        return np.asarray(values)
    if quantity == "re":
        return np.real(values)
    if quantity == "im":
        return np.imag(values)
    if quantity == "abs2":
        return np.abs(values) ** 2
    raise ValueError(f"unknown quantity {quantity!r}; expected one of {QUANTITIES}")


def log_scales(lo: float, hi: float, count: int) -> np.ndarray:
    return np.logspace(math.log10(lo), math.log10(hi), count)


def _mean_sq_increment(q, lag, circular=False):
    if circular:
        d = np.roll(q, -lag) - q
    else:
        d = q[lag:] - q[:-lag]
    return float(np.mean(np.abs(d) ** 2)), d.size


def structure_function_spatial(field: WaveField, scales, quantity: str = "complex",
                               max_fraction: float = 1.0 / 8.0) -> StructureFunction:
    """S(d) = mean_x |q(x + d) - q(x)|^2 over every admissible grid point.

    Scales are snapped to whole grid lags; duplicates after snapping are merged.
    """
    h = field.spacing
    L = field.x[-1] - field.x[0]
    scales = np.asarray(scales, float)
    if np.any(scales < 2 * h * (1 - 1e-9)):
        raise DomainError(f"scale below two grid spacings (h={h:.3g})")
    if np.any(scales > max_fraction * L * (1 + 1e-9)):
        raise DomainError(f"scale above {max_fraction:g} of the box")
    lags = np.unique(np.rint(scales / h).astype(int))
    q = _select(field.values, quantity)
    vals, counts = zip(*(_mean_sq_increment(q, int(k)) for k in lags))
    return StructureFunction(lags * h, vals, counts, quantity)


def _revival_time(params: KernelParams) -> float:
    return 4.0 * params.mass * params.box_length**2 / (math.pi * params.hbar)


def temporal_series(state: SpectralState, x: float, t0: float, dt: float, count: int):
    """psi(x, t0 + j dt), j = 0..count-1, from the Dirichlet expansion.

    When count*dt is a whole revival period the phases exp(-i E_n j dt / hbar)
    are exact roots of unity, so the series is an FFT of coefficients binned
    by n^2 mod count.  Otherwise the sum is done directly in chunks.
    """
    p = state.params
    n = state.modes
    amp = state.coeffs * math.sqrt(2.0 / p.box_length) * np.sin(n * math.pi * x / p.box_length)
    amp = amp * np.exp(-1j * t0 * p.energy(n) / p.hbar)
    ratio = count * dt / _revival_time(p)
    if abs(ratio - round(ratio)) < 1e-12 and round(ratio) >= 1:
        step = int(round(ratio))
        bins = np.zeros(count, dtype=complex)
        np.add.at(bins, (step * n.astype(np.int64) ** 2) % count, amp)
        return np.fft.ifft(bins) * count
    omega = p.energy(n) / p.hbar
    t = dt * np.arange(count)
    out = np.zeros(count, dtype=complex)
    chunk = max(1, 4_000_000 // max(1, n.size))
    for i in range(0, count, chunk):
        out[i:i + chunk] = np.exp(-1j * np.outer(t[i:i + chunk], omega)) @ amp
    return out


def structure_function_temporal(state: SpectralState, x: float, t_window, scales,
                                samples: int = 2**16, quantity: str = "complex") -> StructureFunction:
    """S(s) = mean_t |psi(x, t + s) - psi(x, t)|^2 for time lags ``scales``.

    ``t_window = (t0, t1)``.  A window of a whole number of revival periods is
    treated as periodic, so every sample contributes to every lag.
    """
    p = state.params
    L = p.box_length
    if not (0 < x < L):
        raise DomainError("temporal structure function needs an interior point")
    t0, t1 = t_window
    if not t1 > t0:
        raise DomainError("empty time window")
    dt = (t1 - t0) / samples
    scales = np.asarray(scales, float)
    if np.any(scales < 2 * dt * (1 - 1e-9)):
        raise DomainError(f"time scale below two samples (dt={dt:.3g})")
    series = temporal_series(state, x, t0, dt, samples)
    ratio = (t1 - t0) / _revival_time(p)
    periodic = abs(ratio - round(ratio)) < 1e-12 and round(ratio) >= 1
    lags = np.unique(np.rint(scales / dt).astype(int))
    if np.any(lags >= samples):
        raise DomainError("time scale longer than the window")
    q = _select(series, quantity)
    vals, counts = zip(*(_mean_sq_increment(q, int(k), periodic) for k in lags))
    return StructureFunction(lags * dt, vals, counts, quantity)


def fit_dimension(sf: StructureFunction, window=None, min_points: int = 8) -> DimensionFit:
    """Log-log least squares of S against scale inside ``window``; D = (4 - slope)/2."""
    lo, hi = window if window is not None else (sf.scales[0], sf.scales[-1])
    sel = (sf.scales >= lo * (1 - 1e-12)) & (sf.scales <= hi * (1 + 1e-12)) & (sf.values > 0)
    if sel.sum() < min_points:
        raise FitError(f"fit window holds {sel.sum()} usable scales, need {min_points}")
    s, v = sf.scales[sel], sf.values[sel]
    if math.log10(s[-1] / s[0]) < 1.0 - 1e-9:
        raise FitError("fit window spans less than one decade")
    lx, ly = np.log(s), np.log(v)
    slope, icpt = np.polyfit(lx, ly, 1)
    resid = float(np.sqrt(np.mean((ly - (slope * lx + icpt)) ** 2)))
    return DimensionFit(float(slope), (4.0 - slope) / 2.0, (float(s[0]), float(s[-1])), resid)


def beta_from_spectrum(coeffs, n_min: int = 1, n_max: int | None = None) -> float:
    """Exponent beta of |a_n|^2 ~ n**-beta from a log-log fit over nonzero modes.

    Modes are numbered from 1.  Identically-zero modes (the even modes of the
    constant state) are skipped.
    """
    p = np.abs(np.asarray(coeffs)) ** 2
    n = np.arange(1, p.size + 1)
    sel = (p > 0) & (n >= n_min)
    if n_max is not None:
        sel &= n <= n_max
    n, p = n[sel], p[sel]
    if n.size < 3 or math.log10(n[-1] / n[0]) < 2.0:
        raise FitError("beta fit needs >= 2 decades of nonzero coefficients")
    # equal weight per log-interval, not per mode
    edges = np.unique(np.geomspace(n[0], n[-1], 64).astype(int))
    idx = np.unique(np.searchsorted(n, edges).clip(0, n.size - 1))
    slope, _ = np.polyfit(np.log(n[idx]), np.log(p[idx]), 1)
    return float(-slope)


def dimension_from_beta(beta: float) -> float:
    return 0.5 * (5.0 - beta)


def analytic_structure_function(x: float, params: KernelParams, dx, n_max: int):
    """Random-phase mean square increment of the box wavefunction,
    (8 tau / pi L) sum_{|n|<=n_max} sin^2((x - nL) dx / 2 tau) / (x - nL)^2,
    with tau = hbar t / m taken real.

    Each image contributes |int g|^2 = (2 tau / pi) sin^2(.)/(x - nL)^2 and the
    derivative series carries (2/sqrt L)^2 = 4/L, hence 8 tau / (pi L).
    """
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    L = params.box_length
    if params.time <= 0:
        raise DomainError("analytic structure function needs t > 0")
    tau = params.hbar * params.time / params.mass
    n = np.arange(-n_max, n_max + 1, dtype=float)
    d = x - n * L
    if np.min(np.abs(d)) < 1e-9 * L:
        raise DomainError("x too close to a wall image (pole of the series)")
    dx = np.atleast_1d(np.asarray(dx, float))
    out = np.empty(dx.shape)
    # chunk over dx so huge n_max stays within memory
    chunk = max(1, 2_000_000 // n.size)
    for i in range(0, dx.size, chunk):
        arg = np.multiply.outer(dx[i:i + chunk], d) / (2.0 * tau)
        terms = np.sin(arg) ** 2 / d**2
        out[i:i + chunk] = neumaier_sum(terms.T, axis=0) if n.size <= 4096 else terms.sum(axis=1)
    return (8.0 * tau / (math.pi * L)) * out


def _sin2_tail(beta: float, y0: float) -> float:
    """int_{y0}^inf y**-beta sin^2(y/2) dy via the cosine-weighted Fourier integral."""
    mean_part = y0 ** (1.0 - beta) / (2.0 * (beta - 1.0))
    osc, _ = integrate.quad(lambda y: y ** (-beta), y0, np.inf, weight="cos", wvar=1.0,
                            limlst=200)
    return mean_part - 0.5 * osc


def _sin2_integrand(beta):
    def f(y):
        y = np.asarray(y, float)
        # y**-beta sin^2(y/2) stays finite at 0 for beta <= 2; use sinc form
        s = np.sinc(y / (2 * math.pi)) * 0.5
        return s * s * y ** (2.0 - beta)
    return f


def sin2_integral(beta: float, a: float, b: float = math.inf, tol: float = 1e-12) -> float:
    """int_a^b y**-beta sin^2(y/2) dy for 1 < beta <= 3, 0 <= a < b <= inf."""
    if not (1.0 < beta <= 3.0):
        raise DomainError("beta must lie in (1, 3]")
    if a == 0.0 and beta == 3.0:
        raise DomainError("integral diverges at 0 for beta = 3")
    f = _sin2_integrand(beta)
    total = 0.0
    if a < 1.0:
        # power series of (1 - cos y) / 2 integrated term by term near the origin
        c = min(b, 1.0)
        total += _sin2_series(beta, a, c)
        a = c
        if a >= b:
            return total
    split = 50.0
    if b <= split:
        return total + float(adaptive_quad(f, a, b, tol).value)
    head = float(adaptive_quad(f, a, split, tol).value) if a < split else 0.0
    tail = _sin2_tail(beta, max(a, split))
    if math.isfinite(b):
        tail -= _sin2_tail(beta, b)
    return total + head + tail


def _sin2_series(beta: float, a: float, c: float) -> float:
    terms = []
    for k in range(1, 12):
        coef = (-1) ** (k + 1) / (2.0 * math.factorial(2 * k))
        p = 2 * k + 1 - beta
        if p == 0.0:
            terms.append(coef * math.log(c / a))
        else:
            terms.append(coef * (c**p - (a**p if a > 0 else 0.0)) / p)
    return math.fsum(terms)


def scaling_integral_oracle(beta: float, du: float) -> float:
    """(du)**(beta-1) * int_{du}^inf y**-beta sin^2(y/2) dy."""
    if not (1.0 < beta <= 3.0):
        raise DomainError("beta must lie in (1, 3]")
    if du <= 0:
        raise DomainError("du must be positive")
    return du ** (beta - 1.0) * sin2_integral(beta, du)


def scaling_integral_fraction(beta: float, lo: float, hi: float) -> float:
    """Share of int_0^inf y**-beta sin^2(y/2) dy carried by [lo, hi] (needs beta < 3)."""
    return sin2_integral(beta, lo, hi) / sin2_integral(beta, 0.0)


def two_segment_fit(scales, values, min_points: int = 3):
    """Exhaustive two-segment log-log least squares over split positions."""
    lx = np.log(np.asarray(scales, float))
    ly = np.log(np.asarray(values, float))
    k = lx.size
    if k < 2 * min_points:
        raise FitError(f"need >= {2 * min_points} scales for a two-segment fit")
    best = None
    for j in range(min_points, k - min_points + 1):
        p1 = np.polyfit(lx[:j], ly[:j], 1)
        p2 = np.polyfit(lx[j:], ly[j:], 1)
        sse = float(np.sum((np.polyval(p1, lx[:j]) - ly[:j]) ** 2)
                    + np.sum((np.polyval(p2, lx[j:]) - ly[j:]) ** 2))
        if best is None or sse < best[0]:
            best = (sse, j, p1, p2)
    return best


def crossover_scale(sf: StructureFunction, min_slope_gap: float = 0.3) -> Crossover:
    """Knee between a smooth small-scale regime and a rougher large-scale one.

    The breakpoint is the split that minimises the summed squared residual
    of two independent log-log lines; ``scale`` is the geometric midpoint of
    the two samples either side of it.  Raises :class:`SingleRegimeError`
    when the two slopes differ by less than ``min_slope_gap`` or the
    small-scale side is not the steeper one.
    """
    sel = sf.values > 0
    s, v = sf.scales[sel], sf.values[sel]
    sse, j, p1, p2 = two_segment_fit(s, v)
    if p1[0] - p2[0] < min_slope_gap:
        slope, _ = np.polyfit(np.log(s), np.log(v), 1)
        raise SingleRegimeError(float(slope))
    mid = math.sqrt(s[j - 1] * s[j])
    inter = math.exp((p2[1] - p1[1]) / (p1[0] - p2[0]))
    return Crossover(mid, float(p1[0]), float(p2[0]), j, inter, math.sqrt(sse / s.size))
