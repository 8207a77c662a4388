"""Free and box propagators, the Dirichlet basis, and spectral evolution.

All real-time kernels go through one regulator convention: the physical time
``t`` is replaced by ``t - i*epsilon`` before anything else is computed, so
``tau = hbar (t - i eps) / m`` and the theta nome parameter inherit the same
shift.  Nothing applies the shift twice.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import fft

from .numerics import DomainError, complex_erf, neumaier_sum, theta3

# image terms are dropped once their Gaussian damping falls below this
IMAGE_DAMPING_FLOOR = 1e-14
# eigen-sum terms are dropped once exp(-eps E_n / hbar) falls below this
EIGEN_DAMPING_FLOOR = 1e-17


@dataclass(frozen=True)
class KernelParams:
    """Physical context of a box evaluation; natural units by default."""

    mass: float = 1.0
    hbar: float = 1.0
    box_length: float = 1.0
    time: float = 0.0
    epsilon: float = 0.0

    def __post_init__(self):
        if not (self.mass > 0 and self.hbar > 0 and self.box_length > 0):
            raise DomainError("mass, hbar and box_length must be positive")
        if self.time < 0 or self.epsilon < 0:
            raise DomainError("time and epsilon must be non-negative")

    @property
    def complex_time(self) -> complex:
        return complex(self.time, -self.epsilon)

    @property
    def tau(self) -> complex:
        """hbar (t - i eps) / m, a squared length."""
        return self.hbar * self.complex_time / self.mass

    def energy(self, n):
        n = np.asarray(n, dtype=float)
        return self.hbar**2 * n**2 * math.pi**2 / (2.0 * self.mass * self.box_length**2)

    def with_time(self, t: float, epsilon: float | None = None) -> "KernelParams":
        eps = self.epsilon if epsilon is None else epsilon
        return replace(self, time=t, epsilon=eps)


@dataclass
class SpectralState:
    """Coefficients c_1..c_M over the Dirichlet basis at time ``time``."""

    coeffs: np.ndarray
    params: KernelParams
    time: float = 0.0

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.ndim != 1 or self.coeffs.size < 1:
            raise DomainError("SpectralState needs a non-empty 1-D coefficient array")

    @property
    def M(self) -> int:
        return self.coeffs.size

    @property
    def modes(self) -> np.ndarray:
        return np.arange(1, self.M + 1)

    def norm2(self) -> float:
        return float(neumaier_sum(np.abs(self.coeffs) ** 2))


@dataclass
class WaveField:
    """Samples of psi on a uniform grid over [0, L] (endpoints included)."""

    x: np.ndarray
    values: np.ndarray
    time: float = 0.0
    params: KernelParams = field(default_factory=KernelParams)

    def __post_init__(self):
        if len(self.x) < 2 or len(self.x) != len(self.values):
            raise DomainError("WaveField needs >= 2 matching grid points")

    @property
    def spacing(self) -> float:
        return float(self.x[1] - self.x[0])


def _sqrt2i(s: complex) -> complex:
    return np.sqrt(2j * s)


# ---------------------------------------------------------------------------
# free line


def free_kernel(u, s, eps_s=0.0):
    """g(u, s) = exp(i u^2 / 2s) / sqrt(2 i pi s), evaluated at s - i eps_s."""
    s = complex(s) - 1j * eps_s
    if s == 0:
        raise DomainError("free_kernel: s and eps_s cannot both vanish")
    if s.imag > 0:
        raise DomainError("free_kernel: the regulator must push s into Im s <= 0")
    u = np.asarray(u, dtype=float) if np.isrealobj(u) else np.asarray(u)
    val = np.exp(1j * u * u / (2.0 * s)) / np.sqrt(2j * math.pi * s)
    return complex(val) if np.ndim(val) == 0 else val


def _half_gauss(u, tau):
    """int_0^u g(v, tau) dv = erf(u / sqrt(2 i tau)) / 2."""
    return 0.5 * complex_erf(np.asarray(u, dtype=complex) / _sqrt2i(tau))


def free_line_evolve_constant(params: KernelParams, x):
    """psi(x, t) for psi(., 0) = 1/sqrt(L) on [0, L], free on the whole line."""
    tau = params.tau
    if tau == 0:
        raise DomainError("free evolution needs t > 0 or epsilon > 0")
    L = params.box_length
    x = np.asarray(x, dtype=float)
    val = (_half_gauss(x, tau) - _half_gauss(x - L, tau)) / math.sqrt(L)
    return complex(val) if np.ndim(val) == 0 else val


# ---------------------------------------------------------------------------
# Dirichlet basis and spectral evolution


def dirichlet_mode(n: int, params: KernelParams):
    """(u_n, E_n) with u_n(x) = sqrt(2/L) sin(n pi x / L)."""
    if n < 1:
        raise DomainError(f"dirichlet_mode: n must be >= 1, got {n}")
    L = params.box_length
    amp = math.sqrt(2.0 / L)

    def u(x):
        return amp * np.sin(n * math.pi * np.asarray(x, dtype=float) / L)

    return u, float(params.energy(n))


def project_constant_state(M: int, params: KernelParams) -> SpectralState:
    """Dirichlet coefficients of psi = 1/sqrt(L) on [0, L]."""
    if M < 1:
        raise DomainError("project_constant_state: M must be >= 1")
    n = np.arange(1, M + 1)
    c = np.where(n % 2 == 1, 2.0 * math.sqrt(2.0) / (n * math.pi), 0.0)
    return SpectralState(c.astype(complex), params, 0.0)


def damping_factors(n, t: float, N: int, params: KernelParams):
    """exp(-n^2 pi^2 hbar^2 t^2 / (4 m^2 N^2 L^4)): the eigenmode damping that a
    complex time shift of eps_N = hbar t^2 / (2 m N^2 L^2) produces."""
    m, hb, L = params.mass, params.hbar, params.box_length
    n = np.asarray(n, dtype=float)
    return np.exp(-(n**2) * math.pi**2 * hb**2 * t**2 / (4.0 * m**2 * N**2 * L**4))


def evolve_spectral(state: SpectralState, t: float, damping: int | None = None) -> SpectralState:
    """Advance coefficients by time ``t`` with phases exp(-i t E_n / hbar).

    ``damping=N`` additionally applies the Gaussian eigenmode cutoff that
    corresponds to an N-projection Zeno box over the same interval.
    """
    if t < 0:
        raise DomainError("evolve_spectral: t must be >= 0")
    p = state.params
    n = state.modes
    phase = np.exp(-1j * t * p.energy(n) / p.hbar)
    c = state.coeffs * phase
    if damping is not None:
        if damping < 1:
            raise DomainError("damping projection count must be >= 1")
        c = c * damping_factors(n, t, damping, p)
    return SpectralState(c, p, state.time + t)


def _fold_modes(coeffs: np.ndarray, K: int) -> np.ndarray:
    """Alias mode coefficients onto sin(pi n j / K), n = 1..K-1.

    sin(pi n j/K) is 2K-periodic in n and odd about n = K.
    """
    n = np.arange(1, coeffs.size + 1)
    r = n % (2 * K)
    out = np.zeros(K - 1, dtype=complex)
    lo = (r > 0) & (r < K)
    hi = r > K
    np.add.at(out, r[lo] - 1, coeffs[lo])
    np.add.at(out, 2 * K - r[hi] - 1, -coeffs[hi])
    return out


def synthesize(coeffs, x, params: KernelParams):
    """Direct sine synthesis sum_n c_n u_n(x) with compensated accumulation."""
    L = params.box_length
    x = np.asarray(x, dtype=float)
    coeffs = np.asarray(coeffs, dtype=complex)
    n = np.arange(1, coeffs.size + 1)
    terms = coeffs[:, None] * np.sin(np.outer(n, x) * (math.pi / L))
    return math.sqrt(2.0 / L) * neumaier_sum(terms, axis=0)


def sample_wavefield(state: SpectralState, grid_size: int, method: str = "auto") -> WaveField:
    """psi on ``grid_size`` uniform points over [0, L], endpoints included.

    ``method`` is 'direct' (compensated sine synthesis), 'dst' (type-I fast
    sine transform after aliasing modes above the grid Nyquist), or 'auto'.
    """
    if grid_size < 2:
        raise DomainError("sample_wavefield: grid_size must be >= 2")
    p = state.params
    L = p.box_length
    K = grid_size - 1
    x = np.linspace(0.0, L, grid_size)
    if method == "auto":
        method = "direct" if state.M * grid_size <= 2_000_000 else "dst"
    if method == "direct":
        vals = synthesize(state.coeffs, x, p)
        vals[0] = vals[-1] = 0.0
    elif method == "dst":
        vals = np.zeros(grid_size, dtype=complex)
        if K >= 2:
            folded = _fold_modes(state.coeffs, K)
            re = fft.dst(folded.real, type=1)
            im = fft.dst(folded.imag, type=1)
            vals[1:-1] = math.sqrt(2.0 / L) * 0.5 * (re + 1j * im)
    else:
        raise ValueError(f"unknown synthesis method {method!r}")
    return WaveField(x, vals, state.time, p)


# ---------------------------------------------------------------------------
# box propagator: eigen sum, image sum, theta form


def eigsum_mode_count(params: KernelParams, floor: float = EIGEN_DAMPING_FLOOR) -> int:
    """Smallest M with exp(-eps E_M / hbar) below ``floor``."""
    if params.epsilon <= 0:
        raise DomainError("eigen-sum needs epsilon > 0 to converge absolutely")
    e1 = float(params.energy(1)) / params.hbar
    return int(math.ceil(math.sqrt(-math.log(floor) / (params.epsilon * e1)))) + 1


def box_propagator_eigsum(x, y, params: KernelParams, M: int | None = None):
    """sum_{n<=M} (2/L) sin(n pi x/L) sin(n pi y/L) exp(-i (t - i eps) E_n / hbar)."""
    if params.epsilon <= 0:
        raise DomainError("box_propagator_eigsum needs epsilon > 0")
    if M is None:
        M = eigsum_mode_count(params)
    L = params.box_length
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    n = np.arange(1, M + 1)
    w = np.exp(-1j * params.complex_time * params.energy(n) / params.hbar)
    k = n * math.pi / L
    terms = (2.0 / L) * w * np.sin(np.multiply.outer(x, k)) * np.sin(np.multiply.outer(y, k))
    val = neumaier_sum(terms, axis=-1)
    return complex(val) if np.ndim(val) == 0 else val


def image_count(params: KernelParams, floor: float = IMAGE_DAMPING_FLOOR) -> int:
    """Smallest n_max such that every image term with |n| > n_max is damped by
    more than ``floor``.  Needs epsilon > 0."""
    if params.epsilon <= 0:
        raise DomainError("automatic image truncation needs epsilon > 0")
    tau = params.tau
    b = -tau.imag
    # term damping exp(-xi^2 b / (2|tau|^2)) with |xi| >= 2(|n|-1)L
    xi = math.sqrt(2.0 * abs(tau) ** 2 * -math.log(floor) / b)
    return int(math.ceil(xi / (2.0 * params.box_length))) + 1


def box_propagator_imagesum(x, y, params: KernelParams, n_max: int | None = None):
    """sum_{|n|<=n_max} [g(x-y-2nL, tau) - g(x+y-2nL, tau)], tau = hbar(t-i eps)/m."""
    if n_max is None:
        n_max = image_count(params)
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    tau = params.tau
    L = params.box_length
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    n = np.arange(-n_max, n_max + 1)
    shift = 2.0 * L * n
    direct = free_kernel(np.subtract.outer(x - y, shift), tau)
    mirror = free_kernel(np.subtract.outer(x + y, shift), tau)
    val = neumaier_sum(direct - mirror, axis=-1)
    return complex(val) if np.ndim(val) == 0 else val


def theta_nome(params: KernelParams) -> complex:
    """sigma = -pi hbar (t - i eps) / (2 m L^2)."""
    return -math.pi * params.hbar * params.complex_time / (2.0 * params.mass * params.box_length**2)


def box_propagator_theta(x, y, params: KernelParams):
    """(1/2L)[theta_3(pi(x-y)/2L, sigma) - theta_3(pi(x+y)/2L, sigma)]."""
    sigma = theta_nome(params)
    if sigma.imag <= 0:
        raise DomainError("theta form needs epsilon > 0 (Im sigma > 0)")
    L = params.box_length
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    a = math.pi * (x - y) / (2.0 * L)
    b = math.pi * (x + y) / (2.0 * L)
    val = (theta3(a, sigma) - theta3(b, sigma)) / (2.0 * L)
    return complex(val) if np.ndim(val) == 0 else val


# ---------------------------------------------------------------------------
# evolved constant state through the image expansion


def constant_state_imagesum(x, params: KernelParams, n_max: int | None = None):
    """psi(x, t) in the box for psi(., 0) = 1/sqrt(L), integrating the image
    expansion over the source point in closed form."""
    if n_max is None:
        n_max = image_count(params)
    tau = params.tau
    L = params.box_length
    x = np.asarray(x, dtype=float)
    n = np.arange(-n_max, n_max + 1)
    c = np.multiply.outer(x, np.ones_like(n, dtype=float)) - 2.0 * L * n
    # int_0^L g(x-y-2nL) dy - int_0^L g(x+y-2nL) dy
    terms = (_half_gauss(c, tau) - _half_gauss(c - L, tau)) - (
        _half_gauss(c + L, tau) - _half_gauss(c, tau)
    )
    val = neumaier_sum(terms, axis=-1) / math.sqrt(L)
    return complex(val) if np.ndim(val) == 0 else val


def derivative_series(x, params: KernelParams, n_max: int | None = None):
    """d psi/dx of the evolved constant state, (2/sqrt L) sum_{|j|<=n_max} (-1)^j g(x - jL, tau).

    The 2/sqrt(L) prefactor follows from differentiating the image expansion
    term by term: every odd image is reached from two neighbouring even ones.
    """
    if n_max is None:
        n_max = 2 * image_count(params)
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    L = params.box_length
    x = np.asarray(x, dtype=float)
    j = np.arange(-n_max, n_max + 1)
    sign = np.where(j % 2 == 0, 1.0, -1.0)
    terms = sign * free_kernel(np.subtract.outer(x, j * L), params.tau)
    val = 2.0 / math.sqrt(L) * neumaier_sum(terms, axis=-1)
    return complex(val) if np.ndim(val) == 0 else val
