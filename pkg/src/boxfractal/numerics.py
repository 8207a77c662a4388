"""Special functions and quadrature used by the propagator code.

Everything here is pure and reentrant.  Complex quantities are plain Python
``complex`` or numpy ``complex128`` arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special


class NumericsError(ArithmeticError):
    """Base class for numerical failures raised by this package."""


class DomainError(NumericsError, ValueError):
    """Argument outside the domain where the operation is defined."""


class RangeError(NumericsError, OverflowError):
    """Result not representable in double precision."""


class FitError(NumericsError):
    """Not enough data, or data of the wrong shape, for a requested fit."""


class BudgetError(NumericsError):
    """Iteration, term or subdivision budget exhausted.

    ``best`` carries the best available estimate, if any.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


# ---------------------------------------------------------------------------
# summation


def neumaier_sum(values, axis=-1):
    """Compensated (Neumaier) summation of a real or complex array along ``axis``.

    Terms are accumulated in ascending index order, so the result is
    reproducible and insensitive to cancellation to O(eps) relative to the
    sum of magnitudes.
    """
    a = np.moveaxis(np.asarray(values), axis, 0)
    if np.iscomplexobj(a):
        return neumaier_sum(a.real, 0) + 1j * neumaier_sum(a.imag, 0)
    a = a.astype(float, copy=False)
    if a.shape[0] == 0:
        return np.zeros(a.shape[1:]) if a.ndim > 1 else 0.0
    s = a[0].copy() if a.ndim > 1 else float(a[0])
    comp = np.zeros_like(s) if a.ndim > 1 else 0.0
    for term in a[1:]:
        t = s + term
        big = np.abs(s) >= np.abs(term)
        comp = comp + np.where(big, (s - t) + term, (term - t) + s)
        s = t
    return s + comp


def fsum_complex(values) -> complex:
    """Exactly rounded sum of a 1-D complex sequence (``math.fsum`` per component)."""
    v = np.asarray(values, dtype=complex).ravel()
    return complex(math.fsum(v.real), math.fsum(v.imag))


# ---------------------------------------------------------------------------
# error function


def complex_erf(z):
    """erf of a complex argument (scalar or array).

    Backed by the Faddeeva-function implementation in scipy.  Raises
    :class:`RangeError` when the result overflows, which happens for
    roughly ``|Im z| > 26`` off the real axis.
    """
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise DomainError("complex_erf: non-finite argument")
    with np.errstate(over="ignore", invalid="ignore"):
        w = special.erf(z)
    if not np.all(np.isfinite(w)):
        bad = z[~np.isfinite(w)] if w.ndim else z
        raise RangeError(f"complex_erf overflows at z={np.ravel(bad)[0]!r}")
    return complex(w) if w.ndim == 0 else w


# ---------------------------------------------------------------------------
# Jacobi theta_3


def _mul_mod2(x: float, k: np.ndarray) -> np.ndarray:
    """(x * k) mod 2 for integer-valued ``k``, without the rounding error of
    forming x * k first (phases pi s n^2 reach 1e4 rad for wide windows)."""
    c = 134217729.0 * x                 # Dekker split: hi carries 26 bits
    hi = c - (c - x)
    lo = x - hi
    return np.fmod(hi * k, 2.0) + np.fmod(lo * k, 2.0)


@dataclass(frozen=True)
class ThetaResult:
    value: complex
    terms: int
    tail_bound: float
    magnitude: float = 0.0   # sum of term moduli; rounding error scales with this


def theta3_series(z, s, tol=1e-15, max_terms=200_000) -> ThetaResult:
    """theta_3(z, s) = sum_n exp(i pi s n^2 + 2 i z n), Im s > 0.

    Terms are summed over a window centred on the largest term, wide enough
    that the discarded tail is below ``tol`` times the largest term.  The tail
    bound uses the fact that beyond the window term moduli fall off at least
    geometrically.
    """
    z = complex(z)
    s = complex(s)
    if not (s.imag > 0.0):
        raise DomainError(f"theta3 needs Im s > 0, got s={s!r}")
    a = math.pi * s.imag           # log|term| = -a n^2 - b n
    b = 2.0 * z.imag
    centre = -b / (2.0 * a)
    # need a*R^2 >= log(1/tol) + margin for the discarded terms
    log_tol = -math.log(tol) + 5.0
    half_width = math.sqrt(log_tol / a) + 2.0
    lo = math.floor(centre - half_width)
    hi = math.ceil(centre + half_width)
    count = hi - lo + 1
    if count > max_terms:
        raise BudgetError(
            f"theta3 needs {count} terms (Im s={s.imag:.3g}), budget {max_terms}"
        )
    n = np.arange(lo, hi + 1, dtype=float)
    # factor out the peak modulus so exp never overflows before the sum;
    # the centred form keeps the large terms' moduli accurate
    n0 = round(centre)
    peak = a * centre * centre - a * (n0 - centre) ** 2
    rel = -a * ((n - centre) ** 2 - (n0 - centre) ** 2)
    phase = math.pi * _mul_mod2(s.real, n * n) + 2.0 * z.real * n
    terms = np.exp(rel + 1j * phase)
    total = fsum_complex(terms)
    # tail beyond the window: first dropped term times a geometric factor
    r_edge = hi + 1 - centre
    ratio = math.exp(-a * (2 * r_edge + 1))
    first = math.exp(-a * r_edge * r_edge - (-a * centre * centre))
    tail = 2.0 * first / (1.0 - ratio) if ratio < 1.0 else math.inf
    scale = math.exp(peak) if peak < 700 else math.inf
    if not math.isfinite(scale):
        raise RangeError(f"theta3 overflows at z={z!r}, s={s!r}")
    return ThetaResult(total * scale, count, tail * scale, math.fsum(np.exp(rel)) * scale)


def theta3(z, s, tol=1e-15):
    """theta_3(z, s) for scalar or array ``z`` and scalar ``s`` (Im s > 0)."""
    if np.ndim(z) == 0:
        return theta3_series(z, s, tol).value
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape, dtype=complex)
    for idx, zi in np.ndenumerate(z):
        out[idx] = theta3_series(zi, s, tol).value
    return out


def theta3_modular_rhs(z, s, tol=1e-15) -> complex:
    """Right-hand side of the modular identity,
    (-i s)^(-1/2) exp(z^2 / (i pi s)) theta_3(z/s, -1/s).

    The square root is the principal branch (positive real part), which is
    the branch that is exact at the self-dual point s = i.
    """
    z = complex(z)
    s = complex(s)
    if not (s.imag > 0.0):
        raise DomainError(f"theta3 needs Im s > 0, got s={s!r}")
    pref = 1.0 / np.sqrt(-1j * s)
    gauss = np.exp(z * z / (1j * math.pi * s))
    return complex(pref * gauss * theta3_series(z / s, -1.0 / s, tol).value)


def theta3_modular_residual(z, s, tol=1e-15) -> float:
    """|theta_3(z,s) - modular RHS| (absolute)."""
    return abs(theta3_series(z, s, tol).value - theta3_modular_rhs(z, s, tol))


def theta3_modular_scale(z, s, tol=1e-15) -> float:
    """Sum of term moduli over both sides of the modular identity.

    Double-precision rounding bounds the residual by a small multiple of
    machine epsilon times this number, which can exceed |theta_3| by many
    orders when Im s is small and |Im z| is not.
    """
    z = complex(z)
    s = complex(s)
    lhs = theta3_series(z, s, tol).magnitude
    pref = abs(1.0 / np.sqrt(-1j * s) * np.exp(z * z / (1j * math.pi * s)))
    return lhs + pref * theta3_series(z / s, -1.0 / s, tol).magnitude


# ---------------------------------------------------------------------------
# quadrature


@dataclass(frozen=True)
class QuadResult:
    value: complex | np.ndarray
    error: float
    intervals: int
    evaluations: int


def adaptive_quad(f, a, b, tol=1e-10, *, limit=10_000, points=None) -> QuadResult:
    """Adaptive Gauss-Kronrod (21-point) integral of a real, complex or
    array-valued ``f`` over [a, b].

    The error estimate is the max-norm over components.  Raises
    :class:`BudgetError` carrying the best estimate if ``limit`` subintervals
    do not reach ``tol``.
    """
    if tol <= 0:
        raise DomainError("adaptive_quad needs tol > 0")
    if points is not None:
        points = [p for p in points if a < p < b]
    val, err, info = integrate.quad_vec(
        f, a, b, epsabs=tol, epsrel=0.0, norm="max", limit=limit,
        points=points, full_output=True,
    )
    res = QuadResult(val, float(err), int(info.intervals.shape[0]), int(info.neval))
    if info.status != 0 or err > tol:
        raise BudgetError(
            f"adaptive_quad: error {err:.3g} > tol {tol:.3g} after "
            f"{res.intervals} intervals", best=res,
        )
    return res


def fit_loglog_slope(x, y):
    """Least-squares slope and rms residual of log y against log x."""
    lx = np.log(np.asarray(x, float))
    ly = np.log(np.asarray(y, float))
    slope, icpt = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + icpt)
    return float(slope), float(np.sqrt(np.mean(resid**2)))
