"""Velocity-limited path sums and the telegraph (persistent random walk) process."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fractal_analysis import StructureFunction, analytic_structure_function, crossover_scale
from .numerics import DomainError
from .propagators import KernelParams
from .zeno import ZenoSchedule


@dataclass(frozen=True)
class RelativisticParams:
    c: float
    mass: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if not (self.c > 0 and self.mass > 0 and self.hbar > 0):
            raise DomainError("c, mass and hbar must be positive")

    @property
    def compton_wavelength(self) -> float:
        return self.hbar / (self.mass * self.c)

    @property
    def reversal_rate(self) -> float:
        return self.mass * self.c**2 / self.hbar


def velocity_cutoff_index(params: KernelParams, rel: RelativisticParams, t: float) -> int:
    """floor(c t / 2L): the last image whose path length 2nL light can cover in time t."""
    if t <= 0:
        raise DomainError("velocity cutoff needs t > 0")
    return int(math.floor(rel.c * t / (2.0 * params.box_length) * (1 + 1e-12)))


def compton_crossover_experiment(params: KernelParams, rel: RelativisticParams, t: float,
                                 scales, x: float | None = None, n_max: int | None = None):
    """Knee of the image-sum structure function with the velocity cutoff applied.

    Returns (crossover, compton_wavelength).  ``n_max`` overrides the cutoff
    (used for the non-relativistic limit).
    """
    n_max = velocity_cutoff_index(params, rel, t) if n_max is None else n_max
    if n_max < 8:
        raise DomainError(f"velocity cutoff n_max={n_max} < 8; both regimes not resolvable")
    x = params.box_length / math.sqrt(2.0) if x is None else x
    scales = np.asarray(scales, float)
    S = analytic_structure_function(x, params.with_time(t), scales, n_max)
    sf = StructureFunction(scales, S, np.full(scales.size, 2 * n_max + 1))
    return crossover_scale(sf), rel.compton_wavelength


def zeno_compton_bound(schedule: ZenoSchedule, params: KernelParams, rel: RelativisticParams) -> float:
    """dt / (L/c): measurement interval in units of the light-crossing time."""
    return schedule.dt * rel.c / params.box_length


def mean_free_path(rel: RelativisticParams) -> float:
    """c / reversal rate, which equals hbar / (m c)."""
    return rel.c / rel.reversal_rate


def nonrelativistic_condition(dx: float, dt: float, rel: RelativisticParams) -> bool:
    """dx < c dt (strict: the boundary dx = c dt counts as relativistic)."""
    if dx <= 0 or dt <= 0:
        raise DomainError("dx and dt must be positive")
    return dx < rel.c * dt


def telegraph_variance(t, c: float, rate: float):
    """Exact displacement variance of the symmetric telegraph process."""
    t = np.asarray(t, float)
    return c**2 * t / rate - c**2 / (2.0 * rate**2) * (1.0 - np.exp(-2.0 * rate * t))


@dataclass
class TelegraphStats:
    times: np.ndarray
    msd: np.ndarray
    msd_stderr: np.ndarray
    mean: np.ndarray
    mean_stderr: np.ndarray
    diffusion: float
    flight_mean: float
    flight_count: int
    walkers: int
    seed: int
    short_duration: bool


def telegraph_simulate(rel: RelativisticParams, walkers: int = 100_000, duration: float | None = None,
                       records: int = 50, seed: int = 0, rate: float | None = None) -> TelegraphStats:
    """Continuous-time telegraph walkers: speed c, direction flips at Poisson rate.

    ``duration`` defaults to 50 / rate.  Waiting times are drawn from the
    exponential distribution with one PCG64 stream, walkers advanced in
    lock-step from one recording time to the next.  ``short_duration`` flags
    runs shorter than 20 / rate, which have not reached the diffusive regime.
    """
    rate = rel.reversal_rate if rate is None else rate
    duration = 50.0 / rate if duration is None else duration
    if walkers < 1 or records < 1 or duration <= 0:
        raise DomainError("walkers, records and duration must be positive")
    rng = np.random.Generator(np.random.PCG64(seed))
    c = rel.c
    pos = np.zeros(walkers)
    vel = np.where(rng.random(walkers) < 0.5, -c, c)
    clock = np.zeros(walkers)                       # time each walker has been advanced to
    next_flip = rng.exponential(1.0 / rate, walkers)
    flight_count = 0
    times = np.linspace(duration / records, duration, records)
    msd, msd_se, mean, mean_se = (np.empty(records) for _ in range(4))
    for r, t_rec in enumerate(times):
        while True:
            due = np.nonzero(next_flip <= t_rec)[0]
            if due.size == 0:
                break
            tf = next_flip[due]
            pos[due] += vel[due] * (tf - clock[due])
            clock[due] = tf
            vel[due] = -vel[due]
            flight_count += due.size
            next_flip[due] = tf + rng.exponential(1.0 / rate, due.size)
        pos += vel * (t_rec - clock)
        clock[:] = t_rec
        sq = pos * pos
        msd[r] = sq.mean()
        msd_se[r] = sq.std(ddof=1) / math.sqrt(walkers) if walkers > 1 else math.inf
        mean[r] = pos.mean()
        mean_se[r] = pos.std(ddof=1) / math.sqrt(walkers) if walkers > 1 else math.inf
    diffusion = float(msd[-1] / (2.0 * times[-1]))
    # total path length over reversal count; averaging only completed flights
    # drops each walker's unfinished last flight and biases low by ~1/(rate T)
    flight_mean = c * walkers * duration / flight_count if flight_count else math.nan
    return TelegraphStats(times, msd, msd_se, mean, mean_se, diffusion, flight_mean,
                          flight_count, walkers, seed, duration < 20.0 / rate)
