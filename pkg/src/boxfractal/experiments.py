"""Named experiments: presets, validation and execution.

Each experiment maps a resolved :class:`ExperimentConfig` to rows of
``(kind, params, measured)``.  ``kind`` is ``point`` for one sweep point,
``curve`` for plot-ready samples (a structure function, an MSD curve) and
``summary`` for fits across the sweep.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, fields, replace
from typing import Callable

import numpy as np

from .config import (ConfigError, ExperimentConfig, Numerical, Sweep, is_int, is_pos,
                     merge_defaults, require)
from .fractal_analysis import (QUANTITIES, SingleRegimeError, StructureFunction,
                               analytic_structure_function, beta_from_spectrum, crossover_scale,
                               dimension_from_beta, fit_dimension, log_scales,
                               structure_function_spatial, structure_function_temporal)
from .numerics import fit_loglog_slope
from .propagators import (KernelParams, SpectralState, evolve_spectral, project_constant_state,
                          sample_wavefield)
from .relativistic import (RelativisticParams, mean_free_path, telegraph_simulate,
                           telegraph_variance, velocity_cutoff_index)
from .zeno import (ZenoSchedule, eigenmode_cutoff, exact_phase_matrix, first_order_matrix,
                   gmn_matrix, smoothing_scale, zeno_evolve)

IRRATIONAL_TIME = math.sqrt(2.0) / math.pi
MAX_MATRIX_MODES = 2048
MAX_SPECTRAL_MODES = 2_000_000
MAX_GRID = 2**24 + 1

Row = tuple[str, dict, dict]


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    numerical: dict                      # preset values; callables get the partly resolved config
    sweep: dict
    check: Callable[[ExperimentConfig], None]
    run_point: Callable[[ExperimentConfig, dict], list[Row]]
    summarize: Callable[[ExperimentConfig, list[Row]], list[Row]]

    def points(self, cfg: ExperimentConfig) -> list[dict]:
        axes = [a for a in self.sweep]
        values = [getattr(cfg.sweep, a) for a in axes]
        return [dict(zip(axes, combo)) for combo in itertools.product(*values)]


def kernel(cfg: ExperimentConfig, t: float = 0.0) -> KernelParams:
    p = cfg.physical
    return KernelParams(mass=p.mass, hbar=p.hbar, box_length=p.box_length, time=t)


def _revival(cfg) -> float:
    p = cfg.physical
    return 4.0 * p.mass * p.box_length**2 / (math.pi * p.hbar)


def _knee(sf: StructureFunction) -> dict:
    try:
        k = crossover_scale(sf)
    except SingleRegimeError as exc:
        return {"knee_found": False, "crossover": math.nan, "intersection": math.nan,
                "small_slope": math.nan, "large_slope": math.nan, "single_slope": exc.slope}
    return {"knee_found": True, "crossover": k.scale, "intersection": k.intersection,
            "small_slope": k.small_slope, "large_slope": k.large_slope,
            "knee_residual": k.residual}


def _curve(sf: StructureFunction, **params) -> list[Row]:
    return [("curve", {**params, "scale": float(s)}, {"structure": float(v), "count": int(c)})
            for s, v, c in zip(sf.scales, sf.values, sf.counts)]


def _distinct_lags(lo, hi, count, step) -> int:
    return np.unique(np.rint(log_scales(lo, hi, count) / step).astype(int)).size


# ---------------------------------------------------------------------------
# shared validation


def _physical(cfg):
    p = cfg.physical
    for k in ("mass", "hbar", "box_length", "c"):
        require(is_pos(getattr(p, k)), f"physical.{k} must be a positive finite number")


def _window_ok(w, what):
    require(isinstance(w, tuple) and len(w) == 2 and all(is_pos(v) for v in w),
            f"{what} must be a pair of positive numbers")
    require(w[1] > w[0], f"{what} must be increasing")


def _positive_list(vals, what, integer=False, min_len=1):
    require(isinstance(vals, tuple) and len(vals) >= min_len,
            f"{what} needs at least {min_len} value(s)")
    test = (lambda v: is_int(v, 1)) if integer else is_pos
    require(all(test(v) for v in vals), f"{what} values must be positive"
            + (" integers" if integer else " numbers"))
    require(len(set(vals)) == len(vals), f"{what} values must be distinct")


# ---------------------------------------------------------------------------
# berry-spatial


def _berry_spatial_check(cfg):
    n = cfg.numerical
    L = cfg.physical.box_length
    require(is_int(n.modes, 1) and n.modes <= MAX_SPECTRAL_MODES,
            f"numerical.modes must be an integer in [1, {MAX_SPECTRAL_MODES}]")
    require(is_int(n.grid, 3) and n.grid <= MAX_GRID, f"numerical.grid must be in [3, {MAX_GRID}]")
    require(is_pos(n.time), "numerical.time must be > 0")
    require(n.quantity in QUANTITIES, f"numerical.quantity must be one of {QUANTITIES}")
    require(is_int(n.scale_count, 8), "numerical.scale_count must be an integer >= 8")
    _window_ok(n.window, "numerical.window")
    lo, hi = n.window
    h = L / (n.grid - 1)
    trunc = L / (math.pi * n.modes)
    require(lo > 3 * trunc, f"fit window lower edge must exceed 3x the truncation scale "
                            f"L/(pi M) = {trunc:.3g}")
    require(lo >= 2 * h, f"fit window lower edge must be >= 2 grid spacings ({2 * h:.3g})")
    require(hi <= L / 8, "fit window upper edge must be <= L/8")
    require(hi / lo >= 10 * (1 + 1e-12), "fit window must span at least one decade")
    require(_distinct_lags(lo, hi, n.scale_count, h) >= 8,
            "fit window resolves fewer than 8 distinct grid lags")


def _berry_spatial_point(cfg, point):
    n = cfg.numerical
    p = kernel(cfg)
    state = evolve_spectral(project_constant_state(n.modes, p), n.time)
    field = sample_wavefield(state, n.grid)
    sf = structure_function_spatial(field, log_scales(*n.window, n.scale_count), n.quantity)
    fit = fit_dimension(sf)
    beta = beta_from_spectrum(state.coeffs)
    measured = {"dimension": fit.dimension, "slope": fit.slope, "residual": fit.residual,
                "beta": beta, "dimension_from_beta": dimension_from_beta(beta),
                "in_range": bool(1.4 <= fit.dimension <= 1.6)}
    return [("point", {"time": n.time}, measured)] + _curve(sf, time=n.time)


def _no_summary(cfg, rows):
    return []


# ---------------------------------------------------------------------------
# berry-temporal


def _berry_temporal_check(cfg):
    n = cfg.numerical
    L = cfg.physical.box_length
    require(is_int(n.modes, 1) and n.modes <= MAX_SPECTRAL_MODES,
            f"numerical.modes must be an integer in [1, {MAX_SPECTRAL_MODES}]")
    require(is_int(n.samples, 64) and n.samples <= 2**24, "numerical.samples must be in [64, 2^24]")
    require(isinstance(n.time, (int, float)) and math.isfinite(n.time) and n.time >= 0,
            "numerical.time (window start) must be >= 0")
    require(isinstance(n.position, (int, float)) and 0 < n.position < L,
            "numerical.position must lie strictly inside the box")
    require(n.quantity in QUANTITIES, f"numerical.quantity must be one of {QUANTITIES}")
    require(is_int(n.scale_count, 8), "numerical.scale_count must be an integer >= 8")
    _window_ok(n.window, "numerical.window")
    lo, hi = n.window
    dt = _revival(cfg) / n.samples
    require(lo >= 2 * dt * (1 - 1e-12), f"time window lower edge must be >= 2 samples ({2 * dt:.3g})")
    require(hi < _revival(cfg) / 2, "time window upper edge must be below half a revival period")
    require(hi / lo >= 10 * (1 - 1e-12), "time window must span at least one decade")
    require(_distinct_lags(lo, hi, n.scale_count, dt) >= 8,
            "time window resolves fewer than 8 distinct sample lags")


def _berry_temporal_point(cfg, point):
    n = cfg.numerical
    p = kernel(cfg)
    T = _revival(cfg)
    state = project_constant_state(n.modes, p)
    sf = structure_function_temporal(state, n.position, (n.time, n.time + T),
                                     log_scales(*n.window, n.scale_count), n.samples, n.quantity)
    fit = fit_dimension(sf)
    measured = {"dimension": fit.dimension, "slope": fit.slope, "residual": fit.residual,
                "in_range": bool(abs(fit.dimension - 1.75) <= 0.1)}
    return [("point", {"position": n.position}, measured)] + _curve(sf, position=n.position)


# ---------------------------------------------------------------------------
# smallt-remainder


def _matrix_modes(n):
    require(is_int(n.modes, 1) and n.modes <= MAX_MATRIX_MODES,
            f"numerical.modes must be an integer in [1, {MAX_MATRIX_MODES}]")


def _smallt_check(cfg):
    _matrix_modes(cfg.numerical)
    dts = cfg.sweep.dt
    _positive_list(dts, "sweep.dt", min_len=3)
    require(math.log10(max(dts) / min(dts)) >= 1.5 - 1e-9, "sweep.dt must span at least 1.5 decades")


def _smallt_point(cfg, point):
    M, dt = cfg.numerical.modes, point["dt"]
    p = kernel(cfg)
    G = gmn_matrix(ZenoSchedule(dt, 1, M), p).entries
    measured = {
        "norm_first_order": float(np.linalg.norm(G - first_order_matrix(M, dt, p))),
        "norm_identity": float(np.linalg.norm(G - np.eye(M))),
        "norm_exact_phase": float(np.linalg.norm(G - exact_phase_matrix(M, dt, p))),
        "operator_norm": float(np.linalg.norm(G, 2)),
    }
    return [("point", {"dt": dt}, measured)]


def _smallt_summary(cfg, rows):
    pts = sorted((r for r in rows if r[0] == "point"), key=lambda r: r[1]["dt"])
    dts = [r[1]["dt"] for r in pts]
    out = {}
    for ref in ("first_order", "identity", "exact_phase"):
        s, res = fit_loglog_slope(dts, [r[2][f"norm_{ref}"] for r in pts])
        out[f"slope_{ref}"] = s
        out[f"residual_{ref}"] = res
    out["exponent_ok"] = bool(abs(out["slope_first_order"] - 1.5) <= 0.1)
    return [("summary", {"modes": cfg.numerical.modes}, out)]


# ---------------------------------------------------------------------------
# zeno-survival


def _survival_check(cfg):
    n = cfg.numerical
    _matrix_modes(n)
    require(is_pos(n.time), "numerical.time (total time T) must be > 0")
    require(n.initial in ("ground", "constant"), "numerical.initial must be 'ground' or 'constant'")
    _positive_list(cfg.sweep.N, "sweep.N", integer=True, min_len=3)
    require(max(cfg.sweep.N) <= 1_000_000, "sweep.N values must be <= 1e6")


def _initial_state(cfg, M, p) -> SpectralState:
    if cfg.numerical.initial == "ground":
        c = np.zeros(M, complex)
        c[0] = 1.0
        return SpectralState(c, p)
    s = project_constant_state(M, p)
    return SpectralState(s.coeffs / math.sqrt(s.norm2()), p)


def _survival_point(cfg, point):
    n = cfg.numerical
    N = point["N"]
    p = kernel(cfg)
    sched = ZenoSchedule(n.time / N, N, n.modes)
    run = zeno_evolve(_initial_state(cfg, n.modes, p), sched, p)
    surv = float(run.survival[-1])
    return [("point", {"N": N}, {"survival": surv, "deficit": 1.0 - surv,
                                 "monotone": bool(np.all(np.diff(run.survival) <= 1e-12))})]


def _survival_summary(cfg, rows):
    pts = sorted((r for r in rows if r[0] == "point"), key=lambda r: r[1]["N"])
    s, res = fit_loglog_slope([r[1]["N"] for r in pts], [r[2]["deficit"] for r in pts])
    return [("summary", {"time": cfg.numerical.time},
             {"deficit_slope": s, "residual": res, "slope_ok": bool(abs(s + 0.5) <= 0.1)})]


# ---------------------------------------------------------------------------
# zeno-cutoff (damped eigensum) and epsilon-equivalence (exact matrix powering)


def _predicted_cutoff(cfg, dt) -> float:
    p = cfg.physical
    return p.hbar * dt / (2.0 * p.mass * p.box_length)


def _knee_scales(cfg, centre, cap):
    lo_f, hi_f = cfg.numerical.scale_span
    return centre * lo_f, min(centre * hi_f, cap)


def _cutoff_common_check(cfg, max_modes):
    n = cfg.numerical
    L = cfg.physical.box_length
    require(is_int(n.modes, 1) and n.modes <= max_modes,
            f"numerical.modes must be an integer in [1, {max_modes}]")
    require(is_int(n.grid, 3) and n.grid <= MAX_GRID, f"numerical.grid must be in [3, {MAX_GRID}]")
    require(is_pos(n.time), "numerical.time (total time T) must be > 0")
    require(is_int(n.scale_count, 6), "numerical.scale_count must be an integer >= 6")
    _window_ok(n.scale_span, "numerical.scale_span")
    require(n.scale_span[0] < 1 < n.scale_span[1], "numerical.scale_span must bracket 1")
    h = L / (n.grid - 1)
    _positive_list(cfg.sweep.dt, "sweep.dt")
    for dt in cfg.sweep.dt:
        lo, hi = _knee_scales(cfg, _predicted_cutoff(cfg, dt), L / 8)
        require(lo >= 2 * h, f"dt={dt:g}: smallest scale {lo:.3g} is below 2 grid spacings")
        require(hi > lo, f"dt={dt:g}: scale range is empty below L/8")
        require(_distinct_lags(lo, hi, n.scale_count, h) >= 6,
                f"dt={dt:g}: fewer than 6 distinct grid lags for the knee fit")


def _damped_modes(cfg, sched, cap):
    ncut = eigenmode_cutoff(sched, kernel(cfg))
    return min(cap, int(math.ceil(12 * ncut))), ncut


def _cutoff_check(cfg):
    _cutoff_common_check(cfg, MAX_SPECTRAL_MODES)
    T = cfg.numerical.time
    for dt in cfg.sweep.dt:
        N = round(T / dt)
        require(N >= 1, f"dt={dt:g} exceeds the total time")
        M, ncut = _damped_modes(cfg, ZenoSchedule(T / N, N), cfg.numerical.modes)
        require(M >= 4 * ncut, f"dt={dt:g}: numerical.modes={cfg.numerical.modes} must be >= "
                               f"4 n_cut = {4 * ncut:.0f} so damping, not truncation, sets the cutoff")


def _damped_sf(cfg, sched, M, grid):
    p = kernel(cfg)
    state = evolve_spectral(project_constant_state(M, p), sched.total_time, damping=sched.N)
    field = sample_wavefield(state, grid)
    pred = smoothing_scale(sched, p)
    lo, hi = _knee_scales(cfg, pred, p.box_length / 8)
    return structure_function_spatial(field, log_scales(lo, hi, cfg.numerical.scale_count)), pred


def _cutoff_point(cfg, point):
    n = cfg.numerical
    N = round(n.time / point["dt"])
    sched = ZenoSchedule(n.time / N, N)
    M, ncut = _damped_modes(cfg, sched, n.modes)
    sf, pred = _damped_sf(cfg, sched, M, n.grid)
    knee = _knee(sf)
    measured = {"N": N, "dt_effective": sched.dt, "modes_used": M, "n_cut": ncut,
                "predicted": pred, **knee, "ratio": knee["crossover"] / pred}
    return [("point", {"dt": point["dt"]}, measured)] + _curve(sf, dt=point["dt"])


def _cutoff_summary(cfg, rows):
    pts = sorted((r for r in rows if r[0] == "point"), key=lambda r: r[1]["dt"])
    dts = np.array([r[2]["dt_effective"] for r in pts])
    ds = np.array([r[2]["crossover"] for r in pts])
    p = cfg.physical
    unit = p.hbar / (2.0 * p.mass * p.box_length)
    if len(pts) >= 2 and np.all(np.isfinite(ds)):
        slope, res = fit_loglog_slope(dts, ds)
        prefactor = float(np.exp(np.mean(np.log(ds / dts))))
    else:
        slope = res = prefactor = math.nan
    ratio = prefactor / unit
    return [("summary", {"time": cfg.numerical.time},
             {"crossover_slope": slope, "residual": res, "prefactor": prefactor,
              "predicted_prefactor": unit, "prefactor_ratio": ratio,
              "slope_ok": bool(abs(slope - 1.0) <= 0.2),
              "prefactor_ok": bool(0.5 <= ratio <= 2.0)})]


def _equivalence_check(cfg):
    _cutoff_common_check(cfg, MAX_MATRIX_MODES)
    require(cfg.sweep.dt is not None and len(cfg.sweep.dt) >= 1, "sweep.dt needs at least 1 value")
    _positive_list(cfg.sweep.N, "sweep.N", integer=True)
    require(max(cfg.sweep.N) <= 100_000, "sweep.N values must be <= 1e5")


def _equivalence_point(cfg, point):
    n = cfg.numerical
    dt, N = point["dt"], point["N"]
    p = kernel(cfg)
    sched = ZenoSchedule(dt, N, n.modes)
    exact = zeno_evolve(project_constant_state(n.modes, p), sched, p).final
    pred = smoothing_scale(sched, p)
    lo, hi = _knee_scales(cfg, pred, p.box_length / 8)
    scales = log_scales(lo, hi, n.scale_count)
    sf_exact = structure_function_spatial(sample_wavefield(exact, n.grid), scales)
    M, ncut = _damped_modes(cfg, sched, 100_000)
    sf_damped, _ = _damped_sf(cfg, sched, max(M, n.modes), n.grid)
    ke, kd = _knee(sf_exact), _knee(sf_damped)
    ratio = ke["crossover"] / kd["crossover"]
    measured = {"predicted": pred, "survival": exact.norm2(),
                **{f"exact_{k}": v for k, v in ke.items()},
                **{f"damped_{k}": v for k, v in kd.items()},
                "ratio": ratio, "agree": bool(0.5 <= ratio <= 2.0)}
    return ([("point", {"dt": dt, "N": N}, measured)]
            + _curve(sf_exact, dt=dt, N=N, route="exact")
            + _curve(sf_damped, dt=dt, N=N, route="damped"))


# ---------------------------------------------------------------------------
# compton-cutoff


def _compton_check(cfg):
    n = cfg.numerical
    L = cfg.physical.box_length
    require(is_pos(n.time), "numerical.time must be > 0")
    require(isinstance(n.position, (int, float)) and 0 < n.position < L,
            "numerical.position must lie strictly inside the box")
    require(min(n.position, L - n.position) > 1e-6 * L, "numerical.position too close to a wall")
    require(is_int(n.scale_count, 6), "numerical.scale_count must be an integer >= 6")
    _window_ok(n.scale_span, "numerical.scale_span")
    require(n.scale_span[0] < 1 < n.scale_span[1], "numerical.scale_span must bracket 1")
    _positive_list(cfg.sweep.c, "sweep.c")
    p = kernel(cfg)
    for c in cfg.sweep.c:
        rel = RelativisticParams(c, cfg.physical.mass, cfg.physical.hbar)
        nmax = velocity_cutoff_index(p, rel, n.time)
        require(nmax >= 8, f"c={c:g}: velocity cutoff n_max={nmax} < 8, both regimes not visible")
        require(nmax <= 10_000_000, f"c={c:g}: n_max={nmax} too large to sum")
        lo, hi = _knee_scales(cfg, rel.compton_wavelength, L / 2)
        require(hi > lo, f"c={c:g}: scale range is empty below L/2")


def _compton_point(cfg, point):
    n = cfg.numerical
    c = point["c"]
    p = kernel(cfg, n.time)
    rel = RelativisticParams(c, cfg.physical.mass, cfg.physical.hbar)
    nmax = velocity_cutoff_index(p, rel, n.time)
    lo, hi = _knee_scales(cfg, rel.compton_wavelength, p.box_length / 2)
    scales = log_scales(lo, hi, n.scale_count)
    S = analytic_structure_function(n.position, p, scales, nmax)
    sf = StructureFunction(scales, S, np.full(scales.size, 2 * nmax + 1))
    knee = _knee(sf)
    ratio = knee["crossover"] / rel.compton_wavelength
    measured = {"n_max": nmax, "compton": rel.compton_wavelength, **knee, "ratio": ratio,
                "within_factor_2": bool(0.5 <= ratio <= 2.0)}
    return [("point", {"c": c}, measured)] + _curve(sf, c=c)


def _compton_summary(cfg, rows):
    pts = sorted((r for r in rows if r[0] == "point"), key=lambda r: r[1]["c"])
    cs = np.array([r[1]["c"] for r in pts])
    ds = np.array([r[2]["crossover"] for r in pts])
    if len(pts) >= 2 and np.all(np.isfinite(ds)):
        slope, res = fit_loglog_slope(cs, ds)
    else:
        slope = res = math.nan
    return [("summary", {"time": cfg.numerical.time},
             {"crossover_slope": slope, "residual": res,
              "slope_ok": bool(abs(slope + 1.0) <= 0.15),
              "all_within_factor_2": bool(all(r[2]["within_factor_2"] for r in pts))})]


# ---------------------------------------------------------------------------
# telegraph-diffusion


def _telegraph_check(cfg):
    n = cfg.numerical
    require(is_int(n.walkers, 10_000) and n.walkers <= 10_000_000,
            "numerical.walkers must be an integer in [1e4, 1e7]")
    require(is_pos(n.duration_rates) and n.duration_rates >= 20,
            "numerical.duration_rates must be >= 20 (diffusive regime)")
    require(n.duration_rates <= 10_000, "numerical.duration_rates must be <= 1e4")
    require(is_int(n.records, 1) and n.records <= 10_000, "numerical.records must be in [1, 1e4]")
    _positive_list(cfg.sweep.c, "sweep.c")


def _telegraph_point(cfg, point):
    n = cfg.numerical
    rel = RelativisticParams(point["c"], cfg.physical.mass, cfg.physical.hbar)
    rate = rel.reversal_rate
    # one independent stream per sweep point, derived from the config seed
    seed = int(np.random.SeedSequence([cfg.seed, int(point["index"])]).generate_state(1)[0])
    st = telegraph_simulate(rel, n.walkers, n.duration_rates / rate, n.records, seed)
    exact = telegraph_variance(st.times, rel.c, rate)
    z = np.abs(st.msd - exact) / st.msd_stderr
    d_exact = rel.c**2 / (2.0 * rate)
    lam = mean_free_path(rel)
    measured = {
        "diffusion": st.diffusion, "diffusion_exact": d_exact,
        "diffusion_rel_error": st.diffusion / d_exact - 1.0,
        "diffusion_per_hbar_over_m": st.diffusion * cfg.physical.mass / cfg.physical.hbar,
        "flight_mean": st.flight_mean, "compton": lam, "flight_rel_error": st.flight_mean / lam - 1.0,
        "flight_count": st.flight_count, "final_mean_over_se": float(st.mean[-1] / st.mean_stderr[-1]),
        "max_msd_z": float(z.max()), "short_duration": st.short_duration,
        "diffusion_ok": bool(abs(st.diffusion / d_exact - 1.0) <= 0.05),
        "flight_ok": bool(abs(st.flight_mean / lam - 1.0) <= 0.02),
    }
    curve = [("curve", {"c": rel.c, "time": float(t)},
              {"msd": float(m), "msd_stderr": float(se), "msd_exact": float(e)})
             for t, m, se, e in zip(st.times, st.msd, st.msd_stderr, exact)]
    return [("point", {"c": rel.c}, measured)] + curve


# ---------------------------------------------------------------------------
# registry


def _berry_window(cfg):
    L, M = cfg.physical.box_length, cfg.numerical.modes
    return (10 * L / (math.pi * M), L / 16)


def _temporal_window(cfg):
    T = _revival(cfg)
    return (2 * T / cfg.numerical.samples, T / 1024)


EXPERIMENTS: dict[str, Experiment] = {e.name: e for e in [
    Experiment("berry-spatial", "spatial dimension of the evolved constant state (expect 3/2)",
               {"modes": 100_000, "grid": 2**21 + 1, "time": IRRATIONAL_TIME, "scale_count": 40,
                "quantity": "complex", "window": _berry_window},
               {}, _berry_spatial_check, _berry_spatial_point, _no_summary),
    Experiment("berry-temporal", "temporal dimension at a fixed interior point (expect 7/4)",
               {"modes": 100_000, "samples": 2**16, "time": 0.1, "position": 1 / math.sqrt(5),
                "scale_count": 40, "quantity": "complex", "window": _temporal_window},
               {}, _berry_temporal_check, _berry_temporal_point, _no_summary),
    Experiment("smallt-remainder", "exponent of ||G(dt) - (1 - i dt H)|| (expect 3/2)",
               {"modes": 32}, {"dt": list(np.logspace(-4, -2.5, 10))},
               _smallt_check, _smallt_point, _smallt_summary),
    Experiment("zeno-survival", "survival deficit 1 - P(N) at fixed T (expect N^-1/2)",
               {"modes": 64, "time": 0.05, "initial": "ground"},
               {"N": [8, 16, 32, 64, 128, 256, 512]},
               _survival_check, _survival_point, _survival_summary),
    Experiment("zeno-cutoff", "crossover scale of the damped eigensum state vs dt",
               {"modes": 100_000, "grid": 2**21 + 1, "time": IRRATIONAL_TIME, "scale_count": 48,
                "scale_span": (1 / 25, 200)},
               {"dt": [1e-4, 2e-4, 5e-4, 1e-3]},
               _cutoff_check, _cutoff_point, _cutoff_summary),
    Experiment("epsilon-equivalence", "crossover of exact matrix powering vs the damped eigensum",
               {"modes": 64, "grid": 2**14 + 1, "time": 1.28, "scale_count": 48,
                "scale_span": (1 / 25, 200)},
               {"dt": [0.02], "N": [64]},
               _equivalence_check, _equivalence_point, _no_summary),
    Experiment("compton-cutoff", "crossover scale under the velocity cutoff vs c",
               {"time": 1.0, "position": 1 / math.sqrt(2), "scale_count": 48,
                "scale_span": (1 / 30, 100)},
               {"c": [50.0, 100.0, 200.0, 500.0]},
               _compton_check, _compton_point, _compton_summary),
    Experiment("telegraph-diffusion", "telegraph walkers: diffusion constant and mean free path",
               {"walkers": 100_000, "duration_rates": 50.0, "records": 50},
               {"c": [10.0]},
               _telegraph_check, _telegraph_point, _no_summary),
]}


def resolve(cfg: ExperimentConfig) -> ExperimentConfig:
    """Validate ``cfg`` and fill every unset knob from the experiment preset.

    Raises :class:`ConfigError` naming the first violated condition.
    """
    exp = EXPERIMENTS.get(cfg.experiment)
    if exp is None:
        raise ConfigError(f"unknown experiment {cfg.experiment!r}; known: {', '.join(EXPERIMENTS)}")
    for f in fields(Numerical):
        if f.name not in exp.numerical and getattr(cfg.numerical, f.name) is not None:
            raise ConfigError(f"numerical.{f.name} is not used by {exp.name}")
    for f in fields(Sweep):
        if f.name not in exp.sweep and getattr(cfg.sweep, f.name) is not None:
            raise ConfigError(f"sweep.{f.name} is not used by {exp.name}")
    _physical(cfg)
    plain = {k: v for k, v in exp.numerical.items() if not callable(v)}
    sweep = {k: [float(x) if k != "N" else x for x in v] for k, v in exp.sweep.items()}
    cfg = merge_defaults(cfg, plain, sweep)
    for k, v in exp.numerical.items():
        if callable(v) and getattr(cfg.numerical, k) is None:
            _precheck_window_inputs(cfg)   # the window formulas divide by these
            cfg = replace(cfg, numerical=replace(cfg.numerical, **{k: tuple(v(cfg))}))
    for k in ("window", "scale_span"):
        w = getattr(cfg.numerical, k)
        if w is not None and not isinstance(w, tuple):
            raise ConfigError(f"numerical.{k} must be a list of two numbers")
    for k in fields(Sweep):
        v = getattr(cfg.sweep, k.name)
        if v is not None and not isinstance(v, tuple):
            raise ConfigError(f"sweep.{k.name} must be a list")
    exp.check(cfg)
    return cfg


def _precheck_window_inputs(cfg):
    n = cfg.numerical
    if n.modes is not None:
        require(is_int(n.modes, 1), "numerical.modes must be a positive integer")
    if n.samples is not None:
        require(is_int(n.samples, 64), "numerical.samples must be an integer >= 64")


def sweep_points(cfg: ExperimentConfig) -> list[dict]:
    pts = EXPERIMENTS[cfg.experiment].points(cfg)
    if cfg.experiment == "telegraph-diffusion":
        pts = [{**p, "index": i} for i, p in enumerate(pts)]
    return pts
