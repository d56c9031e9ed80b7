"""Execute a :class:`RunConfig` and write its output files."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import RunConfig
from .diagnostics import (
    ForcingBoundMonitor,
    classify_monge_ampere,
    convexity_sufficient_condition,
    record_of,
)
from .errors import CurveFlowError, UnsupportedDerivativeError
from .evolution import evolve
from .forcing import check_forcing_bound, describe
from .geometry import curve_of
from .grid import make_grid, mode_amplitudes
from .output import initial_field, write_json, write_series, write_snapshot, write_svg
from .steady import solve_steady

__all__ = ["RunOutcome", "run", "EXIT_OK", "EXIT_FAILED", "EXIT_ERROR"]

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1  # bad configuration or unexpected library error
EXIT_FAILED = 2  # ran, but terminated early or did not converge

_MODES_REPORTED = 16


@dataclass
class RunOutcome:
    exit_code: int
    message: str
    files: list[Path] = field(default_factory=list)


def _index_name(prefix: str, i: int, suffix: str) -> str:
    return f"{prefix}_{i:04d}.{suffix}"


def _write_states(cfg: RunConfig, out: Path, times, states, files, start_index=0):
    for i, (t, S) in enumerate(zip(times, states), start=start_index):
        if "json" in cfg.formats:
            files.append(write_snapshot(t, S, out / _index_name("snapshot", i, "json")))
        if "svg" in cfg.formats:
            files.append(write_svg(curve_of(S), out / _index_name("curve", i, "svg")))


def _write_figures(cfg: RunConfig, out: Path, records, times, states, files, title):
    if "png" not in cfg.formats:
        return
    from .plotting import plot_curves, plot_series

    if len(records) > 1:
        files.append(plot_series(records, out / "series.png", title))
    files.append(plot_curves(states, times, out / "curves.png", title))


def _spectrum(S, count=_MODES_REPORTED):
    return [float(a) for a in mode_amplitudes(S).amplitudes[:count]]


def _run_evolve(cfg: RunConfig, out: Path, files) -> RunOutcome:
    grid = make_grid(cfg.n)
    spec = cfg.forcing_spec
    t0, S0 = initial_field(cfg.initial, grid)
    monitor = ForcingBoundMonitor(spec)
    traj = evolve(S0, spec, cfg.flow_config(), monitors=[monitor], energy_params=cfg.energy_params(), t0=t0)
    if "csv" in cfg.formats:
        files.append(write_series(traj.records, out / "series.csv"))
    _write_states(cfg, out, traj.times, traj.states, files)
    summary = {
        "mode": "evolve",
        "forcing": describe(spec),
        "termination": traj.termination.status,
        "termination_time": traj.termination.t,
        "message": traj.termination.message,
        "steps": traj.steps_taken,
        "final_time": traj.times[-1],
        "first_bound_violation": monitor.first_violation,
        "final_mode_amplitudes": _spectrum(traj.final),
    }
    if "json" in cfg.formats:
        files.append(write_json(summary, out / "summary.json"))
    _write_figures(cfg, out, traj.records, traj.times, traj.states, files, f"F = {describe(spec)}")
    if traj.termination.ok:
        return RunOutcome(EXIT_OK, f"completed {traj.steps_taken} steps to t = {traj.times[-1]:.6g}", files)
    return RunOutcome(EXIT_FAILED, f"terminated: {traj.termination}", files)


def _run_steady(cfg: RunConfig, out: Path, files) -> RunOutcome:
    grid = make_grid(cfg.n)
    spec = cfg.forcing_spec
    _, S0 = initial_field(cfg.initial, grid)
    res = solve_steady(S0, spec, cfg.steady_options())
    rec = record_of(0.0, res.S_inf, spec, cfg.energy_params())
    if "csv" in cfg.formats:
        files.append(write_series([rec], out / "series.csv"))
    _write_states(cfg, out, [0.0], [res.S_inf], files)
    summary = {
        "mode": "steady",
        "forcing": describe(spec),
        "converged": res.converged,
        "residual_norm": res.residual_norm,
        "iterations": res.iterations,
        "residual_history": res.residual_history,
        "krylov_iterations": res.krylov_iterations,
        "krylov_stagnated": res.krylov_stagnated,
        "convexity_margin": res.convexity_margin,
        "non_circularity": res.non_circularity,
        "mode_amplitudes": _spectrum(res.S_inf),
    }
    if "json" in cfg.formats:
        files.append(write_json(summary, out / "steady.json"))
    _write_figures(cfg, out, [rec], [0.0], [res.S_inf], files, f"steady state, F = {describe(spec)}")
    if res.converged:
        return RunOutcome(EXIT_OK, f"converged in {res.iterations} iterations, residual {res.residual_norm:.3e}", files)
    return RunOutcome(EXIT_FAILED, f"not converged after {res.iterations} iterations, residual {res.residual_norm:.3e}", files)


def _run_analyze(cfg: RunConfig, out: Path, files) -> RunOutcome:
    grid = make_grid(cfg.n)
    spec = cfg.forcing_spec
    t0, S = initial_field(cfg.initial, grid)
    rec = record_of(t0, S, spec, cfg.energy_params())
    ma = classify_monge_ampere(S, spec)
    bound = check_forcing_bound(spec, S)
    try:
        cond = convexity_sufficient_condition(S, spec)
        sufficient = cond.all_hold
        sufficient_fraction = float(np.mean(cond.holds))
    except UnsupportedDerivativeError:
        sufficient, sufficient_fraction = None, None
    if "csv" in cfg.formats:
        files.append(write_series([rec], out / "series.csv"))
    _write_states(cfg, out, [t0], [S], files)
    report = {
        "mode": "analyze",
        "forcing": describe(spec),
        "t": t0,
        "energy": rec.energy,
        "length": rec.length,
        "area": rec.area,
        "convexity_margin": rec.convexity_margin,
        "steady_residual": rec.steady_residual,
        "monge_ampere_verdict": ma.verdict,
        "min_discriminant": ma.min_discriminant,
        "globally_hyperbolic": ma.globally_hyperbolic,
        "forcing_bound_ok": bound.passed,
        "min_forcing": bound.min_forcing,
        "min_upper_margin": bound.min_upper_margin,
        "convexity_condition_holds": sufficient,
        "convexity_condition_fraction": sufficient_fraction,
        "mode_amplitudes": _spectrum(S),
    }
    if "json" in cfg.formats:
        files.append(write_json(report, out / "analysis.json"))
    _write_figures(cfg, out, [rec], [t0], [S], files, f"F = {describe(spec)}")
    return RunOutcome(EXIT_OK, f"{ma.verdict}; forcing bound {'ok' if bound.passed else 'violated'}", files)


def _run_render(cfg: RunConfig, out: Path, files) -> RunOutcome:
    grid = make_grid(cfg.n)
    t0, S = initial_field(cfg.initial, grid)
    m = re.search(r"snapshot_(\d+)\.json$", cfg.initial)
    index = int(m.group(1)) if m else 0
    files.append(write_svg(curve_of(S), out / _index_name("curve", index, "svg")))
    if "png" in cfg.formats:
        from .plotting import plot_curves

        files.append(plot_curves([S], [t0], out / _index_name("curve", index, "png")))
    return RunOutcome(EXIT_OK, f"rendered {len(files)} file(s)", files)


_RUNNERS = {
    "evolve": _run_evolve,
    "steady": _run_steady,
    "analyze": _run_analyze,
    "render": _run_render,
}


def run(cfg: RunConfig) -> RunOutcome:
    """Run one configuration; failures become a nonzero exit code, not exceptions.

    Files written before a failure are kept.
    """
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files: list[Path] = []
    (out / "config.resolved").write_text(cfg.echo())
    files.append(out / "config.resolved")
    try:
        return _RUNNERS[cfg.mode](cfg, out, files)
    except CurveFlowError as exc:
        log.error("%s run failed: %s", cfg.mode, exc)
        return RunOutcome(EXIT_ERROR, f"error: {exc}", files)
