"""Time integration of ``S_t = -(S'''' + 2S'' + S) + F(S)`` on the angle grid.

The stiff linear part is diagonal in Fourier space and is always treated
implicitly; the forcing is explicit. For :class:`Anisotropic` forcing the
linear ``beta*S''`` piece joins the implicit operator (symbol ``-beta k^2``)
and only ``alpha*kappa^2`` stays explicit.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .diagnostics import DiagnosticsRecord, EnergyParams, record_of
from .errors import (
    BlowupError,
    CurveFlowError,
    DegenerateCurvatureError,
    InvalidArgumentError,
)
from .forcing import Anisotropic, Constant, ForcingContext, ForcingSpec, eval_forcing
from .geometry import TOL_CONVEX, convexity_margin
from .grid import Field, differentiate, linear_symbol

__all__ = [
    "SCHEMES",
    "FlowConfig",
    "Termination",
    "Trajectory",
    "CurvatureFlowParams",
    "step",
    "evolve",
    "curvature_flow_step",
    "evolve_curvature",
]

log = logging.getLogger(__name__)

SCHEMES = ("IMEX1", "IMEX2")
Monitor = Callable[[float, Field], None]


@dataclass(frozen=True)
class FlowConfig:
    dt: float = 1e-3
    t_end: float = 1.0
    scheme: str = "IMEX2"
    record_every: int = 100
    convexity_policy: str = "abort"
    n: int = 256

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidArgumentError(f"dt must be positive, got {self.dt}")
        if not self.t_end >= 0:
            raise InvalidArgumentError(f"t_end must be >= 0, got {self.t_end}")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise InvalidArgumentError(f"record_every must be an integer >= 1, got {self.record_every}")
        if self.scheme not in SCHEMES:
            raise InvalidArgumentError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.convexity_policy not in ("abort", "warn"):
            raise InvalidArgumentError(f"convexity_policy must be 'abort' or 'warn', got {self.convexity_policy!r}")


@dataclass(frozen=True)
class Termination:
    status: str  # completed | convexity_lost | blowup
    t: float | None = None
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "completed"

    def __str__(self):
        if self.status == "completed":
            return "completed"
        return f"{self.status}(t={self.t:.6g}): {self.message}" if self.message else f"{self.status}(t={self.t:.6g})"


@dataclass
class Trajectory:
    times: list[float] = field(default_factory=list)
    states: list[Field] = field(default_factory=list)
    records: list[DiagnosticsRecord] = field(default_factory=list)
    termination: Termination = field(default_factory=lambda: Termination("completed"))
    steps_taken: int = 0

    @property
    def final(self) -> Field:
        return self.states[-1]


def _split(spec: ForcingSpec, grid):
    """Implicit symbol and explicit part of the right-hand side."""
    symbol = linear_symbol(grid)
    if isinstance(spec, Anisotropic):
        k = grid.wavenumbers
        symbol = symbol - spec.beta * k * k
        explicit = Anisotropic(spec.alpha, 0.0)
    else:
        explicit = spec
    return symbol, explicit


def _explicit_coeffs(explicit: ForcingSpec, S: Field) -> np.ndarray | float:
    if isinstance(explicit, Constant):
        out = np.zeros(S.grid.n // 2 + 1, dtype=complex)
        out[0] = explicit.value * S.grid.n
        return out
    if isinstance(explicit, Anisotropic) and explicit.alpha == 0.0:
        return 0.0
    F = eval_forcing(explicit, ForcingContext.from_support(S))
    return np.fft.rfft(F.values)


def _backward_euler(coeffs, forcing_coeffs, symbol, dt):
    # overflow surfaces as a non-finite state, reported by the caller
    with np.errstate(over="ignore", invalid="ignore"):
        return (coeffs + dt * forcing_coeffs) / (1.0 - dt * symbol)


def step(S: Field, spec: ForcingSpec, dt: float, scheme: str = "IMEX2") -> Field:
    """Advance ``S`` by one time step.

    IMEX1: backward Euler on the linear part, forward Euler on the forcing.
    IMEX2: trapezoidal linear part; forcing evaluated at the midpoint state
    predicted by an IMEX1 half step.
    """
    if not dt > 0:
        raise InvalidArgumentError(f"dt must be positive, got {dt}")
    if scheme not in SCHEMES:
        raise InvalidArgumentError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    grid = S.grid
    symbol, explicit = _split(spec, grid)
    coeffs = np.fft.rfft(S.values)
    g = _explicit_coeffs(explicit, S)
    if scheme == "IMEX1":
        new = _backward_euler(coeffs, g, symbol, dt)
    else:
        half = _backward_euler(coeffs, g, symbol, 0.5 * dt)
        half_values = np.fft.irfft(half, n=grid.n)
        if not np.all(np.isfinite(half_values)):
            raise BlowupError("non-finite state in midpoint predictor")
        g_mid = _explicit_coeffs(explicit, Field(grid, half_values))
        with np.errstate(over="ignore", invalid="ignore"):
            new = ((1.0 + 0.5 * dt * symbol) * coeffs + dt * g_mid) / (1.0 - 0.5 * dt * symbol)
    values = np.fft.irfft(new, n=grid.n)
    if not np.all(np.isfinite(values)):
        raise BlowupError("non-finite state after step")
    return Field(grid, values)


def evolve(
    S0: Field,
    spec: ForcingSpec,
    cfg: FlowConfig = FlowConfig(),
    monitors: Iterable[Monitor] = (),
    energy_params: EnergyParams = EnergyParams(),
    t0: float = 0.0,
) -> Trajectory:
    """Integrate from ``t0`` to ``cfg.t_end``.

    Snapshots and records are kept at step 0, every ``record_every`` steps,
    and at the last step. Early termination is reported on the returned
    trajectory instead of raised.
    """
    monitors = list(monitors)
    traj = Trajectory()
    span = cfg.t_end - t0
    nsteps = max(0, math.ceil(span / cfg.dt - 1e-9))

    def keep(t, S):
        traj.times.append(float(t))
        traj.states.append(S)
        traj.records.append(record_of(t, S, spec, energy_params))

    S = S0
    for m in monitors:
        m(t0, S)
    keep(t0, S)
    if convexity_margin(S) <= TOL_CONVEX and cfg.convexity_policy == "abort":
        traj.termination = Termination("convexity_lost", t0, "initial curve is not strictly convex")
        return traj

    warned = False
    for i in range(1, nsteps + 1):
        t_prev = t0 + (i - 1) * cfg.dt
        h = cfg.dt
        if i == nsteps and abs(cfg.t_end - t_prev - h) > 1e-12 * h:
            h = cfg.t_end - t_prev
        t = t0 + i * cfg.dt if i < nsteps else cfg.t_end
        try:
            S = step(S, spec, h, cfg.scheme)
        except DegenerateCurvatureError as exc:
            traj.termination = Termination("convexity_lost", t_prev, str(exc))
            break
        except CurveFlowError as exc:
            traj.termination = Termination("blowup", t, str(exc))
            break
        traj.steps_taken = i
        for m in monitors:
            m(t, S)
        margin = convexity_margin(S)
        if margin <= TOL_CONVEX:
            if cfg.convexity_policy == "abort":
                keep(t, S)
                traj.termination = Termination(
                    "convexity_lost", t, f"min(S_thth + S) = {margin:.6g}"
                )
                break
            if not warned:
                log.warning("convexity lost at t = %.6g (min(S_thth + S) = %.6g)", t, margin)
                warned = True
        if i % cfg.record_every == 0 or i == nsteps:
            keep(t, S)
    return traj


@dataclass(frozen=True)
class CurvatureFlowParams:
    xi: float = 0.0
    forcing: ForcingSpec = Constant(0.0)

    def __post_init__(self):
        if not self.xi >= 0:
            raise InvalidArgumentError(f"xi must be >= 0, got {self.xi}")


def curvature_flow_step(kappa: Field, params: CurvatureFlowParams, dt: float) -> Field:
    """Forward Euler step of ``k_t = -(2k - k_ss + 4 xi k^3) + F``.

    On the normal-angle parametrisation ``d/ds = kappa d/dtheta``.
    """
    if not dt > 0:
        raise InvalidArgumentError(f"dt must be positive, got {dt}")
    k = kappa.values
    if np.any(k <= 0):
        j = int(np.argmin(k))
        raise DegenerateCurvatureError(k[j], j, kappa.grid.theta[j])
    k_s = k * differentiate(kappa, 1).values
    k_ss = k * differentiate(Field(kappa.grid, k_s), 1).values
    F = eval_forcing(params.forcing, ForcingContext(kappa.grid, kappa=k)).values
    new = k + dt * (-(2.0 * k - k_ss + 4.0 * params.xi * k**3) + F)
    if np.any(new <= 0) or not np.all(np.isfinite(new)):
        bad = ~(new > 0)
        j = int(np.argmax(bad))
        raise DegenerateCurvatureError(new[j], j, kappa.grid.theta[j])
    return Field(kappa.grid, new)


def evolve_curvature(
    kappa0: Field, params: CurvatureFlowParams, dt: float, t_end: float
) -> tuple[list[float], list[Field]]:
    nsteps = max(0, math.ceil(t_end / dt - 1e-9))
    times, states = [0.0], [kappa0]
    kappa = kappa0
    for i in range(1, nsteps + 1):
        h = dt if i < nsteps else t_end - (nsteps - 1) * dt
        kappa = curvature_flow_step(kappa, params, h)
        times.append(min(i * dt, t_end))
        states.append(kappa)
    return times, states
