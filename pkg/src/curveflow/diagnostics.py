"""Energies, Monge-Ampere type classification and per-sample records."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateCurvatureError, InvalidArgumentError
from .forcing import (
    ForcingContext,
    ForcingSpec,
    check_forcing_bound,
    eval_forcing,
    forcing_s_derivative,
)
from .geometry import TOL_CONVEX, area_of, convexity_margin, length_of, radius_of_curvature
from .grid import Field, differentiate, integrate
from .steady import residual as steady_residual

__all__ = [
    "TOL_CLASS",
    "EnergyParams",
    "MAClassification",
    "DiagnosticsRecord",
    "ConvexityCondition",
    "bending_energy",
    "energy_series",
    "classify_monge_ampere",
    "convexity_sufficient_condition",
    "l2_norm",
    "steady_residual",
    "record_of",
    "ForcingBoundMonitor",
    "is_monotone_nonincreasing",
]

TOL_CLASS = 1e-12
TOL_SUFFICIENT = 1e-12

HYPERBOLIC = "hyperbolic"
DEGENERATE = "degenerate"
ELLIPTIC = "elliptic"


@dataclass(frozen=True)
class EnergyParams:
    """Weights of ``E = int (kappa^2 + grad_weight*(kappa_s)^2 + xi*kappa^4) ds``."""

    xi: float = 0.0
    grad_weight: float = 1.0

    def __post_init__(self):
        if not self.xi >= 0:
            raise InvalidArgumentError(f"xi must be >= 0, got {self.xi}")
        if not self.grad_weight > 0:
            raise InvalidArgumentError(f"grad_weight must be > 0, got {self.grad_weight}")


def bending_energy(S: Field, params: EnergyParams = EnergyParams()) -> float:
    rho = radius_of_curvature(S)
    j = int(np.argmin(rho.values))
    if rho.values[j] <= TOL_CONVEX:
        raise DegenerateCurvatureError(rho.values[j], j, S.grid.theta[j])
    kappa = Field(S.grid, 1.0 / rho.values)
    # d/ds = kappa d/dtheta and ds = rho dtheta
    kappa_s = kappa.values * differentiate(kappa, 1).values
    k = kappa.values
    density = k**2 + params.grad_weight * kappa_s**2 + params.xi * k**4
    return integrate(density * rho.values)


def energy_series(trajectory, params: EnergyParams = EnergyParams()):
    """``[(t, E, dE/dt), ...]`` over a trajectory's snapshots.

    dE/dt uses centred differences inside and one-sided ones at the ends.
    """
    times = np.asarray(trajectory.times, dtype=float)
    energies = np.array([bending_energy(S, params) for S in trajectory.states])
    if times.size >= 2:
        rates = np.gradient(energies, times)
    else:
        rates = np.zeros_like(energies)
    return [(float(t), float(e), float(r)) for t, e, r in zip(times, energies, rates)]


@dataclass(frozen=True)
class MAClassification:
    """Type of ``A S_tt + B S_ththtt + C (S_ththt)^2 + D = 0`` with
    ``A = 1, B = S^2, C = -1, D = F - 1``; discriminant ``AB - C^2 = S^2 - 1``."""

    discriminant: np.ndarray
    verdicts: tuple[str, ...]
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray | None
    tol: float = TOL_CLASS

    @property
    def min_discriminant(self) -> float:
        return float(self.discriminant.min())

    @property
    def globally_hyperbolic(self) -> bool:
        return self.min_discriminant > self.tol

    @property
    def verdict(self) -> str:
        """Single verdict when all points agree, else ``'mixed'``."""
        kinds = set(self.verdicts)
        return kinds.pop() if len(kinds) == 1 else "mixed"


def classify_monge_ampere(S: Field, spec: ForcingSpec | None = None, tol: float = TOL_CLASS) -> MAClassification:
    s = S.values
    A = np.ones_like(s)
    B = s * s
    C = -np.ones_like(s)
    disc = A * B - C * C
    verdicts = tuple(
        HYPERBOLIC if d > tol else ELLIPTIC if d < -tol else DEGENERATE for d in disc
    )
    D = None
    if spec is not None:
        D = eval_forcing(spec, ForcingContext.from_support(S)).values - 1.0
    return MAClassification(disc, verdicts, A, B, C, D, tol)


@dataclass(frozen=True)
class ConvexityCondition:
    """Pointwise ``(S'''' + 2S'' + S)'' >= F'(S) (S'' + S)``."""

    holds: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def all_hold(self) -> bool:
        return bool(np.all(self.holds))


def convexity_sufficient_condition(S: Field, spec: ForcingSpec) -> ConvexityCondition:
    dF = forcing_s_derivative(spec, ForcingContext.from_support(S)).values
    bracket = differentiate(S, 4) + 2.0 * differentiate(S, 2) + S
    lhs = differentiate(bracket, 2).values
    rhs = dF * radius_of_curvature(S).values
    return ConvexityCondition(lhs - rhs >= -TOL_SUFFICIENT, lhs, rhs)


def l2_norm(f: Field) -> float:
    """``sqrt(int f^2 dtheta)``."""
    return float(np.sqrt(integrate(f.values**2)))


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    energy: float
    l2_norm: float
    convexity_margin: float
    hyperbolicity_margin: float
    forcing_bound_ok: bool
    length: float
    area: float
    steady_residual: float

    COLUMNS = (
        "t",
        "energy",
        "l2_norm",
        "convexity_margin",
        "hyperbolicity_margin",
        "forcing_bound_ok",
        "length",
        "area",
        "steady_residual",
    )

    def as_row(self) -> tuple:
        return tuple(getattr(self, c) for c in self.COLUMNS)


def record_of(t: float, S: Field, spec: ForcingSpec, params: EnergyParams = EnergyParams()) -> DiagnosticsRecord:
    margin = convexity_margin(S)
    convex = margin > TOL_CONVEX
    energy = bending_energy(S, params) if convex else float("nan")
    area = area_of(S) if convex else float("nan")
    try:
        bound_ok = check_forcing_bound(spec, S).passed
        resid = l2_norm(steady_residual(S, spec))
    except DegenerateCurvatureError:
        bound_ok, resid = False, float("nan")
    return DiagnosticsRecord(
        t=float(t),
        energy=energy,
        l2_norm=l2_norm(S),
        convexity_margin=margin,
        hyperbolicity_margin=float(np.min(S.values**2 - 1.0)),
        forcing_bound_ok=bool(bound_ok),
        length=length_of(S),
        area=area,
        steady_residual=resid,
    )


class ForcingBoundMonitor:
    """Step monitor remembering when ``0 < F <= S^2 - 1`` first fails."""

    def __init__(self, spec: ForcingSpec):
        self.spec = spec
        self.first_violation: float | None = None
        self.report = None

    def __call__(self, t: float, S: Field) -> None:
        if self.first_violation is not None:
            return
        try:
            report = check_forcing_bound(self.spec, S)
        except DegenerateCurvatureError:
            self.first_violation = t
            return
        if not report.passed:
            self.first_violation = t
            self.report = report


def is_monotone_nonincreasing(values: Sequence[float], slack: float = 0.0) -> bool:
    v = np.asarray(values, dtype=float)
    return bool(np.all(np.diff(v) <= slack))
