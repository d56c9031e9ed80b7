"""Support functions, plane curves, curvature and global shape quantities.

Conventions: the outward normal at angle theta is ``(cos theta, sin theta)``
so that ``S(theta) = <X, (cos theta, sin theta)>``; curves are traversed
counterclockwise as theta increases.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import DegenerateCurvatureError, InvalidArgumentError, NonConvexInputError
from .grid import Field, ThetaGrid, differentiate, integrate, make_grid

__all__ = [
    "TOL_CONVEX",
    "PlaneCurve",
    "SupportField",
    "CurvatureField",
    "radius_of_curvature",
    "curvature_of",
    "convexity_margin",
    "curve_of",
    "support_of",
    "length_of",
    "area_of",
    "circle",
    "perturbed_circle",
]

TOL_CONVEX = 1e-10

SupportField = Field
CurvatureField = Field


@dataclass(frozen=True, eq=False)
class PlaneCurve:
    """Closed polygon; point ``n-1`` connects back to point ``0``."""

    points: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise InvalidArgumentError("curve points must have shape (n, 2)")
        if pts.shape[0] < 3:
            raise InvalidArgumentError("a closed curve needs at least 3 points")
        if not np.all(np.isfinite(pts)):
            raise InvalidArgumentError("curve coordinates must be finite")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]

    def __len__(self):
        return self.points.shape[0]

    def translated(self, dx: float, dy: float) -> "PlaneCurve":
        return PlaneCurve(self.points + np.array([dx, dy]))

    def signed_area(self) -> float:
        x, y = self.x, self.y
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def turn_cross_products(self) -> np.ndarray:
        """z-component of ``e_i x e_{i+1}`` at every vertex."""
        edges = np.roll(self.points, -1, axis=0) - self.points
        nxt = np.roll(edges, -1, axis=0)
        return edges[:, 0] * nxt[:, 1] - edges[:, 1] * nxt[:, 0]


def radius_of_curvature(S: Field) -> Field:
    """``S_thth + S``; equals ``1/kappa`` for a strictly convex curve."""
    return differentiate(S, 2) + S


def convexity_margin(S: Field) -> float:
    return float(np.min(radius_of_curvature(S).values))


def curvature_of(S: Field) -> Field:
    rho = radius_of_curvature(S).values
    j = int(np.argmin(rho))
    if rho[j] <= TOL_CONVEX:
        raise DegenerateCurvatureError(rho[j], j, S.grid.theta[j])
    return Field(S.grid, 1.0 / rho)


def curve_of(S: Field) -> PlaneCurve:
    th = S.grid.theta
    s = S.values
    s_th = differentiate(S, 1).values
    c, sn = np.cos(th), np.sin(th)
    return PlaneCurve(np.column_stack([s * c - s_th * sn, s * sn + s_th * c]))


def support_of(curve: PlaneCurve, grid: ThetaGrid | None = None) -> Field:
    """Support function of the convex polygon ``curve`` sampled on ``grid``.

    ``grid`` defaults to one with ``len(curve)`` samples.
    """
    cross = curve.turn_cross_products()
    if curve.signed_area() <= 0.0:
        raise NonConvexInputError("curve must be counterclockwise")
    if np.any(cross <= 0.0):
        j = int(np.argmin(cross))
        raise NonConvexInputError(f"curve is not strictly convex at vertex {j}")
    total_turn = np.sum(np.angle(_edge_turns(curve)))
    if abs(total_turn - 2.0 * np.pi) > 1e-6:
        raise NonConvexInputError("curve winds more than once")
    if grid is None:
        grid = make_grid(len(curve))
    th = grid.theta
    directions = np.column_stack([np.cos(th), np.sin(th)])
    proj = curve.points @ directions.T  # (points, angles)
    return Field(grid, proj.max(axis=0))


def _edge_turns(curve: PlaneCurve) -> np.ndarray:
    edges = np.roll(curve.points, -1, axis=0) - curve.points
    z = edges[:, 0] + 1j * edges[:, 1]
    return np.roll(z, -1) / z


def length_of(S: Field) -> float:
    return integrate(S)


def area_of(S: Field) -> float:
    rho = radius_of_curvature(S)
    j = int(np.argmin(rho.values))
    if rho.values[j] <= TOL_CONVEX:
        raise DegenerateCurvatureError(rho.values[j], j, S.grid.theta[j])
    return 0.5 * integrate(S.values * rho.values)


def circle(grid: ThetaGrid, radius: float, center=(0.0, 0.0)) -> Field:
    a, b = center
    return grid.sample(lambda th: radius + a * np.cos(th) + b * np.sin(th))


def perturbed_circle(grid: ThetaGrid, radius: float, k: int, eps: float) -> Field:
    """``radius + eps*cos(k*theta)``."""
    return grid.sample(lambda th: radius + eps * np.cos(k * th))
