"""Steady states ``S'''' + 2S'' + S = F(S)`` by Newton-Krylov iteration.

The Jacobian is never formed: the linear part acts exactly in Fourier space
and the forcing part by a forward difference along the Krylov direction.
GMRES is preconditioned with ``1/((k^2 - 1)^2 + 1)``. Fourier modes that the
pinning fixes (``k = 0`` for the mean, ``k = 1`` for translations) are
re-imposed on the iterate and removed from every update.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from .errors import CurveFlowError, DegenerateCurvatureError, InvalidArgumentError
from .forcing import ForcingContext, ForcingSpec, eval_forcing
from .geometry import convexity_margin
from .grid import Field, apply_linear_operator, linear_symbol, mode_amplitudes

__all__ = ["PINNINGS", "SteadyOptions", "SteadyResult", "residual", "solve_steady", "sweep"]

log = logging.getLogger(__name__)

PINNINGS = ("fix_translation", "fix_mean", "both")


def residual(S: Field, spec: ForcingSpec) -> Field:
    """``S'''' + 2 S'' + S - F(S)`` pointwise."""
    F = eval_forcing(spec, ForcingContext.from_support(S))
    return -apply_linear_operator(S) - F


@dataclass(frozen=True)
class SteadyOptions:
    max_iters: int = 50
    residual_tol: float = 1e-10
    pinning: str = "fix_translation"
    mean_value: float | None = None  # fix_mean target; None keeps the initial mean
    fd_epsilon: float = 1e-7
    krylov_rtol: float = 1e-9  # floor of the inexact-Newton forcing term
    krylov_restart: int = 60
    krylov_maxiter: int = 10  # restart cycles

    def __post_init__(self):
        if not self.residual_tol > 0:
            raise InvalidArgumentError(f"residual_tol must be positive, got {self.residual_tol}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise InvalidArgumentError(f"max_iters must be an integer >= 1, got {self.max_iters}")
        if self.pinning not in PINNINGS:
            raise InvalidArgumentError(f"pinning must be one of {PINNINGS}, got {self.pinning!r}")
        if self.krylov_restart < 1 or self.krylov_maxiter < 1 or not self.krylov_rtol > 0:
            raise InvalidArgumentError("Krylov settings must be positive")
        if not self.fd_epsilon > 0:
            raise InvalidArgumentError(f"fd_epsilon must be positive, got {self.fd_epsilon}")

    @property
    def pinned_modes(self) -> tuple[int, ...]:
        return {"fix_translation": (1,), "fix_mean": (0,), "both": (0, 1)}[self.pinning]


@dataclass
class SteadyResult:
    S_inf: Field
    residual_norm: float
    iterations: int
    converged: bool
    convexity_margin: float
    residual_history: list[float] = field(default_factory=list)
    krylov_iterations: list[int] = field(default_factory=list)
    krylov_stagnated: bool = False
    parameter: float | None = None
    error: str | None = None

    @property
    def non_circularity(self) -> float:
        """Largest Fourier amplitude at wavenumbers ``k >= 2``."""
        return mode_amplitudes(self.S_inf).content_above(2)


def _max_norm(f: Field) -> float:
    return float(np.max(np.abs(f.values)))


def solve_steady(S_init: Field, spec: ForcingSpec, opts: SteadyOptions = SteadyOptions()) -> SteadyResult:
    grid = S_init.grid
    n = grid.n
    pinned = list(opts.pinned_modes)
    mean_target = opts.mean_value if opts.mean_value is not None else float(np.mean(S_init.values))
    stiff = -linear_symbol(grid)  # (k^2 - 1)^2
    precond = 1.0 / (stiff + 1.0)
    precond[pinned] = 1.0

    def impose(values: np.ndarray) -> Field:
        c = np.fft.rfft(values)
        if 0 in pinned:
            c[0] = mean_target * n
        if 1 in pinned:
            c[1] = 0.0
        return Field(grid, np.fft.irfft(c, n=n))

    def project(values: np.ndarray) -> np.ndarray:
        c = np.fft.rfft(values)
        c[pinned] = 0.0
        return np.fft.irfft(c, n=n)

    def forcing_values(values: np.ndarray) -> np.ndarray:
        return eval_forcing(spec, ForcingContext.from_support(Field(grid, values))).values

    S = impose(S_init.values)
    r = residual(S, spec)
    rnorm = _max_norm(r)
    history = [rnorm]
    kry_iters: list[int] = []
    stagnated = False
    iterations = 0

    while rnorm > opts.residual_tol and iterations < opts.max_iters:
        iterations += 1
        s_vals = S.values
        F0 = forcing_values(s_vals)
        s_scale = 1.0 + np.max(np.abs(s_vals))

        def jac(v, s_vals=s_vals, F0=F0, s_scale=s_scale):
            v = np.asarray(v, dtype=float).reshape(-1)
            vp = project(v)
            vmax = np.max(np.abs(vp))
            if vmax == 0.0:
                out = np.zeros(n)
            else:
                eps = opts.fd_epsilon * s_scale / vmax
                lin = np.fft.irfft(stiff * np.fft.rfft(vp), n=n)
                out = project(lin - (forcing_values(s_vals + eps * vp) - F0) / eps)
            return out + (v - project(v))

        def prec(v):
            return np.fft.irfft(precond * np.fft.rfft(np.asarray(v).reshape(-1)), n=n)

        A = LinearOperator((n, n), matvec=jac, dtype=float)
        M = LinearOperator((n, n), matvec=prec, dtype=float)
        counter = []
        rhs = -project(r.values)
        # inexact Newton: solve only as accurately as the current residual
        # warrants, which keeps convergence quadratic without chasing the
        # finite-difference noise floor
        eta = min(0.1, max(opts.krylov_rtol, 1e-2 * rnorm))
        try:
            delta, info = gmres(
                A, rhs, M=M, rtol=eta, atol=0.0, restart=min(n, opts.krylov_restart),
                maxiter=opts.krylov_maxiter, callback=counter.append, callback_type="pr_norm",
            )
        except CurveFlowError as exc:
            log.warning("Krylov solve failed: %s", exc)
            stagnated = True
            break
        kry_iters.append(len(counter))
        if info != 0:
            stagnated = True
        delta = project(delta)

        # backtracking on the max-norm residual
        lam = 1.0
        accepted = False
        for _ in range(30):
            try:
                trial = impose(s_vals + lam * delta)
                r_trial = residual(trial, spec)
            except (DegenerateCurvatureError, CurveFlowError):
                lam *= 0.5
                continue
            t_norm = _max_norm(r_trial)
            if t_norm < (1.0 - 1e-4 * lam) * rnorm or t_norm <= opts.residual_tol:
                accepted = True
                break
            lam *= 0.5
        if not accepted:
            stagnated = True
            break
        S, r, rnorm = trial, r_trial, t_norm
        history.append(rnorm)

    converged = rnorm <= opts.residual_tol
    return SteadyResult(
        S_inf=S,
        residual_norm=rnorm,
        iterations=iterations,
        converged=converged,
        convexity_margin=convexity_margin(S),
        residual_history=history,
        krylov_iterations=kry_iters,
        krylov_stagnated=stagnated,
    )


def sweep(
    family: Callable[[float], ForcingSpec],
    values: Iterable[float],
    S_init: Field,
    opts: SteadyOptions = SteadyOptions(),
) -> list[SteadyResult]:
    """Solve for each parameter value in order, warm-starting from the last success."""
    results = []
    start = S_init
    for value in values:
        try:
            res = solve_steady(start, family(value), opts)
        except CurveFlowError as exc:
            res = SteadyResult(start, float("nan"), 0, False, convexity_margin(start), error=str(exc))
        res.parameter = float(value)
        results.append(res)
        if res.converged:
            start = res.S_inf
    return results
