"""Uniform periodic angle grid and Fourier pseudospectral calculus on it.

All fields live on ``theta_j = 2*pi*j/n`` for ``j = 0..n-1`` with ``n`` even.
Derivatives are taken by multiplying real-FFT coefficients by ``(i k)^p``;
the Nyquist coefficient is dropped for odd ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import InvalidArgumentError

__all__ = [
    "ThetaGrid",
    "Field",
    "ModeSpectrum",
    "make_grid",
    "differentiate",
    "apply_linear_operator",
    "linear_symbol",
    "mode_amplitudes",
    "integrate",
    "resample",
]

# Coefficients below CHOP_TOL * max|c_k| are rounding noise; dropping them
# keeps k^4 amplification from turning 1e-16 noise into 1e-8 residuals.
CHOP_TOL = 4.0 * np.finfo(float).eps


@dataclass(frozen=True)
class ThetaGrid:
    n: int

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise InvalidArgumentError(f"grid size must be an integer, got {self.n!r}")
        if self.n < 8 or self.n % 2:
            raise InvalidArgumentError(f"grid size must be even and >= 8, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def spacing(self) -> float:
        return 2.0 * np.pi / self.n

    @cached_property
    def theta(self) -> np.ndarray:
        th = np.arange(self.n) * self.spacing
        th.flags.writeable = False
        return th

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        k = np.arange(self.n // 2 + 1, dtype=float)
        k.flags.writeable = False
        return k

    def field(self, values) -> "Field":
        return Field(self, values)

    def sample(self, func: Callable[[np.ndarray], np.ndarray]) -> "Field":
        """Evaluate ``func(theta)`` on the grid."""
        return Field(self, np.broadcast_to(func(self.theta), (self.n,)))

    def constant(self, value: float) -> "Field":
        return Field(self, np.full(self.n, float(value)))


def make_grid(n: int) -> ThetaGrid:
    if isinstance(n, np.integer):
        n = int(n)
    return ThetaGrid(n)


@dataclass(frozen=True, eq=False)
class Field:
    """Real samples of a 2*pi-periodic function on a :class:`ThetaGrid`."""

    grid: ThetaGrid
    values: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True).reshape(-1)
        if v.shape[0] != self.grid.n:
            raise InvalidArgumentError(
                f"field has {v.shape[0]} samples but grid has n = {self.grid.n}"
            )
        if not np.all(np.isfinite(v)):
            raise InvalidArgumentError("field values must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def theta(self) -> np.ndarray:
        return self.grid.theta

    def __len__(self):
        return self.grid.n

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def _coerce(self, other):
        if isinstance(other, Field):
            if other.grid != self.grid:
                raise InvalidArgumentError("fields live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return Field(self.grid, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Field(self.grid, self.values - self._coerce(other))

    def __rsub__(self, other):
        return Field(self.grid, self._coerce(other) - self.values)

    def __mul__(self, other):
        return Field(self.grid, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return Field(self.grid, -self.values)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True)
class ModeSpectrum:
    """Per-wavenumber amplitudes ``k = 0..n/2``.

    A field ``a*cos(k*theta + phi)`` has amplitude ``|a|`` at ``k``.
    """

    amplitudes: np.ndarray

    def __getitem__(self, k):
        return self.amplitudes[k]

    def mean_square(self) -> float:
        """Mean square of the field, recovered through Parseval."""
        a = self.amplitudes
        return float(a[0] ** 2 + 0.5 * np.sum(a[1:-1] ** 2) + a[-1] ** 2)

    def content_above(self, k_min: int) -> float:
        """Largest amplitude among wavenumbers ``>= k_min``."""
        tail = self.amplitudes[k_min:]
        return float(tail.max()) if tail.size else 0.0


def _chop(coeffs: np.ndarray) -> np.ndarray:
    mags = np.abs(coeffs)
    top = mags.max()
    if top == 0.0:
        return coeffs
    out = coeffs.copy()
    out[mags <= CHOP_TOL * top] = 0.0
    return out


def _deriv_multiplier(grid: ThetaGrid, order: int) -> np.ndarray:
    mult = (1j * grid.wavenumbers) ** order
    if order % 2:
        mult[-1] = 0.0
    return mult


def differentiate(f: Field, order: int = 1) -> Field:
    """Spectral derivative of ``f`` of the given order (1 to 4)."""
    if order not in (1, 2, 3, 4):
        raise InvalidArgumentError(f"unsupported derivative order {order!r}")
    coeffs = _chop(np.fft.rfft(f.values))
    out = np.fft.irfft(coeffs * _deriv_multiplier(f.grid, order), n=f.grid.n)
    return Field(f.grid, out)


def linear_symbol(grid: ThetaGrid) -> np.ndarray:
    """Fourier symbol ``-(k^2 - 1)^2`` of ``L f = -(f'''' + 2 f'' + f)``."""
    k = grid.wavenumbers
    return -((k * k - 1.0) ** 2)


def apply_linear_operator(f: Field) -> Field:
    coeffs = _chop(np.fft.rfft(f.values))
    return Field(f.grid, np.fft.irfft(coeffs * linear_symbol(f.grid), n=f.grid.n))


def mode_amplitudes(f: Field) -> ModeSpectrum:
    n = f.grid.n
    c = np.abs(np.fft.rfft(f.values)) / n
    c[1:-1] *= 2.0
    return ModeSpectrum(c)


def integrate(f) -> float:
    """Periodic trapezoid rule over [0, 2*pi); exact for band-limited integrands."""
    values = f.values if isinstance(f, Field) else np.asarray(f, dtype=float)
    return float(2.0 * np.pi * np.mean(values))


def resample(f: Field, grid: ThetaGrid) -> Field:
    """Fourier interpolation of ``f`` onto another grid."""
    if grid == f.grid:
        return f
    n_old, n_new = f.grid.n, grid.n
    c = np.fft.rfft(f.values) / n_old
    out = np.zeros(n_new // 2 + 1, dtype=complex)
    m = min(n_old, n_new) // 2
    out[:m] = c[:m]
    if n_new > n_old:
        # old Nyquist term becomes an ordinary (conjugate-paired) mode
        out[m] = 0.5 * c[m]
    else:
        # only the cosine part of mode m survives as the new Nyquist term
        out[m] = 2.0 * c[m].real
    return Field(grid, np.fft.irfft(out * n_new, n=n_new))
