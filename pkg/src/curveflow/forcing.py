"""Forcing terms F evaluated from the instantaneous support field."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import (
    ForcingEvaluationError,
    InvalidArgumentError,
    InvalidContextError,
    UnsupportedDerivativeError,
)
from .expression import (
    BinOp,
    Neg,
    Node,
    Num,
    Pow,
    Var,
    evaluate,
    evaluate_with_s_derivative,
    parse_expression,
    variables_of,
)
from .geometry import curvature_of
from .grid import Field, ThetaGrid, differentiate

__all__ = [
    "Constant",
    "Proportional",
    "Anisotropic",
    "Collapse",
    "Expression",
    "ForcingSpec",
    "ForcingContext",
    "BoundReport",
    "parse_forcing",
    "eval_forcing",
    "forcing_s_derivative",
    "check_forcing_bound",
    "describe",
    "variables_used",
]


@dataclass(frozen=True)
class Constant:
    value: float


@dataclass(frozen=True)
class Proportional:
    """``F = c*S``."""

    c: float


@dataclass(frozen=True)
class Anisotropic:
    """``F = alpha*kappa^2 + beta*S_thetatheta``."""

    alpha: float
    beta: float


@dataclass(frozen=True)
class Collapse:
    """``F = -beta*S`` with ``beta > 0``."""

    beta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise InvalidArgumentError(f"collapse rate must be positive, got {self.beta}")


@dataclass(frozen=True)
class Expression:
    ast: Node
    text: str = ""


ForcingSpec = Union[Constant, Proportional, Anisotropic, Collapse, Expression]

_BUILTIN_VARS = {
    Constant: frozenset(),
    Proportional: frozenset({"S"}),
    Collapse: frozenset({"S"}),
    Anisotropic: frozenset({"kappa", "S_thetatheta"}),
}


def variables_used(spec: ForcingSpec) -> frozenset[str]:
    if isinstance(spec, Expression):
        return frozenset(variables_of(spec.ast))
    return _BUILTIN_VARS[type(spec)]


def describe(spec: ForcingSpec) -> str:
    """Canonical text for a spec; parses back to an equivalent spec."""
    if isinstance(spec, Constant):
        return repr(float(spec.value))
    if isinstance(spec, Proportional):
        return f"{spec.c!r}*S"
    if isinstance(spec, Collapse):
        return f"-{spec.beta!r}*S"
    if isinstance(spec, Anisotropic):
        return f"{spec.alpha!r}*kappa^2 + {spec.beta!r}*S_thetatheta"
    return spec.text


class ForcingContext:
    """Named fields a forcing may reference, all on one grid.

    Build with :meth:`from_support` to derive ``S_theta``, ``S_thetatheta``
    and ``kappa`` on demand, or pass arrays explicitly.
    """

    def __init__(self, grid: ThetaGrid, **fields):
        unknown = set(fields) - {"S", "S_theta", "S_thetatheta", "kappa"}
        if unknown:
            raise InvalidContextError(f"unknown context fields {sorted(unknown)}")
        self.grid = grid
        self._values: dict[str, np.ndarray] = {}
        self._lazy: dict[str, Callable[[], np.ndarray]] = {}
        for name, value in fields.items():
            if value is None:
                continue
            arr = np.asarray(value.values if isinstance(value, Field) else value, dtype=float)
            arr = np.broadcast_to(arr, (grid.n,))
            self._values[name] = arr
        th = grid.theta
        self._values["theta"] = th
        self._lazy["sin(theta)"] = lambda: np.sin(th)
        self._lazy["cos(theta)"] = lambda: np.cos(th)

    @classmethod
    def from_support(cls, S: Field) -> "ForcingContext":
        ctx = cls(S.grid, S=S.values)
        ctx._lazy["S_theta"] = lambda: differentiate(S, 1).values
        ctx._lazy["S_thetatheta"] = lambda: differentiate(S, 2).values
        ctx._lazy["kappa"] = lambda: curvature_of(S).values
        return ctx

    def get(self, name: str) -> np.ndarray:
        if name not in self._values:
            if name not in self._lazy:
                raise InvalidContextError(f"forcing needs {name!r} but the context does not provide it")
            self._values[name] = self._lazy.pop(name)()
        return self._values[name]

    def has(self, name: str) -> bool:
        return name in self._values or name in self._lazy


def _sugar(node: Node) -> ForcingSpec | None:
    def number(n):
        if isinstance(n, Num):
            return n.value
        if isinstance(n, Neg) and isinstance(n.operand, Num):
            return -n.operand.value
        return None

    def scaled(n, var_match):
        if isinstance(n, BinOp) and n.op == "*" and var_match(n.right):
            return number(n.left)
        return None

    value = number(node)
    if value is not None:
        return Constant(value)
    is_s = lambda n: n == Var("S")
    if isinstance(node, BinOp) and node.op == "*" and is_s(node.right):
        # "-b*S" reads as (-b)*S
        if isinstance(node.left, Neg) and isinstance(node.left.operand, Num) and node.left.operand.value > 0:
            return Collapse(node.left.operand.value)
        c = number(node.left)
        if c is not None:
            return Proportional(c)
    if isinstance(node, BinOp) and node.op == "+":
        a = scaled(node.left, lambda n: n == Pow(Var("kappa"), 2))
        b = scaled(node.right, lambda n: n == Var("S_thetatheta"))
        if a is not None and b is not None:
            return Anisotropic(a, b)
    return None


def parse_forcing(text: str, normalize: bool = True) -> ForcingSpec:
    """Parse forcing text; recognised sugar forms become built-in specs."""
    ast = parse_expression(text)
    if normalize:
        builtin = _sugar(ast)
        if builtin is not None:
            return builtin
    return Expression(ast, text.strip())


def _checked(values, grid: ThetaGrid, what: str) -> Field:
    arr = np.broadcast_to(np.asarray(values, dtype=float), (grid.n,))
    bad = ~np.isfinite(arr)
    if bad.any():
        j = int(np.argmax(bad))
        raise ForcingEvaluationError(f"{what} is not finite", j, float(grid.theta[j]))
    return Field(grid, arr)


def eval_forcing(spec: ForcingSpec, ctx: ForcingContext) -> Field:
    if isinstance(spec, Constant):
        return ctx.grid.constant(spec.value)
    if isinstance(spec, Proportional):
        return _checked(spec.c * ctx.get("S"), ctx.grid, "forcing")
    if isinstance(spec, Collapse):
        return _checked(-spec.beta * ctx.get("S"), ctx.grid, "forcing")
    if isinstance(spec, Anisotropic):
        kappa = ctx.get("kappa")
        return _checked(spec.alpha * kappa**2 + spec.beta * ctx.get("S_thetatheta"), ctx.grid, "forcing")
    env = {name: ctx.get(name) for name in variables_of(spec.ast)}
    with np.errstate(all="ignore"):
        out = evaluate(spec.ast, env)
    return _checked(out, ctx.grid, "forcing")


def forcing_s_derivative(spec: ForcingSpec, ctx: ForcingContext) -> Field:
    """Pointwise dF/dS for forcings that depend on S alone (theta allowed)."""
    grid = ctx.grid
    if isinstance(spec, Constant):
        return grid.constant(0.0)
    if isinstance(spec, Proportional):
        return grid.constant(spec.c)
    if isinstance(spec, Collapse):
        return grid.constant(-spec.beta)
    if isinstance(spec, Expression):
        shape_vars = variables_of(spec.ast) & {"S_theta", "S_thetatheta", "kappa"}
        if not shape_vars:
            env = {name: ctx.get(name) for name in variables_of(spec.ast)}
            with np.errstate(all="ignore"):
                _, d = evaluate_with_s_derivative(spec.ast, env)
            return _checked(d, grid, "dF/dS")
    raise UnsupportedDerivativeError(
        f"dF/dS is undefined for {describe(spec)!r} because it depends on derivatives of S; "
        "use the matrix-free Jacobian in curveflow.steady instead"
    )


@dataclass(frozen=True)
class BoundReport:
    """Outcome of checking ``0 < F <= S^2 - 1`` on the grid."""

    passed: bool
    min_forcing: float
    min_upper_margin: float
    worst_margin: float
    worst_index: int
    worst_theta: float


def check_forcing_bound(spec: ForcingSpec, S: Field) -> BoundReport:
    F = eval_forcing(spec, ForcingContext.from_support(S)).values
    upper = S.values**2 - 1.0 - F
    pointwise = np.minimum(F, upper)
    j = int(np.argmin(pointwise))
    return BoundReport(
        passed=bool(np.all(F > 0.0) and np.all(upper >= 0.0)),
        min_forcing=float(F.min()),
        min_upper_margin=float(upper.min()),
        worst_margin=float(pointwise[j]),
        worst_index=j,
        worst_theta=float(S.grid.theta[j]),
    )
