"""Flat ``key = value`` run configuration."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Mapping

from .diagnostics import EnergyParams
from .errors import ConfigError, CurveFlowError, InvalidArgumentError
from .evolution import SCHEMES, FlowConfig
from .forcing import ForcingSpec, parse_forcing
from .grid import make_grid
from .steady import PINNINGS, SteadyOptions

__all__ = ["MODES", "FORMATS", "KEYS", "RunConfig", "load_config", "parse_config_text", "resolve"]

MODES = ("evolve", "steady", "analyze", "render")
FORMATS = ("csv", "json", "svg", "png")
KEYS = (
    "mode",
    "n",
    "dt",
    "t_end",
    "scheme",
    "record_every",
    "convexity_policy",
    "forcing",
    "initial",
    "xi",
    "grad_weight",
    "pinning",
    "residual_tol",
    "max_iters",
    "out_dir",
    "formats",
    "seed",
)
ENV_OUT = "CURVEFLOW_OUT"


@dataclass(frozen=True)
class RunConfig:
    mode: str
    initial: str
    forcing: str = "0"
    n: int = 256
    dt: float = 1e-3
    t_end: float = 1.0
    scheme: str = "IMEX2"
    record_every: int = 100
    convexity_policy: str = "abort"
    xi: float = 0.0
    grad_weight: float = 1.0
    pinning: str = "fix_translation"
    residual_tol: float = 1e-10
    max_iters: int = 50
    out_dir: str = "curveflow_out"
    formats: tuple[str, ...] = ("csv", "json", "svg", "png")
    seed: int = 0  # reserved; the core is deterministic

    @property
    def forcing_spec(self) -> ForcingSpec:
        return parse_forcing(self.forcing)

    def flow_config(self) -> FlowConfig:
        return FlowConfig(
            dt=self.dt,
            t_end=self.t_end,
            scheme=self.scheme,
            record_every=self.record_every,
            convexity_policy=self.convexity_policy,
            n=self.n,
        )

    def steady_options(self) -> SteadyOptions:
        kind, _, value = self.pinning.partition(" ")
        return SteadyOptions(
            max_iters=self.max_iters,
            residual_tol=self.residual_tol,
            pinning=kind,
            mean_value=float(value) if value.strip() else None,
        )

    def energy_params(self) -> EnergyParams:
        return EnergyParams(xi=self.xi, grad_weight=self.grad_weight)

    def echo(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = ",".join(value)
            lines.append(f"{f.name} = {value}")
        return "\n".join(lines) + "\n"


_INT_KEYS = {"n", "record_every", "max_iters", "seed"}
_FLOAT_KEYS = {"dt", "t_end", "xi", "grad_weight", "residual_tol"}


def _unquote(value: str) -> str:
    value = value.strip()
    if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
        return value[1:-1]
    return value


def parse_config_text(text: str) -> dict[str, str]:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = _strip_comment(value)
        if key not in KEYS:
            raise ConfigError(f"unknown key (accepted keys: {', '.join(KEYS)})", key)
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key", key)
        raw[key] = _unquote(value)
    return raw


def _strip_comment(value: str) -> str:
    # a '#' outside quotes starts a comment
    m = re.match(r"""\s*("[^"]*"|'[^']*')\s*(#.*)?$""", value)
    if m:
        return m.group(1)
    return value.split("#", 1)[0].strip()


def _convert(key: str, value: str):
    try:
        if key in _INT_KEYS:
            f = float(value)
            if f != int(f):
                raise ValueError
            return int(f)
        if key in _FLOAT_KEYS:
            return float(value)
    except ValueError:
        kind = "an integer" if key in _INT_KEYS else "a number"
        raise ConfigError(f"expected {kind}, got {value!r}", key) from None
    if key == "formats":
        items = [v.strip() for v in value.split(",") if v.strip()]
        bad = [v for v in items if v not in FORMATS]
        if bad:
            raise ConfigError(f"unsupported formats {bad}; choose from {', '.join(FORMATS)}", key)
        return tuple(f for f in FORMATS if f in items)
    return value


def _validate(cfg: RunConfig, base_dir: Path | None) -> RunConfig:
    if cfg.mode not in MODES:
        raise ConfigError(f"must be one of {', '.join(MODES)}, got {cfg.mode!r}", "mode")
    if cfg.scheme not in SCHEMES:
        raise ConfigError(f"must be one of {', '.join(SCHEMES)}, got {cfg.scheme!r}", "scheme")
    if cfg.pinning.split(" ")[0] not in PINNINGS:
        raise ConfigError(f"must be one of {', '.join(PINNINGS)} (optionally followed by a mean value)", "pinning")
    checks = [
        ("n", lambda: make_grid(cfg.n)),
        ("dt", lambda: FlowConfig(dt=cfg.dt)),
        ("t_end", lambda: FlowConfig(t_end=cfg.t_end)),
        ("record_every", lambda: FlowConfig(record_every=cfg.record_every)),
        ("convexity_policy", lambda: FlowConfig(convexity_policy=cfg.convexity_policy)),
        ("xi", lambda: EnergyParams(xi=cfg.xi)),
        ("grad_weight", lambda: EnergyParams(grad_weight=cfg.grad_weight)),
        ("residual_tol", lambda: SteadyOptions(residual_tol=cfg.residual_tol)),
        ("max_iters", lambda: SteadyOptions(max_iters=cfg.max_iters)),
        ("pinning", cfg.steady_options),
    ]
    for key, check in checks:
        try:
            check()
        except (InvalidArgumentError, ValueError) as exc:
            raise ConfigError(str(exc), key) from None
    if cfg.mode != "render":
        try:
            cfg.forcing_spec
        except CurveFlowError as exc:
            raise ConfigError(f"cannot parse {cfg.forcing!r}: {exc}", "forcing") from None
    return replace(cfg, initial=_resolve_initial(cfg.initial, base_dir))


_BUILTIN_INITIAL = {"circle": 1, "perturbed_circle": 3}


def _resolve_initial(initial: str, base_dir: Path | None) -> str:
    words = initial.split()
    if not words:
        raise ConfigError("missing initial condition", "initial")
    if words[0] in _BUILTIN_INITIAL:
        if len(words) != _BUILTIN_INITIAL[words[0]] + 1:
            raise ConfigError(
                "expected 'circle R' or 'perturbed_circle R k eps'", "initial"
            )
        try:
            [float(w) for w in words[1:]]
        except ValueError:
            raise ConfigError(f"non-numeric parameter in {initial!r}", "initial") from None
        return initial
    path = Path(initial)
    if not path.is_absolute() and not path.exists() and base_dir is not None:
        path = base_dir / path
    if not path.exists():
        raise ConfigError(f"file not found: {initial}", "initial")
    return str(path)


def resolve(
    raw: Mapping[str, str],
    overrides: Mapping[str, str] | None = None,
    environ: Mapping[str, str] | None = None,
    base_dir: Path | None = None,
) -> RunConfig:
    """Merge file values, the environment and explicit overrides (in that order)."""
    environ = os.environ if environ is None else environ
    merged = dict(raw)
    if environ.get(ENV_OUT):
        merged["out_dir"] = environ[ENV_OUT]
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in KEYS:
            raise ConfigError(f"unknown key (accepted keys: {', '.join(KEYS)})", key)
        merged[key] = value
    for key in ("mode", "initial"):
        if key not in merged:
            raise ConfigError("required key is missing", key)
    if merged["mode"] in ("evolve", "steady", "analyze") and "forcing" not in merged:
        raise ConfigError("required key is missing", "forcing")
    kwargs = {k: _convert(k, v) for k, v in merged.items()}
    return _validate(RunConfig(**kwargs), base_dir)


def load_config(path, overrides: Mapping[str, str] | None = None, environ=None) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    return resolve(parse_config_text(text), overrides, environ, base_dir=path.parent)
