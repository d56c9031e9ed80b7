"""Bi-harmonic flow of convex planar curves with forcing, on the support function."""

from .errors import *  # noqa: F401,F403
from .grid import (
    Field,
    ModeSpectrum,
    ThetaGrid,
    apply_linear_operator,
    differentiate,
    make_grid,
    mode_amplitudes,
)
from .geometry import (
    PlaneCurve,
    area_of,
    circle,
    convexity_margin,
    curvature_of,
    curve_of,
    length_of,
    perturbed_circle,
    support_of,
)
from .forcing import (
    Anisotropic,
    Collapse,
    Constant,
    Expression,
    ForcingContext,
    Proportional,
    check_forcing_bound,
    eval_forcing,
    forcing_s_derivative,
    parse_forcing,
)
from .diagnostics import (
    EnergyParams,
    bending_energy,
    classify_monge_ampere,
    convexity_sufficient_condition,
    energy_series,
)
from .evolution import (
    CurvatureFlowParams,
    FlowConfig,
    Trajectory,
    curvature_flow_step,
    evolve,
    evolve_curvature,
    step,
)
from .steady import SteadyOptions, SteadyResult, residual, solve_steady, sweep

__version__ = "0.1.0"
