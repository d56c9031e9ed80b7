import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curveflow import (
    Collapse,
    Constant,
    EnergyParams,
    FlowConfig,
    Proportional,
    bending_energy,
    classify_monge_ampere,
    convexity_sufficient_condition,
    energy_series,
    evolve,
    make_grid,
    perturbed_circle,
)
from curveflow.diagnostics import (
    ForcingBoundMonitor,
    is_monotone_nonincreasing,
    l2_norm,
    record_of,
)
from curveflow.errors import DegenerateCurvatureError, InvalidArgumentError, UnsupportedDerivativeError
from curveflow.forcing import Anisotropic

G = make_grid(256)


class TestBendingEnergy:
    def test_circle(self):
        assert bending_energy(G.constant(2.0)) == pytest.approx(np.pi, rel=1e-14)

    def test_circle_with_quartic_term(self):
        E = bending_energy(G.constant(2.0), EnergyParams(xi=1.0, grad_weight=1.0))
        assert E == pytest.approx(2 * np.pi * 0.625, rel=1e-14)

    def test_translated_circle(self):
        S = G.sample(lambda th: 2 + 0.5 * np.cos(th))
        assert bending_energy(S) == pytest.approx(np.pi, rel=1e-13)

    @settings(max_examples=30, deadline=None)
    @given(
        st.integers(2, 8), st.floats(0, 0.1), st.floats(-2, 2), st.floats(-2, 2),
        st.floats(0, 1), st.sampled_from([0.5, 1.0]),
    )
    def test_translation_invariance(self, k, eps, a, b, xi, w):
        S = perturbed_circle(G, 2.0, k, eps / (k * k - 1))
        T = S + G.sample(lambda th: a * np.cos(th) + b * np.sin(th))
        p = EnergyParams(xi=xi, grad_weight=w)
        assert bending_energy(T, p) == pytest.approx(bending_energy(S, p), abs=1e-10)

    def test_nonconvex(self):
        with pytest.raises(DegenerateCurvatureError):
            bending_energy(G.sample(lambda th: 0.1 + np.cos(2 * th)))

    @pytest.mark.parametrize("kwargs", [dict(xi=-0.1), dict(grad_weight=0.0)])
    def test_params_validated(self, kwargs):
        with pytest.raises(InvalidArgumentError):
            EnergyParams(**kwargs)

    def test_gradient_term_against_quadrature_oracle(self):
        # independent evaluation of int (kappa_s)^2 ds on a fine grid with
        # analytic derivatives of S = 2 + 0.1 cos 2th
        th = np.linspace(0, 2 * np.pi, 20001)[:-1]
        rho = 2 - 0.3 * np.cos(2 * th)
        rho_th = 0.6 * np.sin(2 * th)
        kappa = 1 / rho
        kappa_s = kappa * (-rho_th / rho**2)
        want = 2 * np.pi * np.mean((kappa**2 + kappa_s**2) * rho)
        got = bending_energy(perturbed_circle(G, 2.0, 2, 0.1))
        assert got == pytest.approx(want, rel=1e-12)


class TestEnergySeries:
    def test_stationary_circle(self):
        tr = evolve(G.constant(2.0), Proportional(1.0), FlowConfig(dt=1e-3, t_end=0.5, record_every=50))
        for _, E, dE in energy_series(tr):
            assert abs(dE) <= 1e-8
            assert E == pytest.approx(np.pi, rel=1e-12)

    def test_unforced_circle_energy_rises_as_it_shrinks(self):
        # With F = 0 the mean obeys dS0/dt = -S0, so a circle of radius R(t) = R e^{-t}
        # has E = 2 pi / R(t): the energy grows. This is the derived oracle used in
        # place of a non-increasing claim that does not hold for this flow.
        tr = evolve(G.constant(2.0), Constant(0.0), FlowConfig(dt=1e-4, t_end=0.2, record_every=200))
        series = energy_series(tr)
        for t, E, dE in series:
            assert E == pytest.approx(2 * np.pi / tr.final.values[0] * np.exp(t - tr.times[-1]), rel=1e-6)
        rates = [dE for _, _, dE in series]
        assert all(r > 0 for r in rates)

    def test_nonincreasing_when_mean_is_neutral(self):
        tr = evolve(perturbed_circle(G, 2.0, 3, 0.1), Proportional(1.0), FlowConfig(dt=1e-3, t_end=1.0, record_every=20))
        energies = [E for _, E, _ in energy_series(tr, EnergyParams(xi=0.1))]
        assert is_monotone_nonincreasing(energies, slack=1e-10)

    def test_collapse_log_energy_linear(self):
        beta = 0.4
        tr = evolve(G.constant(1.0), Collapse(beta), FlowConfig(dt=1e-4, t_end=1.0, record_every=1000))
        t = np.array(tr.times)
        logE = np.log([E for _, E, _ in energy_series(tr)])
        slope, icpt = np.polyfit(t, logE, 1)
        assert slope == pytest.approx(1 + beta, rel=1e-3)
        assert np.max(np.abs(logE - (slope * t + icpt))) <= 1e-6


class TestMongeAmpere:
    @pytest.mark.parametrize(
        "value, verdict, disc",
        [(0.5, "elliptic", -0.75), (1.0, "degenerate", 0.0), (2.0, "hyperbolic", 3.0)],
    )
    def test_constant_fields(self, value, verdict, disc):
        c = classify_monge_ampere(G.constant(value), Constant(1.0))
        assert c.verdict == verdict
        assert np.all(c.discriminant == disc)
        assert c.globally_hyperbolic == (verdict == "hyperbolic")
        assert np.all(c.A == 1) and np.all(c.C == -1) and np.all(c.B == value**2)
        assert np.all(c.D == 0.0)

    def test_mixed_pointwise(self):
        S = G.sample(lambda th: 1 + 0.5 * np.cos(2 * th))
        c = classify_monge_ampere(S)
        assert c.verdict == "mixed"
        expected = np.where(S.values**2 - 1 > 1e-12, "hyperbolic", np.where(S.values**2 - 1 < -1e-12, "elliptic", "degenerate"))
        assert list(c.verdicts) == list(expected)
        assert c.D is None


class TestConvexityCondition:
    def test_constant_forcing_holds(self):
        assert convexity_sufficient_condition(G.constant(2.0), Constant(1.0)).all_hold

    def test_c1_fails_everywhere(self):
        cond = convexity_sufficient_condition(G.constant(2.0), Proportional(1.0))
        assert not np.any(cond.holds)
        assert np.allclose(cond.rhs, 2.0) and np.allclose(cond.lhs, 0.0)

    def test_collapse_pointwise_oracle(self):
        S = perturbed_circle(G, 2.0, 2, 0.1)
        cond = convexity_sufficient_condition(S, Collapse(0.4))
        c2 = np.cos(2 * G.theta)
        lhs = -3.6 * c2  # (2 + 0.9 cos 2th)''
        rhs = -0.4 * (2 - 0.3 * c2)
        assert np.max(np.abs(cond.lhs - lhs)) <= 1e-11
        assert np.max(np.abs(cond.rhs - rhs)) <= 1e-12
        assert np.array_equal(cond.holds, lhs - rhs >= -1e-12)
        assert cond.holds.any() and not cond.holds.all()

    def test_derivative_dependent_refused(self):
        with pytest.raises(UnsupportedDerivativeError):
            convexity_sufficient_condition(G.constant(2.0), Anisotropic(0.3, 0.1))


class TestRecords:
    def test_record_of_circle(self):
        rec = record_of(0.5, G.constant(2.0), Constant(2.0))
        assert rec.t == 0.5
        assert rec.energy == pytest.approx(np.pi)
        assert rec.l2_norm == pytest.approx(2 * np.sqrt(2 * np.pi))
        assert rec.convexity_margin == 2.0
        assert rec.hyperbolicity_margin == 3.0
        assert rec.forcing_bound_ok is True
        assert rec.length == pytest.approx(4 * np.pi)
        assert rec.area == pytest.approx(4 * np.pi)
        assert rec.steady_residual == pytest.approx(0.0, abs=1e-12)
        assert len(rec.as_row()) == len(rec.COLUMNS)

    def test_record_of_nonconvex_marks_nan(self):
        rec = record_of(0.0, G.sample(lambda th: 0.1 + np.cos(2 * th)), Constant(0.0))
        assert np.isnan(rec.energy) and np.isnan(rec.area)
        assert rec.convexity_margin < 0

    def test_l2_norm(self):
        assert l2_norm(G.constant(1.0)) == pytest.approx(np.sqrt(2 * np.pi), rel=1e-15)

    def test_bound_monitor_first_violation(self):
        mon = ForcingBoundMonitor(Constant(2.0))
        mon(0.0, G.constant(2.0))
        assert mon.first_violation is None
        mon(0.1, G.constant(1.5))  # S^2 - 1 = 1.25 < 2
        mon(0.2, G.constant(1.0))
        assert mon.first_violation == 0.1
