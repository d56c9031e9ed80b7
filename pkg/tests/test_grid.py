import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curveflow import Field, apply_linear_operator, differentiate, make_grid, mode_amplitudes
from curveflow.errors import InvalidArgumentError
from curveflow.grid import integrate, resample


def trig_poly(grid, coeffs):
    """sum_k a_k cos(k th) + b_k sin(k th) from [(k, a, b), ...]."""
    th = grid.theta
    return sum(a * np.cos(k * th) + b * np.sin(k * th) for k, a, b in coeffs)


def trig_poly_derivative(grid, coeffs, order):
    th = grid.theta
    out = np.zeros_like(th)
    for k, a, b in coeffs:
        # d^m/dth^m of cos(k th + phase) is k^m cos(k th + phase + m pi/2)
        shift = order * np.pi / 2
        out += k**order * (a * np.cos(k * th + shift) + b * np.sin(k * th + shift))
    return out


coeff_lists = st.lists(
    st.tuples(
        st.integers(0, 20),
        st.floats(-1, 1, allow_nan=False),
        st.floats(-1, 1, allow_nan=False),
    ),
    min_size=1,
    max_size=6,
)

# amplitudes either absent or resolvable, so per-mode relative checks are meaningful
resolvable = st.one_of(st.just(0.0), st.floats(0.01, 1), st.floats(-1, -0.01))
resolvable_coeff_lists = st.lists(
    st.tuples(st.integers(0, 20), resolvable, resolvable), min_size=1, max_size=6
)


class TestMakeGrid:
    def test_n8(self):
        g = make_grid(8)
        assert g.spacing == pytest.approx(math.pi / 4, abs=0, rel=1e-15)
        assert g.theta[2] == pytest.approx(math.pi / 2, rel=1e-15)
        assert g.theta[0] == 0.0

    def test_n256_midpoint(self):
        assert make_grid(256).theta[128] == pytest.approx(math.pi, rel=1e-15)

    @pytest.mark.parametrize("n", [7, 6, 0, -8, 9])
    def test_rejects_bad_n(self, n):
        with pytest.raises(InvalidArgumentError):
            make_grid(n)

    def test_theta_is_index_times_spacing(self):
        g = make_grid(64)
        assert np.array_equal(g.theta, np.arange(64) * g.spacing)

    def test_field_rejects_nonfinite_and_wrong_length(self):
        g = make_grid(8)
        with pytest.raises(InvalidArgumentError):
            Field(g, [np.nan] + [0.0] * 7)
        with pytest.raises(InvalidArgumentError):
            Field(g, np.zeros(9))


class TestDifferentiate:
    def test_cos3_second_derivative(self):
        g = make_grid(64)
        f = g.sample(lambda th: np.cos(3 * th))
        assert np.max(np.abs(differentiate(f, 2).values + 9 * np.cos(3 * g.theta))) < 1e-12

    @pytest.mark.parametrize("order", [1, 2, 3, 4])
    def test_constant_gives_zero(self, order):
        g = make_grid(32)
        assert np.all(differentiate(g.constant(2.5), order).values == 0.0)

    def test_fourth_derivative_against_finite_differences(self):
        # Independent oracle: 4th-order central stencil for d^4/dth^4 evaluated in
        # extended precision so rounding does not swamp the comparison.
        n = 1024
        g = make_grid(n)
        L = np.longdouble
        h = L(2) * L(np.pi) / n
        th = np.arange(n, dtype=L) * h
        f = L(2) + L("0.1") * np.cos(2 * th)
        stencil = [L(-1) / 6, L(2), L(-13) / 2, L(28) / 3, L(-13) / 2, L(2), L(-1) / 6]
        fd = sum(c * np.roll(f, 3 - j) for j, c in enumerate(stencil)) / h**4
        spectral = differentiate(g.sample(lambda t: 2 + 0.1 * np.cos(2 * t)), 4).values
        assert np.max(np.abs(spectral - fd.astype(float))) <= 1e-6
        assert np.max(np.abs(spectral - 1.6 * np.cos(2 * g.theta))) <= 1e-12

    @pytest.mark.parametrize("order", [0, 5, 2.5])
    def test_rejects_bad_order(self, order):
        with pytest.raises(InvalidArgumentError):
            differentiate(make_grid(8).constant(1.0), order)

    def test_nyquist_odd_derivative_is_zero(self):
        g = make_grid(16)
        f = g.sample(lambda th: np.cos(8 * th))
        assert np.max(np.abs(differentiate(f, 1).values)) == 0.0
        assert np.max(np.abs(differentiate(f, 3).values)) == 0.0

    @settings(max_examples=60, deadline=None)
    @given(coeff_lists, st.sampled_from([1, 2, 3, 4]))
    def test_exact_on_trig_polynomials(self, coeffs, order):
        g = make_grid(64)  # degree 20 < n/2
        f = Field(g, trig_poly(g, coeffs))
        expected = trig_poly_derivative(g, coeffs, order)
        scale = 20.0**order
        assert np.max(np.abs(differentiate(f, order).values - expected)) <= 1e-12 * scale

    @settings(max_examples=40, deadline=None)
    @given(coeff_lists)
    def test_second_twice_equals_fourth(self, coeffs):
        g = make_grid(64)
        f = Field(g, trig_poly(g, coeffs))
        d4 = differentiate(f, 4).values
        d22 = differentiate(differentiate(f, 2), 2).values
        assert np.max(np.abs(d22 - d4)) <= 1e-10 * max(1.0, np.max(np.abs(d4)))


class TestLinearOperator:
    def test_translation_mode_is_neutral(self):
        g = make_grid(32)
        out = apply_linear_operator(g.sample(np.cos))
        assert np.max(np.abs(out.values)) < 1e-14

    def test_constant(self):
        g = make_grid(32)
        assert np.allclose(apply_linear_operator(g.constant(2.0)).values, -2.0, atol=1e-15, rtol=0)

    def test_cos3(self):
        g = make_grid(32)
        out = apply_linear_operator(g.sample(lambda th: np.cos(3 * th)))
        assert np.max(np.abs(out.values + 64 * np.cos(3 * g.theta))) < 1e-12

    @settings(max_examples=40, deadline=None)
    @given(coeff_lists, coeff_lists, st.floats(-3, 3), st.floats(-3, 3))
    def test_linearity(self, c1, c2, a, b):
        g = make_grid(64)
        f, h = Field(g, trig_poly(g, c1)), Field(g, trig_poly(g, c2))
        lhs = apply_linear_operator(a * f + b * h).values
        rhs = a * apply_linear_operator(f).values + b * apply_linear_operator(h).values
        scale = max(1.0, np.max(np.abs(lhs)))
        assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale

    @settings(max_examples=40, deadline=None)
    @given(resolvable_coeff_lists)
    def test_symbol_mode_by_mode(self, coeffs):
        g = make_grid(64)
        f = Field(g, trig_poly(g, coeffs))
        a = mode_amplitudes(f).amplitudes
        la = mode_amplitudes(apply_linear_operator(f)).amplitudes
        k = np.arange(a.size)
        expected = (k**2 - 1.0) ** 2 * a
        present = a > 1e-3
        # k = 1 has symbol 0, so it needs an absolute floor
        floor = 1e-12 * max(1.0, la.max())
        assert np.allclose(la[present], expected[present], rtol=1e-10, atol=floor)
        assert np.all(la[~present] <= floor)


class TestModeAmplitudes:
    def test_single_mode(self):
        g = make_grid(64)
        amp = mode_amplitudes(g.sample(lambda th: 0.1 * np.cos(2 * th))).amplitudes
        assert amp[2] == pytest.approx(0.1, rel=1e-14)
        assert np.max(np.delete(amp, 2)) <= 1e-13

    def test_constant(self):
        amp = mode_amplitudes(make_grid(16).constant(2.0)).amplitudes
        assert amp[0] == pytest.approx(2.0, rel=1e-15)

    def test_superposition(self):
        g = make_grid(64)
        f = g.sample(lambda th: 2 + 0.05 * np.cos(2 * th) + 0.01 * np.sin(5 * th))
        amp = mode_amplitudes(f).amplitudes
        assert amp[0] == pytest.approx(2.0, rel=1e-14)
        assert amp[2] == pytest.approx(0.05, rel=1e-12)
        assert amp[5] == pytest.approx(0.01, rel=1e-12)
        assert np.max(np.delete(amp, [0, 2, 5])) <= 1e-13

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=16, max_size=16))
    def test_parseval(self, values):
        g = make_grid(16)
        f = Field(g, values)
        spec = mode_amplitudes(f)
        assert np.all(spec.amplitudes >= 0)
        ms = float(np.mean(np.square(values)))
        assert spec.mean_square() == pytest.approx(ms, rel=1e-12, abs=1e-300)


def test_integrate_is_exact_for_band_limited():
    g = make_grid(32)
    f = g.sample(lambda th: 3 + np.cos(th) ** 2)
    assert integrate(f) == pytest.approx(2 * np.pi * 3.5, rel=1e-15)


def test_resample_preserves_band_limited_fields():
    fine, coarse = make_grid(128), make_grid(32)
    expr = lambda th: 2 + 0.3 * np.cos(3 * th) - 0.1 * np.sin(7 * th)
    up = resample(coarse.sample(expr), fine)
    down = resample(fine.sample(expr), coarse)
    assert np.max(np.abs(up.values - expr(fine.theta))) < 1e-13
    assert np.max(np.abs(down.values - expr(coarse.theta))) < 1e-13
