"""Integration backbone: quadrature rules, Monte Carlo, special functions."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spdc_coupler.errors import InvalidRegionError
from spdc_coupler.mathkit import (IntegralEstimate, Region, integrate_cubature,
                                  integrate_cubature_vector, integrate_mc,
                                  sinc)

SQRT_PI = 1.7724538509055159
FOUR_LN2 = 4.0 * np.log(2.0)


class TestSinc:
    def test_zero(self):
        assert sinc(0.0) == 1.0

    def test_pi(self):
        assert abs(sinc(np.pi)) < 1e-15

    def test_half_pi(self):
        assert abs(sinc(np.pi / 2.0) - 0.6366198) < 1e-7

    def test_array(self):
        x = np.array([0.0, np.pi, -np.pi, 0.5])
        out = sinc(x)
        assert out[0] == 1.0
        assert abs(out[3] - np.sin(0.5) / 0.5) < 1e-15

    @given(st.floats(min_value=-50.0, max_value=50.0))
    def test_even(self, x):
        assert sinc(x) == sinc(-x)

    @given(st.floats(min_value=-100.0, max_value=100.0))
    def test_bounded_by_one(self, x):
        assert abs(sinc(x)) <= 1.0 + 1e-15


class TestRegion:
    def test_volume(self):
        r = Region((0.0, -1.0), (2.0, 1.0))
        assert r.dim == 2
        assert r.volume == 4.0

    def test_length_mismatch(self):
        with pytest.raises(InvalidRegionError):
            Region((0.0, 0.0), (1.0,))

    def test_empty_axis(self):
        with pytest.raises(InvalidRegionError):
            Region((0.0,), (0.0,))

    def test_inverted_axis(self):
        with pytest.raises(InvalidRegionError):
            Region((1.0,), (0.0,))

    def test_dimension_cap(self):
        with pytest.raises(InvalidRegionError):
            Region((0.0,) * 5, (1.0,) * 5)

    def test_nonfinite_bound(self):
        with pytest.raises(InvalidRegionError):
            Region((0.0,), (np.inf,))


class TestIntegralEstimate:
    def test_negative_error_rejected(self):
        with pytest.raises(ValueError):
            IntegralEstimate(1.0, -1e-3, 10)

    def test_zero_evaluations_rejected(self):
        with pytest.raises(ValueError):
            IntegralEstimate(1.0, 0.0, 0)


class TestCubature:
    def test_unit_cube(self):
        est = integrate_cubature(lambda p: np.ones(len(p)),
                                 Region((0.0, 0.0, 0.0), (1.0, 1.0, 1.0)),
                                 rel_tol=1e-6)
        assert est.converged
        assert abs(est.value - 1.0) < 1e-6

    def test_gaussian_line(self):
        est = integrate_cubature(lambda p: np.exp(-p[:, 0] ** 2),
                                 Region((-8.0,), (8.0,)), rel_tol=1e-9)
        assert est.converged
        assert abs(est.value - 1.7724539) < 2e-7
        assert abs(est.value - SQRT_PI) <= 1e-9 * SQRT_PI + est.abs_error

    def test_radial_exponential(self):
        est = integrate_cubature(lambda p: p[:, 0] * np.exp(-p[:, 0] ** 2),
                                 Region((0.0,), (8.0,)), rel_tol=1e-9)
        assert abs(est.value - 0.5) < 1e-9

    def test_polynomial_exact(self):
        def f(p):
            return p[:, 0] ** 3 * p[:, 1] ** 2 + 2.0 * p[:, 2]

        est = integrate_cubature(f, Region((0.0, 0.0, 0.0), (1.0, 2.0, 1.0)),
                                 rel_tol=1e-10)
        exact = (1.0 / 4.0) * (8.0 / 3.0) * 1.0 + 2.0 * 0.5 * 1.0 * 2.0
        assert abs(est.value - exact) < 1e-12 * exact

    def test_complex_phase(self):
        def f(p):
            return np.exp(-p[:, 0] ** 2 + 1j * 3.0 * p[:, 0])

        est = integrate_cubature(f, Region((-8.0,), (8.0,)), rel_tol=1e-9)
        exact = SQRT_PI * np.exp(-9.0 / 4.0)
        assert abs(est.value.real - exact) < 1e-9
        assert abs(est.value.imag) < 1e-9

    def test_error_bound_honest(self):
        est = integrate_cubature(
            lambda p: np.exp(-p[:, 0] ** 2 - p[:, 1] ** 2),
            Region((-6.0, -6.0), (6.0, 6.0)), rel_tol=1e-7)
        assert abs(est.value - np.pi) <= max(10.0 * est.abs_error, 1e-7 * np.pi)

    def test_tolerance_not_met_flagged(self):
        def wiggle(p):
            return np.sin(500.0 * p[:, 0] ** 2) + 0.01

        est = integrate_cubature(wiggle, Region((0.0,), (3.0,)),
                                 rel_tol=1e-12, max_evals=600)
        assert not est.converged
        assert est.abs_error > 0.0

    def test_four_dimensional_rejected(self):
        with pytest.raises(InvalidRegionError):
            integrate_cubature(lambda p: np.ones(len(p)),
                               Region((0.0,) * 4, (1.0,) * 4))

    def test_deterministic(self):
        def f(p):
            return np.sin(7.0 * p[:, 0]) * np.exp(-p[:, 1] ** 2) + 1.0

        r = Region((0.0, -2.0), (3.0, 2.0))
        a = integrate_cubature(f, r, rel_tol=1e-8)
        b = integrate_cubature(f, r, rel_tol=1e-8)
        assert a.value == b.value
        assert a.abs_error == b.abs_error
        assert a.evaluations == b.evaluations

    @settings(max_examples=20, deadline=None)
    @given(st.floats(min_value=-3.0, max_value=3.0),
           st.floats(min_value=-3.0, max_value=3.0),
           st.floats(min_value=0.2, max_value=2.0),
           st.floats(min_value=0.2, max_value=2.0))
    def test_linearity(self, a, b, wf, wg):
        def f(p):
            return np.exp(-wf * p[:, 0] ** 2)

        def g(p):
            return np.cos(p[:, 0]) * np.exp(-wg * p[:, 0] ** 2)

        def combo(p):
            return a * f(p) + b * g(p)

        r = Region((-6.0,), (6.0,))
        i_f = integrate_cubature(f, r, rel_tol=1e-9)
        i_g = integrate_cubature(g, r, rel_tol=1e-9)
        i_c = integrate_cubature(combo, r, rel_tol=1e-9)
        lhs = i_c.value
        rhs = a * i_f.value + b * i_g.value
        budget = i_c.abs_error + abs(a) * i_f.abs_error + \
            abs(b) * i_g.abs_error + 1e-12
        assert abs(lhs - rhs) <= 10.0 * budget


class TestCubatureVector:
    def test_matches_scalar_components(self):
        widths = np.array([0.5, 1.0, 2.0])

        def fam(p):
            return np.exp(-np.outer(p[:, 0] ** 2, widths))

        vals, errs, evals, converged = integrate_cubature_vector(
            fam, Region((-8.0,), (8.0,)), rel_tol=1e-8)
        assert converged
        assert evals >= 15
        for k, w in enumerate(widths):
            exact = np.sqrt(np.pi / w)
            assert abs(vals[k] - exact) <= max(10.0 * errs[k], 1e-7 * exact)

    def test_budget_exhaustion_flagged(self):
        def fam(p):
            return np.stack([np.sin(500.0 * p[:, 0] ** 2) + 0.01,
                             np.ones(len(p))], axis=1)

        vals, errs, evals, converged = integrate_cubature_vector(
            fam, Region((0.0,), (3.0,)), rel_tol=1e-12, max_evals=600)
        assert not converged


class TestMonteCarlo:
    def test_constant(self):
        est = integrate_mc(lambda p: np.ones(len(p)),
                           Region((0.0,) * 4, (1.0,) * 4), samples=100_000)
        assert est.value == 1.0
        assert est.abs_error == 0.0

    def test_gaussian_product(self):
        est = integrate_mc(
            lambda p: np.exp(-np.sum(p ** 2, axis=1)),
            Region((-6.0,) * 4, (6.0,) * 4), samples=10_000_000, seed=1)
        assert abs(est.value - 9.8696044) <= 3.0 * est.abs_error

    def test_odd_function(self):
        est = integrate_mc(lambda p: p[:, 0],
                           Region((-1.0,) * 4, (1.0,) * 4), samples=1_000_000,
                           seed=3)
        assert abs(est.value) <= 3.0 * est.abs_error

    def test_seed_reproducible(self):
        def f(p):
            return np.exp(-np.sum(p ** 2, axis=1))

        r = Region((-2.0,) * 4, (2.0,) * 4)
        a = integrate_mc(f, r, samples=200_000, seed=11)
        b = integrate_mc(f, r, samples=200_000, seed=11)
        c = integrate_mc(f, r, samples=200_000, seed=12)
        assert a.value == b.value and a.abs_error == b.abs_error
        assert a.value != c.value

    def test_small_sample_rejected(self):
        with pytest.raises(ValueError):
            integrate_mc(lambda p: np.ones(len(p)),
                         Region((0.0,) * 4, (1.0,) * 4), samples=100)

    def test_non_4d_rejected(self):
        with pytest.raises(InvalidRegionError):
            integrate_mc(lambda p: np.ones(len(p)),
                         Region((0.0,) * 3, (1.0,) * 3), samples=100_000)

    def test_matches_cubature_on_smooth_products(self):
        rng = np.random.default_rng(2024)
        r2 = Region((-5.0, -5.0), (5.0, 5.0))
        r4 = Region((-5.0,) * 4, (5.0,) * 4)
        for _ in range(5):
            w = rng.uniform(0.4, 1.5, size=4)
            b = rng.uniform(0.5, 3.0, size=4)

            def half(p, i0):
                return (np.exp(-w[i0] * p[:, 0] ** 2 - w[i0 + 1] * p[:, 1] ** 2)
                        * sinc(b[i0] * p[:, 0]) * sinc(b[i0 + 1] * p[:, 1]))

            def full(p):
                return half(p[:, :2], 0) * half(p[:, 2:], 2)

            ia = integrate_cubature(lambda p: half(p, 0), r2, rel_tol=1e-8)
            ib = integrate_cubature(lambda p: half(p, 2), r2, rel_tol=1e-8)
            mc = integrate_mc(full, r4, samples=2_000_000, seed=7)
            ref = ia.value * ib.value
            sigma = np.sqrt(mc.abs_error ** 2 +
                            (abs(ia.value) * ib.abs_error) ** 2 +
                            (abs(ib.value) * ia.abs_error) ** 2)
            assert abs(mc.value - ref) <= 3.0 * sigma + 1e-12


class TestNormalizationFixtures:
    """L2 norms of the normalized Gaussian envelopes under the conventions

    in use: spatial norm plain d^2 rho, spectral norm with a 1/2pi measure.
    """

    @pytest.mark.parametrize("w0", [1.0, 1.7])
    def test_spatial_envelope_unit_norm(self, w0):
        def intensity(p):
            rho2 = p[:, 0] ** 2 + p[:, 1] ** 2
            return (2.0 / (np.pi * w0 ** 2)) * np.exp(-2.0 * rho2 / w0 ** 2)

        half = 6.0 * w0
        est = integrate_cubature(intensity,
                                 Region((-half, -half), (half, half)),
                                 rel_tol=1e-11, abs_tol=1e-14)
        assert est.converged
        assert abs(est.value - 1.0) <= 1e-9

    @pytest.mark.parametrize("dt", [1.0, 2.5])
    def test_temporal_envelope_unit_norm(self, dt):
        def intensity(p):
            t = p[:, 0]
            return np.sqrt(FOUR_LN2 / (np.pi * dt ** 2)) * \
                np.exp(-FOUR_LN2 * t ** 2 / dt ** 2)

        half = 8.0 * dt
        est = integrate_cubature(intensity, Region((-half,), (half,)),
                                 rel_tol=1e-11, abs_tol=1e-14)
        assert abs(est.value - 1.0) <= 1e-9

    @pytest.mark.parametrize("dt", [1.0, 2.5])
    def test_spectral_envelope_unit_norm(self, dt):
        def intensity(p):
            omega = p[:, 0]
            mag2 = np.sqrt(np.pi * dt ** 2 / np.log(2.0)) * \
                np.exp(-omega ** 2 * dt ** 2 / FOUR_LN2)
            return mag2 / (2.0 * np.pi)

        half = 12.0 / dt
        est = integrate_cubature(intensity, Region((-half,), (half,)),
                                 rel_tol=1e-11, abs_tol=1e-14)
        assert abs(est.value - 1.0) <= 1e-9

    def test_parseval(self):
        dt = 1.3

        def time_norm(p):
            t = p[:, 0]
            return np.sqrt(FOUR_LN2 / (np.pi * dt ** 2)) * \
                np.exp(-FOUR_LN2 * t ** 2 / dt ** 2)

        def freq_norm(p):
            omega = p[:, 0]
            return np.sqrt(np.pi * dt ** 2 / np.log(2.0)) * \
                np.exp(-omega ** 2 * dt ** 2 / FOUR_LN2) / (2.0 * np.pi)

        it = integrate_cubature(time_norm, Region((-10.0,), (10.0,)),
                                rel_tol=1e-11, abs_tol=1e-14)
        iw = integrate_cubature(freq_norm, Region((-12.0,), (12.0,)),
                                rel_tol=1e-11, abs_tol=1e-14)
        assert abs(it.value - iw.value) <= 1e-9
