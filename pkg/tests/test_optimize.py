"""Sweeps, per-focusing maximization, and the tabulated spectral curve."""

import numpy as np
import pytest

from spdc_coupler.errors import NegativeDeltaError
from spdc_coupler.optimize import (Metric, OptimumRecord, SweepSpec,
                                   maximize_at_xi, spectral_curve, sweep_grid,
                                   xi_curve)
from spdc_coupler.spatial import (GeometryPoint, OpticalIndices, PolingSeries,
                                  k1_factor, k2_factor)
from spdc_coupler.spectral import omega2_factor_gaussian

PAIR_FACTOR_ZERO = 0.7526918477892525
PAIR_FACTOR_SQRT2 = 0.5322335097156131


class TestSweepSpecValidation:
    def test_metric_accepts_string(self):
        spec = SweepSpec(metric="K2", xi_values=(1.0,))
        assert spec.metric is Metric.K2

    def test_defaults(self):
        spec = SweepSpec(metric=Metric.K0, xi_values=(1.0,))
        assert spec.alpha_range == (0.3, 4.0, 41)
        assert spec.phi0_range == (-2.0, 10.0, 41)
        assert spec.zeta == 0.0

    def test_empty_xi_values_rejected(self):
        with pytest.raises(ValueError):
            SweepSpec(metric=Metric.K2, xi_values=())

    def test_nonpositive_xi_rejected(self):
        with pytest.raises(ValueError):
            SweepSpec(metric=Metric.K2, xi_values=(1.0, 0.0))
        with pytest.raises(ValueError):
            SweepSpec(metric=Metric.K2, xi_values=(-2.0,))

    def test_inverted_range_rejected(self):
        with pytest.raises(ValueError):
            SweepSpec(metric=Metric.K2, xi_values=(1.0,),
                      alpha_range=(2.0, 1.0, 5))
        with pytest.raises(ValueError):
            SweepSpec(metric=Metric.K2, xi_values=(1.0,),
                      phi0_range=(3.0, 3.0, 5))

    def test_short_range_rejected(self):
        with pytest.raises(ValueError):
            SweepSpec(metric=Metric.K2, xi_values=(1.0,),
                      alpha_range=(0.5, 2.0, 1))

    def test_nonpositive_tol_rejected(self):
        with pytest.raises(ValueError):
            SweepSpec(metric=Metric.K2, xi_values=(1.0,), tol=0.0)

    def test_grid_axes_span_ranges(self):
        spec = SweepSpec(metric=Metric.K2, xi_values=(1.0,),
                         alpha_range=(0.5, 2.5, 5), phi0_range=(0.0, 4.0, 9))
        alphas = spec.alphas()
        phi0s = spec.phi0s()
        assert len(alphas) == 5 and alphas[0] == 0.5 and alphas[-1] == 2.5
        assert len(phi0s) == 9 and phi0s[0] == 0.0 and phi0s[-1] == 4.0


@pytest.fixture(scope="module")
def k0_cells():
    spec = SweepSpec(metric=Metric.K0, xi_values=(1.0,),
                     alpha_range=(0.5, 2.5, 3), phi0_range=(0.0, 4.0, 3),
                     tol=1e-3)
    return spec, sweep_grid(spec, 1.0)


class TestSweepGrid:
    def test_xi_membership_required(self, k0_cells):
        spec, _ = k0_cells
        with pytest.raises(ValueError):
            sweep_grid(spec, 2.0)

    def test_row_major_order(self, k0_cells):
        _, cells = k0_cells
        assert len(cells) == 9
        assert [c.alpha for c in cells[:3]] == [0.5, 0.5, 0.5]
        assert [c.phi0 for c in cells[:3]] == [0.0, 2.0, 4.0]
        assert cells[3].alpha == 1.5 and cells[3].phi0 == 0.0

    def test_unconditioned_factor_constant_across_alpha(self, k0_cells):
        _, cells = k0_cells
        by_phi0 = {}
        for c in cells:
            by_phi0.setdefault(c.phi0, set()).add(c.value)
        for values in by_phi0.values():
            assert len(values) == 1

    def test_k0_varies_with_phase(self, k0_cells):
        _, cells = k0_cells
        assert len({c.value for c in cells}) == 3

    def test_cells_carry_finite_errors(self, k0_cells):
        _, cells = k0_cells
        for c in cells:
            assert np.isfinite(c.value) and c.value > 0
            assert np.isfinite(c.error) and c.error >= 0

    def test_pair_factor_has_unique_interior_maximum(self):
        spec = SweepSpec(metric=Metric.K2, xi_values=(1.0,),
                         alpha_range=(0.5, 3.0, 9), phi0_range=(-2.0, 8.0, 11),
                         tol=1e-2)
        cells = sweep_grid(spec, 1.0)
        best = max(cells, key=lambda c: c.value)
        assert sum(1 for c in cells if c.value == best.value) == 1
        assert 0.5 < best.alpha < 3.0
        assert -2.0 < best.phi0 < 8.0


@pytest.fixture(scope="module")
def heralding_cells():
    spec = SweepSpec(metric=Metric.GAMMA21, xi_values=(1.0,),
                     alpha_range=(0.3, 1.4, 9), phi0_range=(-0.5, 2.5, 9),
                     tol=1e-2)
    return sweep_grid(spec, 1.0)


class TestHeraldingSweep:
    def test_plateau_reaches_high_ratio(self, heralding_cells):
        best = max(heralding_cells, key=lambda c: c.value)
        assert best.value >= 0.9
        assert best.converged

    def test_phase_tolerance_wider_than_waist_tolerance(self, heralding_cells):
        best = max(heralding_cells, key=lambda c: c.value)
        indices = OpticalIndices()
        poling = PolingSeries()

        def ratio(alpha, phi0):
            pt = GeometryPoint(xi=1.0, alpha=alpha, zeta=0.0, phi0=phi0)
            v2, _ = k2_factor(pt, indices, poling, rel_tol=1e-3,
                              max_evals=2_000_000)
            v1, _ = k1_factor(pt, indices, poling, rel_tol=1e-3,
                              max_evals=400_000)
            return v2 / v1

        center = ratio(best.alpha, best.phi0)
        phase_shift = max(abs(center - ratio(best.alpha, best.phi0 + 0.5)),
                          abs(center - ratio(best.alpha, best.phi0 - 0.5)))
        waist_shift = min(abs(center - ratio(1.5 * best.alpha, best.phi0)),
                          abs(center - ratio(0.5 * best.alpha, best.phi0)))
        assert phase_shift < 0.02
        assert waist_shift > 0.05
        assert phase_shift < 0.2 * waist_shift


@pytest.fixture(scope="module")
def refined_pair_optimum():
    spec = SweepSpec(metric=Metric.K2, xi_values=(1.0,),
                     alpha_range=(0.8, 2.2, 7), phi0_range=(0.5, 5.0, 7),
                     tol=1e-3)
    return spec, maximize_at_xi(spec, 1.0)


class TestMaximize:
    def test_unsupported_metrics_rejected(self):
        for metric in (Metric.K0, Metric.K1):
            spec = SweepSpec(metric=metric, xi_values=(1.0,))
            with pytest.raises(ValueError):
                maximize_at_xi(spec, 1.0)

    def test_record_fields(self, refined_pair_optimum):
        spec, rec = refined_pair_optimum
        assert isinstance(rec, OptimumRecord)
        assert rec.xi == 1.0
        assert rec.metric is Metric.K2
        assert rec.converged
        assert rec.k0_at_opt is None
        assert 0.8 <= rec.alpha_opt <= 2.2
        assert 0.5 <= rec.phi0_opt <= 5.0
        assert rec.metric_value > 0

    def test_dominates_every_grid_cell(self, refined_pair_optimum):
        spec, rec = refined_pair_optimum
        for c in sweep_grid(spec, 1.0):
            assert rec.metric_value >= c.value - c.error - 1e-6

    def test_start_framing_does_not_move_optimum(self, refined_pair_optimum):
        _, rec = refined_pair_optimum
        shifted = SweepSpec(metric=Metric.K2, xi_values=(1.0,),
                            alpha_range=(0.75, 2.25, 7),
                            phi0_range=(0.4, 5.2, 7), tol=1e-3)
        other = maximize_at_xi(shifted, 1.0)
        assert abs(rec.alpha_opt - other.alpha_opt) <= 1e-3
        assert abs(rec.phi0_opt - other.phi0_opt) <= 1e-3
        assert abs(rec.metric_value - other.metric_value) \
            <= 1e-5 * rec.metric_value

    def test_low_focusing_waist_optimum_below_matching(self):
        spec = SweepSpec(metric=Metric.K2, xi_values=(0.03,),
                         alpha_range=(0.3, 2.0, 5), phi0_range=(-1.0, 2.5, 5),
                         tol=1e-3)
        rec = maximize_at_xi(spec, 0.03)
        assert rec.converged
        assert rec.alpha_opt <= 1.0
        assert 0.30 <= rec.alpha_opt <= 0.55
        assert 1.4e-2 <= rec.metric_value <= 1.7e-2


@pytest.fixture(scope="module")
def curve():
    spec = SweepSpec(metric=Metric.K2, xi_values=(0.5, 3.0),
                     alpha_range=(0.8, 2.2, 7), phi0_range=(0.3, 5.0, 7),
                     tol=3e-3)
    return xi_curve(spec)


class TestXiCurve:
    def test_one_record_per_focusing_value(self, curve):
        assert [r.xi for r in curve] == [0.5, 3.0]
        assert all(r.converged for r in curve)

    def test_unconditioned_factor_attached(self, curve):
        for r in curve:
            assert r.k0_at_opt is not None
            assert r.k0_at_opt > r.metric_value

    def test_optimal_phase_grows_with_focusing(self, curve):
        assert curve[0].phi0_opt < curve[1].phi0_opt

    def test_optimal_waist_grows_with_focusing(self, curve):
        assert curve[0].alpha_opt < curve[1].alpha_opt


class TestSpectralCurve:
    def test_monochromatic_value(self):
        [(d, v)] = spectral_curve([0.0])
        assert d == 0.0
        assert v == omega2_factor_gaussian(0.0)
        assert abs(v - PAIR_FACTOR_ZERO) < 1e-12
        assert abs(v - 0.7526928) < 1e-6

    def test_sqrt2_value(self):
        [(_, v)] = spectral_curve([np.sqrt(2.0)])
        assert abs(v - PAIR_FACTOR_SQRT2) < 1e-12
        assert abs(v - 0.5322336) < 1e-6

    def test_strictly_decreasing(self):
        values = [v for _, v in spectral_curve([0.0, 1.0, 2.0])]
        assert values[0] > values[1] > values[2]

    def test_inputs_echoed_as_floats(self):
        points = spectral_curve([0, 1])
        assert all(isinstance(d, float) for d, _ in points)
        assert [d for d, _ in points] == [0.0, 1.0]

    def test_negative_delta_rejected(self):
        with pytest.raises(NegativeDeltaError):
            spectral_curve([0.5, -0.1])
