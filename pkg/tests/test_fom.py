"""Absolute pair probabilities and coupling/heralding ratios."""

import numpy as np
import pytest

from spdc_coupler.errors import (InconsistentGeometryError,
                                 KFactorDivisionError, NonpositiveCountsError)
from spdc_coupler.fom import (PhysicalSource, absolute_probabilities,
                              efficiencies, heralding_from_counts)
from spdc_coupler.spatial import GeometryPoint, KFactors, k_factors
from spdc_coupler.spectral import SpectralConfig, SpectralShape

TWO_PI_C = 2.0 * np.pi * 299792458.0


def reference_source(**overrides):
    """Pulsed 782 nm pump, 2 cm crystal, 75 GHz filters, 40 um waist."""
    omega_p0 = TWO_PI_C / 782e-9
    omega_s0 = TWO_PI_C / 1560e-9
    fields = dict(
        pulse_energy=2.5e-9, chi_eff=2.0e-12, crystal_length=0.02,
        poling_period=19.34e-6, filter_bandwidth=2.0 * np.pi * 75e9,
        pump_pulse_fwhm=25e-9, omega_s0=omega_s0,
        omega_i0=omega_p0 - omega_s0, omega_p0=omega_p0,
        n_p=1.8, n_s=1.8, n_i=1.8, n_prime_s=1.8, n_prime_i=1.8,
        pump_waist=40e-6)
    fields.update(overrides)
    return PhysicalSource(**fields)


class TestPhysicalSource:
    def test_derived_quantities(self):
        src = reference_source()
        z_r = src.n_p * src.omega_p0 * src.pump_waist ** 2 / \
            (2.0 * 299792458.0)
        assert abs(src.rayleigh_range - z_r) < 1e-12 * z_r
        assert abs(src.xi - src.crystal_length / (2.0 * z_r)) < 1e-12
        delta = 4.0 * np.log(2.0) / (src.pump_pulse_fwhm *
                                     src.filter_bandwidth)
        assert abs(src.delta - delta) < 1e-15
        assert abs(src.delta - 2.35345e-4) < 1e-8

    def test_energy_conservation_enforced(self):
        omega_p0 = TWO_PI_C / 782e-9
        with pytest.raises(ValueError):
            reference_source(omega_i0=omega_p0 / 2.0 * 1.001)

    @pytest.mark.parametrize("field", ["pulse_energy", "crystal_length",
                                       "filter_bandwidth", "pump_waist",
                                       "n_p"])
    def test_nonpositive_rejected(self, field):
        with pytest.raises(ValueError):
            reference_source(**{field: 0.0})

    def test_zero_nonlinearity_allowed(self):
        assert reference_source(chi_eff=0.0).chi_eff == 0.0


class TestEfficiencies:
    def test_direct_ratios(self):
        g = efficiencies(KFactors(k0=1.0, k1=0.5, k2=0.25))
        assert g.gamma1 == 0.5
        assert g.gamma21 == 0.5
        assert g.gamma2 == 0.25

    def test_product_identity_exact(self):
        g = efficiencies(KFactors(k0=0.222, k1=0.171, k2=0.169))
        assert g.gamma2 == g.gamma21 * g.gamma1

    def test_low_focusing_heralding(self):
        k = k_factors(GeometryPoint(xi=0.01, alpha=1.5, phi0=0.0))
        g = efficiencies(k)
        assert abs(g.gamma21 - 0.7197) <= 0.03 * 0.7197

    def test_zero_pair_overlap(self):
        g = efficiencies(KFactors(k0=1.0, k1=0.5, k2=0.0))
        assert g.gamma2 == 0.0 and g.gamma21 == 0.0

    def test_vanishing_denominators_rejected(self):
        with pytest.raises(KFactorDivisionError):
            efficiencies(KFactors(k0=0.0, k1=0.0, k2=0.0))
        with pytest.raises(KFactorDivisionError):
            efficiencies(KFactors(k0=1.0, k1=5e-13, k2=0.0, err_k1=1e-12))


class TestAbsoluteProbabilities:
    def test_regression_anchor(self):
        src = reference_source()
        point = GeometryPoint(xi=src.xi, alpha=np.sqrt(2.0), phi0=3.2)
        res = absolute_probabilities(src, point)
        assert abs(res.p0 - 0.02974384244194271) < 2e-4 * res.p0
        assert abs(res.p1 - 0.02186718598692153) < 2e-4 * res.p1
        assert abs(res.p2 - 0.012110975657007373) < 2e-4 * res.p2
        assert abs(res.gamma21 - 0.7832515018217104) < 1e-3
        assert abs(res.omega2_over_dwf - 0.7526918373668982) < 1e-9

    def test_zero_nonlinearity_annihilates(self):
        src = reference_source(chi_eff=0.0)
        point = GeometryPoint(xi=src.xi, alpha=1.0, phi0=0.0)
        res = absolute_probabilities(src, point)
        assert res.p0 == 0.0 and res.p1 == 0.0 and res.p2 == 0.0
        assert res.gamma1 > 0.0

    def test_linear_in_pulse_energy(self):
        point = GeometryPoint(xi=reference_source().xi, alpha=1.0, phi0=2.0)
        a = absolute_probabilities(reference_source(), point)
        b = absolute_probabilities(reference_source(pulse_energy=5.0e-9),
                                   point)
        for name in ("p0", "p1", "p2"):
            assert abs(getattr(b, name) - 2.0 * getattr(a, name)) < \
                1e-12 * getattr(b, name)
        for name in ("gamma1", "gamma2", "gamma21"):
            assert getattr(b, name) == getattr(a, name)

    def test_bandwidth_scaling_at_fixed_linewidth_ratio(self):
        point = GeometryPoint(xi=reference_source().xi, alpha=1.0, phi0=2.0)
        a = absolute_probabilities(reference_source(), point)
        b = absolute_probabilities(
            reference_source(filter_bandwidth=3.0 * 2.0 * np.pi * 75e9,
                             pump_pulse_fwhm=25e-9 / 3.0), point)
        for name in ("p0", "p1", "p2"):
            assert abs(getattr(b, name) - 3.0 * getattr(a, name)) < \
                1e-9 * getattr(b, name)
        assert b.gamma2 == a.gamma2

    def test_geometry_mismatch_rejected(self):
        src = reference_source()
        with pytest.raises(InconsistentGeometryError):
            absolute_probabilities(src, GeometryPoint(xi=1.2 * src.xi,
                                                      alpha=1.0))

    def test_explicit_spectral_config_matches_analytic(self):
        src = reference_source()
        point = GeometryPoint(xi=src.xi, alpha=1.0, phi0=2.0)
        spectral = SpectralConfig(
            pump_envelope=SpectralShape.gaussian(src.delta *
                                                 src.filter_bandwidth),
            filter_signal=SpectralShape.gaussian(src.filter_bandwidth),
            filter_idler=SpectralShape.gaussian(src.filter_bandwidth))
        a = absolute_probabilities(src, point)
        b = absolute_probabilities(src, point, spectral=spectral)
        assert abs(b.p2 - a.p2) < 1e-3 * a.p2
        assert abs(b.p1 - a.p1) < 1e-3 * a.p1

    def test_pair_probability_below_marginals(self):
        src = reference_source()
        point = GeometryPoint(xi=src.xi, alpha=np.sqrt(2.0), phi0=3.2)
        res = absolute_probabilities(src, point)
        assert res.p2 <= res.p1
        assert res.p2 <= res.p0

    def test_prefactor_is_dimensionless(self):
        # SI dimension exponents as (kg, m, s, A).
        def dim(**units):
            base = {"kg": 0, "m": 0, "s": 0, "A": 0}
            base.update(units)
            return base

        def mul(a, b, sign=1):
            return {k: a[k] + sign * b[k] for k in a}

        joule = dim(kg=1, m=2, s=-2)
        volt = dim(kg=1, m=2, s=-3, A=-1)
        chi = mul(dim(m=1), volt, sign=-1)
        farad_per_m = mul(mul(dim(A=1, s=1), volt, sign=-1), dim(m=1),
                          sign=-1)
        total = joule
        for factor in (chi, chi, dim(m=1), dim(s=-1), dim(s=-1), dim(s=-1),
                       dim(s=-1)):
            total = mul(total, factor)
        for divisor in (farad_per_m, dim(m=4, s=-4)):
            total = mul(total, divisor, sign=-1)
        assert total == dim()


class TestHeraldingFromCounts:
    def test_lossless_identity(self):
        assert heralding_from_counts(0.01, 0.01, 1.0, 1.0, 1.0,
                                     2.0, 2.0) == 1.0

    def test_transmission_inverse_scaling(self):
        base = heralding_from_counts(0.001, 0.01, 0.8, 0.8, 0.5, 1.0, 0.8)
        halved = heralding_from_counts(0.001, 0.01, 0.4, 0.8, 0.5, 1.0, 0.8)
        assert abs(halved - 2.0 * base) < 1e-12

    def test_reported_maximum_reproduced(self):
        omega1 = 1.0644670194312262
        omega2 = 0.7526918477892525
        t_a, t_b, t_i, p_i = 0.5, 0.5, 0.4, 0.01
        p_ab = 0.7 * (omega2 / omega1) * t_a * t_b * p_i / t_i
        v = heralding_from_counts(p_ab, p_i, t_a, t_b, t_i, omega1, omega2)
        assert abs(v - 0.7) < 1e-12

    def test_inconsistent_inputs_flagged(self):
        with pytest.warns(UserWarning):
            v = heralding_from_counts(0.02, 0.01, 1.0, 1.0, 1.0, 2.0, 1.0)
        assert v > 1.0

    def test_count_domain(self):
        with pytest.raises(NonpositiveCountsError):
            heralding_from_counts(0.01, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0)
        with pytest.raises(NonpositiveCountsError):
            heralding_from_counts(-0.01, 0.01, 1.0, 1.0, 1.0, 1.0, 1.0)

    @pytest.mark.parametrize("t", [0.0, -0.5, 1.5])
    def test_transmission_domain(self, t):
        with pytest.raises(ValueError):
            heralding_from_counts(0.01, 0.01, t, 1.0, 1.0, 1.0, 1.0)
