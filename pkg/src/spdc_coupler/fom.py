"""Absolute per-pulse pair probabilities and coupling efficiencies.

Combines the dimensionless spatial factors with the spectral transmission
factors and one SI prefactor built from the source hardware: pump pulse
energy, effective nonlinearity, crystal length, collection bandwidth and
the participating frequencies and indices.  Also inverts measured count
rates into a heralding ratio.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import (InconsistentGeometryError, KFactorDivisionError,
                     NonpositiveCountsError)
from .mathkit import DEFAULT_MAX_EVALS, DEFAULT_REL_TOL
from .spatial import (GeometryPoint, KFactors, OpticalIndices, PolingSeries,
                      k_factors)
from .spectral import (SpectralConfig, omega1_factor,
                       omega2_factor_gaussian, omega_convolution_general)

__all__ = [
    "VACUUM_PERMITTIVITY",
    "SPEED_OF_LIGHT",
    "PhysicalSource",
    "FomResult",
    "Efficiencies",
    "efficiencies",
    "absolute_probabilities",
    "heralding_from_counts",
]

VACUUM_PERMITTIVITY = 8.8541878128e-12
SPEED_OF_LIGHT = 299792458.0

_FOUR_LN2 = 4.0 * np.log(2.0)


@dataclass(frozen=True)
class PhysicalSource:
    """SI description of the pump, crystal and collection chain.

    pulse_energy [J], chi_eff [m/V] (the effective nonlinearity including
    the first-order poling Fourier amplitude), crystal_length [m],
    poling_period [m], filter_bandwidth [rad/s], pump_pulse_fwhm [s],
    center frequencies [rad/s], the five refractive indices, and the pump
    waist [m].
    """

    pulse_energy: float
    chi_eff: float
    crystal_length: float
    poling_period: float
    filter_bandwidth: float
    pump_pulse_fwhm: float
    omega_s0: float
    omega_i0: float
    omega_p0: float
    n_p: float
    n_s: float
    n_i: float
    n_prime_s: float
    n_prime_i: float
    pump_waist: float

    def __post_init__(self):
        positive = ("pulse_energy", "crystal_length", "poling_period",
                    "filter_bandwidth", "pump_pulse_fwhm", "omega_s0",
                    "omega_i0", "omega_p0", "n_p", "n_s", "n_i",
                    "n_prime_s", "n_prime_i", "pump_waist")
        for name in positive:
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and positive")
        if not np.isfinite(self.chi_eff) or self.chi_eff < 0:
            raise ValueError("chi_eff must be finite and nonnegative")
        mismatch = abs(self.omega_s0 + self.omega_i0 - self.omega_p0)
        if mismatch > 1e-6 * self.omega_p0:
            raise ValueError(
                "signal and idler frequencies must sum to the pump "
                f"frequency within 1e-6 relative, off by {mismatch:.3e}")

    @property
    def rayleigh_range(self) -> float:
        """Pump Rayleigh range inside the crystal [m]."""
        return (self.n_p * self.omega_p0 * self.pump_waist ** 2
                / (2.0 * SPEED_OF_LIGHT))

    @property
    def xi(self) -> float:
        """Focusing parameter: crystal length over twice the Rayleigh range."""
        return self.crystal_length / (2.0 * self.rayleigh_range)

    @property
    def delta(self) -> float:
        """Pump spectral width over the collection bandwidth."""
        return _FOUR_LN2 / (self.pump_pulse_fwhm * self.filter_bandwidth)

    @property
    def indices(self) -> OpticalIndices:
        """Index ratios for the spatial integrals."""
        return OpticalIndices(
            np_over_ns=self.n_p / self.n_s,
            np_over_ni=self.n_p / self.n_i,
            np_over_nps=self.n_p / self.n_prime_s,
            np_over_npi=self.n_p / self.n_prime_i)


@dataclass(frozen=True)
class FomResult:
    """Per-pulse probabilities, efficiency ratios and their ingredients.

    p0: both photons inside the collection band, any spatial mode.
    p1: signal photon inside its band and coupled, idler unconstrained.
    p2: both photons inside the band and both coupled.
    p1 may exceed p0: the single-arm spectral acceptance is wider than the
    pair acceptance, so when the single-arm coupling is high enough the
    unconstrained-idler event class is the more probable one.
    """

    p0: float
    p1: float
    p2: float
    gamma1: float
    gamma2: float
    gamma21: float
    k: KFactors
    omega1_over_dwf: float
    omega2_over_dwf: float

    def __post_init__(self):
        for name in ("p0", "p1", "p2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        scale = self.p0 / self.k.k0 if self.k.k0 > 0 else 0.0
        slack = (self.k.err_k0 + self.k.err_k1 + self.k.err_k2) * scale \
            + 1e-12 * (1.0 + self.p0 + self.p1)
        if self.p2 > self.p1 + slack or self.p2 > self.p0 + slack:
            raise ValueError("p2 must not exceed p1 or p0 beyond the "
                             "quadrature error bounds")


class Efficiencies(NamedTuple):
    gamma1: float
    gamma2: float
    gamma21: float


def efficiencies(k: KFactors) -> Efficiencies:
    """Coupling efficiency ratios from the three spatial factors.

    gamma1 = k1/k0 (single-arm), gamma21 = k2/k1 (heralding), and gamma2 is
    computed as their product so the identity gamma2 = gamma21 * gamma1
    holds exactly in floating point.
    """
    if k.k0 <= k.err_k0 or k.k0 <= 0:
        raise KFactorDivisionError(
            "k0 is not resolved above its error bound; ratios undefined")
    if k.k1 <= k.err_k1 or k.k1 <= 0:
        raise KFactorDivisionError(
            "k1 is not resolved above its error bound; ratios undefined")
    gamma1 = k.k1 / k.k0
    gamma21 = k.k2 / k.k1
    return Efficiencies(gamma1=gamma1, gamma2=gamma21 * gamma1,
                        gamma21=gamma21)


def _spectral_factors(phys: PhysicalSource,
                      spectral: Optional[SpectralConfig],
                      rel_tol: float):
    """(omega1/dwf, omega2/dwf) with frequencies in collection-band units."""
    if spectral is None:
        omega2 = omega2_factor_gaussian(phys.delta)
        # Unit-bandwidth Gaussian filter on the signal arm.
        omega1 = np.sqrt(np.pi / _FOUR_LN2)
        return float(omega1), float(omega2)
    dwf = phys.filter_bandwidth
    omega2 = omega_convolution_general(spectral, rel_tol=rel_tol) / dwf
    omega1 = 2.0 * np.pi * omega1_factor(spectral.filter_signal) / dwf
    return float(omega1), float(omega2)


def absolute_probabilities(phys: PhysicalSource, point: GeometryPoint,
                           indices: Optional[OpticalIndices] = None,
                           poling: PolingSeries = PolingSeries(),
                           spectral: Optional[SpectralConfig] = None,
                           rel_tol: float = DEFAULT_REL_TOL,
                           max_evals: int = DEFAULT_MAX_EVALS) -> FomResult:
    """Assemble absolute per-pulse probabilities at one geometry.

    The spectral configuration, when given, uses frequencies in units of
    the collection bandwidth; when omitted, a transform-limited Gaussian
    pump against unit-bandwidth Gaussian filters is assumed, with the pump
    width taken from the pulse duration.  The geometry point must agree
    with the focusing parameter implied by the physical source within 1%.
    """
    derived = phys.xi
    if abs(derived - point.xi) > 0.01 * point.xi:
        raise InconsistentGeometryError(
            f"focusing parameter {point.xi} disagrees with the value "
            f"{derived:.6g} implied by the pump waist and crystal length")
    if indices is None:
        indices = phys.indices
    omega1_over_dwf, omega2_over_dwf = _spectral_factors(
        phys, spectral, rel_tol)
    k = k_factors(point, indices, poling, rel_tol=rel_tol,
                  max_evals=max_evals)
    prefactor = (phys.pulse_energy * phys.chi_eff ** 2 * phys.crystal_length
                 * phys.filter_bandwidth * phys.omega_s0 * phys.omega_i0
                 * phys.omega_p0
                 / (8.0 * VACUUM_PERMITTIVITY * SPEED_OF_LIGHT ** 4
                    * phys.n_s * phys.n_i))
    p0 = prefactor * omega2_over_dwf * k.k0
    p1 = prefactor * omega1_over_dwf * k.k1
    p2 = prefactor * omega2_over_dwf * k.k2
    gamma = efficiencies(k)
    return FomResult(p0=p0, p1=p1, p2=p2, gamma1=gamma.gamma1,
                     gamma2=gamma.gamma2, gamma21=gamma.gamma21, k=k,
                     omega1_over_dwf=omega1_over_dwf,
                     omega2_over_dwf=omega2_over_dwf)


def heralding_from_counts(p_ab: float, p_i: float, t_a: float, t_b: float,
                          t_i: float, omega1: float, omega2: float) -> float:
    """Heralding ratio inferred from measured counts and coincidences.

    p_ab is the coincidence probability behind both analysis channels with
    transmissions t_a and t_b; p_i is the heralding singles probability
    behind transmission t_i; omega1 and omega2 are the single-arm and pair
    spectral factors of the same measurement.  Inputs are assumed already
    corrected for accidentals.  The result is not clamped; a value above 1
    signals inconsistent inputs and is flagged with a warning.
    """
    for name, t in (("t_a", t_a), ("t_b", t_b), ("t_i", t_i)):
        if not 0.0 < t <= 1.0:
            raise ValueError(f"{name} must be in (0, 1], got {t}")
    if p_i <= 0:
        raise NonpositiveCountsError(f"p_i must be positive, got {p_i}")
    if p_ab < 0:
        raise NonpositiveCountsError(f"p_ab must be nonnegative, got {p_ab}")
    if omega2 <= 0:
        raise ValueError(f"omega2 must be positive, got {omega2}")
    if omega1 <= 0:
        raise ValueError(f"omega1 must be positive, got {omega1}")
    value = (omega1 / omega2) * (p_ab / (t_a * t_b)) * (t_i / p_i)
    if value > 1.0:
        warnings.warn("inferred heralding ratio exceeds 1; the counts, "
                      "transmissions and spectral factors are mutually "
                      "inconsistent", stacklevel=2)
    return value
