"""Brightness and single-mode coupling figures of merit for narrow-band
photon-pair sources.

The package evaluates, from first principles, how brightly a collinear
quasi-degenerate down-conversion source emits into a single Gaussian
target mode and how efficiently the photon pairs couple into it.  The
figures of merit factor into spectral terms (pump bandwidth against
filter bandwidth) and spatial overlap terms (pump focusing against
collection focusing), each reduced to dimensionless integrals evaluated
by adaptive cubature with Monte Carlo cross-checks.

Modules
-------
mathkit
    Adaptive cubature, vector cubature, and Monte Carlo integration.
spectral
    Spectral overlap factors for Gaussian and tabulated shapes.
spatial
    Spatial overlap K-factors of the pair amplitude with the target mode.
fom
    Absolute pair probabilities and coupling/heralding ratios.
optimize
    Grid sweeps and per-focusing-parameter maximization.
cli
    Configuration parsing and the ``spdc-coupler`` command line tool.
"""

from .errors import (ConfigError, ConfigParseError, InconsistentGeometryError,
                     InsufficientTabulationError, InvalidEpsilonError,
                     InvalidRegionError, KFactorDivisionError, MissingKeyError,
                     NegativeDeltaError, NonpositiveCountsError,
                     UnitRangeError, UnknownKeyError)
from .mathkit import (IntegralEstimate, Region, integrate_cubature,
                      integrate_cubature_vector, integrate_mc, sinc)
from .spectral import (SpectralConfig, SpectralKind, SpectralShape,
                       omega1_factor, omega2_factor_gaussian,
                       omega_convolution_general)
from .spatial import (GeometryPoint, KFactors, OpticalIndices, PolingSeries,
                      k0_factor, k1_factor, k2_factor, k_factors, k_oracle_mc,
                      phasematch_sum, truncation_radius)
from .fom import (Efficiencies, FomResult, PhysicalSource,
                  absolute_probabilities, efficiencies, heralding_from_counts)
from .optimize import (Metric, OptimumRecord, SweepCell, SweepSpec,
                       maximize_at_xi, spectral_curve, sweep_grid, xi_curve)
from .cli import Command, RunConfig, parse_config, render_config, run

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ConfigError", "ConfigParseError", "InconsistentGeometryError",
    "InsufficientTabulationError", "InvalidEpsilonError",
    "InvalidRegionError", "KFactorDivisionError", "MissingKeyError",
    "NegativeDeltaError", "NonpositiveCountsError", "UnitRangeError",
    "UnknownKeyError",
    "IntegralEstimate", "Region", "integrate_cubature",
    "integrate_cubature_vector", "integrate_mc", "sinc",
    "SpectralConfig", "SpectralKind", "SpectralShape", "omega1_factor",
    "omega2_factor_gaussian", "omega_convolution_general",
    "GeometryPoint", "KFactors", "OpticalIndices", "PolingSeries",
    "k0_factor", "k1_factor", "k2_factor", "k_factors", "k_oracle_mc",
    "phasematch_sum", "truncation_radius",
    "Efficiencies", "FomResult", "PhysicalSource",
    "absolute_probabilities", "efficiencies", "heralding_from_counts",
    "Metric", "OptimumRecord", "SweepCell", "SweepSpec", "maximize_at_xi",
    "spectral_curve", "sweep_grid", "xi_curve",
    "Command", "RunConfig", "parse_config", "render_config", "run",
]
