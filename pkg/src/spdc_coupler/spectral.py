"""Spectral transmission factors of a filtered photon-pair source.

The pair rate through a pair of spectral filters is controlled by two
effective bandwidths: the single-arm factor Omega1 (one filter applied to one
photon) and the pair factor Omega2 (pump spectrum convolved with both filter
transmissions). Shapes are either analytic Gaussians or tabulated intensity
profiles; every shape is described by the full width at half maximum of its
intensity profile.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import InsufficientTabulationError, NegativeDeltaError
from .mathkit import Region, integrate_cubature

__all__ = [
    "SpectralKind",
    "SpectralShape",
    "SpectralConfig",
    "omega2_factor_gaussian",
    "omega_convolution_general",
    "omega1_factor",
]

_FOUR_LN2 = 4.0 * np.log(2.0)

#: Half-support of an analytic Gaussian shape, in units of its FWHM.  The
#: intensity at the cut is exp(-4 ln 2 * 36) ~ 1e-43, far below quadrature
#: tolerance.
_GAUSSIAN_SUPPORT_FWHM = 6.0

#: Minimum tabulated grid span in units of the measured FWHM.
_MIN_SUPPORT_FWHM = 5.0


class SpectralKind(enum.Enum):
    GAUSSIAN_ANALYTIC = "gaussian_analytic"
    TABULATED = "tabulated"


@dataclass(frozen=True)
class SpectralShape:
    """Spectral intensity profile of a pump envelope or filter.

    A Gaussian shape is defined by the FWHM of its intensity profile in
    rad/s.  A tabulated shape stores amplitude samples in [0, 1] with peak 1
    on a strictly increasing detuning grid; the intensity between samples is
    interpolated linearly and is 0 outside the grid.
    """

    kind: SpectralKind
    fwhm: Optional[float] = None
    grid: Optional[tuple] = None
    amplitudes: Optional[tuple] = None

    def __post_init__(self):
        if self.kind is SpectralKind.GAUSSIAN_ANALYTIC:
            if self.fwhm is None or not self.fwhm > 0:
                raise ValueError("Gaussian shape needs fwhm > 0")
            if self.grid is not None or self.amplitudes is not None:
                raise ValueError("Gaussian shape takes no tabulation")
        elif self.kind is SpectralKind.TABULATED:
            if self.grid is None or self.amplitudes is None:
                raise ValueError("tabulated shape needs grid and amplitudes")
            grid = tuple(float(x) for x in self.grid)
            amps = tuple(float(a) for a in self.amplitudes)
            object.__setattr__(self, "grid", grid)
            object.__setattr__(self, "amplitudes", amps)
            if len(grid) != len(amps):
                raise ValueError("grid and amplitudes must have equal length")
            if len(grid) < 2:
                raise ValueError("tabulation needs at least two samples")
            g = np.asarray(grid)
            if not np.all(np.diff(g) > 0):
                raise ValueError("tabulated grid must be strictly increasing")
            a = np.asarray(amps)
            if np.any(a < 0) or np.any(a > 1):
                raise ValueError("amplitudes must lie in [0, 1]")
            if abs(a.max() - 1.0) > 1e-9:
                raise ValueError("peak amplitude must be normalized to 1")
        else:
            raise ValueError(f"unknown shape kind {self.kind!r}")

    @staticmethod
    def gaussian(fwhm: float) -> "SpectralShape":
        return SpectralShape(kind=SpectralKind.GAUSSIAN_ANALYTIC, fwhm=fwhm)

    @staticmethod
    def tabulated(grid: Sequence[float],
                  amplitudes: Sequence[float]) -> "SpectralShape":
        return SpectralShape(kind=SpectralKind.TABULATED,
                             grid=tuple(grid), amplitudes=tuple(amplitudes))

    # -- intensity profile ---------------------------------------------------

    def intensity(self, omega) -> np.ndarray:
        """Intensity transmission at detuning omega (rad/s), vectorized."""
        w = np.asarray(omega, dtype=float)
        if self.kind is SpectralKind.GAUSSIAN_ANALYTIC:
            return np.exp(-_FOUR_LN2 * (w / self.fwhm) ** 2)
        g = np.asarray(self.grid)
        inten = np.asarray(self.amplitudes) ** 2
        return np.interp(w, g, inten, left=0.0, right=0.0)

    def support(self) -> Tuple[float, float]:
        """Interval outside which the intensity is treated as 0."""
        if self.kind is SpectralKind.GAUSSIAN_ANALYTIC:
            half = _GAUSSIAN_SUPPORT_FWHM * self.fwhm
            return (-half, half)
        return (self.grid[0], self.grid[-1])

    def intensity_integral(self) -> float:
        """Plain integral of the intensity profile over all detunings."""
        if self.kind is SpectralKind.GAUSSIAN_ANALYTIC:
            return self.fwhm * np.sqrt(np.pi / _FOUR_LN2)
        g = np.asarray(self.grid)
        inten = np.asarray(self.amplitudes) ** 2
        # Exact for the piecewise-linear intensity model.
        return float(np.trapezoid(inten, g))

    def _check_tabulation(self) -> None:
        if self.kind is not SpectralKind.TABULATED:
            return
        g = np.asarray(self.grid)
        inten = np.asarray(self.amplitudes) ** 2
        above = inten >= 0.5
        if above[0] or above[-1]:
            raise InsufficientTabulationError(
                "tabulated shape does not decay below half maximum "
                "inside its grid")
        idx = np.flatnonzero(above)
        if idx.size == 0:
            raise InsufficientTabulationError(
                "tabulated shape never reaches half maximum")

        def crossing(i0: int, i1: int) -> float:
            y0, y1 = inten[i0], inten[i1]
            return g[i0] + (0.5 - y0) / (y1 - y0) * (g[i1] - g[i0])

        left = crossing(idx[0] - 1, idx[0])
        right = crossing(idx[-1] + 1, idx[-1])
        fwhm = right - left
        span = g[-1] - g[0]
        if span < _MIN_SUPPORT_FWHM * fwhm:
            raise InsufficientTabulationError(
                f"tabulated grid spans {span:.3g} rad/s which is less than "
                f"{_MIN_SUPPORT_FWHM} measured FWHM ({fwhm:.3g} rad/s)")


@dataclass(frozen=True)
class SpectralConfig:
    """Pump envelope, the two filters, and the pump detuning.

    pump_detuning is the offset of the filter center frequencies from energy
    conservation with the pump carrier (rad/s); 0 when the filters are tuned
    to the degenerate pair frequencies.
    """

    pump_envelope: SpectralShape
    filter_signal: SpectralShape
    filter_idler: SpectralShape
    pump_detuning: float = 0.0


def omega2_factor_gaussian(delta: float) -> float:
    """Pair transmission factor Omega2/filter-FWHM for Gaussian shapes.

    delta is the pump spectral FWHM in units of the filter FWHM.  Decreases
    strictly with delta; the monochromatic-pump limit delta = 0 gives
    sqrt(pi/(8 ln 2)).
    """
    if delta < 0:
        raise NegativeDeltaError(f"delta must be nonnegative, got {delta}")
    return float(np.sqrt((np.pi / (8.0 * np.log(2.0)))
                         / (1.0 + 0.5 * delta * delta)))


def omega_convolution_general(config: SpectralConfig,
                              rel_tol: float = 1.0e-6) -> float:
    """Pair transmission bandwidth Omega2 in rad/s for arbitrary shapes.

    Computes the double integral of the normalized pump intensity at
    (omega_s + omega_i - detuning) against both filter intensities.  For
    Gaussian shapes at zero detuning this reproduces
    fwhm * omega2_factor_gaussian(delta).

    The integration runs in the rotated variables (u, v) = (omega_s,
    omega_s + omega_i) so that a pump much narrower than the filters stays
    aligned with one axis of the subdivision.
    """
    pump = config.pump_envelope
    fs = config.filter_signal
    fi = config.filter_idler
    for shape in (pump, fs, fi):
        shape._check_tabulation()

    norm = pump.intensity_integral()
    if not norm > 0:
        raise ValueError("pump envelope carries no spectral weight")

    s_lo, s_hi = fs.support()
    i_lo, i_hi = fi.support()
    p_lo, p_hi = pump.support()
    det = config.pump_detuning
    v_lo = max(s_lo + i_lo, det + p_lo)
    v_hi = min(s_hi + i_hi, det + p_hi)
    if not v_lo < v_hi:
        return 0.0

    def integrand(pts):
        u = pts[:, 0]
        v = pts[:, 1]
        return (pump.intensity(v - det) * fs.intensity(u)
                * fi.intensity(v - u))

    region = Region((s_lo, v_lo), (s_hi, v_hi))
    est = integrate_cubature(integrand, region, rel_tol=rel_tol)
    return float(est.value.real) / norm


def omega1_factor(filter_shape: SpectralShape) -> float:
    """Single-arm transmission bandwidth Omega1 = int domega/2pi |F|^2."""
    filter_shape._check_tabulation()
    return filter_shape.intensity_integral() / (2.0 * np.pi)
