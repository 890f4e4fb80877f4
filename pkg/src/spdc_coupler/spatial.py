"""Spatial coupling factors of a collinear photon-pair source.

All lengths are folded into four dimensionless controls: the focusing
parameter xi, the target-mode waist ratio alpha, the collection offset zeta
and the phase mismatch phi0.  The transverse wavevector plane is integrated
in polar coordinates after the azimuthal reduction, leaving 3D (pair
coupling, brightness) or nested 2D+1D (single-arm coupling) quadratures.
A direct 4D Monte Carlo estimate of each factor over the same truncated
domain serves as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import InvalidEpsilonError
from .mathkit import (
    DEFAULT_MAX_EVALS,
    DEFAULT_REL_TOL,
    Region,
    integrate_cubature,
    integrate_cubature_vector,
    integrate_mc,
    sinc,
)

__all__ = [
    "GeometryPoint",
    "OpticalIndices",
    "PolingSeries",
    "KFactors",
    "phasematch_sum",
    "truncation_radius",
    "k2_factor",
    "k0_factor",
    "k1_factor",
    "k_factors",
    "k_oracle_mc",
]

#: Gaussian-envelope truncation level for all K-factor quadratures.
_TRUNC_EPS = 1.0e-10

#: sinc-envelope phase beyond which slowly decaying directions are cut;
#: the envelope 1/x is below 8e-3 there.
_SINC_PHASE = 40.0 * np.pi

#: Hard cap on any truncation radius.
_RADIUS_CAP = 25.0

_MC_CHUNK = 1 << 19


@dataclass(frozen=True)
class GeometryPoint:
    """Dimensionless source geometry.

    xi: crystal length over twice the pump Rayleigh range.
    alpha: target mode waist over pump waist.
    zeta: collection-plane offset in crystal lengths.
    phi0: collinear phase mismatch accumulated over the crystal.
    d: relative frequency offset from degeneracy, |d| <= 0.1.
    """

    xi: float
    alpha: float
    zeta: float = 0.0
    phi0: float = 0.0
    d: float = 0.0

    def __post_init__(self):
        if not self.xi > 0:
            raise ValueError(f"xi must be positive, got {self.xi}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not abs(self.d) <= 0.1:
            raise ValueError(f"|d| must be at most 0.1, got {self.d}")
        for name in ("xi", "alpha", "zeta", "phi0", "d"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass(frozen=True)
class OpticalIndices:
    """Refractive-index ratios entering the phase mismatch and phase terms.

    np_over_ns and np_over_ni scale the transverse walk-off of signal and
    idler; np_over_nps and np_over_npi (n_p/n'_s, n_p/n'_i) scale the
    collection-offset phase curvature.
    """

    np_over_ns: float = 1.0
    np_over_ni: float = 1.0
    np_over_nps: float = 1.0
    np_over_npi: float = 1.0

    def __post_init__(self):
        for name in ("np_over_ns", "np_over_ni", "np_over_nps",
                     "np_over_npi"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and positive")


@dataclass(frozen=True)
class PolingSeries:
    """Fourier decomposition of the poling profile around the working order.

    terms holds (delta_m, r_m) pairs relative to the phase-matched order,
    sorted by delta_m, with the working term (0, 1.0) always present.  The
    overall 2/pi Fourier amplitude of the working order is not included
    here; it belongs to the effective nonlinearity.
    """

    terms: tuple = ((0, 1.0),)

    def __post_init__(self):
        terms = tuple((int(m), float(r)) for (m, r) in self.terms)
        object.__setattr__(self, "terms", terms)
        if len(terms) == 0:
            raise ValueError("poling series needs at least one term")
        ms = [m for m, _ in terms]
        if len(set(ms)) != len(ms):
            raise ValueError("duplicate poling orders")
        if ms != sorted(ms):
            raise ValueError("poling terms must be sorted by order offset")
        zero = [r for m, r in terms if m == 0]
        if len(zero) != 1 or zero[0] != 1.0:
            raise ValueError("the working order (0, 1.0) must be present")


@dataclass(frozen=True)
class KFactors:
    """The three spatial factors, normalized by pump wavevector times length.

    k0 counts all pairs, k1 pairs with the signal coupled, k2 pairs with
    both photons coupled, so k2 <= k1 <= k0 up to quadrature error.
    """

    k0: float
    k1: float
    k2: float
    err_k0: float = 0.0
    err_k1: float = 0.0
    err_k2: float = 0.0

    def __post_init__(self):
        for name in ("k0", "k1", "k2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        slack21 = self.err_k2 + self.err_k1 + 1e-12 * (1.0 + self.k1)
        slack10 = self.err_k1 + self.err_k0 + 1e-12 * (1.0 + self.k0)
        if self.k2 > self.k1 + slack21 or self.k1 > self.k0 + slack10:
            raise ValueError(
                "k-factor ordering k2 <= k1 <= k0 violated beyond the "
                "quadrature error bounds")


def phasematch_sum(point: GeometryPoint, indices: OpticalIndices,
                   poling: PolingSeries, s2, u_s, u_i):
    """Poling-summed longitudinal phase-matching amplitude.

    Evaluates sum_m r_m sinc(phi0/2 + pi delta_m + xi [s2
    - 2 (n_p/n_s)(1-d) u_s - 2 (n_p/n_i)(1+d) u_i]) for the normalized
    squared transverse arguments s2 = |phi_s + phi_i|^2, u_s = |phi_s|^2,
    u_i = |phi_i|^2.  Vectorized over array-valued arguments.
    """
    base = point.phi0 / 2.0 + point.xi * (
        np.asarray(s2)
        - 2.0 * indices.np_over_ns * (1.0 - point.d) * np.asarray(u_s)
        - 2.0 * indices.np_over_ni * (1.0 + point.d) * np.asarray(u_i))
    terms = poling.terms
    if len(terms) == 1:
        return sinc(base)
    acc = None
    for m, r in terms:
        part = r * sinc(base + np.pi * m)
        acc = part if acc is None else acc + part
    return acc


def truncation_radius(alpha: float, epsilon: float) -> float:
    """Radius beyond which exp(-(1+alpha^2) rho^2) drops below epsilon.

    alpha = 0 is allowed so callers can truncate on a bare exp(-rho^2)
    envelope.
    """
    if not 0.0 < epsilon < 1.0:
        raise InvalidEpsilonError(f"epsilon must be in (0, 1), got {epsilon}")
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    return float(np.sqrt(np.log(1.0 / epsilon) / (1.0 + alpha * alpha)))


# ----------------------------------------------------------------------------
# Truncated domains, shared by the reduced quadratures and the Monte Carlo
# oracle so both integrate exactly the same region.
# ----------------------------------------------------------------------------

def _k2_radius(point: GeometryPoint) -> float:
    base = truncation_radius(point.alpha, _TRUNC_EPS)
    a2 = point.alpha * point.alpha
    if a2 < 1.0:
        # Along the anti-diagonal the Gaussian envelope decays only as
        # exp(-2 alpha^2 rho^2); the sinc envelope bounds what the Gaussian
        # does not.
        r_diag = np.sqrt(np.log(1.0 / _TRUNC_EPS) / (2.0 * a2))
        r_sinc = np.sqrt((_SINC_PHASE + abs(point.phi0) / 2.0)
                         / (4.0 * point.xi))
        base = max(base, min(r_diag, r_sinc))
    return float(min(base, _RADIUS_CAP))


def _k0_radius(point: GeometryPoint, indices: OpticalIndices) -> float:
    r = np.sqrt(_SINC_PHASE / (2.0 * point.xi * indices.np_over_ns))
    return float(min(r, _RADIUS_CAP))


def _k1_radii(point: GeometryPoint) -> Tuple[float, float]:
    a2 = point.alpha * point.alpha
    log_eps = np.log(1.0 / _TRUNC_EPS)
    r_i = np.sqrt(log_eps * (1.0 + a2) / (2.0 * a2))
    r_i = min(r_i, _RADIUS_CAP)
    r_s = r_i / (1.0 + a2) + truncation_radius(point.alpha, _TRUNC_EPS)
    return float(min(r_s, _RADIUS_CAP)), float(r_i)


# ----------------------------------------------------------------------------
# Reduced quadratures.
# ----------------------------------------------------------------------------

def _pm_args(point, indices):
    cs = 2.0 * indices.np_over_ns * (1.0 - point.d)
    ci = 2.0 * indices.np_over_ni * (1.0 + point.d)
    return cs, ci


def _pm_sum(point, poling, base):
    terms = poling.terms
    if len(terms) == 1:
        return sinc(base)
    acc = None
    for m, r in terms:
        part = r * sinc(base + np.pi * m)
        acc = part if acc is None else acc + part
    return acc


def k2_factor(point: GeometryPoint, indices: OpticalIndices = OpticalIndices(),
              poling: PolingSeries = PolingSeries(),
              rel_tol: float = DEFAULT_REL_TOL,
              max_evals: int = DEFAULT_MAX_EVALS) -> Tuple[float, float]:
    """Pair-coupling factor K2/(k_p0 L) with its error bound.

    The complex pair amplitude is integrated over (rho_s, rho_i,
    theta_s - theta_i) and squared afterwards.  Returns (value, error);
    a TOLERANCE_NOT_MET budget exhaustion is reported through the error
    bound, not raised.
    """
    xi = point.xi
    a2 = point.alpha * point.alpha
    cs, ci = _pm_args(point, indices)
    zs = 4.0 * xi * point.zeta * indices.np_over_nps
    zi = 4.0 * xi * point.zeta * indices.np_over_npi
    complex_phase = point.zeta != 0.0

    def integrand(pts):
        rs = pts[:, 0]
        ri = pts[:, 1]
        ct = np.cos(pts[:, 2])
        us = rs * rs
        ui = ri * ri
        cross = rs * ri
        crossct = cross * ct
        s2 = us + ui + 2.0 * crossct
        envelope = np.exp(-(1.0 + a2) * (us + ui) - 2.0 * crossct)
        base = point.phi0 / 2.0 + xi * (s2 - cs * us - ci * ui)
        pm = _pm_sum(point, poling, base)
        real = cross * envelope * pm
        if not complex_phase:
            return real
        return real * np.exp(-1j * (zs * us + zi * ui))

    r = _k2_radius(point)
    region = Region((0.0, 0.0, 0.0), (r, r, np.pi))
    est = integrate_cubature(integrand, region, rel_tol=rel_tol,
                             max_evals=max_evals)
    pref = (8.0 / np.pi ** 5) * xi * a2 * a2 * (4.0 * np.pi) ** 2
    amp = abs(est.value)
    value = pref * amp * amp
    error = pref * (2.0 * amp * est.abs_error + est.abs_error ** 2)
    return float(value), float(error)


def k0_factor(point: GeometryPoint, indices: OpticalIndices = OpticalIndices(),
              poling: PolingSeries = PolingSeries(),
              rel_tol: float = DEFAULT_REL_TOL,
              max_evals: int = DEFAULT_MAX_EVALS) -> Tuple[float, float]:
    """Unconditioned brightness factor K0/(k_p0 L) with its error bound.

    Independent of alpha and zeta; the integrand is the squared pair
    amplitude before any mode projection.
    """
    xi = point.xi
    cs, ci = _pm_args(point, indices)

    def integrand(pts):
        rs = pts[:, 0]
        ri = pts[:, 1]
        ct = np.cos(pts[:, 2])
        us = rs * rs
        ui = ri * ri
        cross = rs * ri
        s2 = us + ui + 2.0 * cross * ct
        base = point.phi0 / 2.0 + xi * (s2 - cs * us - ci * ui)
        pm = _pm_sum(point, poling, base)
        return cross * np.exp(-2.0 * s2) * pm * pm

    r = _k0_radius(point, indices)
    region = Region((0.0, 0.0, 0.0), (r, r, np.pi))
    est = integrate_cubature(integrand, region, rel_tol=rel_tol,
                             max_evals=max_evals)
    pref = (2.0 / np.pi ** 3) * xi * 4.0 * np.pi
    return float(pref * est.value.real), float(pref * est.abs_error)


def k1_factor(point: GeometryPoint, indices: OpticalIndices = OpticalIndices(),
              poling: PolingSeries = PolingSeries(),
              rel_tol: float = DEFAULT_REL_TOL,
              max_evals: int = DEFAULT_MAX_EVALS) -> Tuple[float, float]:
    """Signal-arm coupling factor K1/(k_p0 L) with its error bound.

    The signal-plane amplitude is integrated and squared at fixed idler
    radius, then integrated over the idler radius.  All signal-plane
    integrals of one outer batch share a subdivision tree; the inner
    tolerance is a quarter of the outer one so the propagated inner error
    stays subdominant.
    """
    xi = point.xi
    a2 = point.alpha * point.alpha
    cs, ci = _pm_args(point, indices)
    zs = 4.0 * xi * point.zeta * indices.np_over_nps
    complex_phase = point.zeta != 0.0

    r_s, r_i = _k1_radii(point)
    inner_region = Region((0.0, 0.0), (r_s, np.pi))
    inner_tol = rel_tol / 4.0

    def outer_integrand(pts):
        ri = pts[:, 0]
        ui = ri * ri

        def inner(qts):
            rs = qts[:, 0]
            ct = np.cos(qts[:, 1])
            us = rs * rs
            cross = rs[:, None] * ri[None, :]
            s2 = us[:, None] + ui[None, :] + 2.0 * cross * ct[:, None]
            base = point.phi0 / 2.0 + xi * (
                s2 - cs * us[:, None] - ci * ui[None, :])
            pm = _pm_sum(point, poling, base)
            envelope = np.exp(-s2 - (a2 * us)[:, None])
            val = rs[:, None] * envelope * pm
            if not complex_phase:
                return val
            return val * np.exp(-1j * zs * us)[:, None]

        vals, errv, _, _ = integrate_cubature_vector(
            inner, inner_region, rel_tol=inner_tol, max_evals=max_evals)
        amp = 2.0 * np.abs(vals)
        err = 2.0 * errv
        out = np.empty((pts.shape[0], 2))
        out[:, 0] = ri * amp * amp
        out[:, 1] = ri * (2.0 * amp * err + err * err)
        return out

    outer_region = Region((0.0,), (r_i,))
    vals, errv, _, _ = integrate_cubature_vector(
        outer_integrand, outer_region, rel_tol=rel_tol, max_evals=max_evals)
    pref = (4.0 / np.pi ** 4) * xi * a2 * 2.0 * np.pi
    value = pref * vals[0].real
    error = pref * (errv[0] + abs(vals[1]) + errv[1])
    return float(max(value, 0.0)), float(error)


def k_factors(point: GeometryPoint, indices: OpticalIndices = OpticalIndices(),
              poling: PolingSeries = PolingSeries(),
              rel_tol: float = DEFAULT_REL_TOL,
              max_evals: int = DEFAULT_MAX_EVALS) -> KFactors:
    """All three factors at one geometry, with their error bounds."""
    v0, e0 = k0_factor(point, indices, poling, rel_tol, max_evals)
    v1, e1 = k1_factor(point, indices, poling, rel_tol, max_evals)
    v2, e2 = k2_factor(point, indices, poling, rel_tol, max_evals)
    return KFactors(k0=v0, k1=v1, k2=v2, err_k0=e0, err_k1=e1, err_k2=e2)


# ----------------------------------------------------------------------------
# Monte Carlo oracle: direct 4D estimates without the polar reduction.
# ----------------------------------------------------------------------------

def _cart_pm(point, indices, poling, s2, us, ui):
    cs, ci = _pm_args(point, indices)
    base = point.phi0 / 2.0 + point.xi * (s2 - cs * us - ci * ui)
    return _pm_sum(point, poling, base)


def k_oracle_mc(point: GeometryPoint, indices: OpticalIndices = OpticalIndices(),
                poling: PolingSeries = PolingSeries(), which: str = "K2",
                samples: int = 1_000_000, seed: int = 0) -> Tuple[float, float]:
    """Monte Carlo estimate of a K-factor over the untransformed 4D domain.

    Samples the transverse planes directly, masked to the same radii that
    the reduced quadratures integrate, so both methods target the identical
    truncated integral.  Returns (estimate, standard error); the standard
    error is the 1-sigma propagation of the mean estimator.
    """
    if samples < 100_000:
        raise ValueError("need at least 10^5 samples")
    which = which.upper()
    xi = point.xi
    a2 = point.alpha * point.alpha

    if which == "K2":
        r = _k2_radius(point)
        zs = 4.0 * xi * point.zeta * indices.np_over_nps
        zi = 4.0 * xi * point.zeta * indices.np_over_npi

        def integrand(pts):
            xs, ys, xi_, yi_ = pts.T
            us = xs * xs + ys * ys
            ui = xi_ * xi_ + yi_ * yi_
            dot = xs * xi_ + ys * yi_
            s2 = us + ui + 2.0 * dot
            mask = (us <= r * r) & (ui <= r * r)
            pm = _cart_pm(point, indices, poling, s2, us, ui)
            val = np.exp(-(1.0 + a2) * (us + ui) - 2.0 * dot) * pm
            if point.zeta != 0.0:
                val = val * np.exp(-1j * (zs * us + zi * ui))
            return np.where(mask, val, 0.0)

        region = Region((-r, -r, -r, -r), (r, r, r, r))
        est = integrate_mc(integrand, region, samples=samples, seed=seed)
        pref = (8.0 / np.pi ** 5) * xi * a2 * a2
        amp2 = abs(est.value) ** 2 - est.abs_error ** 2
        value = pref * amp2
        stderr = pref * 2.0 * abs(est.value) * est.abs_error
        return float(value), float(stderr)

    if which == "K0":
        r = _k0_radius(point, indices)

        def integrand(pts):
            xs, ys, xi_, yi_ = pts.T
            us = xs * xs + ys * ys
            ui = xi_ * xi_ + yi_ * yi_
            dot = xs * xi_ + ys * yi_
            s2 = us + ui + 2.0 * dot
            mask = (us <= r * r) & (ui <= r * r)
            pm = _cart_pm(point, indices, poling, s2, us, ui)
            return np.where(mask, np.exp(-2.0 * s2) * pm * pm, 0.0)

        region = Region((-r, -r, -r, -r), (r, r, r, r))
        est = integrate_mc(integrand, region, samples=samples, seed=seed)
        pref = (2.0 / np.pi ** 3) * xi
        return float(pref * est.value.real), float(pref * est.abs_error)

    if which == "K1":
        return _k1_oracle(point, indices, poling, samples, seed)

    raise ValueError(f"unknown factor {which!r}; expected K0, K1 or K2")


def _k1_oracle(point, indices, poling, samples, seed):
    # The squared inner integral needs two independent signal draws per
    # idler draw: E[Q1(s1, i) conj(Q1(s2, i))] = |int Q1 d2phi_s|^2 without
    # the single-draw variance bias.
    xi = point.xi
    a2 = point.alpha * point.alpha
    zs = 4.0 * xi * point.zeta * indices.np_over_nps
    r_s, r_i = _k1_radii(point)
    v_s = (2.0 * r_s) ** 2
    v_i = (2.0 * r_i) ** 2

    def q1(xs, ys, xi_, yi_, ui):
        us = xs * xs + ys * ys
        dot = xs * xi_ + ys * yi_
        s2 = us + ui + 2.0 * dot
        pm = _cart_pm(point, indices, poling, s2, us, ui)
        val = np.exp(-s2 - a2 * us) * pm
        if point.zeta != 0.0:
            val = val * np.exp(-1j * zs * us)
        return np.where(us <= r_s * r_s, val, 0.0)

    rng = np.random.Generator(np.random.Philox(key=seed))
    n_done = 0
    acc = 0.0
    acc2 = 0.0
    while n_done < samples:
        n = min(_MC_CHUNK, samples - n_done)
        u = rng.random((n, 6))
        xi_ = (2.0 * u[:, 0] - 1.0) * r_i
        yi_ = (2.0 * u[:, 1] - 1.0) * r_i
        ui = xi_ * xi_ + yi_ * yi_
        xs1 = (2.0 * u[:, 2] - 1.0) * r_s
        ys1 = (2.0 * u[:, 3] - 1.0) * r_s
        xs2 = (2.0 * u[:, 4] - 1.0) * r_s
        ys2 = (2.0 * u[:, 5] - 1.0) * r_s
        mask_i = ui <= r_i * r_i
        z = np.real(q1(xs1, ys1, xi_, yi_, ui)
                    * np.conj(q1(xs2, ys2, xi_, yi_, ui)))
        z = np.where(mask_i, z, 0.0)
        acc += float(z.sum())
        acc2 += float((z * z).sum())
        n_done += n

    mean = acc / samples
    var = max(acc2 / samples - mean * mean, 0.0) * samples / (samples - 1)
    se = np.sqrt(var / samples)
    pref = (4.0 / np.pi ** 4) * xi * a2 * v_s * v_s * v_i
    return float(pref * mean), float(pref * se)
