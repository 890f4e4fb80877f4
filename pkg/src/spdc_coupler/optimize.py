"""Parameter sweeps and maxima of the coupling figures of merit.

Evaluates a chosen metric on dense (alpha, phi0) grids per focusing value,
refines the best cell with a bounded simplex search, and tabulates spectral
factors.  Grid cells run under a reduced evaluation budget that is enough
to rank cells; refinement re-evaluates candidates under the full budget.
Cell order is row-major with alpha outer, and parallel evaluation never
changes the output order.
"""

from __future__ import annotations

import enum
import multiprocessing
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .mathkit import DEFAULT_ABS_TOL, DEFAULT_MAX_EVALS, DEFAULT_REL_TOL
from .spatial import (GeometryPoint, OpticalIndices, PolingSeries,
                      k0_factor, k1_factor, k2_factor)
from .spectral import omega2_factor_gaussian

__all__ = [
    "Metric",
    "SweepSpec",
    "SweepCell",
    "OptimumRecord",
    "sweep_grid",
    "maximize_at_xi",
    "xi_curve",
    "spectral_curve",
]

#: Per-cell evaluation cap in grid stages; refinement restores the default.
GRID_MAX_EVALS = 400_000

#: Nested single-arm quadratures get a coarser grid budget: their inner
#: integrals multiply the cost, and grid cells only rank candidates.
GRID_NESTED_REL_TOL = 1.0e-2
GRID_NESTED_MAX_EVALS = 20_000

#: Refinement budget for the nested single-arm factor.
REFINE_NESTED_REL_TOL = 1.0e-3
REFINE_NESTED_MAX_EVALS = 400_000

_SIMPLEX_DIAM_TOL = 1.0e-3
_SIMPLEX_MAX_ITER = 200
_MAXIMIZE_GRID_N = 41


class Metric(enum.Enum):
    K2 = "K2"
    K0 = "K0"
    K1 = "K1"
    GAMMA2 = "GAMMA2"
    GAMMA21 = "GAMMA21"


@dataclass(frozen=True)
class SweepSpec:
    """What to evaluate: metric, focusing values, grid ranges and accuracy."""

    metric: Metric
    xi_values: Tuple[float, ...]
    alpha_range: Tuple[float, float, int] = (0.3, 4.0, 41)
    phi0_range: Tuple[float, float, int] = (-2.0, 10.0, 41)
    zeta: float = 0.0
    indices: OpticalIndices = field(default_factory=OpticalIndices)
    poling: PolingSeries = field(default_factory=PolingSeries)
    tol: float = DEFAULT_REL_TOL

    def __post_init__(self):
        if isinstance(self.metric, str):
            object.__setattr__(self, "metric", Metric(self.metric))
        xi = tuple(float(x) for x in self.xi_values)
        object.__setattr__(self, "xi_values", xi)
        if len(xi) == 0:
            raise ValueError("xi_values must be nonempty")
        if any(x <= 0 for x in xi):
            raise ValueError("xi_values must be positive")
        for name in ("alpha_range", "phi0_range"):
            lo, hi, n = getattr(self, name)
            rng = (float(lo), float(hi), int(n))
            object.__setattr__(self, name, rng)
            if not rng[0] < rng[1]:
                raise ValueError(f"{name} must have lo < hi")
            if rng[2] < 2:
                raise ValueError(f"{name} needs at least 2 samples")
        if not self.tol > 0:
            raise ValueError("tol must be positive")

    def alphas(self) -> np.ndarray:
        lo, hi, n = self.alpha_range
        return np.linspace(lo, hi, n)

    def phi0s(self) -> np.ndarray:
        lo, hi, n = self.phi0_range
        return np.linspace(lo, hi, n)


class SweepCell(NamedTuple):
    alpha: float
    phi0: float
    value: float
    error: float
    converged: bool


@dataclass(frozen=True)
class OptimumRecord:
    """A per-focusing optimum of one metric.

    k0_at_opt carries the unconditioned brightness factor evaluated at
    (xi, phi0_opt) when a curve asks for it; it is None otherwise.
    """

    xi: float
    alpha_opt: float
    phi0_opt: float
    metric_value: float
    metric: Metric
    converged: bool
    k0_at_opt: Optional[float] = None


# ----------------------------------------------------------------------------
# Metric evaluation under stage-dependent budgets.
# ----------------------------------------------------------------------------

def _budget(metric: Metric, tol: float, stage: str):
    """(fast_tol, fast_cap, nested_tol, nested_cap) for one stage."""
    if stage == "grid":
        return (tol, GRID_MAX_EVALS,
                max(tol, GRID_NESTED_REL_TOL), GRID_NESTED_MAX_EVALS)
    return (tol, DEFAULT_MAX_EVALS,
            max(tol, REFINE_NESTED_REL_TOL), REFINE_NESTED_MAX_EVALS)


def _eval_metric(metric: Metric, xi: float, alpha: float, phi0: float,
                 zeta: float, indices: OpticalIndices, poling: PolingSeries,
                 tol: float, stage: str,
                 k0_pack: Optional[Tuple[float, float]] = None):
    """One metric value -> (value, error bound, converged)."""
    ft, fc, nt, nc = _budget(metric, tol, stage)
    point = GeometryPoint(xi=xi, alpha=alpha, zeta=zeta, phi0=phi0)

    if metric is Metric.K0:
        v, e = k0_factor(point, indices, poling, rel_tol=ft, max_evals=fc)
        return v, e, e <= max(ft * abs(v), DEFAULT_ABS_TOL) * 1.0001 or v == 0.0

    if metric is Metric.K2:
        v, e = k2_factor(point, indices, poling, rel_tol=ft, max_evals=fc)
        return v, e, e <= max(ft * abs(v), DEFAULT_ABS_TOL) * 1.0001 or v == 0.0

    if metric is Metric.K1:
        v, e = k1_factor(point, indices, poling, rel_tol=nt, max_evals=nc)
        return v, e, e <= max(nt * abs(v), DEFAULT_ABS_TOL) * 1.0001 or v == 0.0

    if metric is Metric.GAMMA2:
        v2, e2 = k2_factor(point, indices, poling, rel_tol=ft, max_evals=fc)
        if k0_pack is None:
            k0_pack = k0_factor(point, indices, poling, rel_tol=ft,
                                max_evals=fc)
        v0, e0 = k0_pack
        if v0 <= e0:
            return 0.0, np.inf, False
        g = v2 / v0
        err = g * (e2 / max(v2, 1e-300) + e0 / v0)
        return g, err, err <= max(4.0 * ft * g, 1e-300)

    if metric is Metric.GAMMA21:
        v2, e2 = k2_factor(point, indices, poling, rel_tol=ft, max_evals=fc)
        v1, e1 = k1_factor(point, indices, poling, rel_tol=nt, max_evals=nc)
        if v1 <= e1:
            return 0.0, np.inf, False
        g = v2 / v1
        err = g * (e2 / max(v2, 1e-300) + e1 / v1)
        return g, err, err <= max(4.0 * nt * g, 1e-300)

    raise ValueError(f"unknown metric {metric}")


def _cell_worker(payload):
    (metric, xi, alpha, phi0, zeta, indices, poling, tol, stage,
     k0_pack) = payload
    return _eval_metric(metric, xi, alpha, phi0, zeta, indices, poling,
                        tol, stage, k0_pack)


def _parallel_map(payloads, workers: int):
    if workers <= 1 or len(payloads) < 2:
        return [_cell_worker(p) for p in payloads]
    chunk = max(1, len(payloads) // (8 * workers))
    with multiprocessing.Pool(processes=workers) as pool:
        return pool.map(_cell_worker, payloads, chunksize=chunk)


def _k0_per_phi0(spec: SweepSpec, xi: float, phi0s: np.ndarray, stage: str,
                 workers: int):
    """K0 at each phi0 (alpha-independent), evaluated once per column."""
    payloads = [(Metric.K0, xi, 1.0, float(p), spec.zeta, spec.indices,
                 spec.poling, spec.tol, stage, None) for p in phi0s]
    out = _parallel_map(payloads, workers)
    return {float(p): (v, e) for p, (v, e, _) in zip(phi0s, out)}


# ----------------------------------------------------------------------------
# Dense grids.
# ----------------------------------------------------------------------------

def _grid_cells(spec: SweepSpec, xi: float, alphas: np.ndarray,
                phi0s: np.ndarray, stage: str, workers: int) -> List[SweepCell]:
    metric = spec.metric
    if metric is Metric.K0:
        per_phi0 = _k0_per_phi0(spec, xi, phi0s, stage, workers)
        cells = []
        for a in alphas:
            for p in phi0s:
                v, e = per_phi0[float(p)]
                cells.append(SweepCell(float(a), float(p), v, e, True))
        return cells

    k0_map = None
    if metric is Metric.GAMMA2:
        k0_map = _k0_per_phi0(spec, xi, phi0s, stage, workers)

    payloads = []
    for a in alphas:
        for p in phi0s:
            pack = k0_map[float(p)] if k0_map is not None else None
            payloads.append((metric, xi, float(a), float(p), spec.zeta,
                             spec.indices, spec.poling, spec.tol, stage,
                             pack))
    results = _parallel_map(payloads, workers)
    return [SweepCell(pl[2], pl[3], v, e, bool(c))
            for pl, (v, e, c) in zip(payloads, results)]


def sweep_grid(spec: SweepSpec, xi: float, workers: int = 1) -> List[SweepCell]:
    """Dense metric evaluation over the spec's (alpha, phi0) grid.

    Returns cells in row-major order (alpha outer, phi0 inner).  Cells that
    exhausted their budget carry converged=False and stay in the output.
    """
    if xi not in spec.xi_values:
        raise ValueError(f"xi={xi} is not in the sweep's xi_values")
    return _grid_cells(spec, xi, spec.alphas(), spec.phi0s(), "grid",
                       workers)


# ----------------------------------------------------------------------------
# Simplex refinement.
# ----------------------------------------------------------------------------

def _nelder_mead(f, x0, steps, bounds):
    """Bounded Nelder-Mead minimization in 2D.

    Candidate points are clamped to the bounds.  Terminates when the
    simplex extent drops below the diameter tolerance in both coordinates.
    Returns (x_best, f_best, converged).
    """
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])

    def clamp(x):
        return np.minimum(np.maximum(x, lo), hi)

    pts = [clamp(np.asarray(x0, dtype=float))]
    for k in range(2):
        step = np.zeros(2)
        step[k] = steps[k]
        cand = clamp(pts[0] + step)
        if np.allclose(cand, pts[0]):
            cand = clamp(pts[0] - step)
        pts.append(cand)
    vals = [f(p) for p in pts]

    for _ in range(_SIMPLEX_MAX_ITER):
        order = np.argsort(vals)
        pts = [pts[i] for i in order]
        vals = [vals[i] for i in order]
        spread = np.max(np.abs(np.array(pts) - pts[0]), axis=0)
        if np.all(spread < _SIMPLEX_DIAM_TOL):
            return pts[0], vals[0], True
        centroid = 0.5 * (pts[0] + pts[1])
        xr = clamp(centroid + (centroid - pts[2]))
        fr = f(xr)
        if fr < vals[0]:
            xe = clamp(centroid + 2.0 * (centroid - pts[2]))
            fe = f(xe)
            if fe < fr:
                pts[2], vals[2] = xe, fe
            else:
                pts[2], vals[2] = xr, fr
        elif fr < vals[1]:
            pts[2], vals[2] = xr, fr
        else:
            if fr < vals[2]:
                xc = clamp(centroid + 0.5 * (xr - centroid))
            else:
                xc = clamp(centroid + 0.5 * (pts[2] - centroid))
            fc = f(xc)
            if fc < min(fr, vals[2]):
                pts[2], vals[2] = xc, fc
            else:
                for k in (1, 2):
                    pts[k] = clamp(pts[0] + 0.5 * (pts[k] - pts[0]))
                    vals[k] = f(pts[k])
    order = np.argsort(vals)
    return pts[order[0]], vals[order[0]], False


def maximize_at_xi(spec: SweepSpec, xi: float,
                   workers: int = 1) -> OptimumRecord:
    """Best (alpha, phi0) of the metric at one focusing value.

    A 41x41 grid over the spec's ranges picks the starting cell by its
    error-aware lower confidence bound, then a bounded simplex search
    refines it under the full evaluation budget.  A stalled refinement
    returns the best point seen with converged=False.
    """
    if spec.metric not in (Metric.K2, Metric.GAMMA2, Metric.GAMMA21):
        raise ValueError(
            "maximization supports the K2, GAMMA2 and GAMMA21 metrics")
    a_lo, a_hi, _ = spec.alpha_range
    p_lo, p_hi, _ = spec.phi0_range
    alphas = np.linspace(a_lo, a_hi, _MAXIMIZE_GRID_N)
    phi0s = np.linspace(p_lo, p_hi, _MAXIMIZE_GRID_N)
    cells = _grid_cells(spec, xi, alphas, phi0s, "grid", workers)

    def lcb(cell: SweepCell) -> float:
        if not np.isfinite(cell.value) or not np.isfinite(cell.error):
            return -np.inf
        return cell.value - cell.error

    start = max(cells, key=lcb)

    cache = {}

    def objective(x):
        key = (round(float(x[0]), 12), round(float(x[1]), 12))
        if key not in cache:
            v, e, _ = _eval_metric(spec.metric, xi, key[0], key[1],
                                   spec.zeta, spec.indices, spec.poling,
                                   spec.tol, "refine")
            cache[key] = v
        return -cache[key]

    steps = (alphas[1] - alphas[0], phi0s[1] - phi0s[0])
    x_best, f_best, ok = _nelder_mead(
        objective, (start.alpha, start.phi0), steps,
        ((a_lo, a_hi), (p_lo, p_hi)))
    return OptimumRecord(xi=float(xi), alpha_opt=float(x_best[0]),
                         phi0_opt=float(x_best[1]),
                         metric_value=float(-f_best), metric=spec.metric,
                         converged=bool(ok))


def xi_curve(spec: SweepSpec, workers: int = 1) -> List[OptimumRecord]:
    """Per-focusing optima across the sweep's xi values.

    Each record additionally carries the unconditioned brightness factor
    at (xi, phi0_opt) in k0_at_opt, under the full evaluation budget.
    """
    records = []
    for xi in spec.xi_values:
        rec = maximize_at_xi(spec, xi, workers=workers)
        point = GeometryPoint(xi=xi, alpha=rec.alpha_opt, zeta=spec.zeta,
                              phi0=rec.phi0_opt)
        v0, _ = k0_factor(point, spec.indices, spec.poling,
                          rel_tol=spec.tol, max_evals=DEFAULT_MAX_EVALS)
        records.append(OptimumRecord(
            xi=rec.xi, alpha_opt=rec.alpha_opt, phi0_opt=rec.phi0_opt,
            metric_value=rec.metric_value, metric=rec.metric,
            converged=rec.converged, k0_at_opt=float(v0)))
    return records


def spectral_curve(delta_values: Sequence[float]) -> List[Tuple[float, float]]:
    """Spectral transmission factor tabulated over pump linewidth ratios."""
    return [(float(d), omega2_factor_gaussian(float(d)))
            for d in delta_values]
