"""Command-line front end.

Reads a line-oriented configuration file (``[section]`` headers and
``key = value`` lines, ``#`` comments), dispatches to the evaluation and
optimization operations, and writes CSV or JSON results.  Boundary units
follow how sources are usually quoted: wavelengths in nm, crystal lengths
in mm, poling periods and waists in um, bandwidths in GHz, pulse
durations in ns.  Everything is SI internally.  Output files start with a
comment line carrying the fully resolved configuration, so a result file
is enough to rerun its computation.
"""

from __future__ import annotations

import argparse
import enum
import json
import sys
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (ConfigError, ConfigParseError, MissingKeyError,
                     UnitRangeError, UnknownKeyError)
from .fom import PhysicalSource, absolute_probabilities
from .mathkit import DEFAULT_REL_TOL
from .optimize import (Metric, OptimumRecord, SweepSpec, maximize_at_xi,
                       spectral_curve, sweep_grid, xi_curve)
from .spatial import (GeometryPoint, OpticalIndices, PolingSeries,
                      k0_factor, k1_factor, k2_factor, k_oracle_mc)
from .spectral import omega2_factor_gaussian

__all__ = ["Command", "RunConfig", "parse_config", "render_config", "run",
           "main"]

_TWO_PI_C = 2.0 * np.pi * 299792458.0


class Command(enum.Enum):
    FOM = "fom"
    SWEEP = "sweep"
    OPTIMIZE = "optimize"
    XI_CURVE = "xi_curve"
    SPECTRAL = "spectral"
    SELFTEST = "selftest"


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run description; defaults are baked in."""

    command: Command
    geometry: GeometryPoint
    indices: OpticalIndices
    poling: PolingSeries
    source: Optional[PhysicalSource]
    sweep: Optional[SweepSpec]
    spectral_deltas: Optional[Tuple[float, ...]]
    output_path: str
    output_format: str
    tol: float
    seed: int


# ----------------------------------------------------------------------------
# Schema.
# ----------------------------------------------------------------------------

_SECTIONS = ("run", "geometry", "indices", "poling", "source", "sweep",
             "spectral")

_KEYS: Dict[str, Tuple[str, ...]] = {
    "run": ("command", "output", "format", "tol", "seed"),
    "geometry": ("xi", "alpha", "phi0", "zeta", "d"),
    "indices": ("np_over_ns", "np_over_ni", "np_over_nps", "np_over_npi"),
    "poling": ("terms",),
    "source": ("pulse_energy_j", "chi_eff_m_per_v", "L_mm",
               "poling_period_um", "filter_ghz", "pulse_fwhm_ns",
               "lambda_pump_nm", "lambda_signal_nm", "n_p", "n_s", "n_i",
               "n_prime_s", "n_prime_i", "pump_waist_um"),
    "sweep": ("metric", "xi_values", "alpha", "phi0"),
    "spectral": ("delta",),
}

_SOURCE_REQUIRED = _KEYS["source"]


def _parse_float(token: str, line: int, col: int) -> float:
    try:
        v = float(token)
    except ValueError:
        raise ConfigParseError(f"expected a number, got {token!r}", line,
                               col) from None
    if not np.isfinite(v):
        raise ConfigParseError(f"number is not finite: {token!r}", line, col)
    return v


def _parse_int(token: str, line: int, col: int) -> int:
    try:
        return int(token, 10)
    except ValueError:
        raise ConfigParseError(f"expected an integer, got {token!r}", line,
                               col) from None


def _parse_range(token: str, line: int, col: int):
    """lo:hi:n with an optional :log suffix -> tuple of values."""
    parts = token.split(":")
    log = False
    if len(parts) == 4:
        if parts[3] != "log":
            raise ConfigParseError(
                f"range suffix must be 'log', got {parts[3]!r}", line, col)
        log = True
        parts = parts[:3]
    if len(parts) != 3:
        raise ConfigParseError(
            "expected lo:hi:n or lo:hi:n:log", line, col)
    lo = _parse_float(parts[0], line, col)
    hi = _parse_float(parts[1], line, col)
    n = _parse_int(parts[2], line, col)
    if n < 2:
        raise UnitRangeError(f"range needs at least 2 points, got {n}")
    if not lo < hi:
        raise UnitRangeError(f"range needs lo < hi, got {lo}:{hi}")
    if log:
        if lo <= 0:
            raise UnitRangeError("log range needs lo > 0")
        return tuple(float(v) for v in
                     lo * (hi / lo) ** (np.arange(n) / (n - 1)))
    return tuple(float(v) for v in np.linspace(lo, hi, n))


def _parse_values(value: str, line: int, col: int) -> Tuple[float, ...]:
    """A whitespace-separated list of numbers, or one lo:hi:n[:log] range."""
    tokens = value.split()
    if len(tokens) == 1 and ":" in tokens[0]:
        return _parse_range(tokens[0], line, col)
    out = []
    pos = 0
    for tok in tokens:
        pos = value.find(tok, pos)
        out.append(_parse_float(tok, line, col + pos))
        pos += len(tok)
    return tuple(out)


def _parse_terms(value: str, line: int, col: int) -> Tuple[Tuple[int, float], ...]:
    terms = []
    pos = 0
    for tok in value.split():
        pos = value.find(tok, pos)
        if ":" not in tok:
            raise ConfigParseError(
                f"poling term must be order:amplitude, got {tok!r}", line,
                col + pos)
        m_str, r_str = tok.split(":", 1)
        terms.append((_parse_int(m_str, line, col + pos),
                      _parse_float(r_str, line, col + pos)))
        pos += len(tok)
    return tuple(terms)


# ----------------------------------------------------------------------------
# Parsing.
# ----------------------------------------------------------------------------

def _tokenize(text: str):
    """-> dict of section -> key -> (value string, line number, value col)."""
    data: Dict[str, Dict[str, Tuple[str, int, int]]] = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ConfigParseError("unterminated section header",
                                       lineno, len(line.rstrip()))
            name = stripped[1:-1].strip()
            if name not in _SECTIONS:
                raise UnknownKeyError(
                    f"line {lineno}: unknown section [{name}]")
            section = name
            data.setdefault(section, {})
            continue
        if "=" not in stripped:
            raise ConfigParseError("expected key = value", lineno, 1)
        if section is None:
            raise ConfigParseError("key outside any [section]", lineno, 1)
        key, value = line.split("=", 1)
        key = key.strip()
        if key not in _KEYS[section]:
            raise UnknownKeyError(
                f"line {lineno}: unknown key {key!r} in [{section}]")
        if key in data[section]:
            raise ConfigParseError(f"duplicate key {key!r}", lineno, 1)
        vcol = len(line) - len(line.split("=", 1)[1]) + 1
        lead = len(value) - len(value.lstrip())
        data[section][key] = (value.strip(), lineno, vcol + lead)
    return data


def _get(data, section, key):
    return data.get(section, {}).get(key)


def _need(data, section, key, command):
    entry = _get(data, section, key)
    if entry is None:
        raise MissingKeyError(
            f"[{section}] {key} is required for command {command.value}")
    return entry


def _wrap_range_error(fn, *args):
    try:
        return fn(*args)
    except ConfigError:
        raise
    except ValueError as exc:
        raise UnitRangeError(str(exc)) from None


def parse_config(text: str,
                 command_override: Optional[Command] = None) -> RunConfig:
    """Parse and validate configuration text into a resolved RunConfig.

    When the command is given on the command line it overrides the
    ``[run] command`` key, and per-command key requirements are checked
    against the overriding command.
    """
    data = _tokenize(text)

    entry = _get(data, "run", "command")
    if command_override is not None:
        command = command_override
    elif entry is None:
        raise MissingKeyError("[run] command is required")
    else:
        cmd_str, lineno, col = entry
        try:
            command = Command(cmd_str.lower())
        except ValueError:
            raise ConfigParseError(f"unknown command {cmd_str!r}", lineno,
                                   col) from None

    def floatkey(section, key, default=None, required=False):
        e = _get(data, section, key)
        if e is None:
            if required:
                raise MissingKeyError(
                    f"[{section}] {key} is required for command "
                    f"{command.value}")
            return default
        return _parse_float(*e)

    tol = floatkey("run", "tol", DEFAULT_REL_TOL)
    if tol <= 0:
        raise UnitRangeError(f"tol must be positive, got {tol}")
    e = _get(data, "run", "seed")
    seed = _parse_int(*e) if e is not None else 0
    if seed < 0:
        raise UnitRangeError(f"seed must be nonnegative, got {seed}")
    e = _get(data, "run", "format")
    fmt = (e[0].lower() if e is not None else "csv")
    if fmt not in ("csv", "json"):
        raise UnitRangeError(f"format must be csv or json, got {fmt!r}")
    e = _get(data, "run", "output")
    output = e[0] if e is not None else "results." + fmt

    geom_required = command is Command.FOM
    geometry = _wrap_range_error(
        GeometryPoint,
        floatkey("geometry", "xi", 1.0, required=geom_required),
        floatkey("geometry", "alpha", 1.0, required=geom_required),
        floatkey("geometry", "zeta", 0.0),
        floatkey("geometry", "phi0", 0.0),
        floatkey("geometry", "d", 0.0))

    indices = _wrap_range_error(
        OpticalIndices,
        floatkey("indices", "np_over_ns", 1.0),
        floatkey("indices", "np_over_ni", 1.0),
        floatkey("indices", "np_over_nps", 1.0),
        floatkey("indices", "np_over_npi", 1.0))

    e = _get(data, "poling", "terms")
    poling = _wrap_range_error(
        PolingSeries, _parse_terms(*e) if e is not None else ((0, 1.0),))

    source = None
    if command is Command.FOM or data.get("source"):
        required = command is Command.FOM
        vals = {}
        missing = []
        for key in _SOURCE_REQUIRED:
            e = _get(data, "source", key)
            if e is None:
                missing.append(key)
            else:
                vals[key] = _parse_float(*e)
        if missing and (required or vals):
            raise MissingKeyError(
                "[source] is incomplete; missing: " + ", ".join(missing))
        if vals:
            omega_p0 = _TWO_PI_C / (vals["lambda_pump_nm"] * 1e-9)
            omega_s0 = _TWO_PI_C / (vals["lambda_signal_nm"] * 1e-9)
            if not omega_s0 < omega_p0:
                raise UnitRangeError(
                    "signal wavelength must exceed the pump wavelength")
            source = _wrap_range_error(
                PhysicalSource,
                vals["pulse_energy_j"], vals["chi_eff_m_per_v"],
                vals["L_mm"] * 1e-3, vals["poling_period_um"] * 1e-6,
                2.0 * np.pi * vals["filter_ghz"] * 1e9,
                vals["pulse_fwhm_ns"] * 1e-9,
                omega_s0, omega_p0 - omega_s0, omega_p0,
                vals["n_p"], vals["n_s"], vals["n_i"],
                vals["n_prime_s"], vals["n_prime_i"],
                vals["pump_waist_um"] * 1e-6)

    sweep = None
    needs_sweep = command in (Command.SWEEP, Command.OPTIMIZE,
                              Command.XI_CURVE)
    if needs_sweep or data.get("sweep"):
        e = _get(data, "sweep", "metric")
        if e is None:
            if needs_sweep:
                raise MissingKeyError(
                    f"[sweep] metric is required for command {command.value}")
        else:
            m_str, lineno, col = e
            try:
                metric = Metric(m_str.upper())
            except ValueError:
                raise ConfigParseError(f"unknown metric {m_str!r}", lineno,
                                       col) from None
            e = _need(data, "sweep", "xi_values", command)
            xi_values = _parse_values(*e)
            def axis_range(key, default):
                e = _get(data, "sweep", key)
                if e is None:
                    return default
                toks = e[0].split(":")
                if len(toks) != 3:
                    raise ConfigParseError("expected lo:hi:n", e[1], e[2])
                return (_parse_float(toks[0], e[1], e[2]),
                        _parse_float(toks[1], e[1], e[2]),
                        _parse_int(toks[2], e[1], e[2]))

            a_rng = axis_range("alpha", (0.3, 4.0, 41))
            p_rng = axis_range("phi0", (-2.0, 10.0, 41))
            sweep = _wrap_range_error(
                SweepSpec, metric, xi_values, a_rng, p_rng, geometry.zeta,
                indices, poling, tol)
            if command in (Command.OPTIMIZE, Command.XI_CURVE) and \
                    metric not in (Metric.K2, Metric.GAMMA2, Metric.GAMMA21):
                raise UnitRangeError(
                    f"metric {metric.value} cannot be maximized; use K2, "
                    "GAMMA2 or GAMMA21")

    spectral_deltas = None
    if command is Command.SPECTRAL or data.get("spectral"):
        e = _get(data, "spectral", "delta")
        if e is None:
            if command is Command.SPECTRAL:
                raise MissingKeyError(
                    "[spectral] delta is required for command spectral")
        else:
            spectral_deltas = _parse_values(*e)
            if any(d < 0 for d in spectral_deltas):
                raise UnitRangeError("delta values must be nonnegative")

    return RunConfig(command=command, geometry=geometry, indices=indices,
                     poling=poling, source=source, sweep=sweep,
                     spectral_deltas=spectral_deltas, output_path=output,
                     output_format=fmt, tol=tol, seed=seed)


# ----------------------------------------------------------------------------
# Rendering (for provenance logging and round-trips).
# ----------------------------------------------------------------------------

def render_config(config: RunConfig) -> str:
    """Canonical text form; parse_config(render_config(c)) == c."""
    lines = ["[run]",
             f"command = {config.command.value}",
             f"output = {config.output_path}",
             f"format = {config.output_format}",
             f"tol = {config.tol!r}",
             f"seed = {config.seed}",
             "",
             "[geometry]",
             f"xi = {config.geometry.xi!r}",
             f"alpha = {config.geometry.alpha!r}",
             f"phi0 = {config.geometry.phi0!r}",
             f"zeta = {config.geometry.zeta!r}",
             f"d = {config.geometry.d!r}",
             "",
             "[indices]",
             f"np_over_ns = {config.indices.np_over_ns!r}",
             f"np_over_ni = {config.indices.np_over_ni!r}",
             f"np_over_nps = {config.indices.np_over_nps!r}",
             f"np_over_npi = {config.indices.np_over_npi!r}",
             "",
             "[poling]",
             "terms = " + " ".join(f"{m}:{r!r}"
                                   for m, r in config.poling.terms)]
    if config.source is not None:
        s = config.source
        lines += ["",
                  "[source]",
                  f"pulse_energy_j = {s.pulse_energy!r}",
                  f"chi_eff_m_per_v = {s.chi_eff!r}",
                  f"L_mm = {s.crystal_length / 1e-3!r}",
                  f"poling_period_um = {s.poling_period / 1e-6!r}",
                  f"filter_ghz = {s.filter_bandwidth / (2e9 * np.pi)!r}",
                  f"pulse_fwhm_ns = {s.pump_pulse_fwhm / 1e-9!r}",
                  f"lambda_pump_nm = {_TWO_PI_C / s.omega_p0 / 1e-9!r}",
                  f"lambda_signal_nm = {_TWO_PI_C / s.omega_s0 / 1e-9!r}",
                  f"n_p = {s.n_p!r}",
                  f"n_s = {s.n_s!r}",
                  f"n_i = {s.n_i!r}",
                  f"n_prime_s = {s.n_prime_s!r}",
                  f"n_prime_i = {s.n_prime_i!r}",
                  f"pump_waist_um = {s.pump_waist / 1e-6!r}"]
    if config.sweep is not None:
        sw = config.sweep
        a = sw.alpha_range
        p = sw.phi0_range
        lines += ["",
                  "[sweep]",
                  f"metric = {sw.metric.value}",
                  "xi_values = " + " ".join(repr(x) for x in sw.xi_values),
                  f"alpha = {a[0]!r}:{a[1]!r}:{a[2]}",
                  f"phi0 = {p[0]!r}:{p[1]!r}:{p[2]}"]
    if config.spectral_deltas is not None:
        lines += ["",
                  "[spectral]",
                  "delta = " + " ".join(repr(d)
                                        for d in config.spectral_deltas)]
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------------
# Output writing.
# ----------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%#.9g" % float(v)


def _config_comment(config: RunConfig) -> str:
    return "# " + render_config(config).strip().replace("\n", "; ")


def _write_csv(path: str, config: RunConfig, header: Sequence[str],
               rows: Sequence[Sequence]) -> None:
    parts = [_config_comment(config), ",".join(header)]
    for row in rows:
        parts.append(",".join(_fmt(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(parts) + "\n")


def _write_json(path: str, config: RunConfig, header: Sequence[str],
                rows: Sequence[Sequence]) -> None:
    records = []
    for row in rows:
        rec = {}
        for name, v in zip(header, row):
            if isinstance(v, bool):
                rec[name] = v
            elif isinstance(v, (int, np.integer)):
                rec[name] = int(v)
            else:
                rec[name] = float(v)
        records.append(rec)
    payload = {"config": render_config(config), "records": records}
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write(config: RunConfig, header, rows) -> None:
    if config.output_format == "json":
        _write_json(config.output_path, config, header, rows)
    else:
        _write_csv(config.output_path, config, header, rows)


# ----------------------------------------------------------------------------
# Command execution.
# ----------------------------------------------------------------------------

def _run_spectral(config: RunConfig) -> int:
    curve = spectral_curve(config.spectral_deltas)
    _write(config, ("delta", "omega2_over_dwf"), curve)
    return 0


def _run_fom(config: RunConfig) -> int:
    res = absolute_probabilities(config.source, config.geometry,
                                 config.indices, config.poling,
                                 rel_tol=config.tol)
    g = config.geometry
    header = ("xi", "alpha", "phi0", "zeta", "d", "p0", "p1", "p2",
              "gamma1", "gamma2", "gamma21", "k0", "k0_err", "k1",
              "k1_err", "k2", "k2_err", "omega1_over_dwf",
              "omega2_over_dwf", "delta")
    row = (g.xi, g.alpha, g.phi0, g.zeta, g.d, res.p0, res.p1, res.p2,
           res.gamma1, res.gamma2, res.gamma21, res.k.k0, res.k.err_k0,
           res.k.k1, res.k.err_k1, res.k.k2, res.k.err_k2,
           res.omega1_over_dwf, res.omega2_over_dwf, config.source.delta)
    _write(config, header, [row])
    return 0


def _run_sweep(config: RunConfig, threads: int) -> int:
    rows = []
    any_flagged = False
    for xi in config.sweep.xi_values:
        for cell in sweep_grid(config.sweep, xi, workers=threads):
            rows.append((xi, cell.alpha, cell.phi0, cell.value, cell.error,
                         cell.converged))
            any_flagged = any_flagged or not cell.converged
    _write(config, ("xi", "alpha", "phi0", "value", "error", "converged"),
           rows)
    return 2 if any_flagged else 0


def _optimize_rows(records: List[OptimumRecord], with_k0: bool):
    rows = []
    for rec in records:
        row = [rec.xi, rec.alpha_opt, rec.phi0_opt, rec.metric_value]
        if with_k0:
            row.append(rec.k0_at_opt)
        row.append(rec.converged)
        rows.append(tuple(row))
    return rows


def _run_optimize(config: RunConfig, threads: int) -> int:
    records = [maximize_at_xi(config.sweep, xi, workers=threads)
               for xi in config.sweep.xi_values]
    _write(config, ("xi", "alpha_opt", "phi0_opt", "metric_value",
                    "converged"), _optimize_rows(records, with_k0=False))
    return 0 if all(r.converged for r in records) else 2


def _run_xi_curve(config: RunConfig, threads: int) -> int:
    records = xi_curve(config.sweep, workers=threads)
    _write(config, ("xi", "alpha_opt", "phi0_opt", "metric_value",
                    "k0_at_opt", "converged"),
           _optimize_rows(records, with_k0=True))
    return 0 if all(r.converged for r in records) else 2


def _run_selftest(config: RunConfig) -> int:
    failures = []
    out = []

    def check(name, ok, detail):
        out.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        if not ok:
            failures.append(name)

    v0 = omega2_factor_gaussian(0.0)
    check("spectral zero-linewidth", abs(v0 - 0.7526928) <= 1e-6,
          f"value {v0:.9f}")
    r = omega2_factor_gaussian(np.sqrt(2.0))
    check("spectral sqrt2 ratio", abs(r - v0 / np.sqrt(2.0)) <= 1e-9,
          f"ratio residual {abs(r - v0 / np.sqrt(2.0)):.2e}")

    for alpha in (1.0, 1.5):
        for phi0 in (0.0, 1.0):
            pt = GeometryPoint(xi=0.01, alpha=alpha, phi0=phi0)
            s = np.sinc(phi0 / 2.0 / np.pi) ** 2
            ref2 = (8.0 / np.pi) * 0.01 * s / (alpha ** 2 + 2.0) ** 2
            ref1 = (2.0 / np.pi) * 0.01 * s / (1.0 + alpha ** 2)
            v2, _ = k2_factor(pt, rel_tol=config.tol)
            v1, _ = k1_factor(pt, rel_tol=config.tol)
            check(f"closed form k2 a={alpha} p={phi0}",
                  abs(v2 - ref2) <= 0.02 * ref2, f"rel {(v2-ref2)/ref2:+.1e}")
            check(f"closed form k1 a={alpha} p={phi0}",
                  abs(v1 - ref1) <= 0.02 * ref1, f"rel {(v1-ref1)/ref1:+.1e}")

    out.append("factor  point                    cubature      oracle"
               "        pull")
    for xi, alpha, phi0 in ((1.3, 1.2, 2.0), (4.0, 1.6, 3.5)):
        pt = GeometryPoint(xi=xi, alpha=alpha, phi0=phi0)
        for which, fn in (("K0", k0_factor), ("K1", k1_factor),
                          ("K2", k2_factor)):
            cv, ce = fn(pt, rel_tol=config.tol)
            mv, mse = k_oracle_mc(pt, which=which, samples=2_000_000,
                                  seed=config.seed)
            sigma = float(np.hypot(ce, mse))
            pull = abs(cv - mv) / sigma if sigma > 0 else 0.0
            ok = abs(cv - mv) <= max(4.0 * sigma, 0.015 * abs(cv))
            out.append(f"{which}   xi={xi} a={alpha} p={phi0}   "
                       f"{cv:.6e}  {mv:.6e}  {pull:5.2f}")
            if not ok:
                failures.append(f"oracle {which} at xi={xi}")

    print("\n".join(out))
    n = 2 + 8 + 6
    print(f"{n - len(failures)}/{n} checks passed")
    return 0 if not failures else 1


def run(config: RunConfig, threads: int = 1) -> int:
    """Execute one resolved configuration.  Returns the process exit code."""
    try:
        if config.command is Command.SPECTRAL:
            return _run_spectral(config)
        if config.command is Command.FOM:
            return _run_fom(config)
        if config.command is Command.SWEEP:
            return _run_sweep(config, threads)
        if config.command is Command.OPTIMIZE:
            return _run_optimize(config, threads)
        if config.command is Command.XI_CURVE:
            return _run_xi_curve(config, threads)
        if config.command is Command.SELFTEST:
            return _run_selftest(config)
        raise ValueError(f"unhandled command {config.command}")
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="spdc-coupler",
        description="Evaluate and optimize single-mode photon-pair "
                    "coupling figures of merit.")
    parser.add_argument("command",
                        choices=[c.value for c in Command])
    parser.add_argument("--config", required=True,
                        help="path to the configuration file")
    parser.add_argument("--out", help="output file path override")
    parser.add_argument("--format", choices=["csv", "json"],
                        help="output format override")
    parser.add_argument("--threads", type=int, default=1,
                        help="parallel workers for sweeps")
    parser.add_argument("--seed", type=int,
                        help="seed override for stochastic checks")
    args = parser.parse_args(argv)

    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1

    try:
        config = parse_config(text, command_override=Command(args.command))
        if args.out is not None:
            config = replace(config, output_path=args.out)
        if args.format is not None:
            config = replace(config, output_format=args.format)
        if args.seed is not None:
            if args.seed < 0:
                raise UnitRangeError("seed must be nonnegative")
            config = replace(config, seed=args.seed)
        if args.threads < 1:
            raise UnitRangeError("--threads must be at least 1")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    try:
        return run(config, threads=args.threads)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        where = ""
        if config.command is Command.FOM:
            g = config.geometry
            where = f" at (xi={g.xi}, alpha={g.alpha}, phi0={g.phi0})"
        print(f"error{where}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
