"""Command-line front end.

Usage::

    chebsys <command> --config <path> [--out <dir>] [--seed <int>]

Commands: check, interpolate, dt, remez, moments, polyharmonic, nested-build.
Every run writes ``report.json`` (plus command-specific CSV files) to the
output directory. Exit codes: 0 success, 2 mathematical refutation or
singularity (report still written), 1 malformed config or I/O failure.
Logging verbosity comes from ``CHEBSYS_LOG`` (quiet, info, debug).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import approx, colloc, interp, moments, polyharmonic
from ._linalg import SINGULAR_RTOL
from .core import FunctionSystem, SpanElement
from .errors import ConfigError, DomainError, MomentError, SingularSystemError, SmoothnessError
from .report import emit_report
from .schema import (
    compile_expression, expect_keys, integer, interval, number, number_list,
    system_from_declaration,
)

log = logging.getLogger("chebsys")

COMMANDS = ("check", "interpolate", "dt", "remez", "moments", "polyharmonic", "nested-build")
EXIT_OK, EXIT_INPUT, EXIT_MATH = 0, 1, 2
_COMMON = ("command", "seed", "tolerances")


@dataclass
class Outcome:
    result: dict
    status: str = "ok"
    tolerances: dict = field(default_factory=dict)
    artifacts: dict = field(default_factory=dict)  # file name -> (header, rows)

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.status == "ok" else EXIT_MATH


def _tolerances(cfg, defaults):
    tol = dict(defaults)
    given = cfg.get("tolerances", {})
    expect_keys(given, "tolerances", (), tuple(defaults))
    for k, v in given.items():
        tol[k] = number(v, f"tolerances.{k}")
        if tol[k] <= 0:
            raise ConfigError(f"tolerances.{k}: must be positive")
    return tol


def _flag(cfg, key, default):
    v = cfg.get(key, default)
    if not isinstance(v, bool):
        raise ConfigError(f"{key}: expected true or false")
    return v


def _curve(f, u, iv, count):
    ts = iv.grid(count)
    return [(t, e) for t, e in zip(ts, f(ts) - u(ts))]


# -- commands ---------------------------------------------------------------

def cmd_check(cfg, seed):
    expect_keys(cfg, "", ("system",), _COMMON + ("interval", "mode", "samples", "workers", "sweep_csv"))
    tol = _tolerances(cfg, {"singular_rtol": SINGULAR_RTOL})
    system = system_from_declaration(cfg["system"])
    iv = interval(cfg["interval"], "interval") if "interval" in cfg else system.domain
    mode = cfg.get("mode", "simple")
    if mode not in ("simple", "confluent"):
        raise ConfigError(f"mode: expected 'simple' or 'confluent', got {mode!r}")
    samples = integer(cfg.get("samples", 500), "samples", 1)
    workers = integer(cfg.get("workers", 1), "workers", 1)
    sweep = _flag(cfg, "sweep_csv", True)
    res = colloc.certify_t_property(system, iv, mode, samples, seed, workers,
                                    tol["singular_rtol"], keep_records=sweep)
    out = Outcome({"system": system, "interval": iv, "mode": mode, "certification": res},
                  "refuted" if res.refuted else "ok", tol)
    if sweep and res.records:
        n = res.records[0][0].total
        rows = [list(ks.expanded()[0]) + [rep.determinant, rep.sign, rep.smallest_singular_value]
                for ks, rep in res.records]
        out.artifacts["sweep.csv"] = (
            [f"knot_{i}" for i in range(n)] + ["determinant", "sign", "smallest_singular_value"],
            rows)
    return out


def _hermite_rows(value, path):
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{path}: expected a non-empty list of {{knot, values}} objects")
    rows = []
    for i, row in enumerate(value):
        p = f"{path}[{i}]"
        expect_keys(row, p, ("knot", "values"))
        rows.append((number(row["knot"], f"{p}.knot"), number_list(row["values"], f"{p}.values")))
    rows.sort(key=lambda r: r[0])
    return interp.HermiteData.from_rows(rows)


def _span_result(system, u, residual, data_scale, tol):
    rel = residual / max(data_scale, np.finfo(float).tiny)
    return {"system": system, "coefficients": u.coefficients,
            "residual": residual, "relative_residual": rel,
            "within_tolerance": bool(rel <= tol["residual_rtol"])}


def cmd_interpolate(cfg, seed):
    expect_keys(cfg, "", ("system", "data"), _COMMON)
    tol = _tolerances(cfg, {"singular_rtol": SINGULAR_RTOL, "residual_rtol": 1e-9})
    system = system_from_declaration(cfg["system"])
    try:
        data = _hermite_rows(cfg["data"], "data")
    except ValueError as exc:
        raise ConfigError(f"data: {exc}") from exc
    try:
        det = colloc.collocation_determinant(system, data.knots, tol["singular_rtol"])
    except ValueError as exc:
        raise ConfigError(f"data: {exc}") from exc
    try:
        u = interp.hermite_solve(system, data, tol["singular_rtol"])
    except SingularSystemError as exc:
        return Outcome({"system": system, "knots": data.knots, "collocation": det,
                        "rank": interp.dimension_check(system, data.knots, tol["singular_rtol"]),
                        "message": str(exc)}, "singular", tol)
    res = _span_result(system, u, interp.interpolation_residual(u, data),
                       float(np.max(np.abs(data.flat()), initial=0.0)), tol)
    res.update(knots=data.knots, collocation=det)
    return Outcome(res, "ok", tol)


def cmd_dt(cfg, seed):
    expect_keys(cfg, "", ("system", "alpha", "beta", "left", "right"),
                _COMMON + ("boundary_basis",))
    tol = _tolerances(cfg, {"singular_rtol": SINGULAR_RTOL, "residual_rtol": 1e-9})
    system = system_from_declaration(cfg["system"])
    try:
        data = interp.DTData(number(cfg["alpha"], "alpha"), number(cfg["beta"], "beta"),
                             tuple(number_list(cfg["left"], "left")),
                             tuple(number_list(cfg["right"], "right")))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    try:
        u = interp.dt_solve(system, data, tol["singular_rtol"])
        basis = None
        if _flag(cfg, "boundary_basis", False):
            v, w = interp.dt_boundary_basis(system, data.alpha, data.beta, tol["singular_rtol"])
            basis = {"v": [e.coefficients for e in v], "w": [e.coefficients for e in w],
                     "boundary_data_matrix": interp.boundary_data_matrix(v + w, data.alpha, data.beta)}
    except SingularSystemError as exc:
        return Outcome({"system": system, "message": str(exc), "ratio": exc.ratio}, "singular", tol)
    except SmoothnessError as exc:
        raise ConfigError(f"system: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    hd = data.as_hermite()
    res = _span_result(system, u, interp.interpolation_residual(u, hd),
                       float(np.max(np.abs(hd.flat()), initial=0.0)), tol)
    if basis is not None:
        res["boundary_basis"] = basis
    return Outcome(res, "ok", tol)


def cmd_remez(cfg, seed):
    expect_keys(cfg, "", ("system", "target"),
                _COMMON + ("interval", "max_iter", "initial", "candidate", "curve_points"))
    tol = _tolerances(cfg, {"tol": 1e-10, "certificate_atol": approx.CERTIFICATE_ATOL})
    system = system_from_declaration(cfg["system"])
    f = compile_expression(cfg["target"], "target")
    iv = interval(cfg["interval"], "interval") if "interval" in cfg else system.domain
    max_iter = integer(cfg.get("max_iter", 50), "max_iter", 1)
    initial = cfg.get("initial", "chebyshev")
    if initial not in ("chebyshev", "uniform"):
        raise ConfigError(f"initial: expected 'chebyshev' or 'uniform', got {initial!r}")
    points = integer(cfg.get("curve_points", 501), "curve_points", 2)
    if "candidate" in cfg:
        coeffs = number_list(cfg["candidate"], "candidate")
        if len(coeffs) != system.order_count:
            raise ConfigError(f"candidate: expected {system.order_count} coefficients")
        cand = SpanElement(system, np.array(coeffs))
        verdict = approx.verify_alternation(system, f, cand, iv, tol["certificate_atol"])
        refuted = isinstance(verdict, approx.AlternationRefutation)
        out = Outcome({"system": system, "target": cfg["target"], "interval": iv,
                       "candidate": coeffs, "refuted": refuted,
                       "certificate" if not refuted else "refutation": verdict},
                      "refuted" if refuted else "ok", tol)
        u = cand
    else:
        try:
            res = approx.remez(system, f, iv, tol["tol"], max_iter, initial)
        except SingularSystemError as exc:
            return Outcome({"system": system, "message": str(exc), "ratio": exc.ratio},
                           "singular", tol)
        check = approx.verify_alternation(system, f, res.solution, iv, tol["certificate_atol"])
        certified = isinstance(check, approx.AlternationResult)
        out = Outcome({"system": system, "target": cfg["target"], "interval": iv,
                       "alternation": res, "certified": certified,
                       "certificate" if certified else "refutation": check},
                      "ok" if res.converged and certified else "not-converged", tol)
        u = res.solution
    out.artifacts["error_curve.csv"] = (["t", "f_minus_u"], _curve(f, u, iv, points))
    return out


def cmd_moments(cfg, seed):
    expect_keys(cfg, "", ("moments", "interval"), _COMMON + ("n", "system", "measure"))
    tol = _tolerances(cfg, {"residual_rtol": 1e-9})
    c = number_list(cfg["moments"], "moments")
    iv = interval(cfg["interval"], "interval")
    if "measure" in cfg:
        # verification mode: does the given atomic measure have these moments?
        expect_keys(cfg["measure"], "measure", ("nodes", "weights"))
        try:
            mu = moments.AtomicMeasure(number_list(cfg["measure"]["nodes"], "measure.nodes"),
                                       number_list(cfg["measure"]["weights"], "measure.weights"))
        except ValueError as exc:
            raise ConfigError(f"measure: {exc}") from exc
        system = (system_from_declaration(cfg["system"]) if "system" in cfg
                  else FunctionSystem.monomial(len(c), iv.as_list()))
        try:
            data = moments.MomentData(system, c)
            resid = moments.verify_measure(data, mu)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        rel = resid / max(float(np.max(np.abs(c))), np.finfo(float).tiny)
        ok = rel <= tol["residual_rtol"]
        return Outcome({"measure": mu, "residual": resid, "relative_residual": rel,
                        "represents": ok}, "ok" if ok else "refuted", tol)
    if "system" in cfg:
        raise ConfigError("system: only used together with 'measure' (verification mode)")
    n = integer(cfg["n"], "n", 1) if "n" in cfg else None
    try:
        mu = moments.gauss_from_moments(c, iv, n)
    except MomentError as exc:
        return Outcome({"message": str(exc)}, "infeasible", tol)
    used = np.array(c[:2 * mu.nodes.size])
    system = FunctionSystem.monomial(used.size, iv.as_list())
    resid = moments.verify_measure(moments.MomentData(system, used), mu)
    rel = resid / max(float(np.max(np.abs(used))), np.finfo(float).tiny)
    return Outcome({"measure": mu, "n": int(mu.nodes.size), "residual": resid,
                    "relative_residual": rel}, "ok", tol)


def _mode_table(value, order_n, path):
    if not isinstance(value, dict):
        raise ConfigError(f"{path}: expected an object mapping mode m to {order_n} values")
    table = {}
    for key, vals in value.items():
        p = f"{path}.{key}"
        try:
            m = int(key)
        except ValueError:
            raise ConfigError(f"{p}: mode keys must be integers") from None
        if not isinstance(vals, list) or len(vals) != order_n:
            raise ConfigError(f"{p}: expected {order_n} values")
        col = []
        for i, v in enumerate(vals):
            if isinstance(v, list):
                pair = number_list(v, f"{p}[{i}]", 2)
                if len(pair) != 2:
                    raise ConfigError(f"{p}[{i}]: complex values are [re, im]")
                col.append(complex(*pair))
            else:
                col.append(complex(number(v, f"{p}[{i}]")))
        table[m] = col
    return table


def cmd_polyharmonic(cfg, seed):
    expect_keys(cfg, "", ("N", "M", "geometry", "data"), _COMMON + ("field",))
    tol = _tolerances(cfg, {"singular_rtol": SINGULAR_RTOL})
    order_n = integer(cfg["N"], "N", 1)
    big_m = integer(cfg["M"], "M", 0)
    geo = cfg["geometry"]
    if not isinstance(geo, dict) or geo.get("type") not in ("subdisk", "concentric"):
        raise ConfigError("geometry.type: expected 'subdisk' or 'concentric'")
    try:
        table = _mode_table(cfg["data"], order_n, "data")
        data = polyharmonic.FourierBoundaryData.from_modes(order_n, big_m, table)
        if geo["type"] == "subdisk":
            expect_keys(geo, "geometry", ("type",), ("rho",))
            rho = number(geo.get("rho", 1.0), "geometry.rho")
            dcfg = polyharmonic.DiskConfig(order_n, big_m, rho)
            cert = polyharmonic.uniqueness_certificate(order_n, big_m, "subdisk", rho=rho,
                                                       threshold=tol["singular_rtol"])
            radii = None
        else:
            expect_keys(geo, "geometry", ("type", "radii"))
            radii = number_list(geo["radii"], "geometry.radii")
            cert = polyharmonic.uniqueness_certificate(order_n, big_m, "concentric", radii=radii,
                                                       threshold=tol["singular_rtol"])
    except (DomainError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    result = {"N": order_n, "M": big_m, "geometry": geo, "certificate": cert}
    if not cert.unique:
        return Outcome(result, "degenerate", tol)
    if radii is None:
        coeffs = polyharmonic.solve_dirichlet_disk(dcfg, data, tol["singular_rtol"])
        resid = polyharmonic.boundary_residual_subdisk(dcfg, data, coeffs)
    else:
        coeffs = polyharmonic.solve_concentric(order_n, radii, data, big_m, tol["singular_rtol"])
        resid = polyharmonic.boundary_residual_concentric(radii, data, coeffs)
    lap = coeffs
    for _ in range(order_n):
        lap = polyharmonic.apply_laplacian(lap)
    result.update(coefficients=coeffs, boundary_relative_residual=resid,
                  annihilation_max=lap.max_abs())
    out = Outcome(result, "ok", tol)
    if "field" in cfg:
        expect_keys(cfg["field"], "field", (), ("radial_points", "angular_points"))
        nr = integer(cfg["field"].get("radial_points", 21), "field.radial_points", 2)
        nt = integer(cfg["field"].get("angular_points", 64), "field.angular_points", 1)
        rs = np.linspace(0.0, 1.0, nr)
        th = 2 * np.pi * np.arange(nt) / nt
        rr, tt = np.meshgrid(rs, th, indexing="ij")
        vals = polyharmonic.eval_field(coeffs, rr.ravel(), tt.ravel())
        out.artifacts["field.csv"] = (["r", "theta", "value"],
                                      list(zip(rr.ravel(), tt.ravel(), vals)))
    return out


def cmd_nested_build(cfg, seed):
    expect_keys(cfg, "", ("weights", "anchor", "domain"), _COMMON + ("evaluate", "certify"))
    tol = _tolerances(cfg, {"singular_rtol": SINGULAR_RTOL})
    decl = {"family": "nested", "params": {"weights": cfg["weights"], "anchor": cfg["anchor"]},
            "domain": cfg["domain"]}
    system = system_from_declaration(decl, path="")
    result = {"system": system, "order_count": system.order_count,
              "smoothness": system.smoothness}
    status = "ok"
    if "evaluate" in cfg:
        ev = cfg["evaluate"]
        expect_keys(ev, "evaluate", ("points",), ("deriv_orders",))
        ts = np.array(number_list(ev["points"], "evaluate.points"))
        if not system.domain.contains(ts):
            raise ConfigError("evaluate.points: points outside the domain")
        orders = ev.get("deriv_orders", [0])
        if not isinstance(orders, list) or not orders:
            raise ConfigError("evaluate.deriv_orders: expected a list of integers")
        orders = [integer(d, f"evaluate.deriv_orders[{i}]", 0) for i, d in enumerate(orders)]
        try:
            result["values"] = {str(d): system.basis(ts, d) for d in orders}
        except SmoothnessError as exc:
            raise ConfigError(f"evaluate.deriv_orders: {exc}") from exc
        result["points"] = ts
    if "certify" in cfg:
        cc = cfg["certify"]
        expect_keys(cc, "certify", (), ("samples", "mode"))
        mode = cc.get("mode", "confluent")
        if mode not in ("simple", "confluent"):
            raise ConfigError(f"certify.mode: expected 'simple' or 'confluent', got {mode!r}")
        res = colloc.certify_t_property(system, None, mode,
                                        integer(cc.get("samples", 200), "certify.samples", 1),
                                        seed, singular_rtol=tol["singular_rtol"])
        result["certification"] = res
        status = "refuted" if res.refuted else "ok"
    return Outcome(result, status, tol)


HANDLERS = {
    "check": cmd_check, "interpolate": cmd_interpolate, "dt": cmd_dt, "remez": cmd_remez,
    "moments": cmd_moments, "polyharmonic": cmd_polyharmonic, "nested-build": cmd_nested_build,
}


# -- driver -----------------------------------------------------------------

def _setup_logging():
    level = os.environ.get("CHEBSYS_LOG", "info").strip().lower()
    levels = {"quiet": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    if level not in levels:
        print(f"chebsys: CHEBSYS_LOG must be one of quiet, info, debug (got {level!r}); using info",
              file=sys.stderr)
        level = "info"
    root = logging.getLogger("chebsys")
    root.setLevel(levels[level])
    if not root.handlers:
        h = logging.StreamHandler(sys.stderr)
        h.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        root.addHandler(h)


def load_config(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def run(command: str, config: dict, out_dir, seed: int | None = None) -> int:
    """Execute one command; returns the exit code. Writes ``report.json`` on exit 0/2."""
    if command not in HANDLERS:
        raise ConfigError(f"unknown command {command!r}")
    if "command" in config and config["command"] != command:
        raise ConfigError(f"command: config is for {config['command']!r}, not {command!r}")
    if seed is None:
        seed = integer(config.get("seed", 0), "seed", 0)
    elif seed < 0:
        raise ConfigError("seed: must be >= 0")
    outcome = HANDLERS[command](config, seed)
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        for name, (header, rows) in outcome.artifacts.items():
            _write_csv(out / name, header, rows)
        emit_report(outcome.result, out / "report.json", command=command, config=config,
                    status=outcome.status, seed=seed, tolerances=outcome.tolerances)
    except OSError as exc:
        raise ConfigError(f"cannot write output to {out}: {exc.strerror or exc}") from exc
    log.info("%s finished: %s (report in %s)", command, outcome.status, out / "report.json")
    return outcome.exit_code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chebsys", description="Chebyshev-system toolkit")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="JSON config file")
    p.add_argument("--out", default="chebsys-out", help="output directory (default: chebsys-out)")
    p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    return p


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config)
        return run(args.command, cfg, args.out, args.seed)
    except (ConfigError, DomainError, SmoothnessError) as exc:
        print(f"chebsys: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
