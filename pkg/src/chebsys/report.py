"""JSON reports: conversion of results, writing, and schema-checked reading.

Floats are written with Python's shortest round-trip repr, so a report read
back gives bit-identical numbers. Non-finite values are written as the
strings ``"inf"``, ``"-inf"`` and ``"nan"`` to keep the output strict JSON.
"""

from __future__ import annotations

import dataclasses
import datetime as _dt
import json
import math
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from . import __version__
from .approx import AlternationRefutation, AlternationResult
from .colloc import CertificationResult, CollocationReport, KnotSpec, ZeroReport
from .core import FunctionSystem, Interval, SpanElement
from .moments import AtomicMeasure
from .polyharmonic import AlmansiCoefficients, UniquenessCertificate

SCHEMA_VERSION = "1.0"

REPORT_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "command", "status", "config", "result",
                 "provenance", "generated_at"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "command": {"type": "string"},
        "status": {"enum": ["ok", "refuted", "singular", "degenerate", "not-converged",
                            "infeasible"]},
        "config": {"type": "object"},
        "result": {"type": "object"},
        "provenance": {
            "type": "object",
            "required": ["seed", "tolerances", "backend", "version"],
            "additionalProperties": False,
            "properties": {
                "seed": {"type": ["integer", "null"]},
                "tolerances": {"type": "object"},
                "backend": {"enum": ["numba", "numpy"]},
                "version": {"type": "string"},
            },
        },
        "generated_at": {"type": "string"},
    },
}


def _float(x: float):
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def to_jsonable(obj: Any):
    """Plain JSON structure for package results, numpy values and containers."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_float(obj.real), _float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, Interval):
        return obj.as_list()
    if isinstance(obj, KnotSpec):
        return obj.to_list()
    if isinstance(obj, FunctionSystem):
        return to_jsonable(obj.declaration())
    if isinstance(obj, SpanElement):
        return {"system": to_jsonable(obj.system), "coefficients": to_jsonable(obj.coefficients)}
    if isinstance(obj, CollocationReport):
        return {"determinant": _float(obj.determinant), "sign": obj.sign,
                "smallest_singular_value": _float(obj.smallest_singular_value),
                "largest_singular_value": _float(obj.scale)}
    if isinstance(obj, CertificationResult):
        return {"verdict": obj.verdict, "samples_run": obj.samples_run,
                "min_abs_det": _float(obj.min_abs_det), "common_sign": obj.common_sign,
                "witness": to_jsonable(obj.witness),
                "witness_report": to_jsonable(obj.witness_report)}
    if isinstance(obj, AlternationResult):
        return {"delta": _float(obj.delta), "points": to_jsonable(obj.points),
                "epsilon_sign": obj.epsilon_sign, "iterations": obj.iterations,
                "converged": obj.converged, "degenerate": obj.degenerate,
                "coefficients": to_jsonable(obj.coefficients),
                "errors_at_points": to_jsonable(obj.errors),
                "levels": to_jsonable(obj.levels)}
    if isinstance(obj, AlternationRefutation):
        return {"witness": _float(obj.witness), "error_at_witness": _float(obj.error_at_witness),
                "max_error": _float(obj.max_error),
                "alternation_level": _float(obj.alternation_level),
                "alternation_count": obj.alternation_count}
    if isinstance(obj, AtomicMeasure):
        return {"nodes": to_jsonable(obj.nodes), "weights": to_jsonable(obj.weights)}
    if isinstance(obj, UniquenessCertificate):
        return {"geometry": obj.geometry, "order_N": obj.order_N,
                "per_mode": to_jsonable(obj.per_mode), "global_min": _float(obj.global_min),
                "verdict": obj.verdict}
    if isinstance(obj, AlmansiCoefficients):
        return {"cutoff": obj.cutoff, "layers": obj.layers,
                "real": to_jsonable(obj.coeffs.real), "imag": to_jsonable(obj.coeffs.imag)}
    if isinstance(obj, ZeroReport):
        return {"count": obj.count, "roots": to_jsonable(obj.roots),
                "identically_zero": obj.identically_zero}
    if dataclasses.is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def build_report(result, *, command: str, config: dict | None = None, status: str = "ok",
                 seed: int | None = None, tolerances: dict | None = None,
                 backend: str | None = None, generated_at: str | None = None) -> dict:
    from ._jit import BACKEND

    body = to_jsonable(result)
    if not isinstance(body, dict):
        body = {"value": body}
    if generated_at is None:
        generated_at = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "status": status,
        "config": to_jsonable(config or {}),
        "result": body,
        "provenance": {"seed": seed, "tolerances": to_jsonable(tolerances or {}),
                       "backend": backend or BACKEND, "version": __version__},
        "generated_at": generated_at,
    }
    jsonschema.validate(doc, REPORT_SCHEMA)
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def emit_report(result, path, **kwargs) -> Path:
    """Write ``result`` (any package result or plain structure) as a report.

    Keyword arguments are those of :func:`build_report` (``command`` is
    required).
    """
    path = Path(path)
    doc = build_report(result, **kwargs)
    path.write_text(dumps(doc), encoding="utf-8")
    return path


def load_report(path) -> dict:
    """Read a report and validate it against the report schema."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    jsonschema.validate(doc, REPORT_SCHEMA)
    return doc
