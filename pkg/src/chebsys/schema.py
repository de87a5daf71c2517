"""Declarative (JSON) descriptions of systems, weights and target functions.

A system declaration is ``{"family": str, "params": {...}, "domain": [a, b]}``.
Parsing is strict: unknown keys are rejected and every error message names
the offending field by its dotted path.

Family parameters::

    monomial    {"order": n}
    muntz       {"exponents": [alpha_0, ...]}
    cauchy      {"s": [...]}           (also gauss, green_unit)
    custom      {"polynomials": [[c0, c1, ...], ...]}   ascending coefficients
                {"functions": ["t", "t**2", ...]}        values only, no derivatives
    nested      {"weights": [w_0, ..., w_N], "anchor": a}

Weights are a number (constant), a coefficient list (polynomial) or one of
``{"kind": "const", "value": c}``, ``{"kind": "exp", "rate": r, "scale": s}``,
``{"kind": "affine", "coeffs": [c0, c1]}``, ``{"kind": "poly", "coeffs": [...]}``.
"""

from __future__ import annotations

import ast
import math
import operator
from typing import Any, Callable, Mapping

import numpy as np

from .core import FunctionSystem, Interval
from .errors import ConfigError, DomainError, SmoothnessError


def _fail(path, msg):
    raise ConfigError(f"{path}: {msg}" if path else msg)


def expect_keys(obj, path, required=(), optional=()):
    """Check that ``obj`` is a mapping with exactly the allowed keys."""
    if not isinstance(obj, Mapping):
        _fail(path, f"expected an object, got {type(obj).__name__}")
    for key in required:
        if key not in obj:
            _fail(path, f"missing required field {_join(path, key)!r}")
    allowed = set(required) | set(optional)
    for key in obj:
        if key not in allowed:
            _fail(_join(path, key), "unknown field")


def _join(path, key):
    return f"{path}.{key}" if path else str(key)


def number(value, path) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected a number, got {value!r}")
    out = float(value)
    if not math.isfinite(out):
        _fail(path, "must be finite")
    return out


def integer(value, path, minimum=None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        _fail(path, f"must be >= {minimum}")
    return int(value)


def number_list(value, path, min_len=1) -> list:
    if not isinstance(value, list):
        _fail(path, f"expected a list of numbers, got {type(value).__name__}")
    if len(value) < min_len:
        _fail(path, f"needs at least {min_len} entries")
    return [number(v, f"{path}[{i}]") for i, v in enumerate(value)]


def interval(value, path) -> Interval:
    pair = number_list(value, path, min_len=2)
    if len(pair) != 2:
        _fail(path, "expected [a, b]")
    try:
        return Interval(*pair)
    except (ValueError, DomainError) as exc:
        _fail(path, str(exc))


# -- weights ----------------------------------------------------------------

def weight_from_spec(spec, path="weight"):
    from .construct import Weight

    if isinstance(spec, list):
        return Weight.polynomial(number_list(spec, path))
    if not isinstance(spec, Mapping):
        return Weight.const(number(spec, path))
    kind = spec.get("kind")
    if kind == "const":
        expect_keys(spec, path, ("kind", "value"))
        return Weight.const(number(spec["value"], _join(path, "value")))
    if kind == "exp":
        expect_keys(spec, path, ("kind",), ("rate", "scale"))
        return Weight.exp(number(spec.get("rate", 1.0), _join(path, "rate")),
                          number(spec.get("scale", 1.0), _join(path, "scale")))
    if kind == "affine":
        expect_keys(spec, path, ("kind", "coeffs"))
        c = number_list(spec["coeffs"], _join(path, "coeffs"), min_len=2)
        if len(c) != 2:
            _fail(_join(path, "coeffs"), "affine weights take [c0, c1]")
        return Weight.affine(*c)
    if kind == "poly":
        expect_keys(spec, path, ("kind", "coeffs"))
        return Weight.polynomial(number_list(spec["coeffs"], _join(path, "coeffs")))
    _fail(_join(path, "kind"), f"unknown weight kind {kind!r} (const, exp, affine, poly)")


# -- expressions ------------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_FUNCS = {
    "abs": np.abs, "sqrt": np.sqrt, "exp": np.exp, "log": np.log,
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "arctan": np.arctan, "atan": np.arctan,
    "sinh": np.sinh, "cosh": np.cosh, "tanh": np.tanh, "sign": np.sign,
    "max": np.maximum, "min": np.minimum,
}
_CONSTS = {"pi": math.pi, "e": math.e}


def compile_expression(text: str, path="target") -> Callable[[np.ndarray], np.ndarray]:
    """Vectorised function of ``t`` from an arithmetic expression.

    Only numbers, ``t``, ``pi``, ``e``, ``+ - * / **`` and a fixed set of
    elementary functions are accepted; anything else is a config error.
    """
    if not isinstance(text, str):
        _fail(path, "expected an expression string")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        _fail(path, f"invalid expression: {exc.msg}")

    def check(node):
        if isinstance(node, ast.Expression):
            check(node.body)
        elif isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            check(node.left)
            check(node.right)
        elif isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            check(node.operand)
        elif isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
                _fail(path, f"unsupported constant {node.value!r}")
        elif isinstance(node, ast.Name):
            if node.id != "t" and node.id not in _CONSTS:
                _fail(path, f"unknown name {node.id!r}")
        elif isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS or node.keywords:
                _fail(path, f"unsupported call in {text!r}")
            for arg in node.args:
                check(arg)
        else:
            _fail(path, f"unsupported syntax {type(node).__name__} in {text!r}")

    check(tree)

    def ev(node, t):
        if isinstance(node, ast.BinOp):
            return _BINOPS[type(node.op)](ev(node.left, t), ev(node.right, t))
        if isinstance(node, ast.UnaryOp):
            return _UNARY[type(node.op)](ev(node.operand, t))
        if isinstance(node, ast.Constant):
            return float(node.value)
        if isinstance(node, ast.Name):
            return t if node.id == "t" else _CONSTS[node.id]
        return _FUNCS[node.func.id](*(ev(a, t) for a in node.args))

    def f(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            return np.broadcast_to(np.asarray(ev(tree.body, t), dtype=float), t.shape).copy()

    f.expression = text
    return f


# -- systems ----------------------------------------------------------------

_FAMILY_PARAMS = {
    "monomial": (("order",), ()),
    "muntz": (("exponents",), ()),
    "cauchy": (("s",), ()),
    "gauss": (("s",), ()),
    "green_unit": (("s",), ()),
    "nested": (("weights", "anchor"), ()),
    "custom": ((), ("polynomials", "functions")),
}


def system_from_declaration(decl: Mapping[str, Any], path: str = "system") -> FunctionSystem:
    """Strictly parse a system declaration into a :class:`FunctionSystem`."""
    expect_keys(decl, path, ("family", "params", "domain"))
    family = decl["family"]
    if family not in _FAMILY_PARAMS:
        _fail(_join(path, "family"),
              f"unknown family {family!r} (one of {', '.join(_FAMILY_PARAMS)})")
    dom = interval(decl["domain"], _join(path, "domain"))
    ppath = _join(path, "params")
    params = decl["params"]
    required, optional = _FAMILY_PARAMS[family]
    expect_keys(params, ppath, required, optional)
    try:
        if family == "monomial":
            return FunctionSystem.monomial(integer(params["order"], _join(ppath, "order"), 1), dom)
        if family == "muntz":
            return FunctionSystem.muntz(number_list(params["exponents"], _join(ppath, "exponents")), dom)
        if family in ("cauchy", "gauss", "green_unit"):
            s = number_list(params["s"], _join(ppath, "s"))
            return getattr(FunctionSystem, family)(s, dom)
        if family == "nested":
            from .construct import WeightChain, build_nested

            wl = params["weights"]
            if not isinstance(wl, list) or not wl:
                _fail(_join(ppath, "weights"), "expected a non-empty list of weights")
            weights = [weight_from_spec(w, f"{ppath}.weights[{i}]") for i, w in enumerate(wl)]
            anchor = number(params["anchor"], _join(ppath, "anchor"))
            return build_nested(WeightChain(tuple(weights), anchor, dom))
        # custom
        if ("polynomials" in params) == ("functions" in params):
            _fail(ppath, "custom systems need exactly one of 'polynomials' or 'functions'")
        if "polynomials" in params:
            polys = params["polynomials"]
            if not isinstance(polys, list) or not polys:
                _fail(_join(ppath, "polynomials"), "expected a non-empty list of coefficient lists")
            cl = [number_list(p, f"{ppath}.polynomials[{i}]") for i, p in enumerate(polys)]
            return FunctionSystem.from_polynomials(cl, dom)
        exprs = params["functions"]
        if not isinstance(exprs, list) or not exprs:
            _fail(_join(ppath, "functions"), "expected a non-empty list of expressions")
        fs = [compile_expression(e, f"{ppath}.functions[{i}]") for i, e in enumerate(exprs)]

        def wrap(f):
            return lambda t, k: f(t)

        return FunctionSystem.custom([wrap(f) for f in fs], dom, smoothness=0,
                                     params={"functions": list(exprs)})
    except (DomainError, SmoothnessError) as exc:
        _fail(ppath, str(exc))
