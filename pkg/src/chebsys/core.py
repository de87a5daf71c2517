"""Function systems, their spans, and the evaluation contract.

A :class:`FunctionSystem` is an ordered family ``u_0, ..., u_{n-1}`` on a closed
interval that can evaluate any function (and derivatives) at many points at
once. Built-in families::

    monomial    u_j(t) = t^j
    muntz       u_j(t) = t^{alpha_j},          alpha strictly increasing, t > 0
    cauchy      u_j(t) = 1 / (s_j + t),        0 < s_0 < ... , s_0 + a > 0
    gauss       u_j(t) = exp(-(s_j - t)^2),    s strictly increasing
    green_unit  u_j(t) = min(s_j,t)(1 - max(s_j,t)) on [0, 1]

``custom`` wraps user callables and ``nested`` is produced by
:func:`chebsys.construct.build_nested`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import _jit
from .errors import DomainError, SmoothnessError

#: smoothness value used for analytic families (treated as C-infinity)
C_INFINITY = 1 << 30

FAMILIES = ("monomial", "muntz", "cauchy", "gauss", "green_unit", "nested", "custom")


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise DomainError(f"interval endpoints must be finite, got [{a}, {b}]")
        if not a < b:
            raise DomainError(f"interval requires a < b, got [{a}, {b}]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def of(cls, value) -> "Interval":
        if isinstance(value, Interval):
            return value
        a, b = value
        return cls(a, b)

    @property
    def length(self) -> float:
        return self.b - self.a

    def contains(self, t) -> bool:
        t = np.asarray(t, dtype=float)
        return bool(np.all((t >= self.a) & (t <= self.b)))

    def grid(self, n: int) -> np.ndarray:
        return np.linspace(self.a, self.b, n)

    def as_list(self) -> list:
        return [self.a, self.b]


def _strictly_increasing(x) -> bool:
    x = np.asarray(x, dtype=float)
    return bool(np.all(np.diff(x) > 0))


@dataclass(frozen=True, eq=False)
class FunctionSystem:
    """An ordered family of functions with derivative evaluation.

    ``smoothness`` is the global continuity class C^k the family is guaranteed
    to have on its domain; confluent (derivative) collocation relies on it.
    ``max_deriv`` is the highest derivative order :meth:`basis` will evaluate;
    it exceeds ``smoothness`` only for piecewise-smooth families (``kinks``
    non-empty), where derivatives at a kink are one-sided from the right.
    """

    family: str
    order_count: int
    domain: Interval
    smoothness: int
    columns: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(repr=False)
    params: Mapping[str, Any] = field(default_factory=dict)
    max_deriv: int | None = None
    kinks: tuple = ()
    divided_differences: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.order_count < 1:
            raise ValueError("order_count must be >= 1")
        if self.max_deriv is None:
            object.__setattr__(self, "max_deriv", self.smoothness)

    # -- constructors -----------------------------------------------------

    @classmethod
    def monomial(cls, order_count: int, domain=(-1.0, 1.0)) -> "FunctionSystem":
        n = int(order_count)
        params = np.zeros(n)
        return cls(
            "monomial", n, Interval.of(domain), C_INFINITY,
            columns=_bind("monomial", params),
            params={"order": n},
            divided_differences=lambda taus: _jit.kernel("opitz_monomial")(taus, n),
        )

    @classmethod
    def muntz(cls, exponents: Sequence[float], domain=(0.5, 1.0)) -> "FunctionSystem":
        alpha = np.asarray(exponents, dtype=float)
        domain = Interval.of(domain)
        if alpha.ndim != 1 or alpha.size == 0 or not _strictly_increasing(alpha):
            raise DomainError("muntz exponents must be strictly increasing")
        if domain.a <= 0:
            raise DomainError("muntz systems live on closed subintervals of (0, inf)")
        return cls(
            "muntz", alpha.size, domain, C_INFINITY,
            columns=_bind("muntz", alpha), params={"exponents": alpha.tolist()},
        )

    @classmethod
    def cauchy(cls, s: Sequence[float], domain=(0.0, 1.0)) -> "FunctionSystem":
        s = np.asarray(s, dtype=float)
        domain = Interval.of(domain)
        if s.ndim != 1 or s.size == 0 or not _strictly_increasing(s) or s[0] <= 0:
            raise DomainError("cauchy requires 0 < s_0 < s_1 < ...")
        if s[0] + domain.a <= 0:
            raise DomainError("cauchy domain must satisfy s_0 + a > 0 (poles outside the interval)")
        return cls(
            "cauchy", s.size, domain, C_INFINITY,
            columns=_bind("cauchy", s), params={"s": s.tolist()},
            divided_differences=lambda taus: _jit.kernel("opitz_cauchy")(taus, s),
        )

    @classmethod
    def gauss(cls, s: Sequence[float], domain=(-1.0, 1.0)) -> "FunctionSystem":
        s = np.asarray(s, dtype=float)
        if s.ndim != 1 or s.size == 0 or not _strictly_increasing(s):
            raise DomainError("gauss requires strictly increasing centres s_j")
        return cls(
            "gauss", s.size, Interval.of(domain), C_INFINITY,
            columns=_bind("gauss", s), params={"s": s.tolist()},
        )

    @classmethod
    def green_unit(cls, s: Sequence[float], domain=(0.0, 1.0)) -> "FunctionSystem":
        s = np.asarray(s, dtype=float)
        domain = Interval.of(domain)
        if s.ndim != 1 or s.size == 0 or not _strictly_increasing(s) or s[0] <= 0 or s[-1] >= 1:
            raise DomainError("green_unit requires 0 < s_0 < ... < s_N < 1")
        if domain.a < 0 or domain.b > 1:
            raise DomainError("green_unit lives on closed subintervals of [0, 1]")
        return cls(
            "green_unit", s.size, domain, 0,
            columns=_bind("green_unit", s), params={"s": s.tolist()},
            max_deriv=2, kinks=tuple(s.tolist()),
        )

    @classmethod
    def custom(cls, funcs: Sequence[Callable], domain, smoothness: int = 0,
               params: Mapping[str, Any] | None = None) -> "FunctionSystem":
        """Wrap callables ``f(t, k)`` returning the k-th derivative at array ``t``."""
        funcs = tuple(funcs)
        if not funcs:
            raise ValueError("custom system needs at least one function")

        def columns(ts, ds):
            out = np.empty((len(funcs), ts.shape[0]))
            for d in np.unique(ds):
                mask = ds == d
                for j, f in enumerate(funcs):
                    out[j, mask] = np.broadcast_to(
                        np.asarray(f(ts[mask], int(d)), dtype=float), (int(mask.sum()),))
            return out

        return cls("custom", len(funcs), Interval.of(domain), int(smoothness),
                   columns=columns, params=dict(params or {}))

    @classmethod
    def from_polynomials(cls, coefficient_lists: Sequence[Sequence[float]], domain) -> "FunctionSystem":
        """Custom system whose functions are polynomials (ascending coefficients)."""
        polys = [np.asarray(c, dtype=float) for c in coefficient_lists]

        def make(c):
            def f(t, k):
                return npoly.polyval(t, npoly.polyder(c, k) if k else c)
            return f

        return cls.custom([make(c) for c in polys], domain, smoothness=C_INFINITY,
                          params={"polynomials": [c.tolist() for c in polys]})

    @classmethod
    def from_declaration(cls, decl: Mapping[str, Any]) -> "FunctionSystem":
        """Build a system from ``{"family": ..., "params": {...}, "domain": [a, b]}``."""
        from .schema import system_from_declaration
        return system_from_declaration(decl)

    # -- evaluation -------------------------------------------------------

    def check_deriv(self, deriv_order: int) -> None:
        if deriv_order < 0:
            raise SmoothnessError("derivative order must be >= 0")
        if deriv_order > self.max_deriv:
            raise SmoothnessError(
                f"{self.family} system evaluates derivatives up to order {self.max_deriv}, "
                f"got {deriv_order}")

    def basis(self, t, deriv_order=0) -> np.ndarray:
        """Matrix ``B[j, i] = u_j^{(d_i)}(t_i)``, shape ``(order_count, len(t))``."""
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        ds = np.broadcast_to(np.asarray(deriv_order, dtype=np.int64), ts.shape).copy()
        if ts.ndim != 1:
            raise ValueError("t must be scalar or 1-D")
        if ts.size and not self.domain.contains(ts):
            bad = ts[(ts < self.domain.a) | (ts > self.domain.b)][0]
            raise DomainError(f"t={bad!r} outside domain [{self.domain.a}, {self.domain.b}]")
        if ds.size:
            self.check_deriv(int(ds.max()))
            if ds.min() < 0:
                raise SmoothnessError("derivative order must be >= 0")
        return self.columns(ts, ds)

    def eval(self, j: int, t: float, deriv_order: int = 0) -> float:
        """Return ``u_j^{(deriv_order)}(t)``."""
        if not 0 <= j < self.order_count:
            raise IndexError(f"function index {j} out of range 0..{self.order_count - 1}")
        return float(self.basis([t], deriv_order)[j, 0])

    def declaration(self) -> dict:
        return {"family": self.family, "params": dict(self.params), "domain": self.domain.as_list()}


def _bind(name, params):
    params = np.ascontiguousarray(params, dtype=float)

    def columns(ts, ds):
        return _jit.kernel(name)(np.ascontiguousarray(ts), np.ascontiguousarray(ds), params)

    return columns


@dataclass(frozen=True, eq=False)
class SpanElement:
    """``u = sum_j coefficients[j] * u_j`` over a :class:`FunctionSystem`."""

    system: FunctionSystem
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=float)
        if c.shape != (self.system.order_count,):
            raise ValueError(
                f"expected {self.system.order_count} coefficients, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    def __call__(self, t, deriv_order=0):
        scalar = np.ndim(t) == 0
        values = self.coefficients @ self.system.basis(t, deriv_order)
        return float(values[0]) if scalar else values

    def is_zero(self) -> bool:
        return not np.any(self.coefficients)


def eval_span(u: SpanElement, t, deriv_order: int = 0):
    """Evaluate ``sum_j c_j u_j^{(deriv_order)}(t)``."""
    return u(t, deriv_order)
