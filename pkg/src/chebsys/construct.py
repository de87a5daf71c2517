"""ET-systems from chains of positive weights.

Given positive weights ``w_0, ..., w_N`` and an anchor ``a``, the functions ::

    u_0(t) = w_0(t)
    u_j(t) = w_0(t) * int_a^t w_1(t1) int_a^t1 w_2(t2) ... int_a^t_{j-1} w_j(t_j) dt_j ... dt1

form an extended Chebyshev system. The nested integrals are not computed by
recursive quadrature; instead all partial nests ::

    Y[i, j](t) = int_a^t w_i(x) Y[i+1, j](x) dx,    Y[j+1, j] = 1

satisfy a triangular linear ODE that is integrated once per evaluation sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.integrate import solve_ivp

from .core import C_INFINITY, FunctionSystem, Interval
from .errors import ChebsysError, DomainError, SmoothnessError

POSITIVITY_GRID = 1024
NESTED_ATOL = 1e-11


@dataclass(frozen=True, eq=False)
class Weight:
    """A weight function with derivatives: ``func(t, k)`` is ``w^{(k)}(t)``."""

    func: Callable[[np.ndarray, int], np.ndarray]
    smoothness: int = C_INFINITY
    label: str = "custom"
    spec: dict | None = None

    def __call__(self, t, k=0):
        if k > self.smoothness:
            raise SmoothnessError(f"weight {self.label} is only C^{self.smoothness}")
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(np.asarray(self.func(t, k), dtype=float), t.shape)

    @classmethod
    def const(cls, value: float = 1.0) -> "Weight":
        value = float(value)
        return cls(lambda t, k: np.full_like(t, value if k == 0 else 0.0),
                   label=f"const({value:g})", spec={"kind": "const", "value": value})

    @classmethod
    def exp(cls, rate: float = 1.0, scale: float = 1.0) -> "Weight":
        rate, scale = float(rate), float(scale)
        return cls(lambda t, k: scale * rate ** k * np.exp(rate * t),
                   label=f"{scale:g}*exp({rate:g}t)",
                   spec={"kind": "exp", "rate": rate, "scale": scale})

    @classmethod
    def polynomial(cls, coeffs: Sequence[float]) -> "Weight":
        c = np.asarray(coeffs, dtype=float)

        def f(t, k):
            return npoly.polyval(t, npoly.polyder(c, k) if k else c)

        return cls(f, label=f"poly{c.tolist()}", spec={"kind": "poly", "coeffs": c.tolist()})

    @classmethod
    def affine(cls, c0: float, c1: float) -> "Weight":
        w = cls.polynomial([c0, c1])
        return cls(w.func, label=f"{c0:g}+{c1:g}t", spec={"kind": "affine", "coeffs": [c0, c1]})


@dataclass(frozen=True, eq=False)
class WeightChain:
    weights: tuple
    anchor: float
    domain: Interval

    def __post_init__(self):
        weights = tuple(self.weights)
        domain = Interval.of(self.domain)
        if not weights:
            raise ValueError("weight chain needs at least w_0")
        anchor = float(self.anchor)
        if not domain.a <= anchor <= domain.b:
            raise DomainError(f"anchor {anchor} outside domain [{domain.a}, {domain.b}]")
        n = len(weights) - 1
        grid = domain.grid(POSITIVITY_GRID)
        for i, w in enumerate(weights):
            if w.smoothness < n - i:
                raise SmoothnessError(f"w_{i} must be C^{n - i}, declared C^{w.smoothness}")
            vals = w(grid)
            if not np.all(np.isfinite(vals)) or np.min(vals) <= 0:
                raise DomainError(f"weight w_{i} ({w.label}) is not positive on the domain")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "anchor", anchor)
        object.__setattr__(self, "domain", domain)

    @property
    def order(self) -> int:
        """The N of the chain (``order_count - 1``)."""
        return len(self.weights) - 1


class _NestedEvaluator:
    """Evaluates ``u_j^{(d)}`` for a weight chain; no state survives a call."""

    def __init__(self, chain: WeightChain):
        self.chain = chain
        n = chain.order
        self.pairs = [(i, j) for j in range(1, n + 1) for i in range(1, j + 1)]
        self.index = {p: q for q, p in enumerate(self.pairs)}

    def _rhs(self, t, y):
        wv = [0.0] + [float(w(t)) for w in self.chain.weights[1:]]
        out = np.empty_like(y)
        for q, (i, j) in enumerate(self.pairs):
            inner = 1.0 if i == j else y[self.index[(i + 1, j)]]
            out[q] = wv[i] * inner
        return out

    def states(self, ts: np.ndarray) -> np.ndarray:
        """Nest values ``Y[q, k]`` for pair q at ``ts[k]``."""
        a = self.chain.anchor
        out = np.zeros((len(self.pairs), ts.size))
        if not self.pairs:
            return out
        for side in (ts > a, ts < a):
            idx = np.flatnonzero(side)
            if idx.size == 0:
                continue
            order = idx[np.argsort(np.abs(ts[idx] - a))]
            t_eval = ts[order]
            sol = solve_ivp(self._rhs, (a, t_eval[-1]), np.zeros(len(self.pairs)),
                            method="DOP853", t_eval=t_eval, rtol=1e-13, atol=NESTED_ATOL * 1e-2)
            if not sol.success:
                raise ChebsysError(f"nested integration failed: {sol.message}")
            out[:, order] = sol.y
        return out

    def columns(self, ts, ds):
        n = self.chain.order
        w = self.chain.weights
        uniq, inv = np.unique(ts, return_inverse=True)
        y = self.states(uniq)
        y = y[:, inv] if y.size else y

        wcache = {}

        def wd(i, k):
            if (i, k) not in wcache:
                wcache[(i, k)] = w[i](ts, k)
            return wcache[(i, k)]

        memo = {}

        def nest(i, j, r):
            # r-th derivative of Y[i, j]
            key = (i, j, r)
            if key in memo:
                return memo[key]
            if i == j + 1:
                val = np.ones_like(ts) if r == 0 else np.zeros_like(ts)
            elif r == 0:
                val = y[self.index[(i, j)]]
            else:
                val = sum(math.comb(r - 1, q) * wd(i, r - 1 - q) * nest(i + 1, j, q)
                          for q in range(r))
            memo[key] = val
            return val

        out = np.empty((n + 1, ts.size))
        for d in np.unique(ds):
            d = int(d)
            mask = ds == d
            for j in range(n + 1):
                val = sum(math.comb(d, r) * wd(0, d - r) * nest(1, j, r) for r in range(d + 1))
                out[j, mask] = val[mask]
        return out


def build_nested(chain: WeightChain) -> FunctionSystem:
    """Return the ET-system generated by ``chain`` (order_count = N + 1)."""
    ev = _NestedEvaluator(chain)
    smooth = min(w.smoothness + i for i, w in enumerate(chain.weights))
    smooth = min(smooth, C_INFINITY)
    return FunctionSystem(
        "nested", chain.order + 1, chain.domain, smooth,
        columns=ev.columns,
        params={"weights": [w.spec or {"kind": w.label} for w in chain.weights],
                "anchor": chain.anchor},
    )


def nested_derivative(system: FunctionSystem, j: int, t: float, deriv_order: int) -> float:
    """``u_j^{(deriv_order)}(t)`` of a system built by :func:`build_nested`."""
    if system.family != "nested":
        raise ValueError("nested_derivative expects a system from build_nested")
    return system.eval(j, t, deriv_order)
