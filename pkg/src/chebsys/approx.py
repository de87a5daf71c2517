"""Best uniform approximation from the span of a T-system.

:func:`remez` runs a single-point exchange: solve for the levelled reference,
locate the global extremum of the error, swap it into the reference keeping
the sign alternation. :func:`verify_alternation` independently checks a
candidate for the equioscillation pattern that characterises the minimax
element (N+2 points with ``f - u = delta * eps * (-1)^j``, j = 1..N+2).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._linalg import SINGULAR_RTOL, relative_smin
from ._search import golden_max
from .core import FunctionSystem, Interval, SpanElement
from .errors import SingularSystemError

log = logging.getLogger(__name__)

SCAN_POINTS = 2001
CERTIFICATE_ATOL = 1e-6


@dataclass
class AlternationResult:
    solution: SpanElement
    delta: float
    points: np.ndarray
    epsilon_sign: int
    iterations: int
    converged: bool
    errors: np.ndarray = field(default=None)
    levels: list = field(default_factory=list)
    degenerate: bool = False

    @property
    def coefficients(self) -> np.ndarray:
        return self.solution.coefficients


@dataclass
class AlternationRefutation:
    """Evidence that a candidate is not the best approximation.

    ``witness`` is where ``|f - u|`` attains ``max_error``, which exceeds the
    best level ``alternation_level`` reachable by N+2 alternating extrema.
    """

    witness: float
    error_at_witness: float
    max_error: float
    alternation_level: float
    alternation_count: int


def _vectorized(f: Callable) -> Callable:
    def g(t):
        t = np.asarray(t, dtype=float)
        try:
            out = np.asarray(f(t), dtype=float)
            if out.shape == t.shape:
                return out
        except (TypeError, ValueError):
            pass
        return np.vectorize(lambda x: float(f(x)), otypes=[float])(t)
    return g


def _error_fn(f, u):
    def e(t):
        vals = f(t) - u(t)
        if not np.all(np.isfinite(vals)):
            raise ValueError("target function returned non-finite values")
        return vals
    return e


def _refine(err, grid, i):
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    t = golden_max(lambda x: abs(float(err(np.array([x]))[0])), lo, hi)
    et = float(err(np.array([t]))[0])
    eg = float(err(grid[i:i + 1])[0])
    return (t, et) if abs(et) > abs(eg) else (float(grid[i]), eg)


def error_extrema(err, interval: Interval, scan_points: int = SCAN_POINTS):
    """Local maxima of ``|err|`` (endpoints included) as sorted ``(t, err(t))``."""
    grid = interval.grid(scan_points)
    v = np.abs(err(grid))
    out = []
    for i in range(grid.size):
        left = v[i - 1] if i > 0 else -np.inf
        right = v[i + 1] if i + 1 < grid.size else -np.inf
        if v[i] >= left and v[i] >= right:
            out.append(_refine(err, grid, i))
    out.sort()
    dedup = []
    for t, e in out:
        if dedup and abs(t - dedup[-1][0]) <= 1e-9:
            if abs(e) > abs(dedup[-1][1]):
                dedup[-1] = (t, e)
            continue
        dedup.append((t, e))
    return dedup


def _global_extremum(err, interval: Interval, scan_points: int = SCAN_POINTS):
    # refine every local maximum: near equioscillation the grid argmax can
    # sit on a different extremum than the true maximum
    extrema = error_extrema(err, interval, scan_points)
    return max(extrema, key=lambda p: (abs(p[1]), -p[0]))


def _alternating(extrema, threshold):
    """Greedy alternating subsequence among extrema with |e| >= threshold."""
    picked = []
    for t, e in extrema:
        if abs(e) < threshold or e == 0.0:
            continue
        if picked and np.sign(picked[-1][1]) == np.sign(e):
            if abs(e) > abs(picked[-1][1]):
                picked[-1] = (t, e)
            continue
        picked.append((t, e))
    return picked


def initial_reference(interval: Interval, count: int, kind="chebyshev") -> np.ndarray:
    if not isinstance(kind, str):
        ref = np.sort(np.asarray(kind, dtype=float))
        if ref.size != count:
            raise ValueError(f"initial reference needs {count} points")
        return ref
    if kind == "chebyshev":
        k = np.arange(count)
        x = -np.cos(np.pi * k / (count - 1))
    elif kind == "uniform":
        x = np.linspace(-1.0, 1.0, count)
    else:
        raise ValueError(f"unknown initial reference {kind!r}")
    ref = interval.a + 0.5 * (x + 1.0) * interval.length
    ref[0], ref[-1] = interval.a, interval.b
    return ref


def _exchange(ref, ref_err, x, ex):
    ref = ref.copy()
    s = np.sign(ex)
    n = ref.size
    if x < ref[0]:
        if np.sign(ref_err[0]) == s:
            ref[0] = x
        else:
            ref = np.concatenate(([x], ref[:-1]))
    elif x > ref[-1]:
        if np.sign(ref_err[-1]) == s:
            ref[-1] = x
        else:
            ref = np.concatenate((ref[1:], [x]))
    else:
        i = min(int(np.searchsorted(ref, x, side="right")) - 1, n - 2)
        if np.sign(ref_err[i]) == s:
            ref[i] = x
        else:
            ref[i + 1] = x
    return ref


def remez(system: FunctionSystem, f: Callable, interval=None, tol: float = 1e-10,
          max_iter: int = 50, initial="chebyshev",
          scan_points: int = SCAN_POINTS) -> AlternationResult:
    """Minimax approximation of ``f`` from the span of ``system`` on ``interval``.

    The system must be a T-system there (caller's responsibility); otherwise
    the exchange may cycle and is stopped at ``max_iter`` with
    ``converged=False``.
    """
    interval = system.domain if interval is None else Interval.of(interval)
    f = _vectorized(f)
    n = system.order_count
    ref = initial_reference(interval, n + 1, initial)
    alt = (-1.0) ** np.arange(n + 1)
    levels = []
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        fx = f(ref)
        if not np.all(np.isfinite(fx)):
            raise ValueError("target function returned non-finite values")
        a = np.column_stack((system.basis(ref).T, alt))
        ratio = relative_smin(a)
        if ratio <= SINGULAR_RTOL:
            raise SingularSystemError(
                f"reference system singular at iteration {it} (smin/smax = {ratio:.2e})", ratio)
        sol = np.linalg.solve(a, fx)
        u = SpanElement(system, sol[:n])
        level = abs(float(sol[n]))
        if levels and level < levels[-1] * (1 - 1e-12):
            log.warning("levelled error decreased: %r -> %r", levels[-1], level)
        levels.append(level)
        err = _error_fn(f, u)
        x, ex = _global_extremum(err, interval, scan_points)
        max_err = abs(ex)
        log.debug("remez it=%d level=%.16g max=%.16g at %.12g", it, level, max_err, x)
        if max_err - level <= tol * (1.0 + max_err):
            converged = True
            break
        new_ref = _exchange(ref, alt * sol[n], x, ex)
        if np.array_equal(new_ref, ref):
            break
        ref = new_ref

    errors = err(ref)
    delta = max(max_err, float(np.max(np.abs(errors))))
    # e(t_1) = -delta * eps with the 1-based index convention
    eps = -int(np.sign(errors[0])) if errors[0] != 0 else 1
    return AlternationResult(u, delta, ref, eps, it, converged, errors, levels,
                             degenerate=delta == 0.0)


def verify_alternation(system: FunctionSystem, f: Callable, candidate: SpanElement,
                       interval=None, atol: float = CERTIFICATE_ATOL,
                       scan_points: int = SCAN_POINTS):
    """Certificate (:class:`AlternationResult`) or :class:`AlternationRefutation`.

    The candidate is certified when N+2 alternating extrema of ``f - u`` lie
    within ``atol * max(1, max|f - u|)`` of the maximum error.
    """
    interval = system.domain if interval is None else Interval.of(interval)
    f = _vectorized(f)
    need = system.order_count + 1
    err = _error_fn(f, candidate)
    extrema = error_extrema(err, interval, scan_points)
    tmax, emax = max(extrema, key=lambda p: (abs(p[1]), -p[0]))
    m = abs(emax)
    if m <= 1e-14:
        pts = initial_reference(interval, need)
        return AlternationResult(candidate, 0.0, pts, 1, 0, True, err(pts), degenerate=True)

    tol = atol * max(1.0, m)
    level = 0.0
    for thr in sorted({abs(e) for _, e in extrema}, reverse=True):
        if len(_alternating(extrema, thr)) >= need:
            level = thr
            break
    if level >= m - tol:
        picked = _alternating(extrema, m - tol)[:need]
        pts = np.array([t for t, _ in picked])
        errs = np.array([e for _, e in picked])
        eps = -int(np.sign(errs[0]))
        return AlternationResult(candidate, m, pts, eps, 0, True, errs)
    return AlternationRefutation(tmax, emax, m, level, len(_alternating(extrema, m - tol)))
