"""Moment problems: verifying atomic measures, Gauss rules from monomial moments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import FunctionSystem, Interval
from .errors import DomainError, MomentError

MAX_NODES = 12
PIVOT_FLOOR = 1e-12
NODE_SLACK = 1e-10


@dataclass(frozen=True)
class MomentData:
    system: FunctionSystem
    moments: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.moments, dtype=float)
        if c.shape != (self.system.order_count,):
            raise ValueError(
                f"need {self.system.order_count} moments, got {c.size}")
        object.__setattr__(self, "moments", c)


@dataclass(frozen=True)
class AtomicMeasure:
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.nodes, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if x.shape != w.shape or x.ndim != 1:
            raise ValueError("nodes and weights must be 1-D of equal length")
        if np.any(np.diff(x) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        object.__setattr__(self, "nodes", x)
        object.__setattr__(self, "weights", w)

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


def verify_measure(data: MomentData, mu: AtomicMeasure) -> float:
    """``max_j |sum_i w_i u_j(x_i) - c_j|``."""
    dom = data.system.domain
    if not dom.contains(mu.nodes):
        raise DomainError(f"measure nodes outside [{dom.a}, {dom.b}]")
    got = data.system.basis(mu.nodes) @ mu.weights
    return float(np.max(np.abs(got - data.moments)))


def hankel(moments, n: int) -> np.ndarray:
    c = np.asarray(moments, dtype=float)
    return scipy.linalg.hankel(c[:n], c[n - 1:2 * n - 1])


def _check_positive_definite(c, n):
    h = hankel(c, n)
    # Cholesky with an explicit pivot floor
    floor = PIVOT_FLOOR * abs(c[0])
    l = np.zeros_like(h)
    for j in range(n):
        piv = h[j, j] - l[j, :j] @ l[j, :j]
        if not piv > floor:
            raise MomentError(
                f"Hankel matrix of the moments is not positive definite (pivot {j} = {piv:.3e}); "
                "the moments do not come from a positive measure with at least "
                f"{n} support points")
        l[j, j] = np.sqrt(piv)
        for i in range(j + 1, n):
            l[i, j] = (h[i, j] - l[i, :j] @ l[j, :j]) / l[j, j]


def recurrence_from_moments(moments, n: int):
    """Three-term recurrence ``(alpha_0..alpha_{n-1}, beta_1..beta_{n-1})``.

    Orthonormal polynomials are built in the monomial basis with the moment
    inner product ``<t^j, t^k> = c_{j+k}``; every new polynomial is
    re-orthogonalised against all previous ones before normalising.
    """
    c = np.asarray(moments, dtype=float)

    def inner(p, q):
        # p, q: coefficient vectors (ascending); degree(p) + degree(q) <= 2n - 1
        conv = np.convolve(p, q)
        return float(conv @ c[:conv.size])

    alpha = np.zeros(n)
    beta = np.zeros(max(n - 1, 0))
    polys = [np.array([1.0 / np.sqrt(c[0])])]
    for k in range(n):
        p = polys[k]
        tp = np.concatenate(([0.0], p))
        alpha[k] = inner(tp, p)
        if k == n - 1:
            break
        q = tp.copy()
        for _ in range(2):
            for r in polys:
                q[:r.size] -= inner(q, r) * r
        nrm2 = inner(q, q)
        if not nrm2 > 0:
            raise MomentError(f"moment functional degenerate at degree {k + 1}")
        beta[k] = np.sqrt(nrm2)
        polys.append(q / beta[k])
    return alpha, beta


def gauss_from_moments(moments, interval=None, n: int | None = None) -> AtomicMeasure:
    """The n-node Gauss rule reproducing ``c_0..c_{2n-1}``.

    Nodes are the eigenvalues of the Jacobi matrix built from the recurrence,
    weights ``c_0`` times the squared first eigenvector components.
    """
    c = np.asarray(moments, dtype=float)
    if n is None:
        if c.size % 2:
            raise MomentError("an even number 2n of moments is required")
        n = c.size // 2
    if n < 1 or c.size < 2 * n:
        raise MomentError(f"n={n} needs 2n={2 * n} moments, got {c.size}")
    if n > MAX_NODES:
        raise MomentError(f"n={n} exceeds {MAX_NODES}: Hankel conditioning is too poor in double precision")
    c = c[:2 * n]
    if not np.all(np.isfinite(c)) or c[0] <= 0:
        raise MomentError("c_0 must be positive and all moments finite")
    _check_positive_definite(c, n)
    alpha, beta = recurrence_from_moments(c, n)
    if n == 1:
        nodes, vecs = alpha.copy(), np.ones((1, 1))
    else:
        nodes, vecs = scipy.linalg.eigh_tridiagonal(alpha, beta)
    weights = c[0] * vecs[0, :] ** 2
    if interval is not None:
        iv = Interval.of(interval)
        slack = NODE_SLACK * max(1.0, iv.length)
        if nodes[0] < iv.a - slack or nodes[-1] > iv.b + slack:
            raise MomentError(
                f"recovered nodes [{nodes[0]:.6g}, {nodes[-1]:.6g}] leave [{iv.a}, {iv.b}]: "
                "the moments are not those of a measure on this interval")
        nodes = np.clip(nodes, iv.a, iv.b)
    return AtomicMeasure(nodes, weights)


def monomial_moments(mu: AtomicMeasure, count: int) -> np.ndarray:
    return np.array([np.dot(mu.weights, mu.nodes ** j) for j in range(count)])
