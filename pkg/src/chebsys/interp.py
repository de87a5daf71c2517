"""Lagrange/Hermite interpolation and the two-point Dirichlet-type problem."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._linalg import SINGULAR_RTOL, numerical_rank, pivoted_qr_solve
from .colloc import KnotSpec, collocation_matrix
from .core import FunctionSystem, SpanElement
from .errors import SmoothnessError


@dataclass(frozen=True)
class HermiteData:
    """Knots plus values ``values[j][k] = u^{(k)}(t_j)`` for ``k < m_j``."""

    knots: KnotSpec
    values: tuple

    def __post_init__(self):
        vals = tuple(tuple(float(v) for v in row) for row in self.values)
        if len(vals) != len(self.knots.knots):
            raise ValueError("one value list per knot is required")
        for (t, m), row in zip(self.knots.knots, vals):
            if len(row) != m:
                raise ValueError(f"knot {t} has multiplicity {m} but {len(row)} values")
        object.__setattr__(self, "values", vals)

    @classmethod
    def lagrange(cls, ts: Sequence[float], cs: Sequence[float]) -> "HermiteData":
        return cls(KnotSpec.simple(ts), tuple((c,) for c in cs))

    @classmethod
    def from_rows(cls, rows: Sequence[tuple]) -> "HermiteData":
        """From ``[(t, [c0, c1, ...]), ...]``; multiplicity = len of the value list."""
        knots = KnotSpec(tuple((t, len(vals)) for t, vals in rows))
        return cls(knots, tuple(tuple(vals) for _, vals in rows))

    def flat(self) -> np.ndarray:
        return np.array([v for row in self.values for v in row])


@dataclass(frozen=True)
class DTData:
    """``u^{(k)}(alpha) = left[k]``, ``u^{(k)}(beta) = right[k]`` for ``k < N``."""

    alpha: float
    beta: float
    left_values: tuple
    right_values: tuple

    def __post_init__(self):
        if not self.alpha < self.beta:
            raise ValueError("DTData needs alpha < beta")
        if len(self.left_values) != len(self.right_values) or not self.left_values:
            raise ValueError("need the same number N >= 1 of conditions at each endpoint")

    @property
    def n(self) -> int:
        return len(self.left_values)

    def as_hermite(self) -> HermiteData:
        return HermiteData(KnotSpec(((self.alpha, self.n), (self.beta, self.n))),
                           (tuple(self.left_values), tuple(self.right_values)))


def hermite_solve(system: FunctionSystem, data: HermiteData,
                  singular_rtol: float = SINGULAR_RTOL) -> SpanElement:
    """Unique element of the span matching all Hermite conditions.

    Raises :class:`~chebsys.errors.SingularSystemError` when the confluent
    collocation matrix is numerically singular, i.e. the system is not
    unisolvent at these knots.
    """
    matrix = collocation_matrix(system, data.knots)
    coeffs = pivoted_qr_solve(matrix.T, data.flat(), singular_rtol,
                              what=f"Hermite problem for the {system.family} system")
    return SpanElement(system, coeffs)


def interpolation_residual(u: SpanElement, data: HermiteData) -> float:
    """``max |u^{(k)}(t_j) - c_{j,k}|`` over all conditions."""
    taus, ds = data.knots.expanded()
    vals = u.coefficients @ u.system.basis(taus, ds)
    return float(np.max(np.abs(vals - data.flat())))


def dt_solve(system: FunctionSystem, data: DTData,
             singular_rtol: float = SINGULAR_RTOL) -> SpanElement:
    """Two-point problem with N derivative conditions at each endpoint."""
    if system.order_count != 2 * data.n:
        raise ValueError(
            f"DT problem with N={data.n} needs a 2N={2 * data.n} function system, "
            f"got {system.order_count}")
    if system.smoothness < data.n - 1:
        raise SmoothnessError(f"DT problem needs C^{data.n - 1}")
    return hermite_solve(system, data.as_hermite(), singular_rtol)


def dt_boundary_basis(system: FunctionSystem, alpha: float, beta: float,
                      singular_rtol: float = SINGULAR_RTOL):
    """Cardinal basis for the two-point problem.

    Returns ``(v, w)`` with ``v[j]^{(k)}(alpha) = delta_jk``, ``v[j]^{(k)}(beta) = 0``
    and the mirror conditions for ``w[j]``.
    """
    if system.order_count % 2:
        raise ValueError("the two-point problem needs an even number of functions")
    n = system.order_count // 2
    knots = KnotSpec(((alpha, n), (beta, n)))
    matrix = collocation_matrix(system, knots)
    # one factorisation, 2N right-hand sides: column c of the identity
    coeffs = pivoted_qr_solve(matrix.T, np.eye(2 * n), singular_rtol,
                              what="two-point boundary basis")
    v = [SpanElement(system, coeffs[:, j]) for j in range(n)]
    w = [SpanElement(system, coeffs[:, n + j]) for j in range(n)]
    return v, w


def boundary_data_matrix(elements: Sequence[SpanElement], alpha: float, beta: float) -> np.ndarray:
    """Row per element: ``(u(a), u'(a), ..., u(b), u'(b), ...)``."""
    system = elements[0].system
    n = system.order_count // 2
    taus, ds = KnotSpec(((alpha, n), (beta, n))).expanded()
    basis = system.basis(taus, ds)
    return np.array([u.coefficients @ basis for u in elements])


def dimension_check(system: FunctionSystem, knots: KnotSpec,
                    rtol: float = SINGULAR_RTOL) -> int:
    """Numerical rank of the collocation matrix (``order_count`` iff unisolvent)."""
    return numerical_rank(collocation_matrix(system, knots), rtol)
