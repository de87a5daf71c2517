"""Polyharmonic functions on the unit disk in Almansi/Fourier form.

Every smooth-at-origin solution of ``Delta^N u = 0`` on the disk expands as ::

    u(r, theta) = sum_m sum_{k<N} a[m, k] r^{|m| + 2k} e^{i m theta}

so boundary problems on circles decouple into one N x N system per Fourier
mode m. Two problems are supported:

* subdisk Dirichlet: ``d^j u / dr^j = c_j`` on ``r = rho`` for ``j < N``;
* concentric interpolation: ``u = f_j`` on circles ``r = R_j``, j = 1..N.

Per-mode systems are solved in scaled form: with ``x = r / r_ref`` the mode-m
unknowns become ``a[m, k] r_ref^{|m|+2k}`` and derivative rows are scaled by
``r_ref^j``. The scaled matrices are what the uniqueness certificate reports
on; the raw matrices are available from :func:`dirichlet_matrix` and
:func:`concentric_matrix`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import _jit
from ._linalg import SINGULAR_RTOL, exact_matvec, pivoted_qr_solve, relative_smin
from .errors import DomainError

MAX_ORDER = 6
MAX_MODES = 256


def _falling(p, j):
    out = np.ones_like(np.asarray(p, dtype=float))
    for q in range(j):
        out = out * (p - q)
    return out


def _check_order(order_n):
    if not 1 <= order_n <= MAX_ORDER:
        raise DomainError(f"order N must be in 1..{MAX_ORDER}, got {order_n}")


@dataclass(frozen=True)
class DiskConfig:
    order_N: int
    mode_cutoff_M: int
    radius_rho: float = 1.0

    def __post_init__(self):
        _check_order(self.order_N)
        if not 0 <= self.mode_cutoff_M <= MAX_MODES:
            raise DomainError(f"mode cutoff M must be in 0..{MAX_MODES}")
        if not 0 < self.radius_rho <= 1:
            raise DomainError("radius rho must lie in (0, 1]")


def _modes(cutoff):
    return np.arange(-cutoff, cutoff + 1)


@dataclass(frozen=True, eq=False)
class FourierBoundaryData:
    """Complex coefficients ``c[j, m + M]`` for rows j and modes m = -M..M.

    Rows are derivative orders (subdisk problems) or circles (concentric).
    """

    values: np.ndarray

    def __post_init__(self):
        c = np.array(self.values, dtype=complex)
        if c.ndim != 2 or c.shape[1] % 2 != 1:
            raise ValueError("boundary data must have shape (rows, 2M+1)")
        c.setflags(write=False)
        object.__setattr__(self, "values", c)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cutoff(self) -> int:
        return (self.values.shape[1] - 1) // 2

    @property
    def modes(self) -> np.ndarray:
        return _modes(self.cutoff)

    def mode(self, m: int) -> np.ndarray:
        return self.values[:, m + self.cutoff]

    def is_real(self, atol: float = 0.0) -> bool:
        return bool(np.allclose(self.values, np.conj(self.values[:, ::-1]), rtol=0, atol=atol))

    @classmethod
    def zeros(cls, rows: int, cutoff: int) -> "FourierBoundaryData":
        return cls(np.zeros((rows, 2 * cutoff + 1), dtype=complex))

    @classmethod
    def from_modes(cls, rows: int, cutoff: int,
                   table: Mapping[int, Sequence[complex]]) -> "FourierBoundaryData":
        """From ``{m: [c_0, ..., c_{rows-1}]}``; absent modes are zero."""
        c = np.zeros((rows, 2 * cutoff + 1), dtype=complex)
        for m, col in table.items():
            if abs(m) > cutoff:
                raise DomainError(f"mode {m} exceeds the cutoff M={cutoff}")
            col = np.asarray(col, dtype=complex)
            if col.shape != (rows,):
                raise ValueError(f"mode {m}: expected {rows} values")
            c[:, m + cutoff] = col
        return cls(c)

    @classmethod
    def from_real(cls, cos_coeffs, sin_coeffs) -> "FourierBoundaryData":
        """Real data ``A_0 + sum_m A_m cos(m t) + B_m sin(m t)`` per row.

        ``cos_coeffs[j]`` is ``(A_0, ..., A_M)``, ``sin_coeffs[j]`` is
        ``(B_0, ..., B_M)`` (``B_0`` ignored).
        """
        a = np.atleast_2d(np.asarray(cos_coeffs, dtype=float))
        b = np.atleast_2d(np.asarray(sin_coeffs, dtype=float))
        if a.shape != b.shape:
            raise ValueError("cos and sin tables must have the same shape")
        cutoff = a.shape[1] - 1
        c = np.zeros((a.shape[0], 2 * cutoff + 1), dtype=complex)
        c[:, cutoff] = a[:, 0]
        for m in range(1, cutoff + 1):
            c[:, cutoff + m] = 0.5 * (a[:, m] - 1j * b[:, m])
            c[:, cutoff - m] = 0.5 * (a[:, m] + 1j * b[:, m])
        return cls(c)


@dataclass(frozen=True, eq=False)
class AlmansiCoefficients:
    """``coeffs[m + M, k]`` multiplies ``r^{|m|+2k} e^{i m theta}``."""

    coeffs: np.ndarray

    def __post_init__(self):
        a = np.array(self.coeffs, dtype=complex)
        if a.ndim != 2 or a.shape[0] % 2 != 1 or a.shape[1] < 1:
            raise ValueError("Almansi coefficients must have shape (2M+1, N)")
        if not np.all(np.isfinite(a)):
            raise ValueError("Almansi coefficients must be finite")
        a.setflags(write=False)
        object.__setattr__(self, "coeffs", a)

    @property
    def layers(self) -> int:
        return self.coeffs.shape[1]

    @property
    def cutoff(self) -> int:
        return (self.coeffs.shape[0] - 1) // 2

    @property
    def modes(self) -> np.ndarray:
        return _modes(self.cutoff)

    def mode(self, m: int) -> np.ndarray:
        return self.coeffs[m + self.cutoff]

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0


@dataclass
class UniquenessCertificate:
    geometry: str
    order_N: int
    per_mode: np.ndarray  # smallest relative singular value for |m| = 0..M
    global_min: float
    verdict: str  # "unique" or "degenerate(m)"

    @property
    def unique(self) -> bool:
        return self.verdict == "unique"


# -- matrices ---------------------------------------------------------------

def _powers(m, order_n):
    return abs(int(m)) + 2 * np.arange(order_n)


def dirichlet_matrix(m: int, rho: float, order_n: int) -> np.ndarray:
    """``A[j, k] = d^j/dr^j r^{|m|+2k}`` at ``r = rho``."""
    p = _powers(m, order_n).astype(float)
    out = np.empty((order_n, order_n))
    for jj in range(order_n):
        f = _falling(p, jj)
        out[jj] = np.where(f != 0.0, f * rho ** np.maximum(p - jj, 0), 0.0)
    return out


def _dirichlet_scaled(m, rho, order_n):
    # rows scaled by rho^j, columns by rho^{-p_k}: entries become falling(p_k, j)
    return dirichlet_matrix(m, 1.0, order_n)


def concentric_matrix(m: int, radii: Sequence[float], order_n: int | None = None) -> np.ndarray:
    """``A[j, k] = R_j^{|m|+2k}`` (the transpose of a Muntz collocation matrix)."""
    radii = np.asarray(radii, dtype=float)
    order_n = radii.size if order_n is None else order_n
    p = _powers(m, order_n)
    return radii[:, None] ** p[None, :]


def _check_radii(radii, order_n):
    radii = np.asarray(radii, dtype=float)
    if radii.shape != (order_n,):
        raise DomainError(f"need exactly N={order_n} radii")
    if radii[0] <= 0:
        raise DomainError("radii must be positive")
    if np.any(np.diff(radii) <= 0):
        raise DomainError("radii must be strictly increasing (coincident circles)")
    if radii[-1] > 1:
        raise DomainError("radii must not exceed 1")
    return radii


def _concentric_scaled(m, radii):
    # rows divided by (R_j/R_N)^{|m|}, columns by R_N^{p_k}: a Vandermonde in (R_j/R_N)^2
    x = radii / radii[-1]
    return (x[:, None] ** 2) ** np.arange(radii.size)[None, :]


# -- solvers ----------------------------------------------------------------

def solve_dirichlet_disk(cfg: DiskConfig, data: FourierBoundaryData,
                         singular_rtol: float = SINGULAR_RTOL) -> AlmansiCoefficients:
    """Polyharmonic u with ``d^j u/dr^j = c_j`` on ``r = rho``, j < N, exactly per mode."""
    n, big_m, rho = cfg.order_N, cfg.mode_cutoff_M, cfg.radius_rho
    if data.rows != n:
        raise ValueError(f"need {n} derivative rows, got {data.rows}")
    if data.cutoff > big_m:
        raise DomainError(f"data carries modes up to {data.cutoff} > cutoff M={big_m}")
    out = np.zeros((2 * big_m + 1, n), dtype=complex)
    row_scale = rho ** np.arange(n)
    for m in range(-data.cutoff, data.cutoff + 1):
        rhs = data.mode(m)
        if not np.any(rhs):
            continue
        y = pivoted_qr_solve(_dirichlet_scaled(m, rho, n), row_scale * rhs, singular_rtol,
                             what=f"mode {m} Dirichlet system", refine=2)
        out[m + big_m] = y / rho ** _powers(m, n)
    return AlmansiCoefficients(out)


def solve_concentric(order_n: int, radii: Sequence[float], data: FourierBoundaryData,
                     mode_cutoff: int | None = None,
                     singular_rtol: float = SINGULAR_RTOL) -> AlmansiCoefficients:
    """Polyharmonic u with ``u = f_j`` on the circles ``r = R_j`` exactly per mode."""
    _check_order(order_n)
    radii = _check_radii(radii, order_n)
    big_m = data.cutoff if mode_cutoff is None else int(mode_cutoff)
    if data.rows != order_n:
        raise ValueError(f"need one data row per circle ({order_n}), got {data.rows}")
    if data.cutoff > big_m:
        raise DomainError(f"data carries modes up to {data.cutoff} > cutoff M={big_m}")
    x = radii / radii[-1]
    out = np.zeros((2 * big_m + 1, order_n), dtype=complex)
    for m in range(-data.cutoff, data.cutoff + 1):
        rhs = data.mode(m)
        if not np.any(rhs):
            continue
        y = pivoted_qr_solve(_concentric_scaled(m, radii), rhs / x ** abs(m), singular_rtol,
                             what=f"mode {m} concentric system", refine=2)
        out[m + big_m] = y / radii[-1] ** _powers(m, order_n)
    return AlmansiCoefficients(out)


def uniqueness_certificate(order_n: int, mode_cutoff: int, geometry: str = "subdisk",
                           rho: float = 1.0, radii: Sequence[float] | None = None,
                           threshold: float = SINGULAR_RTOL) -> UniquenessCertificate:
    """Smallest relative singular value of every scaled per-mode system, |m| <= M."""
    _check_order(order_n)
    if geometry == "subdisk":
        DiskConfig(order_n, mode_cutoff, rho)
        mats = (_dirichlet_scaled(m, rho, order_n) for m in range(mode_cutoff + 1))
    elif geometry == "concentric":
        radii = _check_radii(radii, order_n)
        mats = (_concentric_scaled(m, radii) for m in range(mode_cutoff + 1))
    else:
        raise ValueError(f"geometry must be 'subdisk' or 'concentric', got {geometry!r}")
    per_mode = np.array([relative_smin(a) for a in mats])
    worst = int(np.argmin(per_mode))
    gmin = float(per_mode[worst])
    verdict = "unique" if gmin > threshold else f"degenerate({worst})"
    return UniquenessCertificate(geometry, order_n, per_mode, gmin, verdict)


# -- operators and evaluation -------------------------------------------------

def apply_laplacian(coeffs: AlmansiCoefficients) -> AlmansiCoefficients:
    """One application of the Laplacian, staying in the Almansi layer basis.

    ``Delta(r^p e^{im theta}) = (p^2 - m^2) r^{p-2} e^{im theta}``; for
    ``p = |m| + 2k`` the factor is ``4k(|m| + k)`` and the term moves to layer k-1.
    """
    a = coeffs.coeffs
    n = coeffs.layers
    m = np.abs(coeffs.modes)[:, None]
    k = np.arange(1, n)[None, :]
    out = np.zeros_like(a)
    out[:, :-1] = 4.0 * k * (m + k) * a[:, 1:]
    return AlmansiCoefficients(out)


def eval_field(coeffs: AlmansiCoefficients, r, theta, radial_deriv_order: int = 0,
               complex_output: bool = False):
    """``(d/dr)^j u`` at polar points; real part unless ``complex_output``."""
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    th = np.broadcast_to(np.asarray(theta, dtype=float), r_arr.shape)
    if np.any(r_arr < 0):
        raise DomainError("r must be >= 0")
    scalar = np.ndim(r) == 0 and np.ndim(theta) == 0
    modes = coeffs.modes.astype(np.int64)
    if complex_output:
        p = np.abs(modes)[:, None] + 2 * np.arange(coeffs.layers)[None, :]
        f = _falling(p, radial_deriv_order)
        expo = np.maximum(p - radial_deriv_order, 0)
        radial = np.where(f[..., None] != 0, f[..., None] * r_arr ** expo[..., None], 0.0)
        phase = np.exp(1j * modes[:, None] * th[None, :])
        val = np.einsum("qk,qki,qi->i", coeffs.coeffs, radial, phase)
    else:
        flat = np.ascontiguousarray(coeffs.coeffs.ravel())
        val = _jit.kernel("polar_field")(
            np.ascontiguousarray(flat.real), np.ascontiguousarray(flat.imag), modes,
            coeffs.layers, np.ascontiguousarray(r_arr), np.ascontiguousarray(th, dtype=float),
            int(radial_deriv_order))
    return val[0] if scalar else val


def boundary_residual_subdisk(cfg: DiskConfig, data: FourierBoundaryData,
                              coeffs: AlmansiCoefficients) -> float:
    """Max mismatch of reproduced mode data, relative to the data scale.

    Derivative rows are compared in dimensionless form (row j weighted by
    ``rho^j``), which is invariant under rescaling the disk; at ``rho = 1``
    this is the plain relative residual. Sums are accumulated exactly.
    """
    rho, n = cfg.radius_rho, cfg.order_N
    w = rho ** np.arange(n)
    scale = max(float(np.max(np.abs(data.values * w[:, None]))), np.finfo(float).tiny)
    worst = 0.0
    for m in range(-data.cutoff, data.cutoff + 1):
        a = coeffs.mode(m)
        # evaluate in scaled variables: y = rho^p a, rows falling(p, j)
        y = a * rho ** _powers(m, n)
        got = exact_matvec(_dirichlet_scaled(m, rho, n), y)
        worst = max(worst, float(np.max(np.abs(got - w * data.mode(m)))))
    return worst / scale


def boundary_residual_concentric(radii, data: FourierBoundaryData,
                                 coeffs: AlmansiCoefficients) -> float:
    """Max mismatch on the circles relative to the data scale (exact sums)."""
    radii = np.asarray(radii, dtype=float)
    scale = max(float(np.max(np.abs(data.values))), np.finfo(float).tiny)
    worst = 0.0
    for m in range(-data.cutoff, data.cutoff + 1):
        got = exact_matvec(concentric_matrix(m, radii), coeffs.mode(m))
        worst = max(worst, float(np.max(np.abs(got - data.mode(m)))))
    return worst / scale
