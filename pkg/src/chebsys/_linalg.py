"""Shared linear-algebra conventions.

One notion of numerical singularity is used everywhere: a square matrix is
singular when ``smin / max(smax, tiny) <= SINGULAR_RTOL``.
"""

from fractions import Fraction

import numpy as np
import scipy.linalg

from .errors import SingularSystemError

SINGULAR_RTOL = 1e-10
_TINY = np.finfo(float).tiny


def singular_extremes(a):
    """Return ``(smallest, largest)`` singular values of ``a``."""
    s = np.linalg.svd(np.asarray(a, dtype=float), compute_uv=False)
    if s.size == 0:
        return 0.0, 0.0
    return float(s[-1]), float(s[0])


def relative_smin(a):
    smin, smax = singular_extremes(a)
    return smin / max(smax, _TINY)


def numerical_rank(a, rtol=SINGULAR_RTOL):
    s = np.linalg.svd(np.asarray(a, dtype=float), compute_uv=False)
    if s.size == 0 or s[0] <= _TINY:
        return 0
    return int(np.count_nonzero(s / s[0] > rtol))


def _exact_real_matvec(a, x):
    out = np.empty(a.shape[0])
    xf = [Fraction(float(v)) for v in x]
    for i, row in enumerate(a):
        out[i] = float(sum(Fraction(float(v)) * w for v, w in zip(row, xf)))
    return out


def exact_matvec(a, x):
    """``a @ x`` with every sum accumulated exactly and rounded once."""
    a = np.asarray(a)
    x = np.asarray(x)
    if not (np.iscomplexobj(a) or np.iscomplexobj(x)):
        return _exact_real_matvec(np.asarray(a, float), np.asarray(x, float))
    ar, ai = np.real(a).astype(float), np.imag(a).astype(float)
    xr, xi = np.real(x).astype(float), np.imag(x).astype(float)
    # real and imaginary parts each need two exact products; stack them
    re = _exact_real_matvec(np.hstack((ar, -ai)), np.concatenate((xr, xi)))
    im = _exact_real_matvec(np.hstack((ai, ar)), np.concatenate((xr, xi)))
    return re + 1j * im


def pivoted_qr_solve(a, b, rtol=SINGULAR_RTOL, what="linear system", refine=0):
    """Solve ``a x = b`` by column-pivoted QR after a singularity screen.

    ``b`` may be a vector or a matrix of right-hand sides. Works for real and
    complex data. ``refine`` rounds of iterative refinement use residuals
    accumulated exactly (vector ``b`` only).
    """
    a = np.asarray(a)
    ratio = relative_smin(a) if not np.iscomplexobj(a) else _complex_ratio(a)
    if ratio <= rtol:
        raise SingularSystemError(
            f"{what} is numerically singular (smin/smax = {ratio:.3e} <= {rtol:g})",
            ratio=ratio,
        )
    q, r, piv = scipy.linalg.qr(a, pivoting=True)

    def solve(rhs):
        z = scipy.linalg.solve_triangular(r, q.conj().T @ rhs)
        x = np.empty_like(z)
        x[piv] = z
        return x

    x = solve(b)
    for _ in range(refine if np.ndim(b) == 1 else 0):
        x = x + solve(np.asarray(b) - exact_matvec(a, x))
    return x


def _complex_ratio(a):
    s = np.linalg.svd(a, compute_uv=False)
    return float(s[-1] / max(s[0], _TINY))
