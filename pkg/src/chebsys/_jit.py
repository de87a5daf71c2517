"""Hot numeric kernels.

Every kernel exists twice: a numba ``@njit`` loop and a pure-numpy version.
The numba path is used when numba imports and ``CHEBSYS_DISABLE_NUMBA`` is
unset (or set to ``0``/``false``). Both paths are exposed through
``NUMBA_KERNELS`` / ``NUMPY_KERNELS`` so tests and benchmarks can pit them
against each other.

Basis kernels share one calling convention::

    kernel(ts, ds, params) -> out   # out.shape == (len(params), len(ts))

where ``out[j, i]`` is the ``ds[i]``-th derivative of the j-th basis function
at ``ts[i]``.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_flag = os.environ.get("CHEBSYS_DISABLE_NUMBA", "").strip().lower()
DISABLED_BY_ENV = _flag not in ("", "0", "false", "no")
USE_NUMBA = numba is not None and not DISABLED_BY_ENV
BACKEND = "numba" if USE_NUMBA else "numpy"


def _njit(fn):
    if numba is None:
        return fn
    return numba.njit(cache=True)(fn)


# ---------------------------------------------------------------------------
# numba loops
# ---------------------------------------------------------------------------

@_njit
def _falling(x, k):
    out = 1.0
    for q in range(k):
        out *= x - q
    return out


@_njit
def _monomial_nb(ts, ds, params):
    n = params.shape[0]
    out = np.zeros((n, ts.shape[0]))
    for i in range(ts.shape[0]):
        t = ts[i]
        d = ds[i]
        for j in range(d, n):
            out[j, i] = _falling(j, d) * t ** (j - d)
    return out


@_njit
def _muntz_nb(ts, ds, params):
    n = params.shape[0]
    out = np.zeros((n, ts.shape[0]))
    for i in range(ts.shape[0]):
        t = ts[i]
        d = ds[i]
        for j in range(n):
            c = _falling(params[j], d)
            if c != 0.0:
                out[j, i] = c * t ** (params[j] - d)
    return out


@_njit
def _cauchy_nb(ts, ds, params):
    n = params.shape[0]
    out = np.empty((n, ts.shape[0]))
    for i in range(ts.shape[0]):
        d = ds[i]
        c = _falling(-1.0, d)
        for j in range(n):
            out[j, i] = c * (params[j] + ts[i]) ** (-d - 1)
    return out


@_njit
def _gauss_nb(ts, ds, params):
    n = params.shape[0]
    out = np.empty((n, ts.shape[0]))
    for i in range(ts.shape[0]):
        d = ds[i]
        for j in range(n):
            x = ts[i] - params[j]
            # physicists' Hermite recurrence: H_{k+1} = 2x H_k - 2k H_{k-1}
            h_prev = 0.0
            h = 1.0
            for k in range(d):
                h_next = 2.0 * x * h - 2.0 * k * h_prev
                h_prev = h
                h = h_next
            sign = -1.0 if d % 2 else 1.0
            out[j, i] = sign * h * math.exp(-x * x)
    return out


@_njit
def _green_nb(ts, ds, params):
    n = params.shape[0]
    out = np.zeros((n, ts.shape[0]))
    for i in range(ts.shape[0]):
        t = ts[i]
        d = ds[i]
        for j in range(n):
            s = params[j]
            if d == 0:
                out[j, i] = min(s, t) * (1.0 - max(s, t))
            elif d == 1:
                out[j, i] = (1.0 - s) if t < s else -s
    return out


@_njit
def _sign_changes_nb(values):
    count = 0
    for i in range(values.shape[0] - 1):
        if values[i] * values[i + 1] < 0.0:
            count += 1
    out = np.empty(count, dtype=np.int64)
    k = 0
    for i in range(values.shape[0] - 1):
        if values[i] * values[i + 1] < 0.0:
            out[k] = i
            k += 1
    return out


@_njit
def _opitz_monomial_nb(taus, n):
    # row i holds t^i evaluated at the bidiagonal matrix J(taus): entry c is
    # the divided difference t^i[tau_0, ..., tau_c]
    m = taus.shape[0]
    out = np.zeros((n, m))
    row = np.zeros(m)
    row[0] = 1.0
    for i in range(n):
        for c in range(m):
            out[i, c] = row[c]
        for c in range(m - 1, -1, -1):
            prev = row[c - 1] if c > 0 else 0.0
            row[c] = row[c] * taus[c] + prev
    return out


@_njit
def _opitz_cauchy_nb(taus, params):
    n = params.shape[0]
    m = taus.shape[0]
    out = np.empty((n, m))
    for j in range(n):
        acc = 1.0
        for c in range(m):
            acc = -acc / (params[j] + taus[c]) if c > 0 else 1.0 / (params[j] + taus[c])
            out[j, c] = acc
    return out


@_njit
def _polar_field_nb(coef_re, coef_im, modes, n_layers, rs, thetas, deriv):
    # coef arrays are flattened (mode, layer); result is the real part
    out = np.zeros(rs.shape[0])
    for i in range(rs.shape[0]):
        r = rs[i]
        acc = 0.0
        for q in range(modes.shape[0]):
            m = modes[q]
            am = abs(m)
            c = math.cos(m * thetas[i])
            s = math.sin(m * thetas[i])
            for k in range(n_layers):
                p = am + 2 * k
                f = _falling(p, deriv)
                if f == 0.0:
                    continue
                radial = f * r ** (p - deriv) if p > deriv else f
                idx = q * n_layers + k
                acc += radial * (coef_re[idx] * c - coef_im[idx] * s)
        out[i] = acc
    return out


# ---------------------------------------------------------------------------
# numpy fallbacks
# ---------------------------------------------------------------------------

def _falling_np(x, k):
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    for q in range(k):
        out = out * (x - q)
    return out


def _by_order(ts, ds, fill):
    out = None
    for d in np.unique(ds):
        mask = ds == d
        block = fill(ts[mask], int(d))
        if out is None:
            out = np.zeros((block.shape[0], ts.shape[0]))
        out[:, mask] = block
    return out


def _monomial_np(ts, ds, params):
    n = params.shape[0]
    if ts.shape[0] == 0:
        return np.zeros((n, 0))
    j = np.arange(n)[:, None]

    def fill(t, d):
        expo = np.maximum(j - d, 0)
        return np.where(j >= d, _falling_np(j, d) * t[None, :] ** expo, 0.0)

    return _by_order(ts, ds, fill)


def _muntz_np(ts, ds, params):
    if ts.shape[0] == 0:
        return np.zeros((params.shape[0], 0))
    a = params[:, None]

    def fill(t, d):
        c = _falling_np(a, d)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = c * t[None, :] ** (a - d)
        return np.where(c != 0.0, val, 0.0)

    return _by_order(ts, ds, fill)


def _cauchy_np(ts, ds, params):
    if ts.shape[0] == 0:
        return np.zeros((params.shape[0], 0))

    def fill(t, d):
        return float(_falling_np(-1.0, d)) * (params[:, None] + t[None, :]) ** (-d - 1.0)

    return _by_order(ts, ds, fill)


def _gauss_np(ts, ds, params):
    if ts.shape[0] == 0:
        return np.zeros((params.shape[0], 0))

    def fill(t, d):
        x = t[None, :] - params[:, None]
        h_prev, h = np.zeros_like(x), np.ones_like(x)
        for k in range(d):
            h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
        return (-1.0) ** d * h * np.exp(-x * x)

    return _by_order(ts, ds, fill)


def _green_np(ts, ds, params):
    if ts.shape[0] == 0:
        return np.zeros((params.shape[0], 0))
    s = params[:, None]

    def fill(t, d):
        t = t[None, :]
        if d == 0:
            return np.minimum(s, t) * (1.0 - np.maximum(s, t))
        if d == 1:
            return np.where(t < s, 1.0 - s, -s) * np.ones_like(t)
        return np.zeros((s.shape[0], t.shape[1]))

    return _by_order(ts, ds, fill)


def _sign_changes_np(values):
    return np.flatnonzero(values[:-1] * values[1:] < 0.0).astype(np.int64)


def _opitz_monomial_np(taus, n):
    m = taus.shape[0]
    out = np.zeros((n, m))
    row = np.zeros(m)
    row[0] = 1.0
    for i in range(n):
        out[i] = row
        shifted = np.concatenate(([0.0], row[:-1]))
        row = row * taus + shifted
    return out


def _opitz_cauchy_np(taus, params):
    denom = params[:, None] + taus[None, :]
    signs = (-1.0) ** np.arange(taus.shape[0])
    return signs[None, :] / np.cumprod(denom, axis=1)


def _polar_field_np(coef_re, coef_im, modes, n_layers, rs, thetas, deriv):
    coef = (coef_re + 1j * coef_im).reshape(modes.shape[0], n_layers)
    p = np.abs(modes)[:, None] + 2 * np.arange(n_layers)[None, :]
    f = _falling_np(p, deriv)
    expo = np.maximum(p - deriv, 0)
    # radial[q, k, i]
    radial = np.where(f[..., None] != 0.0, f[..., None] * rs[None, None, :] ** expo[..., None], 0.0)
    phase = np.exp(1j * modes[:, None] * thetas[None, :])
    total = np.einsum("qk,qki,qi->i", coef, radial, phase)
    return total.real.copy()


NUMBA_KERNELS = {
    "monomial": _monomial_nb,
    "muntz": _muntz_nb,
    "cauchy": _cauchy_nb,
    "gauss": _gauss_nb,
    "green_unit": _green_nb,
    "sign_changes": _sign_changes_nb,
    "opitz_monomial": _opitz_monomial_nb,
    "opitz_cauchy": _opitz_cauchy_nb,
    "polar_field": _polar_field_nb,
}

NUMPY_KERNELS = {
    "monomial": _monomial_np,
    "muntz": _muntz_np,
    "cauchy": _cauchy_np,
    "gauss": _gauss_np,
    "green_unit": _green_np,
    "sign_changes": _sign_changes_np,
    "opitz_monomial": _opitz_monomial_np,
    "opitz_cauchy": _opitz_cauchy_np,
    "polar_field": _polar_field_np,
}

KERNELS = NUMBA_KERNELS if USE_NUMBA else NUMPY_KERNELS


def kernel(name):
    """Return the active implementation of kernel ``name``."""
    return KERNELS[name]
