import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chebsys import _jit
from chebsys._jit import NUMBA_KERNELS, NUMPY_KERNELS

BASIS = {
    "monomial": (np.zeros(6), (-2, 2)),
    "muntz": (np.array([0.5, 1.0, 2.5, 3.0]), (0.1, 2)),
    "cauchy": (np.array([0.5, 1.0, 3.0]), (0, 2)),
    "gauss": (np.array([-1.0, 0.0, 0.7]), (-2, 2)),
    "green_unit": (np.array([0.2, 0.5, 0.8]), (0, 1)),
}


def test_same_kernel_names():
    assert set(NUMBA_KERNELS) == set(NUMPY_KERNELS)


@pytest.mark.parametrize("name", sorted(BASIS))
@given(seed=st.integers(0, 2**32 - 1), dmax=st.integers(0, 5))
def test_basis_parity(name, seed, dmax):
    params, (a, b) = BASIS[name]
    rng = np.random.default_rng(seed)
    ts = rng.uniform(a, b, 50)
    ds = rng.integers(0, dmax + 1, 50).astype(np.int64)
    if name == "green_unit":
        ds = np.minimum(ds, 2)
    x = NUMBA_KERNELS[name](ts, ds, params)
    y = NUMPY_KERNELS[name](ts, ds, params)
    np.testing.assert_allclose(x, y, rtol=1e-12, atol=1e-12)


@given(st.lists(st.floats(-1, 1), min_size=2, max_size=12, unique=True))
def test_opitz_parity(taus):
    taus = np.sort(np.array(taus))
    n = taus.size
    np.testing.assert_allclose(NUMBA_KERNELS["opitz_monomial"](taus, n),
                               NUMPY_KERNELS["opitz_monomial"](taus, n), rtol=1e-13, atol=1e-14)
    s = np.linspace(2.0, 5.0, n)
    np.testing.assert_allclose(NUMBA_KERNELS["opitz_cauchy"](taus, s),
                               NUMPY_KERNELS["opitz_cauchy"](taus, s), rtol=1e-13, atol=1e-14)


@given(st.lists(st.floats(-1, 1), min_size=0, max_size=40))
def test_sign_change_parity(v):
    v = np.array(v, dtype=float)
    np.testing.assert_array_equal(NUMBA_KERNELS["sign_changes"](v), NUMPY_KERNELS["sign_changes"](v))


def test_polar_field_parity(rng):
    m = 6
    modes = np.arange(-m, m + 1).astype(np.int64)
    re, im = rng.normal(size=(2 * m + 1) * 3), rng.normal(size=(2 * m + 1) * 3)
    rs, th = rng.uniform(0, 1, 100), rng.uniform(0, 6.3, 100)
    for d in range(4):
        np.testing.assert_allclose(NUMBA_KERNELS["polar_field"](re, im, modes, 3, rs, th, d),
                                   NUMPY_KERNELS["polar_field"](re, im, modes, 3, rs, th, d),
                                   rtol=1e-12, atol=1e-12)


def test_env_flag_selects_numpy():
    env = dict(os.environ, CHEBSYS_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "import chebsys._jit as j; print(j.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    assert _jit.BACKEND == ("numpy" if _jit.DISABLED_BY_ENV else "numba")
