import csv
import math
from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chebsys import (
    FunctionSystem, KnotSpec, SmoothnessError, SpanElement,
    certify_t_property, collocation_determinant, collocation_matrix, count_zeros,
    write_sweep_csv,
)


def brute_det(rows):
    """Leibniz expansion in exact rational arithmetic."""
    n = len(rows)
    total = Fraction(0)
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = Fraction(sign)
        for i in range(n):
            term *= rows[i][perm[i]]
        total += term
    return total


def vandermonde(ts):
    return math.prod(Fraction(tj) - Fraction(ti) for i, ti in enumerate(ts) for tj in ts[i + 1:])


def test_matrix_examples():
    mono2 = FunctionSystem.monomial(2, (0, 1))
    np.testing.assert_array_equal(collocation_matrix(mono2, KnotSpec.simple([0, 1])), [[1, 1], [0, 1]])
    mono3 = FunctionSystem.monomial(3, (0, 2))
    m = collocation_matrix(mono3, KnotSpec(((0, 2), (1, 1))))
    np.testing.assert_array_equal(m, [[1, 0, 1], [0, 1, 1], [0, 0, 1]])
    w = collocation_determinant(mono3, KnotSpec(((0, 3),)))
    assert w.determinant == pytest.approx(2.0, rel=1e-15)


def test_determinant_examples():
    mono3 = FunctionSystem.monomial(3, (0, 2))
    assert collocation_determinant(mono3, KnotSpec.simple([0, 1, 2])).determinant == pytest.approx(2.0, rel=1e-14)
    cau = FunctionSystem.cauchy([1, 2], (0, 1))
    assert collocation_determinant(cau, KnotSpec.simple([0, 1])).determinant == pytest.approx(1 / 12, rel=1e-14)
    one = FunctionSystem.monomial(1, (0, 1))
    assert collocation_determinant(one, KnotSpec.simple([0])).determinant == 1.0


def test_bad_knots_rejected():
    mono3 = FunctionSystem.monomial(3)
    with pytest.raises(ValueError):
        collocation_matrix(mono3, KnotSpec.simple([0, 1]))
    with pytest.raises(ValueError):
        KnotSpec.simple([0.5, 0.1, 0.2])
    green = FunctionSystem.green_unit([0.3, 0.6])
    with pytest.raises(SmoothnessError):
        collocation_matrix(green, KnotSpec(((0.5, 2),)))


@given(st.integers(2, 8), st.integers(0, 2**32 - 1))
def test_vandermonde_property(n, seed):
    ts = np.sort(np.random.default_rng(seed).uniform(-1, 1, n))
    if np.min(np.diff(ts)) < 1e-6:
        return
    rep = collocation_determinant(FunctionSystem.monomial(n), KnotSpec.simple(ts))
    want = float(vandermonde(list(ts)))
    assert abs(rep.determinant - want) <= 1e-10 * abs(want)
    assert rep.sign == 1


@given(st.integers(0, 2**32 - 1))
def test_cauchy_property(seed):
    s = [1.0, 2.0, 3.0]
    ts = np.sort(np.random.default_rng(seed).uniform(0.1, 0.9, 3))
    rows = [[1 / (Fraction(si) + Fraction(t)) for t in ts] for si in s]
    want = float(brute_det(rows))
    got = collocation_determinant(FunctionSystem.cauchy(s), KnotSpec.simple(ts)).determinant
    assert abs(got - want) <= 1e-10 * abs(want)


def test_confluent_limit_monotone():
    # det at (t, t+h, t+2h, 0.9) / h^3 -> prod_{i<j<3}(j-i) / (0! 1! 2!) * confluent det,
    # and the spacing product equals the factorial product
    system = FunctionSystem.monomial(4, (0, 1))
    t = 0.2
    target = collocation_determinant(system, KnotSpec(((t, 3), (0.9, 1)))).determinant
    errs = []
    for h in (1e-2, 1e-3):
        d = collocation_determinant(system, KnotSpec.simple([t, t + h, t + 2 * h, 0.9])).determinant
        errs.append(abs(d / h**3 - target) / abs(target))
    assert errs[1] < errs[0]
    assert errs[1] < 1e-2


def test_green_kinks_avoided():
    green = FunctionSystem.green_unit([0.25, 0.5, 0.75])
    res = certify_t_property(green, mode="simple", sample_count=100, seed=3, keep_records=True)
    for ks, _ in res.records:
        assert np.min(np.abs(ks.points[:, None] - np.array(green.kinks)[None, :])) > 1e-9


def test_certify_examples():
    res = certify_t_property(FunctionSystem.monomial(4, (0, 1)), sample_count=500, seed=0)
    assert res.verdict == "certified-consistent" and res.common_sign == 1 and res.min_abs_det > 0
    res = certify_t_property(FunctionSystem.monomial(2, (0, 1)), mode="confluent", sample_count=200, seed=0)
    assert res.verdict == "certified-consistent"
    tt2 = FunctionSystem.from_polynomials([[0, 1], [0, 0, 1]], (-1, 1))
    res = certify_t_property(tt2, sample_count=200, seed=0)
    assert res.refuted
    pts = res.witness.points
    assert pts.min() <= 0 <= pts.max()


def test_certify_needs_smoothness():
    with pytest.raises(SmoothnessError):
        certify_t_property(FunctionSystem.green_unit([0.3, 0.6]), mode="confluent")


def test_certify_independent_of_workers():
    g = FunctionSystem.gauss([-1, 0, 1])
    a = certify_t_property(g, sample_count=150, seed=5, workers=1)
    b = certify_t_property(g, sample_count=150, seed=5, workers=4)
    assert (a.verdict, a.min_abs_det, a.common_sign) == (b.verdict, b.min_abs_det, b.common_sign)


def test_zero_examples():
    mono = FunctionSystem.monomial(3, (0, 1))
    rep = count_zeros(SpanElement(mono, [-0.25, 0, 1]))
    assert rep.count == 1 and rep.roots[0][0] == pytest.approx(0.5, abs=1e-12)
    rep = count_zeros(SpanElement(mono, [0, 0, 0]))
    assert rep.identically_zero and rep.count is None
    rep = count_zeros(SpanElement(FunctionSystem.monomial(3, (-1, 1)), [0, 0, 1]))
    assert len(rep.roots) == 1 and rep.roots[0][1] >= 2 and abs(rep.roots[0][0]) < 1e-6


@given(st.lists(st.floats(-1, 1), min_size=4, max_size=4))
def test_zero_count_bounded_for_t_systems(coeffs):
    system = FunctionSystem.cauchy([0.5, 1, 2, 4], (0, 1))
    u = SpanElement(system, coeffs)
    if np.max(np.abs(coeffs)) < 1e-3:
        return
    rep = count_zeros(u)
    assert rep.count is not None and rep.count <= system.order_count - 1


def test_sweep_csv(tmp_path):
    res = certify_t_property(FunctionSystem.monomial(3), sample_count=5, seed=1, keep_records=True)
    path = tmp_path / "sweep.csv"
    write_sweep_csv(res.records, path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["knot_0", "knot_1", "knot_2", "determinant", "sign", "smallest_singular_value"]
    assert len(rows) == 6
    ks, rep = res.records[0]
    assert float(rows[1][3]) == rep.determinant


def test_singular_screen():
    dep = FunctionSystem.from_polynomials([[0, 1], [0, 2]], (0, 1))
    rep = collocation_determinant(dep, KnotSpec.simple([0.2, 0.7]))
    assert rep.sign == 0 and rep.ratio <= 1e-10
