import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chebsys import (
    DomainError, FunctionSystem, KnotSpec, SmoothnessError, Weight, WeightChain,
    build_nested, certify_t_property, collocation_determinant, nested_derivative,
)


def ones(n, anchor=0.0, domain=(-1, 3)):
    return build_nested(WeightChain(tuple(Weight.const() for _ in range(n + 1)), anchor, domain))


def test_unit_weights_examples():
    s = ones(2)
    assert s.eval(0, 0.7) == pytest.approx(1.0, abs=1e-12)
    assert s.eval(1, 0.7) == pytest.approx(0.7, abs=1e-10)
    assert s.eval(2, 1.0) == pytest.approx(0.5, abs=1e-10)
    assert ones(3).eval(3, 2.0) == pytest.approx(4 / 3, abs=1e-10)


def test_exp_weight_examples():
    s = build_nested(WeightChain((Weight.exp(), Weight.const()), 0.0, (-1, 1)))
    assert s.eval(1, 1.0) == pytest.approx(math.e, abs=1e-10)
    assert nested_derivative(s, 1, 0.0, 1) == pytest.approx(1.0, abs=1e-10)


def test_derivative_examples():
    s = ones(2, domain=(-1, 4))
    assert nested_derivative(s, 2, 3.0, 1) == pytest.approx(3.0, abs=1e-9)
    for t in (-0.5, 0.0, 2.5):
        assert nested_derivative(s, 1, t, 1) == pytest.approx(1.0, abs=1e-12)


def test_unit_weights_cubic_grid():
    s = ones(3, anchor=0.0, domain=(-1, 1))
    ts = np.linspace(-1, 1, 20)
    np.testing.assert_allclose(s.basis(ts)[3], ts**3 / 6, atol=1e-10)


def test_chain_validation():
    with pytest.raises(DomainError):
        WeightChain((Weight.const(), Weight.affine(0.5, 1.0)), 0.0, (-1, 1))  # vanishes at -0.5
    with pytest.raises(DomainError):
        WeightChain((Weight.const(),), 2.0, (-1, 1))
    rough = Weight(lambda t, k: np.ones_like(t), smoothness=0, label="rough")
    with pytest.raises(SmoothnessError):
        WeightChain((rough, Weight.const()), 0.0, (0, 1))


def test_anchor_inside_both_sides():
    s = build_nested(WeightChain((Weight.const(), Weight.exp(2.0)), 0.3, (-1, 1)))
    ts = np.array([-0.9, 0.3, 0.95])
    want = (np.exp(2 * ts) - np.exp(0.6)) / 2
    np.testing.assert_allclose(s.basis(ts)[1], want, atol=1e-11)


def test_polynomial_span_determinants(rng):
    s = ones(3, domain=(-1, 1))
    mono = FunctionSystem.monomial(4, (-1, 1))
    for _ in range(10):
        ts = np.sort(rng.uniform(-1, 1, 2))
        for knots in (KnotSpec(((ts[0], 2), (ts[1], 2))), KnotSpec(((ts[0], 1), (ts[1], 3))),
                      KnotSpec.simple(np.sort(rng.uniform(-1, 1, 4)))):
            got = collocation_determinant(s, knots).determinant
            want = collocation_determinant(mono, knots).determinant / (1 * 1 * 2 * 6)
            assert abs(got - want) <= 1e-8 * abs(want)


def _positive_poly(draw_coeffs):
    # 1 + sum c_k t^k with small coefficients stays positive on [0, 1]
    return Weight.polynomial([1.0] + [0.9 * c / max(len(draw_coeffs), 1) for c in draw_coeffs])


@settings(max_examples=8)
@given(st.integers(1, 4), st.lists(st.lists(st.floats(-1, 1), max_size=3), min_size=5, max_size=5))
def test_et_certification_random_chains(n, coeff_lists):
    weights = tuple(_positive_poly(c) for c in coeff_lists[:n + 1])
    s = build_nested(WeightChain(weights, 0.0, (0, 1)))
    res = certify_t_property(s, mode="confluent", sample_count=40, seed=n)
    assert res.verdict == "certified-consistent"


def test_derivatives_match_finite_differences():
    weights = (Weight.exp(0.5), Weight.affine(2.0, 0.5), Weight.polynomial([1, 0, 1]), Weight.const(3))
    s = build_nested(WeightChain(weights, -0.2, (-1, 1)))
    ts = np.linspace(-0.9, 0.9, 9)
    h = 1e-5
    for d in range(2):
        fd = (s.basis(ts + h, d) - s.basis(ts - h, d)) / (2 * h)
        exact = s.basis(ts, d + 1)
        assert np.all(np.abs(fd - exact) <= 1e-5 * np.maximum(np.abs(exact), 1.0))


def test_declaration_roundtrip():
    s = build_nested(WeightChain((Weight.exp(1.5, 2.0), Weight.affine(1, 0.2)), 0.0, (0, 1)))
    again = FunctionSystem.from_declaration(s.declaration())
    ts = np.linspace(0, 1, 5)
    np.testing.assert_array_equal(again.basis(ts), s.basis(ts))
