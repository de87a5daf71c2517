import numpy as np
import pytest

from chebsys import ConfigError, FunctionSystem
from chebsys.schema import compile_expression, system_from_declaration, weight_from_spec


@pytest.mark.parametrize("decl", [
    {"family": "monomial", "params": {"order": 3}, "domain": [-1, 1]},
    {"family": "muntz", "params": {"exponents": [0.5, 1, 2]}, "domain": [0.5, 2]},
    {"family": "cauchy", "params": {"s": [1, 2, 3]}, "domain": [0, 1]},
    {"family": "gauss", "params": {"s": [-1, 0, 1]}, "domain": [-1, 1]},
    {"family": "green_unit", "params": {"s": [0.25, 0.75]}, "domain": [0, 1]},
    {"family": "custom", "params": {"polynomials": [[0, 1], [0, 0, 1]]}, "domain": [-1, 1]},
    {"family": "nested", "params": {"weights": [1, {"kind": "exp", "rate": 2}, [1, 0.1]], "anchor": 0},
     "domain": [0, 1]},
], ids=lambda d: d["family"])
def test_declaration_roundtrip(decl):
    s = system_from_declaration(decl)
    again = FunctionSystem.from_declaration(s.declaration())
    ts = np.linspace(*s.domain.as_list(), 7)
    np.testing.assert_array_equal(again.basis(ts), s.basis(ts))


@pytest.mark.parametrize("decl,field", [
    ({"family": "monomial", "params": {"order": 3}}, "domain"),
    ({"family": "monomial", "params": {"order": 3}, "domain": [0, 1], "extra": 1}, "extra"),
    ({"family": "monomial", "params": {"order": 3, "typo": 1}, "domain": [0, 1]}, "params.typo"),
    ({"family": "bessel", "params": {}, "domain": [0, 1]}, "family"),
    ({"family": "cauchy", "params": {"s": [2, 1]}, "domain": [0, 1]}, "params"),
    ({"family": "monomial", "params": {"order": 2.5}, "domain": [0, 1]}, "order"),
    ({"family": "monomial", "params": {"order": 2}, "domain": [1, 0]}, "domain"),
    ({"family": "nested", "params": {"weights": [1, {"kind": "spline"}], "anchor": 0},
      "domain": [0, 1]}, "weights[1].kind"),
])
def test_strict_errors_name_the_field(decl, field):
    with pytest.raises(ConfigError, match=field.replace("[", r"\[").replace("]", r"\]")):
        system_from_declaration(decl)


def test_expressions():
    f = compile_expression("abs(t) + 2*t**2 - sin(pi*t)/e")
    t = np.array([-0.5, 0.25])
    np.testing.assert_allclose(f(t), np.abs(t) + 2 * t**2 - np.sin(np.pi * t) / np.e)
    assert compile_expression("3")(t).shape == t.shape


@pytest.mark.parametrize("text", ["__import__('os')", "t.real", "[t]", "lambda: 1", "x + 1",
                                  "open('f')", "t if t else 1", "'a'"])
def test_expressions_reject_unsafe(text):
    with pytest.raises(ConfigError):
        compile_expression(text)


def test_weight_specs():
    t = np.array([0.0, 1.0])
    np.testing.assert_allclose(weight_from_spec(2.0)(t), [2, 2])
    np.testing.assert_allclose(weight_from_spec([1, 2])(t, 1), [2, 2])
    np.testing.assert_allclose(weight_from_spec({"kind": "affine", "coeffs": [1, 3]})(t), [1, 4])
    np.testing.assert_allclose(weight_from_spec({"kind": "exp", "rate": 1, "scale": 2})(t), [2, 2 * np.e])
    with pytest.raises(ConfigError):
        weight_from_spec({"kind": "const"})
