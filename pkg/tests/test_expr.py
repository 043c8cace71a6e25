import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from l2curves.expr import BinOp, ExprError, Neg, parse_kappa
from l2curves.quadrature import Variable


def test_rho_law_evaluates():
    k = parse_kappa("2 + 1/rho", "rho")
    assert k.variable is Variable.RHO
    assert float(k(1.0)) == 3.0


def test_v_law_evaluates():
    assert float(parse_kappa("exp(v)", "v")(0.0)) == 1.0


def test_unknown_identifier():
    with pytest.raises(ExprError, match="unknown identifier x") as info:
        parse_kappa("2*x", "v")
    assert info.value.position == 2


def test_wrong_law_variable():
    with pytest.raises(ExprError, match="not allowed"):
        parse_kappa("rho + 1", "v")


@pytest.mark.parametrize("source, value", [
    ("-2^2", -4.0),
    ("2^3^2", 512.0),
    ("2^-1", 0.5),
    ("(-2)^2", 4.0),
    ("1 - 2 - 3", -4.0),
    ("8 / 4 / 2", 1.0),
    ("2 * 3 + 4", 10.0),
    ("--3", 3.0),
    ("1.5e1 + .5", 15.5),
])
def test_precedence_and_associativity(source, value):
    assert float(parse_kappa(source, "rho")(7.0)) == value


def test_power_binds_tighter_than_unary_minus():
    ast = parse_kappa("-rho^2", "rho").ast
    assert isinstance(ast, Neg) and isinstance(ast.operand, BinOp) and ast.operand.op == "^"


@pytest.mark.parametrize("source, position", [
    ("", 0), ("2 +", 3), ("(rho", 4), ("exp rho", 4), ("2 $ 3", 2), ("rho)", 3), ("sqrt()", 5),
])
def test_syntax_errors_carry_positions(source, position):
    with pytest.raises(ExprError) as info:
        parse_kappa(source, "rho")
    assert info.value.position == position


@pytest.mark.parametrize("name", ["exp", "log", "sinh", "cosh", "tanh", "sqrt"])
def test_functions(name):
    k = parse_kappa(f"{name}(rho)", "rho")
    assert float(k(0.75)) == pytest.approx(getattr(math, name)(0.75), rel=1e-15)


def test_vectorised_evaluation_keeps_shape():
    out = parse_kappa("2", "v")(np.zeros((3, 4)))
    assert out.shape == (3, 4) and np.all(out == 2)


def test_domain_errors_become_nan():
    assert math.isnan(float(parse_kappa("log(rho)", "rho")(-1.0)))


# random expression trees, compared against Python's evaluator
_atoms = st.one_of(st.integers(1, 9).map(str), st.just("rho"))


def _extend(children):
    binary = st.tuples(children, st.sampled_from(["+", "-", "*"]), children).map(lambda t: f"({t[0]} {t[1]} {t[2]})")
    unary = children.map(lambda c: f"(-{c})")
    call = st.tuples(st.sampled_from(["sinh", "tanh"]), children).map(lambda t: f"{t[0]}({t[1]})")
    return st.one_of(binary, unary, call)


@given(st.recursive(_atoms, _extend, max_leaves=8), st.floats(-2, 2, allow_nan=False))
def test_matches_python_semantics(source, rho):
    expected = eval(source, {"sinh": math.sinh, "tanh": math.tanh, "rho": rho})
    got = float(parse_kappa(source, "rho")(rho))
    assert got == pytest.approx(expected, rel=1e-12, abs=1e-12)
