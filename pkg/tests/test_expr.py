import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import close, fd_jet, mp_function
from skewprod.corpus import random_expressions
from skewprod.errors import DomainError, LexError, ParseError
from skewprod.expr import (
    BinOp, Call, Const, Neg, Param, Pow, eval_jet, parameters, parse_expression, to_source, tokenize,
)


def value(src, **point):
    return float(eval_jet(parse_expression(src), point).value)


# tokenizer ------------------------------------------------------------------


def test_tokens_with_offsets():
    toks = tokenize("x*cos(u)")
    assert [(t.kind, t.text, t.offset) for t in toks] == [
        ("ident", "x", 0), ("op", "*", 1), ("ident", "cos", 2), ("lparen", "(", 5),
        ("ident", "u", 6), ("rparen", ")", 7)]


def test_number_forms():
    assert [t.text for t in tokenize("2/sqrt(3) + .5 + 1e-3 + 2.")] == [
        "2", "/", "sqrt", "(", "3", ")", "+", ".5", "+", "1e-3", "+", "2."]


def test_offsets_are_bytes():
    # "é" is two bytes in UTF-8
    with pytest.raises(LexError) as err:
        tokenize("x + é")
    assert err.value.offset == 4


def test_lex_error_offset():
    with pytest.raises(LexError) as err:
        tokenize("x $ y")
    assert err.value.offset == 2
    with pytest.raises(LexError) as err:
        tokenize("x + $y")
    assert err.value.offset == 4
    assert err.value.to_dict()["kind"] == "lex-error"


# parser ---------------------------------------------------------------------


@pytest.mark.parametrize("src, expected", [
    ("1 + 2 * 3", 7.0),
    ("(1 + 2) * 3", 9.0),
    ("2^3^2", 512.0),
    ("-2^2", -4.0),
    ("(-2)^2", 4.0),
    ("8 / 4 / 2", 1.0),
    ("10 - 3 - 2", 5.0),
    ("2^-1", 0.5),
    ("2^(-2)", 0.25),
    ("--3", 3.0),
    ("2 * -3", -6.0),
    ("pi", math.pi),
    ("e", math.e),
    ("sqrt(4) + log(e)", 3.0),
])
def test_precedence(src, expected):
    assert value(src) == pytest.approx(expected, rel=1e-15)


def test_right_associative_power_tree():
    node = parse_expression("2^3^2")
    assert node == Pow(Const(2.0), 9)


def test_unary_minus_binds_looser_than_power():
    assert parse_expression("-x^2") == Neg(Pow(Param("x"), 2))


@pytest.mark.parametrize("src, fragment", [
    ("x++", "unexpected '+'"),
    ("x+", "end of input"),
    ("(x", "expected ')'"),
    ("x)", "unexpected ')'"),
    ("foo(x)", "unknown function"),
    ("sin", "without argument"),
    ("sin(x, y)", "exactly one argument"),
    ("x^y", "integer literal"),
    ("x^1.5", "integer literal"),
    ("", "end of input"),
    ("* x", "unexpected '*'"),
])
def test_parse_errors(src, fragment):
    with pytest.raises(ParseError) as err:
        parse_expression(src)
    assert fragment in str(err.value)
    d = err.value.to_dict()
    assert d["kind"] == "parse-error" and isinstance(d["offset"], int)


def test_parse_error_offset_points_at_token():
    with pytest.raises(ParseError) as err:
        parse_expression("x + foo(y)")
    assert err.value.offset == 4


def test_unknown_parameter():
    with pytest.raises(ParseError) as err:
        parse_expression("x + w", ["x", "y"])
    assert "unknown parameter 'w'" in str(err.value)
    assert err.value.offset == 4


def test_parameters_collected():
    assert parameters(parse_expression("x*cos(u) + sqrt(3)")) == {"x", "u"}


# evaluation and jets ------------------------------------------------------------


def test_reference_component_jet():
    jet = eval_jet(parse_expression("x*cos(u)"), {"x": 1.0, "u": 0.0})
    assert float(jet.value) == 1.0
    np.testing.assert_allclose(jet.grad, [1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(jet.hess, [[0.0, 0.0], [0.0, -1.0]], atol=1e-15)


def test_central_differences_agree():
    node = parse_expression("x^3*sin(u)")
    p0, step = np.array([2.0, 0.7]), 1e-5
    jet = eval_jet(node, {"x": p0[0], "u": p0[1]}, ["x", "u"])

    def grad(p):
        return eval_jet(node, {"x": p[0], "u": p[1]}, ["x", "u"]).grad

    for i in range(2):
        e = np.eye(2)[i] * step
        fd = (grad(p0 + e) - grad(p0 - e)) / (2 * step)
        np.testing.assert_allclose(jet.hess[i], fd, rtol=1e-6)


def test_linear_has_zero_hessian():
    jet = eval_jet(parse_expression("x+y"), {"x": 0.3, "y": -2.0})
    assert not jet.hess.any()


def test_batched_matches_pointwise():
    node = parse_expression("exp(x) * sin(y) / (2 + cos(x*y))")
    xs, ys = np.linspace(-1, 1, 5), np.linspace(0, 2, 5)
    batched = eval_jet(node, {"x": xs, "y": ys})
    for k in range(5):
        single = eval_jet(node, {"x": xs[k], "y": ys[k]})
        np.testing.assert_allclose(batched.hess[k], single.hess, rtol=1e-14)


def test_hessian_bitwise_symmetric():
    node = parse_expression("sin(x*y) * exp(z - x) / (2 + cos(y*z))^2")
    pts = np.random.default_rng(0).uniform(-1, 1, size=(50, 3))
    jet = eval_jet(node, {"x": pts[:, 0], "y": pts[:, 1], "z": pts[:, 2]})
    assert np.array_equal(jet.hess, np.swapaxes(jet.hess, -1, -2))


@pytest.mark.parametrize("src, point", [
    ("log(x)", {"x": -1.0}),
    ("log(x)", {"x": 0.0}),
    ("sqrt(x)", {"x": -0.5}),
    ("1 / x", {"x": 0.0}),
    ("x^-1", {"x": 0.0}),
    ("tan(x)", {"x": math.pi / 2}),
])
def test_domain_errors(src, point):
    with pytest.raises(DomainError) as err:
        eval_jet(parse_expression(src), point)
    assert err.value.to_dict()["kind"] == "domain-error"


def test_zero_power_is_one():
    jet = eval_jet(parse_expression("x^0"), {"x": 0.0})
    assert float(jet.value) == 1.0 and not jet.grad.any()


def test_jets_against_mpmath_sample():
    # the full 1000-expression sweep lives in the acceptance suite
    params = ["x", "y", "z"]
    point = [0.31, -0.42, 0.57]
    for src in random_expressions(60, seed=11):
        jet = eval_jet(parse_expression(src, params), dict(zip(params, point)), params)
        v, g, h = fd_jet(src, params, point)
        assert close(float(jet.value), v)
        assert all(close(a, b) for a, b in zip(jet.grad, g))
        assert all(close(a, b) for a, b in zip(np.ravel(jet.hess), np.ravel(h)))


# round trip ---------------------------------------------------------------------

_leaf = st.one_of(
    st.sampled_from(["x", "y"]).map(Param),
    # tiny constants make quotients astronomically large, where sin/cos lose all digits
    st.floats(-5, 5, allow_nan=False).filter(lambda c: c == 0 or abs(c) > 1e-3).map(Const),
)


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.tuples(st.sampled_from("+-*/"), children, children).map(lambda t: BinOp(*t)),
        st.tuples(children, st.integers(-3, 4)).map(lambda t: Pow(*t)),
        st.tuples(st.sampled_from(["sin", "cos", "exp", "tan", "log", "sqrt"]), children)
          .map(lambda t: Call(*t)),
    )


trees = st.recursive(_leaf, _extend, max_leaves=12)


def _fold(node):
    # negative constants print as "(-c)", which reads back as a negation
    if isinstance(node, Neg):
        inner = _fold(node.arg)
        return Const(-inner.value) if isinstance(inner, Const) else Neg(inner)
    if isinstance(node, BinOp):
        return BinOp(node.op, _fold(node.left), _fold(node.right))
    if isinstance(node, Pow):
        return Pow(_fold(node.base), node.exponent)
    if isinstance(node, Call):
        return Call(node.fn, _fold(node.arg))
    return node


@settings(max_examples=300, deadline=None)
@given(trees)
def test_print_parse_round_trip(tree):
    back = parse_expression(to_source(tree))
    assert _fold(back) == _fold(tree)
    assert to_source(back) == to_source(tree)


@settings(max_examples=100, deadline=None)
@given(trees)
def test_printed_source_agrees_with_python(tree):
    # the printed text, read by Python's parser, evaluates to the same value
    src = to_source(tree)
    ours = None
    try:
        ours = float(eval_jet(tree, {"x": 0.37, "y": -0.61}, ["x", "y"]).value)
    except DomainError:
        return
    if not math.isfinite(ours) or abs(ours) > 1e12:
        return
    try:
        ref = float(mp_function(src, ["x", "y"])(0.37, -0.61).real)
    except (ZeroDivisionError, ValueError, OverflowError):
        return
    assert close(ours, ref, 1e-9)
