import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modriemann.errors import DomainError, ExprSyntaxError, UnknownIdentifier
from modriemann.expr import FUNCTIONS, BinOp, Call, Neg, Num, Var, evaluate, parse, to_text


def ev(text, x):
    return evaluate(parse(text), x)


def test_examples():
    assert ev("2*x+1", 3) == 7
    assert abs(ev("sin(x)^2+cos(x)^2", 0.7) - 1) <= 1e-12
    assert ev("x^2", 0.5) == 0.25
    assert ev("exp(0)", 123.0) == 1


def test_syntax_error_offset():
    with pytest.raises(ExprSyntaxError) as e:
        parse("x*")
    assert e.value.offset == 2
    assert e.value.expected


@pytest.mark.parametrize(
    "text,offset",
    [("2x", 1), ("(x+1", 4), ("x ^", 3), ("sin x", 4), ("1 $ 2", 2), ("", 0), ("max(x)", 0)],
)
def test_syntax_errors(text, offset):
    with pytest.raises(ExprSyntaxError) as e:
        parse(text)
    assert e.value.offset == offset


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifier) as e:
        parse("x + y")
    assert e.value.name == "y" and e.value.offset == 4


@pytest.mark.parametrize("text", ["1/x", "log(x)", "log(x-1)", "sqrt(x-1)", "exp(1000*(x+1))"])
def test_domain_errors(text):
    with pytest.raises(DomainError):
        ev(text, 0.0)


def test_precedence_and_associativity():
    assert ev("-2^2", 0) == -4
    assert ev("2^3^2", 0) == 512
    assert ev("2^-1", 0) == 0.5
    assert ev("8/4/2", 0) == 1
    assert ev("8-4-2", 0) == 2
    assert ev("2+3*4", 0) == 14
    assert ev("(2+3)*4", 0) == 20
    assert ev("--x", 3) == 3
    assert ev("max(x, 2) - min(x, 2)", 5) == 3
    assert ev("abs(-x)", 2) == 2
    assert ev("pi", 0) == math.pi
    assert ev("1.5e1 + .5", 0) == 15.5


def test_variable_name():
    node = parse("sin(t)+t", "t")
    assert evaluate(node, 0.0) == 0
    with pytest.raises(UnknownIdentifier):
        parse("sin(x)", "t")


def test_vectorized():
    x = np.linspace(0, 1, 7)
    np.testing.assert_array_equal(ev("x^2", x), x**2)
    np.testing.assert_array_equal(ev("3", x), np.full(7, 3.0))
    with pytest.raises(DomainError):
        ev("log(x)", x)


def asts(variable="x"):
    leaves = st.one_of(
        st.floats(0, 1e6, allow_nan=False, allow_infinity=False).map(Num),
        st.just(Var(variable)),
    )

    def extend(children):
        unary = st.sampled_from([n for n, a in FUNCTIONS.items() if a == 1])
        binary = st.sampled_from([n for n, a in FUNCTIONS.items() if a == 2])
        return st.one_of(
            children.map(Neg),
            st.tuples(st.sampled_from("+-*/^"), children, children).map(lambda t: BinOp(*t)),
            st.tuples(unary, children).map(lambda t: Call(t[0], (t[1],))),
            st.tuples(binary, children, children).map(lambda t: Call(t[0], (t[1], t[2]))),
        )

    return st.recursive(leaves, extend, max_leaves=12)


@settings(max_examples=300)
@given(asts())
def test_round_trip(ast):
    assert parse(to_text(ast)) == ast


@given(asts(), st.floats(-10, 10))
def test_eval_deterministic(ast, x):
    try:
        a = evaluate(ast, x)
    except DomainError:
        with pytest.raises(DomainError):
            evaluate(ast, x)
        return
    assert math.isfinite(a)
    assert evaluate(ast, x) == a
