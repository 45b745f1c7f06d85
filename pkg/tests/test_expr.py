import cmath
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supercyc.expr import EvaluationError, ExpressionError, parse, unparse

from strategies import GRAMMAR_CHARS, expressions, finite_points


@pytest.mark.parametrize("src, z, expected", [
    ("z/2", 1, 0.5),
    ("(z+0.5)/(1+0.5*z)", 0, 0.5),
    ("-z^2", 2, -4),
    ("2^3^2", 0, 512),
    ("exp(i*pi)", 0, -1),
    ("2^-1", 0, 0.5),
    ("conj(z)", 1 + 2j, 1 - 2j),
    ("abs(z)+arg(z)", -1, 1 + math.pi),
    ("re(z)*im(z)", 3 + 4j, 12),
    ("sqrt(z)", -4, 2j),
    ("1.5e2", 0, 150),
    ("log(z)", -1, 1j * math.pi),
])
def test_evaluate_known_values(src, z, expected):
    assert abs(parse(src)(z) - expected) < 1e-12


@pytest.mark.parametrize("src, offset", [
    ("z+", 2),
    ("2z", 1),
    ("foo(z)", 0),
    ("exp z", 4),
    ("(z", 2),
    ("z)", 1),
    ("sin(z, 1)", 5),
    ("z $ 1", 2),
    ("", 0),
    ("1e999", 0),
])
def test_rejections_carry_offset(src, offset):
    with pytest.raises(ExpressionError) as info:
        parse(src)
    assert info.value.offset == offset


@pytest.mark.parametrize("src, z", [("1/z", 0), ("log(z)", 0), ("exp(z)", 1000),
                                    ("arg(z)", 0), ("z^-1", 0)])
def test_evaluation_failures_raise(src, z):
    with pytest.raises(EvaluationError):
        parse(src)(z)


def test_vectorised_flags_failures():
    vals, ok = parse("1/z").evaluate_many(np.array([0, 2, 1j]))
    assert ok.tolist() == [False, True, True]
    assert np.isnan(vals[0])
    assert vals[1] == 0.5


def test_mp_evaluation_matches_double():
    e = parse("exp(z)+exp(1/z)")
    z = 0.3 + 0.4j
    assert abs(complex(e.evaluate_mp(z)) - e(z)) < 1e-14


@given(expressions)
def test_round_trip_is_stable(src):
    tree = parse(src).ast
    assert parse(unparse(tree)).ast == tree


@given(expressions, finite_points)
def test_scalar_and_vector_agree(src, z):
    e = parse(src)
    vals, ok = e.evaluate_many(np.array([z]))
    try:
        v = e(z)
    except EvaluationError:
        assert not ok[0]
        return
    if ok[0]:
        assert cmath.isclose(vals[0], v, rel_tol=1e-9, abs_tol=1e-9)


@given(expressions, finite_points)
def test_no_silent_non_finite_values(src, z):
    vals, ok = parse(src).evaluate_many(np.array([z, z]))
    assert np.all(np.isfinite(vals[ok]))
    assert ok[0] == ok[1]
    if ok[0]:
        assert vals[0] == vals[1]


@given(finite_points)
def test_variable_is_exact(z):
    assert parse("z")(z) == z


@given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6), finite_points)
def test_literal_sum(a, b, z):
    lhs = parse(f"{a!r}+{b!r}")(z)
    assert lhs == pytest.approx(parse(repr(a))(z) + parse(repr(b))(z), rel=1e-15, abs=1e-300)


@settings(max_examples=300)
@given(st.text(alphabet=GRAMMAR_CHARS, max_size=512))
def test_fuzz_grammar_alphabet(src):
    try:
        parse(src)
    except ExpressionError as exc:
        assert 0 <= exc.offset <= len(src)


@given(st.text(max_size=512))
def test_fuzz_arbitrary_text(src):
    try:
        parse(src)
    except ExpressionError as exc:
        assert 0 <= exc.offset <= len(src)


def fuzz_corpus(n, seed=7):
    rng = random.Random(seed)
    for _ in range(n):
        yield "".join(rng.choice(GRAMMAR_CHARS) for _ in range(rng.randint(0, 512)))


def test_fuzz_ten_thousand_inputs():
    for src in fuzz_corpus(10_000):
        try:
            parse(src)
        except ExpressionError as exc:
            assert 0 <= exc.offset <= len(src)
