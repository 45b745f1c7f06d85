"""Shared hypothesis strategies."""

from hypothesis import strategies as st

from supercyc.expr import FUNCTIONS

literals = st.floats(min_value=0, max_value=1e3, allow_nan=False).map(lambda x: repr(x))
atoms = st.one_of(literals, st.sampled_from(["z", "i", "pi", "e"]))


def _combine(children):
    binop = st.tuples(children, st.sampled_from("+-*/"), children).map(
        lambda t: f"({t[0]}{t[1]}{t[2]})")
    call = st.tuples(st.sampled_from(FUNCTIONS), children).map(lambda t: f"{t[0]}({t[1]})")
    neg = children.map(lambda s: f"-{s}")
    power = st.tuples(children, st.integers(0, 4)).map(lambda t: f"({t[0]})^{t[1]}")
    return st.one_of(binop, call, neg, power)


expressions = st.recursive(atoms, _combine, max_leaves=12)

finite_points = st.complex_numbers(max_magnitude=50, allow_nan=False, allow_infinity=False)

GRAMMAR_CHARS = "z0123456789.eE+-*/^() ,ipxlogsncqrtajbm_!#"
