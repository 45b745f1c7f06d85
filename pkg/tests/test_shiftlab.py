import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supercyc import shiftlab as sl
from supercyc.criteria import Conclusion

B = sl.ShiftOperator.bilateral()
B_HARMONIC = sl.ShiftOperator.weighted()  # w_j = 1/(j+1)
B_DYADIC = sl.ShiftOperator.weighted(lambda j: 2.0 ** -(j % 5))

small_ints = st.integers(-64, 64).map(float)
dyadic = st.integers(-16, 16).map(lambda k: k / 8)


@st.composite
def vectors(draw, space="c0Z", min_lo=-20):
    lo = draw(st.integers(min_lo, 20))
    entries = draw(st.lists(small_ints, min_size=1, max_size=24))
    return sl.SeqVector(lo, entries, space)


def test_bilateral_moves_basis_vector():
    assert sl.apply_shift(B, sl.SeqVector.basis(5)).equals(sl.SeqVector.basis(4))


def test_bilateral_square_on_indicator():
    assert sl.apply_shift(B, sl.SeqVector.indicator(0, 3), 2).equals(sl.SeqVector.indicator(-2, 1))


def test_weighted_product_of_weights():
    g = sl.apply_shift(B_HARMONIC, sl.SeqVector.basis(2, "c0N"), 2)
    assert g.support == (0, 0) and abs(g[0] - 1 / 6) < 1e-15
    assert sl.apply_shift(B_HARMONIC, sl.SeqVector.basis(0, "c0N")).equals(sl.SeqVector.zero("c0N"))


def test_weighted_shift_rederives_space():
    ones = sl.SeqVector(0, np.ones(8), "cInfN", limit=1)
    assert sl.apply_shift(B_HARMONIC, ones).space == "c0N"
    assert sl.apply_shift(B, sl.SeqVector.basis(0, "cInfZ")).space == "cInfZ"


def test_negative_power_rejected():
    with pytest.raises(ValueError):
        sl.apply_shift(B, sl.SeqVector.basis(0), -1)


@given(vectors(), vectors(), dyadic, dyadic, st.integers(0, 40))
def test_bilateral_linearity_is_exact(f, g, a, b, n):
    lhs = sl.apply_shift(B, f * a + g * b, n)
    rhs = sl.apply_shift(B, f, n) * a + sl.apply_shift(B, g, n) * b
    assert lhs.equals(rhs)


@given(vectors("c0N", 0), vectors("c0N", 0), dyadic, dyadic, st.integers(0, 30))
def test_weighted_linearity_is_exact(f, g, a, b, n):
    lhs = sl.apply_shift(B_DYADIC, f * a + g * b, n)
    rhs = sl.apply_shift(B_DYADIC, f, n) * a + sl.apply_shift(B_DYADIC, g, n) * b
    assert lhs.equals(rhs)


@given(vectors(), st.integers(0, 20), st.integers(0, 20))
def test_bilateral_semigroup_law_is_exact(f, m, n):
    assert sl.apply_shift(B, f, m + n).equals(sl.apply_shift(B, sl.apply_shift(B, f, m), n))


@given(vectors("c0N", 0), st.integers(0, 20), st.integers(0, 20),
       st.sampled_from([B_HARMONIC, B_DYADIC]))
def test_weighted_semigroup_law_is_exact(f, m, n, T):
    assert sl.apply_shift(T, f, m + n).equals(sl.apply_shift(T, sl.apply_shift(T, f, m), n))


@given(vectors())
def test_bilateral_is_isometric(f):
    assert sl.apply_shift(B, f).sup_norm() == f.sup_norm()


def test_single_target_certificate():
    cert = sl.construct_supercyclic_vector([sl.SeqVector(-2, [0, 0, 1, 0, 0])], [1e-2])
    assert len(cert.approximations) == 1
    assert cert.max_error < 1e-9
    assert cert.vector.satisfies_decay_proxy()


targets = st.lists(
    st.builds(lambda lo, e: sl.SeqVector(lo, e), st.integers(-6, 0),
              st.lists(st.complex_numbers(max_magnitude=10), min_size=1, max_size=7)),
    min_size=1, max_size=4)


@settings(max_examples=40)
@given(targets)
def test_certificate_soundness(ts):
    cert = sl.construct_supercyclic_vector(ts)
    # re-verify with an independent shift of the stored vector
    for a, (lo, hi), g in zip(cert.approximations, cert.windows, ts):
        moved = sl.SeqVector(cert.vector.lo - a.n, cert.vector.entries)
        err = np.max(np.abs(a.lam * moved.window(lo, hi) - g.window(lo, hi)))
        assert err < 1e-9
    assert max(cert.verify(ts)) < 1e-9


def test_construction_errors():
    with pytest.raises(ValueError):
        sl.construct_supercyclic_vector([])
    with pytest.raises(sl.ScheduleError):
        sl.construct_supercyclic_vector([sl.SeqVector.basis(0)] * 2, [1e-2, 1e-3])
    with pytest.raises(sl.BudgetError):
        sl.construct_supercyclic_vector([sl.SeqVector.basis(0), sl.SeqVector.basis(50)],
                                        budget=64)


def test_search_cross_validates_certificate():
    ts = [sl.SeqVector(-1, [1, 2, 3]), sl.SeqVector(-2, [1j, 0, 0, 0, 1])]
    cert = sl.construct_supercyclic_vector(ts)
    for j, g in enumerate(ts):
        res = sl.witness_search(B, cert.vector, g, cert.windows[j], cert.vector.hi + 4)
        assert abs(res.error - cert.approximations[j].error) < 1e-12


def test_search_examples():
    f = sl.SeqVector(-3, [1, 2, 3, 4, 5, 6, 7])
    res = sl.witness_search(B, f, f, (-3, 3), 10)
    assert (res.n, res.lam, res.error) == (0, 1, 0)
    res = sl.witness_search(B, f, sl.SeqVector.zero(), (-2, 2), 10)
    assert res.n == 0 and res.lam == 0 and res.error == 0
    res = sl.witness_search(B, sl.SeqVector.basis(0), sl.SeqVector.basis(1), (-2, 2), 64)
    assert res.error == 1


@given(vectors(), vectors(), st.integers(0, 20), st.integers(0, 20))
def test_search_monotone_in_horizon(f, g, n1, extra):
    w = g.support
    a = sl.witness_search(B, f, g, w, n1)
    b = sl.witness_search(B, f, g, w, n1 + extra)
    assert b.error <= a.error


@pytest.mark.parametrize("codim, inside, expected", [
    (2, True, Conclusion.NOT_CYCLIC), (1, True, Conclusion.INCONCLUSIVE),
    (2, False, Conclusion.INCONCLUSIVE),
])
def test_cyclicity_structure(codim, inside, expected):
    v = sl.cyclicity_structure_check(codim, inside)
    assert v.conclusion == expected
    assert v.citation == ("Lemma 15" if expected == Conclusion.NOT_CYCLIC else "")


def test_preimages():
    g = sl.preimage_in_cinf(B_HARMONIC, sl.SeqVector.basis(0, "c0N"))
    assert g is not None and g.limit == 0 and abs(g[1] - 2) < 1e-15
    ws = B_HARMONIC.weights(1, 512)
    g = sl.preimage_in_cinf(B_HARMONIC, sl.SeqVector(0, ws, "c0N"))
    assert g is not None and abs(g.limit - 1) < 1e-12
    assert sl.apply_shift(B_HARMONIC, g).window(0, 500) == pytest.approx(ws[:501])
    assert sl.preimage_in_cinf(B_HARMONIC, sl.SeqVector(0, np.ones(512), "cInfN")) is None
    with pytest.raises(ValueError):
        sl.preimage_in_cinf(B, sl.SeqVector.basis(0))


def test_multiplication_fits():
    v = sl.multiplication_example(16, 24, degrees=[1, 2, 4, 8, 12])
    assert str(v) == "NotTauPSupercyclic [Example 17]"
    fits = {t: dict(rows) for t, rows in v.evidence["fits"].items()}
    assert fits["exp(z)"][12] < 1e-9  # Taylor remainder e/13!
    assert fits["z"][1] < 1e-14
    inv = fits["1/(2-z)"]
    for k in (2, 4, 8, 12):
        assert inv[k] <= 2.0 ** -k * 2  # geometric remainder 2^-k / (2 - 1)
    with pytest.raises(ValueError):
        sl.multiplication_example(16, 41)


def test_decay_proxy_and_tail_limit():
    assert sl.decay_proxy(np.array([0, 0, 1, 2, 1, 0, 0] + [0] * 13))
    assert not sl.decay_proxy(np.ones(20))
    assert sl.tail_limit(np.ones(40)) == 1
    assert sl.tail_limit(np.arange(40.0)) is None
