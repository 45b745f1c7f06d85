import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supercyc import dynamics as dyn
from supercyc.domains import circle, closed_disc, lattice, punctured_plane
from supercyc.expr import parse

# Arnold map theta + 0.3 + 0.05 sin(2 pi theta) / (2 pi): mean lift displacement
# over 10^6 steps from theta = 0, computed once with a plain float loop
ARNOLD_03_ORACLE = 0.2999277297


def arnold(omega, k=0.05):
    return lambda t: np.mod(t + omega + k * np.sin(2 * np.pi * t) / (2 * np.pi), 1.0)


@pytest.mark.parametrize("phi, z, limit", [("z/2", 1, 0), ("(z+1)/2", 0, 1)])
def test_converging_orbits(phi, z, limit):
    tr = dyn.iterate(phi, z, 60)
    assert tr.classification == dyn.CONVERGES
    assert abs(tr.limit - limit) < 1e-12
    if phi == "z/2":
        assert tr.residual < 1e-15


def test_involution_orbit_is_periodic():
    tr = dyn.iterate("-z", 1j, 10)
    assert tr.classification == dyn.PERIODIC and tr.period == 2


def test_escape_reports_step():
    tr = dyn.iterate("2*z", 0.3, 10, closed_disc())
    assert tr.classification == dyn.ESCAPING and tr.escape_step == 2
    tr = dyn.iterate("1/(z-1)", 2, 5)  # 2 -> 1 -> division by zero
    assert tr.classification == dyn.ESCAPING


def test_unresolved_orbit():
    tr = dyn.iterate("exp(i*2*pi*0.381966011250105)*z", 1, 50)
    assert tr.classification == dyn.UNRESOLVED


def test_orbit_csv_has_header_and_rows():
    text = dyn.orbit_csv(dyn.iterate("z/2", 1, 3))
    lines = text.strip().splitlines()
    assert len(lines) == 5 and lines[1].startswith("0,1")


@settings(max_examples=40)
@given(st.floats(0.05, 0.95), st.floats(0, 2 * math.pi), st.floats(-0.9, 0.9),
       st.sampled_from(["a*z", "(z+a)/(1+a*z)", "a*z*z+0.1", "z*exp(i*a)"]))
def test_orbit_consistency(r, t, a, template):
    phi = parse(template.replace("a", f"({a!r})"))
    tr = dyn.iterate(phi, r * complex(math.cos(t), math.sin(t)), 64)
    pts = np.array(tr.points, dtype=complex)
    again = np.array([phi(p) for p in pts[:-1]])
    assert np.all(np.abs(again - pts[1:]) <= 1e-12 * np.maximum(1, np.abs(pts[1:])))


@pytest.mark.parametrize("phi, expected", [
    ("z*z", [0, 1]),
    ("(z+0.5)/(1+0.5*z)", [-1, 1]),  # z^2 = 1
])
def test_fixed_points(phi, expected):
    got = sorted(dyn.find_fixed_points(phi, closed_disc()), key=lambda z: z.real)
    assert len(got) == len(expected)
    assert all(abs(g - e) < 1e-10 for g, e in zip(got, expected))


def test_translation_has_no_fixed_points_on_lattice():
    assert dyn.find_fixed_points("z+1", lattice(-8, 8)) == []


@settings(max_examples=25)
@given(st.floats(-0.8, 0.8), st.floats(-0.8, 0.8), st.floats(0.05, 0.7))
def test_fixed_point_residuals(br, bi, c):
    phi = parse(f"({c!r})*z*z+({br!r}+({bi!r})*i)*({c!r})")
    for z in dyn.find_fixed_points(phi, closed_disc(radius=2)):
        assert abs(phi(z) - z) < 1e-10


def test_periodic_points_of_involution():
    found = dyn.find_periodic_points("-z", circle(), 4)
    assert found and all(p == 2 for _, p in found)


def test_global_attractor_has_no_periodic_points():
    assert dyn.find_periodic_points("z/2", closed_disc(), 6) == []


def test_quarter_rotation_period_four():
    found = dyn.find_periodic_points("i*z", circle(), 6)
    assert found and {p for _, p in found} == {4}


@pytest.mark.parametrize("phi", ["-z", "i*z", "exp(2*pi*i/3)*z", "exp(2*pi*i/5)*z*z*z*z*z*z"])
def test_period_minimality(phi):
    e = parse(phi)
    for z, p in dyn.find_periodic_points(e, circle(), 6):
        w = z
        for q in range(1, p + 1):
            w = e(w)
            if p % q == 0 and q < p:
                assert abs(w - z) >= dyn.PERIOD_TOL
        assert abs(w - z) < 1e-8


@pytest.mark.parametrize("phi, q, kind", [
    ("(z+1)/2", 1, "boundary"),
    ("z/2", 0, "interior"),
    ("(z+0.5)/(1+0.5*z)", 1, "boundary"),
])
def test_denjoy_wolff(phi, q, kind):
    dw = dyn.denjoy_wolff_point(phi, closed_disc())
    assert dw.applicable and abs(dw.point - q) < 1e-6 and dw.kind == kind


@pytest.mark.parametrize("phi", ["z", "exp(i*0.7)*z"])
def test_denjoy_wolff_not_applicable(phi):
    assert not dyn.denjoy_wolff_point(phi, closed_disc()).applicable


@settings(max_examples=15)
@given(st.lists(st.complex_numbers(max_magnitude=0.9), min_size=5, max_size=8))
def test_denjoy_wolff_seed_independence(seeds):
    dw = dyn.denjoy_wolff_point("(z+0.5)/(1+0.5*z)", closed_disc(), seeds=seeds, n=4000)
    assert dw.applicable and abs(dw.point - 1) < 1e-6


@pytest.mark.parametrize("phi, z0, r", [("z/2", 0, 0.3), ("z*z", 0, 0.5)])
def test_stable_orbits(phi, z0, r):
    assert dyn.stable_orbit_check(phi, closed_disc(resolution=32), z0, [r]) == [True]


def test_stable_orbit_precondition():
    with pytest.raises(dyn.PreconditionError):
        dyn.stable_orbit_check("2*z", punctured_plane(), 1, [0.1])


def _ball(r, n=12):
    t = np.linspace(0, 2 * np.pi, n, endpoint=False)
    return np.concatenate([[0], (r * np.outer([1 / 3, 2 / 3, 1], np.exp(1j * t))).ravel()])


def test_runaway_examples():
    assert dyn.strongly_runaway_check("(z+0.5)/(1+0.5*z)", closed_disc(), _ball(0.3), 64).runaway
    assert not dyn.strongly_runaway_check("z/2", closed_disc(), _ball(0.3), 64).runaway
    arc = np.exp(1j * np.linspace(-0.3, 0.3, 9))
    assert not dyn.strongly_runaway_check("i*z", circle(), arc, 64).runaway


@settings(max_examples=20)
@given(st.floats(0, 1, exclude_max=True), st.integers(1, 5))
def test_rigid_rotation_powers(rho, k):
    phi = f"exp(2*pi*i*{k * rho!r})*z"
    got = dyn.rotation_number(phi, 2000).rotation_number
    want = (k * rho) % 1.0
    assert min(abs(got - want), 1 - abs(got - want)) < 1e-6


def test_rigid_rotation_point_three():
    rd = dyn.rotation_number("exp(2*pi*i*0.3)*z")
    assert abs(rd.rotation_number - 0.3) < 1e-6
    assert rd.likely_rational  # 3/10


def test_arnold_against_long_orbit_oracle():
    rd = dyn.rotation_number(arnold(0.3))
    assert abs(rd.rotation_number - ARNOLD_03_ORACLE) < 1e-4


def test_fixed_point_forces_zero_rotation():
    rd = dyn.rotation_number(lambda t: np.mod(t + 0.1 * np.sin(np.pi * t) ** 2, 1.0))
    assert rd.rotation_number < 1e-3 or rd.rotation_number > 1 - 1e-3


@pytest.mark.parametrize("phi", ["z*z", "conj(z)", "z+0.9*z*z"])
def test_non_homeomorphisms_rejected(phi):
    with pytest.raises(dyn.NotHomeomorphismError):
        dyn.rotation_number(phi, 10)
