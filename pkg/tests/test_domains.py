import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from supercyc.domains import (INFINITY, DomainError, Kind, build_grid, circle, closed_disc,
                              compactified_lattice, lattice, limit_at_infinity, punctured_disc,
                              punctured_plane, self_map_check)

kinds = st.sampled_from(["closed_disc", "circle", "punctured_disc", "punctured_plane"])


@given(kinds, st.integers(8, 40))
def test_grid_is_deterministic(kind, res):
    assert build_grid(kind, resolution=res).serialize() == \
        build_grid(kind, resolution=res).serialize()


@given(kinds, st.integers(8, 40))
def test_every_grid_point_is_a_member(kind, res):
    d = build_grid(kind, resolution=res)
    assert all(d.contains(p) for p in d.grid)


@given(st.integers(-50, 0), st.integers(1, 50))
def test_lattice_members(lo, hi):
    for d in (lattice(lo, hi), compactified_lattice(lo, hi)):
        assert all(d.contains(p) for p in d.grid)


@pytest.mark.parametrize("d", [punctured_disc(cutoff=0.05), punctured_plane(cutoff=0.1)])
def test_punctured_grids_avoid_origin(d):
    assert np.min(np.abs(d.points)) >= d.params["cutoff"] - 1e-15
    assert not d.contains(0)


def test_infinity_only_in_compactified_lattice():
    assert compactified_lattice(0, 8).grid[-1] is INFINITY
    assert compactified_lattice(0, 8).contains(INFINITY)
    assert not lattice(0, 8).contains(INFINITY)
    assert not closed_disc().contains(INFINITY)
    assert len(compactified_lattice(0, 8)) == 10


def test_compactness_flags():
    assert closed_disc().is_compact and circle().is_compact
    assert compactified_lattice().is_compact
    assert not lattice().is_compact and not punctured_plane().is_compact


def test_refined_doubles_resolution():
    d = closed_disc(resolution=16).refined(2)
    assert d.params["resolution"] == 32 and d.params["rings"] == 16


@pytest.mark.parametrize("kind, params", [
    ("closed_disc", {"radius": -1}),
    ("circle", {"resolution": 1}),
    ("punctured_disc", {"cutoff": 0.7}),
    ("punctured_plane", {"cutoff": 2, "outer": 1}),
    ("lattice", {"lo": 3, "hi": 3}),
    ("closed_disc", {"colour": 3}),
])
def test_bad_parameters(kind, params):
    with pytest.raises(DomainError):
        build_grid(kind, **params)


def test_unknown_kind():
    with pytest.raises(ValueError):
        build_grid("annulus")


@pytest.mark.parametrize("d, phi, ok", [
    (closed_disc(), "z/2", True),
    (closed_disc(), "2*z", False),
    (circle(), "-z", True),
    (circle(), "z/2", False),
    (punctured_disc(), "z/(2-z)", True),
    (punctured_plane(), "1/z", True),
    (lattice(-4, 4), "z+1", True),
    (compactified_lattice(0, 8), "z+1", True),
])
def test_self_map_check(d, phi, ok):
    assert self_map_check(d, phi).ok is ok


def test_self_map_violations_name_points():
    rep = self_map_check(closed_disc(resolution=8, rings=8), "z+1")
    assert rep.violations and all(abs(img) > 1 for _, img in rep.violations)


def test_limit_at_infinity():
    assert limit_at_infinity([1 / (n + 1) for n in range(4)]) is None
    assert limit_at_infinity([1.0] * 16) == 1
    assert Kind("circle") is Kind.CIRCLE
