"""Concrete spaces X with finite sampling grids.

Continuous kinds (discs, circles, punctured domains) sample complex points;
lattice kinds sample integers.  ``CompactifiedLattice`` adds the point at
infinity of the Alexandroff compactification; symbols are extended to it by
``phi(inf) = inf``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .expr import Expression, as_expression

__all__ = [
    "Kind", "INFINITY", "DomainSpec", "DomainError", "SelfMapReport",
    "build_grid", "contains", "self_map_check", "apply_symbol",
    "closed_disc", "circle", "punctured_disc", "punctured_plane",
    "lattice", "compactified_lattice", "limit_at_infinity",
]

DEFAULT_TOLERANCE = 1e-9
MIN_RESOLUTION = 8


class DomainError(ValueError):
    pass


class Kind(str, enum.Enum):
    CLOSED_DISC = "closed_disc"
    CIRCLE = "circle"
    PUNCTURED_DISC = "punctured_disc"
    PUNCTURED_PLANE = "punctured_plane"
    LATTICE = "lattice"
    COMPACTIFIED_LATTICE = "compactified_lattice"


class _Infinity:
    """The added point of the one-point compactification of a lattice."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()

COMPACT_KINDS = frozenset({Kind.CLOSED_DISC, Kind.CIRCLE, Kind.COMPACTIFIED_LATTICE})
LATTICE_KINDS = frozenset({Kind.LATTICE, Kind.COMPACTIFIED_LATTICE})


@dataclass(frozen=True, eq=False)
class DomainSpec:
    kind: Kind
    params: dict
    points: np.ndarray = field(repr=False)
    tolerance: float = DEFAULT_TOLERANCE
    has_infinity: bool = False

    @property
    def is_compact(self) -> bool:
        return self.kind in COMPACT_KINDS

    @property
    def is_lattice(self) -> bool:
        return self.kind in LATTICE_KINDS

    @property
    def grid(self) -> list:
        """Grid as a list of domain points (complex, int or INFINITY)."""
        if self.is_lattice:
            pts = [int(p) for p in self.points]
        else:
            pts = [complex(p) for p in self.points]
        if self.has_infinity:
            pts.append(INFINITY)
        return pts

    def __len__(self) -> int:
        return len(self.points) + int(self.has_infinity)

    def contains(self, p) -> bool:
        return contains(self, p)

    def contains_many(self, zs) -> np.ndarray:
        return _contains_array(self, np.asarray(zs, dtype=complex))

    def scale(self) -> float:
        """Characteristic size of the sampled region (used to scale radii)."""
        if self.is_lattice:
            return 1.0
        return float(np.max(np.abs(self.points)))

    def refined(self, factor: int = 2) -> "DomainSpec":
        params = dict(self.params)
        for key in ("resolution", "rings"):
            if key in params:
                params[key] = params[key] * factor
        return build_grid(self.kind, tolerance=self.tolerance, **params)

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value, **self.params, "tolerance": self.tolerance}
        if self.is_lattice:
            d["grid"] = [int(p) for p in self.points]
        else:
            d["grid"] = [[float(p.real), float(p.imag)] for p in self.points]
        if self.has_infinity:
            d["grid"].append("inf")
        return d

    def serialize(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def __eq__(self, other) -> bool:
        return isinstance(other, DomainSpec) and self.serialize() == other.serialize()

    def __hash__(self) -> int:
        return hash(self.serialize())


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise DomainError(f"{name} must be positive, got {value}")
    return value


def _resolution(value: int, name: str = "resolution") -> int:
    value = int(value)
    if value < MIN_RESOLUTION:
        raise DomainError(f"{name} must be at least {MIN_RESOLUTION}, got {value}")
    return value


def _angles(n: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(n) / n)


def _polar(radii: np.ndarray, n_angles: int) -> np.ndarray:
    return (radii[:, None] * _angles(n_angles)[None, :]).ravel()


def build_grid(kind, *, tolerance: float = DEFAULT_TOLERANCE, **params) -> DomainSpec:
    """Build a deterministic sampling grid.

    Parameters by kind:

    * closed_disc: radius=1, resolution=16 (angles), rings=resolution//2
    * circle: radius=1, resolution=16
    * punctured_disc: cutoff=0.05, resolution=16, rings=resolution//2
    * punctured_plane: cutoff=0.1, outer=10, resolution=16, rings=resolution//2
    * lattice / compactified_lattice: lo, hi (inclusive); compactified adds
      ``infinity=True`` by default
    """
    kind = Kind(kind)
    tolerance = _positive("tolerance", tolerance)
    has_inf = False
    if kind in (Kind.CLOSED_DISC, Kind.CIRCLE, Kind.PUNCTURED_DISC, Kind.PUNCTURED_PLANE):
        res = _resolution(params.get("resolution", 16))
        clean = {"resolution": res}
        if kind in (Kind.CLOSED_DISC, Kind.CIRCLE):
            radius = _positive("radius", params.get("radius", 1.0))
            clean["radius"] = radius
        if kind != Kind.CIRCLE:
            rings = _resolution(params.get("rings", max(MIN_RESOLUTION, res // 2)), "rings")
            clean["rings"] = rings
        if kind == Kind.CIRCLE:
            pts = radius * _angles(res)
        elif kind == Kind.CLOSED_DISC:
            radii = radius * np.arange(1, rings + 1) / rings
            pts = np.concatenate([[0j], _polar(radii, res)])
        elif kind == Kind.PUNCTURED_DISC:
            cutoff = _positive("cutoff", params.get("cutoff", 0.05))
            if cutoff >= 0.5:
                raise DomainError("punctured disc cutoff must be below 0.5")
            clean["cutoff"] = cutoff
            pts = _polar(np.linspace(cutoff, 1.0 - cutoff, rings), res)
        else:
            cutoff = _positive("cutoff", params.get("cutoff", 0.1))
            outer = _positive("outer", params.get("outer", 10.0))
            if outer <= cutoff:
                raise DomainError("punctured plane needs outer > cutoff")
            clean.update(cutoff=cutoff, outer=outer)
            pts = _polar(np.geomspace(cutoff, outer, rings), res)
        points = np.asarray(pts, dtype=complex)
    else:
        lo = int(params.get("lo", -16))
        hi = int(params.get("hi", 16))
        if hi <= lo:
            raise DomainError(f"empty or single-point lattice range [{lo}, {hi}]")
        clean = {"lo": lo, "hi": hi}
        if kind == Kind.COMPACTIFIED_LATTICE:
            has_inf = bool(params.get("infinity", True))
            clean["infinity"] = has_inf
        points = np.arange(lo, hi + 1, dtype=np.int64)
    unknown = set(params) - set(clean) - {"resolution", "rings"}
    if unknown:
        raise DomainError(f"unknown parameters for {kind.value}: {sorted(unknown)}")
    return DomainSpec(kind, clean, points, tolerance, has_inf)


def closed_disc(radius=1.0, resolution=16, rings=None, **kw) -> DomainSpec:
    return build_grid(Kind.CLOSED_DISC, radius=radius, resolution=resolution,
                      **({"rings": rings} if rings else {}), **kw)


def circle(radius=1.0, resolution=16, **kw) -> DomainSpec:
    return build_grid(Kind.CIRCLE, radius=radius, resolution=resolution, **kw)


def punctured_disc(cutoff=0.05, resolution=16, rings=None, **kw) -> DomainSpec:
    return build_grid(Kind.PUNCTURED_DISC, cutoff=cutoff, resolution=resolution,
                      **({"rings": rings} if rings else {}), **kw)


def punctured_plane(cutoff=0.1, outer=10.0, resolution=16, rings=None, **kw) -> DomainSpec:
    return build_grid(Kind.PUNCTURED_PLANE, cutoff=cutoff, outer=outer,
                      resolution=resolution, **({"rings": rings} if rings else {}), **kw)


def lattice(lo=-16, hi=16, **kw) -> DomainSpec:
    return build_grid(Kind.LATTICE, lo=lo, hi=hi, **kw)


def compactified_lattice(lo=-16, hi=16, infinity=True, **kw) -> DomainSpec:
    return build_grid(Kind.COMPACTIFIED_LATTICE, lo=lo, hi=hi, infinity=infinity, **kw)


# --------------------------------------------------------------------------
# membership


def _contains_array(d: DomainSpec, z: np.ndarray) -> np.ndarray:
    tol = d.tolerance
    finite = np.isfinite(z)
    r = np.abs(np.where(finite, z, 0))
    k = d.kind
    if k == Kind.CLOSED_DISC:
        return finite & (r <= d.params["radius"] + tol)
    if k == Kind.CIRCLE:
        return finite & (np.abs(r - d.params["radius"]) <= tol)
    if k == Kind.PUNCTURED_DISC:
        return finite & (r > tol) & (r < 1.0 + tol)
    if k == Kind.PUNCTURED_PLANE:
        return finite & (r > tol)
    zf = np.where(finite, z, 0)
    return finite & (np.abs(zf.imag) <= tol) & (np.abs(zf.real - np.round(zf.real)) <= tol)


def contains(d: DomainSpec, p) -> bool:
    """Membership within ``d.tolerance``; INFINITY only in compactified lattices."""
    if p is INFINITY:
        return d.kind == Kind.COMPACTIFIED_LATTICE and d.has_infinity
    try:
        z = complex(p)
    except (TypeError, ValueError):
        return False
    return bool(_contains_array(d, np.array([z]))[0])


# --------------------------------------------------------------------------
# applying a symbol


def apply_symbol(phi, d: DomainSpec, zs) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate ``phi`` on points of ``d``.

    Lattice images are snapped to integers when within tolerance.  The point
    at infinity is encoded as ``complex(inf, 0)`` and is mapped to itself.
    Returns ``(images, ok)``.
    """
    phi = as_expression(phi)
    z = np.asarray(zs, dtype=complex)
    is_inf = np.isinf(z.real) & (z.imag == 0)
    vals, ok = phi.evaluate_many(np.where(is_inf, 0, z))
    if d.is_lattice:
        snapped = np.round(vals.real) + 0j
        near = ok & (np.abs(vals - snapped) <= d.tolerance)
        vals = np.where(near, snapped, vals)
        if d.has_infinity:
            vals = np.where(is_inf, complex(np.inf, 0), vals)
            ok = ok | is_inf
    return vals, ok


def _point_array(d: DomainSpec) -> np.ndarray:
    z = d.points.astype(complex)
    if d.has_infinity:
        z = np.append(z, complex(np.inf, 0))
    return z


def to_point(d: DomainSpec, z: complex):
    """Convert an internal complex value back to a domain point."""
    if d.is_lattice:
        if np.isinf(z.real):
            return INFINITY
        return int(round(z.real))
    return complex(z)


def from_point(p) -> complex:
    if p is INFINITY:
        return complex(np.inf, 0)
    return complex(p)


@dataclass
class SelfMapReport:
    violations: list  # (point, image or None)

    @property
    def ok(self) -> bool:
        return not self.violations


def self_map_check(d: DomainSpec, phi) -> SelfMapReport:
    """Report grid points whose image leaves X (or cannot be evaluated)."""
    z = _point_array(d)
    img, ok = apply_symbol(phi, d, z)
    inside = _contains_array(d, img) | (np.isinf(img.real) & d.has_infinity)
    bad = ~(ok & inside)
    violations = []
    for idx in np.flatnonzero(bad):
        image = None if not ok[idx] else complex(img[idx])
        violations.append((to_point(d, z[idx]), image))
    return SelfMapReport(violations)


def limit_at_infinity(values, tol: float = 1e-8):
    """Estimate the value at infinity of a lattice function.

    ``values`` are samples ordered by increasing ``|n|`` (both ends of a
    bilateral range may be interleaved).  Returns the tail mean when the last
    quarter of the samples is Cauchy within ``tol``, else ``None``.
    """
    v = np.asarray(values, dtype=complex)
    if v.size < 4:
        return None
    tail = v[-max(2, v.size // 4):]
    spread = np.max(np.abs(tail[:, None] - tail[None, :]))
    if spread > tol:
        return None
    return complex(tail.mean())
