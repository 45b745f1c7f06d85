"""Iteration of symbols: orbits, fixed and periodic points, Denjoy-Wolff
limits, stable orbits, runaway behaviour and circle rotation numbers."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from scipy.spatial import cKDTree

from .domains import (INFINITY, DomainSpec, Kind, apply_symbol, from_point,
                      to_point, _point_array)
from .expr import Expression, as_expression

__all__ = [
    "OrbitTrace", "RotationData", "DenjoyWolff", "RunawayResult",
    "PreconditionError", "NotHomeomorphismError",
    "iterate", "iterate_many", "find_fixed_points", "find_periodic_points",
    "denjoy_wolff_point", "stable_orbit_check", "strongly_runaway_check",
    "rotation_number", "orbit_csv", "rotation_csv",
]

CAUCHY_TOL = 1e-9
CAUCHY_WINDOW = 10
PERIOD_TOL = 1e-8
MAX_PERIOD = 16
BURN_IN = 64
FIXED_TOL = 1e-10
ESCAPE_RADIUS = 1e150


class PreconditionError(ValueError):
    pass


class NotHomeomorphismError(ValueError):
    pass


CONVERGES = "ConvergesTo"
PERIODIC = "PeriodicWithPeriod"
ESCAPING = "Escaping"
UNRESOLVED = "Unresolved"


@dataclass
class OrbitTrace:
    start: object
    points: list
    classification: str
    limit: object = None
    period: Optional[int] = None
    residual: float = math.nan
    escape_step: Optional[int] = None

    def __str__(self) -> str:
        if self.classification == CONVERGES:
            return f"ConvergesTo({self.limit})"
        if self.classification == PERIODIC:
            return f"PeriodicWithPeriod({self.period})"
        if self.classification == ESCAPING:
            return f"Escaping(step {self.escape_step})"
        return UNRESOLVED


# --------------------------------------------------------------------------
# orbits


def _step(phi: Expression, d: Optional[DomainSpec], z: np.ndarray):
    if d is None:
        vals, ok = phi.evaluate_many(z)
        return vals, ok
    vals, ok = apply_symbol(phi, d, z)
    ok &= d.contains_many(vals) | (np.isinf(vals.real) & d.has_infinity)
    return vals, ok


def iterate_many(phi, zs, n: int, domain: Optional[DomainSpec] = None):
    """Iterate ``phi`` from several seeds at once.

    Returns ``(orbits, escape)`` where ``orbits`` has shape ``(n+1, seeds)``
    (NaN after an escape) and ``escape[s]`` is the first step at which seed
    ``s`` failed, or -1.
    """
    phi = as_expression(phi)
    z = np.array(zs, dtype=complex).ravel()
    out = np.full((n + 1, z.size), complex("nan+nanj"))
    out[0] = z
    escape = np.full(z.size, -1)
    alive = np.ones(z.size, dtype=bool)
    cur = z.copy()
    for k in range(1, n + 1):
        if not alive.any():
            break
        vals, ok = _step(phi, domain, np.where(alive, cur, 0))
        finite_inf = np.isinf(vals.real) & (domain is not None and domain.has_infinity)
        ok &= (np.abs(np.where(finite_inf, 0, vals)) < ESCAPE_RADIUS)
        newly = alive & ~ok
        escape[newly] = k
        alive &= ok
        cur = np.where(alive, vals, cur)
        out[k, alive] = vals[alive]
    return out, escape


def _scale(z: complex) -> float:
    return max(1.0, abs(z)) if np.isfinite(z) else 1.0


def _classify(pts: np.ndarray, cauchy_tol: float, window: int,
              period_tol: float, max_period: int, burn_in: int):
    n = pts.size - 1
    if n == 0:
        return UNRESOLVED, None, None
    last = pts[-1]
    if np.isinf(last.real):
        w = min(window, n)
        if np.all(np.isinf(pts[-w - 1:].real)):
            return CONVERGES, last, None
        return UNRESOLVED, None, None
    w = min(window, n)
    tail = pts[-w - 1:]
    steps = np.abs(np.diff(tail))
    if np.all(np.isfinite(steps)) and steps.max() <= cauchy_tol * _scale(last):
        return CONVERGES, last, None
    burn = min(burn_in, n // 2)
    for p in range(2, max_period + 1):
        if burn + 2 * p > n + 1:
            break
        seg = pts[burn:]
        diff = np.abs(seg[p:] - seg[:-p])
        scale = np.maximum(1.0, np.abs(seg[p:]))
        if np.all(diff <= period_tol * scale):
            return PERIODIC, None, p
    return UNRESOLVED, None, None


def iterate(phi, z, n: int, domain: Optional[DomainSpec] = None, *,
            cauchy_tol: float = CAUCHY_TOL, window: int = CAUCHY_WINDOW,
            period_tol: float = PERIOD_TOL, max_period: int = MAX_PERIOD,
            burn_in: int = BURN_IN) -> OrbitTrace:
    """Orbit ``z, phi(z), ..., phi^n(z)`` with its classification."""
    if n < 0:
        raise ValueError("n must be non-negative")
    orbits, escape = iterate_many(phi, [from_point(z)], n, domain)
    pts = orbits[:, 0]
    conv = (lambda v: to_point(domain, v)) if domain is not None else complex
    if escape[0] >= 0:
        k = int(escape[0])
        kept = pts[:k]
        res = float(abs(kept[-1] - kept[-2])) if k >= 2 else math.nan
        return OrbitTrace(z, [conv(v) for v in kept], ESCAPING, residual=res, escape_step=k)
    cls, limit, period = _classify(pts, cauchy_tol, window, period_tol, max_period, burn_in)
    if n >= 1:
        last2 = pts[-2:]
        res = 0.0 if np.all(np.isinf(last2.real)) else float(abs(last2[1] - last2[0]))
    else:
        res = math.nan
    return OrbitTrace(z, [conv(v) for v in pts], cls,
                      limit=conv(limit) if limit is not None else None,
                      period=period, residual=res)


def orbit_csv(trace: OrbitTrace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "re", "im"])
    for k, p in enumerate(trace.points):
        v = from_point(p)
        w.writerow([k, _fmt(v.real), _fmt(v.imag)])
    return buf.getvalue()


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


# --------------------------------------------------------------------------
# fixed and periodic points


def _composite(phi: Expression, d: DomainSpec, p: int) -> Callable:
    def F(z):
        vals = np.asarray(z, dtype=complex)
        ok = np.ones(vals.shape, dtype=bool)
        for _ in range(p):
            vals, ok_k = apply_symbol(phi, d, np.where(ok, vals, 0))
            ok &= ok_k
        return vals, ok
    return F


def _newton_2d(F: Callable, z0: np.ndarray, iters: int = 60, tol: float = 1e-13):
    """Damped Newton on g(z) = F(z) - z viewed as a map of R^2."""
    z = z0.copy()

    def g(w):
        v, ok = F(w)
        r = v - w
        return np.where(ok, r, complex("nan+nanj")), ok

    gz, ok = g(z)
    for _ in range(iters):
        active = ok & (np.abs(gz) > tol * np.maximum(1.0, np.abs(z)))
        if not active.any():
            break
        h = 1e-7 * np.maximum(1.0, np.abs(z))
        gxp, _ = g(z + h)
        gxm, _ = g(z - h)
        gyp, _ = g(z + 1j * h)
        gym, _ = g(z - 1j * h)
        dx = (gxp - gxm) / (2 * h)
        dy = (gyp - gym) / (2 * h)
        a, c = dx.real, dx.imag
        b, dd = dy.real, dy.imag
        det = a * dd - b * c
        good = active & np.isfinite(det) & (np.abs(det) > 1e-14)
        safe = np.where(good, det, 1.0)
        sx = -(dd * gz.real - b * gz.imag) / safe
        sy = -(-c * gz.real + a * gz.imag) / safe
        step = np.where(good, sx + 1j * sy, 0)
        # fall back to a plain fixed-point step when the Jacobian is singular
        plain = active & ~good
        step = np.where(plain, np.nan_to_num(gz), step)
        t = np.ones(z.shape)
        accepted = ~active
        znew = z.copy()
        gnew = gz.copy()
        for _ in range(30):
            trial = z + t * step
            gt, okt = g(trial)
            better = ~accepted & okt & (np.abs(gt) < np.abs(gz))
            znew = np.where(better, trial, znew)
            gnew = np.where(better, gt, gnew)
            accepted |= better
            if accepted.all():
                break
            t = np.where(accepted, t, t / 2)
        z, gz = znew, gnew
        if not (accepted & active).any():
            break
    return z, np.abs(gz)


def _newton_circle(F: Callable, radius: float, theta0: np.ndarray, iters: int = 60):
    """Damped Newton on the angular displacement of F along the circle."""
    th = theta0.copy()

    def disp(t):
        z = radius * np.exp(1j * t)
        v, ok = F(z)
        with np.errstate(all="ignore"):
            r = np.angle(v / z)
        return np.where(ok, r, np.nan)

    dth = disp(th)
    for _ in range(iters):
        active = np.isfinite(dth) & (np.abs(dth) > 1e-15)
        if not active.any():
            break
        h = 1e-7
        der = (disp(th + h) - disp(th - h)) / (2 * h)
        good = active & np.isfinite(der) & (np.abs(der) > 1e-12)
        step = np.where(good, -dth / np.where(good, der, 1.0), 0.0)
        t = np.ones(th.shape)
        accepted = ~good
        thn, dn = th.copy(), dth.copy()
        if not good.any():
            break
        for _ in range(30):
            trial = th + t * step
            dt = disp(trial)
            better = ~accepted & np.isfinite(dt) & (np.abs(dt) < np.abs(dth))
            thn = np.where(better, trial, thn)
            dn = np.where(better, dt, dn)
            accepted |= better
            if accepted.all():
                break
            t = np.where(accepted, t, t / 2)
        progressed = (accepted & good).any()
        th, dth = thn, dn
        if not progressed:
            break
    return radius * np.exp(1j * th)


def _merge(points: np.ndarray, radius: float) -> np.ndarray:
    kept: list[complex] = []
    for z in points:
        if all(abs(z - k) > radius for k in kept):
            kept.append(z)
    return np.array(kept, dtype=complex)


def _fixed_points_of(F: Callable, d: DomainSpec, tol: float, n_seeds: int,
                     cluster: float) -> np.ndarray:
    z = d.points.astype(complex)
    vals, ok = F(z)
    res = np.where(ok, np.abs(vals - z), np.inf)
    if d.is_lattice:
        return z[ok & (res == 0)]
    order = np.argsort(res, kind="stable")
    finite = order[np.isfinite(res[order])]
    seed_idx = np.union1d(finite[:n_seeds], np.flatnonzero(res <= 1e-6 * d.scale()))
    if seed_idx.size == 0:
        return np.zeros(0, dtype=complex)
    seeds = z[seed_idx]
    if d.kind == Kind.CIRCLE:
        refined = _newton_circle(F, d.params["radius"], np.angle(seeds))
    else:
        refined, _ = _newton_2d(F, seeds)
    # exact grid hits are kept as they are
    exact = res[seed_idx] == 0
    refined = np.where(exact, seeds, refined)
    v, okr = F(refined)
    resid = np.where(okr, np.abs(v - refined), np.inf)
    good = okr & (resid < tol) & d.contains_many(refined)
    cand = refined[good]
    cand = cand[np.argsort(resid[good], kind="stable")]
    merged = _merge(cand, cluster)
    if merged.size:
        merged = merged[np.lexsort((merged.imag, merged.real))]
    return merged


def find_fixed_points(phi, d: DomainSpec, *, tol: float = FIXED_TOL,
                      n_seeds: int = 64, cluster: float = 1e-6) -> list:
    """Fixed points of ``phi`` in ``d``: grid candidates refined by damped Newton."""
    phi = as_expression(phi)
    F = _composite(phi, d, 1)
    pts = _fixed_points_of(F, d, tol, n_seeds, cluster)
    out = [to_point(d, p) for p in pts]
    if d.has_infinity:
        out.append(INFINITY)
    return out


def find_periodic_points(phi, d: DomainSpec, max_period: int = MAX_PERIOD, *,
                         tol: float = PERIOD_TOL, n_seeds: int = 64,
                         cluster: float = 1e-6) -> list:
    """Points of minimal period ``2..max_period`` as ``(point, period)`` pairs."""
    if max_period < 2:
        raise ValueError("max_period must be at least 2")
    phi = as_expression(phi)
    found: list = []
    for p in range(2, max_period + 1):
        F = _composite(phi, d, p)
        pts = _fixed_points_of(F, d, min(tol, 1e-8), n_seeds, cluster)
        for z in pts:
            if _minimal_period(phi, d, z, p, tol):
                found.append((to_point(d, z), p))
    return found


def _minimal_period(phi, d, z, p, tol) -> bool:
    for q in range(1, p):
        if p % q:
            continue
        v, ok = _composite(phi, d, q)(np.array([z]))
        if ok[0] and abs(v[0] - z) < tol:
            return False
    return True


# --------------------------------------------------------------------------
# Denjoy-Wolff


@dataclass
class DenjoyWolff:
    point: Optional[complex]
    kind: Optional[str]
    agreement: float
    limits: list = field(default_factory=list)
    reason: str = ""

    @property
    def applicable(self) -> bool:
        return self.point is not None


DEFAULT_DW_SEEDS = (0j, 0.5, -0.5, 0.5j, -0.5j, 0.3 + 0.3j, -0.2 - 0.6j)


def denjoy_wolff_point(phi, d: DomainSpec, *, seeds=None, n: int = 2000,
                       agree_tol: float = 1e-6) -> DenjoyWolff:
    """Common limit of interior orbits of an analytic self-map of a closed disc.

    Returns a result with ``point=None`` (not applicable) when orbits do not
    settle on a common point, which covers the identity and elliptic
    automorphisms.
    """
    if d.kind != Kind.CLOSED_DISC:
        raise PreconditionError("Denjoy-Wolff point needs a closed disc domain")
    radius = d.params["radius"]
    seeds = np.array(DEFAULT_DW_SEEDS if seeds is None else seeds, dtype=complex) * (
        radius if seeds is None else 1.0)
    if seeds.size < 5:
        raise PreconditionError("need at least 5 seeds")
    orbits, escape = iterate_many(phi, seeds, n, d)
    if (escape >= 0).any():
        return DenjoyWolff(None, None, math.inf, [],
                           reason="orbit left the disc (not a self-map)")
    final = orbits[-1]
    spread = float(np.max(np.abs(final[:, None] - final[None, :])))
    limits = [complex(v) for v in final]
    if spread >= agree_tol:
        return DenjoyWolff(None, None, spread, limits,
                           reason="orbits do not settle on a common point")
    q = complex(final.mean())
    kind = "boundary" if abs(q) >= radius - 1e-6 else "interior"
    return DenjoyWolff(q, kind, spread, limits)


# --------------------------------------------------------------------------
# stable orbits


ACCUMULATION_MIN_POINTS = 8


def _ball_samples(d: DomainSpec, z0: complex, r: float) -> np.ndarray:
    if d.is_lattice:
        pts = d.points.astype(complex)
        return pts[np.abs(pts - z0) <= r + d.tolerance]
    if d.kind == Kind.CIRCLE:
        R = d.params["radius"]
        half = 2 * math.asin(min(1.0, r / (2 * R))) if r < 2 * R else math.pi
        t = np.linspace(-half, half, 129)
        return z0 * np.exp(1j * t)
    radii = r * np.arange(0, 17) / 16
    ang = np.exp(2j * np.pi * np.arange(64) / 64)
    local = (z0 + radii[:, None] * ang[None, :]).ravel()
    local = local[d.contains_many(local)]
    grid = d.points.astype(complex)
    near = grid[np.abs(grid - z0) <= r]
    return np.concatenate([local, near])


def grid_points_within(d: DomainSpec, z0: complex, r: float) -> int:
    grid = d.points.astype(complex)
    return int(np.count_nonzero(np.abs(grid - z0) <= r + d.tolerance))


def stable_orbit_check(phi, d: DomainSpec, z0, radii) -> list:
    """For each radius r, whether phi maps B(z0, r) ∩ X into itself.

    Requires ``z0`` to be a fixed point (residual < 1e-8) and at least 8 grid
    points within every tested radius, the numerical stand-in for ``z0``
    being an accumulation point of X.
    """
    phi = as_expression(phi)
    if z0 is None:
        raise PreconditionError("no fixed point supplied")
    if z0 is INFINITY:
        raise PreconditionError("the point at infinity is not an accumulation point here")
    z0c = complex(z0)
    v, ok = apply_symbol(phi, d, np.array([z0c]))
    if not ok[0] or abs(v[0] - z0c) >= 1e-8:
        raise PreconditionError(f"{z0} is not a fixed point")
    out = []
    for r in radii:
        if grid_points_within(d, z0c, r) < ACCUMULATION_MIN_POINTS:
            raise PreconditionError(
                f"fewer than {ACCUMULATION_MIN_POINTS} grid points within radius {r} of {z0}")
        V = _ball_samples(d, z0c, r)
        img, okv = apply_symbol(phi, d, V)
        inside = okv & (np.abs(img - z0c) <= r + d.tolerance)
        out.append(bool(inside.all()))
    return out


# --------------------------------------------------------------------------
# strongly runaway


@dataclass
class RunawayResult:
    runaway: Optional[bool]
    n0: Optional[int]
    distances: list
    tolerance: float


def fill_distance(K: np.ndarray) -> float:
    pts = np.column_stack([K.real, K.imag])
    if len(pts) < 2:
        return 0.0
    dist, _ = cKDTree(pts).query(pts, k=2)
    return float(dist[:, 1].max())


def strongly_runaway_check(phi, d: DomainSpec, K, n: int, *,
                           tol: Optional[float] = None,
                           return_window: int = MAX_PERIOD) -> RunawayResult:
    """Least n0 with dist(phi^k(K), K) > tol for every n0 <= k <= n.

    ``tol`` defaults to the fill distance of the sample of K.  The verdict is
    ``False`` when K is revisited within the last ``return_window`` steps,
    ``True`` when the escape streak covers at least the second half of the
    horizon, and ``None`` otherwise (horizon too short).
    """
    K = np.asarray(K, dtype=complex).ravel()
    if tol is None:
        tol = max(fill_distance(K), d.tolerance)
    tree = cKDTree(np.column_stack([K.real, K.imag]))
    orbits, escape = iterate_many(phi, K, n, d)
    dists = []
    for k in range(1, n + 1):
        pts = orbits[k]
        alive = np.isfinite(pts)
        if not alive.any():
            dists.append(math.inf)
            continue
        p = pts[alive]
        dd, _ = tree.query(np.column_stack([p.real, p.imag]))
        dists.append(float(dd.min()))
    returns = [k for k, dist in enumerate(dists, start=1) if dist <= tol]
    last = returns[-1] if returns else 0
    n0 = last + 1
    if last >= n - return_window and last > 0:
        return RunawayResult(False, None, dists, tol)
    if n0 <= max(1, n // 2):
        return RunawayResult(True, n0, dists, tol)
    return RunawayResult(None, None, dists, tol)


# --------------------------------------------------------------------------
# circle maps and rotation numbers


@dataclass
class RotationData:
    lift_samples: list
    rotation_number: float
    confidence: float
    rational: Optional[Fraction] = None

    @property
    def likely_rational(self) -> bool:
        return self.rational is not None


def angle_action(phi, radius: float = 1.0) -> Callable:
    """theta (in turns) -> arg(phi(r e^{2 pi i theta})) / 2pi, reduced mod 1."""
    phi = as_expression(phi)

    def A(theta):
        t = np.asarray(theta, dtype=float)
        v, ok = phi.evaluate_many(radius * np.exp(2j * np.pi * t))
        if not ok.all():
            raise NotHomeomorphismError("symbol cannot be evaluated on the circle")
        return np.mod(np.angle(v) / (2 * np.pi), 1.0)
    return A


class Lift:
    """Continuous lift F(x) = x + D(x mod 1) of a degree-one circle map."""

    def __init__(self, angle_map: Callable, resolution: int = 8192):
        self.angle_map = angle_map
        t = np.arange(resolution + 1) / resolution
        raw = np.mod(np.asarray(angle_map(t), dtype=float) - t, 1.0)
        D = np.unwrap(raw * 2 * np.pi) / (2 * np.pi)
        if abs(D[-1] - D[0]) > 1e-6:
            raise NotHomeomorphismError(
                f"circle map has degree {1 + round(D[-1] - D[0])}, not 1")
        F = t + D
        if np.any(np.diff(F) <= 0):
            k = int(np.argmax(np.diff(F) <= 0))
            raise NotHomeomorphismError(
                f"lift is not increasing near theta={t[k]:.6g}; not an orientation-preserving homeomorphism")
        self.t = t
        self.D = D

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        base = np.floor(x)
        frac = x - base
        guess = np.interp(frac, self.t, self.D)
        raw = np.mod(np.asarray(self.angle_map(frac), dtype=float) - frac, 1.0)
        disp = raw + np.round(guess - raw)
        return x + disp


def _rational_guess(rho: float, max_den: int = 32, tol: float = 1e-4) -> Optional[Fraction]:
    fr = Fraction(rho).limit_denominator(max_den)
    if abs(float(fr) - rho) < tol:
        return Fraction(0) if fr == 1 else fr
    return None


def rotation_number(phi, n: int = 20000, *, seeds=(0.0, 1 / 3, 2 / 3),
                    radius: float = 1.0, resolution: int = 8192) -> RotationData:
    """Rotation number of an orientation-preserving circle homeomorphism.

    ``phi`` is either an expression in ``z`` acting on the circle of the given
    radius, or a callable mapping angles (in turns) to angles.
    """
    if len(seeds) < 3:
        raise ValueError("need at least 3 seeds")
    if callable(phi) and not isinstance(phi, (Expression, str)):
        A = phi
    else:
        A = angle_action(phi, radius)
    F = Lift(A, resolution)
    x0 = np.asarray(seeds, dtype=float)
    x = x0.copy()
    samples = [float(x[0])]
    for _ in range(n):
        x = F(x)
        samples.append(float(x[0]))
    rates = (x - x0) / n
    rho_each = np.mod(rates, 1.0)
    # average on the circle so that values straddling 0 do not split
    ang = np.angle(np.mean(np.exp(2j * np.pi * rho_each))) / (2 * np.pi)
    rho = float(np.mod(ang, 1.0))
    if rho >= 1.0:
        rho = 0.0
    diffs = np.abs(((rho_each[:, None] - rho_each[None, :]) + 0.5) % 1.0 - 0.5)
    conf = float(diffs.max())
    return RotationData(samples, rho, conf, _rational_guess(rho))


def rotation_csv(data: RotationData) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "lift"])
    for k, v in enumerate(data.lift_samples):
        w.writerow([k, _fmt(v)])
    return buf.getvalue()
