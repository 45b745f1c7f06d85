"""Verdict engine: necessary conditions and obstructions to supercyclicity
of weighted composition operators ``f -> w * (f o phi)``.

Every conclusion is a :class:`Verdict` carrying the label of the result it
rests on.  Numerical checks certify obstructions only; nothing here proves
that an operator *is* supercyclic.
"""

from __future__ import annotations

import enum
import io
import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from . import dynamics as dyn
from .domains import (INFINITY, DomainSpec, Kind, apply_symbol, closed_disc,
                      from_point, self_map_check, to_point, _point_array)
from .expr import Expression, EvaluationError, as_expression

__all__ = [
    "Conclusion", "Verdict", "CheckResult", "QuotientDiagnostic", "OperatorMatrix",
    "SelfMapError", "QuadratureError", "SpectralError", "PuncturedForm",
    "zero_free_weight_check", "univalence_check", "quotient_sequence",
    "quotient_verdict", "compact_banach_obstruction", "dynamical_obstructions",
    "disc_algebra_verdict", "spectral_obstruction", "laurent_projection",
    "laurent_obstruction", "punctured_self_map_classifier",
    "punctured_plane_verdict", "punctured_disc_verdict", "circle_verdict",
    "isometry_verdict", "disc_rotation_verdict", "quotient_csv",
]

ZERO_TOL = 1e-12
TRUNCATION_CAVEAT = "truncation diagnostic: finite section, not the infinite operator"


class Conclusion(str, enum.Enum):
    NOT_TAU_P = "NotTauPSupercyclic"
    NOT_WEAK = "NotWeaklySupercyclic"
    NOT_CYCLIC = "NotCyclic"
    WITNESS = "WitnessExhibited"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class Verdict:
    conclusion: Conclusion
    citation: str = ""
    evidence: dict = field(default_factory=dict)
    caveat: str = ""

    @property
    def is_obstruction(self) -> bool:
        return self.conclusion in (Conclusion.NOT_TAU_P, Conclusion.NOT_WEAK,
                                   Conclusion.NOT_CYCLIC)

    def __str__(self) -> str:
        tag = f" [{self.citation}]" if self.citation else ""
        return f"{self.conclusion.value}{tag}"


def inconclusive(**evidence) -> Verdict:
    return Verdict(Conclusion.INCONCLUSIVE, "", evidence)


class SelfMapError(ValueError):
    def __init__(self, violations):
        self.violations = violations
        first = violations[0] if violations else None
        super().__init__(f"symbol is not a self-map: {len(violations)} grid violation(s), "
                         f"first at {first}")


class QuadratureError(ArithmeticError):
    pass


class SpectralError(ArithmeticError):
    pass


def _require_self_map(d: DomainSpec, phi) -> None:
    report = self_map_check(d, phi)
    if not report.ok:
        raise SelfMapError(report.violations)


# --------------------------------------------------------------------------
# preconditions: zero-free weight, univalent symbol


@dataclass
class CheckResult:
    passed: bool
    witness: tuple = ()
    detail: str = ""

    def __bool__(self) -> bool:
        return self.passed


def zero_free_weight_check(w, d: DomainSpec, tol: float = ZERO_TOL) -> CheckResult:
    """Fails at the first grid point where |w| < tol (or w cannot be evaluated)."""
    w = as_expression(w)
    z = d.points.astype(complex)
    vals, ok = w.evaluate_many(z)
    bad = ~ok | (np.abs(np.where(ok, vals, 0)) < tol)
    if bad.any():
        idx = int(np.flatnonzero(bad)[0])
        return CheckResult(False, (to_point(d, z[idx]),), "weight vanishes")
    return CheckResult(True)


def univalence_check(phi, d: DomainSpec, tol: Optional[float] = None) -> CheckResult:
    """Fails when two grid points further than 2*tol apart share an image within tol."""
    tol = d.tolerance if tol is None else tol
    z = d.points.astype(complex)
    img, ok = apply_symbol(phi, d, z)
    z, img = z[ok], img[ok]
    if z.size < 2:
        return CheckResult(True)
    tree = cKDTree(np.column_stack([img.real, img.imag]))
    pairs = tree.query_pairs(tol, output_type="ndarray")
    if len(pairs):
        sep = np.abs(z[pairs[:, 0]] - z[pairs[:, 1]]) > 2 * tol
        if sep.any():
            i, j = pairs[np.flatnonzero(sep)[0]]
            a, b = sorted((int(i), int(j)))
            return CheckResult(False, (to_point(d, z[a]), to_point(d, z[b])),
                               "distinct points with equal images")
    return CheckResult(True)


# --------------------------------------------------------------------------
# quotient sequences


BOUNDED = "Bounded"
CONVERGES = "ConvergesTo"
UNBOUNDED = "Unbounded"
DENSE = "ApparentlyDense"
UNDETERMINED = "Inconclusive"

MESH = 12
MESH_RMIN, MESH_RMAX = 1e-3, 1e3


@dataclass
class QuotientDiagnostic:
    pair: tuple
    log_abs: np.ndarray
    phase: np.ndarray
    skipped: list
    classification: str
    bound: Optional[float] = None
    limit: Optional[complex] = None
    horizon: int = 0

    @property
    def indices(self) -> np.ndarray:
        skip = set(self.skipped)
        return np.array([n for n in range(len(self.log_abs)) if n not in skip], dtype=int)

    @property
    def values(self) -> np.ndarray:
        """Q_n as complex numbers (NaN at skipped indices, inf on overflow)."""
        with np.errstate(all="ignore"):
            mag = np.exp(np.minimum(self.log_abs, 709.0))
            mag = np.where(self.log_abs > 709.0, np.inf, mag)
            v = mag * np.exp(1j * self.phase)
        v = np.where(self.log_abs == -np.inf, 0, v)
        v = v.astype(complex)
        v[self.skipped] = complex("nan+nanj")
        return v

    @property
    def arg(self) -> np.ndarray:
        return np.angle(np.exp(1j * self.phase))

    def __str__(self) -> str:
        if self.classification == BOUNDED:
            return f"Bounded({_g(self.bound)})"
        if self.classification == CONVERGES:
            return f"ConvergesTo({_gc(self.limit)})"
        return self.classification


def _g(x: float) -> str:
    return format(float(x), ".12g")


def _gc(z: complex) -> str:
    return f"{_g(z.real)}{'+' if z.imag >= 0 else '-'}{_g(abs(z.imag))}i"


def _log_polar(vals: np.ndarray):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(np.abs(vals)), np.angle(vals)


def _eval_along(e: Expression, d: Optional[DomainSpec], pts: np.ndarray):
    if d is not None:
        return apply_symbol(e, d, pts)
    return e.evaluate_many(pts)


def quotient_sequence(phi, w, f, z1, z2, n: int = 512,
                      domain: Optional[DomainSpec] = None, *,
                      cauchy_tol: float = 1e-9, tail: int = 10) -> QuotientDiagnostic:
    """Q_n = prod_{m<n} w(phi^m z1) f(phi^n z1) / prod_{m<n} w(phi^m z2) f(phi^n z2).

    Products are accumulated as sums of log-magnitudes and of arguments, so
    the sequence survives weights far from modulus one.
    """
    phi, w, f = as_expression(phi), as_expression(w), as_expression(f)
    if z1 is INFINITY or z2 is INFINITY:
        raise dyn.PreconditionError("quotients are taken at points of X, not at infinity")
    if from_point(z1) == from_point(z2):
        raise dyn.PreconditionError("z1 and z2 must differ")
    orbits, escape = dyn.iterate_many(phi, [from_point(z1), from_point(z2)], n, domain)
    horizon = n
    if (escape >= 0).any():
        horizon = int(escape[escape >= 0].min()) - 1
    orbits = orbits[:horizon + 1]
    logs, phases = [], []
    for s in range(2):
        pts = orbits[:, s]
        wv, wok = _eval_along(w, domain, pts)
        fv, fok = _eval_along(f, domain, pts)
        wv = np.where(wok, wv, 0)
        fv = np.where(fok, fv, 0)
        lw, aw = _log_polar(wv)
        lf, af = _log_polar(fv)
        cum_l = np.concatenate([[0.0], np.cumsum(lw[:-1])])
        cum_a = np.concatenate([[0.0], np.cumsum(np.where(np.isfinite(lw), aw, 0)[:-1])])
        logs.append(cum_l + lf)
        phases.append(cum_a + af)
    num_l, den_l = logs
    skipped = [int(k) for k in np.flatnonzero(den_l == -np.inf)]
    with np.errstate(invalid="ignore"):
        log_abs = num_l - den_l
    log_abs[skipped] = np.nan
    phase = phases[0] - phases[1]
    diag = QuotientDiagnostic((z1, z2), log_abs, phase, skipped, UNDETERMINED, horizon=horizon)
    _classify_quotient(diag, cauchy_tol, tail)
    return diag


def _classify_quotient(diag: QuotientDiagnostic, cauchy_tol: float, tail: int) -> None:
    idx = diag.indices
    if idx.size < 2:
        diag.classification = UNDETERMINED
        return
    vals = diag.values[idx]
    la = diag.log_abs[idx]
    if np.all(la == -np.inf):
        diag.classification = UNDETERMINED
        return
    finite = np.all(np.isfinite(vals))
    mags = np.abs(vals)
    if finite:
        last = vals[-1]
        scale = max(1.0, abs(last))
        if np.all(np.abs(vals - vals[0]) <= cauchy_tol * max(1.0, abs(vals[0]))):
            diag.classification = BOUNDED
            diag.bound = float(mags.max())
            return
        t = vals[-min(tail, vals.size):]
        if np.all(np.abs(t - last) <= cauchy_tol * scale):
            diag.classification = CONVERGES
            diag.limit = complex(last)
            diag.bound = float(mags.max())
            return
    if _hits_mesh(la, diag.phase[idx]):
        diag.classification = DENSE
        return
    half = max(1, la.size // 2)
    first_max = np.max(la[:half])
    second_max = np.max(la[half:])
    if not np.isfinite(second_max) or second_max - max(first_max, 0.0) > math.log(2):
        diag.classification = UNBOUNDED
        return
    diag.classification = BOUNDED
    diag.bound = float(mags.max())


def _hits_mesh(log_abs: np.ndarray, phase: np.ndarray) -> bool:
    lo, hi = math.log(MESH_RMIN), math.log(MESH_RMAX)
    sel = (log_abs >= lo) & (log_abs <= hi)
    if np.count_nonzero(sel) < MESH * MESH:
        return False
    r = np.minimum(((log_abs[sel] - lo) / (hi - lo) * MESH).astype(int), MESH - 1)
    a = np.mod(phase[sel], 2 * np.pi)
    t = np.minimum((a / (2 * np.pi) * MESH).astype(int), MESH - 1)
    return len(set(zip(r.tolist(), t.tolist()))) == MESH * MESH


def quotient_csv(diag: QuotientDiagnostic) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["n", "log_abs_q", "arg_q"])
    args = diag.arg
    skip = set(diag.skipped)
    for n in range(len(diag.log_abs)):
        if n in skip:
            wr.writerow([n, "nan", "nan"])
        else:
            wr.writerow([n, _g(diag.log_abs[n]), _g(args[n])])
    return buf.getvalue()


def quotient_verdict(diags: Sequence[QuotientDiagnostic], *, weight_form: bool) -> Verdict:
    """Bounded or convergent quotients rule out density of the quotient set.

    With ``weight_form`` (both orbits converge, the quotient is the bare
    weight product) the conclusion holds for every function; otherwise it
    covers the tested functions only, which the evidence records.
    """
    diags = list(diags)
    ev = {"classifications": [str(dg) for dg in diags],
          "scope": "operator" if weight_form else "tested functions"}
    limits = [dg.limit for dg in diags if dg.classification == CONVERGES]
    if limits:
        ev["limits"] = limits
    if diags and all(dg.classification in (BOUNDED, CONVERGES) for dg in diags):
        return Verdict(Conclusion.NOT_TAU_P, "Prop. 4", ev)
    return Verdict(Conclusion.INCONCLUSIVE, "", ev)


# --------------------------------------------------------------------------
# compact X


def compact_banach_obstruction(d: DomainSpec, has_nowhere_vanishing: bool) -> Verdict:
    """On C(X)-type Banach spaces over compact X with a nowhere vanishing member,
    no weighted composition operator is weakly supercyclic."""
    ev = {"domain": d.kind.value, "compact": d.is_compact,
          "nowhere_vanishing_member": bool(has_nowhere_vanishing)}
    if d.is_compact and has_nowhere_vanishing:
        return Verdict(Conclusion.NOT_WEAK, "Thm 4", ev)
    return Verdict(Conclusion.INCONCLUSIVE, "", ev)


# --------------------------------------------------------------------------
# dynamical detectors


def _finite_fixed_points(phi, d: DomainSpec) -> list:
    # the added point at infinity carries no pointwise evaluation
    return [p for p in dyn.find_fixed_points(phi, d) if p is not INFINITY]


def _sample_seeds(d: DomainSpec, count: int = 64) -> np.ndarray:
    z = d.points.astype(complex)
    if z.size <= count:
        return z
    idx = np.unique(np.linspace(0, z.size - 1, count).round().astype(int))
    return z[idx]


def grid_spacing(d: DomainSpec) -> float:
    if d.is_lattice:
        return 1.0
    if d.kind == Kind.CIRCLE:
        return 2 * math.pi * d.params["radius"] / d.params["resolution"]
    if d.kind == Kind.CLOSED_DISC:
        return d.params["radius"] / d.params["rings"]
    r = np.unique(np.round(np.abs(d.points), 12))
    return float(np.min(np.diff(r))) if r.size > 1 else float(r[0])


def stability_radii(d: DomainSpec) -> list:
    """Decreasing radii used as the finite 'fundamental family' of neighbourhoods."""
    h = grid_spacing(d)
    mult = (32, 16, 8, 4) if d.kind == Kind.CIRCLE else (8, 4, 2, 1)
    cap = 2 * d.scale()
    return [h * m for m in mult if h * m <= cap]


def detect_two_fixed_points(phi, d: DomainSpec):
    fps = _finite_fixed_points(phi, d)
    if len(fps) >= 2:
        return {"fixed_points": fps[:2], "count": len(fps)}
    return None


def detect_convergent_orbit(phi, d: DomainSpec, n: int = 256):
    seeds = _sample_seeds(d)
    orbits, escape = dyn.iterate_many(phi, seeds, n, d)
    for s in range(seeds.size):
        if escape[s] >= 0:
            continue
        pts = orbits[:, s]
        if np.isinf(pts[-1].real):
            continue
        cls, limit, _ = dyn._classify(pts, dyn.CAUCHY_TOL, dyn.CAUCHY_WINDOW,
                                      dyn.PERIOD_TOL, dyn.MAX_PERIOD, dyn.BURN_IN)
        if cls != dyn.CONVERGES:
            continue
        if abs(pts[1] - pts[0]) <= 1e-9 * max(1.0, abs(pts[0])):
            continue
        if not d.contains(limit):
            continue
        return {"start": to_point(d, pts[0]), "limit": to_point(d, limit),
                "steps": n, "residual": float(abs(pts[-1] - pts[-2]))}
    return None


def detect_periodic_point(phi, d: DomainSpec, max_period: int = dyn.MAX_PERIOD):
    if not d.is_compact:
        return None
    found = dyn.find_periodic_points(phi, d, max_period)
    found = [(p, k) for p, k in found if p is not INFINITY]
    if found:
        p, k = found[0]
        return {"point": p, "period": k, "count": len(found)}
    return None


def detect_dominant_weight_fixed_point(phi, w, d: DomainSpec, tol: float = 1e-9):
    if not d.is_compact or len(d.points) < 2:
        return None
    w = as_expression(w)
    vals, ok = apply_symbol(w, d, d.points.astype(complex))
    if not ok.all():
        return None
    wmax = float(np.max(np.abs(vals)))
    for z2 in _finite_fixed_points(phi, d):
        v, okv = apply_symbol(w, d, np.array([from_point(z2)]))
        if okv[0] and abs(v[0]) >= wmax - tol * max(1.0, wmax):
            return {"fixed_point": z2, "weight_modulus": float(abs(v[0])), "grid_max": wmax}
    return None


def detect_stable_orbits(phi, d: DomainSpec):
    if d.is_lattice:
        return None
    radii = stability_radii(d)
    if not radii:
        return None
    for z0 in _finite_fixed_points(phi, d):
        try:
            flags = dyn.stable_orbit_check(phi, d, z0, radii)
        except dyn.PreconditionError:
            continue
        if all(flags):
            return {"fixed_point": z0, "radii": radii}
    return None


def dynamical_obstructions(phi, w, d: DomainSpec, *, orbit_n: int = 256,
                           max_period: int = dyn.MAX_PERIOD) -> Verdict:
    """Run the five dynamical detectors in order; the first that fires decides."""
    phi, w = as_expression(phi), as_expression(w)
    detectors = [
        ("Thm 5(i)", "two fixed points", lambda: detect_two_fixed_points(phi, d)),
        ("Thm 5(ii)", "non-constant convergent orbit",
         lambda: detect_convergent_orbit(phi, d, orbit_n)),
        ("Thm 5(iii)", "periodic (not fixed) point on compact X",
         lambda: detect_periodic_point(phi, d, max_period)),
        ("Thm 5(iv)", "fixed point maximising |w|",
         lambda: detect_dominant_weight_fixed_point(phi, w, d)),
        ("Thm 5(v)", "stable orbits around a fixed accumulation point",
         lambda: detect_stable_orbits(phi, d)),
    ]
    tried = []
    for tag, name, run in detectors:
        ev = run()
        tried.append(tag)
        if ev is not None:
            return Verdict(Conclusion.NOT_TAU_P, tag, {"detector": name, **ev})
    return inconclusive(detectors_run=tried)


# --------------------------------------------------------------------------
# disc algebra


def disc_algebra_verdict(phi, w, d: Optional[DomainSpec] = None, *,
                         dw_steps: int = 2000) -> Verdict:
    """Analytic self-maps of the closed disc never give pointwise supercyclic
    weighted composition operators; the evidence records which dynamical
    case (Denjoy-Wolff limit or stable orbits) applies."""
    phi, w = as_expression(phi), as_expression(w)
    d = d or closed_disc()
    if d.kind != Kind.CLOSED_DISC:
        raise dyn.PreconditionError("disc algebra verdict needs a closed disc")
    _require_self_map(d, phi)
    dw = dyn.denjoy_wolff_point(phi, d, n=dw_steps)
    ev: dict = {"analytic": "asserted"}
    if dw.applicable:
        ev.update(denjoy_wolff_point=dw.point, kind=dw.kind, agreement=dw.agreement)
    else:
        ev["denjoy_wolff"] = dw.reason
        stable = detect_stable_orbits(phi, d)
        if stable:
            ev.update(stable_orbits=stable)
        else:
            ev["fixed_points"] = _finite_fixed_points(phi, d)
    return Verdict(Conclusion.NOT_TAU_P, "Thm 6", ev)


# --------------------------------------------------------------------------
# spectra of finite sections


@dataclass
class OperatorMatrix:
    entries: np.ndarray
    norm_estimate: float

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def from_entries(cls, entries) -> "OperatorMatrix":
        a = np.array(entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise SpectralError(f"matrix must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise SpectralError("matrix has non-finite entries")
        try:
            norm = float(np.linalg.norm(a, 2)) if a.size else 0.0
        except np.linalg.LinAlgError as exc:
            raise SpectralError(str(exc)) from None
        return cls(a, norm)


def weighted_shift_truncation(weights: Sequence[float]) -> np.ndarray:
    """Finite section of B_w e_j = w_j e_{j-1} on span{e_0..e_N}."""
    n = len(weights) + 1
    m = np.zeros((n, n), dtype=complex)
    for j in range(1, n):
        m[j - 1, j] = weights[j - 1]
    return m


def spectral_obstruction(T, margin: float = 1e-9) -> Verdict:
    """Eigenvalues on the circle of radius ||T|| obstruct weak supercyclicity."""
    if not isinstance(T, OperatorMatrix):
        T = OperatorMatrix.from_entries(T)
    if T.dimension < 2:
        raise SpectralError("dimension must be at least 2")
    try:
        ev = np.linalg.eigvals(T.entries)
        ev_adj = np.linalg.eigvals(T.entries.conj().T)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(str(exc)) from None
    rho = float(max(np.abs(ev).max(), np.abs(ev_adj).max()))
    evidence = {"dimension": T.dimension, "norm": T.norm_estimate,
                "spectral_radius": rho,
                "eigenvalues": sorted((complex(v) for v in ev),
                                      key=lambda v: (-abs(v), v.real, v.imag))[:8]}
    if rho >= T.norm_estimate - margin:
        return Verdict(Conclusion.NOT_WEAK, "Cor. 10", evidence, TRUNCATION_CAVEAT)
    return Verdict(Conclusion.INCONCLUSIVE, "", evidence, TRUNCATION_CAVEAT)


# --------------------------------------------------------------------------
# punctured domains


def _circle_samples(f: Expression, radius: float, m: int, scale, dps: Optional[int]):
    """f(scale * radius * e^{2 pi i j/m}) for j < m, as doubles or mpmath numbers."""
    if dps is None:
        t = 2 * np.pi * np.arange(m) / m
        vals, ok = f.evaluate_many(scale * radius * np.exp(1j * t))
        if not ok.all():
            raise QuadratureError(f"f cannot be evaluated on |z| = {radius * abs(scale)}")
        return vals
    import mpmath

    with mpmath.workdps(dps):
        c = mpmath.mpc(scale) * mpmath.mpf(radius)
        out = []
        for j in range(m):
            try:
                out.append(f.evaluate_mp(c * mpmath.expjpi(mpmath.mpf(2 * j) / m), dps))
            except EvaluationError as exc:
                raise QuadratureError(str(exc)) from None
        return out


def _project(samples, k: int, radius: float, dps: Optional[int]):
    m = len(samples)
    if dps is None:
        t = 2 * np.pi * np.arange(m) / m
        return complex(np.mean(samples * np.exp(-1j * k * t)) * radius ** (-k))
    import mpmath

    with mpmath.workdps(dps):
        total = mpmath.mpc(0)
        for j, v in enumerate(samples):
            total += v * mpmath.expjpi(mpmath.mpf(-2 * k * j) / m)
        return total / m * mpmath.mpf(radius) ** (-k)


def laurent_projection(f, k: int, radius: float, m: int, *, scale=1.0,
                       dps: Optional[int] = None) -> complex:
    """P_k(f o g) with g(z) = scale * z, by the m-point trapezoid rule on |z| = radius.

    With ``dps`` the sums are formed in mpmath at that many digits.
    """
    f = as_expression(f)
    return complex(_project(_circle_samples(f, radius, m, scale, dps), k, radius, dps))


def _laurent_table(f: Expression, a: complex, ks, radius: float, m: int, dps: Optional[int]):
    """Rows (k, P_k f, P_k(f o g_a), residual).

    P_k f is sampled on |z| = |a| radius (the image circle, unrotated) and
    P_k(f o g_a) on |z| = radius, so the two sides share no sample points.
    """
    rho = abs(a) * radius
    sf = {mm: _circle_samples(f, rho, mm, 1.0, dps) for mm in (m, 2 * m)}
    sg = {mm: _circle_samples(f, radius, mm, a, dps) for mm in (m, 2 * m)}
    rows = []
    for k in ks:
        pf, pf2 = (_project(sf[mm], k, rho, dps) for mm in (m, 2 * m))
        pg, pg2 = (_project(sg[mm], k, radius, dps) for mm in (m, 2 * m))
        drift = float(max(abs(pf2 - pf), abs(pg2 - pg)))
        size = float(max(1.0, abs(pf), abs(pg)))
        if drift > 1e-6 * size:
            raise QuadratureError(f"quadrature not converged for k={k} (drift {drift:.3g})")
        if dps is None:
            resid = abs(pg - a ** k * pf)
        else:
            import mpmath
            with mpmath.workdps(dps):
                resid = float(abs(pg - mpmath.mpc(a) ** k * pf))
        rows.append((k, complex(pf), complex(pg), float(resid)))
    return rows


def laurent_obstruction(a, f, radius: float = 0.5, k_list: Sequence[int] = (-1, 0, 1), *,
                        m: Optional[int] = None, dps: Optional[int] = 40,
                        tol: float = 1e-9) -> Verdict:
    """Check P_k(f o g_a) = a^k P_k(f) for g_a(z) = a z and name the witness
    projection (k = -1 for |a| < 1, k = +1 for |a| > 1) whose geometric
    growth under iteration rules out weak supercyclicity of C_{g_a}.

    ``dps`` selects extended-precision quadrature sums (None: doubles).
    """
    a = complex(a)
    if not (0 < abs(a) and abs(abs(a) - 1) > 1e-12):
        raise dyn.PreconditionError("need 0 < |a| != 1")
    f = as_expression(f)
    witness = -1 if abs(a) < 1 else 1
    ks = sorted(set(int(k) for k in k_list) | {witness})
    mq = max(4 * max(abs(k) for k in ks) + 64, m or 0)
    rows = []
    ok = True
    for k, pf, pg, resid in _laurent_table(f, a, ks, radius, mq, dps):
        good = resid < tol * (1 + abs(pf))
        ok &= good
        rows.append({"k": k, "P_k(f)": pf, "P_k(f o g_a)": pg, "residual": resid,
                     "holds": bool(good)})
    wrow = next(r for r in rows if r["k"] == witness)
    ev = {"a": a, "radius": radius, "quadrature_points": mq, "projections": rows,
          "witness_k": witness, "witness_projection": wrow["P_k(f)"],
          "witness_growth_per_step": abs(a) ** -1 if witness == -1 else abs(a)}
    if ok:
        return Verdict(Conclusion.NOT_WEAK, "Thm 12", ev)
    return Verdict(Conclusion.INCONCLUSIVE, "", ev)


@dataclass
class PuncturedForm:
    form: str  # "az", "a/z" or "notInjectiveForm"
    a: complex
    max_rel_error: float


def punctured_self_map_classifier(phi, d: DomainSpec, rel_tol: float = 1e-8) -> PuncturedForm:
    """Fit phi to z -> a z or z -> a / z with a = phi(1)."""
    phi = as_expression(phi)
    try:
        a = phi(1.0)
    except EvaluationError:
        return PuncturedForm("notInjectiveForm", complex("nan"), math.inf)
    z = d.points.astype(complex)
    vals, ok = phi.evaluate_many(z)
    if not ok.all() or a == 0:
        return PuncturedForm("notInjectiveForm", a, math.inf)
    best = None
    for form, model in (("az", a * z), ("a/z", a / z)):
        err = float(np.max(np.abs(vals - model) / np.abs(model)))
        if err <= rel_tol:
            return PuncturedForm(form, a, err)
        best = err if best is None else min(best, err)
    return PuncturedForm("notInjectiveForm", a, best)


DEFAULT_LAURENT_TEST = "exp(z)+exp(1/z)"


def _rotation_runaway(phi, d: DomainSpec, n: int) -> dict:
    # compact annular sample around the unit circle
    r = np.linspace(0.8, 1.25, 6)
    t = np.exp(2j * np.pi * np.arange(24) / 24)
    K = (r[:, None] * t[None, :]).ravel()
    res = dyn.strongly_runaway_check(phi, d, K, n)
    return {"strongly_runaway": res.runaway, "n0": res.n0}


def punctured_plane_verdict(phi, d: DomainSpec, *, test_function=DEFAULT_LAURENT_TEST,
                            runaway_n: int = 64) -> Verdict:
    """Composition operators on H(C minus 0): classify the symbol and attach the
    matching branch of the obstruction."""
    phi = as_expression(phi)
    if d.kind != Kind.PUNCTURED_PLANE:
        raise dyn.PreconditionError("needs a punctured plane domain")
    _require_self_map(d, phi)
    form = punctured_self_map_classifier(phi, d)
    ev = {"form": form.form, "a": form.a, "fit_error": form.max_rel_error}
    if form.form == "a/z":
        twice, ok = phi.evaluate_many(phi.evaluate_many(d.points.astype(complex))[0])
        err = float(np.max(np.abs(twice - d.points)))
        ev.update(branch="involution", composition_square_error=err)
        return Verdict(Conclusion.NOT_WEAK, "Thm 12", ev)
    if form.form == "az":
        a = form.a
        if abs(abs(a) - 1) <= 1e-9:
            ev.update(branch="rotation", **_rotation_runaway(phi, d, runaway_n))
            if ev["strongly_runaway"] is False:
                return Verdict(Conclusion.NOT_WEAK, "Cor. 11", ev)
            return Verdict(Conclusion.INCONCLUSIVE, "", ev)
        radius = 1.0 / math.sqrt(abs(a))
        lv = laurent_obstruction(a, test_function, radius=radius)
        ev.update(branch="|a|<1" if abs(a) < 1 else "|a|>1", laurent=lv.evidence)
        return Verdict(lv.conclusion, lv.citation, ev)
    uni = univalence_check(phi, d)
    if not uni:
        ev.update(branch="not injective", witness=uni.witness)
        return Verdict(Conclusion.NOT_WEAK, "Cor. 11", ev)
    return Verdict(Conclusion.INCONCLUSIVE, "", ev)


def punctured_disc_verdict(phi, d: DomainSpec, *, test_function=DEFAULT_LAURENT_TEST,
                           runaway_n: int = 64, probe_radius: float = 0.5) -> Verdict:
    """Composition operators on H(D minus 0).

    The removable singularity at 0 is read off the Laurent projections of phi
    on a probe circle: P_0 gives the extension's value at 0 and P_1 its
    derivative, which is the multiplier a of the linear model g_a.
    """
    phi = as_expression(phi)
    if d.kind != Kind.PUNCTURED_DISC:
        raise dyn.PreconditionError("needs a punctured disc domain")
    _require_self_map(d, phi)
    m = 256
    p0 = laurent_projection(phi, 0, probe_radius, m)
    p1 = laurent_projection(phi, 1, probe_radius, m)
    pneg = laurent_projection(phi, -1, probe_radius, m)
    ev = {"extension_at_0": p0, "derivative_at_0": p1, "principal_part_P_-1": pneg}
    if abs(pneg) > 1e-8:
        ev["branch"] = "singular at 0 (not a bounded self-map)"
        return Verdict(Conclusion.INCONCLUSIVE, "", ev)
    if abs(p0) > 1e-8:
        ev["branch"] = "extension does not fix 0"
        return Verdict(Conclusion.NOT_WEAK, "Thm 12", ev)
    a = p1
    if abs(a) < 1e-12:
        ev["branch"] = "not injective (zero derivative at the fixed point)"
        return Verdict(Conclusion.NOT_WEAK, "Cor. 11", ev)
    if abs(a) >= 1 - 1e-9:
        r = np.linspace(0.2, 0.6, 5)
        t = np.exp(2j * np.pi * np.arange(24) / 24)
        K = (r[:, None] * t[None, :]).ravel()
        res = dyn.strongly_runaway_check(phi, d, K, runaway_n)
        ev.update(branch="elliptic automorphism", strongly_runaway=res.runaway)
        if res.runaway is False:
            return Verdict(Conclusion.NOT_WEAK, "Cor. 11", ev)
        return Verdict(Conclusion.INCONCLUSIVE, "", ev)
    radius = min(0.9, 0.9 / abs(a)) if abs(a) > 0 else 0.9
    lv = laurent_obstruction(a, test_function, radius=math.sqrt(radius * 0.9))
    ev.update(branch="linear model g_a", laurent=lv.evidence)
    return Verdict(lv.conclusion, lv.citation, ev)


# --------------------------------------------------------------------------
# circle and closed disc


def _unimodular(w, d: DomainSpec, tol: float = 1e-9) -> bool:
    vals, ok = as_expression(w).evaluate_many(d.points.astype(complex))
    return bool(ok.all() and np.all(np.abs(np.abs(vals) - 1) <= tol))


def _rotation_factor(phi, d: DomainSpec, tol: float = 1e-9) -> Optional[complex]:
    z = d.points.astype(complex)
    nz = np.abs(z) > 0
    vals, ok = as_expression(phi).evaluate_many(z[nz])
    if not ok.all():
        return None
    ratio = vals / z[nz]
    lam = ratio[0]
    if np.all(np.abs(ratio - lam) <= tol * max(1.0, abs(lam))):
        return complex(lam)
    return None


def circle_verdict(phi, w, d: DomainSpec, *, no_wandering_interval: bool = False,
                   max_period: int = dyn.MAX_PERIOD, rotation_steps: int = 20000) -> Verdict:
    """Weighted composition operators on C(circle)."""
    phi, w = as_expression(phi), as_expression(w)
    if d.kind != Kind.CIRCLE:
        raise dyn.PreconditionError("needs a circle domain")
    _require_self_map(d, phi)
    uni = univalence_check(phi, d)
    if not uni:
        return Verdict(Conclusion.NOT_TAU_P, "Prop. 2(ii)",
                       {"not_injective": uni.witness})
    ev: dict = {"homeomorphism": "injective on grid, hence a homeomorphism (Lemma 20)"}
    fixed = dyn.find_fixed_points(phi, d)
    if fixed:
        return Verdict(Conclusion.NOT_TAU_P, "Prop. 21",
                       {**ev, "periodic_point": fixed[0], "period": 1})
    periodic = dyn.find_periodic_points(phi, d, max_period)
    if periodic:
        p, k = periodic[0]
        return Verdict(Conclusion.NOT_TAU_P, "Prop. 21", {**ev, "periodic_point": p, "period": k})
    unimodular = _unimodular(w, d)
    lam = _rotation_factor(phi, d)
    ev["unimodular_weight"] = unimodular
    if lam is not None:
        ev["rotation_factor"] = lam
        if unimodular and abs(abs(lam) - 1) <= 1e-9:
            return Verdict(Conclusion.NOT_TAU_P, "Prop. 22", ev)
    try:
        rot = dyn.rotation_number(phi, rotation_steps, radius=d.params["radius"])
    except dyn.NotHomeomorphismError as exc:
        ev["rotation_number"] = f"unavailable: {exc}"
        return Verdict(Conclusion.INCONCLUSIVE, "", ev)
    ev.update(rotation_number=rot.rotation_number, rotation_confidence=rot.confidence,
              likely_rational=str(rot.rational) if rot.rational is not None else None,
              no_wandering_interval="asserted" if no_wandering_interval else "not asserted")
    if rot.rational is None and unimodular and no_wandering_interval:
        return Verdict(Conclusion.NOT_TAU_P, "Thm 23", ev)
    return Verdict(Conclusion.INCONCLUSIVE, "", ev)


def _boundary_degree(phi, d: DomainSpec) -> Optional[int]:
    """Winding number of the image of the boundary circle, or None when the
    boundary is not mapped into itself.  An injective map of the closed disc
    is onto exactly when this is +-1."""
    r = d.params["radius"]
    t = np.exp(2j * np.pi * np.arange(1024) / 1024)
    vals, ok = as_expression(phi).evaluate_many(r * t)
    if not ok.all() or np.any(np.abs(np.abs(vals) - r) > 1e-9 * max(1.0, r)):
        return None
    turns = np.unwrap(np.angle(np.append(vals, vals[0])))
    return int(round((turns[-1] - turns[0]) / (2 * np.pi)))


def isometry_verdict(phi, w, d: Optional[DomainSpec] = None) -> Verdict:
    """Surjective isometries of C(closed disc), i.e. w (f o phi) with phi a
    homeomorphism and |w| = 1, are never pointwise supercyclic."""
    phi, w = as_expression(phi), as_expression(w)
    d = d or closed_disc()
    _require_self_map(d, phi)
    uni = univalence_check(phi, d)
    uni_w = _unimodular(w, d)
    onto = _boundary_degree(phi, d)
    ev = {"injective_on_grid": uni.passed, "unimodular_weight": uni_w,
          "boundary_degree": onto}
    if not (uni.passed and uni_w and onto in (1, -1)):
        return Verdict(Conclusion.INCONCLUSIVE, "", ev)
    fixed = _finite_fixed_points(phi, d)
    ev["fixed_point"] = fixed[0] if fixed else "guaranteed by Brouwer; none located on grid"
    return Verdict(Conclusion.NOT_TAU_P, "Thm 19", ev)


def disc_rotation_verdict(phi, w, d: Optional[DomainSpec] = None) -> Verdict:
    """phi(z) = lambda z with |lambda| <= 1 on the closed disc: stable orbits around 0."""
    phi = as_expression(phi)
    d = d or closed_disc()
    lam = _rotation_factor(phi, d)
    if lam is None or abs(lam) > 1 + 1e-12:
        return inconclusive(linear_form=False)
    ev = {"lambda": lam}
    radii = stability_radii(d)
    try:
        flags = dyn.stable_orbit_check(phi, d, 0j, radii)
        ev.update(stable_radii=radii, stable=all(flags))
    except dyn.PreconditionError as exc:
        ev["stable"] = f"unchecked: {exc}"
    return Verdict(Conclusion.NOT_TAU_P, "Cor. 18", ev)
