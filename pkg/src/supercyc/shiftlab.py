"""Sequence-space experiments: backward shifts on two-sided and one-sided
sequence spaces, supercyclic-vector construction by block placement,
projective witness search, and the multiplication operator on the disc
algebra.

Vectors are finitely supported.  Membership in c0 / c_inf is asserted
through proxies on the stored entries (decay of the outer tail, Cauchy
tail for the limit), never proved.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .criteria import Conclusion, Verdict
from .domains import closed_disc
from .expr import as_expression

__all__ = [
    "SPACE_TAGS", "SeqVector", "ShiftOperator", "Approximation", "WitnessCertificate",
    "SearchResult", "ScheduleError", "BudgetError", "apply_shift",
    "construct_supercyclic_vector", "witness_search", "cyclicity_structure_check",
    "preimage_in_cinf", "multiplication_example", "decay_proxy", "tail_limit",
]

SPACE_TAGS = ("c0Z", "cInfZ", "c0N", "cInfN", "lInf")
DECAY_RATIO = 1e-6
TAIL_CAUCHY_TOL = 1e-8
MIN_TAIL_SPAN = 64


class ScheduleError(ValueError):
    pass


class BudgetError(ValueError):
    pass


def _outer(n: int) -> int:
    return max(1, math.ceil(0.1 * n))


def decay_proxy(entries: np.ndarray) -> bool:
    """c0 stand-in: the outer 10% of the support (both ends) is negligible."""
    a = np.abs(np.asarray(entries))
    if a.size == 0 or a.max() == 0:
        return True
    k = _outer(a.size)
    edge = max(a[:k].max(), a[-k:].max())
    return bool(edge <= DECAY_RATIO * a.max())


def tail_limit(entries: np.ndarray, tol: float = TAIL_CAUCHY_TOL) -> Optional[complex]:
    """Mean of the last max(4, 10%) entries when their spread is within tol."""
    a = np.asarray(entries, dtype=complex)
    if a.size == 0:
        return 0j
    k = min(a.size, max(4, _outer(a.size)))
    t = a[-k:]
    if np.max(np.abs(t - t[-1])) <= tol * max(1.0, abs(t[-1])):
        return complex(t.mean())
    return None


@dataclass(frozen=True, eq=False)
class SeqVector:
    """Entries at indices lo, lo+1, ..., lo+len-1; zero elsewhere."""

    lo: int
    entries: np.ndarray
    space: str = "c0Z"
    limit: Optional[complex] = None

    def __post_init__(self):
        if self.space not in SPACE_TAGS:
            raise ValueError(f"unknown space tag {self.space!r}")
        e = np.array(self.entries, dtype=complex).ravel()
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "lo", int(self.lo))
        if self.space.endswith("N") and self.lo < 0 and np.any(e[: -self.lo] != 0):
            raise ValueError("one-sided sequences have no negative indices")

    @property
    def hi(self) -> int:
        return self.lo + len(self.entries) - 1

    @property
    def support(self) -> tuple:
        return (self.lo, self.hi)

    @property
    def one_sided(self) -> bool:
        return self.space.endswith("N") or self.space == "lInf"

    def __getitem__(self, j: int) -> complex:
        k = j - self.lo
        return complex(self.entries[k]) if 0 <= k < len(self.entries) else 0j

    def window(self, lo: int, hi: int) -> np.ndarray:
        out = np.zeros(hi - lo + 1, dtype=complex)
        a, b = max(lo, self.lo), min(hi, self.hi)
        if a <= b:
            out[a - lo:b - lo + 1] = self.entries[a - self.lo:b - self.lo + 1]
        return out

    def sup_norm(self) -> float:
        return float(np.abs(self.entries).max()) if self.entries.size else 0.0

    def satisfies_decay_proxy(self) -> bool:
        return decay_proxy(self.entries)

    def with_space(self, space: str) -> "SeqVector":
        lim = tail_limit(self.entries) if space.startswith("cInf") else None
        return SeqVector(self.lo, self.entries, space, lim)

    def _binary(self, other: "SeqVector", op) -> "SeqVector":
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        return SeqVector(lo, op(self.window(lo, hi), other.window(lo, hi)), self.space)

    def __add__(self, other: "SeqVector") -> "SeqVector":
        return self._binary(other, np.add)

    def __sub__(self, other: "SeqVector") -> "SeqVector":
        return self._binary(other, np.subtract)

    def __mul__(self, c) -> "SeqVector":
        return SeqVector(self.lo, complex(c) * self.entries, self.space)

    __rmul__ = __mul__

    def equals(self, other: "SeqVector", tol: float = 0.0) -> bool:
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        return bool(np.all(np.abs(self.window(lo, hi) - other.window(lo, hi)) <= tol))

    @classmethod
    def basis(cls, j: int, space: str = "c0Z") -> "SeqVector":
        return cls(j, [1.0], space)

    @classmethod
    def indicator(cls, a: int, b: int, space: str = "c0Z") -> "SeqVector":
        return cls(a, np.ones(b - a + 1), space)

    @classmethod
    def zero(cls, space: str = "c0Z") -> "SeqVector":
        return cls(0, [], space)

    def to_dict(self) -> dict:
        return {"lo": self.lo, "re": self.entries.real.tolist(),
                "im": self.entries.imag.tolist(), "space": self.space}


def harmonic_weight(j: int) -> float:
    return 1.0 / (j + 1)


@dataclass
class ShiftOperator:
    """Bilateral backward shift (Bf)_j = f_{j+1}, or the unilateral weighted
    backward shift B_w e_j = w_j e_{j-1}, B_w e_0 = 0, with w_j > 0 for j >= 1."""

    kind: str = "bilateral"
    weight: Callable[[int], float] = harmonic_weight

    def __post_init__(self):
        if self.kind not in ("bilateral", "unilateral"):
            raise ValueError(f"unknown shift kind {self.kind!r}")

    @classmethod
    def bilateral(cls) -> "ShiftOperator":
        return cls("bilateral")

    @classmethod
    def weighted(cls, weights=None) -> "ShiftOperator":
        """``weights`` is None (w_j = 1/(j+1)), a callable j -> w_j, or a list (w_1, w_2, ...)."""
        if weights is None:
            return cls("unilateral", harmonic_weight)
        if callable(weights):
            return cls("unilateral", weights)
        ws = [float(v) for v in weights]

        def w(j: int) -> float:
            if not 1 <= j <= len(ws):
                raise IndexError(f"weight w_{j} not supplied (have w_1..w_{len(ws)})")
            return ws[j - 1]
        return cls("unilateral", w)

    @classmethod
    def from_expression(cls, source) -> "ShiftOperator":
        """Weighted composition form: (B f)(i) = W(i) f(i+1), so w_j = W(j-1)."""
        e = as_expression(source)

        def w(j: int) -> float:
            v = e(complex(j - 1))
            if abs(v.imag) > 1e-12 or v.real <= 0:
                raise ValueError(f"weight at {j} is not positive: {v}")
            return v.real
        return cls("unilateral", w)

    def weights(self, lo: int, hi: int) -> np.ndarray:
        return np.array([self.weight(j) for j in range(lo, hi + 1)], dtype=float)

    def weights_decay(self, probe: int = 1 << 20) -> bool:
        if self.kind == "bilateral":
            return False
        try:
            tail = [self.weight(probe >> s) for s in range(4)]
        except (IndexError, ValueError):
            return False
        return max(tail) < 1e-3


def _shift_once(T: ShiftOperator, f: SeqVector) -> SeqVector:
    if T.kind == "bilateral":
        return SeqVector(f.lo - 1, f.entries, f.space, f.limit)
    # (B_w f)_i = w_{i+1} f_{i+1} for i >= 0
    if f.hi < 1:
        return SeqVector(0, [], f.space)
    lo = max(f.lo, 1)
    vals = f.entries[lo - f.lo:] * T.weights(lo, f.hi)
    return SeqVector(lo - 1, vals, f.space)


def apply_shift(T: ShiftOperator, f: SeqVector, n: int = 1) -> SeqVector:
    """T^n f by n single steps (the weighted case multiplies one weight per step)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if T.kind == "bilateral":
        return SeqVector(f.lo - n, f.entries, f.space, f.limit)
    out = f
    for _ in range(n):
        out = _shift_once(T, out)
    space = out.space
    if n > 0 and T.weights_decay() and space in ("cInfN", "lInf"):
        # a decaying weight sends bounded sequences into c0
        space = "c0N"
    return SeqVector(out.lo, out.entries, space)


# --------------------------------------------------------------------------
# supercyclic vector by block placement


@dataclass
class Approximation:
    target_id: int
    n: int
    lam: complex
    error: float


@dataclass
class WitnessCertificate:
    vector: SeqVector
    approximations: list = field(default_factory=list)
    windows: list = field(default_factory=list)
    tolerance: float = 1e-9

    @property
    def max_error(self) -> float:
        return max((a.error for a in self.approximations), default=0.0)

    def verify(self, targets: Sequence[SeqVector], T: Optional[ShiftOperator] = None) -> list:
        """Recompute every window error from scratch via :func:`apply_shift`."""
        T = T or ShiftOperator.bilateral()
        out = []
        for a, (lo, hi) in zip(self.approximations, self.windows):
            v = apply_shift(T, self.vector, a.n).window(lo, hi)
            g = targets[a.target_id].window(lo, hi)
            out.append(float(np.max(np.abs(a.lam * v - g))))
        return out

    def to_csv(self) -> str:
        return approximations_csv(self.approximations)


def approximations_csv(rows: Sequence[Approximation]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["targetId", "n", "re_lambda", "im_lambda", "error"])
    for a in rows:
        w.writerow([a.target_id, a.n, format(a.lam.real, ".12g"),
                    format(a.lam.imag, ".12g"), format(a.error, ".12g")])
    return buf.getvalue()


def _half_width(g: SeqVector) -> int:
    nz = np.flatnonzero(g.entries)
    if nz.size == 0:
        return 0
    return int(max(abs(g.lo + nz[0]), abs(g.lo + nz[-1])))


def default_schedule(count: int) -> list:
    return [10.0 ** (-3 * j) for j in range(1, count + 1)]


def construct_supercyclic_vector(targets: Sequence[SeqVector], schedule: Optional[Sequence[float]] = None,
                                 *, tol: float = 1e-9, budget: int = 1 << 20) -> WitnessCertificate:
    """Place eps_j * g_j around offset n_j so that B^{n_j} f / eps_j equals g_j on
    the window [-K_j, K_j].  Windows of consecutive blocks are separated by a
    guard band, so no block leaks into another block's window."""
    targets = list(targets)
    if not targets:
        raise ValueError("need at least one target")
    eps = list(schedule) if schedule is not None else default_schedule(len(targets))
    if len(eps) < len(targets):
        raise ScheduleError(f"schedule has {len(eps)} entries for {len(targets)} targets")
    eps = [float(e) for e in eps[: len(targets)]]
    if any(not (e > 0 and math.isfinite(e)) for e in eps):
        raise ScheduleError("schedule entries must be positive")
    for j in range(1, len(eps)):
        if eps[j] > 1e-3 * eps[j - 1]:
            raise ScheduleError(
                f"eps_{j + 1} = {eps[j]:g} exceeds 1e-3 * eps_{j} = {1e-3 * eps[j - 1]:g}")
    K = [_half_width(g) for g in targets]
    offsets = [0]
    for j in range(1, len(targets)):
        offsets.append(offsets[-1] + K[j - 1] + K[j] + 8)
    if offsets[-1] + K[-1] > budget:
        raise BudgetError(f"offsets reach {offsets[-1] + K[-1]}, beyond budget {budget}")
    lo, hi = -K[0], offsets[-1] + K[-1]
    core = np.zeros(hi - lo + 1, dtype=complex)
    for g, n, e, k in zip(targets, offsets, eps, K):
        core[n - k - lo:n + k - lo + 1] = e * g.window(-k, k)
    # zero padding so the outer tenth of the stored support is empty
    pad = math.ceil(core.size / 8) + 1
    entries = np.concatenate([np.zeros(pad), core, np.zeros(pad)])
    f = SeqVector(lo - pad, entries, "c0Z")
    T = ShiftOperator.bilateral()
    cert = WitnessCertificate(f, tolerance=tol)
    for j, (g, n, e, k) in enumerate(zip(targets, offsets, eps, K)):
        lam = complex(1.0 / e)
        v = apply_shift(T, f, n).window(-k, k)
        err = float(np.max(np.abs(lam * v - g.window(-k, k))))
        if err >= tol:
            raise ScheduleError(f"target {j}: window error {err:.3g} not below {tol:g}")
        cert.approximations.append(Approximation(j, n, lam, err))
        cert.windows.append((-k, k))
    return cert


@dataclass
class SearchResult:
    n: int
    lam: complex
    error: float
    table: list = field(default_factory=list)


def witness_search(T: ShiftOperator, f: SeqVector, g: SeqVector, window: tuple,
                   n_max: int) -> SearchResult:
    """Best (n, lambda) over n <= n_max for lambda T^n f ~ g on the window,
    lambda fitted by least squares, scored by the max error; ties go to the
    smallest n."""
    lo, hi = int(window[0]), int(window[1])
    if hi < lo:
        raise ValueError("empty window")
    gw = g.window(lo, hi)
    best = None
    table = []
    v = f
    for n in range(n_max + 1):
        if n > 0:
            v = _shift_once(T, v)
        x = v.window(lo, hi)
        den = float(np.vdot(x, x).real)
        lam = complex(np.vdot(x, gw) / den) if den > 0 else 0j
        err = float(np.max(np.abs(lam * x - gw)))
        row = Approximation(0, n, lam, err)
        table.append(row)
        if best is None or err < best.error:
            best = row
    return SearchResult(best.n, best.lam, best.error, table)


# --------------------------------------------------------------------------
# structure checks


def cyclicity_structure_check(codimension: int, image_inside: bool) -> Verdict:
    """A closed tau_p-dense subspace of codimension > 1 that contains the
    range of the extended operator forbids cyclicity."""
    ev = {"codimension": int(codimension), "image_inside_subspace": bool(image_inside)}
    if codimension > 1 and image_inside:
        return Verdict(Conclusion.NOT_CYCLIC, "Lemma 15", ev)
    return Verdict(Conclusion.INCONCLUSIVE, "", ev)


def preimage_in_cinf(T: ShiftOperator, f: SeqVector,
                     tol: float = TAIL_CAUCHY_TOL) -> Optional[SeqVector]:
    """g with B_w g = f (g_0 = 0, g_{n+1} = f_n / w_{n+1}) when its tail is Cauchy.

    The tail is judged on the last max(4, 10%) entries of a span of at least
    64 indices; a shorter f is read as finitely supported and zero-extended.
    """
    if T.kind != "unilateral":
        raise ValueError("preimage is defined for the unilateral weighted shift")
    hi = max(f.hi, MIN_TAIL_SPAN - 2)
    fw = f.window(0, hi)
    w = T.weights(1, hi + 1)
    if np.any(w <= 0):
        raise ZeroDivisionError("weights must be positive")
    g = np.concatenate([[0], fw / w])
    lim = tail_limit(g[1:], tol)
    if lim is None:
        return None
    return SeqVector(0, g, "cInfN", lim)


# --------------------------------------------------------------------------
# multiplication operator on the disc algebra

MULT_TARGETS = ("exp(z)", "1/(2-z)", "z")
MAX_FIT_DEGREE = 40


def polynomial_fit_error(target, z: np.ndarray, degree: int) -> float:
    """Sup error on z of the least-squares polynomial of the given degree."""
    vals, ok = as_expression(target).evaluate_many(z)
    if not ok.all():
        raise ValueError(f"target {target} not evaluable on the grid")
    V = np.vander(z, degree + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(V, vals, rcond=None)
    return float(np.max(np.abs(V @ coef - vals)))


def multiplication_example(grid_resolution: int = 16, max_degree: int = 24,
                           targets: Sequence[str] = MULT_TARGETS,
                           degrees: Optional[Sequence[int]] = None) -> Verdict:
    """M_z f = z f on the disc algebra: polynomial density (cyclicity of the
    constant 1) as fit errors, and the structural obstruction from the
    independent point-evaluation eigenvectors of the adjoint."""
    if max_degree > MAX_FIT_DEGREE:
        raise ValueError(f"degree capped at {MAX_FIT_DEGREE} (fits become ill-conditioned)")
    # enough angles that z^k stays resolved on the outer ring
    d = closed_disc(resolution=max(grid_resolution, 2 * max_degree + 2))
    z = d.points.astype(complex)
    if degrees is None:
        degrees = sorted({1, 2, 4, 8, 12, 16, 24, 32, max_degree} & set(range(1, max_degree + 1)))
    fits = {str(t): [(k, polynomial_fit_error(t, z, k)) for k in degrees] for t in targets}
    # delta_z o M_z = z delta_z: one eigenvector of the adjoint per interior point
    interior = z[np.abs(z) < 1]
    ev = {"grid_points": int(z.size), "fits": fits,
          "adjoint_eigenvalues_sampled": int(np.unique(np.round(interior, 12)).size)}
    return Verdict(Conclusion.NOT_TAU_P, "Example 17", ev)
