"""The full analysis pipeline for a scenario, producing a :class:`Report`."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np

from . import criteria as cr
from . import dynamics as dyn
from . import shiftlab as sl
from .domains import INFINITY, Kind, from_point, self_map_check
from .report import Report
from .scenario import Scenario

__all__ = ["worker_count", "analyze", "default_pairs", "run_witness"]


def worker_count() -> int:
    """Thread cap from SUPERCYC_THREADS (default: CPU count, at most 8)."""
    raw = os.environ.get("SUPERCYC_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = min(8, os.cpu_count() or 1)
    return max(1, n)


def _map(fn, items, workers: int):
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))  # map keeps input order


def default_pairs(scn: Scenario) -> list:
    pts = [p for p in scn.domain.grid if p is not INFINITY]
    return [(pts[len(pts) // 3], pts[(2 * len(pts)) // 3])]


def _converges_in(scn: Scenario, z) -> Optional[complex]:
    tr = dyn.iterate(scn.symbol, z, scn.horizons["orbitN"], scn.domain)
    if tr.classification == dyn.CONVERGES and tr.limit is not INFINITY \
            and scn.domain.contains(tr.limit):
        return tr.limit
    return None


def _quotients(scn: Scenario, rep: Report, workers: int) -> list:
    pairs = scn.pairs or default_pairs(scn)
    n = scn.horizons["quotientN"]
    tol = scn.tolerances["quotientCauchy"]
    jobs = [(i, j, z1, z2, f) for i, (z1, z2) in enumerate(pairs)
            for j, f in enumerate(scn.test_functions)]

    def run(job):
        i, j, z1, z2, f = job
        return cr.quotient_sequence(scn.symbol, scn.weight, f, z1, z2, n, scn.domain,
                                    cauchy_tol=tol)

    diags = _map(run, jobs, workers)
    for (i, j, z1, z2, f), dg in zip(jobs, diags):
        rep.csvs[f"quotient_{i}_{j}.csv"] = cr.quotient_csv(dg)
    verdicts = []
    tested = cr.quotient_verdict(diags, weight_form=False)
    tested.evidence.update(pairs=pairs, functions=[str(f) for f in scn.test_functions])
    # f-independent weight product when both orbits settle at points of X
    weight_diags = []
    for i, (z1, z2) in enumerate(pairs):
        if z1 is INFINITY or z2 is INFINITY:
            continue
        a, b = _converges_in(scn, z1), _converges_in(scn, z2)
        if a is not None and b is not None:
            dg = cr.quotient_sequence(scn.symbol, scn.weight, "1", z1, z2, n, scn.domain,
                                      cauchy_tol=tol)
            weight_diags.append(dg)
            rep.csvs[f"weight_quotient_{i}.csv"] = cr.quotient_csv(dg)
    if weight_diags:
        op = cr.quotient_verdict(weight_diags, weight_form=True)
        op.evidence.update(pairs=[dg.pair for dg in weight_diags])
        verdicts.append(("Prop. 4 weight-product quotient", op))
    verdicts.insert(0, ("Prop. 4 quotient sequences", tested))
    return verdicts


def _is_composition(scn: Scenario) -> bool:
    vals, ok = scn.weight.evaluate_many(scn.domain.points.astype(complex))
    return bool(ok.all() and np.all(vals == 1))


def _domain_specific(scn: Scenario) -> list:
    d, phi, w = scn.domain, scn.symbol, scn.weight
    out = []
    if d.kind == Kind.CLOSED_DISC:
        if scn.assertions["analytic"]:
            out.append(("Thm 6 disc algebra", cr.disc_algebra_verdict(phi, w, d)))
        rot = cr.disc_rotation_verdict(phi, w, d)
        if rot.is_obstruction:
            out.append(("Cor. 18 disc rotation", rot))
        iso = cr.isometry_verdict(phi, w, d)
        if iso.is_obstruction:
            out.append(("Thm 19 isometry", iso))
    elif d.kind == Kind.CIRCLE:
        out.append(("circle pipeline", cr.circle_verdict(
            phi, w, d, no_wandering_interval=scn.assertions["noWanderingInterval"])))
    elif d.kind in (Kind.PUNCTURED_PLANE, Kind.PUNCTURED_DISC):
        if _is_composition(scn):
            fn = cr.punctured_plane_verdict if d.kind == Kind.PUNCTURED_PLANE \
                else cr.punctured_disc_verdict
            out.append(("Thm 12 punctured domain", fn(phi, d)))
        else:
            out.append(("Thm 12 punctured domain",
                        cr.inconclusive(note="covers composition operators (w = 1) only")))
    return out


def analyze(scn: Scenario, *, workers: Optional[int] = None) -> Report:
    """Preconditions, dynamical detectors, quotients, then domain-specific results."""
    workers = worker_count() if workers is None else workers
    d, phi, w = scn.domain, scn.symbol, scn.weight
    rep = Report(scn.name, scn.echo())
    sm = self_map_check(d, phi)
    if not sm.ok:
        raise cr.SelfMapError(sm.violations)
    rep.add("self-map", None, grid_points=len(d), violations=0)

    zf = cr.zero_free_weight_check(w, d, scn.tolerances["zeroWeight"])
    rep.add("Prop. 2(i) zero-free weight",
            None if zf else cr.Verdict(cr.Conclusion.NOT_TAU_P, "Prop. 2(i)",
                                       {"zero_of_w": zf.witness[0]}),
            result="pass" if zf else "fail")
    uv = cr.univalence_check(phi, d)
    rep.add("Prop. 2(ii) univalence",
            None if uv else cr.Verdict(cr.Conclusion.NOT_TAU_P, "Prop. 2(ii)",
                                       {"equal_images_at": uv.witness}),
            result="pass" if uv else "fail")

    rep.add("Thm 4 compact Banach space",
            cr.compact_banach_obstruction(d, scn.assertions["nowhereVanishingMember"]))
    rep.add("Thm 5 dynamical detectors",
            cr.dynamical_obstructions(phi, w, d, orbit_n=scn.horizons["orbitN"]))
    for name, v in _quotients(scn, rep, workers):
        rep.add(name, v)
    for name, v in _domain_specific(scn):
        rep.add(name, v)
    rep.headline = _headline(rep)
    return rep


_PRIORITY = ("Prop. 2(i) zero-free weight", "Prop. 2(ii) univalence", "Thm 6 disc algebra",
             "Thm 19 isometry", "Cor. 18 disc rotation", "circle pipeline",
             "Thm 12 punctured domain", "Thm 5 dynamical detectors",
             "Prop. 4 weight-product quotient", "Thm 4 compact Banach space",
             "Prop. 4 quotient sequences")


def _headline(rep: Report) -> Optional[str]:
    names = {e.name: e for e in rep.entries}
    for name in _PRIORITY:
        e = names.get(name)
        if e is not None and e.verdict is not None and e.verdict.is_obstruction:
            return name
    for name in _PRIORITY:
        if name in names and names[name].verdict is not None:
            return name
    return None


# --------------------------------------------------------------------------
# witness subcommand


def _seq(data: dict, space: str) -> sl.SeqVector:
    re = np.asarray(data["re"], dtype=float)
    im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
    if im.shape != re.shape:
        raise ValueError("re and im must have equal length")
    return sl.SeqVector(int(data["lo"]), re + 1j * im, space)


def run_witness(scn: Scenario) -> Report:
    """Block construction and least-squares search for the scenario's shift."""
    cfg = scn.shift or {}
    rep = Report(scn.name, scn.echo())
    kind = cfg.get("kind", "bilateral")
    n_max = scn.horizons["witnessN"]
    if kind == "bilateral":
        T = sl.ShiftOperator.bilateral()
        space = "c0Z"
    else:
        T = sl.ShiftOperator.from_expression(cfg["weight"]) if "weight" in cfg \
            else sl.ShiftOperator.weighted()
        space = "c0N"
    targets = [_seq(t, space) for t in cfg.get("targets", [{"lo": -2, "re": [0, 0, 1, 0, 0]}])]
    tol = cfg.get("tolerance", 1e-9)
    if kind == "bilateral":
        cert = sl.construct_supercyclic_vector(targets, cfg.get("schedule"), tol=tol)
        recheck = cert.verify(targets)
        ok = all(e < tol for e in recheck)
        rep.csvs["certificate.csv"] = cert.to_csv()
        rep.add("Example 14 block construction",
                cr.Verdict(cr.Conclusion.WITNESS if ok else cr.Conclusion.INCONCLUSIVE,
                           "Example 14" if ok else "",
                           {"approximations": len(cert.approximations),
                            "max_window_error": cert.max_error,
                            "reverified_max_error": max(recheck),
                            "vector_support": cert.vector.support,
                            "decay_proxy": cert.vector.satisfies_decay_proxy()},
                           "finite-window approximations, not a density proof"))
        f = cert.vector
    else:
        f = _seq(cfg["vector"], space) if "vector" in cfg else sl.SeqVector.basis(1, space)
    rows = []
    for j, g in enumerate(targets):
        lo, hi = g.support if kind != "bilateral" else cert.windows[j]
        res = sl.witness_search(T, f, g, (lo, hi), n_max)
        rows.append(sl.Approximation(j, res.n, res.lam, res.error))
    rep.csvs["search.csv"] = sl.approximations_csv(rows)
    rep.add("witness search", None, best=[(r.target_id, r.n, r.lam, r.error) for r in rows],
            horizon=n_max, note="finite-scale evidence, not a proof")
    return rep
