"""Pinned reproductions of the separating examples.  Every preset fixes its
grids, horizons and tolerances; ``refine`` multiplies grid resolutions."""

from __future__ import annotations

from typing import Callable

import numpy as np

from . import criteria as cr
from . import shiftlab as sl
from .analysis import analyze, worker_count
from .domains import closed_disc, compactified_lattice, lattice, punctured_plane
from .report import Report
from .scenario import scenario_from_dict

__all__ = ["PRESETS", "CORE_PRESETS", "run_preset"]

GOLDEN_OMEGA = 0.381966011250105  # (3 - sqrt 5) / 2, badly approximable
ARNOLD = f"z*exp(i*(2*pi*{GOLDEN_OMEGA}+0.05*im(z)))"


def _domain(kind: str, refine: int, **params) -> dict:
    if "resolution" in params:
        params["resolution"] *= refine
    if "rings" in params:
        params["rings"] *= refine
    return {"kind": kind, **params}


def _scenario(name, refine, domain, symbol, weight, headline=None, **extra):
    data = {"name": name, "domain": domain, "symbol": symbol, "weight": weight, **extra}
    rep = analyze(scenario_from_dict(data))
    if headline:
        rep.headline = headline
    return rep


def thm6_disc(refine: int = 1) -> Report:
    return _scenario("thm6-disc", refine, _domain("closed_disc", refine, resolution=16),
                     "(z+0.5)/(1+0.5*z)", "exp(z)", "Thm 6 disc algebra",
                     assertions={"analytic": True})


def prop4_quotient(refine: int = 1) -> Report:
    return _scenario("prop4-quotient", refine, _domain("closed_disc", refine, resolution=16),
                     "z/2", "1+z", "Prop. 4 weight-product quotient",
                     testFunctions=["1"], pairs=[[1, 0]], horizons={"quotientN": 512})


def prop22_rotation(refine: int = 1) -> Report:
    return _scenario("prop22-rotation", refine, _domain("circle", refine, resolution=16),
                     "exp(i*0.3)*z", "z", "circle pipeline")


def prop21_periodic(refine: int = 1) -> Report:
    return _scenario("prop21-periodic", refine, _domain("circle", refine, resolution=16),
                     "-z", "1", "circle pipeline")


def thm23_arnold(refine: int = 1) -> Report:
    return _scenario("thm23-arnold", refine, _domain("circle", refine, resolution=16),
                     ARNOLD, "1", "circle pipeline",
                     assertions={"noWanderingInterval": True})


def thm12_punctured_disc(refine: int = 1) -> Report:
    return _scenario("thm12-punctured-disc", refine,
                     _domain("punctured_disc", refine, resolution=16), "z/(2-z)", "1",
                     "Thm 12 punctured domain")


def thm12_punctured_plane(refine: int = 1) -> Report:
    d = punctured_plane(resolution=16 * refine)
    rep = Report("thm12-punctured-plane", {"domain": d.to_dict() | {"grid": len(d)},
                                           "symbols": ["2*z", "0.5/z", "exp(i)*z"]})
    for phi in ("2*z", "0.5/z", "exp(i)*z"):
        uv = cr.univalence_check(phi, d)
        rep.add(f"Prop. 2(ii) univalence: {phi}", None, result="pass" if uv else "fail")
        rep.add(f"Thm 12 classifier: {phi}", cr.punctured_plane_verdict(phi, d))
    return rep


def thm19_isometry(refine: int = 1) -> Report:
    return _scenario("thm19-isometry", refine, _domain("closed_disc", refine, resolution=16),
                     "conj(z)", "exp(i*re(z))", "Thm 19 isometry")


def cor18_disc_rotation(refine: int = 1) -> Report:
    return _scenario("cor18-disc-rotation", refine,
                     _domain("closed_disc", refine, resolution=16),
                     "exp(i*0.7)*z", "exp(z)", "Cor. 18 disc rotation")


EX14_TARGETS = (
    sl.SeqVector(-2, [0, 0, 1, 0, 0]),
    sl.SeqVector(-3, [1, -1, 2, 0.5, 2, -1, 1]),
    sl.SeqVector(-4, [1j, 0, 0, 3, 0, 0, 0, 0, -1j]),
    sl.SeqVector(-1, [0.25, -0.5 + 0.5j, 0.25]),
)


def ex14_bilateral_shift(refine: int = 1) -> Report:
    zhat = compactified_lattice(-16, 16)
    zz = lattice(-16, 16)
    rep = Report("ex14-bilateral-shift", {"symbol": "z+1", "weight": "1",
                                          "cInfZ": zhat.to_dict(), "c0Z": zz.to_dict()})
    rep.add("Thm 4 on c_inf(Z)", cr.compact_banach_obstruction(zhat, True))
    rep.add("Thm 4 on c0(Z)", cr.compact_banach_obstruction(zz, False))
    rep.add("Thm 5 dynamical detectors on c_inf(Z)",
            cr.dynamical_obstructions("z+1", "1", zhat))
    targets = list(EX14_TARGETS)
    cert = sl.construct_supercyclic_vector(targets)
    recheck = cert.verify(targets)
    ok = all(e < 1e-9 for e in recheck)
    rep.csvs["certificate.csv"] = cert.to_csv()
    rep.add("tau_p witness certificate",
            cr.Verdict(cr.Conclusion.WITNESS if ok else cr.Conclusion.INCONCLUSIVE,
                       "Example 14" if ok else "",
                       {"targets": len(targets), "offsets": [a.n for a in cert.approximations],
                        "max_window_error": cert.max_error,
                        "reverified_max_error": max(recheck),
                        "decay_proxy": cert.vector.satisfies_decay_proxy(),
                        "vector_support": cert.vector.support},
                       "finite-window approximations, not a density proof"))
    B = sl.ShiftOperator.bilateral()
    rows = []
    for j, g in enumerate(targets):
        res = sl.witness_search(B, cert.vector, g, cert.windows[j], cert.vector.hi + 8)
        rows.append(sl.Approximation(j, res.n, res.lam, res.error))
    rep.csvs["search.csv"] = sl.approximations_csv(rows)
    rep.add("least-squares witness search", None,
            best=[(r.target_id, r.n, r.error) for r in rows])
    rep.headline = "Thm 4 on c_inf(Z)"
    return rep


def prop16_weighted_shift(refine: int = 1) -> Report:
    nhat = compactified_lattice(0, 32)
    B = sl.ShiftOperator.from_expression("1/(z+2)")
    rep = Report("prop16-weighted-shift", {"symbol": "z+1", "weight": "1/(z+2)",
                                           "cInfN": nhat.to_dict()})
    rep.add("Thm 4 on c_inf(N)", cr.compact_banach_obstruction(nhat, True))
    rep.add("Lemma 15, span{f} + c_inf (codimension 2)",
            sl.cyclicity_structure_check(2, True))
    rep.add("Lemma 15, c_inf (codimension 1)", sl.cyclicity_structure_check(1, True))
    ws = B.weights(1, 1024)
    g1 = sl.preimage_in_cinf(B, sl.SeqVector.basis(0, "c0N"))
    g2 = sl.preimage_in_cinf(B, sl.SeqVector(0, ws, "c0N"))
    g3 = sl.preimage_in_cinf(B, sl.SeqVector(0, np.ones(1024), "cInfN"))
    rep.add("preimages in c_inf", None,
            e0=g1.limit if g1 is not None else None,
            f_equals_weights=g2.limit if g2 is not None else None,
            ones="none (tail diverges)" if g3 is None else g3.limit)
    res = sl.witness_search(B, sl.SeqVector.basis(6, "c0N"), sl.SeqVector.basis(0, "c0N"),
                            (0, 6), 16)
    rep.add("weighted-shift witness search", None, n=res.n, lam=res.lam, error=res.error,
            note="finite-scale evidence, not a proof")
    rep.add("weights decay", None, decays=B.weights_decay())
    rep.headline = "Lemma 15, span{f} + c_inf (codimension 2)"
    return rep


def ex17_multiplication(refine: int = 1) -> Report:
    d = closed_disc(resolution=16 * refine)
    rep = Report("ex17-multiplication", {"operator": "M_z f = z f", "symbol": "z",
                                         "weight": "z", "grid": len(d)})
    zf = cr.zero_free_weight_check("z", d)
    rep.add("Prop. 2(i) zero-free weight",
            None if zf else cr.Verdict(cr.Conclusion.NOT_TAU_P, "Prop. 2(i)",
                                       {"zero_of_w": zf.witness[0]}))
    rep.add("Example 17 multiplication operator",
            sl.multiplication_example(16 * refine, 24))
    rep.headline = "Example 17 multiplication operator"
    return rep


PRESETS: dict = {
    "thm6-disc": thm6_disc,
    "prop22-rotation": prop22_rotation,
    "prop21-periodic": prop21_periodic,
    "thm12-punctured-disc": thm12_punctured_disc,
    "thm12-punctured-plane": thm12_punctured_plane,
    "ex14-bilateral-shift": ex14_bilateral_shift,
    "prop16-weighted-shift": prop16_weighted_shift,
    "ex17-multiplication": ex17_multiplication,
    "thm19-isometry": thm19_isometry,
    "cor18-disc-rotation": cor18_disc_rotation,
    "prop4-quotient": prop4_quotient,
    "thm23-arnold": thm23_arnold,
}
CORE_PRESETS = tuple(list(PRESETS)[:10])


def run_preset(name: str, refine: int = 1) -> Report:
    try:
        fn: Callable[[int], Report] = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
    return fn(refine)
