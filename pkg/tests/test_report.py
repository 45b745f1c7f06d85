import json

from supercyc.criteria import Conclusion, Verdict
from supercyc.domains import INFINITY
from supercyc.presets import run_preset
from supercyc.report import Report, fmt, plain


def test_plain_formats():
    assert plain(1 / 3) == "0.333333333333"
    assert plain(1 - 2j) == "1-2i"
    assert plain(-0.0) == "0"
    assert plain(2j) == "2i"
    assert plain(INFINITY) == "inf"
    assert fmt([1, 0.5]) == '[1, "0.5"]'
    assert plain(Verdict(Conclusion.NOT_WEAK, "Thm 4"))["conclusion"] == "NotWeaklySupercyclic"


def test_render_ends_with_final_verdict():
    rep = Report("t", {"a": 1})
    rep.add("first", None, note="info only")
    rep.add("second", Verdict(Conclusion.NOT_TAU_P, "Prop. 4", {"bound": 1.0}))
    text = rep.render()
    assert text.endswith("verdict: NotTauPSupercyclic [Prop. 4] (second)\n")
    assert rep.conclusions() == [("second", "NotTauPSupercyclic", "Prop. 4")]


def test_write_outputs(tmp_path):
    rep = Report("t", {})
    rep.add("x", Verdict(Conclusion.INCONCLUSIVE))
    rep.csvs["a.csv"] = "n\n0\n"
    paths = rep.write(tmp_path, "out")
    assert sorted(p.name for p in paths) == ["a.csv", "out.json", "out.txt"]
    data = json.loads((tmp_path / "out.json").read_text())
    assert data["final"]["conclusion"] == "Inconclusive" and data["csv"] == ["a.csv"]


def test_report_determinism():
    for name in ("prop21-periodic", "ex14-bilateral-shift", "prop4-quotient"):
        a, b = run_preset(name), run_preset(name)
        assert a.render() == b.render()
        assert json.dumps(a.to_json(), sort_keys=True) == json.dumps(b.to_json(), sort_keys=True)
        assert a.csvs == b.csvs
