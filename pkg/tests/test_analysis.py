import pytest

from supercyc.analysis import analyze, worker_count
from supercyc.criteria import SelfMapError
from supercyc.scenario import scenario_from_dict


def run(**data):
    return analyze(scenario_from_dict(data), workers=1)


def test_zero_weight_takes_headline():
    rep = run(domain="closed_disc", symbol="z/2", weight="z")
    assert rep.final.citation == "Prop. 2(i)"


def test_weight_product_entry_when_orbits_converge():
    rep = run(domain="closed_disc", symbol="z/2", weight="1+z", pairs=[[1, 0]])
    entry = rep.entry("Prop. 4 weight-product quotient")
    assert entry.verdict.evidence["scope"] == "operator"
    assert "weight_quotient_0.csv" in rep.csvs


def test_punctured_with_weight_is_inconclusive():
    rep = run(domain="punctured_plane", symbol="2*z", weight="2")
    assert rep.entry("Thm 12 punctured domain").verdict.citation == ""


def test_self_map_failure():
    with pytest.raises(SelfMapError):
        run(domain="closed_disc", symbol="z+1")


def test_threads_do_not_change_results():
    data = {"domain": "closed_disc", "symbol": "z/2", "weight": "1+z",
            "testFunctions": ["1", "exp(z)", "2+z"], "pairs": [[1, 0], [0.5, -0.5]]}
    a = analyze(scenario_from_dict(data), workers=1)
    b = analyze(scenario_from_dict(data), workers=4)
    assert a.render() == b.render() and a.csvs == b.csvs


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("SUPERCYC_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("SUPERCYC_THREADS", "junk")
    assert worker_count() >= 1
