import json
import random

import pytest

from supercyc.cli import main


@pytest.fixture
def scenario(tmp_path):
    def make(data, name="s.json"):
        p = tmp_path / name
        p.write_text(data if isinstance(data, str) else json.dumps(data))
        return str(p)
    return make


def test_analyze_ok(scenario, capsys):
    assert main(["analyze", scenario({"domain": "circle", "symbol": "-z"})]) == 0
    assert "verdict: NotTauPSupercyclic [Prop. 21]" in capsys.readouterr().out


def test_analyze_out_dir(scenario, tmp_path):
    out = tmp_path / "out"
    assert main(["analyze", scenario({"domain": "closed_disc", "symbol": "z/2"}),
                 "--out", str(out)]) == 0
    assert (out / "report.txt").exists() and (out / "report.json").exists()
    assert list(out.glob("quotient_*.csv"))


@pytest.mark.parametrize("data", [
    {"domain": "circle"},
    {"domain": "circle", "symbol": "z+"},
    {"domain": "closed_disc", "symbol": "2*z"},
    "not json",
])
def test_usage_errors_exit_2(scenario, data, capsys):
    assert main(["analyze", scenario(data)]) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_missing_file_and_bad_args(capsys):
    assert main(["analyze", "/nonexistent.json"]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["reproduce", "nope"]) == 2
    assert main(["reproduce", "prop21-periodic", "--refine", "0"]) == 2
    assert main(["--version"]) == 0


def test_orbit_and_quotient_csv(scenario, tmp_path):
    s = scenario({"domain": "closed_disc", "symbol": "z/2", "weight": "1+z"})
    assert main(["orbit", s, "--from", "1", "--steps", "5", "--csv", str(tmp_path / "o.csv")]) == 0
    assert (tmp_path / "o.csv").read_text().splitlines()[0] == "step,re,im"
    assert main(["quotient", s, "--z1", "1", "--z2", "0", "--steps", "8",
                 "--csv", str(tmp_path / "q.csv")]) == 0
    assert len((tmp_path / "q.csv").read_text().splitlines()) == 10
    assert main(["quotient", s, "--z1", "1", "--z2", "1"]) == 2


def test_spectrum(tmp_path, capsys):
    p = tmp_path / "m.json"
    p.write_text(json.dumps({"matrix": [[1, 0], [0, [0.5, 0]]]}))
    assert main(["spectrum", str(p)]) == 0
    assert "[Cor. 10]" in capsys.readouterr().out
    t = tmp_path / "m.txt"
    t.write_text("0 0.5\n0 0\n")
    assert main(["spectrum", str(t)]) == 0
    assert "Inconclusive" in capsys.readouterr().out
    bad = tmp_path / "bad.json"
    bad.write_text('{"matrix": [[1, 2, 3]]}')
    assert main(["spectrum", str(bad)]) == 2


def test_witness(scenario, capsys):
    s = scenario({"domain": "lattice", "symbol": "z+1",
                  "shift": {"kind": "bilateral",
                            "targets": [{"lo": -1, "re": [1, 2, 3]}]}})
    assert main(["witness", s]) == 0
    assert "WitnessExhibited [Example 14]" in capsys.readouterr().out
    s = scenario({"domain": "lattice", "symbol": "z+1",
                  "shift": {"kind": "unilateral", "weight": "1/(z+2)",
                            "vector": {"lo": 0, "re": [0, 0, 0, 1]},
                            "targets": [{"lo": 0, "re": [1]}]},
                  "horizons": {"witnessN": 8}}, "u.json")
    assert main(["witness", s]) == 0


def test_reproduce_list(capsys):
    assert main(["reproduce", "--list"]) == 0
    assert "thm6-disc" in capsys.readouterr().out.split()


def test_fuzzed_scenarios_never_crash(scenario):
    rng = random.Random(11)
    keys = ["domain", "symbol", "weight", "testFunctions", "pairs", "horizons"]
    values = ["circle", "closed_disc", "lattice", "z", "z/2", "-z", "1/z", "(", 3, [],
              ["1"], [[0.5, 0.25]], {"orbitN": 8}, None, "punctured_plane", "2*z"]
    for k in range(60):
        data = {key: rng.choice(values) for key in rng.sample(keys, rng.randint(0, 6))}
        code = main(["analyze", scenario(data, f"f{k}.json")])
        assert code in (0, 2, 3)
