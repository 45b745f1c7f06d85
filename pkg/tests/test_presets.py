import time

import pytest

from supercyc.presets import CORE_PRESETS, PRESETS, run_preset


@pytest.mark.parametrize("name", list(PRESETS))
def test_preset_runs_at_desk_scale(name):
    t0 = time.perf_counter()
    rep = run_preset(name)
    assert time.perf_counter() - t0 < 30
    assert rep.final is not None and rep.final.verdict.is_obstruction


def test_core_presets_listed_first():
    assert len(CORE_PRESETS) == 10 and set(CORE_PRESETS) < set(PRESETS)


def test_unknown_preset():
    with pytest.raises(KeyError):
        run_preset("nope")
