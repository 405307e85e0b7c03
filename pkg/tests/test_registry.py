import time

import numpy as np
import pytest

from maxprop import build_example, example_names, get_example, measure_mass
from maxprop.cli import main

ALL_NAMES = ("1.1", "1.2", "2.1", "2.2", "2.3", "2.4", "2.5", "2.6")


def test_registry_has_one_entry_per_example():
    assert tuple(example_names()) == ALL_NAMES


@pytest.mark.parametrize("name", ALL_NAMES)
def test_entry_measure_mass_matches_declaration(name):
    s = build_example(name)
    m = s.measure
    assert measure_mass(m) == pytest.approx(m.mass, rel=1e-12)


@pytest.mark.parametrize("name", ALL_NAMES)
def test_entry_runs_end_to_end_under_a_minute(name, capsys):
    t0 = time.perf_counter()
    code = main(["verify-smp", "--example", name])
    elapsed = time.perf_counter() - t0
    out = capsys.readouterr().out
    entry = get_example(name)
    assert elapsed < 60.0, f"{name} took {elapsed:.1f}s"
    expected_smp = entry.expected.get("smp")
    if expected_smp:
        assert f"smp: {expected_smp}" in out
        assert code == (1 if expected_smp == "violated" else 0)
    if entry.expected.get("controllable") is not None \
            and "controllable:" in out:
        want = str(entry.expected["controllable"]).lower()
        assert f"controllable: {want}" in out


def test_entry_expected_outcomes_fields():
    for name in ALL_NAMES:
        entry = get_example(name)
        assert entry.description
        assert "smp" in entry.expected
