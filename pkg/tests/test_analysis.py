import csv
import io
from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from anoncontract import Instance, solve_uniform
from anoncontract.analysis import (
    CSV_COLUMNS,
    NotApplicable,
    Skipped,
    gap_report,
    subset_inequality_failures,
    sweep,
    sweep_rows,
    thin_margin_premise,
)
from anoncontract.generators import gen_equal_q_harmonic, gen_random
from anoncontract.noll import harmonic

from .conftest import instances


def test_equal_q_report():
    rep = gap_report(gen_equal_q_harmonic("0.5", "0.1", 3))
    assert rep.sw == F(11, 15) and rep.ua == F(2, 5) and rep.sw_over_ua == F(11, 6)
    assert isinstance(rep.noll_full, NotApplicable)


def test_density_cap_flag():
    rep = gap_report(Instance.from_lists(["0.5", "0.5"], ["0.1", "0.3"]), alpha="0.6")
    assert rep.flags["density_cap_premise"] and rep.flags["density_cap"]
    rep = gap_report(Instance.from_lists(["0.5", "0.5"], ["0.1", "0.3"]), alpha="0.5")
    assert rep.flags["density_cap_premise"] is False and rep.flags["density_cap"] is None


def test_single_agent_collapse():
    rep = gap_report(Instance.from_lists(["0.5"], ["0.1"]))
    assert rep.sw == rep.ua == rep.opt_ll == rep.noll_log == rep.noll_full == F(2, 5)


def test_large_instance_skips_oracle():
    rep = gap_report(gen_random(13, seed=1))
    assert isinstance(rep.opt_ll, Skipped) and rep.status == "opt_ll_skipped"
    assert rep.sw_over_opt_ll is None


def test_thin_margin_premise():
    inst = Instance.from_lists(["0.5", "0.5", "0.5"], ["0.1", "0.45", "0.1"])
    assert thin_margin_premise(inst, F(1, 2))
    inst = Instance.from_lists(["0.5", "0.5"], ["0.3", "0.1"])
    # cut is 1/2, only the second agent is below it and it carries 2/3 of SW
    assert thin_margin_premise(inst, F(1, 2)) is False
    assert thin_margin_premise(inst, F(1, 4)) is True


def test_cost_variant_needs_positive_costs():
    inst = Instance.from_lists(["0.5", "0.5"], ["0", "0.1"])
    with pytest.raises(Exception):
        subset_inequality_failures(inst, solve_uniform(inst).utility, weight="c")


@settings(max_examples=25)
@given(instances(max_n=5, costs_below_q=True))
def test_report_invariants(inst):
    rep = gap_report(inst, alpha="0.7")
    assert rep.failed_checks() == []
    assert rep.ua <= rep.opt_ll <= rep.sw
    if rep.noll_log:
        assert rep.sw <= harmonic(inst.n) * rep.noll_log


@given(instances(max_n=6, costs_below_q=True))
def test_subset_inequality(inst):
    ua = solve_uniform(inst).utility
    assert subset_inequality_failures(inst, ua, "q") == []
    if all(c > 0 for c in inst.c):
        assert subset_inequality_failures(inst, ua, "c") == []


def test_sweep_spread_ratio_grows():
    rows = list(csv.DictReader(io.StringIO(sweep("spread", [{"Q": 4, "n": 2}, {"Q": 8, "n": 3}, {"Q": 16, "n": 4}]))))
    ratios = [F(r["sw_over_opt_ll"]) for r in rows]
    assert ratios == sorted(ratios) and all(r["status"] == "ok" for r in rows)


def test_sweep_equal_q_column_is_harmonic():
    text = sweep("equal_q_harmonic", {"q": ["0.5"], "c": ["0.1"], "n": list(range(1, 9))})
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [F(r["sw_over_ua"]) for r in rows] == [harmonic(n) for n in range(1, 9)]


def test_empty_sweep_is_header_only():
    assert sweep("spread", []) == ",".join(CSV_COLUMNS) + "\n"


def test_sweep_records_failures():
    rows = sweep_rows("equal_c_harmonic", [{"c": "0.6", "n": 1}, {"c": "0.2", "n": 2}])
    assert rows[0][-1].startswith("error:") and rows[1][-1] == "ok"
    rows = sweep_rows("random", [{"n": 13, "seed": 1}], ll_limit=12)
    assert rows[0][-1] == "opt_ll_skipped"


def test_sweep_is_deterministic():
    grid = {"n": [3, 4], "seed": [1, 2]}
    assert sweep("random", grid) == sweep("random", grid)
