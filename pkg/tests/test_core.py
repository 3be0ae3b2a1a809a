import math
from fractions import Fraction

import pytest
from hypothesis import given

from anoncontract.core import (
    Agent,
    Instance,
    ValidationError,
    dump_instance,
    encode_scalar,
    format_set,
    geq,
    gt,
    load_instance,
    parse_scalar,
    parse_set,
    social_welfare,
    welfare_set,
)

from .conftest import instances
from .oracles import welfare


def test_decimal_literals_parse_exactly():
    inst = load_instance('{"agents": [{"q": 0.1, "c": "1/30"}]}')
    assert inst.q == (Fraction(1, 10),)
    assert inst.c == (Fraction(1, 30),)


def test_float_mode_reads_floats():
    inst = load_instance('{"agents": [{"q": 0.1, "c": 0.05}]}', exact=False)
    assert inst.q == (0.1,) and not inst.exact


def test_extra_keys_are_ignored():
    inst = load_instance('{"agents": [{"q": 1, "c": 0}], "meta": {"x": 1}}')
    assert inst.n == 1


@pytest.mark.parametrize(
    "text, message",
    [
        ('{"agents": [{"q": 1.5, "c": 0}]}', "q out of [0,1] at agent 1"),
        ('{"agents": [{"q": 0.5, "c": 0}, {"q": 0.5, "c": -1}]}', "negative c at agent 2"),
        ('{"agents": [{"q": 0.5}]}', "must have q and c"),
        ('{"agents": []}', "no agents"),
        ('{"agents": [{"q": "abc", "c": 0}]}', "cannot parse"),
        ('{"agents": [{"q": true, "c": 0}]}', "not a number"),
        ("[1, 2]", "agents"),
        ("{", "invalid JSON"),
    ],
)
def test_validation_messages(text, message):
    with pytest.raises(ValidationError, match=message.replace("[", r"\[").replace("]", r"\]")):
        load_instance(text)


def test_mixed_modes_rejected():
    with pytest.raises(ValidationError):
        Instance((Agent(Fraction(1, 2), 0.1),))


@given(instances(max_n=5))
def test_json_round_trip(inst):
    assert load_instance(dump_instance(inst)) == inst


def test_encode_scalar_forms():
    assert encode_scalar(Fraction(1, 2)) == 0.5
    assert encode_scalar(Fraction(1, 3)) == "1/3"
    assert encode_scalar(Fraction(3)) == 3
    assert encode_scalar(-math.inf) == "-inf"
    assert parse_scalar("1/3") == Fraction(1, 3)


def test_tolerant_comparisons():
    assert geq(1.0 - 1e-12, 1.0)
    assert not gt(1.0 + 1e-12, 1.0)
    assert gt(1.0 + 1e-6, 1.0)
    assert not geq(Fraction(1, 2) - Fraction(1, 10**15), Fraction(1, 2))


def test_sets_are_one_based_outside():
    assert parse_set([2, 1], 3) == frozenset({0, 1})
    assert format_set({2, 0}) == [1, 3]
    with pytest.raises(ValidationError):
        parse_set([4], 3)
    with pytest.raises(ValidationError):
        parse_set([1, 1], 3)


def test_density_order_puts_zero_probability_last():
    inst = Instance.from_lists(["0", "0.5", "0.5"], ["0", "0.25", "0.1"])
    assert inst.density_order == (2, 1, 0)


@given(instances(max_n=7, positive_q=False))
def test_social_welfare_matches_subset_search(inst):
    assert social_welfare(inst) == welfare(inst)
    assert all(inst.agents[i].q > inst.agents[i].c for i in welfare_set(inst))
