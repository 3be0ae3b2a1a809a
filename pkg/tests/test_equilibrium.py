from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from anoncontract import (
    BLOCKED,
    AnonymousContract,
    GuardError,
    Instance,
    ValidationError,
    agent_utility,
    best_response_dynamics,
    check_pne,
    enumerate_pne,
    is_pne,
    joining_transfer,
    principal_utility,
)
from anoncontract.generators import gen_unbounded_gap

from .conftest import contracts, instances
from .oracles import is_equilibrium, total_payment

HALF = Fraction(1, 2)


@pytest.fixture
def gap():
    return gen_unbounded_gap(Fraction(1, 10))


def test_gap_instance_utilities(gap):
    inst, w = gap
    assert agent_utility(inst, {0}, w, 0) == Fraction(0)
    assert joining_transfer(inst, {0}, w, 1) == Fraction(9, 10) * Fraction(8, 10) * HALF
    assert principal_utility(inst, {1}, w) == Fraction(45, 100)
    assert principal_utility(inst, {0}, w) == Fraction(1, 10)


def test_gap_instance_equilibria(gap):
    inst, w = gap
    sets = [r.set for r in enumerate_pne(inst, w)]
    assert sets == [frozenset({1}), frozenset({0}), frozenset()]


def test_full_set_is_not_an_equilibrium(gap):
    inst, w = gap
    rep = is_pne(inst, w, {0, 1})
    assert not rep.is_pne and rep.violations == (0, 1)


def test_dynamics_from_full_set(gap):
    inst, w = gap
    assert best_response_dynamics(inst, w, {0, 1}) == [frozenset({0, 1}), frozenset({1})]


def test_blocked_payment_deters_outsider():
    inst = Instance.from_lists(["0.5", "0.5"], ["0.1", "0.1"])
    w = AnonymousContract((Fraction(1), BLOCKED))
    assert joining_transfer(inst, {0}, w, 1) == float("-inf")
    assert principal_utility(inst, {0, 1}, w) is None
    assert check_pne(inst, w, {0})


def test_blocked_entry_unreachable_for_zero_probability_agent():
    inst = Instance.from_lists(["0.5", "0"], ["0.1", "0"])
    w = AnonymousContract((Fraction(1), BLOCKED))
    assert principal_utility(inst, {0, 1}, w) == 0


def test_contract_json_round_trip():
    w = AnonymousContract((Fraction(1), Fraction(7, 12), BLOCKED))
    assert AnonymousContract.from_obj(w.to_json()) == w
    assert AnonymousContract.from_obj({"w": [1, "Blocked"]}).payments == (1, BLOCKED)


def test_contract_length_checked(gap):
    inst, _ = gap
    with pytest.raises(ValidationError, match="contract has 1 payments for 2 agents"):
        is_pne(inst, (HALF,), set())


def test_enumeration_guard():
    inst = Instance.from_lists(["0.5"] * 21, ["0.1"] * 21)
    with pytest.raises(GuardError):
        enumerate_pne(inst, (HALF,) * 21)


def test_random_policy_needs_seed(gap):
    inst, w = gap
    with pytest.raises(ValidationError):
        best_response_dynamics(inst, w, policy="random")
    a = best_response_dynamics(inst, w, {0, 1}, policy="random", rng=7)
    b = best_response_dynamics(inst, w, {0, 1}, policy="random", rng=7)
    assert a == b


def test_float_mode_matches_exact(gap):
    inst, w = gap
    rep = is_pne(inst.to_float(), w.with_mode(False), {1})
    assert rep.is_pne and abs(rep.principal_utility - 0.45) < 1e-12


@given(st.data())
def test_principal_utility_matches_payment_identity(data):
    inst = data.draw(instances(max_n=5))
    w = data.draw(contracts(inst.n))
    S = data.draw(st.sets(st.integers(0, inst.n - 1)))
    reward = sum((inst.agents[i].q for i in S), Fraction(0))
    assert principal_utility(inst, S, w) == reward - total_payment(inst, S, w)


@given(st.data())
def test_equilibrium_check_matches_oracle(data):
    inst = data.draw(instances(max_n=5))
    w = data.draw(contracts(inst.n))
    S = data.draw(st.sets(st.integers(0, inst.n - 1)))
    assert is_pne(inst, w, S).is_pne == check_pne(inst, w, S) == is_equilibrium(inst, S, w)


@given(st.data())
def test_every_contract_has_an_equilibrium(data):
    inst = data.draw(instances(max_n=5))
    w = data.draw(contracts(inst.n))
    reps = enumerate_pne(inst, w)
    assert reps and all(is_equilibrium(inst, r.set, w) for r in reps)


@given(st.data())
def test_dynamics_end_at_equilibrium(data):
    inst = data.draw(instances(max_n=6))
    w = data.draw(contracts(inst.n, lo=-2, hi=2))
    S0 = data.draw(st.sets(st.integers(0, inst.n - 1)))
    for policy in ("lowest", "random"):
        trace = best_response_dynamics(inst, w, S0, policy=policy, rng=data.draw(st.integers(0, 2**32)))
        assert trace[0] == frozenset(S0)
        assert is_equilibrium(inst, trace[-1], w)
        assert all(len(a ^ b) == 1 for a, b in zip(trace, trace[1:]))
