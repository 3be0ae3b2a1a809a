from fractions import Fraction as F

import numpy as np
import pytest
from scipy.optimize import minimize
from hypothesis import given, strategies as st

from anoncontract import ValidationError, enumerate_pne, social_welfare, solve_uniform
from anoncontract.analysis import subset_inequality_failures
from anoncontract.core import members
from anoncontract.generators import (
    FamilySpec,
    build_family,
    gen_equal_c_harmonic,
    gen_equal_q_harmonic,
    gen_infeasible,
    gen_random,
    gen_spread,
    gen_tight_costs,
    gen_unbounded_gap,
    h_bounds,
    h_function,
    spread_info,
    worst_case_q,
)
from anoncontract.noll import harmonic


def test_spread_values():
    inst = gen_spread(16, 4)
    assert inst.q == (F(1, 256), F(1, 128), F(1, 64), F(1, 32))
    assert all(q - c == F(1, 512) for q, c in zip(inst.q, inst.c))
    assert social_welfare(inst) == F(1, 128)


def test_spread_padding():
    inst = gen_spread(16, 5)
    assert (inst.q[4], inst.c[4]) == (F(1, 64), F(1, 32))


def test_spread_clamps_ratio():
    info = spread_info(1000, 3)
    assert info.clamped and info.Q == 8 and info.ell == 3
    assert spread_info("5/2", 3).ell == 1


def test_spread_domain():
    with pytest.raises(ValidationError):
        gen_spread(1, 3)


@pytest.mark.parametrize("ell", [1, 2, 3, 4, 5])
def test_spread_welfare_is_ell_eps(ell):
    inst = gen_spread(2**ell, ell + 1)
    assert social_welfare(inst) == ell * spread_info(2**ell, ell + 1).eps


def test_equal_q_costs():
    inst = gen_equal_q_harmonic("0.5", "0.1", 3)
    assert inst.c == (F(1, 10), F(3, 10), F(11, 30))
    assert social_welfare(inst) == F(11, 15)
    assert gen_equal_q_harmonic("0.5", "0.1", 1).c == (F(1, 10),)


@pytest.mark.parametrize("n", range(1, 9))
def test_equal_q_ratio_is_harmonic(n):
    inst = gen_equal_q_harmonic("0.6", "0.2", n)
    ua = solve_uniform(inst).utility
    assert ua == F(2, 5) and social_welfare(inst) / ua == harmonic(n)


def test_equal_c_values():
    inst = gen_equal_c_harmonic("0.4", 2)
    assert inst.q == (F(4, 5), F(3, 5))
    assert social_welfare(inst) == F(3, 5)
    with pytest.raises(ValidationError):
        gen_equal_c_harmonic("0.6", 1)


def test_tight_costs_example():
    inst = gen_tight_costs(["0.5", "0.5"], "0.25")
    assert inst.c == (F(1, 4), F(3, 8))
    assert social_welfare(inst) == F(3, 8)
    assert gen_tight_costs(["0.5"], "0.2").c == (F(3, 10),)
    with pytest.raises(ValidationError):
        gen_tight_costs(["0.5"], "0.6")
    with pytest.raises(ValidationError):
        gen_tight_costs(["0.5", "0.4"], "0.1")


@given(st.lists(st.integers(1, 30), min_size=1, max_size=7).map(sorted), st.data())
def test_tight_costs_make_every_subset_tight(ks, data):
    q = [F(k, 30) for k in ks]
    Z = F(data.draw(st.integers(1, ks[0])), 30)
    inst = gen_tight_costs(q, Z)
    assert solve_uniform(inst).utility == Z
    densities = [c / x for x, c in zip(inst.q, inst.c)]
    assert densities == sorted(densities)
    for mask in range(1 << inst.n):
        S = members(mask)
        lhs = sum((inst.q[i] - inst.c[i] for i in S), F(0))
        rhs = sum((q[i] / sum(q[: i + 1]) for i in S), F(0)) * Z
        assert lhs == rhs
    assert subset_inequality_failures(inst, Z) == []
    assert social_welfare(inst) / Z == h_function(q)


def test_unbounded_gap_ratios():
    for eps, ratio in [("0.1", F(9, 2)), ("0.01", F(99, 2)), ("0.25", F(3, 2))]:
        inst, w = gen_unbounded_gap(eps)
        reps = {r.set: r.principal_utility for r in enumerate_pne(inst, w)}
        assert reps[frozenset({1})] / reps[frozenset({0})] == ratio
    with pytest.raises(ValidationError):
        gen_unbounded_gap("0.5")


def test_infeasible_instance():
    inst, S = gen_infeasible("0.5")
    assert inst.q == (F(1, 2), F(1, 2)) and inst.c == (F(1, 8), F(1, 3)) and S == frozenset({1})
    with pytest.raises(ValidationError):
        gen_infeasible("0.7")


def test_h_function():
    assert h_function([1, 1, 1]) == F(11, 6)
    assert h_function([1]) == 1
    assert h_function([F(1), F(2)]) == F(5, 3)
    with pytest.raises(ValidationError):
        h_function([1, 0])


def test_worst_case_two_agents():
    prof = worst_case_q(0.1, 0.4, 2)
    assert prof.rho == pytest.approx(5, rel=1e-12) and prof.q == pytest.approx((0.1, 0.4))


def test_worst_case_sandwich_example():
    prof = worst_case_q(0.01, 0.64, 6)
    lo, hi = h_bounds(64, 6)
    assert lo <= h_function(prof.q) <= hi


def test_worst_case_low_ratio_is_not_monotone():
    prof = worst_case_q(0.5, 0.6, 5)
    assert not prof.monotone and prof.q[1] < prof.q[0]


@pytest.mark.parametrize("a", [1e-4, 3e-4, 1e-3])
@pytest.mark.parametrize("b", [0.3, 0.7, 1.0])
@pytest.mark.parametrize("n", [2, 4, 8])
def test_worst_case_grid(a, b, n):
    prof = worst_case_q(a, b, n)
    assert prof.monotone
    assert prof.q[0] == a and prof.q[-1] == pytest.approx(b, rel=1e-9)
    h = h_function(prof.q)
    lo, hi = h_bounds(b / a, n)
    assert lo <= h <= hi
    # the closed form of h along a geometric profile
    assert h == pytest.approx(n - (n - 1) / prof.rho, rel=1e-12)


@pytest.mark.parametrize("n", [3, 4, 6])
def test_worst_case_against_numerical_maximum(n):
    # the geometric profile is a lower estimate of max h; a direct search
    # may beat it but never the upper envelope
    a, b = 0.01, 0.64
    prof = worst_case_q(a, b, n)
    f = lambda x: -h_function([a, *np.clip(x, a, b), b])
    res = minimize(f, np.array(prof.q[1:-1]), method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-15})
    lo, hi = h_bounds(b / a, n)
    assert lo <= h_function(prof.q) <= -res.fun + 1e-12 <= hi


def test_random_family_is_seeded():
    assert gen_random(5, seed=3) == gen_random(5, seed=3)
    assert gen_random(5, seed=3) != gen_random(5, seed=4)
    inst = gen_random(8, seed=1, distinct_q=True)
    assert len(set(inst.q)) == 8 and all(c <= q for q, c in zip(inst.q, inst.c))
    assert not gen_random(3, seed=1, exact=False).exact
    with pytest.raises(ValidationError):
        gen_random(3, seed=None)


def test_build_family_dispatch():
    g = build_family(FamilySpec("spread", {"Q": "20", "n": "3"}))
    assert g.meta["clamped"] is True and g.instance.n == 3
    g = build_family(FamilySpec("unbounded_gap", {"eps": "0.1"}))
    assert g.contract is not None
    g = build_family(FamilySpec("tight_costs", {"a": "0.001", "b": "0.5", "n": "4"}))
    assert g.meta["monotone"] and not g.instance.exact
    g = build_family(FamilySpec("tight_costs", {"q": "0.25,0.5", "Z": "0.1"}))
    assert g.instance.c == (F(3, 20), F(13, 30))
    with pytest.raises(ValidationError):
        FamilySpec("nope")
    with pytest.raises(ValidationError):
        build_family(FamilySpec("spread", {"Q": "4"}))
