"""Optimal anonymous contracts under limited liability, and the general baseline.

For a fixed target set S the equilibrium constraints are linear in ``w``,
so the optimum is a small LP per set. The oracle solves all of them exactly
and keeps the best; it is exponential in n and guarded accordingly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .core import (
    GuardError,
    Instance,
    InvariantViolation,
    Scalar,
    encode_scalar,
    format_set,
    members,
    social_welfare,
    to_mode,
    welfare_set,
)
from .equilibrium import AnonymousContract, _leave_one_out, check_pne, principal_utility
from .probability import success_dist
from .simplex import LinearProgram, solve_lp

MAX_LL_AGENTS = 12


@dataclass(frozen=True)
class SetResult:
    set: frozenset
    status: str  # "optimal" | "infeasible"
    w: Optional[AnonymousContract] = None
    utility: Optional[Scalar] = None

    def to_row(self) -> dict:
        return {
            "set": " ".join(str(i) for i in format_set(self.set)),
            "status": self.status,
            "utility": "" if self.utility is None else str(encode_scalar(self.utility)),
            "w": "" if self.w is None else " ".join(str(encode_scalar(x)) for x in self.w.payments),
        }


@dataclass(frozen=True)
class LLSolution:
    set: frozenset
    w: AnonymousContract
    utility: Scalar
    per_set: tuple = field(default=(), repr=False)

    def to_json(self) -> dict:
        return {
            "set": format_set(self.set),
            "w": self.w.to_json()["w"],
            "utility": encode_scalar(self.utility),
            "feasible_sets": sum(r.status == "optimal" for r in self.per_set),
            "infeasible_sets": sum(r.status == "infeasible" for r in self.per_set),
        }


def set_program(inst: Instance, S: Iterable[int]) -> LinearProgram:
    """Minimum-payment LP for target set ``S`` over ``w_1..w_|S|``.

    Members must be paid at least their cost, outsiders at most theirs.
    Payments above |S| successes can only tempt outsiders, so they are
    fixed to zero and left out.
    """
    order = sorted(S)
    k = len(order)
    objective = [Fraction(0)] * k
    ge_rows, le_rows = [], []
    for i, pmf in zip(order, _leave_one_out(inst, order)):
        q_i = Fraction(inst.agents[i].q)
        row = [q_i * Fraction(x) for x in pmf]
        objective = [a + b for a, b in zip(objective, row)]
        ge_rows.append((row, Fraction(inst.agents[i].c)))
    pmf_S = success_dist(inst, order)
    S_set = set(order)
    for i in range(inst.n):
        if i in S_set:
            continue
        q_i = Fraction(inst.agents[i].q)
        # entry k of pmf_S is the mass on w_{k+1}, fixed to 0
        row = [q_i * Fraction(x) for x in pmf_S[:k]]
        le_rows.append((row, Fraction(inst.agents[i].c)))
    return LinearProgram(objective, ge_rows, le_rows)


def optimal_ll_for_set(inst: Instance, S: Iterable[int]) -> SetResult:
    """Cheapest nonnegative contract making ``S`` an equilibrium, if any.

    Solved over exact rationals regardless of the instance's mode; results
    are converted back to the instance's mode.
    """
    S = frozenset(S)
    exact_inst = inst.to_exact()
    k = len(S)
    zero = inst.zero()
    if k == 0:
        w = AnonymousContract((zero,) * inst.n)
        # the empty set is an equilibrium of w = 0 since costs are nonnegative
        return SetResult(S, "optimal", w, zero)
    result = solve_lp(set_program(exact_inst, S))
    if result.status != "optimal":
        return SetResult(S, "infeasible")
    payments = tuple(result.x) + (Fraction(0),) * (inst.n - k)
    reward = sum((Fraction(exact_inst.agents[i].q) for i in S), Fraction(0))
    utility = reward - result.value
    w = AnonymousContract(tuple(to_mode(x, inst.exact) for x in payments))
    return SetResult(S, "optimal", w, to_mode(utility, inst.exact))


def _better(a: SetResult, b: SetResult) -> bool:
    if a.utility != b.utility:
        return a.utility > b.utility
    if len(a.set) != len(b.set):
        return len(a.set) < len(b.set)
    return sorted(a.set) < sorted(b.set)


def optimal_ll_anonymous(inst: Instance, verify: bool = True) -> LLSolution:
    """Best limited-liability anonymous contract over all candidate sets.

    Sets containing a zero-probability agent are skipped. Ties go to the
    smaller set, then the lexicographically smaller one. With ``verify``
    the winning contract is checked to sustain its set.
    """
    if inst.n > MAX_LL_AGENTS:
        raise GuardError(f"limited-liability oracle needs n <= {MAX_LL_AGENTS}, got {inst.n}")
    active = inst.active()
    results = []
    best = None
    for mask in range(1 << len(active)):
        S = frozenset(active[b] for b in members(mask))
        res = optimal_ll_for_set(inst, S)
        results.append(res)
        if res.status == "optimal" and (best is None or _better(res, best)):
            best = res
    if verify and not check_pne(inst.to_exact(), best.w.with_mode(True), best.set):
        raise InvariantViolation(f"LP contract does not sustain {format_set(best.set)}")
    return LLSolution(best.set, best.w, best.utility, tuple(results))


def transfer_bound_violations(inst: Instance, results: Iterable[SetResult], eps: Scalar) -> list:
    """Check the expected-transfer lower bound on the spread family.

    For every feasible set with at least two members, with ``j`` its member
    of largest index, each other member ``i`` must receive at least
    ``q_i (1 - q_j)(q_j - eps) / (q_j (1 - q_i))``. Returns the failures as
    (set, agent, transfer, bound) tuples.
    """
    bad = []
    for res in results:
        if res.status != "optimal" or len(res.set) < 2:
            continue
        order = sorted(res.set)
        j = order[-1]
        q_j = inst.agents[j].q
        for i, pmf in zip(order, _leave_one_out(inst, order)):
            if i == j:
                continue
            q_i = inst.agents[i].q
            paid = q_i * sum((m * x for m, x in zip(pmf, res.w.payments)), inst.zero())
            bound = q_i * (1 - q_j) * (q_j - eps) / (q_j * (1 - q_i))
            if paid < bound:
                bad.append((res.set, i, paid, bound))
    return bad


@dataclass(frozen=True)
class GeneralContract:
    """Identity-based contract paying ``payments[i]`` to agent i on its own success."""

    set: frozenset
    payments: tuple
    utility: Scalar

    def to_json(self) -> dict:
        return {
            "set": format_set(self.set),
            "payments": [encode_scalar(p) for p in self.payments],
            "utility": encode_scalar(self.utility),
        }


def general_optimal(inst: Instance) -> GeneralContract:
    """Pay each welfare-positive agent exactly c_i/q_i when it succeeds.

    Every such agent is exactly compensated, so the principal keeps the
    full social welfare.
    """
    S = welfare_set(inst)
    zero = inst.zero()
    pay = tuple(inst.agents[i].c / inst.agents[i].q if i in S else zero for i in range(inst.n))
    utility = sum((inst.agents[i].q - pay[i] * inst.agents[i].q for i in S), zero)
    if utility != social_welfare(inst) and inst.exact:
        raise InvariantViolation("general contract utility differs from social welfare")
    return GeneralContract(S, pay, utility)


def ll_utility_check(inst: Instance, sol: LLSolution) -> bool:
    """Recompute the principal's utility of a solution from its contract."""
    return principal_utility(inst, sol.set, sol.w) == sol.utility
