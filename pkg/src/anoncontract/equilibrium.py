"""Utilities, equilibrium checks and best-response dynamics for anonymous contracts.

A contract ``w`` pays every successful agent ``w[j-1]`` when exactly ``j``
agents succeed. Entries may be :data:`BLOCKED`, a symbolic payment so
negative that any positive-probability exposure to it deters effort.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import (
    GuardError,
    Instance,
    InvariantViolation,
    Scalar,
    ValidationError,
    encode_scalar,
    format_set,
    geq,
    gt,
    members,
    parse_scalar,
)
from .probability import success_dist

MAX_ENUMERATION_AGENTS = 20
NEG_INF = -math.inf


class _Blocked:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "BLOCKED"

    def __reduce__(self):
        return (_Blocked, ())


BLOCKED = _Blocked()


class ImprovementCycleError(InvariantViolation):
    """Best-response dynamics exceeded its step cap."""

    def __init__(self, message: str, trace: list):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class AnonymousContract:
    payments: tuple

    def __post_init__(self):
        for j, w in enumerate(self.payments, start=1):
            if w is not BLOCKED and not isinstance(w, (Fraction, float, int)):
                raise ValidationError(f"payment w_{j} is not a number: {w!r}")

    def __len__(self):
        return len(self.payments)

    def __getitem__(self, j):
        return self.payments[j]

    @classmethod
    def uniform(cls, w: Scalar, n: int) -> "AnonymousContract":
        return cls((w,) * n)

    @property
    def limited_liability(self) -> bool:
        return all(w is not BLOCKED and w >= 0 for w in self.payments)

    @property
    def exact(self) -> bool:
        return all(w is BLOCKED or not isinstance(w, float) for w in self.payments)

    def with_mode(self, exact: bool) -> "AnonymousContract":
        conv = Fraction if exact else float
        return AnonymousContract(tuple(w if w is BLOCKED else conv(w) for w in self.payments))

    def to_json(self) -> dict:
        return {"w": ["blocked" if w is BLOCKED else encode_scalar(w) for w in self.payments]}

    @classmethod
    def from_obj(cls, obj, exact: bool = True) -> "AnonymousContract":
        if not isinstance(obj, dict) or not isinstance(obj.get("w"), list):
            raise ValidationError('contract JSON must be an object with a "w" list')
        out = []
        for j, v in enumerate(obj["w"], start=1):
            if isinstance(v, str) and v.strip().lower() == "blocked":
                out.append(BLOCKED)
            else:
                try:
                    out.append(parse_scalar(v, exact))
                except ValidationError as exc:
                    raise ValidationError(f"{exc} in w_{j}") from exc
        return cls(tuple(out))


def as_contract(w) -> AnonymousContract:
    return w if isinstance(w, AnonymousContract) else AnonymousContract(tuple(w))


def _prepare(inst: Instance, w) -> AnonymousContract:
    w = as_contract(w)
    if len(w) != inst.n:
        raise ValidationError(f"contract has {len(w)} payments for {inst.n} agents")
    if w.exact != inst.exact:
        w = w.with_mode(inst.exact)
    return w


def transfer(q_i: Scalar, pmf: Sequence, w: AnonymousContract) -> Scalar:
    """Expected payment to an exerting agent whose peers' success count has ``pmf``.

    Returns -inf when the agent can succeed alongside a reachable count that
    maps to a blocked payment.
    """
    total = 0 * q_i
    for t, mass in enumerate(pmf):
        if mass == 0:
            continue
        wj = w.payments[t]
        if wj is BLOCKED:
            if q_i > 0:
                return NEG_INF
            continue
        total += mass * wj
    return q_i * total


def _leave_one_out(inst: Instance, S: Sequence[int], full: Optional[list] = None) -> list:
    """Success pmfs of S minus each member.

    Exact mode peels each member off the full pmf by inverting one Bernoulli
    step, which is O(|S|) per member; members with q = 1 and float mode use
    prefix/suffix products, which never divide.
    """
    qs = [inst.agents[i].q for i in S]
    k = len(qs)
    if inst.exact and k:
        if full is None:
            full = success_dist(inst, S)
        out = []
        for idx, p in enumerate(qs):
            out.append(_peel(full, p) if p != 1 else None)
        if all(x is not None for x in out):
            return out
        slow = _leave_one_out_products(inst, qs)
        return [x if x is not None else slow[idx] for idx, x in enumerate(out)]
    return _leave_one_out_products(inst, qs)


def _peel(full: list, p) -> list:
    """Pmf R with full = R convolved with Bernoulli(p), for p < 1."""
    r = 1 - p
    out = []
    prev = 0 * p
    for t in range(len(full) - 1):
        prev = (full[t] - prev * p) / r
        out.append(prev)
    return out


def _leave_one_out_products(inst: Instance, qs: list) -> list:
    one = inst.zero() + 1
    k = len(qs)
    prefix = [[one]]
    for p in qs:
        prefix.append(_push(prefix[-1], p))
    suffix = [[one]] * (k + 1)
    for idx in range(k - 1, -1, -1):
        suffix[idx] = _push(suffix[idx + 1], qs[idx])
    return [_convolve(prefix[idx], suffix[idx + 1]) for idx in range(k)]


def _push(pmf: list, p) -> list:
    nxt = [x * (1 - p) for x in pmf]
    nxt.append(0 * pmf[0])
    for t, x in enumerate(pmf):
        nxt[t + 1] += x * p
    return nxt


def _convolve(a: list, b: list) -> list:
    out = [0 * a[0]] * (len(a) + len(b) - 1)
    for s, x in enumerate(a):
        if x == 0:
            continue
        for t, y in enumerate(b):
            out[s + t] += x * y
    return out


def agent_utility(inst: Instance, S: Iterable[int], w, i: int) -> Scalar:
    """Expected payment minus cost for a member of ``S``; 0 for outsiders."""
    w = _prepare(inst, w)
    S = frozenset(S)
    if i not in S:
        return inst.zero()
    g = transfer(inst.agents[i].q, success_dist(inst, S - {i}), w)
    return g - inst.agents[i].c


def joining_transfer(inst: Instance, S: Iterable[int], w, i: int) -> Scalar:
    """Expected payment agent ``i`` would collect by joining ``S``."""
    w = _prepare(inst, w)
    S = frozenset(S) - {i}
    return transfer(inst.agents[i].q, success_dist(inst, S), w)


def principal_utility(inst: Instance, S: Iterable[int], w) -> Optional[Scalar]:
    """Expected reward of ``S`` minus expected total payment.

    ``None`` when a blocked payment is reachable with positive probability.
    """
    w = _prepare(inst, w)
    order = sorted(S)
    total = inst.zero()
    for i, pmf in zip(order, _leave_one_out(inst, order)):
        g = transfer(inst.agents[i].q, pmf, w)
        if g == NEG_INF:
            return None
        total += inst.agents[i].q - g
    return total


@dataclass(frozen=True)
class EquilibriumReport:
    set: frozenset
    is_pne: bool
    agent_utilities: tuple
    principal_utility: Optional[Scalar]
    violations: tuple = ()

    def to_json(self) -> dict:
        return {
            "set": format_set(self.set),
            "is_pne": self.is_pne,
            "agent_utilities": [encode_scalar(u) for u in self.agent_utilities],
            "principal_utility": encode_scalar(self.principal_utility),
            "violations": [i + 1 for i in self.violations],
        }


class SetScanner:
    """Equilibrium constraints of one candidate set, reusable across contracts.

    The success-count distributions of ``S`` and of ``S`` minus each member
    depend only on the set, so they are computed once (lazily) and shared by
    every contract checked against it.
    """

    def __init__(self, inst: Instance, S: Iterable[int]):
        self.inst = inst
        self.set = frozenset(S)
        self.order = sorted(self.set)
        self.outsiders = [i for i in range(inst.n) if i not in self.set]
        self._pmf = None
        self._loo = None

    @property
    def pmf(self) -> list:
        if self._pmf is None:
            self._pmf = success_dist(self.inst, self.order)
        return self._pmf

    @property
    def loo(self) -> list:
        if self._loo is None:
            full = self._pmf if self.inst.exact else None
            self._loo = _leave_one_out(self.inst, self.order, full)
        return self._loo

    def scan(self, w: AnonymousContract, stop_early: bool):
        """Violating agents, utilities and member transfers under ``w``.

        Utilities and transfers are None when ``stop_early`` cut the scan.
        """
        inst = self.inst
        violations = []
        zero = inst.zero()
        utilities = [zero] * inst.n
        transfers = {}
        if self.outsiders:
            # outsiders share one peer distribution, so the sum is computed once
            base = transfer(zero + 1, self.pmf, w)
            for i in self.outsiders:
                a = inst.agents[i]
                g = zero if a.q == 0 else (NEG_INF if base == NEG_INF else a.q * base)
                if not geq(a.c, g):
                    violations.append(i)
                    if stop_early:
                        return violations, None, None
        for i, pmf in zip(self.order, self.loo):
            a = inst.agents[i]
            g = transfer(a.q, pmf, w)
            transfers[i] = g
            u = g - a.c if g != NEG_INF else NEG_INF
            utilities[i] = u
            if not geq(u, zero):
                violations.append(i)
                if stop_early:
                    return violations, None, None
        return sorted(violations), utilities, transfers

    def holds(self, w) -> bool:
        """Whether ``S`` is an equilibrium of ``w``, stopping at the first violation."""
        violations, _, _ = self.scan(_prepare(self.inst, w), stop_early=True)
        return not violations

    def report(self, w) -> "EquilibriumReport":
        w = _prepare(self.inst, w)
        violations, utilities, transfers = self.scan(w, stop_early=False)
        if any(g == NEG_INF for g in transfers.values()):
            up = None
        else:
            up = sum((self.inst.agents[i].q - g for i, g in transfers.items()), self.inst.zero())
        return EquilibriumReport(self.set, not violations, tuple(utilities), up, tuple(violations))


def is_pne(inst: Instance, w, S: Iterable[int]) -> EquilibriumReport:
    """Whether ``S`` is a pure Nash equilibrium of ``w`` (weak inequalities)."""
    return SetScanner(inst, S).report(w)


def check_pne(inst: Instance, w, S: Iterable[int]) -> bool:
    """Boolean form of :func:`is_pne` that stops at the first violation."""
    return SetScanner(inst, S).holds(w)


def _report_key(rep: EquilibriumReport):
    u = rep.principal_utility
    return (u is None, -(u if u is not None else 0), len(rep.set), sorted(rep.set))


def enumerate_pne(inst: Instance, w) -> list[EquilibriumReport]:
    """All equilibria over subsets of agents with positive success probability.

    Sorted by principal utility, best first (undefined utilities last).
    """
    w = _prepare(inst, w)
    if inst.n > MAX_ENUMERATION_AGENTS:
        raise GuardError(f"enumeration needs n <= {MAX_ENUMERATION_AGENTS}, got {inst.n}")
    active = inst.active()
    found = []
    for mask in range(1 << len(active)):
        scanner = SetScanner(inst, (active[b] for b in members(mask)))
        if scanner.holds(w):
            found.append(scanner.report(w))
    if not found:
        raise InvariantViolation("no pure equilibrium found; every anonymous contract has one")
    found.sort(key=_report_key)
    return found


def improving_agents(inst: Instance, w: AnonymousContract, S: frozenset, first_only: bool = False) -> list[int]:
    """Agents with a strictly profitable unilateral switch at ``S``."""
    out = []
    order = sorted(S)
    pmf_S = None
    loo = dict(zip(order, _leave_one_out(inst, order)))
    for i in range(inst.n):
        a = inst.agents[i]
        if i in S:
            g = transfer(a.q, loo[i], w)
            better = g == NEG_INF or gt(a.c, g)
        else:
            if pmf_S is None:
                pmf_S = success_dist(inst, order)
            better = gt(transfer(a.q, pmf_S, w), a.c)
        if better:
            out.append(i)
            if first_only:
                break
    return out


def best_response_dynamics(
    inst: Instance,
    w,
    S0: Iterable[int] = (),
    policy: str = "lowest",
    rng: np.random.Generator | int | None = None,
) -> list[frozenset]:
    """Flip one strictly improving agent at a time until none is left.

    ``policy`` is ``"lowest"`` (lowest index first) or ``"random"`` (uniform
    among improving agents, drawn from ``rng``). The returned trace starts
    at ``S0`` and ends at an equilibrium.
    """
    w = _prepare(inst, w)
    if policy not in ("lowest", "random"):
        raise ValidationError(f"unknown policy {policy!r}")
    if policy == "random":
        if rng is None:
            raise ValidationError("the random policy needs a seed")
        rng = np.random.default_rng(rng)
    S = frozenset(S0)
    trace = [S]
    cap = 4 ** inst.n
    for _ in range(cap):
        movers = improving_agents(inst, w, S, first_only=policy == "lowest")
        if not movers:
            return trace
        i = movers[0] if policy == "lowest" else movers[int(rng.integers(len(movers)))]
        S = S - {i} if i in S else S | {i}
        trace.append(S)
    raise ImprovementCycleError(
        f"suspected improvement cycle: no equilibrium after {cap} steps",
        [format_set(s) for s in trace],
    )
