"""Optimal uniform anonymous contracts.

A uniform contract pays the same ``w`` to every successful agent. Its
equilibrium is the prefix of agents in density order whose density is
below ``w``, so the optimum is a one-dimensional scan over prefixes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Instance, InvariantViolation, Scalar, encode_scalar, format_set
from .equilibrium import AnonymousContract, enumerate_pne


@dataclass(frozen=True)
class UniformSolution:
    k: int
    w: Scalar
    utility: Scalar
    prefix: frozenset
    candidates: tuple = ()

    def contract(self, n: int) -> AnonymousContract:
        return AnonymousContract.uniform(self.w, n)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "w": encode_scalar(self.w),
            "utility": encode_scalar(self.utility),
            "prefix": format_set(self.prefix),
            "candidates": [encode_scalar(v) for v in self.candidates],
        }


def prefix_values(inst: Instance) -> list:
    """(1 - c_k/q_k) * (q_1 + ... + q_k) for every prefix in density order.

    Zero-probability agents sit at the end of the order and are skipped.
    """
    vals = []
    mass = inst.zero()
    for i in inst.density_order:
        a = inst.agents[i]
        if a.q == 0:
            break
        mass += a.q
        vals.append((1 - a.c / a.q) * mass)
    return vals


def solve_uniform(inst: Instance) -> UniformSolution:
    """Best prefix and the smallest payment that sustains it.

    Ties over k go to the smallest k. When no prefix has positive value the
    solution is k = 0, w = 0 and nobody works.
    """
    vals = prefix_values(inst)
    zero = inst.zero()
    best_k, best = 0, zero
    for k, v in enumerate(vals, start=1):
        if v > best:
            best_k, best = k, v
    if best_k == 0:
        return UniformSolution(0, zero, zero, frozenset(), tuple(vals))
    order = inst.density_order
    top = inst.agents[order[best_k - 1]]
    return UniformSolution(best_k, top.c / top.q, best, frozenset(order[:best_k]), tuple(vals))


def verify_unique_prefix_pne(inst: Instance, w: Scalar) -> frozenset:
    """Enumerate equilibria of the constant contract and check the prefix claim.

    With no density exactly equal to ``w`` there must be exactly one
    equilibrium, the agents with density below ``w``. If some density
    equals ``w`` those agents are indifferent; the boundary agents are then
    counted in, and the prefix only has to be among the equilibria.
    """
    reports = enumerate_pne(inst, AnonymousContract.uniform(w, inst.n))
    sets = [r.set for r in reports]
    active = inst.active()
    tie = any(inst.agents[i].density == w for i in active)
    prefix = frozenset(i for i in active if inst.agents[i].density <= w)
    if tie:
        if prefix not in sets:
            raise InvariantViolation(f"prefix {format_set(prefix)} is not an equilibrium at w={w}")
    elif sets != [prefix]:
        raise InvariantViolation(
            f"uniform contract w={w} has equilibria {[format_set(s) for s in sets]}, "
            f"expected only {format_set(prefix)}"
        )
    return prefix
