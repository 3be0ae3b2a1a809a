"""Anonymous contracts without limited liability.

Two constructions: a contract that rewards the top-k agents by surplus and
blocks any larger success count, and a full-extraction contract obtained by
solving a linear system in the success-count distribution.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg

from .core import (
    Instance,
    InvariantViolation,
    Scalar,
    ValidationError,
    encode_scalar,
    format_set,
    social_welfare,
)
from .equilibrium import BLOCKED, AnonymousContract, is_pne, principal_utility
from .probability import q_matrix

DUPLICATE_Q_TOL = 1e-10
PIVOT_WARN = 1e-12
FLOAT_RESIDUAL_TOL = 1e-8


class SingularMatrixError(ValidationError):
    """The success-count matrix is singular (repeated success probabilities)."""


class ConditioningWarning(UserWarning):
    """A float-mode pivot was tiny; the solution may be inaccurate."""


def harmonic(n: int) -> Fraction:
    return sum((Fraction(1, i) for i in range(1, n + 1)), Fraction(0))


@dataclass(frozen=True)
class KStarContract:
    k_star: int
    surplus_order: tuple
    w: AnonymousContract
    utility: Scalar
    equilibrium: frozenset
    sw: Scalar
    harmonic_bound: Scalar  # H_n times the utility, an upper bound on sw

    def to_json(self) -> dict:
        return {
            "k_star": self.k_star,
            "surplus_order": [i + 1 for i in self.surplus_order],
            "w": self.w.to_json()["w"],
            "utility": encode_scalar(self.utility),
            "equilibrium": format_set(self.equilibrium),
            "sw": encode_scalar(self.sw),
            "harmonic_bound": encode_scalar(self.harmonic_bound),
        }


def log_contract(inst: Instance) -> KStarContract:
    """Reward the k* agents with the largest surplus and block more successes.

    With surpluses s sorted nonincreasing, k* maximizes k * s_k (smallest k
    on ties). The contract pays 1 below k* successes, claws back just enough
    at exactly k* that the k*-th agent breaks even, and blocks every count
    above k*. Each of the top k* agents then nets s_i - s_k* and the
    principal keeps k* * s_k*.
    """
    zero = inst.zero()
    active = inst.active()
    surplus = {i: inst.agents[i].q - inst.agents[i].c for i in active}
    order = tuple(sorted(active, key=lambda i: (-surplus[i], i)))
    sw = social_welfare(inst)
    h_n = harmonic(inst.n) if inst.exact else float(harmonic(inst.n))

    best_k, best = 0, None
    for k, i in enumerate(order, start=1):
        v = k * surplus[i]
        if best is None or v > best:
            best_k, best = k, v
    if best is None or best < 0:
        w = AnonymousContract((zero,) * inst.n)
        return KStarContract(0, order, w, zero, frozenset(), sw, zero)

    top = order[:best_k]
    s_k = surplus[order[best_k - 1]]
    prod = zero + 1
    for i in top:
        prod *= inst.agents[i].q
    one = zero + 1
    pay = [one] * (best_k - 1) + [one - s_k / prod] + [BLOCKED] * (inst.n - best_k)
    return KStarContract(best_k, order, AnonymousContract(tuple(pay)), best, frozenset(top), sw, h_n * best)


@dataclass(frozen=True)
class FullExtractionContract:
    w: AnonymousContract
    utility: Scalar
    agents: frozenset  # agents kept after dropping q_i <= c_i
    residual: Scalar

    def to_json(self) -> dict:
        return {
            "w": self.w.to_json()["w"],
            "utility": encode_scalar(self.utility),
            "agents": format_set(self.agents),
            "residual": encode_scalar(self.residual),
        }


def solve_exact(A: list, b: list) -> list:
    """Gaussian elimination over rationals."""
    m = len(A)
    M = [list(row) + [rhs] for row, rhs in zip(A, b)]
    for col in range(m):
        piv = next((r for r in range(col, m) if M[r][col] != 0), None)
        if piv is None:
            raise SingularMatrixError("success-count matrix is singular")
        M[col], M[piv] = M[piv], M[col]
        p = M[col][col]
        M[col] = [x / p for x in M[col]]
        for r in range(m):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [M[r][m] for r in range(m)]


def solve_float(A: list, b: list) -> list:
    """LU with partial pivoting; warns on tiny pivots."""
    lu, piv = scipy.linalg.lu_factor(np.array(A, dtype=float), check_finite=True)
    diag = np.abs(np.diag(lu))
    if np.any(diag == 0):
        raise SingularMatrixError("success-count matrix is singular")
    if np.min(diag) < PIVOT_WARN:
        warnings.warn(f"smallest pivot {np.min(diag):.3e} is below {PIVOT_WARN}", ConditioningWarning)
    return [float(x) for x in scipy.linalg.lu_solve((lu, piv), np.array(b, dtype=float))]


def full_extraction(inst: Instance) -> FullExtractionContract:
    """Contract under which all welfare-positive agents exert and earn zero rent.

    Agents with q_i <= c_i are dropped; the rest must have distinct success
    probabilities so that the success-count matrix is invertible. Payments
    beyond the kept agents' count are blocked so dropped agents stay out.
    """
    keep = [i for i, a in enumerate(inst.agents) if a.q > a.c]
    if not keep:
        raise ValidationError("no agent has q > c; nothing to extract")
    qs = sorted(inst.agents[i].q for i in keep)
    for a, b in zip(qs, qs[1:]):
        if b - a == 0 or (not inst.exact and abs(b - a) < DUPLICATE_Q_TOL):
            raise SingularMatrixError(
                f"repeated success probability {a}; full extraction needs distinct q "
                "(use exact mode for near-ties or the top-k contract instead)"
            )
    A = q_matrix(inst, keep)
    c = [inst.agents[i].c for i in keep]
    w = solve_exact(A, c) if inst.exact else solve_float(A, c)
    residual = max(abs(sum(x * y for x, y in zip(row, w)) - ci) for row, ci in zip(A, c))
    if inst.exact and residual != 0:
        raise InvariantViolation(f"exact solve left residual {residual}")
    if not inst.exact and residual > FLOAT_RESIDUAL_TOL:
        raise InvariantViolation(f"float solve residual {residual:.3e} exceeds {FLOAT_RESIDUAL_TOL}")
    contract = AnonymousContract(tuple(w) + (BLOCKED,) * (inst.n - len(keep)))
    S = frozenset(keep)
    report = is_pne(inst, contract, S)
    if not report.is_pne:
        raise InvariantViolation(f"full-extraction contract does not sustain {format_set(S)}")
    utility = principal_utility(inst, S, contract)
    return FullExtractionContract(contract, utility, S, residual)
