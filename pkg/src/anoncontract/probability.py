"""Distribution of the number of successes among an exerting set."""

from __future__ import annotations

from typing import Iterable, Sequence

from .core import Instance, Scalar, ValidationError


def convolve_bernoulli(probs: Iterable[Scalar], one: Scalar = 1) -> list:
    """Poisson-binomial pmf of independent Bernoulli(p) trials.

    Index t holds P(exactly t successes); the list has one entry more than
    the number of trials.
    """
    pmf = [one]
    for p in probs:
        nxt = [x * (1 - p) for x in pmf]
        nxt.append(0 * one)
        for t, x in enumerate(pmf):
            nxt[t + 1] += x * p
        pmf = nxt
    return pmf


def success_dist(inst: Instance, S: Iterable[int]) -> list:
    """Masses Q_0(S), ..., Q_|S|(S)."""
    one = inst.zero() + 1
    return convolve_bernoulli((inst.agents[i].q for i in sorted(S)), one)


def success_dist_excluding(inst: Instance, S: Iterable[int], i: int) -> list:
    """Success-count masses of ``S`` without agent ``i``.

    Recomputed from scratch rather than deconvolved, which would divide by
    1 - q_i.
    """
    S = frozenset(S)
    if i not in S:
        raise ValidationError(f"agent {i + 1} is not in the set")
    return success_dist(inst, S - {i})


def q_matrix(inst: Instance, agents: Sequence[int] | None = None) -> list[list]:
    """Matrix with entry (i, j) = q_i * Q_{j-1}([n] minus i).

    ``agents`` restricts the construction to a sub-instance (rows and the
    success-count range both shrink to its size).
    """
    idx = list(range(inst.n)) if agents is None else list(agents)
    full = frozenset(idx)
    rows = []
    for i in idx:
        q_i = inst.agents[i].q
        rows.append([q_i * x for x in success_dist(inst, full - {i})])
    return rows
