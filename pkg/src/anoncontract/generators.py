"""Instance families used to probe gaps between contract classes.

All constructions are exact rationals except the worst-case probability
profile, whose growth ratio is the root of a polynomial with no closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import bisect

from .core import Agent, Instance, InvariantViolation, Scalar, ValidationError, parse_scalar
from .equilibrium import AnonymousContract

FAMILIES = (
    "spread",
    "equal_q_harmonic",
    "equal_c_harmonic",
    "tight_costs",
    "unbounded_gap",
    "infeasible_set",
    "random",
)


def _frac(x, name: str) -> Fraction:
    try:
        return parse_scalar(x, exact=True)
    except ValidationError as exc:
        raise ValidationError(f"{name}: {exc}") from exc


def _count(n, name: str = "n", minimum: int = 1) -> int:
    if isinstance(n, bool) or not isinstance(n, int) or n < minimum:
        raise ValidationError(f"{name} must be an integer >= {minimum}, got {n!r}")
    return n


# ---------------------------------------------------------------------------
# spread family: welfare concentrated in tiny, widely spread probabilities


@dataclass(frozen=True)
class SpreadInfo:
    ell: int
    eps: Fraction
    Q: Fraction  # ratio actually used after clamping
    clamped: bool


def spread_info(Q, n: int) -> SpreadInfo:
    Q = _frac(Q, "Q")
    n = _count(n)
    if Q < 2:
        raise ValidationError(f"spread family needs Q >= 2, got {Q}")
    clamped = Q > 2**n
    if clamped:
        Q = Fraction(2**n)
    ell = (Q.numerator // Q.denominator).bit_length() - 1
    return SpreadInfo(ell, Fraction(1, 2 ** (2 * ell + 1)), Q, clamped)


def gen_spread(Q, n: int) -> Instance:
    """``ell = floor(log2 Q)`` agents with q_i = 2^-(2 ell - i + 1) and c_i = q_i - eps.

    Each has surplus ``eps = 2^-(2 ell + 1)``. Agents beyond ``ell`` get
    q = 2^-(ell+2) and cost 2^-(ell+1), so they never add welfare.
    Q above 2^n is clamped (see :func:`spread_info`).
    """
    info = spread_info(Q, n)
    ell, eps = info.ell, info.eps
    agents = []
    for i in range(1, n + 1):
        if i <= ell:
            q = Fraction(1, 2 ** (2 * ell - i + 1))
            agents.append(Agent(q, q - eps))
        else:
            agents.append(Agent(Fraction(1, 2 ** (ell + 2)), Fraction(1, 2 ** (ell + 1))))
    return Instance(tuple(agents))


# ---------------------------------------------------------------------------
# harmonic families


def gen_equal_q_harmonic(q, c, n: int) -> Instance:
    """All q_i = q and c_i = (1 - 1/i) q + c/i, so every prefix earns q - c uniformly."""
    q, c, n = _frac(q, "q"), _frac(c, "c"), _count(n)
    if not 0 < c < q <= 1:
        raise ValidationError(f"need 0 < c < q <= 1, got q={q}, c={c}")
    return Instance(tuple(Agent(q, (1 - Fraction(1, i)) * q + c / i) for i in range(1, n + 1)))


def gen_equal_c_harmonic(c, n: int) -> Instance:
    """All c_i = c and q_i = c (1 + 1/i)."""
    c, n = _frac(c, "c"), _count(n)
    if not 0 < c <= Fraction(1, 2):
        raise ValidationError(f"need 0 < c <= 1/2 so that q_1 = 2c <= 1, got c={c}")
    return Instance(tuple(Agent(c * (1 + Fraction(1, i)), c) for i in range(1, n + 1)))


# ---------------------------------------------------------------------------
# tight costs and the worst-case profile


def h_function(v: Sequence[Scalar]) -> Scalar:
    """Sum over l of v_l / (v_1 + ... + v_l), in the order given."""
    if not len(v):
        raise ValidationError("h needs a nonempty vector")
    if not any(isinstance(x, float) for x in v):
        v = [Fraction(x) for x in v]
    total, out = 0 * v[0], 0 * v[0]
    for idx, x in enumerate(v, start=1):
        if not x > 0:
            raise ValidationError(f"h needs positive entries, entry {idx} is {x}")
        total += x
        out += x / total
    return out


def gen_tight_costs(q: Sequence, Z) -> Instance:
    """Costs making every density-order prefix worth exactly ``Z`` to a uniform contract.

    With F_l the prefix sums of ``q`` (which must be nondecreasing), the
    cost is c_l = q_l (1 - Z / F_l). Exact inputs give exact costs; float
    inputs stay float.
    """
    if not len(q):
        raise ValidationError("need at least one agent")
    exact = not any(isinstance(x, float) for x in q) and not isinstance(Z, float)
    q = [parse_scalar(x, exact) for x in q]
    Z = parse_scalar(Z, exact)
    if any(b < a for a, b in zip(q, q[1:])):
        raise ValidationError("tight costs need nondecreasing q")
    if not 0 < q[0] <= 1 or q[-1] > 1:
        raise ValidationError("q must lie in (0, 1]")
    if not 0 < Z <= q[0]:
        raise ValidationError(f"need 0 < Z <= q_1, got Z={Z}, q_1={q[0]}")
    agents, F = [], 0 * Z
    for x in q:
        F += x
        agents.append(Agent(x, x * (1 - Z / F)))
    return Instance(tuple(agents))


@dataclass(frozen=True)
class WorstCaseProfile:
    q: tuple
    rho: float
    monotone: bool  # false when the stationary profile dips below a


def worst_case_q(a, b, n: int) -> WorstCaseProfile:
    """Probability profile with geometric prefix sums F_i = a rho^(i-1).

    ``rho`` is the root >= 1 of rho^(n-1) - rho^(n-2) = b/a, found by
    bisection. Then q_1 = a and q_i = F_i - F_(i-1), which ends at q_n = b.
    For b/a below 2^(n-2) the root is below 2 and q_2 < a; the profile is
    still returned with ``monotone`` false.

    This is the profile that makes the AM-GM step on sum F_i / F_(i+1)
    tight for the F_n it produces. Since F_n itself moves with the middle
    entries, a numerical maximizer of h can do slightly better; h of this
    profile still lies inside the envelopes of :func:`h_bounds`.
    """
    a, b, n = float(a), float(b), _count(n, minimum=2)
    if not 0 < a < b <= 1:
        raise ValidationError(f"need 0 < a < b <= 1, got a={a}, b={b}")
    Q = b / a
    g = lambda r: r ** (n - 1) - r ** (n - 2) - Q
    lo, hi = 1.0, Q + 1.0
    if not (g(lo) < 0 <= g(hi)):
        raise InvariantViolation("root of the growth equation is not bracketed")
    rho = hi if g(hi) == 0 else bisect(g, lo, hi, xtol=1e-300, rtol=1e-12, maxiter=10_000)
    F = [a * rho**i for i in range(n)]
    q = [a] + [F[i] - F[i - 1] for i in range(1, n)]
    if abs(q[-1] - b) > 1e-9 * b:
        raise InvariantViolation(f"profile ends at {q[-1]}, expected {b}")
    q[-1] = b
    monotone = all(y >= x for x, y in zip(q, q[1:]))
    return WorstCaseProfile(tuple(q), rho, monotone)


def h_bounds(Q: float, n: int) -> tuple:
    """Lower and upper envelopes for the maximum of h over [a, b]^n with b/a = Q."""
    L = math.log(Q * n)
    lower = min((n + 1) / 2, 1 + 0.5 * math.log(Q * n / (2 * L)))
    upper = min(n, 1 + L)
    return lower, upper


# ---------------------------------------------------------------------------
# small witnesses


def gen_unbounded_gap(eps) -> tuple:
    """Two agents and a contract with a good and a bad equilibrium.

    Agents (2 eps, eps) and (1 - eps, (1 - eps)/2) under w = (1/2, 0): both
    singletons are equilibria, worth eps and (1 - eps)/2 to the principal.
    """
    eps = _frac(eps, "eps")
    if not 0 < eps < Fraction(1, 2):
        raise ValidationError(f"need 0 < eps < 1/2, got {eps}")
    inst = Instance((Agent(2 * eps, eps), Agent(1 - eps, (1 - eps) / 2)))
    return inst, AnonymousContract((Fraction(1, 2), Fraction(0)))


def gen_infeasible(eps) -> tuple:
    """Agents (eps, eps^2/2) and (1/2, 1/3); no nonnegative contract sustains {agent 2}."""
    eps = _frac(eps, "eps")
    if not 0 < eps <= Fraction(2, 3):
        raise ValidationError(f"need 0 < eps <= 2/3, got {eps}")
    inst = Instance((Agent(eps, eps * eps / 2), Agent(Fraction(1, 2), Fraction(1, 3))))
    return inst, frozenset({1})


def gen_random(
    n: int,
    seed: int,
    q_range: tuple = (0.05, 1.0),
    exact: bool = True,
    denominator: int = 100,
    distinct_q: bool = False,
    rng: Optional[np.random.Generator] = None,
) -> Instance:
    """q_i uniform on ``q_range`` and c_i uniform on [0, q_i].

    Exact instances draw numerators over ``denominator``. ``seed`` is
    required; pass ``rng`` to continue an existing stream instead.
    """
    n = _count(n)
    if seed is None and rng is None:
        raise ValidationError("random family needs a seed")
    lo, hi = float(q_range[0]), float(q_range[1])
    if not 0 < lo <= hi <= 1:
        raise ValidationError(f"q range must satisfy 0 < lo <= hi <= 1, got {q_range}")
    rng = rng if rng is not None else np.random.default_rng(seed)
    if exact:
        k_lo, k_hi = math.ceil(lo * denominator), math.floor(hi * denominator)
        if k_lo > k_hi or (distinct_q and k_hi - k_lo + 1 < n):
            raise ValidationError("q range too narrow for the denominator")
        if distinct_q:
            ks = rng.choice(np.arange(k_lo, k_hi + 1), size=n, replace=False)
        else:
            ks = rng.integers(k_lo, k_hi + 1, size=n)
        agents = []
        for k in ks:
            k = int(k)
            j = int(rng.integers(0, k + 1))
            agents.append(Agent(Fraction(k, denominator), Fraction(j, denominator)))
        return Instance(tuple(agents))
    qs = rng.uniform(lo, hi, size=n)
    if distinct_q:
        while len(set(np.round(qs, 9))) < n:
            qs = rng.uniform(lo, hi, size=n)
    return Instance(tuple(Agent(float(q), float(rng.uniform(0, q))) for q in qs))


# ---------------------------------------------------------------------------
# family dispatch


@dataclass
class FamilySpec:
    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")


@dataclass
class Generated:
    instance: Instance
    meta: dict
    contract: Optional[AnonymousContract] = None
    target_set: Optional[frozenset] = None


def _param(params: dict, key: str, default=None):
    if key in params:
        return params[key]
    if default is None:
        raise ValidationError(f"missing parameter {key!r}")
    return default


def _int(x, name):
    try:
        return int(x)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name} must be an integer, got {x!r}") from exc


def build_family(spec: FamilySpec) -> Generated:
    """Build one instance from a family name and string or numeric parameters."""
    p = spec.params
    meta = {"family": spec.family, "params": {k: str(v) for k, v in sorted(p.items())}}
    fam = spec.family
    if fam == "spread":
        n = _int(_param(p, "n"), "n")
        info = spread_info(_param(p, "Q"), n)
        meta.update(ell=info.ell, eps=str(info.eps), Q_used=str(info.Q), clamped=info.clamped)
        return Generated(gen_spread(_param(p, "Q"), n), meta)
    if fam == "equal_q_harmonic":
        return Generated(gen_equal_q_harmonic(_param(p, "q"), _param(p, "c"), _int(_param(p, "n"), "n")), meta)
    if fam == "equal_c_harmonic":
        return Generated(gen_equal_c_harmonic(_param(p, "c"), _int(_param(p, "n"), "n")), meta)
    if fam == "tight_costs":
        if "q" in p:
            q = p["q"]
            q = [s for s in q.split(",")] if isinstance(q, str) else list(q)
            Z = _param(p, "Z", q[0])
        else:
            prof = worst_case_q(_frac(_param(p, "a"), "a"), _frac(_param(p, "b"), "b"), _int(_param(p, "n"), "n"))
            meta.update(rho=prof.rho, monotone=prof.monotone)
            q = list(prof.q)
            Z = float(_frac(p["Z"], "Z")) if "Z" in p else q[0]
        return Generated(gen_tight_costs(q, Z), meta)
    if fam == "unbounded_gap":
        inst, w = gen_unbounded_gap(_param(p, "eps"))
        return Generated(inst, meta, contract=w)
    if fam == "infeasible_set":
        inst, S = gen_infeasible(_param(p, "eps"))
        return Generated(inst, meta, target_set=S)
    # random
    exact = str(p.get("exact", "true")).lower() not in ("false", "0", "no")
    inst = gen_random(
        _int(_param(p, "n"), "n"),
        _int(_param(p, "seed"), "seed"),
        q_range=(float(_frac(p.get("qmin", "0.05"), "qmin")), float(_frac(p.get("qmax", "1"), "qmax"))),
        exact=exact,
        denominator=_int(p.get("denominator", 100), "denominator"),
        distinct_q=str(p.get("distinct_q", "false")).lower() in ("true", "1", "yes"),
    )
    return Generated(inst, meta)
