"""Agents, instances, scalar handling and social welfare.

Agents are indexed from 0 inside the library. Everything that leaves the
library (JSON, CSV, CLI output) uses 1-based ids.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import IO, Iterable, Sequence, Union

Scalar = Union[Fraction, float]

# Relative tolerance for float-mode comparisons. Exact mode ignores it.
TAU = 1e-9


class ContractError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ContractError, ValueError):
    """Malformed or out-of-domain input."""


class GuardError(ContractError):
    """An exponential routine was asked to run above its size guard."""


class InvariantViolation(ContractError, AssertionError):
    """A proven property failed to hold on a concrete computation."""


# ---------------------------------------------------------------------------
# scalars


def is_exact(x) -> bool:
    return isinstance(x, (Fraction, int)) and not isinstance(x, bool)


def parse_scalar(value, exact: bool = True) -> Scalar:
    """Parse a JSON number or a ``"p/q"`` string.

    Decimal literals are read exactly (``"0.1"`` is 1/10, not the nearest
    binary float) when ``exact`` is true.
    """
    if isinstance(value, bool):
        raise ValidationError(f"not a number: {value!r}")
    if isinstance(value, Fraction):
        out = value
    elif isinstance(value, int):
        out = Fraction(value)
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise ValidationError(f"non-finite value {value!r}")
        out = Fraction(repr(value))
    elif isinstance(value, str):
        try:
            out = Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"cannot parse {value!r} as a rational") from exc
    else:
        raise ValidationError(f"not a number: {value!r}")
    return out if exact else float(out)


def to_mode(x: Scalar, exact: bool) -> Scalar:
    if exact:
        return x if isinstance(x, Fraction) else Fraction(x)
    return float(x)


def _scale(a: Scalar, b: Scalar) -> float:
    return max(abs(float(a)), abs(float(b)), 1.0)


def geq(a: Scalar, b: Scalar, tol: float = TAU) -> bool:
    """``a >= b``; floats get slack ``tol`` relative to the operands."""
    if isinstance(a, float) or isinstance(b, float):
        if math.isinf(a) or math.isinf(b):
            return a >= b
        return a - b >= -tol * _scale(a, b)
    return a >= b


def gt(a: Scalar, b: Scalar, tol: float = TAU) -> bool:
    """``a > b`` strictly; floats must clear the tolerance."""
    if isinstance(a, float) or isinstance(b, float):
        if math.isinf(a) or math.isinf(b):
            return a > b
        return a - b > tol * _scale(a, b)
    return a > b


def encode_scalar(x):
    """JSON-friendly form of a scalar.

    Fractions with an exact short decimal form become JSON numbers; others
    become ``"p/q"`` strings so that :func:`parse_scalar` round-trips them.
    """
    if x is None:
        return None
    if isinstance(x, float):
        if math.isinf(x):
            return "-inf" if x < 0 else "inf"
        return x
    if isinstance(x, int):
        return x
    if x.denominator == 1:
        return x.numerator
    f = float(x)
    if Fraction(repr(f)) == x:
        return f
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# agent sets


def members(mask: int) -> frozenset[int]:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


def to_mask(s: Iterable[int]) -> int:
    m = 0
    for i in s:
        m |= 1 << i
    return m


def format_set(s: Iterable[int]) -> list[int]:
    """1-based sorted id list for reports."""
    return [i + 1 for i in sorted(s)]


def parse_set(ids: Iterable[int], n: int) -> frozenset[int]:
    out = set()
    for a in ids:
        if not isinstance(a, int) or not 1 <= a <= n:
            raise ValidationError(f"agent id {a!r} outside 1..{n}")
        if a - 1 in out:
            raise ValidationError(f"duplicate agent id {a}")
        out.add(a - 1)
    return frozenset(out)


# ---------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class Agent:
    q: Scalar
    c: Scalar

    @property
    def density(self) -> Scalar:
        """Cost per unit of success probability; +inf when q is 0."""
        if self.q == 0:
            return math.inf
        return self.c / self.q


@dataclass(frozen=True)
class Instance:
    agents: tuple[Agent, ...]

    def __post_init__(self):
        if not self.agents:
            raise ValidationError("instance has no agents")
        for idx, a in enumerate(self.agents, start=1):
            if not 0 <= a.q <= 1:
                raise ValidationError(f"q out of [0,1] at agent {idx}")
            if a.c < 0:
                raise ValidationError(f"negative c at agent {idx}")
        kinds = {is_exact(a.q) for a in self.agents} | {is_exact(a.c) for a in self.agents}
        if len(kinds) > 1:
            raise ValidationError("instance mixes exact and float scalars")

    @classmethod
    def from_lists(cls, q: Sequence, c: Sequence, exact: bool | None = None) -> "Instance":
        if len(q) != len(c):
            raise ValidationError(f"{len(q)} probabilities but {len(c)} costs")
        if exact is None:
            exact = not any(isinstance(x, float) for x in (*q, *c))
        return cls(tuple(Agent(parse_scalar(a, exact), parse_scalar(b, exact)) for a, b in zip(q, c)))

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def q(self) -> tuple:
        return tuple(a.q for a in self.agents)

    @property
    def c(self) -> tuple:
        return tuple(a.c for a in self.agents)

    @property
    def exact(self) -> bool:
        return is_exact(self.agents[0].q)

    @cached_property
    def density_order(self) -> tuple[int, ...]:
        """Agents sorted by c/q, zero-probability agents last, ties by index."""
        return tuple(sorted(range(self.n), key=lambda i: (self.agents[i].density, i)))

    def active(self) -> list[int]:
        """Agents that may appear in a candidate effort set (q > 0)."""
        return [i for i, a in enumerate(self.agents) if a.q > 0]

    def to_float(self) -> "Instance":
        return Instance(tuple(Agent(float(a.q), float(a.c)) for a in self.agents))

    def to_exact(self) -> "Instance":
        return Instance(tuple(Agent(Fraction(a.q), Fraction(a.c)) for a in self.agents))

    def with_mode(self, exact: bool) -> "Instance":
        return self.to_exact() if exact else self.to_float()

    def zero(self) -> Scalar:
        return Fraction(0) if self.exact else 0.0

    def to_json(self) -> dict:
        return {"agents": [{"q": encode_scalar(a.q), "c": encode_scalar(a.c)} for a in self.agents]}


def instance_from_obj(obj, exact: bool = True) -> Instance:
    if not isinstance(obj, dict) or not isinstance(obj.get("agents"), list):
        raise ValidationError('instance JSON must be an object with an "agents" list')
    qs, cs = [], []
    for idx, rec in enumerate(obj["agents"], start=1):
        if not isinstance(rec, dict) or "q" not in rec or "c" not in rec:
            raise ValidationError(f"agent {idx} must have q and c")
        try:
            qs.append(parse_scalar(rec["q"], exact))
            cs.append(parse_scalar(rec["c"], exact))
        except ValidationError as exc:
            raise ValidationError(f"{exc} at agent {idx}") from exc
    return Instance.from_lists(qs, cs, exact=exact)


def loads_json(text: str):
    """Parse JSON keeping decimal literals exact."""
    try:
        return json.loads(text, parse_float=Fraction, parse_int=int)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc}") from exc


def load_instance(source: Union[str, bytes, IO], exact: bool = True) -> Instance:
    """Read an instance from JSON text, bytes or a readable stream."""
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    return instance_from_obj(loads_json(source), exact=exact)


def dump_instance(inst: Instance, meta: dict | None = None) -> str:
    obj = inst.to_json()
    if meta:
        obj["meta"] = meta
    return json.dumps(obj, indent=2) + "\n"


# ---------------------------------------------------------------------------
# welfare


def welfare_set(inst: Instance) -> frozenset[int]:
    return frozenset(i for i, a in enumerate(inst.agents) if a.q > a.c)


def social_welfare(inst: Instance) -> Scalar:
    """Maximum expected reward minus cost, i.e. sum of positive surpluses."""
    total = inst.zero()
    for a in inst.agents:
        if a.q > a.c:
            total += a.q - a.c
    return total
