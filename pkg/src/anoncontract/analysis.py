"""Per-instance gap reports between contract classes and family sweeps.

A report puts side by side the social welfare, the best uniform contract,
the best limited-liability anonymous contract (small n only) and the two
constructions without limited liability, together with checks of the
known bounds relating them. Logarithms are natural.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .core import (
    ContractError,
    GuardError,
    Instance,
    Scalar,
    ValidationError,
    encode_scalar,
    geq,
    members,
    parse_scalar,
    social_welfare,
)
from .generators import FamilySpec, build_family
from .llopt import MAX_LL_AGENTS, optimal_ll_anonymous
from .noll import full_extraction, harmonic, log_contract
from .uniform import solve_uniform

CSV_COLUMNS = (
    "family",
    "params",
    "n",
    "Q",
    "sw",
    "ua",
    "opt_ll",
    "noll_log",
    "noll_full",
    "sw_over_ua",
    "sw_over_opt_ll",
    "sw_over_noll_log",
    "flags",
    "status",
)


@dataclass(frozen=True)
class Skipped:
    reason: str

    def __str__(self):
        return "skipped"


@dataclass(frozen=True)
class NotApplicable:
    reason: str

    def __str__(self):
        return "not_applicable"


def _ratio(a: Scalar, b) -> Optional[Scalar]:
    if isinstance(b, (Skipped, NotApplicable)) or b == 0:
        return None
    return a / b


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (Skipped, NotApplicable)):
        return str(x)
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return str(encode_scalar(x))


# ---------------------------------------------------------------------------
# bound checks


def probability_ratio(inst: Instance) -> float:
    """max q / min q over agents with q > 0."""
    qs = [inst.agents[i].q for i in inst.active()]
    return max(qs) / min(qs) if qs else 1


def cost_ratio(inst: Instance) -> float:
    """max c / min c; infinite when some cost is zero."""
    cs = [a.c for a in inst.agents]
    if min(cs) == 0:
        return math.inf if max(cs) > 0 else 1
    return max(cs) / min(cs)


def spread_bound(ratio, n: int) -> float:
    """min{n, 1 + log(ratio * n)}."""
    if math.isinf(ratio):
        return float(n)
    return min(float(n), 1 + math.log(float(ratio) * n))


def weighted_prefix_bound(inst: Instance, S: Iterable[int], weight: str = "q") -> Optional[Scalar]:
    """Sum over l in S of v_l / (v of agents up to l in density order).

    ``weight`` picks v = q or v = c. Returns None when a needed prefix sum
    is zero (possible for the cost weights).
    """
    S = set(S)
    total = inst.zero()
    out = inst.zero()
    for i in inst.density_order:
        a = inst.agents[i]
        if a.q == 0:
            break
        total += a.q if weight == "q" else a.c
        if i in S:
            if total == 0:
                return None
            out += (a.q if weight == "q" else a.c) / total
    return out


def subset_inequality_failures(inst: Instance, ua: Scalar, weight: str = "q") -> list:
    """Subsets S where the surplus of S exceeds the weighted prefix bound times UA.

    Checks every subset of the agents with q > 0, so keep n small.
    """
    active = inst.active()
    bad = []
    for mask in range(1 << len(active)):
        S = [active[b] for b in members(mask)]
        lhs = sum((inst.agents[i].q - inst.agents[i].c for i in S), inst.zero())
        coef = weighted_prefix_bound(inst, S, weight)
        if coef is None:
            raise ValidationError("cost-weighted bound needs positive costs")
        if not geq(coef * ua, lhs):
            bad.append(frozenset(S))
    return bad


def thin_margin_premise(inst: Instance, delta) -> bool:
    """Whether agents with density below 1 - 1/n carry enough of the welfare.

    True when 2 * (surplus of those agents) > (1 + delta) * SW.
    """
    n = inst.n
    cut = 1 - (inst.zero() + 1) / n
    T = [a for a in inst.agents if a.q > 0 and a.c / a.q < cut]
    surplus = sum((a.q - a.c for a in T), inst.zero())
    return 2 * surplus > (1 + delta) * social_welfare(inst)


def thin_margin_bound(n: int) -> float:
    return 2 * (1 + math.log(n**3))


def max_density(inst: Instance):
    return max(inst.agents[i].density for i in inst.active()) if inst.active() else 0


# ---------------------------------------------------------------------------
# reports


@dataclass
class GapReport:
    n: int
    Q: Scalar
    C: Scalar
    sw: Scalar
    ua: Scalar
    opt_ll: object  # Scalar | Skipped
    noll_log: Scalar
    noll_full: object  # Scalar | NotApplicable
    flags: dict = field(default_factory=dict)
    status: str = "ok"

    @property
    def sw_over_ua(self):
        return _ratio(self.sw, self.ua)

    @property
    def sw_over_opt_ll(self):
        return _ratio(self.sw, self.opt_ll)

    @property
    def sw_over_noll_log(self):
        return _ratio(self.sw, self.noll_log)

    def failed_checks(self) -> list:
        return sorted(k for k, v in self.flags.items() if v is False and not k.endswith("_premise"))

    def to_json(self) -> dict:
        def enc(x):
            if isinstance(x, (Skipped, NotApplicable)):
                return {"status": str(x), "reason": x.reason}
            if isinstance(x, float) and math.isinf(x):
                return "inf"
            return encode_scalar(x)

        return {
            "n": self.n,
            "Q": enc(self.Q),
            "C": enc(self.C),
            "sw": enc(self.sw),
            "ua": enc(self.ua),
            "opt_ll": enc(self.opt_ll),
            "noll_log": enc(self.noll_log),
            "noll_full": enc(self.noll_full),
            "sw_over_ua": enc(self.sw_over_ua),
            "sw_over_opt_ll": enc(self.sw_over_opt_ll),
            "sw_over_noll_log": enc(self.sw_over_noll_log),
            "flags": dict(self.flags),
            "status": self.status,
        }

    def csv_fields(self) -> list:
        flags = ";".join(f"{k}={_fmt(v)}" for k, v in sorted(self.flags.items()) if v is not None)
        return [
            self.n,
            _fmt(self.Q),
            _fmt(self.sw),
            _fmt(self.ua),
            _fmt(self.opt_ll),
            _fmt(self.noll_log),
            _fmt(self.noll_full),
            _fmt(self.sw_over_ua),
            _fmt(self.sw_over_opt_ll),
            _fmt(self.sw_over_noll_log),
            flags,
            self.status,
        ]


def gap_report(inst: Instance, delta=0.5, alpha=None, ll_limit: int = MAX_LL_AGENTS) -> GapReport:
    """Compute every contract class on ``inst`` and check the bounds between them.

    ``delta`` parameterizes the thin-margin premise; ``alpha`` (optional)
    the density-cap premise. Flags ending in ``_premise`` record whether a
    conditional bound applies; the matching flag without the suffix is its
    conclusion, or None when the premise fails.
    """
    sw = social_welfare(inst)
    uni = solve_uniform(inst)
    ua = uni.utility
    status = "ok"
    if inst.n <= ll_limit:
        opt_ll = optimal_ll_anonymous(inst).utility
    else:
        opt_ll = Skipped(f"n={inst.n} above {ll_limit}")
        status = "opt_ll_skipped"
    klog = log_contract(inst)
    try:
        noll_full = full_extraction(inst).utility
    except ValidationError as exc:
        noll_full = NotApplicable(str(exc))

    Q, C = probability_ratio(inst), cost_ratio(inst)
    flags = {}
    ratio = _ratio(sw, ua)
    flags["spread_bound"] = ratio is None or float(ratio) <= spread_bound(Q, inst.n) * (1 + 1e-12)
    flags["cost_bound"] = ratio is None or float(ratio) <= spread_bound(C, inst.n) * (1 + 1e-12)
    h_n = harmonic(inst.n) if inst.exact else float(harmonic(inst.n))
    flags["harmonic_bound"] = geq(h_n * klog.utility, sw) if klog.k_star else None
    if not isinstance(opt_ll, Skipped):
        flags["ordering"] = geq(opt_ll, ua) and geq(sw, opt_ll)
    if not isinstance(noll_full, NotApplicable):
        flags["full_extraction"] = geq(noll_full, sw) and geq(sw, noll_full)

    delta = parse_scalar(delta, inst.exact)
    prem = thin_margin_premise(inst, delta)
    flags["thin_margin_premise"] = prem
    flags["thin_margin"] = (ratio is None or float(ratio) <= thin_margin_bound(inst.n)) if prem else None
    if alpha is not None:
        alpha = parse_scalar(alpha, inst.exact)
        prem = geq(alpha, max_density(inst))
        flags["density_cap_premise"] = prem
        flags["density_cap"] = geq(ua, (1 - alpha) * sw) if prem else None

    return GapReport(inst.n, Q, C, sw, ua, opt_ll, klog.utility, noll_full, flags, status)


# ---------------------------------------------------------------------------
# sweeps


def expand_grid(grid) -> list:
    """A list of parameter dicts, or a dict of value lists expanded as a product."""
    if isinstance(grid, dict):
        keys = list(grid)
        return [dict(zip(keys, vals)) for vals in itertools.product(*(grid[k] for k in keys))]
    return [dict(g) for g in grid]


def sweep_rows(family: str, grid, delta=0.5, alpha=None, ll_limit: int = MAX_LL_AGENTS) -> list:
    """One CSV row per grid point, in grid order. Failures go to the status column."""
    rows = []
    for params in expand_grid(grid):
        ptxt = ";".join(f"{k}={params[k]}" for k in params)
        try:
            gen = build_family(FamilySpec(family, params))
            rep = gap_report(gen.instance, delta=delta, alpha=alpha, ll_limit=ll_limit)
            rows.append([family, ptxt] + rep.csv_fields())
        except GuardError as exc:
            rows.append([family, ptxt] + [""] * 11 + [f"guard: {exc}"])
        except ContractError as exc:
            rows.append([family, ptxt] + [""] * 11 + [f"error: {exc}"])
    return rows


def sweep(family: str, grid, delta=0.5, alpha=None, ll_limit: int = MAX_LL_AGENTS) -> str:
    """CSV text of :func:`sweep_rows` with a header."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    writer.writerows(sweep_rows(family, grid, delta=delta, alpha=alpha, ll_limit=ll_limit))
    return buf.getvalue()
