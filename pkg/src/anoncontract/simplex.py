"""Two-phase primal simplex over exact rationals with Bland's rule.

Sized for the per-set programs of the limited-liability oracle: a handful
of variables and rows. All variables are nonnegative; the objective is
minimized.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .core import ValidationError


@dataclass
class LinearProgram:
    objective: list
    ge_rows: list = field(default_factory=list)  # (coefficients, rhs): a.x >= b
    le_rows: list = field(default_factory=list)  # (coefficients, rhs): a.x <= b

    def __post_init__(self):
        m = len(self.objective)
        for coeffs, _ in self.ge_rows + self.le_rows:
            if len(coeffs) != m:
                raise ValidationError(f"row has {len(coeffs)} coefficients, expected {m}")

    @property
    def num_vars(self) -> int:
        return len(self.objective)


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: Optional[list] = None
    value: Optional[Fraction] = None


class _Tableau:
    def __init__(self, rows: list, rhs: list, basis: list):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis

    def pivot(self, r: int, col: int):
        piv = self.rows[r][col]
        row = [v / piv for v in self.rows[r]]
        self.rows[r] = row
        self.rhs[r] = self.rhs[r] / piv
        for k in range(len(self.rows)):
            if k == r:
                continue
            f = self.rows[k][col]
            if f:
                self.rows[k] = [a - f * b for a, b in zip(self.rows[k], row)]
                self.rhs[k] -= f * self.rhs[r]
        self.basis[r] = col

    def reduced_costs(self, cost: Sequence, allowed: Sequence[int]) -> dict:
        out = {}
        for j in allowed:
            z = cost[j]
            for r, b in enumerate(self.basis):
                if self.rows[r][j]:
                    z -= cost[b] * self.rows[r][j]
            out[j] = z
        return out

    def run(self, cost: Sequence, allowed: Sequence[int]) -> str:
        while True:
            rc = self.reduced_costs(cost, allowed)
            entering = next((j for j in sorted(rc) if rc[j] < 0), None)
            if entering is None:
                return "optimal"
            best = None
            for r, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    key = (self.rhs[r] / a, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return "unbounded"
            self.pivot(best[1], entering)


def solve_lp(lp: LinearProgram) -> LPResult:
    """Minimize ``objective . x`` subject to the rows and ``x >= 0``."""
    n = lp.num_vars
    raw = [([Fraction(a) for a in co], Fraction(b), -1) for co, b in lp.ge_rows]
    raw += [([Fraction(a) for a in co], Fraction(b), 1) for co, b in lp.le_rows]
    m = len(raw)
    cost = [Fraction(v) for v in lp.objective]
    if m == 0:
        if any(v < 0 for v in cost):
            return LPResult("unbounded")
        return LPResult("optimal", [Fraction(0)] * n, Fraction(0))

    # columns: originals [0, n), slacks [n, n+m), artificials after that
    rows, rhs, basis, artificial = [], [], [], []
    n_art = 0
    for co, b, slack_sign in raw:
        if b < 0:
            co, b, slack_sign = [-a for a in co], -b, -slack_sign
        rows.append((co, b, slack_sign))
        if slack_sign < 0:
            n_art += 1
    width = n + m + n_art
    art_col = n + m
    table = []
    for r, (co, b, slack_sign) in enumerate(rows):
        row = co + [Fraction(0)] * (m + n_art)
        row[n + r] = Fraction(slack_sign)
        if slack_sign > 0:
            basis.append(n + r)
        else:
            row[art_col] = Fraction(1)
            basis.append(art_col)
            artificial.append(art_col)
            art_col += 1
        table.append(row)
        rhs.append(b)
    tab = _Tableau(table, rhs, basis)

    if artificial:
        phase1 = [Fraction(0)] * width
        for j in artificial:
            phase1[j] = Fraction(1)
        tab.run(phase1, range(width))
        infeas = sum((tab.rhs[r] for r, b in enumerate(tab.basis) if b in artificial), Fraction(0))
        if infeas > 0:
            return LPResult("infeasible")
        art = set(artificial)
        for r in range(len(tab.rows) - 1, -1, -1):
            if tab.basis[r] not in art:
                continue
            col = next((j for j in range(n + m) if tab.rows[r][j] != 0), None)
            if col is None:
                del tab.rows[r], tab.rhs[r], tab.basis[r]
            else:
                tab.pivot(r, col)

    phase2 = cost + [Fraction(0)] * (width - n)
    status = tab.run(phase2, range(n + m))
    if status != "optimal":
        return LPResult(status)
    x = [Fraction(0)] * n
    for r, b in enumerate(tab.basis):
        if b < n:
            x[b] = tab.rhs[r]
    value = sum((c * v for c, v in zip(cost, x)), Fraction(0))
    return LPResult("optimal", x, value)
