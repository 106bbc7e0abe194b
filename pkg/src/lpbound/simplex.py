"""Exact rational two-phase simplex with dual multipliers.

Bound equalities downstream (cone collapses, strong duality of the bound
programs) are asserted as exact rational identities, so the tableau runs on
arbitrary-precision rationals: gmpy2.mpq when importable, fractions.Fraction
otherwise.  Results always come back as Fractions.

Pivoting uses the largest-coefficient rule with lowest-index tie-breaks until
a degeneracy counter trips, then switches to Bland's rule, which guarantees
termination.  Identical inputs take identical pivots.

Dual multipliers are read off the final reduced-cost row and mapped back to
the caller's row order and senses; verify() independently rechecks primal
feasibility, dual feasibility, complementary slackness and objective equality,
all exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

try:  # optional fast path, exact either way
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover
    _mpq = None

LE, EQ, GE = "<=", "=", ">="

_DEGENERACY_TRIP = 40


def _rat(x):
    if _mpq is not None:
        return _mpq(x.numerator, x.denominator) if isinstance(x, Fraction) else _mpq(x)
    return x if isinstance(x, Fraction) else Fraction(x)


def _to_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator)) if not isinstance(x, Fraction) else x


@dataclass
class LinearProgram:
    """max/min of a sparse objective subject to rows (coeffs, rel, rhs), x >= 0."""

    num_vars: int
    maximize: bool = True
    objective: dict[int, Fraction] = field(default_factory=dict)
    rows: list[tuple[dict[int, Fraction], str, Fraction]] = field(default_factory=list)

    def add_row(self, coeffs: dict[int, Fraction], rel: str, rhs) -> int:
        if rel not in (LE, EQ, GE):
            raise ValueError(f"bad relation {rel!r}")
        for j in coeffs:
            if not 0 <= j < self.num_vars:
                raise ValueError(f"variable {j} out of range")
        self.rows.append((dict(coeffs), rel, Fraction(rhs)))
        return len(self.rows) - 1

    def to_text(self) -> str:
        """Fixed-format dump for cross-checking against external solvers."""
        def term(coeffs):
            parts = []
            for j in sorted(coeffs):
                c = coeffs[j]
                if c == 0:
                    continue
                sign = "+" if c > 0 else "-"
                parts.append(f"{sign} {abs(c)} x{j}")
            return " ".join(parts) if parts else "0"

        lines = [("maximize: " if self.maximize else "minimize: ") + term(self.objective)]
        for i, (coeffs, rel, rhs) in enumerate(self.rows):
            lines.append(f"r{i}: {term(coeffs)} {rel} {rhs}")
        lines.append(f"bounds: x0..x{self.num_vars - 1} >= 0")
        return "\n".join(lines)


@dataclass
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    objective: Fraction | None = None
    primal: list[Fraction] | None = None
    dual: list[Fraction] | None = None


class _Tableau:
    """Dense simplex tableau over the internal rational type."""

    def __init__(self, lp: LinearProgram):
        self.lp = lp
        n = lp.num_vars
        m = len(lp.rows)
        zero, one = _rat(0), _rat(1)
        self.zero = zero
        # working rows: equality form with one slot per slack; rows scaled so
        # rhs >= 0; sigma[i] records the scaling sign relative to the caller
        self.sigma = [1] * m
        self.slack_col = [-1] * m
        self.art_col = [-1] * m
        ncols = n + m  # reserve one slack/surplus slot per row up front
        rows = []
        rhs = []
        art_needed = []
        for i, (coeffs, rel, b) in enumerate(lp.rows):
            row = [zero] * ncols
            for j, c in coeffs.items():
                row[j] = _rat(c)
            bb = _rat(b)
            if rel != EQ:
                self.slack_col[i] = n + i
                row[n + i] = one if rel == LE else -one
            # scale so rhs >= 0; a >= row with rhs 0 flips too, which turns
            # its surplus into a usable +1 unit column (no artificial)
            if bb < zero or (rel == GE and bb == zero):
                self.sigma[i] = -1
                row = [-c for c in row]
                bb = -bb
            rows.append(row)
            rhs.append(bb)
            # a usable unit column exists iff the slack slot holds +1
            if rel == EQ or row[n + i] != one:
                art_needed.append(i)
        self.ncols = ncols
        self.art_start = ncols
        for k, i in enumerate(art_needed):
            self.art_col[i] = ncols + k
        total = ncols + len(art_needed)
        for i, row in enumerate(rows):
            row.extend([zero] * len(art_needed))
            if self.art_col[i] >= 0:
                row[self.art_col[i]] = one
        self.cols_total = total
        self.rows = rows
        self.rhs = rhs
        self.basis = [self.art_col[i] if self.art_col[i] >= 0 else self.slack_col[i]
                      for i in range(m)]
        self.has_artificials = bool(art_needed)

    # -- pivoting ----------------------------------------------------------

    def _reduced_costs(self, cost):
        """z_j = sum_i cost[basis_i] * T[i][j] - cost[j], plus current z value."""
        zero = self.zero
        z = [-c for c in cost]
        zval = zero
        for i, bi in enumerate(self.basis):
            cb = cost[bi]
            if cb == zero:
                continue
            row = self.rows[i]
            for j in range(self.cols_total):
                if row[j] != zero:
                    z[j] += cb * row[j]
            zval += cb * self.rhs[i]
        return z, zval

    def _pivot(self, r: int, c: int):
        rows, rhs, zero = self.rows, self.rhs, self.zero
        prow = rows[r]
        piv = prow[c]
        if piv != 1:
            inv = 1 / piv
            rows[r] = prow = [x * inv for x in prow]
            rhs[r] = rhs[r] * inv
        for i in range(len(rows)):
            if i == r:
                continue
            f = rows[i][c]
            if f == zero:
                continue
            row_i = rows[i]
            rows[i] = [a - f * b for a, b in zip(row_i, prow)]
            rhs[i] = rhs[i] - f * rhs[r]
        self.basis[r] = c

    def _optimize(self, cost, forbid_artificials: bool):
        """Run simplex for max of cost; returns 'optimal' or 'unbounded'."""
        zero = self.zero
        stalled = 0
        bland = False
        last_val = None
        while True:
            z, zval = self._reduced_costs(cost)
            if last_val is not None and zval == last_val:
                stalled += 1
                if stalled >= _DEGENERACY_TRIP:
                    bland = True
            else:
                stalled = 0
            last_val = zval
            limit = self.art_start if forbid_artificials else self.cols_total
            enter = -1
            if bland:
                for j in range(limit):
                    if z[j] < zero:
                        enter = j
                        break
            else:
                best = zero
                for j in range(limit):
                    if z[j] < best:
                        best = z[j]
                        enter = j
            if enter < 0:
                return "optimal"
            leave = -1
            best_ratio = None
            for i in range(len(self.rows)):
                a = self.rows[i][enter]
                if a > zero:
                    ratio = self.rhs[i] / a
                    if best_ratio is None or ratio < best_ratio or (
                            ratio == best_ratio and self.basis[i] < self.basis[leave]):
                        best_ratio = ratio
                        leave = i
            if leave < 0:
                return "unbounded"
            self._pivot(leave, enter)


def solve(lp: LinearProgram) -> LpSolution:
    """Exact two-phase simplex; primal and dual, dual verified by the caller.

    Variables are nonnegative.  Float coefficients are rejected: callers
    convert measured statistics to dyadic rationals first.
    """
    t = _Tableau(lp)
    zero = t.zero
    m = len(lp.rows)

    if t.has_artificials:
        cost1 = [zero] * t.cols_total
        for i in range(m):
            if t.art_col[i] >= 0:
                cost1[t.art_col[i]] = _rat(-1)
        t._optimize(cost1, forbid_artificials=False)
        _, zval = t._reduced_costs(cost1)
        if zval != zero:
            return LpSolution(status="infeasible")
        # pivot lingering artificials out where possible; an all-zero row is
        # redundant and its artificial stays basic at level zero
        for i in range(m):
            bi = t.basis[i]
            if bi >= t.art_start:
                for j in range(t.art_start):
                    if t.rows[i][j] != zero:
                        t._pivot(i, j)
                        break

    sense = 1 if lp.maximize else -1
    cost2 = [zero] * t.cols_total
    for j, c in lp.objective.items():
        cost2[j] = _rat(c) * sense
    status = t._optimize(cost2, forbid_artificials=True)
    if status == "unbounded":
        return LpSolution(status="unbounded")

    primal_work = [zero] * t.cols_total
    for i, bi in enumerate(t.basis):
        primal_work[bi] = t.rhs[i]
    primal = [_to_fraction(primal_work[j]) for j in range(lp.num_vars)]
    objective = sum((c * primal[j] for j, c in lp.objective.items()), Fraction(0))

    # dual of row i sits in the reduced cost of the row's initial unit
    # column (artificial if one exists, else the +1 slack); sigma maps back
    # to the caller's row orientation, sense to the caller's objective sense
    z, _ = t._reduced_costs(cost2)
    dual = []
    for i in range(m):
        col = t.art_col[i] if t.art_col[i] >= 0 else t.slack_col[i]
        dual.append(_to_fraction(z[col]) * t.sigma[i] * sense)
    return LpSolution(status="optimal", objective=objective, primal=primal, dual=dual)


def verify(lp: LinearProgram, sol: LpSolution) -> bool:
    """Independent exact recheck: primal and dual feasibility, complementary
    slackness, and objective equality.  Vacuously true for non-optimal
    statuses (nothing to certify)."""
    if sol.status != "optimal":
        return True
    if sol.primal is None or sol.dual is None or sol.objective is None:
        return False
    x = [Fraction(v) for v in sol.primal]
    y = [Fraction(v) for v in sol.dual]
    if len(x) != lp.num_vars or len(y) != len(lp.rows):
        return False
    if any(v < 0 for v in x):
        return False
    sense = 1 if lp.maximize else -1

    activities = []
    for coeffs, rel, rhs in lp.rows:
        act = sum((c * x[j] for j, c in coeffs.items()), Fraction(0))
        activities.append(act)
        if rel == LE and act > rhs:
            return False
        if rel == GE and act < rhs:
            return False
        if rel == EQ and act != rhs:
            return False

    obj = sum((c * x[j] for j, c in lp.objective.items()), Fraction(0))
    if obj != sol.objective:
        return False

    # dual signs per row sense (for max: <= rows y >= 0, >= rows y <= 0)
    for (coeffs, rel, rhs), yi in zip(lp.rows, y):
        s = yi * sense
        if rel == LE and s < 0:
            return False
        if rel == GE and s > 0:
            return False

    # dual feasibility and complementary slackness on variables
    for j in range(lp.num_vars):
        red = sum((y[i] * lp.rows[i][0].get(j, Fraction(0)) for i in range(len(lp.rows))),
                  Fraction(0)) - lp.objective.get(j, Fraction(0))
        if red * sense < 0:
            return False
        if x[j] != 0 and red != 0:
            return False

    # complementary slackness on rows
    for (coeffs, rel, rhs), act, yi in zip(lp.rows, activities, y):
        if yi != 0 and act != rhs:
            return False

    # strong duality
    dual_obj = sum((yi * rhs for yi, (_, _, rhs) in zip(y, lp.rows)), Fraction(0))
    return dual_obj == obj
