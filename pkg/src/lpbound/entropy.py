"""Set functions over 2^n variable subsets and the cone constraint systems.

Subsets of the n query variables are integer bitmasks; a SetFunction is a
dense vector indexed by mask.  Three polyhedral cones matter here:

  * the polymatroids: h(empty) = 0, monotone, submodular.  The constraint
    generator emits only the elementary inequalities (monotonicity at the top
    set, submodularity on pairs x != y conditioned on W), which generate the
    full cone with n + n(n-1)/2 * 2^(n-2) rows.
  * the normal cone: nonnegative combinations of the 2^n - 1 step functions
    h^V(U) = [V meets U].
  * the modular cone: combinations of the n singleton step functions.

Scalars can be exact Fractions or floats; the LP paths stay exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .relalg import INF, _as_norm_index

# sparse linear form over masks: {mask: coeff}, read as sum coeff * h(mask)
LinearTerm = dict[int, Fraction]


@dataclass(frozen=True)
class SetFunction:
    n: int
    values: tuple

    def __post_init__(self):
        if len(self.values) != 1 << self.n:
            raise ValueError(f"need {1 << self.n} values for n={self.n}, got {len(self.values)}")

    def __getitem__(self, mask: int):
        return self.values[mask]

    def scale(self, k) -> "SetFunction":
        return SetFunction(self.n, tuple(v * k for v in self.values))

    def add(self, other: "SetFunction") -> "SetFunction":
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        return SetFunction(self.n, tuple(a + b for a, b in zip(self.values, other.values)))


def full_mask(n: int) -> int:
    return (1 << n) - 1


def mask_of(names: Iterable[str], varnames: tuple[str, ...]) -> int:
    m = 0
    for a in names:
        m |= 1 << varnames.index(a)
    return m


def names_of(mask: int, varnames: tuple[str, ...]) -> tuple[str, ...]:
    return tuple(v for i, v in enumerate(varnames) if mask & (1 << i))


def step_function(v_mask: int, n: int) -> SetFunction:
    """h^V: 1 on subsets meeting V, 0 elsewhere (identically 0 for V empty)."""
    if v_mask >> n:
        raise ValueError(f"mask {v_mask:#x} out of range for n={n}")
    one, zero = Fraction(1), Fraction(0)
    return SetFunction(n, tuple(one if (u & v_mask) else zero for u in range(1 << n)))


def conditional(h: SetFunction, v_mask: int, u_mask: int):
    """h(V|U) = h(U union V) - h(U)."""
    return h[u_mask | v_mask] - h[u_mask]


def stat_term(h: SetFunction, u_mask: int, v_mask: int, p):
    """(1/p) h(U) + h(V|U); the first term vanishes at p = inf."""
    p = _as_norm_index(p)
    cond = conditional(h, v_mask, u_mask)
    if p is INF:
        return cond
    return h[u_mask] / p + cond


def stat_linear_term(u_mask: int, v_mask: int, p) -> LinearTerm:
    """stat_term as a sparse linear form over masks."""
    p = _as_norm_index(p)
    inv_p = Fraction(0) if p is INF else 1 / p
    term: LinearTerm = {}
    uv = u_mask | v_mask
    if u_mask:
        term[u_mask] = inv_p - 1
    term[uv] = term.get(uv, Fraction(0)) + 1
    return {m: c for m, c in term.items() if c}


def shannon_constraints(n: int, cap: int = 20) -> list[LinearTerm]:
    """Elementary generators of the polymatroid cone, each read as expr >= 0.

    Monotonicity: h(full) - h(full minus x) for every x.
    Submodularity: h(W+x) + h(W+y) - h(W+xy) - h(W) for x < y, W disjoint.
    h(empty) = 0 is handled by the LP layer (the empty coordinate is pinned);
    coefficients on the empty mask are simply dropped here.
    """
    if n > cap:
        raise ValueError(f"n={n} exceeds cap {cap}: 2^n LP columns")
    rows: list[LinearTerm] = []
    full = full_mask(n)
    for x in range(n):
        rows.append({full: Fraction(1), full ^ (1 << x): Fraction(-1)})
    for x in range(n):
        for y in range(x + 1, n):
            bx, by = 1 << x, 1 << y
            rest = [i for i in range(n) if i != x and i != y]
            for sub in range(1 << len(rest)):
                w = 0
                for i, v in enumerate(rest):
                    if sub & (1 << i):
                        w |= 1 << v
                row: LinearTerm = {w | bx: Fraction(1)}
                row[w | by] = row.get(w | by, Fraction(0)) + 1
                row[w | bx | by] = row.get(w | bx | by, Fraction(0)) - 1
                if w:
                    row[w] = row.get(w, Fraction(0)) - 1
                rows.append({m: c for m, c in row.items() if c})
    return rows


def is_polymatroid(h: SetFunction, tol=0) -> bool:
    """Exact (or tol-relaxed) check of the elementary constraint system."""
    if abs(h[0]) > tol:
        return False
    for row in shannon_constraints(h.n):
        total = sum(c * h[m] for m, c in row.items())
        if total < -tol:
            return False
    return True


def normal_cone_basis(n: int) -> list[SetFunction]:
    """The 2^n - 1 step functions for nonempty V, in mask order."""
    return [step_function(v, n) for v in range(1, 1 << n)]


def modular_cone_basis(n: int) -> list[SetFunction]:
    """The n singleton step functions."""
    return [step_function(1 << i, n) for i in range(n)]


def combine(coeffs: dict[int, Fraction], n: int) -> SetFunction:
    """Nonnegative combination sum_V coeffs[V] * h^V as a SetFunction."""
    values = [Fraction(0)] * (1 << n)
    for v_mask, a in coeffs.items():
        if a == 0:
            continue
        for u in range(1, 1 << n):
            if u & v_mask:
                values[u] += a
    return SetFunction(n, tuple(values))


# ---------------------------------------------------------------------------
# JSON serialization (golden-test fixtures)

def set_function_to_json(h: SetFunction, varnames: tuple[str, ...]) -> dict:
    out = {}
    for mask in range(1, 1 << h.n):
        key = ",".join(names_of(mask, varnames))
        v = h[mask]
        if isinstance(v, Fraction):
            out[key] = int(v) if v.denominator == 1 else str(v)
        else:
            out[key] = v
    return out


def set_function_from_json(data: dict, varnames: tuple[str, ...]) -> SetFunction:
    n = len(varnames)
    values = [Fraction(0)] * (1 << n)
    for key, v in data.items():
        names = [s for s in key.split(",") if s]
        mask = mask_of(names, varnames)
        values[mask] = Fraction(v) if isinstance(v, (int, str)) else v
    return SetFunction(n, tuple(values))


def load_set_function(path, varnames: tuple[str, ...]) -> SetFunction:
    with open(path, encoding="utf-8") as fh:
        return set_function_from_json(json.load(fh), varnames)
