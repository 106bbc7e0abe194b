"""Full conjunctive queries as hypergraphs, plus the statistics bound to them.

A query is one rule `Head(X1,...,Xn) :- R(X,Y), S(Y,Z).` over identifier
variables; the head must list exactly the union of the body variables (full
join queries only).  Statistics reference atoms by index rather than by
relation name so that self-joins carry independent guards over shared data.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .entropy import mask_of
from .relalg import INF, Relation, RelationError, _as_norm_index, degree_sequence, lp_norm, power_sum

# LP columns are 2^n; constraint count is Theta(n^2 2^n)
DEFAULT_VAR_CAP = 14
HARD_VAR_CAP = 20

SATISFIES_TOL = 1e-9


class QueryError(ValueError):
    """Syntax error or head/body mismatch in a query rule."""


class GuardError(ValueError):
    """Statistic whose conditional is not contained in its guard atom."""


@dataclass(frozen=True)
class Atom:
    relation: str
    variables: tuple[str, ...]


@dataclass(frozen=True)
class Query:
    head: str
    varnames: tuple[str, ...]
    atoms: tuple[Atom, ...]

    @property
    def n(self) -> int:
        return len(self.varnames)

    def mask(self, names: Iterable[str]) -> int:
        try:
            return mask_of(names, self.varnames)
        except ValueError as exc:
            raise QueryError(f"unknown variable in {tuple(names)!r}: {exc}") from None

    def atom_vars(self, j: int) -> frozenset[str]:
        return frozenset(self.atoms[j].variables)

    def to_text(self) -> str:
        body = ", ".join(f"{a.relation}({','.join(a.variables)})" for a in self.atoms)
        return f"{self.head}({','.join(self.varnames)}) :- {body}."


_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_ATOM_RE = re.compile(rf"\s*({_IDENT})\s*\(\s*({_IDENT}(?:\s*,\s*{_IDENT})*)\s*\)\s*")


def _strip_comments(text: str) -> str:
    return "\n".join(line.split("%", 1)[0] for line in text.splitlines())


def parse_query(text: str, var_cap: int = DEFAULT_VAR_CAP) -> Query:
    """Parse `Head(V1,...,Vn) :- A1(...), ..., Am(...).` with % comments."""
    if var_cap > HARD_VAR_CAP:
        raise QueryError(f"variable cap {var_cap} above hard cap {HARD_VAR_CAP}")
    src = _strip_comments(text).strip()
    if src.endswith("."):
        src = src[:-1]
    if ":-" not in src:
        raise QueryError("expected `Head(...) :- body.`")
    head_src, body_src = src.split(":-", 1)
    m = _ATOM_RE.fullmatch(head_src)
    if not m:
        raise QueryError(f"bad head {head_src.strip()!r}")
    head = m.group(1)
    varnames = tuple(v.strip() for v in m.group(2).split(","))
    if len(set(varnames)) != len(varnames):
        raise QueryError(f"repeated head variable in {varnames}")
    if len(varnames) > var_cap:
        raise QueryError(f"{len(varnames)} variables exceed cap {var_cap}")

    atoms = []
    pos = 0
    body_src = body_src.strip()
    if not body_src:
        raise QueryError("empty body")
    while pos < len(body_src):
        m = _ATOM_RE.match(body_src, pos)
        if not m:
            raise QueryError(f"bad atom at {body_src[pos:pos + 30]!r}")
        atoms.append(Atom(m.group(1), tuple(v.strip() for v in m.group(2).split(","))))
        pos = m.end()
        if pos < len(body_src):
            if body_src[pos] != ",":
                raise QueryError(f"expected `,` between atoms at {body_src[pos:pos + 10]!r}")
            pos += 1

    body_vars = set()
    for a in atoms:
        body_vars.update(a.variables)
    if body_vars != set(varnames):
        missing = set(varnames) - body_vars
        extra = body_vars - set(varnames)
        raise QueryError(f"head/body variable mismatch (full queries only): "
                         f"head-only {sorted(missing)}, body-only {sorted(extra)}")
    return Query(head=head, varnames=varnames, atoms=tuple(atoms))


def load_query(path, var_cap: int = DEFAULT_VAR_CAP) -> Query:
    with open(path, encoding="utf-8") as fh:
        return parse_query(fh.read(), var_cap=var_cap)


# ---------------------------------------------------------------------------
# statistics

@dataclass(frozen=True)
class StatisticSpec:
    """A conditional (V|U) with a norm index p, guarded by atom `atom`."""

    atom: int
    u_names: frozenset[str]
    v_names: frozenset[str]
    p: object  # Fraction or math.inf

    def __post_init__(self):
        object.__setattr__(self, "p", _as_norm_index(self.p))
        object.__setattr__(self, "u_names", frozenset(self.u_names))
        object.__setattr__(self, "v_names", frozenset(self.v_names))

    @property
    def simple(self) -> bool:
        return len(self.u_names) <= 1

    def check_guarded(self, q: Query) -> None:
        need = self.u_names | self.v_names
        have = q.atom_vars(self.atom)
        if not need <= have:
            raise GuardError(f"statistic {self.describe(q)} not guarded by atom "
                             f"{q.atoms[self.atom].relation}{tuple(q.atoms[self.atom].variables)}")

    def describe(self, q: Query | None = None) -> str:
        u = ",".join(sorted(self.u_names))
        v = ",".join(sorted(self.v_names))
        p = "inf" if self.p == INF else str(self.p)
        guard = f"@{self.atom}" if q is None else f"@{q.atoms[self.atom].relation}[{self.atom}]"
        return f"l{p}({v}|{u}){guard}"


@dataclass(frozen=True)
class ConcreteStatistic:
    """A StatisticSpec with its numeric bound, stored as exact log2 bits.

    norm_power optionally carries the exact p-th power of the norm (an
    integer when gathered from data with integer p); the partitioner and the
    exact satisfaction checks use it to avoid float log comparisons.
    """

    spec: StatisticSpec
    b: Fraction
    norm_power: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "b", Fraction(self.b))
        if self.b < 0:
            raise ValueError(f"log2 bound must be >= 0, got {self.b}")
        if self.norm_power is not None:
            object.__setattr__(self, "norm_power", Fraction(self.norm_power))


def atom_instance(q: Query, db: dict[str, Relation], j: int) -> Relation:
    """The guard relation bound to atom j's variables.

    Columns are renamed to the atom's variables; a repeated variable inside
    one atom selects rows where those positions agree and keeps one column.
    """
    atom = q.atoms[j]
    rel = db.get(atom.relation)
    if rel is None:
        raise RelationError(f"relation {atom.relation!r} missing from database")
    if rel.arity != len(atom.variables):
        raise RelationError(f"atom {atom.relation}{tuple(atom.variables)} has arity "
                            f"{len(atom.variables)}, relation has {rel.arity}")
    distinct = tuple(dict.fromkeys(atom.variables))
    first_pos = [atom.variables.index(v) for v in distinct]
    rows = set()
    for row in rel.rows:
        ok = True
        for pos, v in enumerate(atom.variables):
            if row[pos] != row[atom.variables.index(v)]:
                ok = False
                break
        if ok:
            rows.add(tuple(row[i] for i in first_pos))
    return Relation(name=f"{atom.relation}#{j}", columns=distinct, rows=frozenset(rows))


def _exact_leq_norm(stat: ConcreteStatistic, d) -> bool | None:
    """Exact `norm <= 2^b` when the arithmetic stays rational, else None."""
    p, b = stat.spec.p, stat.b
    if p == INF:
        if b.denominator == 1:
            return d.max_degree <= 2 ** b.numerator
        return None
    if p.denominator == 1:
        pb = p * b
        if pb.denominator == 1:
            return power_sum(d, p.numerator) <= 2 ** pb.numerator
        if stat.norm_power is not None:
            return Fraction(power_sum(d, p.numerator)) <= stat.norm_power
    return None


@dataclass(frozen=True)
class SatisfiesReport:
    ok: bool
    slacks: tuple[float, ...]  # b - actual log-norm, per statistic (bits)
    failing: tuple[int, ...] = ()


def satisfies(q: Query, db: dict[str, Relation], stats: Sequence[ConcreteStatistic],
              tol: float = SATISFIES_TOL) -> SatisfiesReport:
    """Does every statistic hold on its guard instance?

    Exact integer comparison where the norm powers stay rational, float
    comparison within tol bits otherwise.  Slack is b minus the actual
    log2-norm.  An empty guard instance satisfies everything (no degrees).
    """
    slacks = []
    failing = []
    instances: dict[int, Relation] = {}
    for i, stat in enumerate(stats):
        stat.spec.check_guarded(q)
        j = stat.spec.atom
        if j not in instances:
            instances[j] = atom_instance(q, db, j)
        inst = instances[j]
        if not inst.rows:
            slacks.append(float(stat.b))
            continue
        d = degree_sequence(inst, stat.spec.v_names, stat.spec.u_names)
        actual = lp_norm(d, stat.spec.p)
        slack = float(stat.b) - actual
        slacks.append(slack)
        exact = _exact_leq_norm(stat, d)
        ok = exact if exact is not None else slack >= -tol
        if not ok:
            failing.append(i)
    return SatisfiesReport(ok=not failing, slacks=tuple(slacks), failing=tuple(failing))


# ---------------------------------------------------------------------------
# structure diagnostics

def all_binary(q: Query) -> bool:
    return all(len(set(a.variables)) == 2 for a in q.atoms)


def girth(q: Query) -> int | float:
    """Shortest cycle length in the atom graph of a binary query.

    Parallel atoms over the same variable pair form a 2-cycle; a repeated
    variable inside an atom a 1-cycle.  Non-binary queries are outside the
    modular-cone theory and report infinity.
    """
    if not all_binary(q):
        return math.inf
    pairs: dict[frozenset[str], int] = {}
    for a in q.atoms:
        key = frozenset(a.variables)
        if len(key) == 1:
            return 1
        pairs[key] = pairs.get(key, 0) + 1
    if any(c >= 2 for c in pairs.values()):
        return 2
    adj: dict[str, set[str]] = {v: set() for v in q.varnames}
    for key in pairs:
        a, b = tuple(key)
        adj[a].add(b)
        adj[b].add(a)
    best = math.inf
    # BFS from each vertex; shortest cycle through the root is found when a
    # frontier edge closes between two distinct branches
    for root in q.varnames:
        dist = {root: 0}
        parent = {root: None}
        frontier = [root]
        while frontier:
            nxt = []
            for u in frontier:
                for w in adj[u]:
                    if w not in dist:
                        dist[w] = dist[u] + 1
                        parent[w] = u
                        nxt.append(w)
                    elif parent[u] != w and parent.get(w) != u:
                        best = min(best, dist[u] + dist[w] + 1)
            frontier = nxt
    return best
