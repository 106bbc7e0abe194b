"""Relation storage and the statistics extracted from it.

A Relation is a named set of fixed-arity tuples (set semantics, duplicates
dropped on construction).  Values are interned to dense integer ids through a
process-wide pool so that joins and group-bys compare ints; the original
atoms (ints, strings, or pairs produced by domain products) are kept for
output.  Everything downstream is derived from two primitives:

  * degree_sequence(R, V, U): the sorted multiplicities of distinct V-values
    per distinct U-value in the projection of R onto U union V, and
  * lp_norm(d, p): log2 of (sum_i d_i^p)^(1/p), with p = inf meaning the
    max degree and p = 1 the projection cardinality.

Relations and all derived values are immutable after construction.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping


class RelationError(ValueError):
    """Malformed relation input: ragged rows, bad header, unknown attribute."""


# ---------------------------------------------------------------------------
# value interning

class _Interner:
    """Process-wide atom <-> dense id pool (single id space so columns join)."""

    def __init__(self):
        self._ids: dict = {}
        self._atoms: list = []

    def id_of(self, atom) -> int:
        vid = self._ids.get(atom)
        if vid is None:
            vid = len(self._atoms)
            self._ids[atom] = vid
            self._atoms.append(atom)
        return vid

    def atom_of(self, vid: int):
        return self._atoms[vid]


_POOL = _Interner()


def intern_atom(atom) -> int:
    return _POOL.id_of(atom)


def atom_of(vid: int):
    return _POOL.atom_of(vid)


def render_atom(atom) -> str:
    """Composite (pair) values render as (a,b) strings on export."""
    if isinstance(atom, tuple):
        return "(" + ",".join(render_atom(a) for a in atom) + ")"
    return str(atom)


# ---------------------------------------------------------------------------
# relations

@dataclass(frozen=True)
class Relation:
    """Named set of fixed-arity rows; rows hold interned value ids."""

    name: str
    columns: tuple[str, ...]
    rows: frozenset[tuple[int, ...]]
    dropped_duplicates: int = 0

    def __post_init__(self):
        if len(set(self.columns)) != len(self.columns):
            raise RelationError(f"{self.name}: duplicate attribute names {self.columns}")
        for row in self.rows:
            if len(row) != len(self.columns):
                raise RelationError(f"{self.name}: row arity {len(row)} != {len(self.columns)} columns")
            break  # rows are homogeneous by construction; spot check is enough

    @property
    def arity(self) -> int:
        return len(self.columns)

    def __len__(self) -> int:
        return len(self.rows)

    def column_index(self, attr: str) -> int:
        try:
            return self.columns.index(attr)
        except ValueError:
            raise RelationError(f"{self.name}: no attribute {attr!r} in {self.columns}") from None

    def project(self, attrs: Iterable[str]) -> set[tuple[int, ...]]:
        idxs = [self.column_index(a) for a in attrs]
        return {tuple(row[i] for i in idxs) for row in self.rows}

    def sorted_rows(self) -> list[tuple[int, ...]]:
        return sorted(self.rows)

    def decoded_rows(self) -> list[tuple]:
        return sorted(tuple(atom_of(v) for v in row) for row in self.rows)


def make_relation(name: str, columns: Iterable[str], raw_rows: Iterable[tuple]) -> Relation:
    """Intern values, enforce set semantics, count the duplicates dropped."""
    cols = tuple(columns)
    seen: set[tuple[int, ...]] = set()
    dropped = 0
    for raw in raw_rows:
        if len(raw) != len(cols):
            raise RelationError(f"{name}: row {raw!r} has arity {len(raw)}, expected {len(cols)}")
        row = tuple(intern_atom(a) for a in raw)
        if row in seen:
            dropped += 1
        else:
            seen.add(row)
    return Relation(name=name, columns=cols, rows=frozenset(seen), dropped_duplicates=dropped)


def _parse_token(tok: str):
    # all-digit tokens become ints so generated and loaded data share ids
    if tok and (tok.isdigit() or (tok[0] == "-" and tok[1:].isdigit())):
        return int(tok)
    return tok


def load_relation(path: str | Path, name: str | None = None, delimiter: str | None = None) -> Relation:
    """Load a CSV/TSV file with a mandatory header row.

    Delimiter is inferred from the extension (.tsv -> tab, else comma) and can
    be overridden.  RFC-4180 double quoting only, UTF-8.
    """
    path = Path(path)
    if delimiter is None:
        delimiter = "\t" if path.suffix.lower() == ".tsv" else ","
    if name is None:
        name = path.stem
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise RelationError(f"{path}: empty file, header row required") from None
        header = [h.strip() for h in header]
        if not header or any(not h for h in header):
            raise RelationError(f"{path}: empty header field in {header}")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(header):
                raise RelationError(f"{path}:{lineno}: row has {len(rec)} fields, header has {len(header)}")
            rows.append(tuple(_parse_token(t) for t in rec))
    return make_relation(name, header, rows)


def save_relation(rel: Relation, path: str | Path, delimiter: str | None = None) -> None:
    path = Path(path)
    if delimiter is None:
        delimiter = "\t" if path.suffix.lower() == ".tsv" else ","
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        writer.writerow(rel.columns)
        for row in rel.decoded_rows():
            writer.writerow([render_atom(a) for a in row])


# ---------------------------------------------------------------------------
# degree sequences and norms

@dataclass(frozen=True)
class DegreeSequence:
    """Positive integers, sorted non-increasing."""

    degrees: tuple[int, ...]

    def __post_init__(self):
        if not self.degrees:
            raise RelationError("empty degree sequence")
        prev = None
        for d in self.degrees:
            if not isinstance(d, int) or d < 1:
                raise RelationError(f"degree {d!r} is not a positive integer")
            if prev is not None and d > prev:
                raise RelationError(f"degrees not sorted non-increasing: {self.degrees}")
            prev = d

    def __len__(self) -> int:
        return len(self.degrees)

    def __iter__(self):
        return iter(self.degrees)

    @property
    def total(self) -> int:
        return sum(self.degrees)

    @property
    def max_degree(self) -> int:
        return self.degrees[0]


def degree_sequence(rel: Relation, v_attrs: Iterable[str], u_attrs: Iterable[str]) -> DegreeSequence:
    """Degrees of U-values in the projection of rel onto U union V.

    U and V may overlap; the projection goes to U union V first.  With U empty
    there is a single degree, the count of distinct V-values.
    """
    u = tuple(dict.fromkeys(u_attrs))
    v = tuple(dict.fromkeys(v_attrs))
    iu = [rel.column_index(a) for a in u]
    iv = [rel.column_index(a) for a in v]
    groups: dict[tuple, set] = {}
    for row in rel.rows:
        key = tuple(row[i] for i in iu)
        groups.setdefault(key, set()).add(tuple(row[i] for i in iv))
    if not groups:
        # empty relation: a single empty group when U is empty would still be
        # degree 0, which is not a valid sequence; callers treat empty
        # relations before asking for degrees
        raise RelationError(f"{rel.name}: degree sequence of an empty relation")
    return DegreeSequence(tuple(sorted((len(vs) for vs in groups.values()), reverse=True)))


INF = math.inf


def _as_norm_index(p):
    """Normalize a norm index to Fraction or inf; reject p <= 0."""
    if p == INF or p == "inf":
        return INF
    q = Fraction(p) if not isinstance(p, Fraction) else p
    if q <= 0:
        raise ValueError(f"norm index must be positive, got {p!r}")
    return q


def power_sum(d: DegreeSequence, p: int) -> int:
    """Exact sum of p-th powers for integer p >= 1."""
    if p < 1:
        raise ValueError("power_sum needs integer p >= 1")
    return sum(x ** p for x in d.degrees)


def lp_norm(d: DegreeSequence, p) -> float:
    """log2 of the lp-norm of a degree sequence, in bits.

    Finite p: log2((sum_i d_i^p)^(1/p)); p = inf: log2(max degree).
    Degrees are summed in the stored descending order; integer p goes through
    exact integer power sums before the single log2.
    """
    p = _as_norm_index(p)
    if p is INF:
        return math.log2(d.max_degree)
    if p.denominator == 1:
        return math.log2(power_sum(d, p.numerator)) / p.numerator
    total = math.fsum(x ** float(p) for x in d.degrees)
    return math.log2(total) / float(p)


# ---------------------------------------------------------------------------
# empirical entropy

@dataclass(frozen=True)
class EmpiricalEntropy:
    """Entropy (bits) of every marginal of a tuple distribution on a relation."""

    varnames: tuple[str, ...]
    h: "SetFunction"  # from lpbound.entropy; float-valued

    def value(self, attrs: Iterable[str]) -> float:
        mask = 0
        for a in attrs:
            mask |= 1 << self.varnames.index(a)
        return self.h.values[mask]


def empirical_entropy(rel: Relation, weights: Mapping[tuple, float] | None = None) -> EmpiricalEntropy:
    """Entropy vector of the (uniform or weighted) distribution over rel's tuples.

    weights, when given, map decoded or interned rows to strictly positive
    reals; they are normalized internally.
    """
    from .entropy import SetFunction  # local import to avoid a cycle

    if not rel.rows:
        raise RelationError(f"{rel.name}: entropy of an empty relation")
    rows = rel.sorted_rows()
    if weights is None:
        probs = [1.0 / len(rows)] * len(rows)
    else:
        raw = []
        for row in rows:
            w = weights.get(row)
            if w is None:
                w = weights.get(tuple(atom_of(v) for v in row))
            if w is None or w <= 0:
                raise RelationError(f"{rel.name}: missing or non-positive weight for row {row}")
            raw.append(float(w))
        z = math.fsum(raw)
        probs = [w / z for w in raw]
    n = rel.arity
    values = [0.0] * (1 << n)
    for mask in range(1, 1 << n):
        idxs = [i for i in range(n) if mask & (1 << i)]
        marg: dict[tuple, float] = {}
        for row, pr in zip(rows, probs):
            key = tuple(row[i] for i in idxs)
            marg[key] = marg.get(key, 0.0) + pr
        values[mask] = -math.fsum(q * math.log2(q) for q in marg.values() if q > 0.0)
    return EmpiricalEntropy(varnames=rel.columns, h=SetFunction(n=n, values=tuple(values)))


# ---------------------------------------------------------------------------
# synthetic instances

def alpha_beta_profile(m_size: int, alpha: float, beta: float) -> tuple[int, int, int]:
    """Realized (heavy_count, heavy_degree, diagonal_tail) after rounding.

    m_size^alpha and m_size^beta round to the nearest positive integer; the
    degree-1 diagonal block is clamped at zero when rounding overshoots, but
    a genuinely negative tail (2 * m_size^(alpha+beta) > m_size) is a domain
    error.
    """
    if alpha <= 0 or beta <= 0 or alpha + beta > 1:
        raise ValueError(f"need alpha, beta > 0 and alpha + beta <= 1, got {alpha}, {beta}")
    if m_size < 1:
        raise ValueError("relation size must be >= 1")
    if 2 * m_size ** (alpha + beta) > m_size + 1e-9:
        raise ValueError(f"degenerate instance: 2 * {m_size}^({alpha}+{beta}) exceeds {m_size}")
    heavy = max(1, round(m_size ** alpha))
    deg = max(1, round(m_size ** beta))
    tail = max(0, m_size - 2 * heavy * deg)
    return heavy, deg, tail


def generate_alpha_beta(m_size: int, alpha: float, beta: float, name: str = "R") -> Relation:
    """Binary relation whose degree sequences on both sides are heavy-light:

    heavy_count values of degree heavy_degree and the remainder of degree 1,
    built as the disjoint union of a forward fan-out block, its mirror, and a
    degree-1 diagonal.
    """
    heavy, deg, tail = alpha_beta_profile(m_size, alpha, beta)
    rows = []
    for i in range(heavy):
        for j in range(deg):
            rows.append((("L", i), ("F", i, j)))   # fan-out: X heavy, Y degree 1
            rows.append((("M", i, j), ("R", i)))   # mirror:  Y heavy, X degree 1
    for k in range(tail):
        rows.append((("D", k), ("D", k)))
    return make_relation(name, ("X", "Y"), rows)


def generate_preferential_graph(num_edges: int, seed: int = 0, name: str = "E") -> Relation:
    """Undirected power-law-ish edge relation via preferential attachment.

    Stored symmetrically (both orientations), so degree sequences on either
    column agree; edge count refers to distinct undirected edges.
    """
    rng = random.Random(seed)
    # seed triangle so attachment has targets and triangles exist
    edges = {(0, 1), (1, 2), (0, 2)}
    endpoints = [0, 1, 1, 2, 0, 2]
    node = 3
    while len(edges) < num_edges:
        # two attachments per new node biased by degree, plus occasional
        # random edge between existing nodes to thicken the core
        if rng.random() < 0.2:
            a = rng.choice(endpoints)
            b = rng.choice(endpoints)
        else:
            a = node
            b = rng.choice(endpoints)
            node += 1
        if a == b:
            continue
        e = (min(a, b), max(a, b))
        if e in edges:
            continue
        edges.add(e)
        endpoints.extend(e)
    rows = []
    for a, b in edges:
        rows.append((a, b))
        rows.append((b, a))
    return make_relation(name, ("X", "Y"), rows)
