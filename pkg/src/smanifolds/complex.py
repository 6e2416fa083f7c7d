"""Finite Delta-complexes, chains and the alternating-sum boundary operator.

A k-cell is addressed as the pair ``(k, i)``.  Its face tuple lists the
(k-1)-cells ``face_0, ..., face_k``, where ``face_j`` is the face opposite
vertex j.  Vertices carry the empty tuple.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping

from . import rings
from .rings import StructuralError


@dataclass(frozen=True, eq=False)
class Chain:
    """A k-chain with exact coefficients; zero coefficients are dropped."""

    k: int
    coeffs: Mapping[int, object] = field(default_factory=dict)
    ring: str = "Z"

    def __post_init__(self):
        rings.check_ring(self.ring)
        clean = {}
        for cell, value in self.coeffs.items():
            value = rings.coerce(value, self.ring)
            if value != 0:
                clean[int(cell)] = value
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    def __getitem__(self, cell):
        return self.coeffs.get(cell, rings.zero(self.ring))

    def __eq__(self, other):
        if not isinstance(other, Chain):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return self.ring == other.ring
        return (self.k, self.ring, self.coeffs) == (other.k, other.ring, other.coeffs)

    def __repr__(self):
        terms = " ".join(f"{rings.format_scalar(v)}*[{self.k}:{c}]" for c, v in self.coeffs.items())
        return f"Chain({self.ring}, k={self.k}: {terms or '0'})"

    def _check(self, other):
        if self.ring != other.ring:
            raise StructuralError(f"ring mismatch {self.ring} vs {other.ring}")
        if self.k != other.k and not (self.is_zero() or other.is_zero()):
            raise StructuralError(f"degree mismatch {self.k} vs {other.k}")

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for c, v in other.coeffs.items():
            out[c] = out.get(c, 0) + v
        k = self.k if not self.is_zero() else other.k
        return Chain(k, out, self.ring)

    def __neg__(self):
        return Chain(self.k, {c: -v for c, v in self.coeffs.items()}, self.ring)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a):
        a = rings.coerce(a, self.ring)
        return Chain(self.k, {c: a * v for c, v in self.coeffs.items()}, self.ring)

    def is_zero(self):
        return not self.coeffs

    def support(self):
        return list(self.coeffs)

    def to_json(self):
        return {"k": self.k, "ring": self.ring,
                "coeffs": {str(c): rings.format_scalar(v) for c, v in self.coeffs.items()}}


class DeltaComplex:
    """A finite Delta-complex.

    ``cells[k][i]`` is the face tuple of the k-cell ``(k, i)``.  Levels may be
    empty; ``dim`` is the largest k with a cell (-1 for the empty complex).
    """

    def __init__(self, cells: Iterable[Iterable[Iterable[int]]], labels=None, coords=None):
        self.cells = tuple(tuple(tuple(int(x) for x in f) for f in level) for level in cells)
        self.labels = dict(labels or {})
        self.realization = AffineRealization(coords) if coords is not None else None

    def __repr__(self):
        return f"DeltaComplex(counts={self.counts()})"

    @property
    def dim(self):
        for k in range(len(self.cells) - 1, -1, -1):
            if self.cells[k]:
                return k
        return -1

    def counts(self):
        return tuple(len(level) for level in self.cells)

    def count(self, k):
        return len(self.cells[k]) if 0 <= k < len(self.cells) else 0

    def all_cells(self):
        for k, level in enumerate(self.cells):
            for i in range(len(level)):
                yield (k, i)

    def has_cell(self, cell):
        k, i = cell
        return 0 <= k < len(self.cells) and 0 <= i < len(self.cells[k])

    def faces(self, k, i):
        return self.cells[k][i]

    def face(self, k, i, j):
        return self.cells[k][i][j]

    def euler_characteristic(self):
        return sum((-1) ** k * len(level) for k, level in enumerate(self.cells))

    @cached_property
    def _vertices(self):
        out = {}
        for k, level in enumerate(self.cells):
            for i, fs in enumerate(level):
                if k == 0:
                    out[(0, i)] = (i,)
                elif k == 1:
                    out[(1, i)] = (fs[1], fs[0])
                else:
                    out[(k, i)] = out[(k - 1, fs[k])] + (out[(k - 1, fs[0])][-1],)
        return out

    def vertices(self, k, i):
        """Ordered vertex ids of a cell (repeats possible)."""
        return self._vertices[(k, i)]

    @cached_property
    def _cofaces(self):
        co = {c: [] for c in self.all_cells()}
        for k, level in enumerate(self.cells):
            if k == 0:
                continue
            for i, fs in enumerate(level):
                for j, f in enumerate(fs):
                    co[(k - 1, f)].append((i, j))
        return co

    def cofaces(self, k, i):
        """List of (coface id, position) pairs: cell (k, i) is face ``position`` of (k+1, id)."""
        return self._cofaces[(k, i)]

    def closure(self, cells):
        out = set()
        stack = [tuple(c) for c in cells]
        while stack:
            c = stack.pop()
            if c in out:
                continue
            if not self.has_cell(c):
                raise StructuralError(f"unknown cell {c}")
            out.add(c)
            k, i = c
            if k > 0:
                stack.extend((k - 1, f) for f in self.cells[k][i])
        return out

    def open_star(self, cells):
        """All cells having some given cell as an iterated face (the cells included)."""
        out = set()
        stack = [tuple(c) for c in cells]
        while stack:
            c = stack.pop()
            if c in out:
                continue
            if not self.has_cell(c):
                raise StructuralError(f"unknown cell {c}")
            out.add(c)
            k, i = c
            stack.extend((k + 1, j) for j, _ in self._cofaces[c])
        return out

    def components(self, cells=None):
        """Connected components of a set of cells under the face relation (sorted lists)."""
        cells = set(self.all_cells()) if cells is None else set(cells)
        parent = {c: c for c in cells}

        def find(c):
            while parent[c] != c:
                parent[c] = parent[parent[c]]
                c = parent[c]
            return c

        for k, i in cells:
            if k == 0:
                continue
            for f in self.cells[k][i]:
                if (k - 1, f) in cells:
                    a, b = find((k, i)), find((k - 1, f))
                    if a != b:
                        parent[max(a, b)] = min(a, b)
        groups = {}
        for c in cells:
            groups.setdefault(find(c), []).append(c)
        return sorted(sorted(g) for g in groups.values())


def validate_complex(X: DeltaComplex):
    """List the violated Delta-complex invariants (empty list means valid)."""
    problems = []
    for k, level in enumerate(X.cells):
        for i, fs in enumerate(level):
            if len(fs) != (k + 1 if k > 0 else 0):
                problems.append(f"cell ({k},{i}) has {len(fs)} faces, expected {k + 1 if k else 0}")
                continue
            bad = [f for f in fs if not (0 <= f < X.count(k - 1))]
            if bad:
                problems.append(f"cell ({k},{i}) has dangling face ids {bad}")
    if problems:
        return problems
    for k in range(2, len(X.cells)):
        for i, fs in enumerate(X.cells[k]):
            for j in range(k + 1):
                for a in range(j):
                    lhs = X.cells[k - 1][fs[j]][a]
                    rhs = X.cells[k - 1][fs[a]][j - 1]
                    if lhs != rhs:
                        problems.append(f"simplicial identity fails on cell ({k},{i}) for faces i={a} < j={j}")
    if X.realization is not None:
        problems.extend(X.realization.violations(X))
    return problems


def boundary_chain(c: Chain, X: DeltaComplex) -> Chain:
    """Alternating-sum boundary; 0-chains go to the zero chain in degree -1."""
    k = c.k
    for cell in c.coeffs:
        if not X.has_cell((k, cell)):
            raise StructuralError(f"unknown cell ({k},{cell})")
    if k <= 0:
        return Chain(k - 1, {}, c.ring)
    out = {}
    for cell, v in c.coeffs.items():
        for j, f in enumerate(X.cells[k][cell]):
            out[f] = out.get(f, 0) + (v if j % 2 == 0 else -v)
    return Chain(k - 1, out, c.ring)


def subcomplex(X: DeltaComplex, cells):
    """Smallest subcomplex containing ``cells``, plus an old -> new id table per cell."""
    keep = X.closure(cells)
    table = {}
    levels = []
    for k in range(X.dim + 1):
        ids = sorted(i for (kk, i) in keep if kk == k)
        for new, old in enumerate(ids):
            table[(k, old)] = new
        levels.append([tuple(table[(k - 1, f)] for f in X.cells[k][old]) for old in ids])
    while levels and not levels[-1]:
        levels.pop()
    labels = {(k, table[(k, i)]): v for (k, i), v in X.labels.items() if (k, i) in table}
    coords = None
    if X.realization is not None:
        coords = {table[(0, v)]: p for v, p in X.realization.coords.items() if (0, v) in table}
    return DeltaComplex(levels, labels, coords), table


def simplicial_complex(facets, coords=None, labels=None):
    """Delta-complex of the simplicial complex generated by increasing vertex tuples.

    Returns (complex, index) with index[vertex tuple] = (k, id); ids are
    lexicographic per dimension.
    """
    simplices = set()
    for f in facets:
        f = tuple(f)
        if list(f) != sorted(set(f)):
            raise StructuralError(f"facet {f} is not strictly increasing")
        for r in range(1, len(f) + 1):
            simplices.update(combinations(f, r))
    by_dim = {}
    for s in simplices:
        by_dim.setdefault(len(s) - 1, []).append(s)
    verts = sorted(s[0] for s in by_dim.get(0, []))
    if verts != list(range(len(verts))):
        raise StructuralError("vertices must be 0..N-1")
    index, cells = {}, []
    for k in range(max(by_dim, default=-1) + 1):
        level = sorted(by_dim.get(k, []))
        for i, s in enumerate(level):
            index[s] = (k, i)
        if k == 0:
            cells.append([() for _ in level])
        else:
            cells.append([tuple(index[s[:j] + s[j + 1:]][1] for j in range(k + 1)) for s in level])
    return DeltaComplex(cells, labels, coords), index


def closed_star(X: DeltaComplex, cell):
    """Closure of the open star of a cell, with the id translation table."""
    return subcomplex(X, X.open_star([cell]))


def _rank_q(rows):
    rows = [list(r) for r in rows]
    rank, col = 0, 0
    ncols = len(rows[0]) if rows else 0
    while rank < len(rows) and col < ncols:
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(rank + 1, len(rows)):
            if rows[r][col] != 0:
                t = rows[r][col] / rows[rank][col]
                rows[r] = [a - t * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
        col += 1
    return rank


class AffineRealization:
    """Rational vertex coordinates; each cell is the affine simplex on its vertices."""

    def __init__(self, coords):
        if isinstance(coords, Mapping):
            items = coords.items()
        else:
            items = enumerate(coords)
        self.coords = {int(v): tuple(Fraction(x) for x in p) for v, p in items}

    @property
    def ambient(self):
        dims = {len(p) for p in self.coords.values()}
        return dims.pop() if len(dims) == 1 else None

    def point(self, v):
        return self.coords[v]

    def cell_points(self, X, k, i):
        return [self.coords[v] for v in X.vertices(k, i)]

    def violations(self, X):
        out = []
        missing = [v for v in range(X.count(0)) if v not in self.coords]
        if missing:
            out.append(f"vertices without coordinates: {missing}")
            return out
        if len({len(p) for p in self.coords.values()}) > 1:
            out.append("vertex coordinates have differing ambient dimensions")
            return out
        for k, i in X.all_cells():
            if k == 0:
                continue
            pts = self.cell_points(X, k, i)
            diffs = [[a - b for a, b in zip(p, pts[0])] for p in pts[1:]]
            if _rank_q(diffs) != k:
                out.append(f"cell ({k},{i}) is affinely degenerate")
        return out
