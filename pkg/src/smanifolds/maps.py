"""Cellular maps between Delta-complexes and stratified maps of s-manifolds.

A cell map sends each k-cell to a target cell together with a monotone
surjection theta: {0..k} -> {0..k'} recording which source vertices collapse.
theta is the identity for nondegenerate images.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .complex import DeltaComplex
from .rings import StructuralError


def face_at_positions(X: DeltaComplex, k, i, positions):
    """Iterated face of cell (k, i) spanned by the given sorted vertex positions."""
    keep = set(positions)
    cell = i
    dim = k
    for p in range(k, -1, -1):
        if p not in keep:
            cell = X.cells[dim][cell][p]
            dim -= 1
    return dim, cell


def _face_image(target, k2, i2, theta, j):
    """Expected image of face j of a cell mapped to (k2, i2) via theta."""
    t = theta[:j] + theta[j + 1:]
    missing = sorted(set(range(k2 + 1)) - set(t))
    if not missing:
        return (k2, i2, tuple(t))
    m = missing[0]
    return (k2 - 1, target.cells[k2][i2][m], tuple(v - (v > m) for v in t))


@dataclass
class CellMap:
    source: DeltaComplex
    target: DeltaComplex
    images: dict = field(default_factory=dict)  # (k, i) -> (k2, i2, theta)

    @classmethod
    def nondegenerate(cls, source, target, table):
        """From {(k, i): i2} with every cell sent to a target cell of the same dimension."""
        return cls(source, target, {(k, i): (k, j, tuple(range(k + 1))) for (k, i), j in table.items()})

    @classmethod
    def from_vertices(cls, source, target, vmap):
        """Cell map determined by a vertex map (target cells located by ordered vertex tuples)."""
        index = {}
        for k2, i2 in target.all_cells():
            index.setdefault(target.vertices(k2, i2), (k2, i2))
        images = {}
        for k, i in source.all_cells():
            vs = [vmap[v] for v in source.vertices(k, i)]
            distinct, theta = [], []
            for v in vs:
                if not distinct or distinct[-1] != v:
                    distinct.append(v)
                theta.append(len(distinct) - 1)
            if len(set(distinct)) != len(distinct):
                raise StructuralError(f"vertex map is not monotone on cell ({k},{i})")
            hit = index.get(tuple(distinct))
            if hit is None:
                raise StructuralError(f"no target cell with vertices {tuple(distinct)} for ({k},{i})")
            images[(k, i)] = (hit[0], hit[1], tuple(theta))
        return cls(source, target, images)

    def __call__(self, cell):
        return self.images[tuple(cell)]

    def cell(self, cell):
        k2, i2, _ = self.images[tuple(cell)]
        return (k2, i2)

    def is_nondegenerate(self, cell):
        k2, _, _ = self.images[tuple(cell)]
        return k2 == cell[0]

    def violations(self):
        out = []
        X, Y = self.source, self.target
        for c in X.all_cells():
            if c not in self.images:
                out.append(f"cell {c} has no image")
                continue
            k2, i2, theta = self.images[c]
            if not Y.has_cell((k2, i2)):
                out.append(f"cell {c} maps to unknown cell ({k2},{i2})")
                continue
            k = c[0]
            if (len(theta) != k + 1 or any(b < a for a, b in zip(theta, theta[1:]))
                    or set(theta) != set(range(k2 + 1))):
                out.append(f"cell {c}: theta {theta} is not a monotone surjection onto {k2 + 1} vertices")
        if out:
            return out
        for k, i in X.all_cells():
            if k == 0:
                continue
            k2, i2, theta = self.images[(k, i)]
            for j, f in enumerate(X.cells[k][i]):
                want = _face_image(Y, k2, i2, theta, j)
                if self.images[(k - 1, f)] != want:
                    out.append(f"face {j} of ({k},{i}) maps to {self.images[(k - 1, f)]}, expected {want}")
        return out

    def compose(self, after: "CellMap") -> "CellMap":
        """after o self."""
        out = {}
        for c, (k1, i1, t1) in self.images.items():
            k2, i2, t2 = after.images[(k1, i1)]
            out[c] = (k2, i2, tuple(t2[x] for x in t1))
        return CellMap(self.source, after.target, out)

    @classmethod
    def identity(cls, X):
        return cls(X, X, {(k, i): (k, i, tuple(range(k + 1))) for k, i in X.all_cells()})

    def to_json(self):
        return [[k, i, k2, i2, list(t)] for (k, i), (k2, i2, t) in sorted(self.images.items())]


@dataclass
class StratifiedMap:
    """A cellular map of s-manifolds sending each stratum into a single stratum."""

    source: object
    target: object
    cells: CellMap

    def violations(self):
        out = list(self.cells.violations())
        if out:
            return out
        S, T = self.source, self.target
        for c in S.cells():
            if self.cells.cell(c) in T.deleted:
                out.append(f"cell {c} maps into the deleted part of the target")
        for idx, stratum in enumerate(S.strata):
            hit = {T.stratum_of.get(self.cells.cell(c)) for c in stratum}
            if len(hit) != 1:
                out.append(f"stratum {idx} meets target strata {sorted(h for h in hit if h is not None)}")
        return out

    def stratum_map(self):
        return {idx: self.target.stratum_of[self.cells.cell(s[0])]
                for idx, s in enumerate(self.source.strata) if s}

    def compose(self, after: "StratifiedMap") -> "StratifiedMap":
        return StratifiedMap(self.source, after.target, self.cells.compose(after.cells))
