"""Singular cycles with labelled simplices as weighted s-manifolds.

Faces are identified exactly when their ordered label subsequences agree.
Every open simplex is a stratum; the top strata carry the coefficients as
weights and the standard orientation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from . import rings
from .complex import DeltaComplex
from .corners import SManifoldC, check_corner_orientation
from .rings import StructuralError
from .smanifold import OrientationCert, SManifold, check_orientation


@dataclass
class SingularCycleInput:
    n: int
    simplices: list             # [(label tuple of length n + 1, coefficient[, name])]
    ring: str = "Z"

    def __post_init__(self):
        rings.check_ring(self.ring)
        out = []
        for s in self.simplices:
            lab, c = s[0], s[1]
            name = str(s[2]) if len(s) > 2 and s[2] is not None else ""
            out.append((tuple(str(x) for x in lab), rings.coerce(c, self.ring), name))
        self.simplices = out
        seen = set()
        for lab, _, name in self.simplices:
            if len(lab) != self.n + 1:
                raise StructuralError(f"simplex {lab} has {len(lab)} labels, expected {self.n + 1}")
            if (lab, name) in seen:
                raise StructuralError(f"simplex {lab} listed twice")
            seen.add((lab, name))

    def to_json(self):
        out = []
        for lab, c, name in self.simplices:
            d = {"labels": list(lab), "coeff": rings.format_scalar(c)}
            if name:
                d["name"] = name
            out.append(d)
        return {"n": self.n, "ring": self.ring, "simplices": out}

    @classmethod
    def from_json(cls, doc):
        ring = doc.get("ring", "Z")
        return cls(int(doc["n"]), [(s["labels"], rings.parse_scalar(str(s["coeff"]), ring), s.get("name"))
                                   for s in doc["simplices"]], ring)


def label_boundary(c: SingularCycleInput):
    """The boundary sum_a rho_a sum_j (-1)^j (labels with entry j removed), on label tuples."""
    out = {}
    if c.n == 0:
        return out
    for lab, rho, _ in c.simplices:
        for j in range(c.n + 1):
            f = lab[:j] + lab[j + 1:]
            out[f] = out.get(f, rings.zero(c.ring)) + (rho if j % 2 == 0 else -rho)
    return {f: rings.coerce(x, c.ring) for f, x in sorted(out.items()) if rings.coerce(x, c.ring) != 0}


@dataclass
class ImportResult:
    S: SManifold
    cert: OrientationCert
    labels: dict                        # cell -> label tuple (the map to label data)
    verdict: bool                       # check_orientation passed
    boundary_zero: bool                 # direct label-level boundary vanished
    notes: list = field(default_factory=list)

    @property
    def agree(self):
        return self.verdict == self.boundary_zero

    def to_json(self):
        return {"orientation": self.verdict, "boundary_zero": self.boundary_zero, "agree": self.agree,
                "cells": list(self.S.complex.counts()),
                "labels": [[k, i, list(lab)] for (k, i), lab in sorted(self.labels.items())],
                "notes": self.notes}


def _build(c: SingularCycleInput):
    """Cells keyed by label tuples below the top; top cells keyed by (labels, name)."""
    tuples = {}
    for lab, _, _ in c.simplices:
        for r in range(1, c.n + 1):
            for pos in combinations(range(c.n + 1), r):
                tuples.setdefault(r - 1, set()).add(tuple(lab[p] for p in pos))
    levels = [sorted(tuples.get(k, ())) for k in range(c.n)] + [sorted((lab, name) for lab, _, name in c.simplices)]
    index = [{t: i for i, t in enumerate(lv)} for lv in levels]
    cells = []
    for k, lv in enumerate(levels):
        labs = [t[0] for t in lv] if k == c.n else lv
        if k == 0:
            cells.append([() for _ in lv])
        else:
            cells.append([tuple(index[k - 1][t[:j] + t[j + 1:]] for j in range(k + 1)) for t in labs])
    labels = {}
    for k, lv in enumerate(levels):
        for i, t in enumerate(lv):
            labels[(k, i)] = t[0] if k == c.n else t
    names = {(k, i): "".join(t) if all(len(x) == 1 for x in t) else "|".join(t) for (k, i), t in labels.items()}
    for i, (_, name) in enumerate(levels[c.n]):
        if name:
            names[(c.n, i)] += ":" + name
    return DeltaComplex(cells, labels=names), levels, index, labels


def import_cycle(c: SingularCycleInput) -> ImportResult:
    if not c.simplices:
        raise StructuralError("empty cycle")
    X, levels, index, labels = _build(c)
    cells = sorted(labels)
    top = [(c.n, index[c.n][(lab, name)]) for lab, _, name in c.simplices]
    rest = [cell for cell in cells if cell[0] < c.n]
    strata = [[t] for t in top] + [[cell] for cell in rest]
    dims = [c.n] * len(top) + [cell[0] for cell in rest]
    S = SManifold(X, c.n, strata, dims)
    cert = OrientationCert({t[1]: 1 for t in top}, {a: rho for a, (_, rho, _) in enumerate(c.simplices)}, c.ring)
    verdict = check_orientation(S, cert).ok
    bz = not label_boundary(c)
    notes = ["target map retained as label data only"]
    return ImportResult(S, cert, labels, verdict, bz, notes)


@dataclass
class RelativeImport:
    base: ImportResult
    M: SManifoldC
    corner_ok: bool
    boundary_matches: bool              # synthesized boundary chain equals the label boundary

    def to_json(self):
        return {**self.base.to_json(), "corner_orientation": self.corner_ok,
                "boundary_matches": self.boundary_matches,
                "boundary_cells": list(self.M.corners[1].complex.counts()) if len(self.M.corners) > 1 else []}


def import_relative_cycle(c: SingularCycleInput) -> RelativeImport:
    """Boundary-aware import: the label boundary becomes the first corner level."""
    res = import_cycle(c)
    S, X = res.S, res.S.complex
    if c.n == 0:
        raise StructuralError("a 0-dimensional cycle has no boundary to promote")
    dC = label_boundary(c)
    index = {lab: cell for cell, lab in res.labels.items() if cell[0] < c.n}
    support = [index[f] for f in dC]
    closed = sorted(X.closure(support))
    ids = {cell: None for cell in closed}
    by_dim = {}
    for cell in closed:
        ids[cell] = len(by_dim.setdefault(cell[0], []))
        by_dim[cell[0]].append(cell)
    cells1 = []
    for k in range(c.n):
        lv = by_dim.get(k, [])
        cells1.append([() for _ in lv] if k == 0 else [tuple(ids[(k - 1, f)] for f in X.cells[k][i]) for _, i in lv])
    C1c = DeltaComplex(cells1)
    strata1 = [[(cell[0], ids[cell])] for cell in closed]
    C1 = SManifold(C1c, c.n - 1, strata1, [cell[0] for cell in closed])
    p1 = {(cell[0], ids[cell]): cell[1] for cell in closed}
    C0 = S
    p0 = {cell: cell[1] for cell in X.all_cells()}
    D01 = [(S.stratum_of[cell], t) for t, cell in enumerate(closed)]
    M = SManifoldC(S, [C0, C1], [p0, p1], {(0, 1): D01})
    v = check_corner_orientation(M, [res.cert])
    match = v.ok and not dC
    if v.ok and len(v.certs) > 1:
        dcert = v.certs[1]
        pushed = {}
        for i in C1.top_cells():
            cell = (c.n - 1, i)
            w = dcert.weight(C1.stratum_of[cell]) * dcert.signs[i]
            lab = res.labels[(c.n - 1, p1[cell])]
            pushed[lab] = pushed.get(lab, rings.zero(c.ring)) + w
        pushed = {k: rings.coerce(x, c.ring) for k, x in pushed.items() if rings.coerce(x, c.ring) != 0}
        match = pushed == dC
    return RelativeImport(res, M, v.ok, match)


def tetrahedron_cycle(ring="Z"):
    """The boundary of the labelled tetrahedron abcd with alternating signs."""
    faces = [("b", "c", "d"), ("a", "c", "d"), ("a", "b", "d"), ("a", "b", "c")]
    return SingularCycleInput(2, [(f, (-1) ** j) for j, f in enumerate(faces)], ring)


def triangle_chain(ring="Z"):
    return SingularCycleInput(2, [(("a", "b", "c"), 1)], ring)


def pillow_cycle(ring="Z"):
    """Two triangles on the same three edges with coefficients +1 and -1 (distinguished by name)."""
    return SingularCycleInput(2, [(("a", "b", "c"), 1, "upper"), (("a", "b", "c"), -1, "lower")], ring)


def random_cycle(rng, n_max=3, max_simplices=8, alphabet="abcde", ring="Z"):
    """A random small labelled chain (used for the importer equivalence check)."""
    n = rng.randint(0, n_max)
    k = min(rng.randint(1, max_simplices), (n + 2) ** (n + 1))
    sims = set()
    while len(sims) < k:
        lab = tuple(rng.choice(alphabet[: n + 2]) for _ in range(n + 1))
        if rng.random() < 0.7:
            lab = tuple(sorted(lab))
        sims.add(lab)
    sims = sorted(sims)
    coeffs = [rng.choice([-2, -1, 1, 1, 2]) for _ in sims]
    # occasionally close up a boundary so cycles occur often
    if n >= 1 and rng.random() < 0.5:
        labs = sorted(rng.sample(alphabet[: n + 3], n + 2))
        sims = [labs[:j] + labs[j + 1:] for j in range(n + 2)]
        coeffs = [(-1) ** j for j in range(n + 2)]
        if rng.random() < 0.3:
            coeffs[0] = -coeffs[0]
    return SingularCycleInput(n, list(zip(sims, coeffs)), ring)
