"""Stratified complexes, the s-manifold validator and orientation certificates."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

from . import rings
from .complex import Chain, DeltaComplex, validate_complex
from .homology import (PreconditionError, Z2Cocycle, class_coordinates, homology_groups,
                       relative_boundary)
from .rings import StructuralError


class SManifold:
    """A Delta-complex partitioned into strata of declared dimension.

    ``strata[i]`` is a list of cells ``(k, id)``; ``stratum_dims[i]`` its
    dimension.  Stratum indices are presentation only.
    """

    def __init__(self, complex: DeltaComplex, n: int, strata, stratum_dims=None,
                 assert_manifold=(), deleted=()):
        self.complex = complex
        # closed set of cells removed from the space (the space is |K| - |L|)
        self.deleted = frozenset((int(k), int(i)) for k, i in deleted)
        self.n = int(n)
        self.strata = [sorted((int(k), int(i)) for k, i in s) for s in strata]
        if stratum_dims is None:
            stratum_dims = [max((k for k, _ in s), default=-1) for s in self.strata]
        self.stratum_dims = [int(d) for d in stratum_dims]
        self.assert_manifold = frozenset(assert_manifold)

    def __repr__(self):
        return f"SManifold(n={self.n}, strata dims={self.stratum_dims}, cells={self.complex.counts()})"

    @cached_property
    def stratum_of(self):
        out = {}
        for idx, s in enumerate(self.strata):
            for c in s:
                out.setdefault(c, idx)
        return out

    def top_cells(self):
        """Ids of the n-cells lying in n-dimensional strata (the cells of X_0 of top degree)."""
        return sorted(i for (k, i), s in self.stratum_of.items()
                      if k == self.n and self.stratum_dims[s] == self.n)

    def top_strata(self):
        return [i for i, d in enumerate(self.stratum_dims) if d == self.n]

    def is_empty(self):
        return not self.stratum_of

    def cells(self):
        return [c for c in self.complex.all_cells() if c not in self.deleted]

    def closure(self, cells):
        return self.complex.closure(cells) - self.deleted

    def open_star(self, cells):
        return self.complex.open_star(cells) - self.deleted


@dataclass
class Report:
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def to_json(self):
        return {"ok": self.ok, "violations": list(self.violations), "notes": list(self.notes)}


# ---------------------------------------------------------------------------
# validation

def _vertex_link_is_circle(X, stratum, v):
    nodes = set()
    for e, j in X.cofaces(0, v):
        if (1, e) in stratum:
            nodes.add((e, 1 - j))
    adj = {nd: [] for nd in nodes}
    for t in range(X.count(2)):
        if (2, t) not in stratum:
            continue
        verts = X.vertices(2, t)
        for p in range(3):
            if verts[p] != v:
                continue
            ends = []
            for j in range(3):
                if j == p:
                    continue
                rest = [q for q in range(3) if q != j]
                node = (X.cells[2][t][j], rest.index(p))
                if node not in adj:
                    return False
                ends.append(node)
            adj[ends[0]].append(ends[1])
            adj[ends[1]].append(ends[0])
    if not nodes or any(len(a) != 2 for a in adj.values()):
        return False
    start = next(iter(nodes))
    seen, stack = {start}, [start]
    while stack:
        for nb in adj[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(nodes)


def _check_stratum_manifold(S, idx, report):
    X = S.complex
    cells = set(S.strata[idx])
    d = S.stratum_dims[idx]
    top = [c for c in cells if c[0] == d]
    hull = S.closure(top) if top else set()
    stray = sorted(c for c in cells if c not in hull)
    if stray:
        report.violations.append(f"stratum {idx} is not pure of dimension {d}: stray cells {stray}")
        return
    if d <= 0:
        return
    # every (d-1)-cell inside the stratum must have exactly two d-cell sides
    for k, i in cells:
        if k != d - 1:
            continue
        sides = sum(1 for t, _ in X.cofaces(k, i) if (d, t) in cells)
        if sides != 2:
            report.violations.append(
                f"stratum {idx}: cell ({k},{i}) has {sides} incident {d}-cell sides, expected 2")
    if d == 2:
        for k, v in cells:
            if k == 0 and not _vertex_link_is_circle(X, cells, v):
                report.violations.append(f"stratum {idx}: link of vertex {v} is not a circle")
    elif d >= 3:
        for k, v in cells:
            if k == 0 and not _vertex_link_connected(X, cells, v, d):
                report.violations.append(f"stratum {idx}: link of vertex {v} is disconnected")
        if idx in S.assert_manifold:
            report.notes.append(f"stratum {idx}: manifold property asserted (dimension {d} check is a pseudomanifold heuristic)")
        else:
            report.notes.append(f"stratum {idx}: dimension {d} checked as a pseudomanifold with connected vertex links")


def _vertex_link_connected(X, cells, v, d):
    occ = [(t, p) for t in range(X.count(d)) if (d, t) in cells
           for p, w in enumerate(X.vertices(d, t)) if w == v]
    if not occ:
        return False
    parent = {o: o for o in occ}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    by_face = {}
    for t, p in occ:
        for j in range(d + 1):
            if j == p:
                continue
            f = X.cells[d][t][j]
            pos = p if p < j else p - 1
            by_face.setdefault((f, pos), []).append((t, p))
    for group in by_face.values():
        for o in group[1:]:
            a, b = find(group[0]), find(o)
            parent[a] = b
    return len({find(o) for o in occ}) == 1


def closure_poset(S: SManifold):
    """Reflexive-transitive relation rel[i][j]: closure of stratum i meets stratum j."""
    m = len(S.strata)
    rel = [[i == j for j in range(m)] for i in range(m)]
    for i, s in enumerate(S.strata):
        for c in S.closure(s):
            rel[i][S.stratum_of[c]] = True
    for k in range(m):
        for i in range(m):
            if rel[i][k]:
                for j in range(m):
                    if rel[k][j]:
                        rel[i][j] = True
    return rel


def validate_smanifold(S: SManifold) -> Report:
    report = Report()
    X = S.complex
    problems = validate_complex(X)
    if problems:
        report.violations.extend(f"complex: {p}" for p in problems)
        return report
    if X.dim > S.n:
        report.violations.append(f"complex has cells of dimension {X.dim} > n = {S.n}")
    if len(S.stratum_dims) != len(S.strata):
        report.violations.append("stratum_dims and strata differ in length")
        return report
    bad_del = [c for c in S.deleted if not X.has_cell(c)]
    if bad_del:
        report.violations.append(f"deleted cells unknown: {sorted(bad_del)}")
        return report
    if X.closure(S.deleted) != S.deleted:
        report.violations.append("deleted cells do not form a closed subcomplex")
    seen = {}
    for idx, s in enumerate(S.strata):
        if not s:
            report.violations.append(f"stratum {idx} is empty")
        for c in s:
            if not X.has_cell(c):
                report.violations.append(f"stratum {idx} lists unknown cell {c}")
            elif c in S.deleted:
                report.violations.append(f"stratum {idx} lists deleted cell {c}")
            elif c in seen:
                report.violations.append(f"cell {c} lies in strata {seen[c]} and {idx}")
            else:
                seen[c] = idx
    missing = [c for c in S.cells() if c not in seen]
    if missing:
        report.violations.append(f"cells in no stratum: {missing}")
    if report.violations:
        return report
    for idx, s in enumerate(S.strata):
        actual = max(k for k, _ in s)
        if actual != S.stratum_dims[idx]:
            report.violations.append(
                f"stratum {idx} declared dimension {S.stratum_dims[idx]} but has cells up to {actual}")
        if actual > S.n:
            report.violations.append(f"stratum {idx} has dimension {actual} > n = {S.n}")
        cells = set(s)
        frontier = S.closure(s) - cells
        for k, i in frontier:
            if k and any((k - 1, f) in cells for f in X.cells[k][i]):
                report.violations.append(f"stratum {idx} is not locally closed at cell ({k},{i})")
                break
    if report.violations:
        return report
    for idx in range(len(S.strata)):
        _check_stratum_manifold(S, idx, report)
    rel = closure_poset(S)
    m = len(S.strata)
    n = S.n
    for i in range(m):
        for j in range(m):
            if i == j or not rel[i][j]:
                continue
            if rel[j][i] and i < j:
                report.violations.append(f"closure relation is not antisymmetric between strata {i} and {j}")
            di, dj = S.stratum_dims[i], S.stratum_dims[j]
            if not ((di in (n - 1, n) and dj < di) or (di <= n - 2 and dj <= n - 2)):
                report.violations.append(
                    f"codimension rule fails for strata {i} (dim {di}) and {j} (dim {dj})")
    report.notes.append("local finiteness and local embeddability are automatic for finite complexes")
    return report


def require_valid(S):
    r = validate_smanifold(S)
    if not r.ok:
        raise StructuralError("invalid s-manifold: " + "; ".join(r.violations))
    return S


@dataclass
class Filtration:
    X0: set
    X1: set
    X_le1: set
    X_ge2: set


def codim_filtration(S: SManifold) -> Filtration:
    require_valid(S)
    by = {}
    for idx, s in enumerate(S.strata):
        by.setdefault(S.n - S.stratum_dims[idx], set()).update(s)
    X0, X1 = set(by.get(0, ())), set(by.get(1, ()))
    ge2 = set().union(*(v for c, v in by.items() if c >= 2)) if any(c >= 2 for c in by) else set()
    if S.closure(ge2) != ge2:
        raise StructuralError("codimension >= 2 locus is not closed")
    for part in (X0, X0 | X1):
        if S.open_star(part) != part:
            raise StructuralError("codimension 0 / <= 1 locus is not open")
    return Filtration(X0, X1, X0 | X1, ge2)


# ---------------------------------------------------------------------------
# orientations

@dataclass
class OrientationCert:
    """Signs on top cells, weights on top strata, optional +-1 bundle data."""

    signs: dict = field(default_factory=dict)
    weights: dict = field(default_factory=dict)
    ring: str = "Z"
    cocycle: Z2Cocycle | None = None
    omega: dict = field(default_factory=dict)

    def __post_init__(self):
        rings.check_ring(self.ring)
        self.signs = {int(c): int(s) for c, s in self.signs.items()}
        self.weights = {int(i): rings.coerce(w, self.ring) for i, w in self.weights.items()}
        self.omega = {int(c): int(s) for c, s in self.omega.items()}
        for c, s in list(self.signs.items()) + list(self.omega.items()):
            if s not in (1, -1):
                raise StructuralError(f"sign {s} on cell {c} is not +-1")

    def weight(self, stratum):
        return self.weights.get(stratum, rings.one(self.ring))

    def flipped(self):
        return OrientationCert({c: -s for c, s in self.signs.items()}, dict(self.weights),
                               self.ring, self.cocycle, dict(self.omega))


@dataclass
class OrientationVerdict:
    ok: bool
    defect: Chain
    defect_strata: dict = field(default_factory=dict)
    twisted: bool = False

    def to_json(self):
        return {"ok": self.ok, "twisted": self.twisted,
                "defect": [{"cell": c, "coeff": rings.format_scalar(v), "stratum": self.defect_strata.get(c)}
                           for c, v in self.defect.coeffs.items()]}


def top_chain(S: SManifold, cert: OrientationCert) -> Chain:
    """The weighted signed sum of top cells of X_0."""
    ring = cert.ring
    out = {}
    for c in S.top_cells():
        if c not in cert.signs:
            raise StructuralError(f"certificate has no sign for top cell {c}")
        s = cert.signs[c] * cert.omega.get(c, 1)
        if ring == "Z2" and cert.signs[c] != 1:
            raise StructuralError("Z2 certificates must use sign +1 everywhere")
        out[c] = cert.weight(S.stratum_of[(S.n, c)]) * s
    return Chain(S.n, out, ring)


def check_orientation(S: SManifold, cert: OrientationCert) -> OrientationVerdict:
    """Boundary of the weighted top chain vanishes identically."""
    c = top_chain(S, cert)
    d = relative_boundary(c, S.complex, cert.cocycle, S.deleted)
    strata = {cell: S.stratum_of[(S.n - 1, cell)] for cell in d.coeffs}
    return OrientationVerdict(d.is_zero(), d, strata, cert.cocycle is not None)


def check_z2_class(S: SManifold) -> OrientationVerdict:
    cert = OrientationCert({c: 1 for c in S.top_cells()}, {}, "Z2")
    return check_orientation(S, cert)


def check_orientation_bundle(S: SManifold, cert: OrientationCert) -> OrientationVerdict:
    if cert.cocycle is None:
        raise StructuralError("bundle check needs a cocycle")
    missing = [c for c in S.top_cells() if c not in cert.omega]
    if missing:
        raise StructuralError(f"omega missing on top cells {missing}")
    return check_orientation(S, cert)


def fundamental_class(S: SManifold, cert: OrientationCert):
    """(coordinates, presentation, cycle) of the weighted top chain in H_n."""
    verdict = check_orientation(S, cert)
    if not verdict.ok:
        raise PreconditionError(f"certificate fails: defect {verdict.defect}")
    c = top_chain(S, cert)
    pres = homology_groups(S.complex, cert.ring, S.n, cert.cocycle, S.deleted)
    return class_coordinates(pres, c), pres, c


def orientation_classes(S: SManifold):
    """Group top cells into classes whose relative signs are forced.

    Returns (classes, conflict): each class is a dict cell -> relative sign.
    Signs are forced across (n-1)-cells interior to top strata, where exactly
    two top-cell sides meet.  ``conflict`` is True when the forcing is
    inconsistent (the top locus is not orientable).
    """
    X, n = S.complex, S.n
    tops = set(S.top_cells())
    links = {c: [] for c in tops}
    if n >= 1:
        for f in range(X.count(n - 1)):
            st = S.stratum_of.get((n - 1, f))
            if st is None or S.stratum_dims[st] != n:
                continue
            sides = [(t, j) for t, j in X.cofaces(n - 1, f) if t in tops]
            if len(sides) != 2:
                continue
            (a, ja), (b, jb) = sides
            rel = -((-1) ** ja) * ((-1) ** jb)
            links[a].append((b, rel))
            links[b].append((a, rel))
    classes, conflict, seen = [], False, {}
    for start in sorted(tops):
        if start in seen:
            continue
        cls = {start: 1}
        seen[start] = 1
        stack = [start]
        while stack:
            a = stack.pop()
            for b, rel in links[a]:
                want = cls[a] * rel
                if b in cls:
                    conflict = conflict or cls[b] != want
                else:
                    cls[b] = want
                    seen[b] = want
                    stack.append(b)
        classes.append(cls)
    return classes, conflict


def find_orientation(S: SManifold, ring="Z", weights=None, limit=20):
    """Search for a passing certificate (fixed weights); None when there is none."""
    weights = dict(weights or {})
    classes, conflict = orientation_classes(S)
    if conflict and ring != "Z2":
        return None
    if ring == "Z2":
        cert = OrientationCert({c: 1 for c in S.top_cells()}, weights, "Z2")
        return cert if check_orientation(S, cert).ok else None
    if len(classes) > limit:
        raise StructuralError(f"too many orientation classes ({len(classes)}) for exhaustive search")
    if not classes:
        cert = OrientationCert({}, weights, ring)
        return cert if check_orientation(S, cert).ok else None
    for flips in product((1, -1), repeat=len(classes) - 1):
        signs = {}
        for cls, f in zip(classes, (1,) + flips):
            for c, s in cls.items():
                signs[c] = s * f
        cert = OrientationCert(signs, weights, ring)
        if check_orientation(S, cert).ok:
            return cert
    return None
