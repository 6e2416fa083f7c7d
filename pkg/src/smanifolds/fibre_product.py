"""Transversality and fibre products of s-manifolds.

Two tiers.  The combinatorial tier takes nondegenerate cellular maps into a
common s-manifold Z and pairs cells with equal images.  The geometric tier
takes piecewise-affine maps into R^n (a one-stratum manifold; n = 0 is the
point), forms the staircase triangulation of X x Y and slices it by the level
set g(x) - h(y) = 0 with exact arithmetic.

Orientation convention: a top cell of W gets the sign making
[W basis, lift of the standard R^n basis] = (-1)^(n m) [X basis, Y basis],
where lifts go through D = dg - dh.  For n = 0 this is the product orientation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import comb

from . import linalg
from .complex import AffineRealization, DeltaComplex, simplicial_complex
from .corners import SManifoldC, boundary, check_corner_orientation, iterated_boundary, validate_corners
from .maps import CellMap, StratifiedMap, face_at_positions
from .rings import StructuralError
from .smanifold import OrientationCert, SManifold, closure_poset


class NonGenericError(StructuralError):
    """The level set meets some cell non-transversally."""


class OrientationRefused(StructuralError):
    """The fibre product carries no orientation by the product rule (a legitimate negative answer)."""


# ---------------------------------------------------------------------------
# maps

@dataclass
class PLMap:
    """A map X -> R^n affine on every cell, given by its vertex values."""

    source: SManifold
    values: dict
    n: int

    def __post_init__(self):
        self.values = {int(v): tuple(Fraction(x) for x in p) for v, p in self.values.items()}
        X = self.source.complex
        for v in range(X.count(0)):
            if v not in self.values or len(self.values[v]) != self.n:
                raise StructuralError(f"vertex {v} lacks a value in R^{self.n}")

    @classmethod
    def affine(cls, source: SManifold, matrix, offset):
        R = source.complex.realization
        if R is None:
            raise StructuralError("affine maps need an affine realization")
        n = len(offset)
        vals = {}
        for v, p in R.coords.items():
            vals[v] = tuple(sum(Fraction(matrix[r][c]) * p[c] for c in range(len(p))) + Fraction(offset[r])
                            for r in range(n))
        return cls(source, vals, n)

    def cell_values(self, k, i):
        return [self.values[v] for v in self.source.complex.vertices(k, i)]

    def differential(self, k, i):
        """n x k matrix of value differences along the cell's edges from vertex 0."""
        vals = self.cell_values(k, i)
        return [[vals[p][r] - vals[0][r] for p in range(1, k + 1)] for r in range(self.n)]

    def composed(self, C: SManifold, proj):
        """The map C -> R^n obtained by precomposing with a nondegenerate projection onto the source."""
        vals = {v: self.values[proj[(0, v)]] for v in range(C.complex.count(0))}
        return PLMap(C, vals, self.n)


def _hstack(a, b, n):
    if n == 0:
        return []
    return [list(a[r]) + list(b[r]) for r in range(n)]


# ---------------------------------------------------------------------------
# transversality

CASES = ("i", "ii", "iii", "iv", "v")


def classify_case(a, b, c, l, m, n):
    """Dimension case of a stratum triple, or None when no case applies."""
    if (a, b, c) == (l, m, n):
        return "i"
    if (a, b, c) == (l - 1, m, n):
        return "ii"
    if (a, b, c) == (l, m - 1, n):
        return "iii"
    if (a, b, c) == (l - 1, m - 1, n - 1):
        return "iv"
    if a + b - c <= l + m - n - 2:
        return "v"
    return None


@dataclass
class TransversalityVerdict:
    transverse: bool
    strongly_transverse: bool
    triples: dict                    # (i, j, k) -> {"dim": ..., "case": ...}
    failures: list = field(default_factory=list)
    assumed: bool = False            # surjectivity declared, not computed
    dims: tuple = (0, 0, 0)          # (l, m, n)

    @property
    def d(self):
        l, m, n = self.dims
        return l + m - n

    def ok(self, strong=False):
        return self.strongly_transverse if strong else self.transverse

    def to_json(self):
        return {"transverse": self.transverse, "strongly_transverse": self.strongly_transverse,
                "assumed": self.assumed, "dims": list(self.dims), "d": self.d,
                "triples": [{"strata": list(t), **v} for t, v in sorted(self.triples.items())],
                "failures": self.failures}


def _incident(g: PLMap, h: PLMap, s, t):
    pts = [tuple(a - b for a, b in zip(x, y)) for x in g.cell_values(*s) for y in h.cell_values(*t)]
    return linalg.in_convex_hull(pts)


def incident_pairs(g: PLMap, h: PLMap):
    X, Y = g.source, h.source
    return [(s, t) for s in X.cells() for t in Y.cells() if _incident(g, h, s, t)]


def check_transverse(g, h, strong=False, Z: SManifold | None = None) -> TransversalityVerdict:
    """Transversality of g, h.  PL maps into R^n, or cell maps into a common s-manifold Z."""
    if isinstance(g, PLMap):
        if not isinstance(h, PLMap) or g.n != h.n:
            raise StructuralError("maps have different targets")
        return _transverse_affine(g, h)
    return _transverse_cellular(g, h, Z or g.target)


def _transverse_affine(g: PLMap, h: PLMap):
    X, Y, n = g.source, h.source, g.n
    l, m = X.n, Y.n
    triples, failures = {}, []
    for s, t in incident_pairs(g, h):
        i, j = X.stratum_of[s], Y.stratum_of[t]
        D = _hstack(g.differential(*s), [[-x for x in row] for row in h.differential(*t)], n)
        if linalg.rank(D) != n:
            failures.append(f"(a) combined differential has rank < {n} on cells {s}, {t}")
        a, b = X.stratum_dims[i], Y.stratum_dims[j]
        case = classify_case(a, b, n, l, m, n)
        if case is None:
            failures.append(f"(b) no dimension case for strata ({i},{j})")
        triples[(i, j, 0)] = {"dim": a + b - n, "case": case}
    ok = not failures
    strong = ok and all(v["case"] != "iv" for v in triples.values())
    return TransversalityVerdict(ok, strong, triples, sorted(set(failures)), False, (l, m, n))


def _check_nondegenerate(f: StratifiedMap, name):
    for c in f.source.complex.all_cells():
        if not f.cells.is_nondegenerate(c):
            raise StructuralError(f"{name} is degenerate on cell {c}; the combinatorial tier needs nondegenerate maps")


def _transverse_cellular(g: StratifiedMap, h: StratifiedMap, Z: SManifold):
    X, Y = g.source, h.source
    _check_nondegenerate(g, "g")
    _check_nondegenerate(h, "h")
    l, m, n = X.n, Y.n, Z.n
    triples, failures = {}, []
    for s, t in _cell_pairs(g, h):
        i, j = X.stratum_of[s], Y.stratum_of[t]
        k = Z.stratum_of[g.cells.cell(s)]
        a, b, c = X.stratum_dims[i], Y.stratum_dims[j], Z.stratum_dims[k]
        case = classify_case(a, b, c, l, m, n)
        if case is None:
            failures.append(f"(b) no dimension case for strata ({i},{j},{k})")
        triples[(i, j, k)] = {"dim": a + b - c, "case": case}
    ok = not failures
    strong = ok and all(v["case"] != "iv" for v in triples.values())
    return TransversalityVerdict(ok, strong, triples, sorted(set(failures)), True, (l, m, n))


def _cell_pairs(g, h):
    X, Y = g.source, h.source
    by_image = {}
    for t in Y.cells():
        by_image.setdefault(h.cells.cell(t), []).append(t)
    return [(s, t) for s in X.cells() for t in by_image.get(g.cells.cell(s), [])]



# ---------------------------------------------------------------------------
# results

@dataclass
class FibreProductResult:
    W: SManifold | None
    triples: dict                        # (i, j, k) -> {"dim", "case"}
    d: int
    dims: tuple
    assumed: bool = False
    e: object = None                     # cell maps to the factors (combinatorial / product tiers)
    f: object = None
    carrier: dict = field(default_factory=dict)   # W cell -> product cell key
    product: "StaircaseProduct | None" = None
    stratum_names: list = field(default_factory=list)
    maps: tuple = ()

    def dimension_multiset(self):
        return sorted(v["dim"] for v in self.triples.values())

    def to_json(self):
        out = {"d": self.d, "dims": list(self.dims), "assumed": self.assumed,
               "strata": [{"triple": list(t), **v} for t, v in sorted(self.triples.items())]}
        if self.W is not None:
            out["cells"] = list(self.W.complex.counts())
        return out


def _codim_rule_violations(triples, order, d):
    out = []
    keys = sorted(triples)
    for p in keys:
        for q in keys:
            if p != q and order(p, q):
                a, b = triples[p]["dim"], triples[q]["dim"]
                if not ((a in (d - 1, d) and b < a) or (a <= d - 2 and b <= d - 2)):
                    out.append(f"strata {p} and {q} violate the codimension rule")
    return out


def abstract_fibre_product(g, h, verdict: TransversalityVerdict | None = None, Z=None) -> FibreProductResult:
    """Stratum bookkeeping: H, dimensions, case tags, and the codimension-rule check."""
    verdict = verdict or check_transverse(g, h, Z=Z)
    if not verdict.transverse:
        raise StructuralError("maps are not transverse: " + "; ".join(verdict.failures[:3]))
    d = verdict.d
    X, Y = g.source, h.source
    rx, ry = closure_poset(X), closure_poset(Y)
    viol = _codim_rule_violations(verdict.triples, lambda p, q: rx[p[0]][q[0]] and ry[p[1]][q[1]], d)
    if viol:
        raise StructuralError("fibre product stratification is not an s-manifold: " + viol[0])
    res = FibreProductResult(None, dict(verdict.triples), d, verdict.dims, verdict.assumed, maps=(g, h))
    if not isinstance(g, PLMap):
        _combinatorial_W(res, g, h, Z or g.target)
    return res


def _combinatorial_W(res, g, h, Z):
    X, Y = g.source, h.source
    Kx, Ky = X.complex, Y.complex
    keys = {}
    by_image = {}
    for t in Ky.all_cells():
        by_image.setdefault(h.cells.cell(t), []).append(t)
    for s in Kx.all_cells():
        for t in by_image.get(g.cells.cell(s), []):
            keys.setdefault(s[0], []).append((s[1], t[1]))
    top = max(keys, default=-1)
    levels = [sorted(keys.get(d, [])) for d in range(top + 1)]
    index = [{k: i for i, k in enumerate(lv)} for lv in levels]
    cells = []
    for d, lv in enumerate(levels):
        if d == 0:
            cells.append([() for _ in lv])
        else:
            cells.append([tuple(index[d - 1][(Kx.cells[d][u][j], Ky.cells[d][v][j])] for j in range(d + 1))
                          for u, v in lv])
    W = DeltaComplex(cells)
    groups, deleted = {}, set()
    for d, lv in enumerate(levels):
        for i, (u, v) in enumerate(lv):
            if (d, u) in X.deleted or (d, v) in Y.deleted:
                deleted.add((d, i))
                continue
            key = (X.stratum_of[(d, u)], Y.stratum_of[(d, v)], Z.stratum_of[g.cells.cell((d, u))])
            groups.setdefault(key, []).append((d, i))
    names = sorted(groups)
    dims = [res.triples[k]["dim"] for k in names]
    res.W = SManifold(W, res.d, [groups[k] for k in names], dims, (), deleted)
    res.stratum_names = names
    res.e = CellMap.nondegenerate(W, Kx, {(d, i): u for d, lv in enumerate(levels) for i, (u, _) in enumerate(lv)})
    res.f = CellMap.nondegenerate(W, Ky, {(d, i): v for d, lv in enumerate(levels) for i, (_, v) in enumerate(lv)})


# ---------------------------------------------------------------------------
# staircase products

def staircases(p, q):
    """Lattice chains (0,0) -> (p,q) with steps (1,0), (0,1), (1,1): the cells of the prism over a cell pair."""
    out = []

    def rec(path):
        i, j = path[-1]
        if (i, j) == (p, q):
            out.append(tuple(path))
            return
        for di, dj in ((1, 0), (0, 1), (1, 1)):
            if i + di <= p and j + dj <= q:
                rec(path + [(i + di, j + dj)])

    rec([(0, 0)])
    return out


@dataclass
class StaircaseProduct:
    S: SManifold
    keys: list                  # keys[d][i] = (ds, s, dt, t, chain)
    index: list
    e: CellMap
    f: CellMap
    stratum_names: list


def geometric_product(X: SManifold, Y: SManifold) -> StaircaseProduct:
    """X x Y triangulated by staircases on every cell pair; strata are products of strata."""
    Kx, Ky = X.complex, Y.complex
    keys = {}
    for (ds, s), (dt, t) in product(Kx.all_cells(), Ky.all_cells()):
        for ch in staircases(ds, dt):
            keys.setdefault(len(ch) - 1, []).append((ds, s, dt, t, ch))
    top = max(keys, default=-1)
    levels = [sorted(keys.get(d, [])) for d in range(top + 1)]
    index = [{k: i for i, k in enumerate(lv)} for lv in levels]

    def face(key, j):
        ds, s, dt, t, ch = key
        rest = ch[:j] + ch[j + 1:]
        I = sorted({a for a, _ in rest})
        J = sorted({b for _, b in rest})
        ds2, s2 = face_at_positions(Kx, ds, s, I)
        dt2, t2 = face_at_positions(Ky, dt, t, J)
        return (ds2, s2, dt2, t2, tuple((I.index(a), J.index(b)) for a, b in rest))

    cells = []
    for d, lv in enumerate(levels):
        if d == 0:
            cells.append([() for _ in lv])
        else:
            cells.append([tuple(index[d - 1][face(key, j)] for j in range(d + 1)) for key in lv])
    coords = None
    Rx, Ry = Kx.realization, Ky.realization
    if Rx is not None and Ry is not None and levels:
        coords = [Rx.point(key[1]) + Ry.point(key[3]) for key in levels[0]]
    P = DeltaComplex(cells, coords=coords)
    groups, deleted = {}, set()
    for d, lv in enumerate(levels):
        for i, (ds, s, dt, t, _) in enumerate(lv):
            if (ds, s) in X.deleted or (dt, t) in Y.deleted:
                deleted.add((d, i))
                continue
            groups.setdefault((X.stratum_of[(ds, s)], Y.stratum_of[(dt, t)]), []).append((d, i))
    names = sorted(groups)
    dims = [X.stratum_dims[a] + Y.stratum_dims[b] for a, b in names]
    S = SManifold(P, X.n + Y.n, [groups[k] for k in names], dims, (), deleted)
    e = CellMap(P, Kx, {(d, i): (k[0], k[1], tuple(a for a, _ in k[4])) for d, lv in enumerate(levels) for i, k in enumerate(lv)})
    f = CellMap(P, Ky, {(d, i): (k[2], k[3], tuple(b for _, b in k[4])) for d, lv in enumerate(levels) for i, k in enumerate(lv)})
    return StaircaseProduct(S, levels, index, e, f, names)


# ---------------------------------------------------------------------------
# level sets

@dataclass
class LevelSet:
    W: SManifold
    carrier: dict               # W cell -> cell of the sliced complex
    points: list                # coordinates of W vertices


def _require_distinct_vertices(X: DeltaComplex):
    for k, i in X.all_cells():
        vs = X.vertices(k, i)
        if len(set(vs)) != len(vs):
            raise StructuralError(f"cell ({k},{i}) has repeated vertices; slicing needs simplicial cells")


def level_set(S: SManifold, values, z, n=None) -> LevelSet:
    """h^{-1}(z) for h affine on cells, given by vertex values; exact slicing with pulling triangulations."""
    X = S.complex
    R = X.realization
    if R is None:
        raise StructuralError("level sets need an affine realization")
    _require_distinct_vertices(X)
    z = tuple(Fraction(a) for a in z)
    n = len(z) if n is None else n
    D = {v: tuple(Fraction(a) - b for a, b in zip(values[v], z)) for v in range(X.count(0))}
    crossed = {}
    for k, i in X.all_cells():
        pts = [D[v] for v in X.vertices(k, i)]
        if not linalg.in_convex_hull(pts):
            continue
        diffs = [[p[r] - pts[0][r] for p in pts[1:]] for r in range(n)]
        if (linalg.rank(diffs) if k else 0) != n:
            raise NonGenericError(f"level {list(map(str, z))} meets cell ({k},{i}) non-generically")
        crossed[(k, i)] = True
    # slice vertices from crossed n-cells
    points = {}
    for (k, i) in sorted(crossed):
        if k != n:
            continue
        vs = X.vertices(k, i)
        rows = [[D[v][r] for v in vs] for r in range(n)] + [[1] * (k + 1)]
        lam = linalg.solve(rows, [0] * n + [1])
        if lam is None or any(x <= 0 for x in lam):
            raise NonGenericError(f"level meets the boundary of cell ({k},{i})")
        amb = len(R.point(vs[0]))
        points[i] = tuple(sum(lam[t] * R.point(vs[t])[c] for t in range(k + 1)) for c in range(amb))
    verts_of, tri = {}, {}

    def facets(k, i):
        return [(k - 1, f) for f in X.cells[k][i] if (k - 1, f) in crossed]

    for (k, i) in sorted(crossed):
        if k < n:
            continue
        if k == n:
            verts_of[(k, i)] = frozenset([i])
            tri[(k, i)] = [(i,)]
            continue
        fs = facets(k, i)
        verts_of[(k, i)] = frozenset().union(*(verts_of[f] for f in fs))
        v0 = min(verts_of[(k, i)])
        out = set()
        for f in fs:
            if v0 in verts_of[f]:
                continue
            for s in tri[f]:
                out.add(tuple(sorted((v0,) + s)))
        tri[(k, i)] = sorted(out)
    order = sorted(points)
    renum = {v: t for t, v in enumerate(order)}
    facets_all = sorted({tuple(renum[v] for v in s) for c in tri for s in tri[c]})
    if not order:
        return LevelSet(SManifold(DeltaComplex([]), S.n - n, [], []), {}, [])
    W, index = simplicial_complex(facets_all, coords=[points[v] for v in order])
    carrier = {}
    for c in sorted(tri, key=lambda c: (c[0], c[1])):
        for s in tri[c]:
            s = tuple(renum[v] for v in s)
            for r in range(1, len(s) + 1):
                for sub in combinations(s, r):
                    carrier.setdefault(index[sub], c)
    groups, deleted = {}, set()
    for cell, c in carrier.items():
        if c in S.deleted:
            deleted.add(cell)
            continue
        groups.setdefault(S.stratum_of[c], []).append(cell)
    names = sorted(groups)
    dims = [S.stratum_dims[a] - n for a in names]
    Wm = SManifold(W, S.n - n, [groups[a] for a in names], dims, (), deleted)
    Wm.stratum_names = names
    return LevelSet(Wm, carrier, [points[v] for v in order])


def geometric_fibre_product(g: PLMap, h: PLMap, verdict=None) -> FibreProductResult:
    """X x_{R^n} Y as the zero level set of g - h on the staircase product."""
    verdict = verdict or check_transverse(g, h)
    if not verdict.transverse:
        raise StructuralError("maps are not transverse: " + "; ".join(verdict.failures[:3]))
    X, Y = g.source, h.source
    if X.complex.realization is None or Y.complex.realization is None:
        raise StructuralError("geometric fibre products need affine realizations")
    P = geometric_product(X, Y)
    vals = {}
    for v, key in enumerate(P.keys[0] if P.keys else []):
        vals[v] = tuple(a - b for a, b in zip(g.values[key[1]], h.values[key[3]]))
    L = level_set(P.S, vals, (0,) * g.n, g.n)
    W = L.W
    names = [P.stratum_names[a] for a in getattr(W, "stratum_names", [])]
    triples = {}
    for (a, b), st in zip(names, W.strata):
        triples[(a, b, 0)] = {"dim": X.stratum_dims[a] + Y.stratum_dims[b] - g.n,
                              "case": classify_case(X.stratum_dims[a], Y.stratum_dims[b], g.n, X.n, Y.n, g.n)}
    carrier = {c: P.keys[k][i] for c, (k, i) in L.carrier.items()}
    res = FibreProductResult(W, triples, verdict.d, verdict.dims, False, carrier=carrier, product=P,
                             stratum_names=[(a, b, 0) for a, b in names], maps=(g, h))
    res.level = L
    return res


def tiers_agree(g: PLMap, h: PLMap):
    """Abstract and geometric stratum-dimension multisets coincide."""
    a = abstract_fibre_product(g, h)
    b = geometric_fibre_product(g, h)
    return a.dimension_multiset() == b.dimension_multiset(), a, b


# ---------------------------------------------------------------------------
# orientations

def _coords_in(basis_pts, vec):
    """Coordinates of vec in the edge basis of an affinely independent point list."""
    if len(basis_pts) == 1:
        return []
    B = [[p[c] - basis_pts[0][c] for p in basis_pts[1:]] for c in range(len(vec))]
    x = linalg.solve(B, list(vec))
    if x is None:
        raise StructuralError("vector does not lie in the cell's affine span")
    return x


def cell_orientation_sign(w_pts, x_pts, y_pts, gx, hy, n):
    """Sign of det[alpha | beta] for a top cell of W inside the cell pair (x_pts, y_pts).

    alpha: W edge vectors in (x-edge, y-edge) coordinates; beta_r solves D beta = e_r
    for D = [dg | -dh].
    """
    l, m = len(x_pts) - 1, len(y_pts) - 1
    nx = len(x_pts[0]) if x_pts else 0
    cols = []
    for p in w_pts[1:]:
        vec = [a - b for a, b in zip(p, w_pts[0])]
        cols.append(list(_coords_in(x_pts, vec[:nx])) + list(_coords_in(y_pts, vec[nx:])))
    G = [[gx[p][r] - gx[0][r] for p in range(1, l + 1)] for r in range(n)]
    H = [[-(hy[q][r] - hy[0][r]) for q in range(1, m + 1)] for r in range(n)]
    Dm = _hstack(G, H, n)
    for r in range(n):
        e = [int(r == t) for t in range(n)]
        beta = linalg.solve(Dm, e)
        if beta is None:
            raise StructuralError("combined differential is not surjective")
        cols.append(beta)
    if not cols:
        return 1
    M = [[cols[c][r] for c in range(len(cols))] for r in range(len(cols))]
    s = linalg.sign(linalg.det(M))
    if s == 0:
        raise StructuralError("degenerate orientation basis")
    return s


def _w_cell_data(res: FibreProductResult, c, X, Y, g, h):
    W = res.W
    key = res.carrier[c]
    ds, s, dt, t, _ = key
    Rx, Ry = X.complex.realization, Y.complex.realization
    w_pts = [W.complex.realization.point(v) for v in W.complex.vertices(*c)]
    xv, yv = X.complex.vertices(ds, s), Y.complex.vertices(dt, t)
    return (w_pts, [Rx.point(v) for v in xv], [Ry.point(v) for v in yv],
            [g.values[v] for v in xv], [h.values[v] for v in yv], (ds, s), (dt, t))


def orient_fibre_product(res: FibreProductResult, cert_x: OrientationCert, cert_y: OrientationCert,
                         z_sign=1, ring=None) -> OrientationCert:
    """Orientation (and product weights) on the top cells of a geometric fibre product."""
    if any(v["case"] == "iv" for v in res.triples.values()):
        raise OrientationRefused("not strongly transverse: case (iv) strata obstruct an orientation")
    if res.product is None:
        raise OrientationRefused("orientation needs the geometric tier (affine data)")
    g, h = res.maps
    X, Y, n = g.source, h.source, g.n
    m = Y.n
    W = res.W
    signs = {}
    for i in W.top_cells():
        c = (W.n, i)
        w_pts, xp, yp, gx, hy, sx, ty = _w_cell_data(res, c, X, Y, g, h)
        if sx[0] != X.n or ty[0] != Y.n:
            raise StructuralError(f"top cell {c} of W does not lie over top cells")
        eps = cell_orientation_sign(w_pts, xp, yp, gx, hy, n)
        signs[i] = (-1) ** (n * m) * cert_x.signs[sx[1]] * cert_y.signs[ty[1]] * z_sign * eps
    ring = ring or ("Q" if "Q" in (cert_x.ring, cert_y.ring) else cert_x.ring)
    weights = {}
    names = getattr(W, "stratum_names", [])
    for idx, (a, b) in enumerate(res.product.stratum_names[q] for q in names):
        weights[idx] = cert_x.weight(a) * cert_y.weight(b)
    return OrientationCert(signs, weights, ring)


def _locate(W: SManifold, point):
    """A top cell of W containing the point, with its edge matrix."""
    R = W.complex.realization
    for i in W.top_cells():
        pts = [R.point(v) for v in W.complex.vertices(W.n, i)]
        B = [[p[c] - pts[0][c] for p in pts[1:]] for c in range(len(point))]
        x = linalg.solve(B, [a - b for a, b in zip(point, pts[0])]) if W.n else []
        if x is None:
            continue
        if all(a >= 0 for a in x) and sum(x, Fraction(0)) <= 1:
            return i, pts
    return None, None


def swap_law(g: PLMap, h: PLMap, cert_x, cert_y):
    """Compare orientations of X x_Z Y and Y x_Z X cell by cell; returns (holds, expected factor, details)."""
    A = geometric_fibre_product(g, h)
    B = geometric_fibre_product(h, g)
    oa = orient_fibre_product(A, cert_x, cert_y)
    ob = orient_fibre_product(B, cert_y, cert_x)
    l, m, n = g.source.n, h.source.n, g.n
    factor = (-1) ** ((l - n) * (m - n))
    nx = g.source.complex.realization.ambient
    ny = h.source.complex.realization.ambient
    Rb = B.W.complex.realization
    out = []
    for i in B.W.top_cells():
        pts = [Rb.point(v) for v in B.W.complex.vertices(B.W.n, i)]
        sw = [p[ny:] + p[:ny] for p in pts]
        bary = tuple(sum((p[c] for p in sw), Fraction(0)) / len(sw) for c in range(nx + ny))
        j, apts = _locate(A.W, bary)
        if j is None:
            return False, factor, [f"cell {i} of the swapped product not found"]
        d = A.W.n
        E = [[p[c] - apts[0][c] for p in apts[1:]] for c in range(nx + ny)]
        rel = 1
        if d:
            coeff = [linalg.solve(E, [p[c] - sw[0][c] for c in range(nx + ny)]) for p in sw[1:]]
            rel = linalg.sign(linalg.det([[coeff[a][b] for a in range(d)] for b in range(d)]))
        out.append((i, j, ob.signs[i] * rel, oa.signs[j]))
    holds = all(x == factor * y for _, _, x, y in out)
    return holds, factor, out


# ---------------------------------------------------------------------------
# corner fibre products over R^n

def _stratum_injective(M: SManifoldC):
    for k, C in enumerate(M.corners):
        seen = set()
        for c in C.cells():
            key = (C.stratum_of[c], c[0], M.proj[k][c])
            if key in seen:
                raise StructuralError(f"C_{k} has two cells of one stratum over base cell {(c[0], M.proj[k][c])}")
            seen.add(key)


def _in_D_stratum(M: SManifoldC, k, a, l, b):
    if k > l:
        return False
    if k == l:
        return a == b or (a, b) in M.D.get((k, l), ())
    return (a, b) in M.D.get((k, l), ())


@dataclass
class CornerFibreProduct:
    M: SManifoldC
    fp: FibreProductResult
    pieces: dict                 # h -> {(i, j): [cells of C_h(W)]}
    keys: list                   # keys[h][d][idx] = (i, j, c, s', t')


def corner_fibre_product(MX: SManifoldC, g: PLMap, MY: SManifoldC, h: PLMap) -> CornerFibreProduct:
    """Corner data of W = X x_{R^n} Y: C_h(W) is the union of the pieces over C_i(X), C_j(Y) with i + j = h."""
    _stratum_injective(MX)
    _stratum_injective(MY)
    for i, j in product(range(len(MX.corners)), range(len(MY.corners))):
        if MX.corners[i].is_empty() or MY.corners[j].is_empty():
            continue
        v = check_transverse(g.composed(MX.corners[i], MX.proj[i]), h.composed(MY.corners[j], MY.proj[j]))
        if not v.transverse:
            raise StructuralError(f"corner levels ({i},{j}) are not transverse")
    fp = geometric_fibre_product(g, h)
    W = fp.W
    P = fp.product
    PK = P.S.complex
    d = W.n

    def face_key(c, j, s1, t1, i, jj):
        f = (c[0] - 1, W.complex.cells[c[0]][c[1]][j])
        big, small = fp.carrier[c], fp.carrier[f]
        if big == small:
            return f, s1, t1
        bk = P.index[len(big[4]) - 1][big]
        sk = P.index[len(small[4]) - 1][small]
        pos = [q for q in _sub_positions(PK, len(big[4]) - 1, bk, len(small[4]) - 1, sk)]
        ch = big[4]
        I = sorted({ch[q][0] for q in pos})
        J = sorted({ch[q][1] for q in pos})
        s2 = face_at_positions(MX.corners[i].complex, big[0], s1, I)[1]
        t2 = face_at_positions(MY.corners[jj].complex, big[2], t1, J)[1]
        return f, s2, t2

    corners, proj, keys_all, pieces = [], [], [], {}
    name_lists = []
    for hlev in range(d + 1):
        keys = {}
        for i in range(hlev + 1):
            jj = hlev - i
            if i >= len(MX.corners) or jj >= len(MY.corners):
                continue
            for c in W.complex.all_cells():
                ds, s, dt, t, _ = fp.carrier[c]
                for s1 in MX.over[i].get((ds, s), []):
                    for t1 in MY.over[jj].get((dt, t), []):
                        keys.setdefault(c[0], []).append((i, jj, c[1], s1, t1))
        top = max(keys, default=-1)
        levels = [sorted(keys.get(q, [])) for q in range(top + 1)]
        index = [{k: n for n, k in enumerate(lv)} for lv in levels]
        cells = []
        for q, lv in enumerate(levels):
            if q == 0:
                cells.append([() for _ in lv])
                continue
            row = []
            for (i, jj, ci, s1, t1) in lv:
                fs = []
                for j in range(q + 1):
                    f, s2, t2 = face_key((q, ci), j, s1, t1, i, jj)
                    fs.append(index[q - 1][(i, jj, f[1], s2, t2)])
                row.append(tuple(fs))
            cells.append(row)
        Kc = DeltaComplex(cells, coords=[W.complex.realization.point(k[2]) for k in levels[0]] if levels else None)
        groups, deleted = {}, set()
        for q, lv in enumerate(levels):
            for n_, (i, jj, ci, s1, t1) in enumerate(lv):
                if (q, ci) in W.deleted:
                    deleted.add((q, n_))
                    continue
                ds, s, dt, t, _ = fp.carrier[(q, ci)]
                sa = MX.corners[i].stratum_of[(ds, s1)]
                sb = MY.corners[jj].stratum_of[(dt, t1)]
                groups.setdefault((i, jj, sa, sb), []).append((q, n_))
                pieces.setdefault(hlev, {}).setdefault((i, jj), []).append((q, n_))
        names = sorted(groups)
        sdims = []
        for (i, jj, sa, sb) in names:
            sdims.append(MX.corners[i].stratum_dims[sa] + MY.corners[jj].stratum_dims[sb] - g.n)
        C = SManifold(Kc, d - hlev, [groups[k] for k in names], sdims, (), deleted)
        corners.append(C)
        name_lists.append(names)
        proj.append({(q, n_): k[2] for q, lv in enumerate(levels) for n_, k in enumerate(lv)})
        keys_all.append(levels)
    D = {}
    for h1 in range(d + 1):
        for h2 in range(h1, d + 1):
            pairs = set()
            for a, (i1, j1, sa1, sb1) in enumerate(name_lists[h1]):
                for b, (i2, j2, sa2, sb2) in enumerate(name_lists[h2]):
                    if h1 == h2 and a == b:
                        continue
                    if _in_D_stratum(MX, i1, sa1, i2, sa2) and _in_D_stratum(MY, j1, sb1, j2, sb2):
                        pairs.add((a, b))
            if pairs:
                D[(h1, h2)] = pairs
    M = SManifoldC(W, corners, proj, D)
    return CornerFibreProduct(M, fp, pieces, keys_all)


def _sub_positions(K: DeltaComplex, db, b, ds, s):
    hits = [P for P in combinations(range(db + 1), ds + 1) if face_at_positions(K, db, b, P) == (ds, s)]
    if len(hits) != 1:
        raise StructuralError("carrier face positions are ambiguous")
    return hits[0]


def corner_product(MX: SManifoldC, MY: SManifoldC) -> CornerFibreProduct:
    """Product with corners: the fibre product over the point."""
    g = PLMap(MX.base, {v: () for v in range(MX.base.complex.count(0))}, 0)
    h = PLMap(MY.base, {v: () for v in range(MY.base.complex.count(0))}, 0)
    return corner_fibre_product(MX, g, MY, h)


def compact_euler(S: SManifold):
    """Compactly supported Euler characteristic: alternating count of cells not removed."""
    return sum((-1) ** k for k, _ in S.cells())


def boundary_decomposition_report(cfp: CornerFibreProduct, MX, g, MY, h):
    """Eq-style check: the boundary of W splits as (dX x Y) and (X x dY), compared with direct fibre products."""
    out = {"pieces": {}, "ok": True}
    pieces = cfp.pieces.get(1, {})
    for (i, j), label in (((1, 0), "dX x Y"), ((0, 1), "X x dY")):
        cells = pieces.get((i, j), [])
        mine = sum((-1) ** q for q, _ in cells)
        Mi = MX if i else MY
        if len(Mi.corners) < 2 or Mi.corners[1].is_empty():
            direct = 0
        else:
            bnd = boundary(Mi)[0].base
            _realize_from(bnd, Mi.base, Mi.proj[1])
            if i:
                direct_fp = geometric_fibre_product(g.composed(bnd, Mi.proj[1]), h)
            else:
                direct_fp = geometric_fibre_product(g, h.composed(bnd, Mi.proj[1]))
            direct = compact_euler(direct_fp.W)
        out["pieces"][label] = {"euler_piece": mine, "euler_direct": direct}
        out["ok"] = out["ok"] and mine == direct
    return out


def _realize_from(C: SManifold, base: SManifold, proj):
    if C.complex.realization is None and base.complex.realization is not None:
        C.complex.realization = AffineRealization(
            {v: base.complex.realization.point(proj[(0, v)]) for v in range(C.complex.count(0))})
    return C


def iterated_count_report(MX: SManifoldC, MY: SManifoldC, c: int):
    """Product case: chi_c of the c-fold boundary of X x Y versus sum_a binom(c, a) chi(d^a X) chi(d^(c-a) Y)."""
    W = corner_product(MX, MY).M
    lhs = compact_euler(iterated_boundary(W, c)[0].base) if c <= W.n else 0
    terms = []
    for a in range(c + 1):
        b = c - a
        ea = compact_euler(iterated_boundary(MX, a)[0].base) if a <= MX.n else 0
        eb = compact_euler(iterated_boundary(MY, b)[0].base) if b <= MY.n else 0
        terms.append({"a": a, "multiplicity": comb(c, a), "chi_a": ea, "chi_b": eb})
    rhs = sum(t["multiplicity"] * t["chi_a"] * t["chi_b"] for t in terms)
    return {"c": c, "lhs": lhs, "rhs": rhs, "terms": terms, "ok": lhs == rhs}


def boundary_sign_law(MX: SManifoldC, g: PLMap, cert_x, MY: SManifoldC, h: PLMap, cert_y):
    """Compare the induced boundary orientation of W with the fibre-product orientations of its two pieces.

    Expected: +1 on the (dX x Y) piece and (-1)^(l - n) on the (X x dY) piece.
    """
    cfp = corner_fibre_product(MX, g, MY, h)
    W = cfp.M
    fp = cfp.fp
    cert_w = orient_fibre_product(fp, cert_x, cert_y)
    vw = check_corner_orientation(W, [cert_w])
    vx = check_corner_orientation(MX, [cert_x])
    vy = check_corner_orientation(MY, [cert_y])
    if not (vw.ok and vx.ok and vy.ok) or len(vw.certs) < 2:
        raise StructuralError("inputs or product fail the corner orientation check")
    dW = vw.certs[1]
    bW = boundary(W)[0].base
    l, m, n = MX.n, MY.n, g.n
    X, Y = MX.base, MY.base
    results = {"dX x Y": [], "X x dY": []}
    levels = cfp.keys[1]
    for i_top in bW.top_cells():
        i, j, ci, s1, t1 = levels[bW.n][i_top]
        c = (bW.n, ci)
        w_pts, xp, yp, gx, hy, sx, ty = _w_cell_data(fp, c, X, Y, g, h)
        if i == 1:
            s_side = vx.certs[1].signs[s1] * cert_y.signs[ty[1]]
            eps = (-1) ** (n * m) * s_side * cell_orientation_sign(w_pts, xp, yp, gx, hy, n)
            results["dX x Y"].append((i_top, dW.signs[i_top], eps))
        else:
            s_side = cert_x.signs[sx[1]] * vy.certs[1].signs[t1]
            eps = (-1) ** (n * (m - 1)) * s_side * cell_orientation_sign(w_pts, xp, yp, gx, hy, n)
            results["X x dY"].append((i_top, dW.signs[i_top], eps))
    f0 = 1
    f1 = (-1) ** (l - n)
    holds = all(a == f0 * b for _, a, b in results["dX x Y"]) and all(a == f1 * b for _, a, b in results["X x dY"])
    return holds, {"factor_dX": f0, "factor_dY": f1, "cells": results,
                   "valid": validate_corners(W).ok}


# ---------------------------------------------------------------------------
# universal property (combinatorial tier)

def mediating_map(res: FibreProductResult, e2: CellMap, f2: CellMap):
    """The unique b with e o b = e2 and f o b = f2 for a cone (W', e2, f2); raises if none exists."""
    g, h = res.maps
    lookup = {}
    for c in res.W.complex.all_cells():
        key = (res.e.cell(c), res.f.cell(c))
        if key in lookup:
            raise StructuralError("projections are not jointly injective")
        lookup[key] = c
    images = {}
    for w in e2.source.all_cells():
        k1, i1, t1 = e2(w)
        k2, i2, t2 = f2(w)
        if g.cells.cell((k1, i1)) != h.cells.cell((k2, i2)) or t1 != t2:
            raise StructuralError(f"cone does not commute at cell {w}")
        c = lookup.get(((k1, i1), (k2, i2)))
        if c is None:
            raise StructuralError(f"no fibre-product cell over {w}")
        images[w] = (c[0], c[1], t1)
    b = CellMap(e2.source, res.W.complex, images)
    if b.violations():
        raise StructuralError("mediating map is not cellular: " + b.violations()[0])
    return b
