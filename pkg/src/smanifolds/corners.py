"""S-manifolds with corners: corner data, fibre posets, the corner functor,
boundaries, morphisms with corner lifts, b-normality and corner orientations.

Corner objects C_k are s-manifolds of dimension n - k; the projections
Pi_k are nondegenerate cell maps stored as ``{(d, i): base id}``.  The
incidence sets D_kl (k < l) are stored as pairs of strata (a of C_k, b of C_l);
over a base cell every pair of cells from those strata is incident.  D_kk is
the diagonal, optionally enlarged by extra stratum pairs (which the validator
then rejects by level rigidity).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, product
from math import comb, factorial, perm

from . import rings
from .complex import Chain, DeltaComplex
from .homology import is_boundary, relative_boundary
from .maps import CellMap, StratifiedMap, _face_image, face_at_positions
from .rings import StructuralError
from .smanifold import (OrientationCert, Report, SManifold, orientation_classes,
                        validate_smanifold)


def empty_smanifold(n):
    return SManifold(DeltaComplex([]), n, [], [])


class SManifoldC:
    """Corner data (X, C_k, Pi_k, D_kl) for k = 0..n."""

    def __init__(self, base: SManifold, corners, proj, D=None):
        self.base = base
        self.n = base.n
        corners = list(corners)
        proj = [dict(p) for p in proj]
        while len(corners) < self.n + 1:
            corners.append(empty_smanifold(self.n - len(corners)))
            proj.append({})
        self.corners = corners
        self.proj = [{(int(d), int(i)): int(j) for (d, i), j in p.items()} for p in proj]
        self.D = {}
        for (k, l), pairs in (D or {}).items():
            self.D[(int(k), int(l))] = frozenset((int(a), int(b)) for a, b in pairs)

    def __repr__(self):
        return f"SManifoldC(n={self.n}, corner cells={[C.complex.counts() for C in self.corners]})"

    @classmethod
    def without_boundary(cls, base: SManifold):
        """The corner structure with C_0 = X and no higher corners."""
        table = {c: c[1] for c in base.complex.all_cells()}
        return cls(base, [base], [table], {})

    @cached_property
    def over(self):
        """over[k][(d, c)] = sorted ids of d-cells of C_k lying over base cell (d, c)."""
        out = []
        for k, p in enumerate(self.proj):
            m = {}
            for (d, i), j in sorted(p.items()):
                m.setdefault((d, j), []).append(i)
            out.append(m)
        return out

    def in_D(self, k, u, l, v):
        """Incidence of cells u = (d, i) of C_k and v = (d, j) of C_l over a common base cell."""
        if k > l:
            return False
        if k == l and u == v:
            return True
        a = self.corners[k].stratum_of.get(u)
        b = self.corners[l].stratum_of.get(v)
        return (a, b) in self.D.get((k, l), ())

    def fiber(self, cell):
        d, c = cell
        return [(k, (d, u)) for k in range(len(self.corners)) for u in self.over[k].get((d, c), [])]

    def base_cells(self):
        return self.base.cells()


# ---------------------------------------------------------------------------
# fibre posets

class FiberPoset:
    """A finite poset whose elements carry a level k (the corner depth)."""

    def __init__(self, elements, leq):
        self.elements = list(elements)          # list of (level, key)
        self.leq = [[bool(leq(a, b)) for b in self.elements] for a in self.elements]

    @classmethod
    def from_relation(cls, elements, pairs):
        pairs = set(pairs)
        return cls(elements, lambda a, b: a == b or (a, b) in pairs)

    def __len__(self):
        return len(self.elements)

    def levels(self):
        top = max((k for k, _ in self.elements), default=-1)
        return tuple(sum(1 for k, _ in self.elements if k == t) for t in range(top + 1))

    def upper(self, i, j):
        return [x for x in range(len(self)) if self.leq[i][x] and self.leq[j][x]]

    def lower(self, i, j):
        return [x for x in range(len(self)) if self.leq[x][i] and self.leq[x][j]]

    def _least(self, xs):
        least = [x for x in xs if all(self.leq[x][y] for y in xs)]
        return least[0] if len(least) == 1 else None

    def _greatest(self, xs):
        great = [x for x in xs if all(self.leq[y][x] for y in xs)]
        return great[0] if len(great) == 1 else None

    def lub(self, i, j):
        return self._least(self.upper(i, j))

    def glb(self, i, j):
        return self._greatest(self.lower(i, j))

    def maximum(self):
        return self._greatest(list(range(len(self))))

    def minimum(self):
        return self._least(list(range(len(self))))

    def violations(self):
        out = []
        m = len(self)
        if m == 0:
            return ["empty fibre"]
        L = self.leq
        for i in range(m):
            if not L[i][i]:
                out.append(f"not reflexive at {self.elements[i]}")
        for i in range(m):
            for j in range(m):
                if i != j and L[i][j] and L[j][i]:
                    if i < j:
                        out.append(f"not antisymmetric: {self.elements[i]}, {self.elements[j]}")
                for x in range(m):
                    if L[i][j] and L[j][x] and not L[i][x]:
                        out.append(f"not transitive: {self.elements[i]} <= {self.elements[j]} <= {self.elements[x]}")
                        break
        for i in range(m):
            for j in range(m):
                if i != j and L[i][j] and self.elements[i][0] == self.elements[j][0]:
                    out.append(f"level rigidity fails: {self.elements[i]} <= {self.elements[j]}")
        if out:
            return out
        for i, j in combinations(range(m), 2):
            if self.lub(i, j) is None:
                out.append(f"no least upper bound for {self.elements[i]}, {self.elements[j]}")
            if self.glb(i, j) is None:
                out.append(f"no greatest lower bound for {self.elements[i]}, {self.elements[j]}")
        if self.maximum() is None:
            out.append("no maximum")
        mn = self.minimum()
        if mn is None or self.elements[mn][0] != 0:
            out.append("minimum is not the unique level-0 element")
        if sum(1 for k, _ in self.elements if k == 0) != 1:
            out.append("level 0 does not have exactly one element")
        return out

    def is_boolean(self):
        """Isomorphic to the Boolean lattice of subsets of the atoms, graded by level."""
        atoms = [i for i, (k, _) in enumerate(self.elements) if k == 1]
        d = len(atoms)
        if len(self) != 2 ** d:
            return False
        sig = {}
        for i, (k, _) in enumerate(self.elements):
            s = frozenset(a for a in atoms if self.leq[a][i])
            if len(s) != k or s in sig.values():
                return False
            sig[i] = s
        for i in range(len(self)):
            for j in range(len(self)):
                if self.leq[i][j] != (sig[i] <= sig[j]):
                    return False
        return True

    def chain_count(self, k):
        """Number of chains u_1 <= ... <= u_k with u_t at level t (points of the k-fold boundary)."""
        by = {}
        for i, (lev, _) in enumerate(self.elements):
            by.setdefault(lev, []).append(i)
        if k == 0:
            return len(by.get(0, []))
        counts = {i: 1 for i in by.get(1, [])}
        for t in range(2, k + 1):
            counts = {j: sum(c for i, c in counts.items() if self.leq[i][j]) for j in by.get(t, [])}
        return sum(counts.values())

    def to_json(self):
        return {"levels": list(self.levels()),
                "elements": [[k, list(key) if isinstance(key, tuple) else key] for k, key in self.elements],
                "order": [[i, j] for i in range(len(self)) for j in range(len(self))
                          if i != j and self.leq[i][j]]}


def fiber_poset(M: SManifoldC, cell) -> FiberPoset:
    elems = M.fiber(cell)
    return FiberPoset(elems, lambda a, b: M.in_D(a[0], a[1], b[0], b[1]))


def corner_counts(P: FiberPoset):
    """Fibre counts behind the ordered/unordered boundary-component identities."""
    lv = P.levels()
    b = lv[1] if len(lv) > 1 else 0
    out = []
    for k in range(1, len(lv)):
        ck = lv[k]
        dk = P.chain_count(k)
        out.append({"k": k, "C_k": ck, "boundary_k": dk,
                    "ordered_components": perm(b, k), "unordered_components": comb(b, k),
                    "k!_C_k": factorial(k) * ck,
                    "quotient_identity": dk == factorial(k) * ck,
                    "ordered_identity": dk == perm(b, k),
                    "unordered_identity": ck == comb(b, k)})
    return {"local_boundary_components": b, "levels": list(lv), "by_k": out,
            "identities_hold": all(r["quotient_identity"] and r["ordered_identity"]
                                   and r["unordered_identity"] for r in out)}


# ---------------------------------------------------------------------------
# validation

def validate_corners(M: SManifoldC) -> Report:
    rep = Report()
    X = M.base
    r = validate_smanifold(X)
    rep.violations += [f"base: {v}" for v in r.violations]
    for k, C in enumerate(M.corners):
        r = validate_smanifold(C)
        rep.violations += [f"C_{k}: {v}" for v in r.violations]
        if C.n != M.n - k:
            rep.violations.append(f"C_{k} has declared dimension {C.n}, expected {M.n - k}")
    if len(M.corners) != M.n + 1:
        rep.violations.append(f"expected {M.n + 1} corner levels, got {len(M.corners)}")
    if rep.violations:
        return rep
    K = X.complex
    # projections are nondegenerate cell maps commuting with faces
    for k, C in enumerate(M.corners):
        p = M.proj[k]
        for (d, i) in C.complex.all_cells():
            j = p.get((d, i))
            if j is None or not K.has_cell((d, j)):
                rep.violations.append(f"Pi_{k} undefined or invalid on ({d},{i})")
                continue
            if ((d, i) in C.deleted) != ((d, j) in X.deleted):
                rep.violations.append(f"Pi_{k}: deletion mismatch at ({d},{i})")
            if d:
                for t, f in enumerate(C.complex.cells[d][i]):
                    if p.get((d - 1, f)) != K.cells[d][j][t]:
                        rep.violations.append(f"Pi_{k} does not commute with face {t} of ({d},{i})")
    if rep.violations:
        return rep
    # (a) local injectivity on open stars of vertices
    for k, C in enumerate(M.corners):
        for v in range(C.complex.count(0)):
            if (0, v) in C.deleted:
                continue
            star = C.open_star([(0, v)])
            imgs = [(d, M.proj[k][(d, i)]) for d, i in star]
            if len(set(imgs)) != len(imgs):
                rep.violations.append(f"Pi_{k} is not injective near vertex {v} of C_{k}")
    # (b) Pi_0 is an isomorphism of s-manifolds
    C0 = M.corners[0]
    imgs = {(d, M.proj[0][(d, i)]) for d, i in C0.cells()}
    if len(imgs) != len(C0.cells()) or imgs != set(X.cells()):
        rep.violations.append("Pi_0 is not a bijection on cells")
    else:
        seen = set()
        for a, s in enumerate(C0.strata):
            tgt = {X.stratum_of[(d, M.proj[0][(d, i)])] for d, i in s}
            if len(tgt) != 1 or len(X.strata[next(iter(tgt))]) != len(s) or tgt & seen:
                rep.violations.append(f"Pi_0 does not map stratum {a} of C_0 onto a stratum")
            seen |= tgt
    # (c) strata of C_k cover strata of X
    image_stratum = []
    for k, C in enumerate(M.corners):
        st = {}
        for a, s in enumerate(C.strata):
            tgt = {X.stratum_of[(d, M.proj[k][(d, i)])] for d, i in s}
            if len(tgt) != 1:
                rep.violations.append(f"stratum {a} of C_{k} meets base strata {sorted(tgt)}")
                continue
            b = tgt.pop()
            st[a] = b
            if C.stratum_dims[a] != X.stratum_dims[b]:
                rep.violations.append(f"stratum {a} of C_{k} has dim {C.stratum_dims[a]} over a stratum of dim {X.stratum_dims[b]}")
            counts = {}
            for d, i in s:
                counts[(d, M.proj[k][(d, i)])] = counts.get((d, M.proj[k][(d, i)]), 0) + 1
            missing = [c for c in X.strata[b] if c not in counts]
            if missing:
                rep.violations.append(f"stratum {a} of C_{k} does not cover base stratum {b} (misses {missing[:3]})")
                continue
            for (d, c), cnt in counts.items():
                for f in (K.cells[d][c] if d else ()):
                    if (d - 1, f) in counts and counts[(d - 1, f)] != cnt:
                        rep.violations.append(f"stratum {a} of C_{k}: covering degree jumps at base cell ({d},{c})")
        image_stratum.append(st)
    if rep.violations:
        return rep
    # (d) D is a union of components of the fibre products
    for (k, l), pairs in M.D.items():
        if not (0 <= k <= l <= M.n):
            rep.violations.append(f"D_{k}{l} has invalid levels")
            continue
        for a, b in pairs:
            if a not in image_stratum[k] or b not in image_stratum[l]:
                rep.violations.append(f"D_{k}{l} names unknown strata ({a},{b})")
            elif image_stratum[k][a] != image_stratum[l][b]:
                rep.violations.append(f"D_{k}{l} pairs strata ({a},{b}) over different base strata")
    for k in range(M.n + 1):
        for l in range(k, M.n + 1):
            Ck, Cl = M.corners[k], M.corners[l]
            for (d, c), us in M.over[k].items():
                for u, v in product(us, M.over[l].get((d, c), [])):
                    inside = M.in_D(k, (d, u), l, (d, v))
                    for t in range(d + 1 if d else 0):
                        fu, fv = Ck.complex.cells[d][u][t], Cl.complex.cells[d][v][t]
                        if (d - 1, fu) in Ck.deleted:
                            continue
                        if M.in_D(k, (d - 1, fu), l, (d - 1, fv)) != inside:
                            rep.violations.append(f"D_{k}{l} is not open and closed at cells ({d},{u}), ({d},{v})")
    # (e) D_kl -> C_l is a covering: constant partner counts
    for k in range(M.n + 1):
        for l in range(k, M.n + 1):
            Cl = M.corners[l]

            def partners(d, v):
                base = (d, M.proj[l][(d, v)])
                return sum(1 for u in M.over[k].get(base, []) if M.in_D(k, (d, u), l, (d, v)))

            for d, v in Cl.cells():
                n0 = partners(d, v)
                for f in (Cl.complex.cells[d][v] if d else ()):
                    if (d - 1, f) not in Cl.deleted and partners(d - 1, f) != n0:
                        rep.violations.append(f"D_{k}{l} -> C_{l} is not a covering near ({d},{v})")
    # (f) fibre posets are lattices with the C_0 point as minimum
    for cell in X.cells():
        P = fiber_poset(M, cell)
        for v in P.violations():
            rep.violations.append(f"fibre poset at base cell {cell}: {v}")
    rep.notes.append("fibre posets evaluated at every base cell (vertices and one interior witness per cell)")
    return rep


def require_valid_corners(M):
    r = validate_corners(M)
    if not r.ok:
        raise StructuralError("invalid corner data: " + "; ".join(r.violations[:5]))
    return M


def has_simplicial_corners(M):
    """(True, None) or (False, failing base cell).  Accepts a bare FiberPoset too."""
    if isinstance(M, FiberPoset):
        return (True, None) if M.is_boolean() else (False, "poset")
    require_valid_corners(M)
    for cell in M.base_cells():
        if not fiber_poset(M, cell).is_boolean():
            return False, cell
    return True, None


@dataclass
class CornerStrata:
    interiors: list           # interiors[k] = set of cells of C_k in C_k interior
    S: list                   # S[k] = set of base cells in the depth-k corner stratum
    violations: list = field(default_factory=list)

    def to_json(self):
        return {"interiors": [sorted(map(list, s)) for s in self.interiors],
                "S": [sorted(map(list, s)) for s in self.S], "violations": self.violations}


def interiors_and_strata(M: SManifoldC) -> CornerStrata:
    require_valid_corners(M)
    interiors = [set() for _ in M.corners]
    S = [set() for _ in M.corners]
    for cell in M.base_cells():
        P = fiber_poset(M, cell)
        k, c = P.elements[P.maximum()]
        interiors[k].add(c)
        S[k].add(cell)
    out = CornerStrata(interiors, S)
    X = M.base
    for k, s in enumerate(S):
        closure = X.closure(s)
        later = set().union(*S[k:])
        if not closure <= later:
            out.violations.append(f"closure of S^{k} leaves the union of deeper strata")
        if X.open_star(s) & closure != s:
            out.violations.append(f"S^{k} is not locally closed")
    return out


# ---------------------------------------------------------------------------
# morphisms

@dataclass
class CornerMorphism:
    """f on bases with its corner lift: lift[(k, (d, i))] = (k2, (d2, i2, theta))."""

    source: SManifoldC
    target: SManifoldC
    base: CellMap
    lift: dict

    def level(self, k, cell):
        return self.lift[(k, cell)][0]

    def compose(self, after: "CornerMorphism") -> "CornerMorphism":
        lift = {}
        for key, (k1, (d1, i1, t1)) in self.lift.items():
            k2, (d2, i2, t2) = after.lift[(k1, (d1, i1))]
            lift[key] = (k2, (d2, i2, tuple(t2[x] for x in t1)))
        return CornerMorphism(self.source, after.target, self.base.compose(after.base), lift)

    def to_json(self):
        return {"base": self.base.to_json(),
                "lift": [[k, d, i, k2, d2, i2, list(t)]
                         for (k, (d, i)), (k2, (d2, i2, t)) in sorted(self.lift.items())]}


def _interior_over(M: SManifoldC, cell):
    P = fiber_poset(M, cell)
    top = P.maximum() if len(P) else None
    if top is None:
        raise StructuralError(f"no interior corner point over base cell {cell}")
    return P.elements[top]


def _positions_in(C: DeltaComplex, big, small):
    d, i = big
    e, j = small
    return [P for P in combinations(range(d + 1), e + 1) if face_at_positions(C, d, i, P) == (e, j)]


def corner_lift(source: SManifoldC, target: SManifoldC, base: CellMap) -> CornerMorphism:
    """The corner lift C(f) of a cellular map of bases.

    A corner point is the limit of interior points of its own corner level;
    C(f) sends those to the unique interior corner points over their images
    and extends by continuity.  Inconsistent limits raise a structural error.
    """
    lift = {}
    for k, C in enumerate(source.corners):
        K = C.complex
        interior_cells = {c for c in C.cells()
                          if _interior_over(source, (c[0], source.proj[k][c])) == (k, c)}
        for u in C.cells():
            results = set()
            for w in C.open_star([u]):
                if w not in interior_cells:
                    continue
                cw = (w[0], source.proj[k][w])
                d2, c2, theta = base(cw)
                k2, wp = _interior_over(target, (d2, c2))
                C2 = target.corners[k2].complex
                for P in _positions_in(K, w, u):
                    Q = sorted({theta[p] for p in P})
                    up = face_at_positions(C2, wp[0], wp[1], Q)
                    th = tuple(Q.index(theta[p]) for p in P)
                    results.add((k2, (up[0], up[1], th)))
            if len(results) != 1:
                raise StructuralError(f"corner lift undetermined or inconsistent at level {k} cell {u}: {sorted(results)}")
            lift[(k, u)] = results.pop()
    return CornerMorphism(source, target, base, lift)


def identity_morphism(M: SManifoldC) -> CornerMorphism:
    lift = {(k, c): (k, (c[0], c[1], tuple(range(c[0] + 1))))
            for k, C in enumerate(M.corners) for c in C.cells()}
    return CornerMorphism(M, M, CellMap.identity(M.base.complex), lift)


def validate_morphism(phi: CornerMorphism) -> Report:
    rep = Report()
    X, Y = phi.source, phi.target
    rep.violations += [f"base map: {v}" for v in StratifiedMap(X.base, Y.base, phi.base).violations()]
    if rep.violations:
        return rep
    for k, C in enumerate(X.corners):
        for u in C.cells():
            if (k, u) not in phi.lift:
                rep.violations.append(f"corner lift undefined at level {k} cell {u}")
                continue
            k2, (d2, i2, th) = phi.lift[(k, u)]
            C2 = Y.corners[k2]
            if not C2.complex.has_cell((d2, i2)):
                rep.violations.append(f"corner lift of {u} names unknown cell")
                continue
            # Eq: Pi_Y o C(f) = f o Pi_X
            bd, bc, bt = phi.base((u[0], X.proj[k][u]))
            if (bd, bc, bt) != (d2, Y.proj[k2][(d2, i2)], th):
                rep.violations.append(f"projection square fails at level {k} cell {u}")
            if u[0]:
                for j, f in enumerate(C.complex.cells[u[0]][u[1]]):
                    if (u[0] - 1, f) in C.deleted:
                        continue
                    kk, (dd, ii, tt) = phi.lift[(k, (u[0] - 1, f))]
                    if kk != k2 or (dd, ii, tt) != _face_image(C2.complex, d2, i2, th, j):
                        rep.violations.append(f"corner lift not cellular at face {j} of level-{k} cell {u}")
    if rep.violations:
        return rep
    for cell in X.base_cells():
        P = fiber_poset(X, cell)
        d2, c2, _ = phi.base(cell)
        Q = fiber_poset(Y, (d2, c2))
        img = [_image_index(phi, Q, e) for e in P.elements]
        if None in img:
            rep.violations.append(f"corner lift leaves the fibre over the image of {cell}")
            continue
        for i in range(len(P)):
            for j in range(len(P)):
                if P.leq[i][j] and not Q.leq[img[i]][img[j]]:
                    rep.violations.append(f"incidence not preserved over {cell}: {P.elements[i]} <= {P.elements[j]}")
        if img[P.maximum()] != Q.maximum():
            rep.violations.append(f"interior point over {cell} not sent to an interior point")
    return rep


def _image_index(phi, Q, elem):
    k, c = elem
    k2, (d2, i2, _) = phi.lift[(k, c)]
    try:
        return Q.elements.index((k2, (d2, i2)))
    except ValueError:
        return None


def is_interior(phi: CornerMorphism):
    return all(phi.lift[(0, c)][0] == 0 for c in phi.source.corners[0].cells())


def bnormal_report(phi: CornerMorphism) -> Report:
    rep = Report()
    X, Y = phi.source, phi.target
    for (k, c), (k2, _) in sorted(phi.lift.items()):
        if k2 > k:
            rep.violations.append(f"(ii) level rises {k} -> {k2} at cell {c}")
    for cell in X.base_cells():
        P = fiber_poset(X, cell)
        d2, c2, _ = phi.base(cell)
        Q = fiber_poset(Y, (d2, c2))
        img = [_image_index(phi, Q, e) for e in P.elements]
        for i, j in combinations(range(len(P)), 2):
            if img[P.lub(i, j)] != Q.lub(img[i], img[j]):
                rep.violations.append(f"(i) least upper bound not preserved over {cell}")
            if img[P.glb(i, j)] != Q.glb(img[i], img[j]):
                rep.violations.append(f"(i) greatest lower bound not preserved over {cell}")
        for i in range(len(P)):
            for j in range(len(P)):
                if i != j and P.leq[i][j]:
                    k, l = P.elements[i][0], P.elements[j][0]
                    k2, l2 = Q.elements[img[i]][0], Q.elements[img[j]][0]
                    if not (k2 <= k and 0 <= l2 - k2 <= l - k):
                        rep.violations.append(f"(iii) incidence window fails over {cell}: ({k},{l}) -> ({k2},{l2})")
    rep.violations = sorted(set(rep.violations))
    return rep


def is_bnormal(phi: CornerMorphism):
    return bnormal_report(phi).ok


@dataclass
class BoundarySplit:
    part0: list          # cells of the boundary mapped into C_0 of the target
    part1: list          # cells of the boundary mapped into C_1 of the target
    map0: dict
    map1: dict

    def to_json(self):
        return {"part0": [list(c) for c in self.part0], "part1": [list(c) for c in self.part1]}


def boundary_decomposition(phi: CornerMorphism) -> BoundarySplit:
    if not is_bnormal(phi):
        raise StructuralError("boundary decomposition needs a b-normal morphism")
    C1 = phi.source.corners[1] if len(phi.source.corners) > 1 else empty_smanifold(0)
    part = {0: [], 1: []}
    maps = {0: {}, 1: {}}
    for c in C1.cells():
        k2, img = phi.lift[(1, c)]
        part[k2].append(c)
        maps[k2][c] = img
    for comp in C1.complex.components(C1.cells()):
        if len({phi.lift[(1, c)][0] for c in comp}) != 1:
            raise StructuralError("boundary split is not open and closed")
    return BoundarySplit(sorted(part[0]), sorted(part[1]), maps[0], maps[1])


# ---------------------------------------------------------------------------
# corner spaces

def _strata_from(keys_index, stratum_key, n, deleted_fn):
    groups = {}
    deleted = set()
    for d, idx in enumerate(keys_index):
        for key, i in idx.items():
            if deleted_fn(d, key):
                deleted.add((d, i))
                continue
            groups.setdefault(stratum_key(d, key), []).append((d, i))
    names = sorted(groups)
    strata = [groups[s] for s in names]
    return names, strata, deleted


def corner_space(M: SManifoldC, k: int):
    """C_k of the corner data as corner data in its own right, with the morphism to M."""
    require_valid_corners(M)
    if not 0 <= k <= M.n:
        raise StructuralError(f"corner level {k} out of range 0..{M.n}")
    Ck = M.corners[k]
    N = M.n - k
    corners, proj, name_lists = [], [], []
    for l in range(N + 1):
        Cl = M.corners[k + l]
        keys = [set() for _ in range(Ck.complex.dim + 1)]
        for (d, c), us in M.over[k].items():
            for u, v in product(us, M.over[k + l].get((d, c), [])):
                if M.in_D(k, (d, u), k + l, (d, v)):
                    keys[d].add((u, v))
        # close under faces: faces of incident pairs may lie in the removed part
        for d in range(len(keys) - 1, 0, -1):
            for u, v in keys[d]:
                for j in range(d + 1):
                    keys[d - 1].add((Ck.complex.cells[d][u][j], Cl.complex.cells[d][v][j]))
        keys = [sorted(ks) for ks in keys]
        cx, index = _pair_complex_dim(keys, Ck.complex, Cl.complex)
        names, strata, deleted = _strata_from(
            index, lambda d, key: (Ck.stratum_of[(d, key[0])], Cl.stratum_of[(d, key[1])]), N - l,
            lambda d, key: (d, key[0]) in Ck.deleted)
        S = SManifold(cx, N - l, strata, None, (), deleted)
        corners.append(S)
        name_lists.append(names)
        proj.append({(d, i): key[0] for d, idx in enumerate(index) for key, i in idx.items()})
    D = {}
    for l in range(N + 1):
        for m in range(l, N + 1):
            pairs = set()
            for (a, b) in name_lists[l]:
                for (a2, c) in name_lists[m]:
                    if a != a2:
                        continue
                    if l == m and b == c:
                        continue
                    if (b, c) in M.D.get((k + l, k + m), ()):
                        pairs.add((name_lists[l].index((a, b)), name_lists[m].index((a2, c))))
            if pairs:
                D[(l, m)] = pairs
    # the base of C_k(M) is C_k itself; its C_0 is the diagonal copy
    out = SManifoldC(Ck, corners, proj, D)
    lift = {}
    for l, S in enumerate(corners):
        for d in range(S.complex.dim + 1):
            for i in range(S.complex.count(d)):
                if (d, i) in S.deleted:
                    continue
                key = _key_of(out, l, d, i)
                lift[(l, (d, i))] = (k + l, (d, key[1], tuple(range(d + 1))))
    base = CellMap.nondegenerate(Ck.complex, M.base.complex, M.proj[k])
    return out, CornerMorphism(out, M, base, lift)


def _pair_complex_dim(keys_by_dim, A: DeltaComplex, B: DeltaComplex):
    index = [{key: n for n, key in enumerate(keys)} for keys in keys_by_dim]
    cells = []
    for d, keys in enumerate(keys_by_dim):
        if d == 0:
            cells.append([() for _ in keys])
            continue
        row = []
        for u, v in keys:
            row.append(tuple(index[d - 1][(A.cells[d][u][j], B.cells[d][v][j])] for j in range(d + 1)))
        cells.append(row)
    while cells and not cells[-1]:
        cells.pop()
    cx = DeltaComplex(cells)
    cx._pair_keys = [list(keys) for keys in keys_by_dim]
    return cx, index


def _key_of(M, l, d, i):
    return M.corners[l].complex._pair_keys[d][i]


def boundary(M: SManifoldC):
    return corner_space(M, 1)


def iterated_boundary(M: SManifoldC, k: int):
    """The k-fold boundary, with the composite cell map of its base down to M's base."""
    cur = M
    down = {c: c for c in M.base.complex.all_cells()}
    for _ in range(k):
        nxt, pi = boundary(cur)
        down = {c: down[(c[0], img[1])] for c, img in pi.base.images.items()}
        cur = nxt
    return cur, down


def boundary_fibre_count(M: SManifoldC, k: int, base_cell):
    """Number of k-fold boundary cells lying over a base cell."""
    Mk, down = iterated_boundary(M, k)
    return sum(1 for c in Mk.base.cells() if down[c] == tuple(base_cell))


# ---------------------------------------------------------------------------
# corner orientations

@dataclass
class CornerOrientationVerdict:
    ok: bool
    levels: list
    certs: list
    boundary_count: object = None
    pushforward_is_boundary: bool | None = None

    def to_json(self):
        return {"ok": self.ok, "levels": self.levels,
                "certs": [{"signs": {str(c): s for c, s in sorted(ct.signs.items())},
                           "weights": {str(i): rings.format_scalar(w) for i, w in sorted(ct.weights.items())}}
                          for ct in self.certs],
                "boundary_count": None if self.boundary_count is None else rings.format_scalar(self.boundary_count),
                "pushforward_is_boundary": self.pushforward_is_boundary}


def _interior_top_chain(M: SManifoldC, cert: OrientationCert):
    X = M.base
    ring = cert.ring
    out = {}
    for c in X.top_cells():
        if c not in cert.signs:
            raise StructuralError(f"certificate has no sign for top cell {c}")
        out[c] = cert.weight(X.stratum_of[(X.n, c)]) * cert.signs[c]
    return Chain(X.n, out, ring)


def _synthesize(Mnext: SManifoldC, incl, defect: Chain, ring):
    """The next-level certificate read off from the boundary chain, or (None, reason)."""
    X = Mnext.base
    signs, weights = {}, {}
    one = rings.one(ring)
    for c in X.top_cells():
        v = defect[incl[(X.n, c)][1]]
        if v == 0:
            return None, f"zero boundary coefficient over boundary cell {c}"
        if ring in ("Z", "Z2"):
            if v not in (one, -one):
                return None, f"coefficient {rings.format_scalar(v)} over boundary cell {c} is not a unit sign"
            signs[c] = 1 if v == one else -1
        else:
            st = X.stratum_of[(X.n, c)]
            w = weights.setdefault(st, abs(v))
            if abs(v) != w:
                return None, f"coefficients on stratum {st} do not share one weight"
            signs[c] = 1 if v > 0 else -1
    return OrientationCert(signs, weights, ring), None


def check_corner_orientation(M: SManifoldC, certs, ring=None) -> CornerOrientationVerdict:
    """Level by level: boundary of the interior top chain equals the pushed-forward next chain."""
    certs = list(certs) if isinstance(certs, (list, tuple)) else [certs]
    ring = ring or certs[0].ring
    levels, used = [], []
    cur = M
    for k in range(M.n + 1):
        cert = certs[k] if k < len(certs) and certs[k] is not None else None
        if cert is None:
            break
        used.append(cert)
        T = _interior_top_chain(cur, cert)
        if cur.n == 0:
            levels.append({"k": k, "ok": True, "defect": {}})
            break
        d = relative_boundary(T, cur.base.complex, None, cur.base.deleted)
        nxt, pi = boundary(cur)
        incl = {c: (c[0], img[1]) for c, img in pi.base.images.items()}
        nxt_cert = certs[k + 1] if k + 1 < len(certs) else None
        reason = None
        if nxt_cert is None and not nxt.base.is_empty():
            nxt_cert, reason = _synthesize(nxt, incl, d, ring)
        if nxt_cert is None and not nxt.base.is_empty():
            levels.append({"k": k, "ok": False, "reason": reason,
                           "defect": _chain_json(d)})
            return CornerOrientationVerdict(False, levels, used)
        push = {}
        if not nxt.base.is_empty():
            T2 = _interior_top_chain(nxt, nxt_cert)
            for c, v in T2.coeffs.items():
                tgt = incl[(T2.k, c)][1]
                push[tgt] = push.get(tgt, 0) + v
        diff = d - Chain(d.k, push, ring) if push else d
        levels.append({"k": k, "ok": diff.is_zero(), "defect": _chain_json(diff)})
        if not diff.is_zero():
            return CornerOrientationVerdict(False, levels, used)
        if nxt.base.is_empty():
            break
        if k + 1 >= len(certs):
            certs.append(nxt_cert)
        cur = nxt
    out = CornerOrientationVerdict(True, levels, used)
    if M.n == 1 and len(used) > 1:
        nb = boundary(M)[0].base
        out.boundary_count = sum((rings.coerce(used[1].weight(nb.stratum_of[(0, c)]) * s, ring)
                                  for c, s in used[1].signs.items()), rings.zero(ring))
    if len(used) > 1:
        # the pushed-forward boundary class is a boundary in X
        first = _interior_top_chain(M, used[0])
        d = relative_boundary(first, M.base.complex, None, M.base.deleted)
        out.pushforward_is_boundary = is_boundary(d, M.base.complex, None, M.base.deleted)[0]
    return out


def _chain_json(c: Chain):
    return {str(i): rings.format_scalar(v) for i, v in c.coeffs.items()}


def find_corner_orientation(M: SManifoldC, ring="Z", weights=None, limit=20):
    """Search base orientations (flipping forced classes) for one passing the corner check."""
    X = M.base
    classes, conflict = orientation_classes(X)
    if conflict:
        return None
    if len(classes) > limit:
        raise StructuralError(f"too many orientation classes ({len(classes)})")
    for flips in product((1, -1), repeat=max(len(classes) - 1, 0)):
        signs = {}
        for cls, f in zip(classes, (1,) + flips):
            for c, s in cls.items():
                signs[c] = s * f
        cert = OrientationCert(signs, dict(weights or {}), ring)
        v = check_corner_orientation(M, [cert], ring)
        if v.ok:
            return v
    return None
