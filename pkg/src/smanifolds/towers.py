"""Inverse systems of finitely generated abelian groups, truncated at depth N.

A group is Z^rank + sum Z/t with elements as integer coordinate vectors
(torsion coordinates taken mod t).  Over Q or Z2 groups are vector spaces.
Nothing here claims lim^1 of an infinite tower: only stabilization
certificates and strict-descent evidence are reported.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import linalg, rings
from .homology import int_kernel, int_solve, smith_normal_form, class_coordinates
from .rings import StructuralError


@dataclass
class Group:
    rank: int
    torsion: tuple = ()
    ring: str = "Z"

    def __post_init__(self):
        rings.check_ring(self.ring)
        self.torsion = tuple(int(t) for t in self.torsion)
        if self.ring != "Z" and self.torsion:
            raise StructuralError("vector spaces carry no torsion")
        if any(t <= 1 for t in self.torsion):
            raise StructuralError("torsion orders must exceed 1")

    @property
    def ngens(self):
        return self.rank + len(self.torsion)

    def orders(self):
        return [0] * self.rank + list(self.torsion)

    def relations(self):
        """Columns spanning the relation lattice in Z^ngens."""
        return [[t if r == self.rank + i else 0 for r in range(self.ngens)] for i, t in enumerate(self.torsion)]

    def normalize(self, v):
        if self.ring == "Z2":
            return [x % 2 for x in v]
        return [x % o if o else x for x, o in zip(v, self.orders())]

    def describe(self):
        base = {"Z": "Z", "Q": "Q", "Z2": "Z2"}[self.ring]
        parts = [base if self.rank == 1 else f"{base}^{self.rank}"] if self.rank else []
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) or "0"

    def to_json(self):
        return {"rank": self.rank, "torsion": list(self.torsion), "ring": self.ring, "group": self.describe()}


def _apply(M, v):
    return [sum(a * b for a, b in zip(row, v)) for row in M]


@dataclass
class Tower:
    """Groups A_1..A_N and maps f_i: A_{i+1} -> A_i (maps[i-1] is an ngens(A_i) x ngens(A_{i+1}) matrix)."""

    groups: list
    maps: list
    ring: str = "Z"

    def __post_init__(self):
        self.groups = [g if isinstance(g, Group) else Group(g[0], tuple(g[1]), self.ring) for g in self.groups]
        self.maps = [[[rings.coerce(x, self.ring) if self.ring != "Z" else int(x) for x in row] for row in M]
                     for M in self.maps]

    @property
    def depth(self):
        return len(self.groups)

    def violations(self):
        out = []
        if not self.groups:
            return ["tower has no groups"]
        if len(self.maps) != len(self.groups) - 1:
            return [f"{len(self.groups)} groups need {len(self.groups) - 1} maps, got {len(self.maps)}"]
        for i, M in enumerate(self.maps):
            a, b = self.groups[i], self.groups[i + 1]
            if len(M) != a.ngens or any(len(r) != b.ngens for r in M):
                out.append(f"map {i + 1} has shape {len(M)}x{len(M[0]) if M else 0}, expected {a.ngens}x{b.ngens}")
                continue
            if self.ring != "Z":
                continue
            for rel in b.relations():
                img = _apply(M, rel)
                if any(img[r] % o if o else img[r] for r, o in enumerate(a.orders())):
                    out.append(f"map {i + 1} does not kill the relations of A_{i + 2}")
        return out

    def require_valid(self):
        v = self.violations()
        if v:
            raise StructuralError("malformed tower: " + "; ".join(v))

    def push(self, i, j, v):
        """Image of v in A_j under the composite A_i -> A_j (1-based, j <= i)."""
        for t in range(i - 1, j - 1, -1):
            v = self.groups[t - 1].normalize(_apply(self.maps[t - 1], v)) if self.ring == "Z" else _apply(self.maps[t - 1], v)
            if self.ring == "Z2":
                v = [x % 2 for x in v]
        return v

    def to_json(self):
        return {"ring": self.ring,
                "tower": [{"rank": g.rank, "torsion": list(g.torsion),
                           "map_matrix": [[rings.format_scalar(x) if self.ring != "Z" else x for x in r]
                                          for r in self.maps[i - 1]] if i else None}
                          for i, g in enumerate(self.groups)]}

    @classmethod
    def from_json(cls, doc):
        ring = doc.get("ring", "Z")
        items = doc["tower"]
        groups = [Group(int(it["rank"]), tuple(it.get("torsion", ())), ring) for it in items]
        maps = []
        for it in items[1:]:
            M = it.get("map_matrix")
            if M is None:
                raise StructuralError("every group after the first needs a map_matrix")
            maps.append([[rings.parse_scalar(x, ring) if ring != "Z" else int(x) for x in r] for r in M])
        return cls(groups, maps, ring)


@dataclass
class LimitResult:
    group: Group
    families: list              # basis families (x_1, ..., x_N), compatible under the maps
    depth: int

    def to_json(self):
        return {"limit": self.group.to_json(), "depth": self.depth,
                "families": [[list(map(str, x)) for x in fam] for fam in self.families]}


def _blocks(T: Tower):
    offs, o = [], 0
    for g in T.groups:
        offs.append(o)
        o += g.ngens
    return offs, o


def _difference_matrix(T: Tower):
    """delta: sum A_i -> sum_{i<N} A_i, delta(x)_i = x_i - f_i(x_{i+1})."""
    offs, tot = _blocks(T)
    rows = []
    for i in range(T.depth - 1):
        a = T.groups[i]
        for r in range(a.ngens):
            row = [0] * tot
            row[offs[i] + r] = 1
            for c in range(T.groups[i + 1].ngens):
                row[offs[i + 1] + c] -= T.maps[i][r][c]
            rows.append(row)
    return rows, offs, tot


def truncated_limit(T: Tower) -> LimitResult:
    """Kernel of the shifted-difference map on sum A_1..A_N, presented by SNF."""
    T.require_valid()
    delta, offs, tot = _difference_matrix(T)
    if T.ring != "Z":
        p = 2 if T.ring == "Z2" else None
        K = linalg.nullspace(delta, tot, p) if delta else linalg.identity(tot)
        fams = [_split(T, offs, v) for v in K]
        return LimitResult(Group(len(K), (), T.ring), fams, T.depth)
    # x with delta(x) in the target relations: kernel of [delta | R_target]
    tgt_rel, row0 = [], 0
    for i in range(T.depth - 1):
        for rel in T.groups[i].relations():
            col = [0] * len(delta)
            for r, x in enumerate(rel):
                col[row0 + r] = x
            tgt_rel.append(col)
        row0 += T.groups[i].ngens
    aug = [list(r) + [c[i] for c in tgt_rel] for i, r in enumerate(delta)] if delta else []
    if aug:
        K = [v[:tot] for v in int_kernel(aug, tot + len(tgt_rel))]
    else:
        K = linalg.identity(tot)
    K = _lattice_basis(K, tot)
    # quotient K / (source relations)
    src_rel = []
    for i, g in enumerate(T.groups):
        for rel in g.relations():
            v = [0] * tot
            for r, x in enumerate(rel):
                v[offs[i] + r] = x
            src_rel.append(v)
    if not K:
        return LimitResult(Group(0, (), "Z"), [], T.depth)
    Kt = linalg.transpose(K, 0)
    coords = []
    for v in src_rel:
        c = int_solve(Kt, v)
        if c is None:
            raise StructuralError("relations do not lie in the kernel; maps are not homomorphisms")
        coords.append(c)
    k = len(K)
    if coords:
        R = linalg.transpose(coords, 0)  # k x len(src_rel)
        U, D, V = smith_normal_form(R)
        diag = [D[i][i] if i < len(D[0]) else 0 for i in range(k)]
        Uinv = _int_inverse(U)
        gens = linalg.matmul(Kt, Uinv)  # columns: new generators in Z^tot
    else:
        diag = [0] * k
        gens = Kt
    diag = [abs(d) for d in diag]
    free = [i for i in range(k) if diag[i] == 0]
    tors = [i for i in range(k) if diag[i] > 1]
    fams = [_split(T, offs, [gens[r][i] for r in range(tot)]) for i in free + tors]
    fams = [[T.groups[j].normalize(x) for j, x in enumerate(f)] for f in fams]
    return LimitResult(Group(len(free), tuple(diag[i] for i in tors), "Z"), fams, T.depth)


def _split(T, offs, v):
    return [list(v[offs[i]:offs[i] + g.ngens]) for i, g in enumerate(T.groups)]


def _lattice_basis(vectors, n):
    """A Z-basis of the lattice spanned by the vectors (Hermite-style via SNF of the span)."""
    vectors = [v for v in vectors if any(v)]
    if not vectors:
        return []
    M = linalg.transpose(vectors, 0)          # n x k
    U, D, V = smith_normal_form(M)
    r = sum(1 for i in range(min(len(D), len(D[0]))) if D[i][i])
    Uinv = _int_inverse(U)
    # columns of Uinv * D span the lattice
    return [[Uinv[row][i] * D[i][i] for row in range(n)] for i in range(r)]


def _int_inverse(U):
    n = len(U)
    inv = []
    for c in range(n):
        e = [int(r == c) for r in range(n)]
        x = int_solve(U, e)
        if x is None:
            raise StructuralError("unimodular inverse failed")
        inv.append(x)
    return linalg.transpose(inv, n)


# ---------------------------------------------------------------------------
# Mittag-Leffler

@dataclass
class MLStatus:
    status: str                 # holds_by_depth | fails_strictly | undetermined
    depth: int | None           # depth from which the images are stable (holds_by_depth)
    image_ranks: list           # (rank, torsion) of im(A_k -> A_1), k = 1..N

    def to_json(self):
        return {"status": self.status, "stable_from": self.depth,
                "images": [{"rank": r, "index_data": list(t)} for r, t in self.image_ranks]}


def _image_gens(T: Tower, k):
    g = T.groups[k - 1]
    return [T.push(k, 1, [int(r == c) for r in range(g.ngens)]) for c in range(g.ngens)]


def _contained(T: Tower, small, big):
    """Every vector of ``small`` lies in span(big) + relations of A_1."""
    A1 = T.groups[0]
    span = big + (A1.relations() if T.ring == "Z" else [])
    if T.ring != "Z":
        p = 2 if T.ring == "Z2" else None
        return linalg.rank(span + small, p) == linalg.rank(span, p) if span else not any(any(v) for v in small)
    if not span or not A1.ngens:
        return not any(any(v) for v in small)
    M = linalg.transpose(span, A1.ngens)
    return all(int_solve(M, v) is not None for v in small)


def _image_invariants(T: Tower, gens):
    A1 = T.groups[0]
    span = gens + (A1.relations() if T.ring == "Z" else [])
    if not span or not A1.ngens:
        return (0, ())
    if T.ring != "Z":
        p = 2 if T.ring == "Z2" else None
        return (linalg.rank(gens, p) if gens else 0, ())
    M = linalg.transpose(span, A1.ngens)
    _, D, _ = smith_normal_form(M)
    ds = [abs(D[i][i]) for i in range(min(len(D), len(D[0])))]
    return (sum(1 for d in ds if d), tuple(d for d in ds if d > 1))


def mittag_leffler_status(T: Tower) -> MLStatus:
    """Image filtration of A_1 under the composites A_k -> A_1, k = 1..N."""
    T.require_valid()
    N = T.depth
    gens = [_image_gens(T, k) for k in range(1, N + 1)]
    inv = [_image_invariants(T, g) for g in gens]
    # equal[k] : im_k == im_{k+1} (im_{k+1} is always contained in im_k)
    equal = [_contained(T, gens[k], gens[k + 1]) for k in range(N - 1)]
    if N >= 2:
        for k in range(N - 1):
            if all(equal[k:]):
                return MLStatus("holds_by_depth", k + 1, inv)
        if not any(equal):
            return MLStatus("fails_strictly", None, inv)
    return MLStatus("undetermined", None, inv)


# ---------------------------------------------------------------------------
# the wedge-of-circles tower

@dataclass
class HawaiianTower:
    tower: Tower
    classes: list               # class coordinates at depth m = 1..m_max
    compatible: bool
    ml: MLStatus

    def to_json(self):
        return {**self.tower.to_json(), "classes": [[str(x) for x in c] for c in self.classes],
                "compatible": self.compatible, "mittag_leffler": self.ml.to_json()}


def hawaiian_tower(m_max, ring="Z", flip=()) -> HawaiianTower:
    """H_1 of the truncated wedges X_1 <- X_2 <- ... with restriction maps, plus fundamental classes.

    ``flip`` lists circles (1-based) whose orientation is reversed.
    """
    from .corpus import hawaiian
    from .complex import Chain
    from .smanifold import OrientationCert, fundamental_class
    if m_max < 1:
        raise StructuralError("m_max must be >= 1")
    flip = set(flip)
    pres, classes, ncells = [], [], []
    for m in range(1, m_max + 1):
        e = hawaiian(m)
        S, circles = e.model, e.extra["circles"]
        signs = {}
        for k, (_, ids) in enumerate(circles, start=1):
            for i in ids:
                signs[i] = -1 if k in flip else 1
        cert = OrientationCert(signs, {}, ring)
        coords, P, _ = fundamental_class(S, cert)
        pres.append((P, S))
        classes.append(list(coords))
        ncells.append(S.complex.count(1))
    maps = []
    for m in range(1, m_max):
        P_hi, _ = pres[m]
        P_lo, _ = pres[m - 1]
        cols = []
        for w in P_hi.witnesses:
            restricted = Chain(1, {c: x for c, x in w.coeffs.items() if c < ncells[m - 1]}, ring)
            cols.append(class_coordinates(P_lo, restricted))
        maps.append(linalg.transpose(cols, P_lo.rank + len(P_lo.torsion)))
    groups = [Group(P.rank, P.torsion, ring) for P, _ in pres]
    T = Tower(groups, maps, ring)
    compatible = all(T.push(m + 1, m, classes[m]) == classes[m - 1] for m in range(1, m_max))
    return HawaiianTower(T, classes, compatible, mittag_leffler_status(T))


def scalar_tower(factor, depth, ring="Z"):
    """Z <-(x factor)- Z <- ... of the given depth."""
    return Tower([Group(1, (), ring) for _ in range(depth)], [[[factor]] for _ in range(depth - 1)], ring)


def projection_tower(depth, ring="Z"):
    """Z^1 <- Z^2 <- ... forgetting the last coordinate."""
    groups = [Group(i, (), ring) for i in range(1, depth + 1)]
    maps = [[[int(r == c) for c in range(i + 1)] for r in range(i)] for i in range(1, depth)]
    return Tower(groups, maps, ring)


__all__ = ["Group", "Tower", "LimitResult", "MLStatus", "HawaiianTower", "truncated_limit",
           "mittag_leffler_status", "hawaiian_tower", "scalar_tower", "projection_tower"]
