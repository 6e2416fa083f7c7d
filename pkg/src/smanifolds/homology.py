"""Cellular homology over Z, Z2 and Q, with optional +-1 local coefficients."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import linalg, rings
from .complex import Chain, DeltaComplex, boundary_chain
from .rings import StructuralError


class PreconditionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Smith normal form

def _snf(M):
    """Return (U, D, V, Uinv, Vinv) with U M V = D over Z."""
    m = len(M)
    n = len(M[0]) if m else 0
    D = [list(map(int, r)) for r in M]
    U, Uinv = linalg.identity(m), linalg.identity(m)
    V, Vinv = linalg.identity(n), linalg.identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]
        for r in Uinv:
            r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]
        Vinv[i], Vinv[j] = Vinv[j], Vinv[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]
        for r in Uinv:
            r[src] -= q * r[dst]

    def add_col(dst, src, q):  # col_dst += q * col_src
        for r in D:
            r[dst] += q * r[src]
        for r in V:
            r[dst] += q * r[src]
        Vinv[src] = [a - q * b for a, b in zip(Vinv[src], Vinv[dst])]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            clean = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // D[t][t]))
                    clean = clean and D[i][t] == 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // D[t][t]))
                    clean = clean and D[t][j] == 0
            if not clean:
                cand = [(abs(D[i][t]), i, t) for i in range(t, m) if D[i][t]]
                cand += [(abs(D[t][j]), t, j) for j in range(t, n) if D[t][j]]
                _, i, j = min(cand)
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if D[i][j] % D[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if D[t][t] < 0:
            D[t] = [-a for a in D[t]]
            U[t] = [-a for a in U[t]]
            for r in Uinv:
                r[t] = -r[t]
        t += 1
    return U, D, V, Uinv, Vinv


def smith_normal_form(M):
    """U, D, V with U M V = D diagonal, diagonal entries dividing each other."""
    U, D, V, _, _ = _snf(M)
    return U, D, V


def invariant_factors(M):
    _, D, _ = smith_normal_form(M)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0)) if D[i][i]]


def int_solve(M, b):
    """An integer solution of M x = b, or None."""
    m = len(M)
    n = len(M[0]) if m else 0
    if m == 0:
        return [0] * n
    U, D, V, _, _ = _snf(M)
    ub = [sum(u * x for u, x in zip(row, b)) for row in U]
    y = [0] * n
    for i in range(m):
        d = D[i][i] if i < n else 0
        if d == 0:
            if ub[i]:
                return None
        else:
            if ub[i] % d:
                return None
            y[i] = ub[i] // d
    return [sum(V[r][c] * y[c] for c in range(n)) for r in range(n)]


def int_kernel(M, ncols=None):
    """Z-basis (list of vectors) of the integer kernel of M."""
    if not M:
        n = ncols or 0
        return linalg.identity(n)
    _, D, V, _, _ = _snf(M)
    n = len(M[0])
    r = sum(1 for i in range(min(len(D), n)) if D[i][i])
    return [[V[row][c] for row in range(n)] for c in range(r, n)]


# ---------------------------------------------------------------------------
# local coefficients

@dataclass(frozen=True, eq=False)
class Z2Cocycle:
    """A +-1 value on every 1-cell, multiplying to +1 around every 2-cell."""

    values: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "values", {int(e): int(v) for e, v in self.values.items()})

    def __getitem__(self, edge):
        return self.values.get(edge, 1)

    def violations(self, X: DeltaComplex):
        out = []
        for e, v in self.values.items():
            if v not in (1, -1):
                out.append(f"edge {e} has value {v}, expected +-1")
            if not 0 <= e < X.count(1):
                out.append(f"unknown edge {e}")
        for i, fs in enumerate(X.cells[2] if X.dim >= 2 else ()):
            prod = self[fs[0]] * self[fs[1]] * self[fs[2]]
            if prod != 1:
                out.append(f"cocycle condition fails on 2-cell {i}")
        return out

    def validate(self, X):
        bad = self.violations(X)
        if bad:
            raise StructuralError("; ".join(bad))
        return self


def leading_edge(X: DeltaComplex, k, i):
    """The edge of a k-cell joining vertex positions 0 and 1."""
    while k > 1:
        i = X.cells[k][i][k]
        k -= 1
    return i


def twisted_boundary(c: Chain, X: DeltaComplex, L: Z2Cocycle) -> Chain:
    """Boundary with +-1 coefficients transported to each cell's first vertex.

    Only the face opposite vertex 0 changes basepoint, so only that term is
    multiplied by L on the edge from vertex 0 to vertex 1.
    """
    L.validate(X)
    k = c.k
    if k <= 0:
        return boundary_chain(c, X)
    out = {}
    for cell, v in c.coeffs.items():
        if not X.has_cell((k, cell)):
            raise StructuralError(f"unknown cell ({k},{cell})")
        for j, f in enumerate(X.cells[k][cell]):
            s = 1 if j % 2 == 0 else -1
            if j == 0:
                s *= L[leading_edge(X, k, cell)]
            out[f] = out.get(f, 0) + s * v
    return Chain(k - 1, out, c.ring)


def boundary_matrix(X: DeltaComplex, k, cocycle=None):
    """Integer matrix of the boundary C_k -> C_{k-1} (rows are (k-1)-cells)."""
    rows = X.count(k - 1) if k >= 1 else 0
    mat = [[0] * X.count(k) for _ in range(rows)]
    if k < 1:
        return mat
    for i, fs in enumerate(X.cells[k] if k < len(X.cells) else ()):
        for j, f in enumerate(fs):
            s = 1 if j % 2 == 0 else -1
            if j == 0 and cocycle is not None:
                s *= cocycle[leading_edge(X, k, i)]
            mat[f][i] += s
    return mat


# ---------------------------------------------------------------------------
# homology

@dataclass
class AbelianGroupPresentation:
    """Z^rank + sum Z/d_i; ``witnesses`` are cycles for free then torsion generators."""

    rank: int
    torsion: tuple = ()
    witnesses: list = field(default_factory=list)
    ring: str = "Z"
    _coords: list = field(default=None, repr=False)

    def __post_init__(self):
        self.torsion = tuple(self.torsion)
        for d in self.torsion:
            if d <= 1:
                raise StructuralError(f"invariant factor {d} must exceed 1")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise StructuralError(f"invariant factors {a}, {b} do not divide")

    def is_zero(self):
        return self.rank == 0 and not self.torsion

    def describe(self):
        base = {"Z": "Z", "Q": "Q", "Z2": "Z2"}[self.ring]
        parts = []
        if self.rank:
            parts.append(base if self.rank == 1 else f"{base}^{self.rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) or "0"

    def to_json(self):
        return {"ring": self.ring, "rank": self.rank, "torsion": list(self.torsion),
                "group": self.describe(), "witnesses": [w.to_json() for w in self.witnesses]}


def _kept(X: DeltaComplex, k, deleted):
    return [i for i in range(X.count(k)) if (k, i) not in deleted]


def _restricted(X, k, cocycle, deleted):
    """Boundary matrix C_k -> C_{k-1} of the pair (X, deleted), on kept cells."""
    full = boundary_matrix(X, k, cocycle)
    rows = _kept(X, k - 1, deleted) if k >= 1 else []
    cols = _kept(X, k, deleted)
    return [[full[r][c] for c in cols] for r in rows], cols


def homology_groups(X: DeltaComplex, ring="Z", k=0, cocycle=None, deleted=()) -> AbelianGroupPresentation:
    """H_k of the cellular chain complex of the pair (X, deleted).

    ``deleted`` is a closed set of cells removed from the space; with it the
    result is the Borel-Moore homology of the complement.  A +-1 cocycle
    twists the coefficients.
    """
    rings.check_ring(ring)
    deleted = set(deleted)
    if cocycle is not None:
        cocycle.validate(X)
    if k < 0 or k > X.dim:
        return AbelianGroupPresentation(0, (), [], ring, None)
    A, cols = _restricted(X, k, cocycle, deleted)
    B, _ = _restricted(X, k + 1, cocycle, deleted)
    nk = len(cols)
    if ring == "Z":
        pres = _homology_z(A, B, nk, k)
    else:
        pres = _homology_field(A, B, nk, k, ring, len(_kept(X, k + 1, deleted)))
    pres.witnesses = [Chain(k, {cols[i]: v for i, v in w.coeffs.items()}, ring) for w in pres.witnesses]
    if pres._coords is not None:
        pres._coords = (cols,) + tuple(pres._coords)
    return pres


def _homology_field(A, B, nk, k, ring, n1):
    p = 2 if ring == "Z2" else None
    kernel = linalg.nullspace(A, nk, p) if A else linalg.nullspace([], nk, p)
    image_cols = linalg.transpose(B, n1) if B else []
    basis_rows = []
    current = 0
    for col in image_cols:
        if linalg.rank(basis_rows + [col], p) > current:
            basis_rows.append(col)
            current += 1
    image_basis = list(basis_rows)
    witnesses = []
    for v in kernel:
        if linalg.rank(basis_rows + [v], p) > current:
            basis_rows.append(v)
            witnesses.append(v)
            current += 1
    pres = AbelianGroupPresentation(len(witnesses), (), [
        Chain(k, dict(enumerate(w)), ring) for w in witnesses], ring)
    pres._coords = ("field", p, image_basis, witnesses, nk)
    return pres


def _homology_z(A, B, nk, k):
    if A:
        _, DA, VA, _, VinvA = _snf(A)
        r = sum(1 for i in range(min(len(DA), nk)) if DA[i][i])
        K = [[VA[row][c] for c in range(r, nk)] for row in range(nk)]
    else:
        VinvA = linalg.identity(nk)
        K = linalg.identity(nk)
        r = 0
    # kernel basis: columns r.. of V; coordinates of a cycle: rows r.. of Vinv
    P = VinvA[r:]
    z = nk - r
    if z == 0:
        return AbelianGroupPresentation(0, (), [], "Z", None)
    if B and B[0]:
        C = linalg.matmul(P, B)
        U2, D2, _, U2inv, _ = _snf(C)
        diag = [D2[i][i] if i < len(D2[0]) else 0 for i in range(z)]
    else:
        U2, U2inv = linalg.identity(z), linalg.identity(z)
        diag = [0] * z
    newK = linalg.matmul(K, U2inv)  # columns are the new generators
    coord = linalg.matmul(U2, P)    # chain vector -> coordinates in the new basis
    free = [i for i in range(z) if diag[i] == 0]
    tors = [i for i in range(z) if diag[i] > 1]
    order = free + tors
    witnesses = [Chain(k, {row: newK[row][i] for row in range(nk)}, "Z") for i in order]
    pres = AbelianGroupPresentation(len(free), tuple(diag[i] for i in tors), witnesses, "Z")
    pres._coords = ("z", [coord[i] for i in order], [diag[i] for i in order])
    return pres


def class_coordinates(pres: AbelianGroupPresentation, c: Chain):
    """Coordinates of the class of cycle ``c`` against ``pres.witnesses``.

    Free coordinates are exact; torsion coordinates are reduced mod their order.
    """
    if not pres.witnesses or pres._coords is None:
        return []
    cols, kind = pres._coords[0], pres._coords[1]
    v = [c[i] for i in cols]
    if kind == "z":
        _, _, rows, mods = pres._coords
        out = []
        for row, d in zip(rows, mods):
            x = sum(a * b for a, b in zip(row, v))
            out.append(x % d if d else x)
        return out
    _, _, p, image_basis, witnesses, nk = pres._coords
    basis = image_basis + witnesses
    M = linalg.transpose(basis, 0) if basis else [[] for _ in range(nk)]
    sol = linalg.solve(M, v, p)
    if sol is None:
        raise PreconditionError("chain is not a cycle in this presentation")
    return [rings.coerce(x, pres.ring) for x in sol[len(image_basis):]]


def relative_boundary(c: Chain, X: DeltaComplex, cocycle=None, deleted=()):
    b = twisted_boundary(c, X, cocycle) if cocycle is not None else boundary_chain(c, X)
    if deleted:
        b = Chain(b.k, {i: v for i, v in b.coeffs.items() if (b.k, i) not in deleted}, b.ring)
    return b


def is_cycle(c: Chain, X: DeltaComplex, cocycle=None, deleted=()):
    return relative_boundary(c, X, cocycle, deleted).is_zero()


def is_boundary(c: Chain, X: DeltaComplex, cocycle=None, deleted=()):
    """(True, b) with boundary(b) = c, or (False, None).  ``c`` must be a cycle."""
    deleted = set(deleted)
    if not is_cycle(c, X, cocycle, deleted):
        raise PreconditionError("chain is not a cycle")
    k = c.k
    if c.is_zero():
        return True, Chain(k + 1, {}, c.ring)
    B, cols = _restricted(X, k + 1, cocycle, deleted)
    if not cols:
        return False, None
    rows = _kept(X, k, deleted)
    b = [c[i] for i in rows]
    if c.ring == "Z":
        sol = int_solve(B, b)
    else:
        sol = linalg.solve(B, b, 2 if c.ring == "Z2" else None)
    if sol is None:
        return False, None
    return True, Chain(k + 1, {cols[i]: v for i, v in enumerate(sol)}, c.ring)


def betti_numbers(X: DeltaComplex, ring="Q"):
    return [homology_groups(X, ring, k).rank for k in range(X.dim + 1)]
