"""Small exact linear algebra over Q (Fraction) and Z2 (ints mod 2).

Matrices are lists of rows.  ``p=None`` means Q, ``p=2`` means Z2.
"""

from fractions import Fraction
from itertools import combinations


def _norm(x, p):
    return x % p if p else Fraction(x)


def _inv(x, p):
    if p:
        return pow(x, -1, p)
    return 1 / x


def rref(rows, p=None):
    """Reduced row echelon form; returns (matrix, pivot columns)."""
    m = [[_norm(x, p) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = _inv(m[r][c], p)
        m[r] = [_norm(x * inv, p) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                t = m[i][c]
                m[i] = [_norm(a - t * b, p) for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows, p=None):
    return len(rref(rows, p)[1])


def nullspace(rows, ncols=None, p=None):
    """Basis of {x : M x = 0}."""
    if not rows:
        n = ncols or 0
        return [[_norm(int(i == j), p) for j in range(n)] for i in range(n)]
    n = len(rows[0])
    m, pivots = rref(rows, p)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [_norm(0, p)] * n
        v[f] = _norm(1, p)
        for r, pc in enumerate(pivots):
            v[pc] = _norm(-m[r][f], p)
        basis.append(v)
    return basis


def solve(rows, b, p=None):
    """One solution x of M x = b, or None."""
    if not rows:
        return [] if all(_norm(x, p) == 0 for x in b) else None
    n = len(rows[0])
    aug = [list(r) + [bb] for r, bb in zip(rows, b)]
    m, pivots = rref(aug, p)
    if n in pivots:
        return None
    x = [_norm(0, p)] * n
    for r, pc in enumerate(pivots):
        x[pc] = m[r][n]
    return x


def det(rows):
    """Exact determinant over Q."""
    m = [[Fraction(x) for x in r] for r in rows]
    n = len(m)
    d = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            d = -d
        d *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                t = m[i][c] / m[c][c]
                m[i] = [a - t * b for a, b in zip(m[i], m[c])]
    return d


def sign(x):
    return (x > 0) - (x < 0)


def matmul(a, b):
    if not a:
        return []
    cols = list(zip(*b)) if b else []
    return [[sum(x * y for x, y in zip(r, c)) for c in cols] for r in a]


def transpose(a, ncols=0):
    if not a:
        return [[] for _ in range(ncols)]
    return [list(c) for c in zip(*a)]


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def in_convex_hull(points, target=None):
    """Exact test whether ``target`` (default origin) lies in conv(points).

    Uses Caratheodory: it suffices to try affinely independent subsets of
    size at most dim + 1.
    """

    if not points:
        return False
    dim = len(points[0])
    if target is None:
        target = (0,) * dim
    pts = [tuple(Fraction(a) - Fraction(t) for a, t in zip(p, target)) for p in points]
    pts = sorted(set(pts))
    for size in range(1, min(dim + 1, len(pts)) + 1):
        for sub in combinations(pts, size):
            # solve sum a_i p_i = 0, sum a_i = 1
            rows = [[p[d] for p in sub] for d in range(dim)] + [[1] * size]
            rhs = [0] * dim + [1]
            if rank([[p[d] - sub[0][d] for d in range(dim)] for p in sub[1:]]) != size - 1:
                continue
            x = solve(rows, rhs)
            if x is not None and all(a >= 0 for a in x):
                return True
    return False
