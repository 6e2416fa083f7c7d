"""Corpus fixtures: the worked examples as concrete finite models with manifests.

Each builder returns a ``CorpusEntry`` holding the model, any certificates,
and a manifest of expected invariants tagged PAPER / TRIVIAL / DERIVED.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .complex import DeltaComplex, simplicial_complex as simplicial
from .corners import FiberPoset, SManifoldC, corner_lift
from .maps import CellMap
from .rings import StructuralError
from .smanifold import OrientationCert, SManifold


@dataclass
class CorpusEntry:
    name: str
    kind: str                       # smanifold | corners | morphism | poset | ...
    model: object
    params: dict = field(default_factory=dict)
    certs: dict = field(default_factory=dict)
    manifest: list = field(default_factory=list)   # (key, expected, tag)
    extra: dict = field(default_factory=dict)

    def expect(self, key, value, tag):
        self.manifest.append((key, value, tag))
        return self


def _cells(index, *simplices):
    return [index[tuple(s)] for s in simplices]


# ---------------------------------------------------------------------------
# s-manifolds

def tetrahedron_boundary():
    X, idx = simplicial([(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)],
                        coords=[(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
    S = SManifold(X, 2, [list(idx.values())])
    # the alternating-sign sphere orientation: sign of face j of the 3-simplex is (-1)^j
    signs = {idx[(1, 2, 3)][1]: 1, idx[(0, 2, 3)][1]: -1, idx[(0, 1, 3)][1]: 1, idx[(0, 1, 2)][1]: -1}
    e = CorpusEntry("tetrahedron_boundary", "smanifold", S, certs={"orientation": OrientationCert(signs)})
    e.expect("homology_Z", [[1, []], [0, []], [1, []]], "TRIVIAL")
    e.expect("orientation", True, "TRIVIAL")
    e.expect("z2class", True, "TRIVIAL")
    return e


def circle(edges=3):
    if edges < 1:
        raise StructuralError("a circle needs at least one edge")
    cells = [[() for _ in range(edges)], [((i + 1) % edges, i) for i in range(edges)]]
    S = SManifold(DeltaComplex(cells), 1, [[(0, i) for i in range(edges)] + [(1, i) for i in range(edges)]])
    e = CorpusEntry("circle", "smanifold", S, {"edges": edges},
                    certs={"orientation": OrientationCert({i: 1 for i in range(edges)})})
    e.expect("homology_Z", [[1, []], [1, []]], "TRIVIAL")
    e.expect("orientation", True, "TRIVIAL")
    return e


def _hawaiian_complex(m, with_interval):
    """Wedge of m circles at vertex 0; circle k uses max(3, k) edges.

    With ``with_interval`` an extra vertex p (last id) and edge p -> 0 model
    the segment [-1, 0] x {0}.
    """
    if m < 1:
        raise StructuralError("m must be >= 1")
    nverts = 1
    edges, circles = [], []
    for k in range(1, m + 1):
        r = max(3, k)
        vs = [0] + list(range(nverts, nverts + r - 1))
        nverts += r - 1
        ids = []
        for t in range(r):
            a, b = vs[t], vs[(t + 1) % r]
            ids.append(len(edges))
            edges.append((b, a))
        circles.append((vs, ids))
    p = None
    if with_interval:
        p = nverts
        nverts += 1
        edges.append((0, p))
    X = DeltaComplex([[() for _ in range(nverts)], edges])
    special = [(0, 0)] + ([(0, p)] if p is not None else [])
    open_part = [c for c in X.all_cells() if c not in special]
    S = SManifold(X, 1, [open_part, special], [1, 0])
    return S, circles, p


def hawaiian(m=3):
    """Truncated wedge of m circles (two strata: wedge point and the rest)."""
    S, circles, _ = _hawaiian_complex(m, False)
    signs = {i: 1 for i in range(S.complex.count(1))}
    e = CorpusEntry("hawaiian", "smanifold", S, {"m": m},
                    certs={"orientation": OrientationCert(signs)}, extra={"circles": circles})
    e.expect("homology_Z", [[1, []], [m, []]], "DERIVED")
    e.expect("orientation", True, "PAPER")
    e.expect("fundamental_class", [1] * m, "PAPER")
    return e


def hawaiian_interval(m=3):
    """Wedge of m circles plus the segment [-1, 0]; not locally orientable."""
    S, circles, p = _hawaiian_complex(m, True)
    e = CorpusEntry("hawaiian_interval", "smanifold", S, {"m": m}, extra={"circles": circles, "endpoint": p})
    e.expect("z2class", False, "PAPER")
    e.expect("z2_defect_cells", [0, p], "PAPER")
    e.expect("homology_Z", [[1, []], [m, []]], "DERIVED")
    return e


def cross():
    """Four open edges meeting at v; the far endpoints are removed."""
    coords = [(0, 0), (0, 1), (1, 0), (0, -1), (-1, 0)]
    edges = [(1, 0), (0, 2), (3, 0), (0, 4)]        # a: v->1, b: 2->v, c: v->3, d: 4->v
    X = DeltaComplex([[() for _ in range(5)], edges], labels={(1, 0): "a", (1, 1): "b", (1, 2): "c", (1, 3): "d", (0, 0): "v"},
                     coords=coords)
    S = SManifold(X, 1, [[(1, 0)], [(1, 1)], [(1, 2)], [(1, 3)], [(0, 0)]], deleted=[(0, i) for i in range(1, 5)])
    e = CorpusEntry("cross", "smanifold", S, certs={"orientation": OrientationCert({i: 1 for i in range(4)})})
    e.expect("codim_X1", [[0, 0]], "PAPER")
    e.expect("z2class", True, "DERIVED")
    e.expect("orientation", True, "DERIVED")
    return e


def cross_part(which):
    """The sub-s-manifolds {a, b, v} (``"X"``) and {b, c, v} (``"Y"``) of the cross, with inclusions."""
    Z = cross().model
    keep = {"X": [0, 1], "Y": [1, 2]}[which]
    ends = [{0: 1, 1: 2, 2: 3, 3: 4}[e] for e in keep]
    vmap = [0] + ends
    inv = {v: i for i, v in enumerate(vmap)}
    edges = [tuple(inv[v] for v in Z.complex.cells[1][e]) for e in keep]
    coords = [Z.complex.realization.point(v) for v in vmap]
    X = DeltaComplex([[() for _ in vmap], edges], coords=coords)
    S = SManifold(X, 1, [[(1, 0)], [(1, 1)], [(0, 0)]], deleted=[(0, 1), (0, 2)])
    table = {(0, i): v for i, v in enumerate(vmap)}
    table.update({(1, i): e for i, e in enumerate(keep)})
    return S, CellMap.nondegenerate(X, Z.complex, table)


def weighted_cross(w1=Fraction(1, 2)):
    """Three open edges at v: one in (weight 5/6), two out (weights w1 and 1/3)."""
    coords = [(0, 0), (-1, 0), (1, 0), (0, 1)]
    X = DeltaComplex([[() for _ in range(4)], [(0, 1), (2, 0), (3, 0)]], coords=coords)
    S = SManifold(X, 1, [[(1, 0)], [(1, 1)], [(1, 2)], [(0, 0)]], deleted=[(0, 1), (0, 2), (0, 3)])
    w1 = Fraction(w1)
    cert = OrientationCert({0: 1, 1: 1, 2: 1}, {0: Fraction(5, 6), 1: w1, 2: Fraction(1, 3)}, "Q")
    e = CorpusEntry("weighted_cross", "smanifold", S, {"w1": str(w1)}, certs={"orientation": cert})
    defect = Fraction(5, 6) - w1 - Fraction(1, 3)
    e.expect("orientation", defect == 0, "PAPER" if w1 == Fraction(1, 2) else "DERIVED")
    e.expect("defect_at_v", str(defect), "DERIVED")
    return e


# ---------------------------------------------------------------------------
# corner models

def _copy_c0(S):
    return S, {c: c[1] for c in S.complex.all_cells()}


def halfline():
    """[0, inf) modelled as the edge [0, 1] with the far vertex removed; C_1 is the point 0."""
    X = DeltaComplex([[(), ()], [(1, 0)]], coords=[(0,), (1,)])
    S = SManifold(X, 1, [[(1, 0)], [(0, 0)]], deleted=[(0, 1)])
    C0, p0 = _copy_c0(S)
    C1 = SManifold(DeltaComplex([[()]]), 0, [[(0, 0)]])
    M = SManifoldC(S, [C0, C1], [p0, {(0, 0): 0}], {(0, 1): [(1, 0)]})
    e = CorpusEntry("halfline", "corners", M)
    e.expect("valid", True, "TRIVIAL")
    e.expect("simplicial", True, "PAPER")
    return e


def quadrant():
    """[0, inf)^2 modelled as the unit square with the far edges removed."""
    coords = [(0, 0), (1, 0), (0, 1), (1, 1)]
    X, idx = simplicial([(0, 1, 3), (0, 2, 3)], coords=coords)
    deleted = _cells(idx, (1,), (2,), (3,), (1, 3), (2, 3))
    interior = _cells(idx, (0, 1, 3), (0, 2, 3), (0, 3))
    S = SManifold(X, 2, [interior, _cells(idx, (0, 1)), _cells(idx, (0, 2)), _cells(idx, (0,))], deleted=deleted)
    C0, p0 = _copy_c0(S)
    # C_1: the two closed axes, each an edge with its far end removed
    C1 = SManifold(DeltaComplex([[()] * 4, [(1, 0), (3, 2)]]), 1,
                   [[(1, 0)], [(1, 1)], [(0, 0)], [(0, 2)]], deleted=[(0, 1), (0, 3)])
    p1 = {(0, 0): 0, (0, 1): 1, (0, 2): 0, (0, 3): 2, (1, 0): idx[(0, 1)][1], (1, 1): idx[(0, 2)][1]}
    C2 = SManifold(DeltaComplex([[()]]), 0, [[(0, 0)]])
    D = {(0, 1): [(1, 0), (2, 1), (3, 2), (3, 3)], (0, 2): [(3, 0)], (1, 2): [(2, 0), (3, 0)]}
    M = SManifoldC(S, [C0, C1, C2], [p0, p1, {(0, 0): 0}], D)
    e = CorpusEntry("quadrant", "corners", M, extra={"index": idx})
    e.expect("valid", True, "TRIVIAL")
    e.expect("simplicial", True, "TRIVIAL")
    e.expect("fiber_levels_at_corner", [1, 2, 1], "TRIVIAL")
    return e


def interval_corner():
    """[0, 1] with both endpoints as boundary."""
    X = DeltaComplex([[(), ()], [(1, 0)]], coords=[(0,), (1,)])
    S = SManifold(X, 1, [[(1, 0)], [(0, 0)], [(0, 1)]])
    C0, p0 = _copy_c0(S)
    C1 = SManifold(DeltaComplex([[(), ()]]), 0, [[(0, 0)], [(0, 1)]])
    M = SManifoldC(S, [C0, C1], [p0, {(0, 0): 0, (0, 1): 1}], {(0, 1): [(1, 0), (2, 1)]})
    cert = OrientationCert({0: 1})
    e = CorpusEntry("interval_corner", "corners", M, certs={"orientation": cert})
    e.expect("valid", True, "TRIVIAL")
    e.expect("boundary_points", 2, "TRIVIAL")
    e.expect("corner_orientation", True, "TRIVIAL")
    e.expect("boundary_count", 0, "PAPER")
    return e


def teardrop():
    """Disc with one convex corner v: boundary arcs a, b both run v -> u."""
    # vertices v=0, u=1, c=2; edges a=0, b=1 (v->u), vc=2, uc=3; triangles (v,u,c) via a and via b
    cells = [[(), (), ()], [(1, 0), (1, 0), (2, 0), (2, 1)], [(3, 2, 0), (3, 2, 1)]]
    X = DeltaComplex(cells, labels={(0, 0): "v", (0, 1): "u", (1, 0): "a", (1, 1): "b"})
    disc = [(2, 0), (2, 1), (1, 2), (1, 3), (0, 2)]
    S = SManifold(X, 2, [disc, [(1, 0), (1, 1), (0, 1)], [(0, 0)]])
    C0, p0 = _copy_c0(S)
    # C_1: interval p0 -a'-> q <-b'- p1 over v, u, v
    C1 = SManifold(DeltaComplex([[(), (), ()], [(1, 0), (1, 2)]]), 1,
                   [[(1, 0), (0, 1), (1, 1)], [(0, 0)], [(0, 2)]])
    p1 = {(0, 0): 0, (0, 1): 1, (0, 2): 0, (1, 0): 0, (1, 1): 1}
    C2 = SManifold(DeltaComplex([[()]]), 0, [[(0, 0)]])
    D = {(0, 1): [(1, 0), (2, 1), (2, 2)], (0, 2): [(2, 0)], (1, 2): [(1, 0), (2, 0)]}
    M = SManifoldC(S, [C0, C1, C2], [p0, p1, {(0, 0): 0}], D)
    e = CorpusEntry("teardrop", "corners", M)
    e.expect("valid", True, "PAPER")
    e.expect("simplicial", True, "DERIVED")
    e.expect("boundary_connected", True, "PAPER")
    e.expect("C2_fiber_at_v", 1, "PAPER")
    e.expect("boundary2_fiber_at_v", 2, "PAPER")
    e.expect("strata", {"S0": [[0, 2], [1, 2], [1, 3], [2, 0], [2, 1]],
                        "S1": [[0, 1], [1, 0], [1, 1]], "S2": [[0, 0]]}, "DERIVED")
    return e


def hawaiian_corner(m=3):
    """Wedge of m circles with the wedge point declared as boundary; admits no orientation."""
    S = hawaiian(m).model
    C0, p0 = _copy_c0(S)
    C1 = SManifold(DeltaComplex([[()]]), 0, [[(0, 0)]])
    M = SManifoldC(S, [C0, C1], [p0, {(0, 0): 0}], {(0, 1): [(1, 0)]})
    e = CorpusEntry("hawaiian_corner", "corners", M, {"m": m})
    e.expect("valid", True, "PAPER")
    e.expect("corner_orientation", False, "PAPER")
    return e


def hawaiian_interval_corner(m=3):
    """The wedge-plus-segment with both special points as boundary; orientable with boundary."""
    entry = hawaiian_interval(m)
    S, p = entry.model, entry.extra["endpoint"]
    C0, p0 = _copy_c0(S)
    C1 = SManifold(DeltaComplex([[(), ()]]), 0, [[(0, 0), (0, 1)]])
    M = SManifoldC(S, [C0, C1], [p0, {(0, 0): p, (0, 1): 0}], {(0, 1): [(1, 0)]})
    signs = {i: 1 for i in range(S.complex.count(1))}
    e = CorpusEntry("hawaiian_interval_corner", "corners", M, {"m": m},
                    certs={"orientation": OrientationCert(signs)}, extra={"endpoint": p})
    e.expect("valid", True, "PAPER")
    e.expect("z2class", False, "PAPER")
    e.expect("corner_orientation", True, "PAPER")
    e.expect("boundary_signs", {"endpoint": -1, "wedge": 1}, "PAPER")
    e.expect("boundary_count", 0, "PAPER")
    return e


def pyramid_poset():
    """Corner poset at the apex of the infinite square pyramid (levels 1, 4, 4, 1)."""
    elems = [(0, "int")] + [(1, f"F{i}") for i in range(4)] + [(2, f"E{i}") for i in range(4)] + [(3, "apex")]
    # face F_i contains edges E_i and E_{i+1}
    pairs = set()
    for a in elems[1:]:
        pairs.add((elems[0], a))
    for i in range(4):
        pairs.add(((1, f"F{i}"), (2, f"E{i}")))
        pairs.add(((1, f"F{i}"), (2, f"E{(i + 1) % 4}")))
    for a in elems[:-1]:
        pairs.add((a, elems[-1]))
    P = FiberPoset.from_relation(elems, pairs)
    e = CorpusEntry("pyramid_poset", "poset", P)
    e.expect("levels", [1, 4, 4, 1], "PAPER")
    e.expect("simplicial", False, "PAPER")
    e.expect("count_identities", False, "PAPER")
    return e


# ---------------------------------------------------------------------------
# morphisms

def diag_map():
    """x -> (x, x) from [0, inf) to [0, inf)^2."""
    X = halfline().model
    Y = quadrant().model
    f = CellMap.from_vertices(X.base.complex, Y.base.complex, {0: 0, 1: 3})
    phi = corner_lift(X, Y, f)
    e = CorpusEntry("diag_map", "morphism", phi)
    e.expect("levels", {"1->": 2}, "PAPER")
    e.expect("interior", True, "PAPER")
    return e


def zero_inclusion():
    """The point mapped to 0 in [0, inf)."""
    pt = SManifold(DeltaComplex([[()]]), 0, [[(0, 0)]])
    X = SManifoldC.without_boundary(pt)
    Y = halfline().model
    f = CellMap.nondegenerate(pt.complex, Y.base.complex, {(0, 0): 0})
    phi = corner_lift(X, Y, f)
    e = CorpusEntry("zero_inclusion", "morphism", phi)
    e.expect("levels", {"0->": 1}, "PAPER")
    e.expect("interior", False, "PAPER")
    return e


def quadrant_projection():
    """(x, y) -> x from [0, inf)^2 to [0, inf)."""
    X = quadrant().model
    Y = halfline().model
    f = CellMap.from_vertices(X.base.complex, Y.base.complex, {0: 0, 1: 1, 2: 0, 3: 1})
    phi = corner_lift(X, Y, f)
    e = CorpusEntry("quadrant_projection", "morphism", phi)
    e.expect("interior", True, "DERIVED")
    e.expect("bnormal", True, "DERIVED")
    return e


def identity(name="teardrop"):
    from .corners import identity_morphism
    M = BUILDERS[name]().model
    return CorpusEntry(f"identity_{name}", "morphism", identity_morphism(M))


# ---------------------------------------------------------------------------
# products, fibre products and imported cycles

def square_corner():
    """[0, 1]^2 as the corner product of two intervals."""
    from .fibre_product import corner_product
    MI = interval_corner().model
    M = corner_product(MI, MI).M
    e = CorpusEntry("square_corner", "corners", M)
    e.expect("valid", True, "TRIVIAL")
    e.expect("boundary2_points", 8, "PAPER")
    e.expect("middle_terms", 2, "PAPER")
    e.expect("simplicial", True, "TRIVIAL")
    return e


def cross_fibre_data():
    """The two branches {a, b, v} and {b, c, v} of the cross, included into it."""
    from .maps import StratifiedMap
    Z = cross().model
    X, gi = cross_part("X")
    Y, hi = cross_part("Y")
    e = CorpusEntry("cross_fibre", "fibre_product", (StratifiedMap(X, Z, gi), StratifiedMap(Y, Z, hi)))
    e.expect("transverse", True, "PAPER")
    e.expect("strongly_transverse", False, "PAPER")
    e.expect("strata_dims", [0, 1], "PAPER")
    e.expect("orient_refuses", True, "PAPER")
    return e


def _square_data():
    from .fibre_product import corner_product, orient_fibre_product
    MI = interval_corner().model
    cI = OrientationCert({0: 1})
    cp = corner_product(MI, MI)
    return cp.M, orient_fibre_product(cp.fp, cI, cI)


AFFINE_CASES = ("pt_I_I", "pt_I_Q", "line_I_I", "line_I_Q", "line_Q_I", "line_Q_Q", "plane_Q_Q")


def affine_case(name):
    """Oriented affine fibre-product data (MX, g, cert_x, MY, h, cert_y) over R^n; n = 0 is the point."""
    from .fibre_product import PLMap
    if name not in AFFINE_CASES:
        raise StructuralError(f"unknown affine case {name}")
    MI = interval_corner().model
    cI = OrientationCert({0: 1})
    MQ, cQ = _square_data()
    F = Fraction
    data = {
        "pt_I_I": (MI, cI, [], [], MI, cI, [], []),
        "pt_I_Q": (MI, cI, [], [], MQ, cQ, [], []),
        "line_I_I": (MI, cI, [[1]], [F(1, 3)], MI, cI, [[F(3, 2)]], [F(1, 5)]),
        "line_I_Q": (MI, cI, [[1]], [F(1, 3)], MQ, cQ, [[1, F(1, 2)]], [F(1, 5)]),
        "line_Q_I": (MQ, cQ, [[1, F(1, 2)]], [F(1, 5)], MI, cI, [[1]], [F(1, 3)]),
        "line_Q_Q": (MQ, cQ, [[1, F(1, 3)]], [F(1, 7)], MQ, cQ, [[F(1, 2), 1]], [F(2, 9)]),
        "plane_Q_Q": (MQ, cQ, [[1, F(1, 3)], [F(1, 4), 1]], [F(1, 7), F(1, 11)],
                      MQ, cQ, [[1, F(-1, 5)], [F(1, 6), F(2, 3)]], [F(2, 9), F(3, 13)]),
    }[name]
    MX, cx, A, a, MY, cy, B, b = data
    g = PLMap.affine(MX.base, A, a) if a else PLMap(MX.base, {v: () for v in range(MX.base.complex.count(0))}, 0)
    h = PLMap.affine(MY.base, B, b) if b else PLMap(MY.base, {v: () for v in range(MY.base.complex.count(0))}, 0)
    e = CorpusEntry(name, "affine_fibre_product", (MX, g, cx, MY, h, cy))
    l, m, n = MX.n, MY.n, g.n
    e.expect("swap_factor", (-1) ** ((l - n) * (m - n)), "PAPER")
    e.expect("boundary_factor_dY", (-1) ** (l - n), "PAPER")
    e.expect("tiers_agree", True, "DERIVED")
    return e


def tetrahedron_cycle_entry():
    from .importer import tetrahedron_cycle
    e = CorpusEntry("tetrahedron_cycle", "cycle", tetrahedron_cycle())
    e.expect("orientation", True, "DERIVED")
    e.expect("fundamental_class", [1], "DERIVED")
    return e


def triangle_chain_entry():
    from .importer import triangle_chain
    e = CorpusEntry("triangle_chain", "cycle", triangle_chain())
    e.expect("orientation", False, "TRIVIAL")
    e.expect("relative_corner_orientation", True, "TRIVIAL")
    return e


def pillow_cycle_entry():
    from .importer import pillow_cycle
    e = CorpusEntry("pillow_cycle", "cycle", pillow_cycle())
    e.expect("orientation", True, "DERIVED")
    e.expect("homology_Z_2", [1, []], "DERIVED")
    return e


BUILDERS = {
    "tetrahedron_boundary": tetrahedron_boundary,
    "circle": circle,
    "hawaiian": hawaiian,
    "hawaiian_interval": hawaiian_interval,
    "cross": cross,
    "weighted_cross": weighted_cross,
    "halfline": halfline,
    "quadrant": quadrant,
    "interval_corner": interval_corner,
    "teardrop": teardrop,
    "hawaiian_corner": hawaiian_corner,
    "hawaiian_interval_corner": hawaiian_interval_corner,
    "pyramid_poset": pyramid_poset,
    "diag_map": diag_map,
    "zero_inclusion": zero_inclusion,
    "quadrant_projection": quadrant_projection,
    "square_corner": square_corner,
    "cross_fibre": cross_fibre_data,
    "tetrahedron_cycle": tetrahedron_cycle_entry,
    "triangle_chain": triangle_chain_entry,
    "pillow_cycle": pillow_cycle_entry,
}
BUILDERS.update({name: (lambda name=name: affine_case(name)) for name in AFFINE_CASES})
