from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from smanifolds import corpus
from smanifolds.complex import simplicial_complex
from smanifolds.corners import check_corner_orientation, validate_corners
from smanifolds.fibre_product import (NonGenericError, OrientationRefused, PLMap, abstract_fibre_product,
                                      boundary_decomposition_report, check_transverse, classify_case,
                                      compact_euler, corner_fibre_product, corner_product,
                                      geometric_product, iterated_count_report, level_set, mediating_map,
                                      orient_fibre_product, staircases)
from smanifolds.homology import homology_groups
from smanifolds.maps import CellMap, StratifiedMap
from smanifolds.rings import StructuralError
from smanifolds.smanifold import SManifold, validate_smanifold


@pytest.mark.parametrize("triple,dims,case", [
    ((2, 2, 2), (2, 2, 2), "i"),
    ((1, 2, 2), (2, 2, 2), "ii"),
    ((2, 1, 2), (2, 2, 2), "iii"),
    ((1, 1, 1), (2, 2, 2), "iv"),
    ((0, 0, 2), (2, 2, 2), "v"),
    ((1, 1, 2), (2, 2, 2), "v"),
    ((2, 2, 1), (2, 2, 2), None),
    ((0, 1, 1), (1, 1, 1), "ii"),
    ((0, 0, 0), (1, 1, 1), "iv"),
    ((1, 1, 0), (1, 1, 1), None),
])
def test_classify_case(triple, dims, case):
    assert classify_case(*triple, *dims) == case


def test_constant_maps_are_not_transverse():
    I = corpus.interval_corner().model.base
    g = PLMap(I, {0: (0,), 1: (0,)}, 1)
    v = check_transverse(g, g)
    assert not v.transverse and v.failures
    assert all("rank" in f for f in v.failures)
    with pytest.raises(StructuralError):
        abstract_fibre_product(g, g)


@pytest.mark.parametrize("p,q,count", [(0, 3, 1), (1, 1, 2), (2, 1, 3), (2, 2, 6), (3, 2, 10)])
def test_staircase_count(p, q, count):
    # maximal chains in a p x q grid: binomial(p + q, p)
    assert len([s for s in staircases(p, q) if len(s) == p + q + 1]) == count


def test_square_of_interval():
    I = corpus.interval_corner().model.base
    P = geometric_product(I, I)
    assert P.S.complex.counts() == (4, 5, 2)
    assert validate_smanifold(P.S).ok
    assert len(P.S.strata) == 9


@pytest.mark.parametrize("name", ["tetrahedron_boundary", "circle", "cross"])
def test_products_multiply_euler_and_betti(name):
    X = corpus.BUILDERS[name]().model
    I = corpus.interval_corner().model.base
    P = geometric_product(X, I)
    assert validate_smanifold(P.S).ok
    assert compact_euler(P.S) == compact_euler(X) * compact_euler(I)
    # the interval is contractible, so Betti numbers are those of X
    got = [homology_groups(P.S.complex, "Q", k).rank for k in range(P.S.complex.dim + 1)]
    want = [homology_groups(X.complex, "Q", k).rank for k in range(X.complex.dim + 1)]
    assert got == want + [0] * (len(got) - len(want))


def test_product_of_circles_is_torus():
    C = corpus.circle().model
    P = geometric_product(C, C)
    assert [homology_groups(P.S.complex, "Z", k).describe() for k in range(3)] == ["Z", "Z^2", "Z"]


def _triangle():
    X, _ = simplicial_complex([(0, 1, 2)], coords=[(0, 0), (1, 0), (0, 1)])
    return SManifold(X, 2, [list(X.all_cells())])


def test_level_set_on_triangle():
    S = _triangle()
    L = level_set(S, {0: (0,), 1: (1,), 2: (0,)}, (Fraction(1, 2),))
    assert L.W.n == 1 and L.W.complex.counts() == (2, 1)
    assert sorted(L.points) == [(Fraction(1, 2), 0), (Fraction(1, 2), Fraction(1, 2))]


@pytest.mark.parametrize("z", [0, 1])
def test_level_through_vertex_is_non_generic(z):
    with pytest.raises(NonGenericError):
        level_set(_triangle(), {0: (0,), 1: (1,), 2: (0,)}, (z,))


@given(st.fractions(Fraction(1, 100), Fraction(99, 100)))
@settings(max_examples=30, deadline=None)
def test_level_sets_are_segments(z):
    L = level_set(_triangle(), {0: (0,), 1: (1,), 2: (0,)}, (z,))
    assert sorted(p[0] for p in L.points) == [z, z]


def test_orientation_refused_without_geometry():
    S = corpus.circle().model
    idm = StratifiedMap(S, S, CellMap.identity(S.complex))
    res = abstract_fibre_product(idm, idm)
    cert = corpus.circle().certs.get("orientation")
    with pytest.raises(OrientationRefused):
        orient_fibre_product(res, cert, cert)


@pytest.mark.parametrize("name", corpus.AFFINE_CASES)
def test_affine_corner_fibre_products(name):
    MX, g, cx, MY, h, cy = corpus.affine_case(name).model
    cfp = corner_fibre_product(MX, g, MY, h)
    assert validate_corners(cfp.M).ok
    assert cfp.M.n == MX.n + MY.n - g.n
    cert = orient_fibre_product(cfp.fp, cx, cy)
    assert check_corner_orientation(cfp.M, [cert]).ok
    assert boundary_decomposition_report(cfp, MX, g, MY, h)["ok"]


@pytest.mark.parametrize("name,lhs", [
    ("interval_corner", [1, 4, 8]),
    ("halfline", [0, 1, 4]),
    ("quadrant", [0, 0, 2, 12]),
    ("square_corner", [1, 6, 24, 48]),
])
def test_corner_products_with_interval(name, lhs):
    A = corpus.BUILDERS[name]().model
    I = corpus.interval_corner().model
    W = corner_product(A, I).M
    assert validate_corners(W).ok and W.n == A.n + 1
    reports = [iterated_count_report(A, I, c) for c in range(W.n + 1)]
    assert all(r["ok"] for r in reports)
    assert [r["lhs"] for r in reports] == lhs


def test_corner_product_needs_realization():
    with pytest.raises(StructuralError):
        corner_product(corpus.teardrop().model, corpus.interval_corner().model)


def test_mediating_map_errors():
    S = corpus.circle().model
    idm = StratifiedMap(S, S, CellMap.identity(S.complex))
    res = abstract_fibre_product(idm, idm)
    e2 = CellMap.identity(S.complex)
    b = mediating_map(res, e2, e2)
    assert not b.violations() and b.compose(res.e).images == e2.images
    rot = CellMap.from_vertices(S.complex, S.complex, {v: (v + 1) % S.complex.count(0)
                                                       for v in range(S.complex.count(0))})
    with pytest.raises(StructuralError, match="does not commute"):
        mediating_map(res, e2, rot)
