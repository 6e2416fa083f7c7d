from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from smanifolds import corpus
from smanifolds.complex import DeltaComplex, simplicial_complex
from smanifolds.homology import PreconditionError, Z2Cocycle, homology_groups
from smanifolds.rings import StructuralError
from smanifolds.smanifold import (OrientationCert, SManifold, check_orientation, check_orientation_bundle,
                                  check_z2_class, closure_poset, codim_filtration, find_orientation,
                                  fundamental_class, orientation_classes, validate_smanifold)

from test_homology import RP2, TORUS


def _closed_surface(facets):
    X, _ = simplicial_complex(facets)
    return SManifold(X, 2, [list(X.all_cells())])


def test_corpus_smanifolds_validate():
    for name, build in corpus.BUILDERS.items():
        e = build()
        if e.kind == "smanifold":
            r = validate_smanifold(e.model)
            assert r.ok, (name, r.violations)


def _violations(S):
    return " ".join(validate_smanifold(S).violations)


def test_validation_failures():
    X = corpus.circle().model.complex
    assert "lies in strata" in _violations(SManifold(X, 1, [list(X.all_cells()), [(0, 0)]]))
    assert "no stratum" in _violations(SManifold(X, 1, [[(1, 0), (1, 1), (1, 2)]]))
    assert "declared dimension" in _violations(SManifold(X, 1, [list(X.all_cells())], [0]))
    # a triangle stratum containing a vertex but not the edges through it
    T, _ = simplicial_complex([(0, 1, 2)])
    rest = [c for c in T.all_cells() if c not in {(2, 0), (0, 0)}]
    assert "not locally closed" in _violations(SManifold(T, 2, [[(2, 0), (0, 0)], rest]))
    # three triangles on one edge inside a single 2-dimensional stratum
    Y, _ = simplicial_complex([(0, 1, 2), (0, 1, 3), (0, 1, 4)])
    assert "incident 2-cell sides" in _violations(SManifold(Y, 2, [list(Y.all_cells())]))
    # deleted cells must be closed
    assert "closed subcomplex" in _violations(SManifold(X, 1, [[(0, 0), (0, 1), (0, 2), (1, 1), (1, 2)]],
                                                        deleted=[(1, 0)]))
    assert "dimension" in _violations(SManifold(X, 0, [list(X.all_cells())]))


def test_pinched_vertex_link():
    # two triangles sharing only a vertex: the link of that vertex is not a circle
    Y, _ = simplicial_complex([(0, 1, 2), (0, 3, 4)])
    S = SManifold(Y, 2, [list(Y.all_cells())])
    assert "link of vertex 0" in _violations(S)


def test_codim_filtration_of_cross():
    S = corpus.cross().model
    F = codim_filtration(S)
    assert F.X1 == {(0, 0)}
    assert F.X0 == {(1, i) for i in range(4)}
    assert F.X_ge2 == set()
    rel = closure_poset(S)
    assert all(rel[i][4] for i in range(4)) and not any(rel[4][i] for i in range(4))


def test_tetrahedron_orientation_and_class():
    e = corpus.tetrahedron_boundary()
    S, cert = e.model, e.certs["orientation"]
    assert check_orientation(S, cert).ok
    coords, P, cyc = fundamental_class(S, cert)
    assert (P.rank, [abs(x) for x in coords]) == (1, [1])
    c = next(iter(cert.signs))
    broken = OrientationCert({**cert.signs, c: -cert.signs[c]})
    v = check_orientation(S, broken)
    assert not v.ok and len(v.defect.coeffs) == 3
    assert all(abs(x) == 2 for x in v.defect.coeffs.values())
    with pytest.raises(PreconditionError):
        fundamental_class(S, broken)
    assert check_orientation(S, cert.flipped()).ok


def test_find_orientation():
    T = _closed_surface(TORUS)
    cert = find_orientation(T)
    assert cert is not None and check_orientation(T, cert).ok
    coords, P, _ = fundamental_class(T, cert)
    assert P.rank == 1 and [abs(x) for x in coords] == [1]
    P2 = _closed_surface(RP2)
    assert find_orientation(P2) is None
    assert orientation_classes(P2)[1]
    assert check_z2_class(P2).ok


def test_weighted_cross_exact_defect():
    for w1, expect in ((Fraction(1, 2), 0), (Fraction(1, 4), Fraction(1, 4)), (Fraction(2, 3), Fraction(1, 6))):
        e = corpus.weighted_cross(w1)
        v = check_orientation(e.model, e.certs["orientation"])
        assert v.ok == (expect == 0)
        assert abs(v.defect[0]) == expect


def test_hawaiian_interval_defects():
    e = corpus.hawaiian_interval(4)
    v = check_z2_class(e.model)
    assert sorted(v.defect.coeffs) == [0, e.extra["endpoint"]]


# twisted orientation of the projective plane: frozen cocycle found by search over all edge sign patterns
RP2_COCYCLE = {2: -1, 3: -1, 5: -1, 6: -1, 10: -1}
RP2_OMEGA = {0: 1, 1: -1, 2: -1, 3: 1, 4: 1, 5: 1, 6: -1, 7: -1, 8: 1, 9: 1}


def test_orientation_bundle_projective_plane():
    S = _closed_surface(RP2)
    L = Z2Cocycle(RP2_COCYCLE)
    assert not L.violations(S.complex)
    assert homology_groups(S.complex, "Z", 2).is_zero()
    assert homology_groups(S.complex, "Z", 2, cocycle=L).rank == 1
    cert = OrientationCert({c: 1 for c in range(10)}, {}, "Z", L, RP2_OMEGA)
    assert check_orientation_bundle(S, cert).ok
    bad = OrientationCert({c: 1 for c in range(10)}, {}, "Z", L, {**RP2_OMEGA, 0: -1})
    assert not check_orientation_bundle(S, bad).ok
    with pytest.raises(StructuralError):
        check_orientation_bundle(S, OrientationCert({c: 1 for c in range(10)}))
    with pytest.raises(StructuralError):
        check_orientation_bundle(S, OrientationCert({c: 1 for c in range(10)}, {}, "Z", L, {0: 1}))


def test_trivial_bundle_matches_plain():
    e = corpus.tetrahedron_boundary()
    cert = e.certs["orientation"]
    twisted = OrientationCert(cert.signs, {}, "Z", Z2Cocycle({}), {c: 1 for c in cert.signs})
    assert check_orientation_bundle(e.model, twisted).ok


def test_certificate_errors():
    with pytest.raises(StructuralError):
        OrientationCert({0: 2})
    S = corpus.circle().model
    with pytest.raises(StructuralError):
        check_orientation(S, OrientationCert({0: 1}))
    with pytest.raises(StructuralError):
        check_orientation(S, OrientationCert({0: 1, 1: -1, 2: 1}, {}, "Z2"))


@given(st.integers(1, 7), st.lists(st.sampled_from([1, -1]), min_size=7, max_size=7))
@settings(max_examples=60, deadline=None)
def test_circle_orientations(n, signs):
    S = corpus.circle(n).model
    cert = OrientationCert({i: signs[i] for i in range(n)})
    assert check_orientation(S, cert).ok == (len(set(signs[:n])) == 1)
    assert check_z2_class(S).ok


def test_open_edge_fundamental_class():
    # an open interval is orientable with deleted endpoints: relative class in H_1
    X = DeltaComplex([[(), ()], [(1, 0)]])
    S = SManifold(X, 1, [[(1, 0)]], deleted=[(0, 0), (0, 1)])
    coords, P, _ = fundamental_class(S, OrientationCert({0: 1}))
    assert P.rank == 1 and [abs(x) for x in coords] == [1]
