import pytest
from hypothesis import given, settings, strategies as st

from smanifolds.homology import homology_groups
from smanifolds.importer import (SingularCycleInput, import_cycle, import_relative_cycle, label_boundary,
                                 pillow_cycle, tetrahedron_cycle, triangle_chain)
from smanifolds.rings import StructuralError
from smanifolds.smanifold import fundamental_class


def test_pillow_is_a_sphere():
    # two triangles on the same labels stay distinct cells
    res = import_cycle(pillow_cycle())
    assert res.verdict and res.boundary_zero and res.agree
    assert res.S.complex.counts() == (3, 3, 2)
    assert homology_groups(res.S.complex, "Z", 2).rank == 1
    coords, P, _ = fundamental_class(res.S, res.cert)
    assert [abs(x) for x in coords] == [1]


def test_tetrahedron_cycle():
    res = import_cycle(tetrahedron_cycle())
    assert res.verdict and res.S.complex.counts() == (4, 6, 4)
    rel = import_relative_cycle(tetrahedron_cycle())
    assert rel.corner_ok and rel.boundary_matches
    assert rel.M.corners[1].is_empty()


def test_triangle_relative():
    c = triangle_chain()
    assert import_cycle(c).verdict is False
    assert label_boundary(c) == {("a", "b"): 1, ("a", "c"): -1, ("b", "c"): 1}
    rel = import_relative_cycle(c)
    assert rel.corner_ok and rel.boundary_matches
    assert rel.M.corners[1].complex.counts() == (3, 3)


def test_path_relative():
    c = SingularCycleInput(1, [(("a", "b"), 1), (("b", "c"), 1)])
    assert label_boundary(c) == {("a",): -1, ("c",): 1}
    rel = import_relative_cycle(c)
    assert rel.corner_ok and rel.boundary_matches


def test_degenerate_and_mod2_inputs():
    loop = import_cycle(SingularCycleInput(1, [(("a", "a"), 1)]))
    assert loop.verdict and loop.S.complex.counts() == (1, 1)
    double = SingularCycleInput(1, [(("a", "b"), 1), (("a", "b"), 1, "x")], "Z2")
    assert import_cycle(double).verdict and not label_boundary(double)
    assert import_cycle(SingularCycleInput(0, [(("a",), 2)])).verdict


def test_input_errors():
    with pytest.raises(StructuralError, match="expected 3"):
        SingularCycleInput(2, [(("a", "b"), 1)])
    with pytest.raises(StructuralError, match="twice"):
        SingularCycleInput(1, [(("a", "b"), 1), (("a", "b"), 2)])
    with pytest.raises(StructuralError):
        import_cycle(SingularCycleInput(1, []))
    with pytest.raises(StructuralError):
        import_relative_cycle(SingularCycleInput(0, [(("a",), 1)]))
    with pytest.raises(StructuralError):
        SingularCycleInput(1, [(("a", "b"), 1)], "R")


@pytest.mark.parametrize("c", [tetrahedron_cycle(), pillow_cycle(), triangle_chain("Q"), tetrahedron_cycle("Z2")])
def test_json_round_trip(c):
    d = SingularCycleInput.from_json(c.to_json())
    assert d.to_json() == c.to_json()
    assert import_cycle(d).to_json() == import_cycle(c).to_json()


@st.composite
def labelled_chains(draw):
    n = draw(st.integers(0, 3))
    letters = "abcde"[: n + 2]
    labs = draw(st.lists(st.tuples(*[st.sampled_from(letters)] * (n + 1)), min_size=1, max_size=6, unique=True))
    coeffs = draw(st.lists(st.sampled_from([-2, -1, 1, 2]), min_size=len(labs), max_size=len(labs)))
    return SingularCycleInput(n, list(zip(labs, coeffs)))


def _closed(n, letters, sign):
    # the boundary of a labelled (n+1)-simplex, optionally with one sign broken
    faces = [letters[:j] + letters[j + 1:] for j in range(n + 2)]
    coeffs = [(-1) ** j for j in range(n + 2)]
    coeffs[0] *= sign
    return SingularCycleInput(n, list(zip(faces, coeffs)))


@given(labelled_chains())
@settings(max_examples=150, deadline=None)
def test_orientation_matches_label_boundary(c):
    res = import_cycle(c)
    assert res.agree


@given(st.integers(1, 3), st.sampled_from([1, -1]))
@settings(deadline=None)
def test_simplex_boundaries(n, sign):
    c = _closed(n, tuple("abcde"[: n + 2]), sign)
    assert import_cycle(c).verdict == (sign == 1)
