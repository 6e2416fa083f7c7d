import pytest
from hypothesis import assume, given, settings, strategies as st

from smanifolds.rings import StructuralError
from smanifolds.towers import (Group, Tower, hawaiian_tower, mittag_leffler_status, projection_tower,
                               scalar_tower, truncated_limit)


def _compatible(T, fam):
    return all(T.push(i + 1, i, fam[i]) == fam[i - 1] for i in range(1, T.depth))


def test_doubling_tower():
    T = scalar_tower(2, 5)
    L = truncated_limit(T)
    assert L.group.describe() == "Z"
    assert L.families == [[[16], [8], [4], [2], [1]]]
    ml = mittag_leffler_status(T)
    assert ml.status == "fails_strictly"
    assert ml.image_ranks == [(1, ()), (1, (2,)), (1, (4,)), (1, (8,)), (1, (16,))]


def test_doubling_over_fields():
    assert mittag_leffler_status(scalar_tower(2, 4, "Q")).status == "holds_by_depth"
    # multiplication by 2 is zero mod 2: images vanish from depth 2 on
    ml = mittag_leffler_status(scalar_tower(2, 4, "Z2"))
    assert (ml.status, ml.depth) == ("holds_by_depth", 2)


def test_projection_tower():
    T = projection_tower(5)
    L = truncated_limit(T)
    assert L.group.describe() == "Z^5"
    assert all(_compatible(T, fam) for fam in L.families)
    assert mittag_leffler_status(T).status == "holds_by_depth"


def test_torsion_tower():
    T = Tower([Group(0, (4,)), Group(0, (8,))], [[[2]]])
    assert not T.violations()
    assert truncated_limit(T).group.describe() == "Z/8"
    assert mittag_leffler_status(T).status == "fails_strictly"
    bad = Tower([Group(0, (8,)), Group(0, (4,))], [[[1]]])
    assert any("relations" in v for v in bad.violations())
    with pytest.raises(StructuralError):
        mittag_leffler_status(bad)


def test_malformed_towers():
    assert Tower([], []).violations() == ["tower has no groups"]
    assert "maps" in Tower([Group(1), Group(1)], []).violations()[0]
    assert "shape" in Tower([Group(1), Group(2)], [[[1]]]).violations()[0]
    with pytest.raises(StructuralError):
        Group(1, (1,))
    with pytest.raises(StructuralError):
        Group(1, (2,), "Q")
    with pytest.raises(StructuralError):
        Tower.from_json({"tower": [{"rank": 1}, {"rank": 1}]})


@pytest.mark.parametrize("flip", [(), (2,), (1, 3)])
def test_hawaiian_classes(flip):
    H = hawaiian_tower(4, flip=flip)
    assert H.compatible
    assert [g.rank for g in H.tower.groups] == [1, 2, 3, 4]
    assert [[abs(x) for x in c] for c in H.classes] == [[1] * m for m in range(1, 5)]
    signs = [-1 if k in flip else 1 for k in range(1, 5)]
    assert H.classes[-1] == signs or H.classes[-1] == [-s for s in signs]
    assert H.ml.status == "holds_by_depth" and H.ml.depth == 1


@pytest.mark.parametrize("ring", ["Q", "Z2"])
def test_hawaiian_over_fields(ring):
    H = hawaiian_tower(3, ring)
    assert H.compatible and H.ml.status == "holds_by_depth"


def test_round_trip():
    for T in (scalar_tower(2, 4), projection_tower(3), scalar_tower(3, 3, "Q"),
              Tower([Group(0, (4,)), Group(1, (8,))], [[[2, 1]]])):
        U = Tower.from_json(T.to_json())
        assert U.to_json() == T.to_json()
        assert truncated_limit(U).group == truncated_limit(T).group


@st.composite
def free_towers(draw):
    depth = draw(st.integers(1, 5))
    ranks = draw(st.lists(st.integers(0, 2), min_size=depth, max_size=depth))
    maps = [[[draw(st.integers(-3, 3)) for _ in range(ranks[i + 1])] for _ in range(ranks[i])]
            for i in range(depth - 1)]
    return Tower([Group(r) for r in ranks], maps)


@given(free_towers())
@settings(max_examples=80, deadline=None)
def test_limit_and_image_filtration(T):
    assume(not T.violations())
    L = truncated_limit(T)
    # a compatible family of a finite tower is determined by its last entry
    assert L.group.rank == T.groups[-1].rank
    assert len(L.families) == L.group.ngens
    assert all(_compatible(T, fam) for fam in L.families)
    ml = mittag_leffler_status(T)
    ranks = [r for r, _ in ml.image_ranks]
    assert ranks == sorted(ranks, reverse=True)
    if ml.status == "holds_by_depth":
        assert len(set(ml.image_ranks[ml.depth - 1:])) == 1
    if ml.status == "fails_strictly":
        assert all(a != b for a, b in zip(ml.image_ranks, ml.image_ranks[1:]))
