"""Acceptance suite: one test per criterion; the terminal summary prints a PASS/FAIL line for each."""

import json
import random
from fractions import Fraction

import pytest

from smanifolds import cli, corpus, io
from smanifolds.complex import DeltaComplex, simplicial_complex
from smanifolds.corners import (boundary_fibre_count, corner_counts, corner_lift, corner_space,
                                check_corner_orientation, identity_morphism, validate_corners,
                                validate_morphism)
from smanifolds.fibre_product import (OrientationRefused, abstract_fibre_product, boundary_sign_law,
                                      check_transverse, iterated_count_report, mediating_map,
                                      orient_fibre_product, swap_law, tiers_agree)
from smanifolds.homology import homology_groups
from smanifolds.importer import import_cycle, label_boundary, random_cycle, tetrahedron_cycle
from smanifolds.maps import CellMap, StratifiedMap
from smanifolds.rings import StructuralError
from smanifolds.smanifold import check_orientation, check_z2_class, fundamental_class
from smanifolds.towers import Tower, hawaiian_tower, mittag_leffler_status, scalar_tower

from conftest import all_entries, smanifolds_in_corpus


@pytest.mark.criterion(1, "weighted orientation over Q, exact defect 1/4")
def test_criterion_01_weighted_orientation():
    e = corpus.weighted_cross()
    assert e.certs["orientation"].ring == "Q"
    assert check_orientation(e.model, e.certs["orientation"]).ok
    bad = corpus.weighted_cross(Fraction(1, 4))
    v = check_orientation(bad.model, bad.certs["orientation"])
    assert not v.ok
    assert [abs(x) for x in v.defect.coeffs.values()] == [Fraction(5, 6) - Fraction(1, 4) - Fraction(1, 3)]
    assert abs(next(iter(v.defect.coeffs.values()))) == Fraction(1, 4)


@pytest.mark.criterion(2, "non-orientability detection and corner enhancement")
def test_criterion_02_nonorientability():
    assert not check_z2_class(corpus.hawaiian_interval(3).model).ok
    e = corpus.hawaiian_interval_corner(3)
    M, endpoint = e.model, e.extra["endpoint"]
    v = check_corner_orientation(M, [e.certs["orientation"]])
    assert v.ok
    C1 = M.corners[1]
    signs = {M.proj[1][(0, c)]: s for c, s in v.certs[1].signs.items() if (0, c) in C1.cells()}
    assert signs == {endpoint: -1, 0: 1}
    assert v.boundary_count == 0


@pytest.mark.criterion(3, "strong-transversality gate")
def test_criterion_03_strong_transversality():
    g, h = corpus.cross_fibre_data().model
    verdict = check_transverse(g, h)
    assert verdict.transverse and not verdict.strongly_transverse
    res = abstract_fibre_product(g, h, verdict)
    Z = g.target
    names = {Z.complex.labels[Z.strata[k][0]]: res.triples[(i, j, k)]["dim"] for i, j, k in res.triples}
    assert names == {"b": 1, "v": 0}
    with pytest.raises(OrientationRefused):
        orient_fibre_product(res, corpus.cross().certs["orientation"], corpus.cross().certs["orientation"])


@pytest.mark.criterion(4, "swap and boundary sign laws as certificate flips")
def test_criterion_04_sign_laws():
    checked = point_cases = flips = 0
    for name in corpus.AFFINE_CASES:
        e = corpus.affine_case(name)
        MX, g, cx, MY, h, cy = e.model
        l, m, n = MX.n, MY.n, g.n
        holds, factor, details = swap_law(g, h, cx, cy)
        assert factor == (-1) ** ((l - n) * (m - n))
        assert holds and details
        # literal: each cell's swapped sign equals factor times the original sign
        assert all(x == factor * y for _, _, x, y in details)
        ok, info = boundary_sign_law(MX, g, cx, MY, h, cy)
        assert ok and info["valid"]
        assert info["factor_dY"] == (-1) ** (l - n)
        assert info["cells"]["X x dY"] or info["cells"]["dX x Y"]
        flips += info["factor_dY"] == -1 and len(info["cells"]["X x dY"])
        checked += 1
        point_cases += n == 0
    assert checked >= 5 and point_cases >= 1 and flips > 0


@pytest.mark.criterion(5, "corner counting: teardrop, square, pyramid")
def test_criterion_05_corner_counting():
    t = corpus.teardrop().model
    assert len(t.over[2].get((0, 0), [])) == 1
    assert boundary_fibre_count(t, 2, (0, 0)) == 2
    I = corpus.interval_corner().model
    rep = iterated_count_report(I, I, 2)
    assert rep["lhs"] == 8 and rep["ok"]
    middle = [r for r in rep["terms"] if r["a"] not in (0, 2)]
    assert [r["multiplicity"] for r in middle] == [2]
    P = corpus.pyramid_poset().model
    assert tuple(P.levels()) == (1, 4, 4, 1)
    assert not P.is_boolean()
    assert not corner_counts(P)["identities_hold"]


@pytest.mark.criterion(6, "homology engine and vanishing above n")
def test_criterion_06_homology():
    X = corpus.tetrahedron_boundary().model.complex
    assert [homology_groups(X, "Z", k).describe() for k in range(3)] == ["Z", "0", "Z"]
    for m in range(1, 7):
        H1 = homology_groups(corpus.hawaiian(m).model.complex, "Z", 1)
        assert (H1.rank, H1.torsion) == (m, ())
    for name, S in smanifolds_in_corpus():
        for ring in ("Z", "Q", "Z2"):
            for k in range(S.n + 1, S.n + 3):
                assert homology_groups(S.complex, ring, k, deleted=S.deleted).is_zero(), (name, ring, k)


def _base_fibre_products():
    g, h = corpus.cross_fibre_data().model
    out = [abstract_fibre_product(g, h)]
    for name in ("circle", "tetrahedron_boundary", "hawaiian", "weighted_cross"):
        S = corpus.BUILDERS[name]().model
        idm = StratifiedMap(S, S, CellMap.identity(S.complex))
        out.append(abstract_fibre_product(idm, idm))
    return out


def random_cone(rng, res):
    """A cone (W', e o b0, f o b0) through a known map b0: W' -> W; returns (e2, f2, b0)."""
    W = res.W.complex
    cells = list(W.all_cells())
    if rng.random() < 0.3:
        # a constant map from a small simplex onto a vertex
        k = rng.randint(0, 2)
        src, _ = simplicial_complex([list(range(k + 1))])
        v = rng.randrange(W.count(0))
        b0 = CellMap(src, W, {c: (0, v, (0,) * (c[0] + 1)) for c in src.all_cells()})
    else:
        chosen = rng.sample(cells, rng.randint(1, min(4, len(cells))))
        closed = sorted(W.closure(chosen))
        by_dim = {}
        for c in closed:
            by_dim.setdefault(c[0], []).append(c[1])
        for ids in by_dim.values():
            rng.shuffle(ids)
        new = {(d, i): (d, n) for d, ids in by_dim.items() for n, i in enumerate(ids)}
        top = max(by_dim)
        rows = []
        for d in range(top + 1):
            ids = by_dim.get(d, [])
            rows.append([() if d == 0 else tuple(new[(d - 1, f)][1] for f in W.cells[d][i]) for i in ids])
        src = DeltaComplex(rows)
        b0 = CellMap.nondegenerate(src, W, {new[c]: c[1] for c in closed})
    assert not b0.violations()
    return b0.compose(res.e), b0.compose(res.f), b0


@pytest.mark.criterion(7, "tier agreement and universal property")
def test_criterion_07_tiers_and_universal_property():
    for name in corpus.AFFINE_CASES:
        MX, g, cx, MY, h, cy = corpus.affine_case(name).model
        agree, a, b = tiers_agree(g, h)
        assert agree, name
    rng = random.Random(20240607)
    bases = _base_fibre_products()
    for trial in range(20):
        res = bases[trial % len(bases)]
        e2, f2, b0 = random_cone(rng, res)
        b = mediating_map(res, e2, f2)
        assert b.images == b0.images
        # uniqueness: each cone cell has exactly one W cell over its pair of images
        W = res.W.complex
        for w in e2.source.all_cells():
            over = [c for c in W.all_cells() if res.e.cell(c) == e2.cell(w) and res.f.cell(c) == f2.cell(w)]
            assert len(over) == 1
    # negative: a perturbed cone that no longer commutes has no mediating map
    res = bases[0]
    e2, f2, _ = random_cone(random.Random(1), res)
    Y = res.f.target
    w = next(iter(f2.images))
    k2, i2, th = f2.images[w]
    others = [j for j in range(Y.count(k2)) if res.maps[1].cells.cell((k2, j)) != res.maps[1].cells.cell((k2, i2))]
    assert others
    bad = CellMap(f2.source, Y, {**f2.images, w: (k2, others[0], th)})
    with pytest.raises(StructuralError):
        mediating_map(res, e2, bad)


def _corner_models():
    return [(name, e.model) for name, e in all_entries() if e.kind == "corners"]


def _morphisms():
    out = {name: e.model for name, e in all_entries() if e.kind == "morphism"}
    for name, M in _corner_models():
        out[f"id_{name}"] = identity_morphism(M)
    return out


@pytest.mark.criterion(8, "corner functor coherence")
def test_criterion_08_corner_functor():
    for name, M in _corner_models():
        for k in range(M.n + 1):
            Ck, pi = corner_space(M, k)
            assert validate_corners(Ck).ok, (name, k)
            assert validate_morphism(pi).ok, (name, k)
    mors = _morphisms()
    key = {n: io.dumps(io.corners_to_doc(f.source)) for n, f in mors.items()}
    tkey = {n: io.dumps(io.corners_to_doc(f.target)) for n, f in mors.items()}
    pairs = 0
    for a, f in mors.items():
        for b, g in mors.items():
            if tkey[a] != key[b]:
                continue
            direct = corner_lift(f.source, g.target, f.base.compose(g.base))
            assert f.compose(g).lift == direct.lift, (a, b)
            pairs += 1
    assert pairs >= 10
    diag = corpus.diag_map().model
    assert diag.level(1, (0, 0)) == 2
    assert diag.level(0, (1, 0)) == 0
    zero = corpus.zero_inclusion().model
    assert zero.level(0, (0, 0)) == 1


@pytest.mark.criterion(9, "towers: Mittag-Leffler and the x2 tower")
def test_criterion_09_towers():
    H = hawaiian_tower(6)
    assert H.compatible
    assert H.ml.status == "holds_by_depth"
    assert [g.rank for g in H.tower.groups] == [1, 2, 3, 4, 5, 6]
    T = scalar_tower(2, 6)
    assert T.depth == 6
    assert mittag_leffler_status(T).status == "fails_strictly"
    assert isinstance(Tower.from_json(T.to_json()), Tower)


def boundary_oracle(c):
    """Signed face sum on label tuples, written independently of the library."""
    acc = {}
    for lab, rho, _ in c.simplices:
        for j in range(len(lab)):
            if len(lab) == 1:
                break
            face = lab[:j] + lab[j + 1:]
            acc[face] = acc.get(face, 0) + (-1) ** j * rho
    return {f: x for f, x in acc.items() if x != 0}


@pytest.mark.criterion(10, "importer equivalence")
def test_criterion_10_importer():
    rng = random.Random(7)
    cycles = 0
    for _ in range(200):
        c = random_cycle(rng)
        res = import_cycle(c)
        oracle_zero = not boundary_oracle(c)
        assert res.verdict == oracle_zero
        assert (not label_boundary(c)) == oracle_zero
        cycles += oracle_zero
    assert 0 < cycles < 200
    t = import_cycle(tetrahedron_cycle())
    coords, P, _ = fundamental_class(t.S, t.cert)
    assert (P.rank, P.torsion) == (1, ())
    assert [abs(x) for x in coords] == [1]


def _cli_inputs(tmp_path):
    paths = {}
    for name in sorted(corpus.BUILDERS):
        code, text = cli.run(["corpus", name])
        assert code == 0
        p = tmp_path / f"{name}.json"
        p.write_text(text)
        paths[name] = p
    for name, T in (("x2", scalar_tower(2, 5)), ("hawaiian_tower", hawaiian_tower(4).tower)):
        p = tmp_path / f"{name}.json"
        p.write_text(io.dumps({"kind": "tower", **T.to_json()}))
        paths[name] = p
    return paths


COMMANDS = [  # (positional words, options)
    (["validate"], []), (["homology"], []), (["homology"], ["--ring", "q"]), (["homology"], ["--ring", "z2"]),
    (["orient"], []), (["z2class"], []),
    (["corners", "validate"], []), (["corners", "space"], ["--k", "1"]), (["corners", "boundary"], []),
    (["corners", "strata"], []), (["corners", "simplicial"], []),
    (["morphism", "validate"], []), (["morphism", "interior"], []), (["morphism", "bnormal"], []),
    (["morphism", "split"], []),
    (["fp", "check"], []), (["fp", "check"], ["--strong"]), (["fp", "abstract"], []), (["fp", "product"], []),
    (["fp", "geometric"], []), (["fp", "orient"], []), (["fp", "corners"], []),
    (["fp", "level-set"], ["--z", "1/2"]),
    (["tower", "limit"], []), (["tower", "ml"], []), (["import-cycle"], []), (["import-cycle"], ["--relative"]),
]


@pytest.mark.criterion(11, "CLI determinism")
def test_criterion_11_cli_determinism(tmp_path):
    paths = _cli_inputs(tmp_path)
    runs = 0
    for name, p in paths.items():
        for cmd in COMMANDS:
            for flag in ([], ["--json"]):
                argv = flag + cmd[0] + [str(p)] + cmd[1]
                first = cli.run(argv)
                second = cli.run(argv)
                assert first == second, (name, argv)
                if flag:
                    json.loads(first[1])
                runs += 1
    for argv in (["tower", "hawaiian", "--m", "5"], ["corpus", "hawaiian", "--m", "4"]):
        assert cli.run(argv) == cli.run(argv)
    assert runs == len(paths) * len(COMMANDS) * 2
