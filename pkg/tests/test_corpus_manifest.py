"""Every manifest value of every corpus entry, recomputed from the model."""

import pytest

from smanifolds import corpus, rings
from smanifolds.corners import (boundary, boundary_fibre_count, check_corner_orientation, corner_counts,
                                fiber_poset, find_corner_orientation, has_simplicial_corners,
                                interiors_and_strata, is_bnormal, is_interior, iterated_boundary,
                                validate_corners)
from smanifolds.fibre_product import (OrientationRefused, abstract_fibre_product, boundary_sign_law,
                                      check_transverse, iterated_count_report, orient_fibre_product,
                                      swap_law, tiers_agree)
from smanifolds.homology import homology_groups
from smanifolds.importer import import_cycle, import_relative_cycle
from smanifolds.smanifold import (check_orientation, check_z2_class, codim_filtration, find_orientation,
                                  fundamental_class)


def _space(e):
    return e.model.base if e.kind == "corners" else e.model


def _cert(e):
    cert = e.certs.get("orientation")
    return cert if cert is not None else find_orientation(_space(e))


def _homology(S, ks=None):
    ks = range(S.complex.dim + 1) if ks is None else ks
    out = []
    for k in ks:
        H = homology_groups(S.complex, "Z", k, deleted=S.deleted)
        out.append([H.rank, list(H.torsion)])
    return out


def _corner_verdict(e):
    cert = e.certs.get("orientation")
    if cert is None:
        return find_corner_orientation(e.model)
    return check_corner_orientation(e.model, [cert])


def _orientation(e):
    if e.kind == "cycle":
        return import_cycle(e.model).verdict
    cert = _cert(e)
    return cert is not None and check_orientation(_space(e), cert).ok


def _fundamental_class(e):
    if e.kind == "cycle":
        r = import_cycle(e.model)
        S, cert = r.S, r.cert
    else:
        S, cert = e.model, _cert(e)
    return [int(x) for x in fundamental_class(S, cert)[0]]


def _levels(e):
    if e.kind == "poset":
        return list(e.model.levels())
    return {f"{k}->": lvl for (k, _), (lvl, _) in sorted(e.model.lift.items()) if lvl != k}


def _simplicial(e):
    return e.model.is_boolean() if e.kind == "poset" else has_simplicial_corners(e.model)[0]


def _fibre(e, key):
    g, h = e.model
    v = check_transverse(g, h)
    if key == "transverse":
        return v.transverse
    if key == "strongly_transverse":
        return v.strongly_transverse
    res = abstract_fibre_product(g, h, v)
    if key == "strata_dims":
        return res.dimension_multiset()
    cert = corpus.cross().certs["orientation"]
    try:
        orient_fibre_product(res, cert, cert)
    except OrientationRefused:
        return True
    return False


def _affine(e, key):
    MX, g, cx, MY, h, cy = e.model
    if key == "swap_factor":
        holds, factor, _ = swap_law(g, h, cx, cy)
        return factor if holds else None
    if key == "boundary_factor_dY":
        ok, info = boundary_sign_law(MX, g, cx, MY, h, cy)
        return info["factor_dY"] if ok else None
    return tiers_agree(g, h)[0]


def _boundary_signs(e):
    v = _corner_verdict(e)
    M = e.model
    by_base = {M.proj[1][(0, c)]: s for c, s in v.certs[1].signs.items()}
    return {"endpoint": by_base[e.extra["endpoint"]], "wedge": by_base[0]}


EVAL = {
    "homology_Z": lambda e: _homology(_space(e)),
    "homology_Z_2": lambda e: _homology(import_cycle(e.model).S, [2])[0],
    "orientation": _orientation,
    "fundamental_class": _fundamental_class,
    "codim_X1": lambda e: sorted(map(list, codim_filtration(e.model).X1)),
    "z2class": lambda e: check_z2_class(_space(e)).ok,
    "z2_defect_cells": lambda e: sorted(check_z2_class(e.model).defect.coeffs),
    "defect_at_v": lambda e: rings.format_scalar(check_orientation(e.model, _cert(e)).defect[0]),
    "valid": lambda e: validate_corners(e.model).ok,
    "simplicial": _simplicial,
    "levels": _levels,
    "interior": lambda e: is_interior(e.model),
    "bnormal": lambda e: is_bnormal(e.model),
    "corner_orientation": lambda e: bool(_corner_verdict(e) and _corner_verdict(e).ok),
    "boundary_count": lambda e: _corner_verdict(e).boundary_count,
    "boundary_signs": _boundary_signs,
    "boundary_points": lambda e: len(boundary(e.model)[0].base.cells()),
    "boundary_connected": lambda e: len(boundary(e.model)[0].base.complex.components(
        boundary(e.model)[0].base.cells())) == 1,
    "boundary2_points": lambda e: len(iterated_boundary(e.model, 2)[0].base.cells()),
    "middle_terms": lambda e: sum(t["multiplicity"] for t in iterated_count_report(
        corpus.interval_corner().model, corpus.interval_corner().model, 2)["terms"] if t["a"] == 1),
    "C2_fiber_at_v": lambda e: len(e.model.over[2].get((0, 0), [])),
    "boundary2_fiber_at_v": lambda e: boundary_fibre_count(e.model, 2, (0, 0)),
    "strata": lambda e: {f"S{k}": sorted(map(list, s)) for k, s in enumerate(interiors_and_strata(e.model).S)},
    "fiber_levels_at_corner": lambda e: list(fiber_poset(e.model, (0, 0)).levels()),
    "count_identities": lambda e: corner_counts(e.model)["identities_hold"],
    "relative_corner_orientation": lambda e: import_relative_cycle(e.model).corner_ok,
}
FIBRE_KEYS = {"transverse", "strongly_transverse", "strata_dims", "orient_refuses"}
AFFINE_KEYS = {"swap_factor", "boundary_factor_dY", "tiers_agree"}


def _items():
    out = []
    for name, build in sorted(corpus.BUILDERS.items()):
        for key, value, tag in build().manifest:
            out.append(pytest.param(name, key, value, tag, id=f"{name}-{key}"))
    return out


@pytest.mark.parametrize("name,key,expected,tag", _items())
def test_manifest(name, key, expected, tag):
    e = corpus.BUILDERS[name]()
    if key in FIBRE_KEYS and e.kind == "fibre_product":
        got = _fibre(e, key)
    elif key in AFFINE_KEYS:
        got = _affine(e, key)
    else:
        got = EVAL[key](e)
    assert got == expected, (tag, got)


def test_tags_are_known():
    for name, build in corpus.BUILDERS.items():
        assert {t for _, _, t in build().manifest} <= {"PAPER", "TRIVIAL", "DERIVED"}, name
