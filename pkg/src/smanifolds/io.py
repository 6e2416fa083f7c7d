"""Canonical JSON interchange documents.

A document is one JSON object.  Its sections are optional and typed by name:
complex ("dims", "cells", "labels", "coords"), stratification ("strata",
"stratum_dims", "deleted"), certificates ("ring", "orientation", "weights",
"z2_cocycle", "omega"), corner data ("corners", "proj", "D",
"corner_orientation"), and the nested documents of morphisms, fibre-product
inputs, towers, cycles and posets.  Rationals are strings "p/q".
"""

from __future__ import annotations

import json
from fractions import Fraction

from . import rings
from .complex import DeltaComplex
from .corners import FiberPoset, SManifoldC, corner_lift
from .homology import Z2Cocycle
from .maps import CellMap, StratifiedMap
from .rings import StructuralError
from .smanifold import OrientationCert, SManifold


def dumps(doc) -> str:
    """Canonical text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def loads(text: str):
    if not text or not text.strip():
        raise StructuralError("empty document")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise StructuralError(f"not JSON: {e}") from None
    if not isinstance(doc, dict) or not doc:
        raise StructuralError("document must be a non-empty JSON object")
    return doc


def _q(x):
    return rings.format_scalar(Fraction(x))


def _need(doc, key):
    if key not in doc:
        raise StructuralError(f"missing section {key!r}")
    return doc[key]


def _cell(c):
    if not isinstance(c, (list, tuple)) or len(c) != 2:
        raise StructuralError(f"bad cell reference {c!r}")
    return (int(c[0]), int(c[1]))


# ---------------------------------------------------------------------------
# complexes and s-manifolds

def complex_to_doc(X: DeltaComplex):
    doc = {"dims": X.dim, "cells": [[list(f) for f in level] for level in X.cells]}
    if X.labels:
        doc["labels"] = [[k, i, str(v)] for (k, i), v in sorted(X.labels.items())]
    if X.realization is not None:
        R = X.realization
        doc["coords"] = [[_q(x) for x in R.point(v)] for v in range(X.count(0))]
    return doc


def complex_from_doc(doc):
    cells = _need(doc, "cells")
    if not isinstance(cells, list):
        raise StructuralError("section 'cells' must be an array")
    try:
        labels = {(int(k), int(i)): str(v) for k, i, v in doc.get("labels", [])}
        coords = doc.get("coords")
        X = DeltaComplex(cells, labels, [[Fraction(x) for x in p] for p in coords] if coords is not None else None)
    except (TypeError, ValueError) as e:
        raise StructuralError(f"malformed complex: {e}") from None
    if "dims" in doc and int(doc["dims"]) != X.dim:
        raise StructuralError(f"'dims' says {doc['dims']} but the cells have dimension {X.dim}")
    return X


def smanifold_to_doc(S: SManifold):
    doc = complex_to_doc(S.complex)
    doc["n"] = S.n
    doc["strata"] = [[list(c) for c in s] for s in S.strata]
    doc["stratum_dims"] = list(S.stratum_dims)
    if S.deleted:
        doc["deleted"] = [list(c) for c in sorted(S.deleted)]
    if S.assert_manifold:
        doc["assert_manifold"] = sorted(S.assert_manifold)
    return doc


def smanifold_from_doc(doc):
    X = complex_from_doc(doc)
    n = int(doc.get("n", doc.get("dims", X.dim)))
    if "strata" in doc:
        strata = [[_cell(c) for c in s] for s in doc["strata"]]
        dims = doc.get("stratum_dims")
    else:
        strata = [[c for c in X.all_cells()]]
        dims = [n]
    deleted = [_cell(c) for c in doc.get("deleted", [])]
    return SManifold(X, n, strata, dims, doc.get("assert_manifold", ()), deleted)


def cert_to_doc(cert: OrientationCert):
    doc = {"ring": cert.ring, "orientation": [[c, s] for c, s in sorted(cert.signs.items())]}
    if cert.weights:
        doc["weights"] = [[i, rings.format_scalar(w)] for i, w in sorted(cert.weights.items())]
    if cert.cocycle is not None:
        doc["z2_cocycle"] = [[e, v] for e, v in sorted(cert.cocycle.values.items())]
    if cert.omega:
        doc["omega"] = [[c, s] for c, s in sorted(cert.omega.items())]
    return doc


def cert_from_doc(doc):
    if "orientation" not in doc:
        return None
    ring = doc.get("ring", "Z")
    signs = {int(c): int(s) for c, s in doc["orientation"]}
    weights = {int(i): rings.parse_scalar(w, ring) for i, w in doc.get("weights", [])}
    cocycle = Z2Cocycle({int(e): int(v) for e, v in doc["z2_cocycle"]}) if "z2_cocycle" in doc else None
    omega = {int(c): int(s) for c, s in doc.get("omega", [])}
    return OrientationCert(signs, weights, ring, cocycle, omega)


# ---------------------------------------------------------------------------
# corners

def corners_to_doc(M: SManifoldC, certs=None):
    doc = smanifold_to_doc(M.base)
    doc["corners"] = [smanifold_to_doc(C) for C in M.corners]
    doc["proj"] = [[[d, i, j] for (d, i), j in sorted(p.items())] for p in M.proj]
    doc["D"] = [{"k": k, "l": l, "components": sorted([a, b] for a, b in pairs)}
                for (k, l), pairs in sorted(M.D.items())]
    if certs:
        doc.update(cert_to_doc(certs[0]))
        if len(certs) > 1:
            doc["corner_orientation"] = [cert_to_doc(c) for c in certs]
    return doc


def corners_from_doc(doc):
    base = smanifold_from_doc(doc)
    corners = [smanifold_from_doc(c) for c in doc.get("corners", [])]
    if not corners:
        return SManifoldC.without_boundary(base)
    proj = [{(int(d), int(i)): int(j) for d, i, j in p} for p in doc.get("proj", [])]
    if len(proj) != len(corners):
        raise StructuralError("'proj' needs one table per corner level")
    D = {}
    for item in doc.get("D", []):
        D[(int(item["k"]), int(item["l"]))] = [(int(a), int(b)) for a, b in item["components"]]
    return SManifoldC(base, corners, proj, D)


def corner_certs_from_doc(doc):
    if "corner_orientation" in doc:
        return [cert_from_doc(c) for c in doc["corner_orientation"]]
    c = cert_from_doc(doc)
    return [c] if c is not None else []


# ---------------------------------------------------------------------------
# maps and morphisms

def cellmap_to_doc(f: CellMap):
    return f.to_json()


def cellmap_from_doc(rows, source: DeltaComplex, target: DeltaComplex):
    return CellMap(source, target, {(int(k), int(i)): (int(k2), int(i2), tuple(int(x) for x in t))
                                    for k, i, k2, i2, t in rows})


def morphism_to_doc(phi):
    return {"kind": "morphism", "source": corners_to_doc(phi.source), "target": corners_to_doc(phi.target),
            "map": cellmap_to_doc(phi.base)}


def morphism_from_doc(doc):
    src = corners_from_doc(_need(doc, "source"))
    tgt = corners_from_doc(_need(doc, "target"))
    f = cellmap_from_doc(_need(doc, "map"), src.base.complex, tgt.base.complex)
    bad = f.violations()
    if bad:
        raise StructuralError("base map is not cellular: " + bad[0])
    return corner_lift(src, tgt, f)


def plmap_to_doc(g):
    return {"n": g.n, "values": [[v, [_q(x) for x in g.values[v]]] for v in sorted(g.values)]}


def plmap_from_doc(doc, source):
    from .fibre_product import PLMap
    if "affine" in doc:
        a = doc["affine"]
        return PLMap.affine(source, [[Fraction(x) for x in r] for r in a["matrix"]],
                            [Fraction(x) for x in a["offset"]])
    n = int(_need(doc, "n"))
    return PLMap(source, {int(v): [Fraction(x) for x in p] for v, p in _need(doc, "values")}, n)


def fp_to_doc(kind, data):
    """Fibre-product input documents: combinatorial (maps into Z) or affine (maps into R^n)."""
    if kind == "combinatorial":
        g, h = data
        return {"kind": "fibre_product", "X": smanifold_to_doc(g.source), "Y": smanifold_to_doc(h.source),
                "Z": smanifold_to_doc(g.target), "g": cellmap_to_doc(g.cells), "h": cellmap_to_doc(h.cells)}
    MX, g, cx, MY, h, cy = data
    return {"kind": "fibre_product", "X": corners_to_doc(MX, [cx]), "Y": corners_to_doc(MY, [cy]),
            "g": plmap_to_doc(g), "h": plmap_to_doc(h)}


def fp_from_doc(doc):
    """Returns ("combinatorial", (g, h)) or ("affine", (MX, g, cx, MY, h, cy))."""
    if "Z" in doc:
        X, Y, Z = (smanifold_from_doc(_need(doc, k)) for k in "XYZ")
        g = StratifiedMap(X, Z, cellmap_from_doc(_need(doc, "g"), X.complex, Z.complex))
        h = StratifiedMap(Y, Z, cellmap_from_doc(_need(doc, "h"), Y.complex, Z.complex))
        for name, f in (("g", g), ("h", h)):
            bad = f.violations()
            if bad:
                raise StructuralError(f"{name}: {bad[0]}")
        return "combinatorial", (g, h)
    dx, dy = _need(doc, "X"), _need(doc, "Y")
    MX, MY = corners_from_doc(dx), corners_from_doc(dy)
    cx, cy = cert_from_doc(dx), cert_from_doc(dy)
    g = plmap_from_doc(_need(doc, "g"), MX.base)
    h = plmap_from_doc(_need(doc, "h"), MY.base)
    return "affine", (MX, g, cx, MY, h, cy)


# ---------------------------------------------------------------------------
# posets, cycles, towers

def poset_to_doc(P: FiberPoset):
    return {"kind": "poset", "poset": P.to_json()}


def poset_from_doc(doc):
    p = _need(doc, "poset")
    elems = [(int(k), tuple(key) if isinstance(key, list) else key) for k, key in p["elements"]]
    pairs = {(elems[i], elems[j]) for i, j in p.get("order", [])}
    return FiberPoset.from_relation(elems, pairs)


def cycle_to_doc(c):
    return {"kind": "cycle", "cycle": c.to_json()}


def cycle_from_doc(doc):
    from .importer import SingularCycleInput
    return SingularCycleInput.from_json(_need(doc, "cycle"))


def tower_from_doc(doc):
    from .towers import Tower
    if detect_kind(doc) != "tower":
        raise StructuralError(f"expected a tower document, got {detect_kind(doc)!r}")
    try:
        return Tower.from_json(doc)
    except (KeyError, TypeError, ValueError) as e:
        raise StructuralError(f"malformed tower document: {e}") from None


# ---------------------------------------------------------------------------
# corpus entries

def entry_to_doc(entry):
    kind, m = entry.kind, entry.model
    if kind == "smanifold":
        doc = smanifold_to_doc(m)
        cert = entry.certs.get("orientation")
        if cert is not None:
            doc.update(cert_to_doc(cert))
    elif kind == "corners":
        cert = entry.certs.get("orientation")
        doc = corners_to_doc(m, [cert] if cert is not None else None)
    elif kind == "morphism":
        doc = morphism_to_doc(m)
    elif kind == "poset":
        doc = poset_to_doc(m)
    elif kind == "fibre_product":
        doc = fp_to_doc("combinatorial", m)
    elif kind == "affine_fibre_product":
        doc = fp_to_doc("affine", m)
    elif kind == "cycle":
        doc = cycle_to_doc(m)
    else:
        raise StructuralError(f"no serializer for kind {kind!r}")
    doc["kind"] = {"affine_fibre_product": "fibre_product"}.get(kind, kind)
    doc["name"] = entry.name
    if entry.params:
        doc["params"] = entry.params
    doc["manifest"] = [{"key": k, "value": jsonable(v), "tag": t} for k, v, t in entry.manifest]
    return doc


def jsonable(v):
    if isinstance(v, Fraction):
        return rings.format_scalar(v)
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    return v


def detect_kind(doc):
    if "kind" in doc:
        return doc["kind"]
    if "tower" in doc:
        return "tower"
    if "cycle" in doc:
        return "cycle"
    if "poset" in doc:
        return "poset"
    if "source" in doc and "target" in doc:
        return "morphism"
    if "X" in doc and "Y" in doc:
        return "fibre_product"
    if "corners" in doc:
        return "corners"
    if "cells" in doc:
        return "smanifold"
    raise StructuralError("cannot tell what the document describes")


def canonical(doc):
    """Parse a document into its model and serialize it back (used for round-trip checks)."""
    kind = detect_kind(doc)
    extra = {k: doc[k] for k in ("name", "params", "manifest") if k in doc}
    if kind == "smanifold":
        out = smanifold_to_doc(smanifold_from_doc(doc))
        cert = cert_from_doc(doc)
        if cert is not None:
            out.update(cert_to_doc(cert))
    elif kind == "corners":
        certs = corner_certs_from_doc(doc)
        out = corners_to_doc(corners_from_doc(doc), certs or None)
    elif kind == "morphism":
        out = morphism_to_doc(morphism_from_doc(doc))
    elif kind == "poset":
        out = poset_to_doc(poset_from_doc(doc))
    elif kind == "fibre_product":
        t, data = fp_from_doc(doc)
        out = fp_to_doc(t, data)
    elif kind == "cycle":
        out = cycle_to_doc(cycle_from_doc(doc))
    elif kind == "tower":
        out = tower_from_doc(doc).to_json()
    else:
        raise StructuralError(f"unknown document kind {kind!r}")
    out["kind"] = kind
    out.update(extra)
    return out
