"""Command-line interface.

Exit codes: 0 pass/true, 1 fail/false (with a report), 2 structural error.
Documents are read from a path argument or stdin; every output is
deterministic.  Commands that produce models print canonical documents so
they can be piped into further commands.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import io
from .rings import StructuralError


class Outcome:
    def __init__(self, ok, report, lines=(), doc=None):
        self.ok = ok
        self.report = report
        self.lines = list(lines)
        self.doc = doc


def _read(path):
    if path in (None, "-"):
        text = sys.stdin.read()
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise StructuralError(f"cannot read {path}: {e.strerror}") from None
    return io.loads(text)


def _defect_lines(v):
    return [f"  defect {c} coefficient {x}" for c, x in sorted(v.defect.coeffs.items())]


def _verdict(ok, name, report, extra=()):
    return Outcome(ok, {"command": name, "ok": ok, **report}, [f"{name}: {'pass' if ok else 'fail'}", *extra])


# ---------------------------------------------------------------------------
# s-manifold commands

def _smanifold(doc):
    kind = io.detect_kind(doc)
    if kind == "corners":
        return io.corners_from_doc(doc).base
    if kind == "cycle":
        from .importer import import_cycle
        return import_cycle(io.cycle_from_doc(doc)).S
    if kind != "smanifold":
        raise StructuralError(f"expected an s-manifold document, got {kind!r}")
    return io.smanifold_from_doc(doc)


def cmd_validate(args):
    doc = _read(args.doc)
    kind = io.detect_kind(doc)
    if kind == "smanifold":
        from .smanifold import validate_smanifold
        r = validate_smanifold(io.smanifold_from_doc(doc))
    elif kind == "corners":
        from .corners import validate_corners
        r = validate_corners(io.corners_from_doc(doc))
    elif kind == "morphism":
        from .corners import validate_morphism
        r = validate_morphism(io.morphism_from_doc(doc))
    elif kind == "poset":
        P = io.poset_from_doc(doc)
        return _verdict(not P.violations(), "validate", {"kind": kind, "violations": P.violations()},
                        [f"  {v}" for v in P.violations()])
    elif kind == "tower":
        v = io.tower_from_doc(doc).violations()
        return _verdict(not v, "validate", {"kind": kind, "violations": v}, [f"  {x}" for x in v])
    elif kind == "cycle":
        from .importer import import_cycle
        from .smanifold import validate_smanifold
        r = validate_smanifold(import_cycle(io.cycle_from_doc(doc)).S)
    elif kind == "fibre_product":
        io.fp_from_doc(doc)
        return _verdict(True, "validate", {"kind": kind, "violations": []})
    else:
        raise StructuralError(f"cannot validate kind {kind!r}")
    rep = r.to_json()
    return _verdict(r.ok, "validate", {"kind": kind, **rep}, [f"  {v}" for v in r.violations])


def cmd_homology(args):
    from .homology import homology_groups
    S = _smanifold(_read(args.doc))
    ring = {"z": "Z", "z2": "Z2", "q": "Q"}[args.ring]
    dims = [args.dim] if args.dim is not None else list(range(max(S.complex.dim, 0) + 1))
    groups = {}
    lines = []
    for k in dims:
        H = homology_groups(S.complex, ring, k, None, S.deleted)
        groups[str(k)] = {"rank": H.rank, "torsion": list(H.torsion), "group": H.describe()}
        lines.append(f"H_{k} = {H.describe()}")
    return Outcome(True, {"command": "homology", "ring": ring, "groups": groups}, lines)


def cmd_orient(args):
    doc = _read(args.doc)
    kind = io.detect_kind(doc)
    if kind == "corners":
        from .corners import check_corner_orientation, find_corner_orientation
        M = io.corners_from_doc(doc)
        certs = io.corner_certs_from_doc(doc)
        if not certs:
            found = find_corner_orientation(M)
            if found is None:
                return _verdict(False, "orient", {"mode": "corners", "found": False}, ["  no corner orientation exists"])
            certs = found.certs[:1]
        v = check_corner_orientation(M, certs)
        lines = []
        if len(v.certs) > 1:
            lines.append("  boundary signs " + " ".join(f"{c}:{s:+d}" for c, s in sorted(v.certs[1].signs.items())))
        if v.boundary_count is not None:
            lines.append(f"  boundary count {v.boundary_count}")
        return _verdict(v.ok, "orient", {"mode": "corners", **v.to_json()}, lines)
    from .smanifold import check_orientation, check_orientation_bundle, find_orientation
    S = _smanifold(doc)
    cert = io.cert_from_doc(doc)
    if kind == "cycle":
        from .importer import import_cycle
        cert = import_cycle(io.cycle_from_doc(doc)).cert
    if cert is None:
        cert = find_orientation(S)
        if cert is None:
            return _verdict(False, "orient", {"mode": "search", "found": False}, ["  no orientation exists"])
        mode = "search"
    else:
        mode = "bundle" if cert.cocycle is not None else ("weighted" if cert.weights else "plain")
    v = check_orientation_bundle(S, cert) if cert.cocycle is not None else check_orientation(S, cert)
    return _verdict(v.ok, "orient", {"mode": mode, **v.to_json(), "certificate": io.cert_to_doc(cert)},
                    [f"  mode {mode}", *_defect_lines(v)])


def cmd_z2class(args):
    from .smanifold import check_z2_class
    S = _smanifold(_read(args.doc))
    v = check_z2_class(S)
    return _verdict(v.ok, "z2class", v.to_json(), _defect_lines(v))


# ---------------------------------------------------------------------------
# corners

def _corners(doc):
    if io.detect_kind(doc) == "smanifold":
        from .corners import SManifoldC
        return SManifoldC.without_boundary(io.smanifold_from_doc(doc))
    return io.corners_from_doc(doc)


def cmd_corners(args):
    from . import corners as C
    doc = _read(args.doc)
    if args.action == "simplicial" and io.detect_kind(doc) == "poset":
        P = io.poset_from_doc(doc)
        counts = C.corner_counts(P)
        ok, _ = C.has_simplicial_corners(P)
        return _verdict(ok, "corners simplicial", {"levels": list(P.levels()), "counts": io.jsonable(counts)},
                        [f"  levels {list(P.levels())}", f"  count identities {counts['identities_hold']}"])
    M = _corners(doc)
    if args.action == "validate":
        r = C.validate_corners(M)
        return _verdict(r.ok, "corners validate", r.to_json(), [f"  {v}" for v in r.violations])
    if args.action == "simplicial":
        ok, where = C.has_simplicial_corners(M)
        rep = {} if ok else {"failing_cell": list(where)}
        return _verdict(ok, "corners simplicial", rep, [] if ok else [f"  fibre poset over {where} is not Boolean"])
    if args.action == "strata":
        s = C.interiors_and_strata(M)
        lines = [f"  S^{k}: {sorted(map(list, cells))}" for k, cells in enumerate(s.S)]
        return _verdict(not s.violations, "corners strata", s.to_json(), lines)
    if args.action in ("space", "boundary"):
        k = 1 if args.action == "boundary" else args.k
        if k is None:
            raise StructuralError("corners space needs --k")
        Mk, _ = C.corner_space(M, k)
        out = io.corners_to_doc(Mk)
        out["kind"] = "corners"
        return Outcome(True, out, doc=out)
    raise StructuralError(f"unknown corners action {args.action}")


def cmd_morphism(args):
    from . import corners as C
    phi = io.morphism_from_doc(_read(args.doc))
    if args.action == "validate":
        r = C.validate_morphism(phi)
        return _verdict(r.ok, "morphism validate", {**r.to_json(), "lift": phi.to_json()["lift"]},
                        [f"  {v}" for v in r.violations])
    if args.action == "interior":
        ok = C.is_interior(phi)
        return _verdict(ok, "morphism interior", {}, [])
    if args.action == "bnormal":
        r = C.bnormal_report(phi)
        return _verdict(r.ok, "morphism bnormal", r.to_json(), [f"  {v}" for v in r.violations])
    if args.action == "split":
        s = C.boundary_decomposition(phi)
        return _verdict(True, "morphism split", s.to_json(),
                        [f"  part0 {[list(c) for c in s.part0]}", f"  part1 {[list(c) for c in s.part1]}"])
    raise StructuralError(f"unknown morphism action {args.action}")


# ---------------------------------------------------------------------------
# fibre products

def cmd_fp(args):
    from . import fibre_product as F
    doc = _read(args.doc)
    if args.action == "level-set":
        if io.detect_kind(doc) == "fibre_product":
            # preimage of the level under the X-side map
            kind, data = io.fp_from_doc(doc)
            if kind != "affine":
                raise StructuralError("level-set needs affine maps into R^n")
            S, vals = data[0].base, data[1].values
        else:
            S = io.smanifold_from_doc(doc)
            if "values" not in doc:
                raise StructuralError("level-set needs a 'values' section")
            vals = {int(v): [Fraction(x) for x in p] for v, p in doc["values"]}
        if args.z is None:
            raise StructuralError("level-set needs --z")
        z = [Fraction(x) for x in args.z.split(",")] if args.z.strip() else []
        L = F.level_set(S, vals, z)
        out = io.smanifold_to_doc(L.W)
        out["kind"] = "smanifold"
        return Outcome(True, out, doc=out)
    kind, data = io.fp_from_doc(doc)
    if kind == "combinatorial":
        g, h = data
    else:
        MX, g, cx, MY, h, cy = data
    if args.action == "check":
        v = F.check_transverse(g, h)
        ok = v.ok(args.strong)
        lines = [f"  transverse {v.transverse}", f"  strongly transverse {v.strongly_transverse}"]
        lines += [f"  strata {list(t)} dim {x['dim']} case {x['case']}" for t, x in sorted(v.triples.items())]
        return _verdict(ok, "fp check", v.to_json(), lines)
    if args.action == "abstract":
        r = F.abstract_fibre_product(g, h)
        lines = [f"  strata {list(t)} dim {x['dim']} case {x['case']}" for t, x in sorted(r.triples.items())]
        return _verdict(True, "fp abstract", r.to_json(), lines)
    if kind != "affine":
        if args.action == "orient":
            F.check_transverse(g, h)
            r = F.abstract_fibre_product(g, h)
            F.orient_fibre_product(r, None, None)
        raise StructuralError(f"fp {args.action} needs affine maps into R^n")
    if args.action == "product":
        P = F.geometric_product(MX.base, MY.base)
        out = io.smanifold_to_doc(P.S)
        out["kind"] = "smanifold"
        return Outcome(True, out, doc=out)
    if args.action == "geometric":
        r = F.geometric_fibre_product(g, h)
        out = io.smanifold_to_doc(r.W)
        out["kind"] = "smanifold"
        return Outcome(True, out, doc=out)
    if args.action == "orient":
        r = F.geometric_fibre_product(g, h)
        if cx is None or cy is None:
            raise StructuralError("fp orient needs orientation sections on X and Y")
        cert = F.orient_fibre_product(r, cx, cy)
        out = io.smanifold_to_doc(r.W)
        out.update(io.cert_to_doc(cert))
        out["kind"] = "smanifold"
        return Outcome(True, out, doc=out)
    if args.action == "corners":
        c = F.corner_fibre_product(MX, g, MY, h)
        out = io.corners_to_doc(c.M)
        out["kind"] = "corners"
        return Outcome(True, out, doc=out)
    raise StructuralError(f"unknown fp action {args.action}")


# ---------------------------------------------------------------------------
# towers, importer, corpus

def cmd_tower(args):
    from . import towers as T
    if args.action == "hawaiian":
        H = T.hawaiian_tower(args.m, {"z": "Z", "q": "Q", "z2": "Z2"}[args.ring])
        ok = H.compatible and H.ml.status == "holds_by_depth"
        lines = [f"  depth {i + 1}: {g.describe()} class {[str(x) for x in c]}"
                 for i, (g, c) in enumerate(zip(H.tower.groups, H.classes))]
        lines += [f"  compatible {H.compatible}", f"  mittag-leffler {H.ml.status}"]
        return _verdict(ok, "tower hawaiian", H.to_json(), lines)
    tw = io.tower_from_doc(_read(args.doc))
    if args.action == "limit":
        L = T.truncated_limit(tw)
        return _verdict(True, "tower limit", L.to_json(), [f"  limit {L.group.describe()} through depth {L.depth}"])
    if args.action == "ml":
        s = T.mittag_leffler_status(tw)
        return _verdict(s.status == "holds_by_depth", "tower ml", s.to_json(), [f"  status {s.status}"])
    raise StructuralError(f"unknown tower action {args.action}")


def cmd_import_cycle(args):
    from .importer import import_cycle, import_relative_cycle
    from .smanifold import fundamental_class
    c = io.cycle_from_doc(_read(args.doc))
    if args.relative:
        r = import_relative_cycle(c)
        ok = r.corner_ok and r.boundary_matches
        return _verdict(ok, "import-cycle", r.to_json(),
                        [f"  corner orientation {r.corner_ok}", f"  boundary matches {r.boundary_matches}"])
    r = import_cycle(c)
    rep = r.to_json()
    lines = [f"  orientation {r.verdict}", f"  boundary zero {r.boundary_zero}"]
    if r.verdict:
        coords, pres, _ = fundamental_class(r.S, r.cert)
        rep["fundamental_class"] = [str(x) for x in coords]
        rep["homology"] = pres.describe()
        lines.append(f"  class {rep['fundamental_class']} in {pres.describe()}")
    return _verdict(r.verdict and r.agree, "import-cycle", rep, lines)


def cmd_corpus(args):
    from .corpus import BUILDERS
    if args.name not in BUILDERS:
        raise StructuralError(f"unknown corpus entry {args.name!r}; known: {', '.join(sorted(BUILDERS))}")
    kwargs = {}
    if args.m is not None:
        kwargs["m"] = args.m
    for p in args.param or []:
        key, _, val = p.partition("=")
        kwargs[key] = Fraction(val) if "/" in val else int(val)
    try:
        entry = BUILDERS[args.name](**kwargs)
    except TypeError:
        raise StructuralError(f"corpus entry {args.name!r} does not take {sorted(kwargs)}") from None
    out = io.entry_to_doc(entry)
    return Outcome(True, out, doc=out)


# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="smanifolds", description="Checks for combinatorial s-manifolds.")
    p.add_argument("--json", action="store_true", help="machine-readable report")
    sub = p.add_subparsers(dest="command", required=True)

    def doc_arg(sp):
        sp.add_argument("doc", nargs="?", default="-", help="document path (default: stdin)")

    sp = sub.add_parser("validate")
    doc_arg(sp)
    sp.set_defaults(func=cmd_validate)
    sp = sub.add_parser("homology")
    doc_arg(sp)
    sp.add_argument("--ring", choices=["z", "z2", "q"], default="z")
    sp.add_argument("--dim", type=int)
    sp.set_defaults(func=cmd_homology)
    for name, fn in (("orient", cmd_orient), ("z2class", cmd_z2class)):
        sp = sub.add_parser(name)
        doc_arg(sp)
        sp.set_defaults(func=fn)
    sp = sub.add_parser("corners")
    sp.add_argument("action", choices=["validate", "space", "boundary", "strata", "simplicial"])
    doc_arg(sp)
    sp.add_argument("--k", type=int)
    sp.set_defaults(func=cmd_corners)
    sp = sub.add_parser("morphism")
    sp.add_argument("action", choices=["validate", "interior", "bnormal", "split"])
    doc_arg(sp)
    sp.set_defaults(func=cmd_morphism)
    sp = sub.add_parser("fp")
    sp.add_argument("action", choices=["check", "abstract", "product", "level-set", "geometric", "orient", "corners"])
    doc_arg(sp)
    sp.add_argument("--z", help="comma-separated level (level-set)")
    sp.add_argument("--strong", action="store_true", help="require strong transversality (check)")
    sp.set_defaults(func=cmd_fp)
    sp = sub.add_parser("tower")
    sp.add_argument("action", choices=["limit", "ml", "hawaiian"])
    doc_arg(sp)
    sp.add_argument("--m", type=int, default=3)
    sp.add_argument("--ring", choices=["z", "z2", "q"], default="z")
    sp.set_defaults(func=cmd_tower)
    sp = sub.add_parser("import-cycle")
    doc_arg(sp)
    sp.add_argument("--relative", action="store_true", help="promote the boundary to corner data")
    sp.set_defaults(func=cmd_import_cycle)
    sp = sub.add_parser("corpus")
    sp.add_argument("name")
    sp.add_argument("--m", type=int)
    sp.add_argument("--param", action="append", help="builder parameter key=value")
    sp.set_defaults(func=cmd_corpus)
    return p


def run(argv=None, stdout=None):
    """Run the CLI; returns (exit code, output text)."""
    from .fibre_product import OrientationRefused
    args = build_parser().parse_args(argv)
    try:
        out = args.func(args)
    except OrientationRefused as e:
        name = " ".join(x for x in (args.command, getattr(args, "action", None)) if x)
        out = Outcome(False, {"command": name, "ok": False, "refused": str(e)},
                      [f"{name}: fail", f"  refused: {e}"])
    except (StructuralError, ArithmeticError) as e:
        rep = {"command": args.command, "error": str(e)}
        text = io.dumps(rep) if args.json else f"error: {e}\n"
        return 2, text
    if out.doc is not None:
        text = io.dumps(out.doc)
    elif args.json:
        text = io.dumps(out.report)
    else:
        text = "\n".join(out.lines) + "\n"
    return (0 if out.ok else 1), text


def main(argv=None):
    code, text = run(argv)
    stream = sys.stdout if code != 2 or "--json" in (argv or sys.argv[1:]) else sys.stderr
    stream.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
