"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a mathematical verdict is
negative (not Galois, no universal mapping property, ...), 2 on input
errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import catalog
from .dot import curve_dot, lattice_dot
from .errors import (
    FibersDoNotRefine,
    GaloisError,
    GroupError,
    IncompatibleMiddleCurve,
    ModelError,
    MorphismError,
    OffsetOutOfRange,
    ParseError,
    RefinementConflict,
    UnknownExample,
)
from .group import generate_group
from .galois import classify_covering, galois_correspondence, ump_check
from .lengths import format_length
from .morphism import check_finite_morphism, check_harmonic
from .quotient import quotient
from .report import FAIL, INFO, PASS, Report, verdict
from .textio import format_action, format_curve, load

INPUT_ERRORS = (ParseError, ModelError, MorphismError, GroupError, UnknownExample, OSError,
                IncompatibleMiddleCurve, RefinementConflict, OffsetOutOfRange,
                FibersDoNotRefine)


class UsageError(Exception):
    pass


def _load_inputs(curve_path, action_path=None):
    docs = load(curve_path)
    if action_path is not None:
        docs = docs.merge(load(action_path, docs.curves))
    return docs


def _pick_action(doc, name):
    if name is not None:
        if name not in doc.actions:
            raise UsageError(f"no action named {name!r}; have {sorted(doc.actions)}")
        return doc.actions[name]
    g = doc.first("action")
    if g is None:
        raise UsageError("no action block found")
    return g


def _write(path, text):
    Path(path).write_text(text)


# -- commands ----------------------------------------------------------------


def cmd_validate(args) -> Report:
    rep = Report("validate")
    curves = {}
    for path in args.files:
        doc = load(path, curves)
        curves.update(doc.curves)
        for kind, name in doc.order:
            if kind == "curve":
                c = doc.curves[name]
                rep.add("validate.curve", PASS, name=name, vertices=len(c.vertices),
                        edges=len(c.edges), loopless=c.loopless)
                rep.line(f"curve {name}: {len(c.vertices)} vertices, {len(c.edges)} edges, "
                         f"total length {format_length(c.total_length)}, "
                         f"{'loopless' if c.loopless else 'with loops'}")
            elif kind == "morphism":
                m = doc.morphisms[name]
                v = check_finite_morphism(m, strict=False)
                if not v.ok:
                    rep.add("validate.morphism.finite", FAIL, name=name,
                            errors=[str(e) for e in v.errors])
                    rep.line(f"morphism {name}: not a finite morphism: {v.errors[0]}")
                    continue
                try:
                    cert = check_harmonic(m)
                except MorphismError as exc:
                    rep.add("validate.morphism.harmonic", FAIL, name=name, error=str(exc))
                    rep.line(f"morphism {name}: finite, not harmonic: {exc}")
                else:
                    rep.add("validate.morphism.harmonic", PASS, name=name,
                            degree=cert.global_degree)
                    rep.line(f"morphism {name}: finite harmonic of degree {cert.global_degree}")
            else:
                g = doc.actions[name]
                rep.add("validate.action", PASS, name=name, order=g.order)
                rep.line(f"action {name} on {g.curve.name}: group of order {g.order}")
    return rep


def _quotient_report(rep: Report, q, curve, group):
    rep.line(f"quotient of {curve.name} by {group.name} (|G| = {group.order})")
    if q.refinement.new_points():
        rep.line("equivariant refinement at: "
                 + ", ".join(str(p) for p in q.refinement.new_points()))
    rep.line("")
    vrows = [r for r in q.orbit_table if r.kind == "vertex"]
    erows = [r for r in q.orbit_table if r.kind == "edge"]
    rep.line("vertex orbits")
    rep.table(("representative", "orbit size", "stabilizer order"),
              [(r.representative, r.orbit_size, r.stabilizer_order) for r in vrows])
    rep.line("")
    rep.line("edge orbits")
    rep.table(("representative", "orbit size", "stabilizer order", "quotient length"),
              [(r.representative, r.orbit_size, r.stabilizer_order, r.length) for r in erows])
    rep.line("")
    deg = check_harmonic(q.projection).global_degree
    rep.line(f"projection degree: {deg}")
    for r in q.orbit_table:
        fields = dict(kind=r.kind, representative=r.representative, orbit_size=r.orbit_size,
                      stabilizer_order=r.stabilizer_order)
        if r.kind == "edge":
            fields["quotient_length"] = r.length
        rep.add("quotient.orbit", INFO, **fields)
    rep.add("quotient.degree", verdict(deg == group.order), degree=deg, group_order=group.order)
    lengths_ok = all(r.length == q.quotient_curve.edge(r.representative).length for r in erows)
    rep.add("quotient.length_rule", verdict(lengths_ok))


def cmd_quotient(args) -> Report:
    doc = _load_inputs(args.curve, args.action)
    group = _pick_action(doc, args.group)
    curve = group.curve
    q = quotient(curve, group)
    rep = Report("quotient")
    _quotient_report(rep, q, curve, group)
    if args.emit:
        _write(args.emit, format_curve(q.quotient_curve))
    if args.dot:
        _write(args.dot, curve_dot(q.quotient_curve))
    return rep


def _covering(doc, args, group):
    if args.covering is None:
        return quotient(group.curve, group).projection
    extra = load(args.covering, doc.curves)
    m = extra.first("morphism")
    if m is not None:
        return m
    g = extra.first("action")
    if g is None:
        raise UsageError(f"{args.covering} has neither a morphism nor an action")
    return quotient(g.curve, g).projection


def cmd_classify(args) -> Report:
    doc = _load_inputs(args.curve, args.action)
    group = _pick_action(doc, args.group)
    phi = _covering(doc, args, group)
    c = classify_covering(phi, group)
    rep = Report("classify")
    rep.line(f"covering {phi.name} of degree {c.degree} under {group.name} (|G| = {group.order})")
    rep.table(("property", "holds"),
              [("preGalois", c.is_pre_galois), ("normal", c.is_normal), ("Galois", c.is_galois)])
    rep.line("")
    rep.line("exceptional set U': " + (", ".join(c.exceptional_set) or "(empty)"))
    if c.failing_witness:
        rep.line(f"witness: {_witness_text(c.failing_witness)}")
    theta = c.theta
    rep.add("classify.finite_harmonic", PASS, degree=c.degree)
    rep.add("classify.pre_galois", verdict(c.is_pre_galois),
            theta=theta.classification, theta_degree=theta.degree)
    rep.add("classify.normal", verdict(c.is_normal))
    rep.add("classify.galois", verdict(c.is_galois), exceptional_set=list(c.exceptional_set),
            witness=_witness_text(c.failing_witness) if c.failing_witness else None)
    return rep


def _witness_text(w) -> str:
    if isinstance(w, tuple) and w and w[0] == "edge-stabilizer":
        return f"edge {w[1]} is fixed by {', '.join(w[2])}"
    if isinstance(w, tuple) and w and w[0] == "theta":
        return f"factor map is {w[1]} (degree {w[2]})"
    return str(w)


def cmd_correspondence(args) -> Report:
    doc = _load_inputs(args.curve, args.action)
    group = _pick_action(doc, args.group)
    phi = _covering(doc, args, group)
    corr = galois_correspondence(phi, group, jobs=args.jobs)
    rep = Report("correspondence")
    rep.line(f"Galois correspondence for {phi.name} under {group.name} (|G| = {group.order})")
    rep.line("")
    rows = []
    for e in corr.entries:
        q = e.quotient.quotient_curve
        rows.append((e.index, e.label, e.order, len(q.vertices), len(q.edges),
                     q.total_length, e.theta.classification, e.theta_degree,
                     e.phi_psi, e.psi_phi))
        rep.add("correspondence.entry", verdict(e.phi_psi and e.psi_phi
                                                and e.theta.is_finite_harmonic
                                                and e.theta_degree * e.order == group.order),
                index=e.index, subgroup=e.label, order=e.order,
                quotient_total_length=q.total_length, theta=e.theta.classification,
                theta_degree=e.theta_degree, phi_psi=e.phi_psi, psi_phi=e.psi_phi)
    rep.table(("#", "subgroup", "order", "|V'|", "|E'|", "length", "theta", "deg theta",
               "Phi.Psi", "Psi.Phi"), rows)
    bad = [c for c in corr.order_checks if not c.ok]
    rep.line("")
    rep.line(f"order reversal: {len(corr.order_checks) - len(bad)}/{len(corr.order_checks)} "
             "ordered pairs agree")
    rep.add("correspondence.roundtrip_phi_psi", verdict(corr.roundtrip_phi_psi))
    rep.add("correspondence.roundtrip_psi_phi", verdict(corr.roundtrip_psi_phi))
    rep.add("correspondence.order_reversal", verdict(corr.order_reversal),
            pairs=len(corr.order_checks),
            failures=[f"{c.first}<{c.second}" for c in bad])
    if args.dot:
        _write(args.dot, lattice_dot(corr))
    return rep


def cmd_ump(args) -> Report:
    doc = _load_inputs(args.curve, args.action)
    group = _pick_action(doc, args.group)
    phi = quotient(group.curve, group).projection
    if args.psi is not None:
        extra = load(args.psi, doc.curves)
        psi = extra.first("morphism")
        if psi is None:
            g = _pick_action(extra, args.psi_group)
            psi = quotient(g.curve, g).projection
    elif args.psi_group is not None:
        g = _pick_action(doc, args.psi_group)
        psi = quotient(g.curve, g).projection
    else:
        raise UsageError("ump needs a psi file or --psi-group")
    fr = ump_check(phi, group, psi)
    rep = Report("ump")
    ok = fr.is_finite_harmonic
    deg_phi, deg_psi = fr.degrees
    rep.line(f"phi = {phi.name} (degree {deg_phi}), psi = {psi.name} (degree {deg_psi})")
    rep.line(f"theta with psi = theta . phi: {fr.classification}")
    if ok:
        rep.line(f"theta is finite harmonic of degree {fr.degree}")
    else:
        scales = fr.non_integral_scales
        if scales:
            rep.line("non-integral scale factors: "
                     + ", ".join(f"{e}: {format_length(s)}" for e, s in sorted(scales.items())))
        rep.line(f"degree mismatch: deg(phi) = {deg_phi}, deg(psi) = {deg_psi}")
    rep.add("ump.factor", verdict(ok), classification=fr.classification,
            theta_degree=fr.degree, deg_phi=deg_phi, deg_psi=deg_psi,
            non_integral_scales=fr.non_integral_scales)
    return rep


def cmd_example(args) -> Report:
    ex = catalog.build_example(args.name, *args.params)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = ex.name
    curve_path = out / f"{stem}.curve"
    action_path = out / f"{stem}.action"
    _write(curve_path, format_curve(ex.curve))
    blocks = [format_action(ex.group)]
    for extra in _extra_actions(ex):
        blocks.append(format_action(extra))
    _write(action_path, "\n".join(blocks))
    rep = Report("example")
    rep.line(f"{ex.description}")
    rep.line(f"wrote {curve_path}")
    rep.line(f"wrote {action_path}")
    rep.add("example.written", PASS, name=stem, curve=str(curve_path), action=str(action_path))
    return rep


def _extra_actions(ex):
    """Further named actions shipped with an example (for ump and friends)."""
    if ex.name == "theta_sigma3":
        return [ex.action("sigma", label="sigma")]
    if ex.name == "star6":
        return [ex.action("beta", label="H"), ex.action("gamma", label="gamma")]
    if ex.name == "star5":
        return [ex.action("gamma", label="gamma")]
    if ex.name.endswith("_rotation"):
        n = len(ex.curve.edges)
        out = []
        for k in range(1, n):
            if n % k == 0:
                step = catalog.rotation(ex.curve, n, n // k)
                out.append(generate_group(ex.curve, [step], name=f"Z{k}"))
        return out
    return []


def cmd_export_dot(args) -> Report:
    doc = load(args.curve)
    curve = doc.first("curve")
    if curve is None:
        raise UsageError(f"{args.curve} has no curve block")
    morphism = None
    if args.morphism is not None:
        extra = load(args.morphism, doc.curves)
        morphism = extra.first("morphism")
        if morphism is None:
            g = extra.first("action")
            if g is None:
                raise UsageError(f"{args.morphism} has neither a morphism nor an action")
            morphism = quotient(g.curve, g).projection
        curve = morphism.source
    text = curve_dot(curve, morphism)
    if args.dot:
        _write(args.dot, text)
    rep = Report("export-dot")
    rep.text.append(text.rstrip())
    rep.add("export_dot.written", PASS, nodes=len(curve.vertices), edges=len(curve.edges))
    rep.raw = text if not args.dot else None
    return rep


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("--format", choices=("text", "records"), default="text")
    common.add_argument("--emit", metavar="PATH", help="write the resulting curve file")
    common.add_argument("--dot", metavar="PATH", help="write a DOT rendering")

    p = argparse.ArgumentParser(prog="tropgal", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="parse and validate input files")
    s.add_argument("files", nargs="+")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("quotient", parents=[common], help="quotient curve and orbit table")
    s.add_argument("curve")
    s.add_argument("action")
    s.add_argument("--group", help="name of the action block to use")
    s.set_defaults(func=cmd_quotient)

    s = sub.add_parser("classify", parents=[common], help="classify a quotient covering")
    s.add_argument("curve")
    s.add_argument("action")
    s.add_argument("covering", nargs="?", help="morphism or action file (default: quotient)")
    s.add_argument("--group")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("correspondence", parents=[common], help="verify the Galois correspondence")
    s.add_argument("curve")
    s.add_argument("action")
    s.add_argument("covering", nargs="?")
    s.add_argument("--group")
    s.set_defaults(func=cmd_correspondence)

    s = sub.add_parser("ump", parents=[common], help="universal mapping property check")
    s.add_argument("curve")
    s.add_argument("action")
    s.add_argument("psi", nargs="?", help="morphism or action file for psi")
    s.add_argument("--group", help="action defining phi")
    s.add_argument("--psi-group", help="action whose quotient map is psi")
    s.set_defaults(func=cmd_ump)

    s = sub.add_parser("example", parents=[common], help="write a built-in example")
    s.add_argument("name", choices=sorted(catalog.CATALOG))
    s.add_argument("params", nargs="*", help="e.g. '12 rotation' for cycle")
    s.add_argument("--out", default=".", help="output directory")
    s.set_defaults(func=cmd_example)

    s = sub.add_parser("export-dot", parents=[common], help="DOT rendering of a curve")
    s.add_argument("curve")
    s.add_argument("morphism", nargs="?", help="colour edges by fibers of this map")
    s.set_defaults(func=cmd_export_dot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rep = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except INPUT_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except GaloisError as exc:
        witness = getattr(exc, "witness", None)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        if witness is not None:
            print(f"witness: {_witness_text(witness)}", file=sys.stderr)
        if args.format == "records":
            r = Report(args.command)
            r.add(f"{args.command}.precondition", FAIL, error=type(exc).__name__,
                  message=str(exc))
            sys.stdout.write(r.render("records"))
        return 1
    raw = getattr(rep, "raw", None)
    if raw is not None and args.format == "text":
        sys.stdout.write(raw)
    else:
        sys.stdout.write(rep.render(args.format))
    return 1 if rep.failed else 0


if __name__ == "__main__":
    sys.exit(main())
