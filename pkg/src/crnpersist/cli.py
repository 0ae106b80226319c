"""Command-line entry point ``crn``.

Exit codes: 0 success (or property holds), 1 property fails, 2 error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .analysis import analyze
from .dynamics import MassActionSystem, integrate
from .errors import CRNError, ExplosionCapError
from .feasibility import positive_kernel, positive_left_kernel
from .fileformat import NetworkDocument, load
from .network import stoichiometric_matrix
from .ptm import InvalidPTMError, cascade_persistence, validate_cascade, validate_ptm, ptm_persistence
from .reduction import (
    StepKind,
    primitive_reduction,
    remove_catalysts,
    remove_intermediates,
    validate_catalysts,
    validate_intermediates,
)
from .report import dumps, report_to_dict
from .siphons import classify_siphon, drainable_siphon, minimal_siphons, siphon_psemiflow_property

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _fmt_vec(v) -> str:
    return "(" + ", ".join(str(x) for x in v) + ")"


def _fmt_set(names, net) -> str:
    return "{" + ", ".join(sorted(names, key=net.index)) + "}"


def _indent(net, prefix="  ") -> str:
    if net.is_empty():
        return prefix + "(empty network)"
    return "\n".join(prefix + str(r) for r in net.reactions)


def _crn_files(path: Path) -> list[Path]:
    if path.is_dir():
        return sorted(path.glob("*.crn"))
    return [path]


def cmd_analyze(args, out) -> int:
    path = Path(args.path)
    results = []
    for file in _crn_files(path):
        doc = load(file)
        report = analyze(doc.network, assume_dissipative=args.assume_dissipative or doc.assume_dissipative)
        results.append((file, report))
    if args.json:
        if path.is_dir():
            payload = [{"file": f.name, "report": report_to_dict(r, f.stem)} for f, r in results]
        else:
            payload = report_to_dict(results[0][1], results[0][0].stem)
        out.write(dumps(payload))
        return EXIT_OK
    for file, report in results:
        net = report.network
        out.write(f"{file.name}: {net.n_species} species, {net.n_reactions} reactions\n")
        out.write(f"  conservative: {report.conservative}   consistent: {report.consistent}\n")
        out.write(f"  siphon/P-semiflow: {report.siphon_psemiflow}   drainable-free: {report.drainable_free}"
                  f"   self-replicable-free: {report.self_replicable_free}\n")
        out.write(f"  minimal siphons: {', '.join(_fmt_set(c.siphon, net) for c in report.siphons) or 'none'}\n")
        out.write(f"  reduction: {len(report.reduction)} steps, final network:\n")
        out.write(_indent(report.final_network, "    ") + "\n")
        for entry in report.verdicts:
            out.write(f"  verdict: {entry.verdict.value}  [{entry.rule}]\n")
    return EXIT_OK


def _apply_declared(doc: NetworkDocument, out, show: bool):
    net = doc.network
    if doc.intermediates:
        bad = validate_intermediates(net, doc.intermediates)
        if bad:
            raise CRNError("declared intermediates are invalid: " + "; ".join(map(str, bad)))
        net, _ = remove_intermediates(net, doc.intermediates)
        if show:
            out.write(f"declared intermediates {_fmt_set(doc.intermediates, doc.network)} removed:\n"
                      f"{_indent(net)}\n")
    if doc.catalysts:
        present = [c for c in doc.catalysts if net.has_species(c)]
        bad = validate_catalysts(net, present)
        if bad:
            raise CRNError("declared catalysts are invalid: " + "; ".join(map(str, bad)))
        before = net
        net, _ = remove_catalysts(net, present)
        if show:
            out.write(f"declared catalysts {_fmt_set(present, before)} removed:\n{_indent(net)}\n")
    return net


def cmd_reduce(args, out) -> int:
    doc = load(args.path)
    net = _apply_declared(doc, out, args.steps)
    final, trace = primitive_reduction(net)
    if args.steps:
        for k, step in enumerate(trace, 1):
            what = "intermediates" if step.kind is StepKind.INTERMEDIATES else "catalysts"
            out.write(f"step {k}: remove {what} {_fmt_set(step.removed, step.before)}\n")
            out.write(_indent(step.after) + "\n")
    out.write("primitive reduction:\n" + _indent(final) + "\n")
    return EXIT_OK


def cmd_siphons(args, out) -> int:
    net = load(args.path).network
    siphons = minimal_siphons(net)
    if not siphons:
        out.write("no siphons\n")
    for sigma in siphons:
        if not args.classify:
            out.write(_fmt_set(sigma, net) + "\n")
            continue
        c = classify_siphon(net, sigma)
        tags = [name for name, on in (("critical", c.critical), ("drainable", c.drainable),
                                      ("self-replicable", c.self_replicable)) if on]
        out.write(f"{_fmt_set(sigma, net)}: {', '.join(tags) or 'carries a P-semiflow'}\n")
        if c.semiflow:
            out.write(f"  semiflow {_fmt_vec(c.semiflow.vector)}\n")
        if c.drainable:
            out.write(f"  drain {_fmt_vec(c.drainable.vector)}\n")
        if c.self_replicable:
            out.write(f"  replicate {_fmt_vec(c.self_replicable.vector)}\n")
    return EXIT_OK


def cmd_check(args, out) -> int:
    net = load(args.path).network
    N = stoichiometric_matrix(net)
    prop = args.property
    if prop == "conservative":
        w = positive_left_kernel(N)
        holds, detail = w is not None, (f"conservation law {_fmt_vec(w.vector)}" if w else "")
    elif prop == "consistent":
        w = positive_kernel(N)
        holds, detail = w is not None, (f"flux {_fmt_vec(w.vector)}" if w else "")
    elif prop == "siphon-psemiflow":
        v = siphon_psemiflow_property(net)
        holds = v.holds
        detail = "" if holds else f"siphon {_fmt_set(v.violating_siphon, net)} carries no P-semiflow"
    else:
        found = drainable_siphon(net)
        holds = found is None
        detail = "" if holds else f"drainable siphon {_fmt_set(found[0], net)} via {_fmt_vec(found[1].vector)}"
    out.write(f"{prop}: {'holds' if holds else 'fails'}\n")
    if detail:
        out.write(f"  {detail}\n")
    return EXIT_OK if holds else EXIT_FAIL


def cmd_ptm(args, out) -> int:
    doc = load(args.path)
    if not doc.layers:
        raise CRNError("no @ptm annotation in file")
    net = doc.network
    if len(doc.layers) == 1:
        violations = validate_ptm(net, doc.layers[0])
    else:
        violations = validate_cascade(net, doc.cascade)
    if violations:
        for v in violations:
            out.write(f"invalid: {v}\n")
        return EXIT_FAIL
    verdict = ptm_persistence(net, doc.layers[0]) if len(doc.layers) == 1 else cascade_persistence(net, doc.cascade)
    for k, sub in enumerate(verdict.substrate_networks, 1):
        out.write(f"layer {k} substrate network:\n{_indent(sub)}\n")
    for label, value in verdict.table:
        out.write(f"  {label}: {value}\n")
    out.write(f"verdict: {verdict.verdict.value}\n")
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    doc = load(args.path)
    system = MassActionSystem.from_document(doc)
    record = integrate(system, args.horizon, dt=args.dt)
    net = doc.network
    out.write(f"t = {record.times[-1]:g}\n")
    width = max((len(s) for s in net.species), default=0)
    for name, x, lo in zip(net.species, record.final, record.minima):
        out.write(f"  {name:<{width}}  final {x:.6g}  min {lo:.6g}\n")
    out.write(f"residual {record.residual:.3e}, clamped {record.clamped}, halvings {record.halvings}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crn", description="Structural persistence analysis of reaction networks.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full analysis report")
    p.add_argument("path", help=".crn file or directory of them")
    p.add_argument("--json", action="store_true")
    p.add_argument("--assume-dissipative", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("reduce", help="primitive reduction")
    p.add_argument("path")
    p.add_argument("--steps", action="store_true", help="print every intermediate network")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("siphons", help="minimal siphons")
    p.add_argument("path")
    p.add_argument("--classify", action="store_true")
    p.set_defaults(func=cmd_siphons)

    p = sub.add_parser("check", help="test a single property (exit 0 holds, 1 fails)")
    p.add_argument("path")
    p.add_argument("--property", required=True,
                   choices=["conservative", "consistent", "siphon-psemiflow", "drainable"])
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("ptm", help="validate PTM annotations and decide persistence")
    p.add_argument("path")
    p.set_defaults(func=cmd_ptm)

    p = sub.add_parser("simulate", help="mass-action trajectory summary")
    p.add_argument("path")
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--dt", type=float, default=0.01)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return args.func(args, out)
    except ExplosionCapError as exc:
        print(f"crn: explosion cap reached: {exc}", file=sys.stderr)
    except InvalidPTMError as exc:
        print(f"crn: invalid PTM system: {exc}", file=sys.stderr)
    except (CRNError, ValueError, OSError) as exc:
        print(f"crn: error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
