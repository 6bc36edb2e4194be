"""Command-line front end.

Usage examples::

    rfdgraph check graph.txt
    rfdgraph density --format json graph.txt
    rfdgraph orbit graph.txt "e^inf"
    rfdgraph random --seed 7 --vertices 5
    rfdgraph dot --witness graph.txt

Exit codes: 0 RFD / success, 1 not RFD, 2 input error, 3 when the density
search and the condition deciders disagree.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import boundary as bd
from . import groupoid as gp
from . import oracle
from .conditions import BackwardChainGen, CycleWithExit, InfiniteReceiver, StrandedVertex, decide_rfd
from .presentation import OMEGA, PresentationError, components, format_card, parse, serialize

EXIT_RFD = 0
EXIT_NOT_RFD = 1
EXIT_INPUT = 2
EXIT_DISAGREE = 3

SCHEMA_PATH = Path(__file__).parent / "schema" / "report.schema.json"

_CONDITION_NAMES = {
    "a": "no infinite receiver",
    "b": "no cycle with an exit",
    "c": "no infinite backward chain",
    "d": "every vertex reaches a sink, cycle or infinite emitter",
}


# -- colour --------------------------------------------------------------


def _use_color(stream) -> bool:
    mode = os.environ.get("RFD_COLOR", "auto").lower()
    if mode == "always":
        return True
    if mode == "never":
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def _paint(text: str, ok: bool, color: bool) -> str:
    if not color:
        return text
    return f"\033[{32 if ok else 31}m{text}\033[0m"


# -- DOT -----------------------------------------------------------------


def _q(s: str) -> str:
    return '"' + s.replace('"', '\\"') + '"'


def witness_edges(g, witnesses) -> set:
    """Edge names (``label`` or ``label#k``) a set of witnesses points at."""
    out = set()
    for w in witnesses:
        if isinstance(w, InfiniteReceiver):
            out |= {str(e) for e in w.samples}
        elif isinstance(w, CycleWithExit):
            out |= {str(e) for e in w.cycle.edges} | {str(w.exit)}
        elif isinstance(w, BackwardChainGen):
            out |= {str(e) for e in w.chain(g, 3)}
    return out


def dot_export(g, witnesses=()) -> str:
    """Deterministic Graphviz rendering.

    Primitives show three representatives and a dotted edge standing for the
    rest of the family; omega arcs are drawn once with a bold ``x omega``
    label.  Edges and vertices named by ``witnesses`` are drawn in red.
    """
    hot = witness_edges(g, witnesses)
    hot_vertices = {w.vertex for w in witnesses if isinstance(w, (InfiniteReceiver, StrandedVertex))}
    lines = ["digraph G {", "  rankdir=LR;", '  node [shape=circle, style=filled, fillcolor="#dddddd"];']

    def node(v, extra=""):
        attrs = extra
        if v in hot_vertices:
            attrs += (", " if attrs else "") + "color=red, penwidth=2"
        lines.append(f"  {_q(v)}" + (f" [{attrs}]" if attrs else "") + ";")

    def edge(src, dst, name, extra=""):
        attrs = f"label={_q(name)}"
        if extra:
            attrs += ", " + extra
        if name in hot:
            attrs += ", color=red, penwidth=2"
        lines.append(f"  {_q(src)} -> {_q(dst)} [{attrs}];")

    for v in g.vertices:
        node(v)
    for a in g.arcs:
        if a.mult == OMEGA:
            edge(a.source, a.target, a.id, 'style=bold, xlabel="x omega"')
        else:
            for k in range(a.mult):
                edge(a.source, a.target, a.id if k == 0 else f"{a.id}#{k}")
    for p in g.primitives:
        t, v = p.tag, p.anchor
        small = 'fillcolor=white, style="filled,dashed"'
        more = _q(f"{t}...")
        lines.append(f"  {more} [shape=point];")
        if p.kind == "backray":
            for i in (-3, -2, -1):
                node(f"{t}[{i}]", small)
            for i in (-3, -2, -1):
                edge(f"{t}[{i}]", v if i == -1 else f"{t}[{i + 1}]", f"{t}#{i}")
            lines.append(f"  {more} -> {_q(f'{t}[-3]')} [style=dotted];")
            continue
        for i in (1, 2, 3):
            node(f"{t}[{i}]", small)
        for i in (1, 2, 3):
            if p.kind == "instar":
                edge(f"{t}[{i}]", v, f"{t}#{i}")
            elif p.kind == "outstar":
                edge(v, f"{t}[{i}]", f"{t}#{i}")
            else:
                edge(v if i == 1 else f"{t}[{i - 1}]", f"{t}[{i}]", f"{t}#{i}")
        if p.kind == "instar":
            lines.append(f"  {more} -> {_q(v)} [style=dotted];")
        elif p.kind == "outstar":
            lines.append(f"  {_q(v)} -> {more} [style=dotted];")
        else:
            lines.append(f"  {_q(f'{t}[3]')} -> {more} [style=dotted];")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- report rendering ----------------------------------------------------


def _check_human(report, color) -> str:
    verdict = "yes" if report.rfd else "no"
    out = [f"RFD: {_paint(verdict, report.rfd, color)}"]
    for key, res in report.results().items():
        state = _paint("holds" if res.holds else "fails", res.holds, color)
        line = f"{key}) {_CONDITION_NAMES[key]}: {state}"
        if res.witness is not None:
            line += f" -- {res.witness.describe()}"
        out.append(line)
    if len(report.components) > 1:
        out.append(f"components: {len(report.components)}")
    return "\n".join(out)


def _density_human(dens, report, color) -> str:
    p = dens.params
    out = [
        f"periodic points: {_paint(dens.outcome, dens.dense, color)}"
        f" (stem bound {p.stem_bound}, exclusion bound {p.exclusion_bound},"
        f" orbit cap {p.orbit_cap}, expand bound {p.width})",
        f"cylinders checked: {dens.cylinders_checked}",
    ]
    if dens.dense:
        for w in dens.witnesses[:10]:
            out.append(f"  {w.cylinder} contains {bd.format_point(w.point)}"
                       f" (orbit size {w.orbit_size}, isotropy {w.isotropy})")
        if len(dens.witnesses) > 10:
            out.append(f"  ... {len(dens.witnesses) - 10} more")
    else:
        out.append(f"no periodic point found in {dens.first_failure}")
        if dens.not_dense is not None:
            nd = dens.not_dense
            out.append(f"certificate on {nd.cylinder} ({nd.reason}): {nd.certificate.describe()}")
    out.append(f"conditions: RFD {'yes' if report.rfd else 'no'}")
    return "\n".join(out)


def _orbit_human(rep) -> str:
    x = bd.format_point(rep.point)
    if not rep.finite:
        return f"orbit of {x}: infinite\ncertificate: {rep.certificate.describe()}"
    out = [f"orbit of {x}: finite, size {rep.size}"]
    if rep.capped:
        out.append("members not listed (orbit cap exceeded)")
    else:
        out += [f"  {bd.format_point(m)}" for m in rep.members]
    return "\n".join(out)


def _expand_doc(t) -> dict:
    return {
        "bound": t.bound,
        "vertices": list(t.vertices),
        "edges": [{"name": str(e), "source": e.source, "target": e.target} for e in sorted(t.edges)],
    }


def _emit(args, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True)


def _load(args):
    if args.text is not None:
        if args.input is not None:
            raise PresentationError("give either an input file or --text, not both")
        return parse(args.text)
    if args.input is None:
        raise PresentationError("no input: give a file path or --text")
    return parse(Path(args.input).read_text())


# -- commands ------------------------------------------------------------


def cmd_check(args, g, color):
    report = decide_rfd(g)
    if args.format == "json":
        _emit(args, _dump({"command": "check", "report": report.to_document()}))
    else:
        _emit(args, _check_human(report, color))
    return EXIT_RFD if report.rfd else EXIT_NOT_RFD


def _density(args, g):
    return gp.periodic_density_check(g, args.stem_bound, args.exclusion_bound,
                                     args.orbit_cap, args.expand_bound)


def cmd_density(args, g, color):
    report = decide_rfd(g)
    dens = _density(args, g)
    agree = dens.dense == report.rfd
    if args.format == "json":
        _emit(args, _dump({"command": "density", "agree": agree, "report": dens.to_document(),
                           "conditions": report.to_document()}))
    else:
        text = _density_human(dens, report, color)
        if not agree:
            text += ("\nDISAGREEMENT: the density search and the conditions differ;"
                     " either a bug or the bounds are too small\n" + _check_human(report, color))
        _emit(args, text)
    if not agree:
        return EXIT_DISAGREE
    return EXIT_RFD if report.rfd else EXIT_NOT_RFD


def cmd_orbit(args, g, color):
    x = bd.parse_point(g, args.point)
    rep = gp.orbit(g, x, args.orbit_cap)
    if args.format == "json":
        _emit(args, _dump({"command": "orbit", "report": rep.to_document()}))
    else:
        _emit(args, _orbit_human(rep))
    return 0


def cmd_isotropy(args, g, color):
    x = bd.parse_point(g, args.point)
    grp = gp.isotropy(x)
    minimal = isinstance(grp, gp.Trivial) or gp.verify_minimal_period(x, grp.period)
    if args.format == "json":
        doc = {"point": bd.format_point(x), "group": gp._isotropy_doc(grp), "minimal_verified": minimal}
        _emit(args, _dump({"command": "isotropy", "report": doc}))
    else:
        _emit(args, f"isotropy of {bd.format_point(x)}: {grp}")
    return 0


def cmd_expand(args, g, color):
    t = oracle.expand(g, args.expand_bound or 3)
    if args.format == "json":
        _emit(args, _dump({"command": "expand", "report": _expand_doc(t)}))
    else:
        lines = [f"bound {t.bound}: {len(t.vertices)} vertices, {len(t.edges)} edges"]
        lines += [f"  {e}: {e.source} -> {e.target}" for e in sorted(t.edges)]
        _emit(args, "\n".join(lines))
    return 0


def cmd_validate(args, g, color):
    report = decide_rfd(g)
    for w in report.witnesses():
        w.validate(g)
    checked = 0
    if not report.rfd:
        dens = _density(args, g)
        if dens.not_dense is not None:
            checked = gp.validate_not_dense(g, dens.not_dense)
    doc = {
        "vertices": len(g.vertices),
        "arcs": len(g.arcs),
        "primitives": len(g.primitives),
        "components": len(components(g)),
        "witnesses_validated": len(report.witnesses()),
        "certificate_points_checked": checked,
    }
    if args.format == "json":
        _emit(args, _dump({"command": "validate", "report": doc}))
    else:
        _emit(args, "valid: " + ", ".join(f"{k} {v}" for k, v in doc.items()))
    return 0


def cmd_random(args, g, color):
    spec = oracle.RandomSpec(
        seed=args.seed,
        max_core_vertices=args.vertices,
        arc_density=args.density,
        omega_prob=args.omega_prob,
        instars=args.instars,
        outstars=args.outstars,
        backrays=args.backrays,
        fwdrays=args.fwdrays,
    )
    _emit(args, serialize(oracle.random_presentation(spec)))
    return 0


def cmd_dot(args, g, color):
    witnesses = decide_rfd(g).witnesses() if args.witness else ()
    _emit(args, dot_export(g, witnesses))
    return 0


COMMANDS = {
    "check": cmd_check,
    "density": cmd_density,
    "orbit": cmd_orbit,
    "isotropy": cmd_isotropy,
    "expand": cmd_expand,
    "validate": cmd_validate,
    "random": cmd_random,
    "dot": cmd_dot,
}


def _positive(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _nonnegative(text):
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rfdgraph", description="RFD checks for graph C*-algebras")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "json"), default="human")
    common.add_argument("--output", metavar="PATH")
    common.add_argument("--stem-bound", type=_nonnegative, default=4, metavar="L")
    common.add_argument("--exclusion-bound", type=_nonnegative, default=3, metavar="F")
    common.add_argument("--orbit-cap", type=_positive, default=64, metavar="K")
    common.add_argument("--expand-bound", type=_positive, default=None, metavar="B")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "random":
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--vertices", type=_positive, default=4)
            p.add_argument("--density", type=float, default=0.3)
            p.add_argument("--omega-prob", type=float, default=0.0)
            for kind in ("instars", "outstars", "backrays", "fwdrays"):
                p.add_argument(f"--{kind}", type=_nonnegative, default=0)
            continue
        p.add_argument("input", nargs="?", help="presentation file")
        p.add_argument("--text", help="presentation given inline")
        if name in ("orbit", "isotropy"):
            p.add_argument("point", help="boundary point, e.g. 'e^inf' or 'a.b'")
        if name == "dot":
            p.add_argument("--witness", action="store_true", help="highlight failing-condition witnesses")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    color = args.output is None and args.format == "human" and _use_color(sys.stdout)
    try:
        g = None if args.command == "random" else _load(args)
        return COMMANDS[args.command](args, g, color)
    except PresentationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except bd.PointError as exc:
        print(f"error: bad point: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
