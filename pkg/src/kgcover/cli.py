"""Command-line driver.

Commands (see README for the file formats):

    kg validate <file> [--no-sources] [--local-convexity]
    kg cover    <covering-file> [--name NAME]
    kg tower    <tower-file> --levels N
    kg ktheory  <graph-or-tower-file> [--closed-form] [--levels N]
                [--continuation repeat-last|none|geometric:<json>] [--window W]
    kg dynamics <tower-file> [--levels N] [--continuation ...]
    kg zoo      <family> <params...> [--levels N] [--base B]
                [--generator a,b,c,d] [--bases "a,b,c,d;..."]
    kg dot      <graph-file> [--collapse-parallel]

Reports are JSON on stdout (or --out); cover/tower/zoo emit files in the
input format and dot emits DOT text.  Exit codes: 0 success, 1 validation
failure (a report is still emitted), 2 parse error.  ``--figures DIR``
renders skeleton figures next to the report.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import closed_forms, dynamics, formats, report, zoo
from .construct import build_cover, build_tower
from .dotexport import export_dot
from .errors import KgError, ParseError, UnknownFamily
from .intmat import IntMatrix
from .ktheory import (koszul_homology, ktheory_1graph, ktheory_2graph,
                      ktheory_tower)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write_output(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit(rep: dict, out: str | None) -> None:
    _write_output(report.dumps(rep), out)


def _error_json(exc: KgError) -> dict:
    out = {"type": type(exc).__name__, "message": str(exc)}
    if getattr(exc, "witness", None) is not None:
        out["witness"] = repr(exc.witness)
    return out


def _parse_continuation(text):
    if text is None:
        return None          # not given: family metadata may apply
    if text == "none":
        return "none"        # explicit: overrides family metadata
    if text in ("repeat-last", "periodic"):
        return text
    if text.startswith("geometric:"):
        mats = json.loads(text[len("geometric:"):])
        return ("geometric", IntMatrix.from_rows(mats[0]),
                IntMatrix.from_rows(mats[1]))
    raise ParseError(f"unknown continuation rule {text!r}", 0)


def _figures_for_graph(graph, figdir, stem):
    from .figures import save_skeleton_figure
    os.makedirs(figdir, exist_ok=True)
    path = os.path.join(figdir, f"{stem}-skeleton.png")
    return [save_skeleton_figure(graph, path, title=stem)]


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_validate(args) -> int:
    text = _read(args.file)
    inputs = [(args.file, report.input_digest(text))]
    try:
        doc = formats.parse(text)
    except ParseError as exc:
        _emit(report.make_report("validate", inputs, "parse-error", None,
                                 errors=[_error_json(exc)]), args.out)
        return 2
    builder = formats.Builder(doc, require_no_sources=args.no_sources)
    decls = []
    failed = False
    figures = []
    for kind, name in doc.order:
        entry = {"name": name, "kind": kind}
        try:
            if kind == "kgraph":
                g = doc.graphs[name].build(
                    require_no_sources=args.no_sources,
                    check_local_convexity=args.local_convexity)
                entry.update({
                    "status": "ok", "rank": g.rank,
                    "vertices": len(g.vertices),
                    "edges": [len(g.edges_of_color(c))
                              for c in range(1, g.rank + 1)],
                    "no_sources": g.has_no_sources()})
                if args.local_convexity:
                    entry["locally_convex"] = g.local_convexity.holds
                    if not g.local_convexity.holds:
                        entry["local_convexity_witness"] = \
                            list(g.local_convexity.witness)
                if args.figures:
                    figures += _figures_for_graph(g, args.figures, name)
            elif kind == "covering":
                cs = builder.covering_system(name)
                entry.update({"status": "ok", "m": cs.m,
                              "fibers": list(cs.covering.fiber_profile),
                              "n_fold": cs.covering.is_nfold()})
            else:
                tw = builder.tower(name)
                entry.update({"status": "ok", "levels": tw.length + 1})
        except KgError as exc:
            entry["status"] = "invalid"
            entry["error"] = _error_json(exc)
            failed = True
        decls.append(entry)
    status = "invalid" if failed else "ok"
    _emit(report.make_report("validate", inputs, status,
                             {"declarations": decls}, figures=figures),
          args.out)
    return 1 if failed else 0


def _single(doc, table, what, name=None):
    if name:
        return name
    names = [n for k, n in doc.order if k == what]
    if len(names) != 1:
        raise ParseError(
            f"file declares {len(names)} {what}s; pick one with --name", 0)
    return names[0]


def cmd_cover(args) -> int:
    text = _read(args.file)
    inputs = [(args.file, report.input_digest(text))]
    try:
        doc = formats.parse(text)
        name = _single(doc, doc.coverings, "covering", args.name)
        cs = formats.Builder(doc).covering_system(name)
        cg = build_cover(cs)
    except ParseError as exc:
        _emit(report.make_report("cover", inputs, "parse-error", None,
                                 errors=[_error_json(exc)]), args.out)
        return 2
    except KgError as exc:
        _emit(report.make_report("cover", inputs, "invalid", None,
                                 errors=[_error_json(exc)]), args.out)
        return 1
    if args.figures:
        _figures_for_graph(cg.graph, args.figures, f"{name}-cover")
    out_doc = formats.document_for_graph(f"{name}-cover", cg.graph)
    _write_output(formats.render(out_doc), args.out)
    return 0


def cmd_tower(args) -> int:
    text = _read(args.file)
    inputs = [(args.file, report.input_digest(text))]
    try:
        doc = formats.parse(text)
        name = _single(doc, doc.towers, "tower", args.name)
        tw = formats.Builder(doc).tower(name)
        tg = build_tower(tw, args.levels or tw.length + 1)
    except ParseError as exc:
        _emit(report.make_report("tower", inputs, "parse-error", None,
                                 errors=[_error_json(exc)]), args.out)
        return 2
    except KgError as exc:
        _emit(report.make_report("tower", inputs, "invalid", None,
                                 errors=[_error_json(exc)]), args.out)
        return 1
    if args.figures:
        from .figures import save_tower_figure
        os.makedirs(args.figures, exist_ok=True)
        save_tower_figure(tg, os.path.join(args.figures, f"{name}-tower.png"),
                          title=name)
    out_doc = formats.document_for_graph(f"{name}-graph", tg.graph)
    _write_output(formats.render(out_doc), args.out)
    return 0


def _closed_form_result(meta, args):
    family = meta.get("family")
    if family is None:
        raise UnknownFamily("no family metadata in the file; closed forms "
                            "need zoo-emitted inputs")
    if family == "dn":
        return report.pair_json(closed_forms.closed_form_dn(meta["n"]))
    if family == "delta-quotient":
        basis = IntMatrix.from_rows(meta["basis"])
        return report.pair_json(
            closed_forms.closed_form_ktheory("delta-quotient", basis))
    if family == "delta-tower":
        cft = closed_forms.closed_form_delta_tower(
            [IntMatrix.from_rows(b) for b in meta["bases"]])
        return _closed_tower_json(cft)
    if family == "dn-tower":
        cft = closed_forms.closed_form_d_tower(meta["factors"],
                                               base=meta.get("base", 6))
        return _closed_tower_json(cft)
    if family == "pn-tower":
        levels = args.levels or len(meta.get("cycle_lengths", [])) or 2
        cft = closed_forms.closed_form_pn_tower(meta["n"], levels)
        return _closed_tower_json(cft)
    raise UnknownFamily(f"no closed form for family {family!r}")


def _closed_tower_json(cft):
    return {"kind": "closed-form-tower",
            "levels": [report.pair_json(p) for p in cft.levels],
            "K0_maps": [m.tolist() for m in cft.k0_maps],
            "K1_maps": [m.tolist() for m in cft.k1_maps],
            "notes": cft.notes}


def cmd_ktheory(args) -> int:
    text = _read(args.file)
    inputs = [(args.file, report.input_digest(text))]
    figures = []
    try:
        doc = formats.parse(text)
        builder = formats.Builder(doc)
        if args.closed_form:
            result = _closed_form_result(doc.meta(), args)
        elif doc.towers:
            name = _single(doc, doc.towers, "tower", args.name)
            tw = builder.tower(name)
            tk = ktheory_tower(tw, levels=args.levels,
                               continuation=_parse_continuation(
                                   args.continuation),
                               window=args.window)
            result = {
                "kind": "tower",
                "levels": [report.pair_json(p) for p in tk.levels],
                "maps": [report.kmap_json(m) for m in tk.maps],
                "K0_classification": tk.k0.to_json(),
                "K1_classification": tk.k1.to_json(),
                "vertex_order": "lexicographic on identifiers, per level",
                "notes": list(tk.notes)}
        else:
            name = _single(doc, doc.graphs, "kgraph", args.name)
            g = builder.graph(name)
            if args.figures:
                figures += _figures_for_graph(g, args.figures, name)
            if g.rank == 1:
                pair = ktheory_1graph(g)
            elif g.rank == 2:
                pair = ktheory_2graph(g)
            else:
                groups, conclusive = koszul_homology(g)
                result = {
                    "kind": "koszul",
                    "conclusive": conclusive,
                    "homology": [report.group_json(h) for h in groups],
                    "caveat": "rank >= 3: these are first-page homology "
                              "groups only; K-groups are not derived from "
                              "them (use a tower of rank <= 2 levels)"}
                _emit(report.make_report("ktheory", inputs, "ok", result,
                                         figures=figures), args.out)
                return 0
            result = dict(kind="graph", rank=g.rank,
                          vertex_order=list(g.vertices),
                          **report.pair_json(pair))
    except ParseError as exc:
        _emit(report.make_report("ktheory", inputs, "parse-error", None,
                                 errors=[_error_json(exc)]), args.out)
        return 2
    except KgError as exc:
        _emit(report.make_report("ktheory", inputs, "invalid", None,
                                 errors=[_error_json(exc)]), args.out)
        return 1
    _emit(report.make_report("ktheory", inputs, "ok", result,
                             figures=figures), args.out)
    return 0


def cmd_dynamics(args) -> int:
    text = _read(args.file)
    inputs = [(args.file, report.input_digest(text))]
    try:
        doc = formats.parse(text)
        name = _single(doc, doc.towers, "tower", args.name)
        tw = formats.Builder(doc).tower(name)
        rep = dynamics.tower_report(
            tw, levels=args.levels,
            continuation=_parse_continuation(args.continuation))
    except ParseError as exc:
        _emit(report.make_report("dynamics", inputs, "parse-error", None,
                                 errors=[_error_json(exc)]), args.out)
        return 2
    except KgError as exc:
        _emit(report.make_report("dynamics", inputs, "invalid", None,
                                 errors=[_error_json(exc)]), args.out)
        return 1
    _emit(report.make_report("dynamics", inputs, "ok", rep.to_json()),
          args.out)
    return 0


def _parse_matrix_arg(text: str) -> IntMatrix:
    vals = [int(x) for x in text.replace(";", ",").split(",")]
    n = int(len(vals) ** 0.5)
    if n * n != len(vals):
        raise ParseError("matrix argument must have a square number of "
                         "entries", 0)
    return IntMatrix.from_rows([vals[i * n:(i + 1) * n] for i in range(n)])


def cmd_zoo(args) -> int:
    family = args.family.lower().replace("_", "-")
    params = [int(x) for x in args.params]
    try:
        if family in ("dn", "ln", "bn", "tk"):
            g = zoo.make(family, params[0])
            meta = {"family": family, "n": params[0]}
            doc = formats.document_for_graph(f"{family}{params[0]}", g, meta)
        elif family == "delta-quotient":
            k = params[0]
            rows = [params[1 + i * k: 1 + (i + 1) * k] for i in range(k)]
            data = zoo.delta_quotient(k, IntMatrix.from_rows(rows))
            meta = {"family": family, "k": k, "basis": rows,
                    "order": data.order}
            doc = formats.document_for_graph("delta-quotient", data.graph,
                                             meta)
        elif family == "dn-tower":
            tw = zoo.dn_tower(params, base=args.base)
            doc = formats.document_for_tower("dn-tower", tw)
        elif family == "bd-tower":
            tw = zoo.bd_tower(params)
            doc = formats.document_for_tower("bd-tower", tw)
        elif family == "pn-tower":
            tw = zoo.pn_tower(params[0], args.levels or 3)
            doc = formats.document_for_tower("pn-tower", tw)
        elif family == "ir-tower":
            tw = zoo.ir_tower(params, args.levels or 4)
            doc = formats.document_for_tower("ir-tower", tw)
        elif family == "delta-tower":
            if args.generator:
                gen = _parse_matrix_arg(args.generator)
                tw = zoo.delta_power_tower(gen, args.levels or 3)
            elif args.bases:
                mats = [_parse_matrix_arg(b) for b in args.bases.split(";")]
                tw = zoo.delta_tower(mats)
            else:
                raise UnknownFamily(
                    "delta-tower needs --generator or --bases")
            doc = formats.document_for_tower("delta-tower", tw)
        else:
            raise UnknownFamily(f"unknown family {args.family!r}")
    except KgError as exc:
        _emit(report.make_report("zoo", [], "invalid", None,
                                 errors=[_error_json(exc)]), None)
        return 1
    _write_output(formats.render(doc), args.out)
    return 0


def cmd_dot(args) -> int:
    text = _read(args.file)
    inputs = [(args.file, report.input_digest(text))]
    try:
        doc = formats.parse(text)
        name = _single(doc, doc.graphs, "kgraph", args.name)
        g = formats.Builder(doc).graph(name)
    except ParseError as exc:
        _emit(report.make_report("dot", inputs, "parse-error", None,
                                 errors=[_error_json(exc)]), args.out)
        return 2
    except KgError as exc:
        _emit(report.make_report("dot", inputs, "invalid", None,
                                 errors=[_error_json(exc)]), args.out)
        return 1
    _write_output(export_dot(g, name=name,
                             collapse_parallel=args.collapse_parallel),
                  args.out)
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="kg", description="higher-rank graph covering toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, figures=True):
        p.add_argument("--out", help="write output to a file instead of "
                                     "stdout")
        p.add_argument("--name", help="declaration to use when the file "
                                      "holds several")
        if figures:
            p.add_argument("--figures", help="directory for skeleton "
                                             "figures (PNG)")

    p = sub.add_parser("validate", help="validate every declaration")
    p.add_argument("file")
    p.add_argument("--no-sources", action="store_true",
                   help="require the no-sources condition")
    p.add_argument("--local-convexity", action="store_true")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("cover", help="build the (k+1)-graph of a covering")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("tower", help="build a truncated tower graph")
    p.add_argument("file")
    p.add_argument("--levels", type=int)
    common(p)
    p.set_defaults(func=cmd_tower)

    p = sub.add_parser("ktheory", help="K-theory of a graph or tower")
    p.add_argument("file")
    p.add_argument("--closed-form", action="store_true")
    p.add_argument("--levels", type=int)
    p.add_argument("--continuation",
                   help="repeat-last | periodic | none | geometric:<json>")
    p.add_argument("--window", type=int, default=3)
    common(p)
    p.set_defaults(func=cmd_ktheory)

    p = sub.add_parser("dynamics", help="cofinality/aperiodicity report")
    p.add_argument("file")
    p.add_argument("--levels", type=int)
    p.add_argument("--continuation")
    common(p, figures=False)
    p.set_defaults(func=cmd_dynamics)

    p = sub.add_parser("zoo", help="emit a named family as a file")
    p.add_argument("family")
    p.add_argument("params", nargs="*")
    p.add_argument("--levels", type=int)
    p.add_argument("--base", type=int, default=6)
    p.add_argument("--generator", help="2x2 matrix a,b,c,d (row major)")
    p.add_argument("--bases", help="semicolon-separated matrices")
    p.add_argument("--out")
    p.set_defaults(func=cmd_zoo)

    p = sub.add_parser("dot", help="DOT export of a graph skeleton")
    p.add_argument("file")
    p.add_argument("--collapse-parallel", action="store_true")
    common(p, figures=False)
    p.set_defaults(func=cmd_dot)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
