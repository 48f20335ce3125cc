"""Batch operator interface: import/export, search, scoring, viz, serve.

Exit codes: 0 success, 1 domain error, 2 usage error. Human-readable
tables go to stdout; ``--csv`` switches to machine CSV.
"""

from __future__ import annotations

import argparse
import csv as csv_module
import sys
from pathlib import Path

from . import csvio, patql, scoring, search, service, viz
from .config import ServiceConfig
from .errors import PatGraphError
from .model import FadKnowledgeBase
from .pattern import ABSENT
from .store import GraphEdge, GraphNode


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        return 2
    try:
        return args.handler(args)
    except PatGraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="patgraph",
        description="FAD knowledge base: annotate, search, score, and visualize designs.",
    )
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument("--snapshot", help="snapshot file (overrides config)")
    parser.add_argument("--lexicon", help="lexicon CSV (overrides config)")
    commands = parser.add_subparsers(dest="command")

    cmd = commands.add_parser("import", help="load annotation sheets from a directory")
    cmd.add_argument("directory")
    cmd.set_defaults(handler=cmd_import)

    cmd = commands.add_parser("export", help="write one design's sheets to a directory")
    cmd.add_argument("design_id")
    cmd.add_argument("directory")
    cmd.set_defaults(handler=cmd_export)

    cmd = commands.add_parser("search", help="semantic / full-text / raw search")
    cmd.add_argument("--mode", choices=("semantic", "fulltext", "raw"), required=True)
    cmd.add_argument("--keywords", help="comma-separated keywords (fulltext)")
    cmd.add_argument(
        "--field",
        action="append",
        default=[],
        metavar="NAME=VALUE",
        help="semantic field filter, repeatable",
    )
    cmd.add_argument("--expand-synonyms", action="store_true")
    cmd.add_argument("--raw-query", help="PatQL text (raw mode)")
    cmd.add_argument("--csv", action="store_true")
    cmd.set_defaults(handler=cmd_search)

    cmd = commands.add_parser("query", help="run a PatQL file ('-' for stdin)")
    cmd.add_argument("file")
    cmd.add_argument("--csv", action="store_true")
    cmd.set_defaults(handler=cmd_query)

    cmd = commands.add_parser("score", help="rank the corpus against a design")
    cmd.add_argument("design_id")
    cmd.add_argument("--kind", default="patent", help="corpus kind (default patent)")
    cmd.add_argument("--weights", metavar="G,F,FN,DIV", help="override 10,20,30,60")
    cmd.add_argument("--csv", action="store_true")
    cmd.set_defaults(handler=cmd_score)

    cmd = commands.add_parser("viz", help="emit DOT or GraphJSON for a design")
    cmd.add_argument("design_id")
    cmd.add_argument("--format", choices=("dot", "graphjson"), default="dot")
    cmd.add_argument("--level", default="designer-name",
                     help="designer-name | patmine-type | supertype:N")
    cmd.add_argument("--highlight", help="overlap against this design id")
    cmd.add_argument("--out", help="write to file instead of stdout")
    cmd.set_defaults(handler=cmd_viz)

    cmd = commands.add_parser("lexicon", help="lexicon inspection")
    cmd.add_argument("action", choices=("stats",))
    cmd.add_argument("--csv", action="store_true")
    cmd.set_defaults(handler=cmd_lexicon)

    cmd = commands.add_parser("serve", help="run the HTTP service")
    # SUPPRESS keeps the global --config value when the flag is not repeated here
    cmd.add_argument("--config", dest="config", default=argparse.SUPPRESS)
    cmd.add_argument("--host")
    cmd.add_argument("--port", type=int)
    cmd.set_defaults(handler=cmd_serve)

    return parser


def _config(args) -> ServiceConfig:
    overrides = {
        "snapshot_path": args.snapshot,
        "lexicon_path": args.lexicon,
        "listen_host": getattr(args, "host", None),
        "listen_port": getattr(args, "port", None),
    }
    return ServiceConfig.load(config_file=args.config, overrides=overrides)


def _open_kb(args) -> tuple[FadKnowledgeBase, ServiceConfig]:
    config = _config(args)
    return service.load_knowledge_base(config), config


# --- commands ------------------------------------------------------------------


def cmd_import(args) -> int:
    kb, config = _open_kb(args)
    report = csvio.import_annotation_csv(kb, args.directory)
    service.persist(kb, config)
    rows = [
        [sheet, str(report.created[sheet]), str(report.merged[sheet])]
        for sheet in csvio.SHEETS
    ]
    _print_table(["sheet", "created", "merged"], rows)
    for error in report.errors:
        print(f"row error: {error.sheet}:{error.row}: {error.message}", file=sys.stderr)
    return 0 if report.ok else 1


def cmd_export(args) -> int:
    kb, _ = _open_kb(args)
    written = csvio.write_annotation_csv(kb, args.design_id, args.directory)
    for path in written:
        print(path)
    return 0


def cmd_search(args) -> int:
    kb, _ = _open_kb(args)
    if args.mode == "fulltext":
        keywords = [k.strip() for k in (args.keywords or "").split(",") if k.strip()]
        hits = search.fulltext_search(kb, keywords, expand_synonyms=args.expand_synonyms)
        return _print_hits(hits, args.csv)
    if args.mode == "semantic":
        fields = {}
        for item in args.field:
            name, _, value = item.partition("=")
            fields[name.strip()] = value.strip()
        hits = search.semantic_search(kb, fields)
        return _print_hits(hits, args.csv)
    if not args.raw_query:
        print("error: --raw-query is required in raw mode", file=sys.stderr)
        return 2
    return _run_patql(kb, args.raw_query, args.csv)


def cmd_query(args) -> int:
    kb, _ = _open_kb(args)
    text = sys.stdin.read() if args.file == "-" else Path(args.file).read_text(encoding="utf-8")
    return _run_patql(kb, text, args.csv)


def cmd_score(args) -> int:
    kb, _ = _open_kb(args)
    weights = scoring.DEFAULT_WEIGHTS
    if args.weights:
        parts = [p.strip() for p in args.weights.split(",")]
        if len(parts) != 4:
            print("error: --weights needs four numbers g,f,fn,div", file=sys.stderr)
            return 2
        weights = scoring.ScoringWeights(*(float(p) for p in parts))
    results = scoring.score_corpus(kb, args.design_id, kind=args.kind, weights=weights)
    if args.csv:
        sys.stdout.write(scoring.scores_to_csv(results))
        return 0
    rows = [
        [
            result.unique_id,
            f"{result.score.raw:.4f}",
            f"{result.score.normalized:.4f}",
            str(result.counts.geometries),
            str(result.counts.fgis),
            str(result.counts.functions),
        ]
        for result in results
    ]
    _print_table(["patent", "raw", "normalized", "geometries", "fgis", "functions"], rows)
    return 0


def cmd_viz(args) -> int:
    kb, _ = _open_kb(args)
    level = viz.AbstractionLevel.parse(args.level)
    if args.format == "dot":
        report = (
            scoring.compute_overlap(kb, args.design_id, args.highlight)
            if args.highlight
            else None
        )
        output = viz.to_dot(kb, args.design_id, level, report)
    else:
        document = viz.design_to_graphjson(kb, args.design_id)
        output = viz.graphjson_dumps(document) + "\n"
    if args.out:
        Path(args.out).write_text(output, encoding="utf-8")
    else:
        sys.stdout.write(output)
    return 0


def cmd_lexicon(args) -> int:
    kb, _ = _open_kb(args)
    terms = kb.lexicon.terms()
    if args.csv:
        sys.stdout.write(kb.lexicon.to_csv())
        return 0
    rows = [
        [t.category, t.term, t.domain, str(t.usage_count), ";".join(t.synonyms)]
        for t in terms
    ]
    _print_table(["category", "term", "domain", "count", "synonyms"], rows)
    return 0


def cmd_serve(args) -> int:
    service.serve(_config(args))
    return 0


# --- output helpers ---------------------------------------------------------------


def _run_patql(kb: FadKnowledgeBase, text: str, as_csv: bool) -> int:
    ast = patql.parse_query(text)
    rows = patql.execute_query(kb.store, ast)
    columns = [item.name for item in ast.returns]
    rendered = [[_render_cell(row[name]) for name in columns] for row in rows]
    if as_csv:
        writer = csv_module.writer(sys.stdout, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rendered)
    else:
        _print_table(columns, rendered)
    return 0


def _render_cell(value) -> str:
    if value is ABSENT:
        return "-"
    if isinstance(value, GraphNode):
        ident = _display_identity(value.props)
        return f"({value.principal_label} {ident})" if ident else f"({value.principal_label} #{value.id})"
    if isinstance(value, GraphEdge):
        return f"[{value.type} #{value.id}]"
    return str(value)


_IDENTITY_KEYS = ("Patent_Number", "filename", "Product_ID", "Geometric_ID", "claim_id", "name")


def _display_identity(props) -> str:
    for key in _IDENTITY_KEYS:
        if key in props:
            return str(props[key])
    return ""


def _print_hits(hits, as_csv: bool) -> int:
    if as_csv:
        writer = csv_module.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["design", "kind", "match_rank", "matches"])
        for hit in hits:
            writer.writerow([hit.unique_id, hit.kind, f"{hit.match_rank:g}", len(hit.items)])
        return 0
    rows = [
        [hit.unique_id, hit.kind, f"{hit.match_rank:g}", str(len(hit.items))]
        for hit in hits
    ]
    _print_table(["design", "kind", "match_rank", "matches"], rows)
    for hit in hits:
        for item in hit.items:
            marker = " (synonym)" if item.via_synonym else ""
            print(
                f"  {hit.unique_id}: {item.element_kind}.{item.property_key} "
                f"= {item.keyword!r} weight {item.weight:g}{marker}"
            )
    return 0


def _print_table(header: list[str], rows: list[list[str]]) -> None:
    widths = [len(h) for h in header]
    for row in rows:
        for index, cell in enumerate(row):
            widths[index] = max(widths[index], len(cell))
    line = "  ".join(h.ljust(widths[i]) for i, h in enumerate(header))
    print(line)
    print("  ".join("-" * w for w in widths))
    for row in rows:
        print("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)))


if __name__ == "__main__":
    sys.exit(main())
