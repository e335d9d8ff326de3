"""Command-line interface driving the whole pipeline.

Exit codes: 0 clean; 1 semantic errors or lint findings; 2 parse failure;
3 usage error. Reports go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .catalog import builtin_guideline, builtin_guideline_text
from .diagnostics import Diagnostic, Severity, has_errors
from .dsl import parse_catalog, parse_model, parse_overlay
from .engine import DEFAULT_MODES, Analysis, ConstraintKind, run_analysis
from .ids import natural_key
from .report import emit_dot, emit_json, emit_markdown
from .trace import (CAUSAL_LABELS, NodeNotFoundError, TraceGraph, build_trace_graph,
                    collect_lints)

# Failures of the syntactic layer exit 2; everything semantic exits 1.
_SYNTAX_CODES = frozenset({
    "LEX_ERROR", "SYNTAX_ERROR", "DUPLICATE_ID", "UNKNOWN_KEYWORD", "RESERVED_ID",
    "NONCONTIGUOUS_INDEX", "DUPLICATE_VARIANT", "DANGLING_REF",
})


class _UsageError(Exception):
    pass


class _Abort(Exception):
    def __init__(self, code: int):
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 3 on usage problems, not argparse's 2
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="fisec",
                     description="Guideline-driven security analysis of "
                                 "functional interaction structures.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_inputs(p: _Parser) -> None:
        p.add_argument("model", help="system model file (*.fis)")
        p.add_argument("--catalog", help="guideline catalog file (*.cat); "
                                         "defaults to the built-in guideline")
        p.add_argument("--overlay", help="refinement overlay file (*.ovl)")
        p.add_argument("--modes", default="inversion,reaction",
                       help="constraint kinds to derive (comma-separated)")

    p_validate = sub.add_parser("validate", help="parse and validate everything")
    add_inputs(p_validate)
    p_validate.set_defaults(handler=_cmd_validate)

    p_analyze = sub.add_parser("analyze", help="run the full analysis pipeline")
    add_inputs(p_analyze)
    p_analyze.add_argument("--format", choices=("json", "md"), default="json")
    p_analyze.add_argument("--out", help="write the report to a file instead of stdout")
    p_analyze.set_defaults(handler=_cmd_analyze)

    p_trace = sub.add_parser("trace", help="query the traceability graph")
    add_inputs(p_trace)
    p_trace.add_argument("--from", dest="from_id", required=True, metavar="ID")
    p_trace.add_argument("--direction", choices=("up", "down"), default="up")
    p_trace.set_defaults(handler=_cmd_trace)

    p_report = sub.add_parser("report", help="emit a DOT graph")
    add_inputs(p_report)
    p_report.add_argument("--dot", choices=("trace", "fis"), required=True)
    p_report.add_argument("--out")
    p_report.set_defaults(handler=_cmd_report)

    p_catalog = sub.add_parser("catalog", help="catalog utilities")
    cat_sub = p_catalog.add_subparsers(dest="catalog_command", required=True)
    p_export = cat_sub.add_parser("export", help="print the built-in guideline catalog")
    p_export.add_argument("--out")
    p_export.set_defaults(handler=_cmd_catalog_export)

    return parser


def _read_text(path: str) -> str:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise _UsageError(f"fisec: error: cannot read '{path}': {exc.strerror or exc}")
    # invalid UTF-8 becomes U+FFFD, which the lexer rejects with a position
    return data.decode("utf-8", errors="replace")


def _print_diags(diags) -> None:
    for d in diags:
        print(d.render(), file=sys.stderr)


def _parse_failure_code(diags) -> int:
    syntactic = any(d.code in _SYNTAX_CODES and d.severity is Severity.ERROR for d in diags)
    return 2 if syntactic else 1


def _parse_modes(spec: str) -> tuple[ConstraintKind, ...]:
    modes: list[ConstraintKind] = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            kind = ConstraintKind(part)
        except ValueError:
            raise _UsageError(f"fisec: error: unknown mode '{part}' "
                              f"(expected inversion and/or reaction)")
        if kind not in modes:
            modes.append(kind)
    if not modes:
        raise _UsageError("fisec: error: --modes must enable at least one constraint kind")
    return tuple(modes)


def _run_pipeline(args) -> tuple[Analysis, TraceGraph, list[Diagnostic]]:
    model_result = parse_model(_read_text(args.model), args.model)
    if not model_result.ok:
        _print_diags(model_result.diagnostics)
        raise _Abort(_parse_failure_code(model_result.diagnostics))

    if args.catalog:
        catalog_result = parse_catalog(_read_text(args.catalog), args.catalog)
        if not catalog_result.ok:
            _print_diags(catalog_result.diagnostics)
            raise _Abort(_parse_failure_code(catalog_result.diagnostics))
        catalog = catalog_result.value
    else:
        catalog = builtin_guideline()

    overlay = None
    if args.overlay:
        overlay_result = parse_overlay(_read_text(args.overlay), args.overlay)
        if not overlay_result.ok:
            _print_diags(overlay_result.diagnostics)
            raise _Abort(_parse_failure_code(overlay_result.diagnostics))
        overlay = overlay_result.value

    analysis = run_analysis(model_result.value, catalog, overlay, _parse_modes(args.modes))
    if has_errors(analysis.diagnostics):
        _print_diags(analysis.diagnostics)
        raise _Abort(1)

    graph = build_trace_graph(analysis)
    lints = collect_lints(analysis, graph)
    return analysis, graph, lints


def _finish(analysis: Analysis, lints: list[Diagnostic]) -> int:
    _print_diags(list(analysis.diagnostics) + lints)
    return 1 if lints or has_errors(analysis.diagnostics) else 0


def _write_out(out: str | None, data: bytes) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(out).write_bytes(data)


def _cmd_validate(args) -> int:
    analysis, _graph, lints = _run_pipeline(args)
    return _finish(analysis, lints)


def _cmd_analyze(args) -> int:
    analysis, graph, lints = _run_pipeline(args)
    if args.format == "json":
        data = emit_json(analysis, graph)
    else:
        data = emit_markdown(analysis, graph).encode("utf-8")
    _write_out(args.out, data)
    return _finish(analysis, lints)


def _cmd_trace(args) -> int:
    analysis, graph, lints = _run_pipeline(args)
    try:
        start = graph.find(args.from_id)
    except NodeNotFoundError:
        print(f"error[NODE_NOT_FOUND] no node '{args.from_id}' in the trace graph",
              file=sys.stderr)
        return 1
    _print_tree(graph, start, upward=(args.direction == "up"))
    return _finish(analysis, lints)


def _print_tree(graph: TraceGraph, start, upward: bool) -> None:
    out = sys.stdout

    def walk(node, depth: int) -> None:
        out.write(f"{'  ' * depth}{node.id} [{node.kind.value}]\n")
        edges = graph.out_edges(node) if upward else graph.in_edges(node)
        nexts = [e.dst if upward else e.src for e in edges if e.label in CAUSAL_LABELS]
        for nxt in sorted(nexts, key=lambda n: natural_key(n.id)):
            walk(nxt, depth + 1)

    walk(start, 0)


def _cmd_report(args) -> int:
    analysis, graph, lints = _run_pipeline(args)
    if args.dot == "trace":
        text = emit_dot(graph, "trace")
    else:
        text = emit_dot(analysis.model, "fis")
    _write_out(args.out, text.encode("utf-8"))
    return _finish(analysis, lints)


def _cmd_catalog_export(args) -> int:
    _write_out(args.out, builtin_guideline_text().encode("utf-8"))
    return 0


def cli_main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 3
    except _Abort as exc:
        return exc.code


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))
