from __future__ import annotations

import json

import pytest

from fisec.catalog import builtin_guideline_text
from fisec.cli import cli_main

from conftest import DATA

import expansion_oracle as oracle

EXAMPLE = str(DATA / "example.fis")
OVERLAY = str(DATA / "check_refinement.ovl")


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = cli_main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# --- validate -------------------------------------------------------------------

def test_validate_clean_model_is_quiet(capsys):
    code, out, err = run(capsys, "validate", EXAMPLE)
    assert (code, out, err) == (0, "", "")


def test_validate_reports_semantic_errors(capsys, tmp_path):
    bad = tmp_path / "bad.fis"
    bad.write_text('function F-1 "f" in NOPE class=data_check\n', encoding="utf-8")
    code, out, err = run(capsys, "validate", str(bad))
    assert code == 1 and out == ""
    assert "DANGLING_COMPONENT" in err


def test_validate_syntax_failure_exits_two(capsys, tmp_path):
    bad = tmp_path / "bad.fis"
    bad.write_text("usecase 5\n", encoding="utf-8")
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 2
    assert "bad.fis:1:9" in err


def test_validate_lint_exits_one(capsys):
    code, _, err = run(capsys, "validate", str(DATA / "isolated_function.fis"))
    assert code == 1
    assert "UNREACHABLE_FUNCTION" in err and "F-7" in err


# --- analyze --------------------------------------------------------------------

def test_analyze_json_counts(capsys):
    code, out, err = run(capsys, "analyze", EXAMPLE, "--format", "json")
    assert code == 0 and err == ""
    doc = json.loads(out)
    assert len(doc["ifb_instances"]) == oracle.GOLDEN_IFB_COUNT
    assert len(doc["ls_instances"]) == oracle.GOLDEN_LS_COUNT
    assert len(doc["constraints"]) == oracle.GOLDEN_SC_COUNT


def test_analyze_markdown_format(capsys):
    code, out, _ = run(capsys, "analyze", EXAMPLE, "--format", "md")
    assert code == 0
    assert out.startswith("# Security Analysis Report\n")


def test_analyze_out_file_keeps_stdout_clean(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "analyze", EXAMPLE, "--out", str(target))
    assert code == 0 and out == ""
    doc = json.loads(target.read_text(encoding="utf-8"))
    assert doc["context"]["title"] == "Update software of DCU #1"


def test_analyze_with_overlay(capsys):
    code, out, _ = run(capsys, "analyze", EXAMPLE, "--overlay", OVERLAY)
    assert code == 0
    doc = json.loads(out)
    ids = [i["id"] for i in doc["ifb_instances"]]
    assert "F-1_IFB-2.1" in ids and "F-1_IFB-2" not in ids


def test_analyze_modes_subset(capsys):
    code, out, _ = run(capsys, "analyze", EXAMPLE, "--modes", "reaction")
    assert code == 0
    doc = json.loads(out)
    kinds = {c["kind"] for c in doc["constraints"]}
    assert kinds == {"reaction"}
    assert len(doc["constraints"]) == oracle.GOLDEN_LS_COUNT


def test_analyze_still_reports_while_linting(capsys):
    code, out, err = run(capsys, "analyze", str(DATA / "isolated_function.fis"))
    assert code == 1
    assert "UNREACHABLE_FUNCTION" in err
    doc = json.loads(out)  # the report is still produced
    assert [l["code"] for l in doc["lints"]] == ["UNREACHABLE_FUNCTION"]


def test_analyze_custom_catalog(capsys, tmp_path):
    cat = tmp_path / "tiny.cat"
    cat.write_text(
        'loss L-1 text="Loss of data"\n'
        'hazard H-1 losses=[L-1] text="System leaks."\n'
        'ifb IFB-1 class=data_transmission instructor=not_executed_successfully '
        'hazards=[H-1] text="Relay by {function} drops the data."\n'
        'ls LS-1 parent=IFB-1 category=on_link text="The link carrying {function} is cut."\n',
        encoding="utf-8")
    code, out, _ = run(capsys, "analyze", str(DATA / "single_function.fis"),
                       "--catalog", str(cat))
    assert code == 0
    doc = json.loads(out)
    assert [i["id"] for i in doc["ifb_instances"]] == ["F-1_IFB-1"]


def test_analyze_flags_functions_the_catalog_cannot_expand(capsys, tmp_path):
    cat = tmp_path / "check-only.cat"
    cat.write_text(
        'loss L-1 text="Loss of data"\n'
        'hazard H-1 losses=[L-1] text="System leaks."\n'
        'ifb IFB-1 class=data_check instructor=not_called hazards=[H-1] '
        'text="Check by {function} skipped."\n'
        'ls LS-1 parent=IFB-1 category=calling_behavior text="Nobody calls {function}."\n',
        encoding="utf-8")
    code, out, err = run(capsys, "analyze", EXAMPLE, "--catalog", str(cat))
    assert code == 1
    assert "NO_TEMPLATES" in err and "DEAD_FUNCTION" in err
    doc = json.loads(out)
    # the two data_check functions still expanded
    assert [i["id"] for i in doc["ifb_instances"]] == ["F-1_IFB-1", "F-4_IFB-1"]


# --- usage errors ---------------------------------------------------------------

def test_missing_file_is_a_usage_error(capsys):
    code, _, err = run(capsys, "analyze", "no-such-file.fis")
    assert code == 3 and "cannot read" in err


def test_unknown_mode_is_a_usage_error(capsys):
    code, _, err = run(capsys, "analyze", EXAMPLE, "--modes", "bogus")
    assert code == 3 and "unknown mode" in err


def test_unknown_flag_is_a_usage_error(capsys):
    code, _, err = run(capsys, "analyze", EXAMPLE, "--frobnicate")
    assert code == 3 and "usage" in err.lower()


def test_no_subcommand_is_a_usage_error(capsys):
    assert run(capsys, )[0] == 3


# --- trace ----------------------------------------------------------------------

def test_trace_up_ends_at_losses(capsys):
    code, out, _ = run(capsys, "trace", EXAMPLE, "--from", "SC-1", "--direction", "up")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "SC-1 [sc]"
    assert any(l.strip().startswith("L-") and l.rstrip().endswith("[loss]") for l in lines)


def test_trace_down_from_a_loss_reaches_constraints(capsys):
    code, out, _ = run(capsys, "trace", EXAMPLE, "--from", "L-3", "--direction", "down")
    assert code == 0
    assert "[sc]" in out


def test_trace_unknown_node(capsys):
    code, _, err = run(capsys, "trace", EXAMPLE, "--from", "XYZ-1")
    assert code == 1 and "NODE_NOT_FOUND" in err


# --- report / catalog -------------------------------------------------------------

def test_report_dot_trace(capsys):
    code, out, _ = run(capsys, "report", EXAMPLE, "--dot", "trace")
    assert code == 0 and out.startswith("digraph trace {")


def test_report_dot_fis_to_file(tmp_path, capsys):
    target = tmp_path / "fis.dot"
    code, out, _ = run(capsys, "report", EXAMPLE, "--dot", "fis", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text(encoding="utf-8").startswith("digraph fis {")


def test_catalog_export_prints_the_builtin_source(capsys):
    code, out, _ = run(capsys, "catalog", "export")
    assert code == 0
    assert out == builtin_guideline_text()


def test_catalog_export_to_file(tmp_path, capsys):
    target = tmp_path / "guideline.cat"
    code, _, _ = run(capsys, "catalog", "export", "--out", str(target))
    assert code == 0
    assert target.read_text(encoding="utf-8") == builtin_guideline_text()


# --- process-level entry points ----------------------------------------------------

def test_module_and_script_entry_points():
    import subprocess
    import sys

    for argv in ([sys.executable, "-m", "fisec", "validate", EXAMPLE],):
        proc = subprocess.run(argv, capture_output=True)
        assert proc.returncode == 0, proc.stderr
