from __future__ import annotations

from pathlib import Path

import pytest

from fisec.catalog import builtin_guideline
from fisec.dsl import parse_model, parse_overlay
from fisec.engine import run_analysis

DATA = Path(__file__).parent / "data"

CORPUS = [
    "empty.fis",
    "single_function.fis",
    "cyclic_flow.fis",
    "custom_kind.fis",
    "example.fis",
    "isolated_function.fis",
]


def load_model(name: str):
    result = parse_model((DATA / name).read_text(encoding="utf-8"), filename=name)
    assert result.ok, [d.render() for d in result.diagnostics]
    return result.value


@pytest.fixture(scope="session")
def example_model():
    return load_model("example.fis")


@pytest.fixture(scope="session")
def catalog():
    return builtin_guideline()


@pytest.fixture(scope="session")
def refinement_overlay():
    result = parse_overlay((DATA / "check_refinement.ovl").read_text(encoding="utf-8"), filename="check_refinement.ovl")
    assert result.ok, [d.render() for d in result.diagnostics]
    return result.value


@pytest.fixture(scope="session")
def example_analysis(example_model, catalog):
    analysis = run_analysis(example_model, catalog)
    assert not any(d.severity == "error" for d in analysis.diagnostics)
    return analysis


@pytest.fixture(scope="session")
def refined_analysis(example_model, catalog, refinement_overlay):
    analysis = run_analysis(example_model, catalog, overlay=refinement_overlay)
    assert not any(d.severity == "error" for d in analysis.diagnostics)
    return analysis
