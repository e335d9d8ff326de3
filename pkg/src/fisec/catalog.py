"""Guideline catalog: losses, hazards and the IFB/LS template library.

The built-in guideline ships as a catalog text file inside the package, so
user-supplied catalogs and the built-in one go through the same parser.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources

from .diagnostics import Diagnostic, error, warning
from .model import Responsibility


class InstructorMajor(str, Enum):
    """Top-level identification instructor."""

    NPCH = "NPCH"  # not providing causes hazard
    PCH = "PCH"    # providing causes hazard
    TI = "TI"      # timing issue


class InstructorMinor(str, Enum):
    NOT_CALLED = "not_called"
    NOT_EXECUTED_SUCCESSFULLY = "not_executed_successfully"
    INCORRECT_DATA_INPUT = "incorrect_data_input"
    IMPROPER_ALGORITHM = "improper_algorithm"
    INFORMATION_LEAKAGE_RISK = "information_leakage_risk"
    VIOLATE_TIME_LIMIT = "violate_time_limit"


MAJOR_OF: dict[InstructorMinor, InstructorMajor] = {
    InstructorMinor.NOT_CALLED: InstructorMajor.NPCH,
    InstructorMinor.NOT_EXECUTED_SUCCESSFULLY: InstructorMajor.NPCH,
    InstructorMinor.INCORRECT_DATA_INPUT: InstructorMajor.PCH,
    InstructorMinor.IMPROPER_ALGORITHM: InstructorMajor.PCH,
    InstructorMinor.INFORMATION_LEAKAGE_RISK: InstructorMajor.PCH,
    InstructorMinor.VIOLATE_TIME_LIMIT: InstructorMajor.TI,
}


class CausalCategory(str, Enum):
    """Where the causal factor of a loss scenario lives."""

    ALGORITHM = "algorithm"
    INPUT = "input"
    CALLING_BEHAVIOR = "calling_behavior"
    COMPUTING_RESOURCE = "computing_resource"
    ON_LINK = "on_link"


@dataclass(frozen=True)
class Loss:
    id: str
    description: str


@dataclass(frozen=True)
class Hazard:
    id: str
    description: str
    linked_losses: tuple[str, ...]


@dataclass(frozen=True)
class InstructorCategory:
    major: InstructorMajor
    minor: InstructorMinor

    def __post_init__(self) -> None:
        if MAJOR_OF[self.minor] is not self.major:
            raise ValueError(f"minor '{self.minor.value}' belongs to {MAJOR_OF[self.minor].value}, "
                             f"not {self.major.value}")

    @classmethod
    def from_minor(cls, minor: InstructorMinor) -> InstructorCategory:
        return cls(MAJOR_OF[minor], minor)


@dataclass(frozen=True)
class IfbTemplate:
    """One insecure-function-behavior template, expanded per matching function."""

    id: str
    responsibility: Responsibility
    instructor: InstructorCategory
    description_template: str  # may contain {function} and {component}
    linked_hazards: tuple[str, ...]


@dataclass(frozen=True)
class LsTemplate:
    """One loss-scenario template, expanded under its parent IFB."""

    id: str
    parent_ifb: str
    causal_category: CausalCategory
    description_template: str


@dataclass(frozen=True)
class Catalog:
    losses: tuple[Loss, ...] = ()
    hazards: tuple[Hazard, ...] = ()
    ifb_templates: tuple[IfbTemplate, ...] = ()
    ls_templates: tuple[LsTemplate, ...] = ()

    def loss_by_id(self, loss_id: str) -> Loss | None:
        return next((l for l in self.losses if l.id == loss_id), None)

    def hazard_by_id(self, hazard_id: str) -> Hazard | None:
        return next((h for h in self.hazards if h.id == hazard_id), None)

    def ifb_by_id(self, template_id: str) -> IfbTemplate | None:
        return next((t for t in self.ifb_templates if t.id == template_id), None)

    def ls_by_id(self, template_id: str) -> LsTemplate | None:
        return next((t for t in self.ls_templates if t.id == template_id), None)

    def ls_children(self, ifb_template_id: str) -> list[LsTemplate]:
        """LS templates parented by the given IFB template, in catalog order."""
        return [t for t in self.ls_templates if t.parent_ifb == ifb_template_id]


def validate_catalog(catalog: Catalog) -> list[Diagnostic]:
    """Check cross-references and linkage; empty result means a sound catalog."""
    diags: list[Diagnostic] = []
    for label, items in (("loss", catalog.losses), ("hazard", catalog.hazards),
                         ("ifb template", catalog.ifb_templates),
                         ("ls template", catalog.ls_templates)):
        seen: set[str] = set()
        for item in items:
            if item.id in seen:
                diags.append(error("DUPLICATE_ID", f"{label} id '{item.id}' declared twice",
                                   subject_id=item.id))
            seen.add(item.id)

    loss_ids = {l.id for l in catalog.losses}
    hazard_ids = {h.id for h in catalog.hazards}
    ifb_ids = {t.id for t in catalog.ifb_templates}

    for hz in catalog.hazards:
        if not hz.linked_losses:
            diags.append(error("ORPHAN_HAZARD", f"hazard '{hz.id}' links no loss",
                               subject_id=hz.id))
        for ref in hz.linked_losses:
            if ref not in loss_ids:
                diags.append(error("DANGLING_REF",
                                   f"hazard '{hz.id}' links undeclared loss '{ref}'",
                                   subject_id=hz.id))

    for tpl in catalog.ifb_templates:
        # A hazardless template still expands; the gap is reported again, as an
        # error, on every expanded instance by the trace lints.
        if not tpl.linked_hazards:
            diags.append(warning("UNLINKED_IFB", f"ifb template '{tpl.id}' links no hazard",
                                 subject_id=tpl.id))
        for ref in tpl.linked_hazards:
            if ref not in hazard_ids:
                diags.append(error("DANGLING_REF",
                                   f"ifb template '{tpl.id}' links undeclared hazard '{ref}'",
                                   subject_id=tpl.id))

    parented: set[str] = set()
    for tpl in catalog.ls_templates:
        if tpl.parent_ifb not in ifb_ids:
            diags.append(error("DANGLING_REF",
                               f"ls template '{tpl.id}' references undeclared parent '{tpl.parent_ifb}'",
                               subject_id=tpl.id))
        parented.add(tpl.parent_ifb)

    for tpl in catalog.ifb_templates:
        if tpl.id not in parented:
            diags.append(warning("CHILDLESS_IFB",
                                 f"ifb template '{tpl.id}' has no loss-scenario child",
                                 subject_id=tpl.id))
    return diags


def templates_for(catalog: Catalog, responsibility: Responsibility) -> list[IfbTemplate]:
    """IFB templates matching a responsibility, in catalog order."""
    return [t for t in catalog.ifb_templates if t.responsibility is responsibility]


@lru_cache(maxsize=1)
def builtin_guideline() -> Catalog:
    """The built-in guideline catalog, parsed once from the packaged file."""
    from .dsl import parse_catalog

    text = builtin_guideline_text()
    result = parse_catalog(text, filename="<builtin>")
    if result.value is None:  # pragma: no cover - shipped data must be sound
        details = "; ".join(d.render() for d in result.diagnostics)
        raise RuntimeError(f"packaged guideline catalog is invalid: {details}")
    return result.value


def builtin_guideline_text() -> str:
    """Raw text of the packaged guideline catalog."""
    return resources.files("fisec").joinpath("data/guideline.cat").read_text(encoding="utf-8")
