"""Expansion engine: IFB/LS instantiation, overlay refinement, constraints."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .catalog import Catalog, CausalCategory, IfbTemplate, LsTemplate, templates_for, validate_catalog
from .diagnostics import Diagnostic, error, has_errors, warning
from .dsl import Overlay
from .model import FunctionNode, SystemModel, validate_model


class ConstraintKind(str, Enum):
    INVERSION = "inversion"
    REACTION = "reaction"


DEFAULT_MODES: tuple[ConstraintKind, ...] = (ConstraintKind.INVERSION, ConstraintKind.REACTION)


@dataclass(frozen=True)
class IfbInstance:
    """A catalog IFB template applied to one concrete function."""

    id: str  # <fn>_<template>, refined variants add .<k>
    function: FunctionNode
    template: IfbTemplate
    description: str
    hazards: tuple[str, ...]


@dataclass(frozen=True)
class LsInstance:
    id: str
    parent: IfbInstance
    template: LsTemplate
    category: CausalCategory
    description: str
    invert_text: str | None = None  # analyst-supplied constraint wording
    react_text: str | None = None


@dataclass(frozen=True)
class Constraint:
    id: str  # SC-<n>, numbered sequentially per analysis run
    kind: ConstraintKind
    text: str
    linked_ls: tuple[str, ...]


@dataclass(frozen=True)
class Analysis:
    model: SystemModel
    catalog: Catalog
    ifb_instances: tuple[IfbInstance, ...] = ()
    ls_instances: tuple[LsInstance, ...] = ()
    constraints: tuple[Constraint, ...] = ()
    diagnostics: tuple[Diagnostic, ...] = ()


def _function_label(fn: FunctionNode) -> str:
    return f"{fn.name} ({fn.id})" if fn.name else fn.id


def _component_label(model: SystemModel | None, fn: FunctionNode) -> str:
    if model is not None:
        comp = model.component_by_id(fn.component)
        if comp is not None and comp.name:
            return comp.name
    return fn.component


def _render(template_text: str, fn: FunctionNode, component_label: str) -> str:
    # plain replacement, not str.format: user templates may contain stray braces
    return (template_text
            .replace("{function}", _function_label(fn))
            .replace("{component}", component_label))


def instantiate_ifbs(model: SystemModel, catalog: Catalog) -> list[IfbInstance]:
    """One instance per (function, matching template), both in declaration order."""
    instances: list[IfbInstance] = []
    for fn in model.functions:
        label = _component_label(model, fn)
        for tpl in templates_for(catalog, fn.responsibility):
            instances.append(IfbInstance(
                id=f"{fn.id}_{tpl.id}",
                function=fn,
                template=tpl,
                description=_render(tpl.description_template, fn, label),
                hazards=tpl.linked_hazards,
            ))
    return instances


def instantiate_lss(ifbs: list[IfbInstance], catalog: Catalog,
                    model: SystemModel | None = None) -> list[LsInstance]:
    """Expand each IFB instance's child LS templates in catalog order.

    The optional model resolves {component} in user-written LS templates to
    the component's display name; without it the component id is used.
    """
    out: list[LsInstance] = []
    for inst in ifbs:
        label = _component_label(model, inst.function)
        for tpl in catalog.ls_children(inst.template.id):
            out.append(LsInstance(
                id=f"{inst.id}_{tpl.id}",
                parent=inst,
                template=tpl,
                category=tpl.causal_category,
                description=_render(tpl.description_template, inst.function, label),
            ))
    return out


def apply_overlay(analysis: Analysis, overlay: Overlay) -> Analysis:
    """Replace targeted generic instances with their analyst-numbered variants.

    Refinements that fail a check (unknown target, widened hazards, foreign LS
    template) are skipped with an error diagnostic; the rest still apply.
    Constraints are dropped from the result: they must be re-derived after
    refinement.
    """
    diags = list(analysis.diagnostics)
    by_id = {inst.id: inst for inst in analysis.ifb_instances}
    plans: dict[str, tuple] = {}

    for ref in overlay.refinements:
        target = by_id.get(ref.target)
        if target is None:
            diags.append(error("UNKNOWN_TARGET",
                               f"refinement target '{ref.target}' does not exist in this analysis",
                               subject_id=ref.target))
            continue
        ok = True
        for var in ref.variants:
            if var.hazards is not None:
                widened = [h for h in var.hazards if h not in target.template.linked_hazards]
                if widened:
                    diags.append(error(
                        "HAZARD_ESCALATION",
                        f"variant {ref.target}.{var.index} links {', '.join(widened)} "
                        f"beyond template {target.template.id}",
                        subject_id=f"{ref.target}.{var.index}"))
                    ok = False
            for lv in var.ls_variants:
                tpl = analysis.catalog.ls_by_id(lv.ls_template)
                if tpl is None or tpl.parent_ifb != target.template.id:
                    diags.append(error(
                        "CATEGORY_MISMATCH",
                        f"ls template '{lv.ls_template}' is not a child of "
                        f"template {target.template.id}",
                        subject_id=f"{ref.target}.{var.index}"))
                    ok = False
        if ok and ref.target not in plans:
            plans[ref.target] = ref.variants

    generic_ls: dict[str, list[LsInstance]] = {}
    for ls in analysis.ls_instances:
        generic_ls.setdefault(ls.parent.id, []).append(ls)

    new_ifbs: list[IfbInstance] = []
    new_lss: list[LsInstance] = []
    for inst in analysis.ifb_instances:
        if inst.id not in plans:
            new_ifbs.append(inst)
            new_lss.extend(generic_ls.get(inst.id, []))
            continue
        label = _component_label(analysis.model, inst.function)
        for var in plans[inst.id]:
            refined = IfbInstance(
                id=f"{inst.id}.{var.index}",
                function=inst.function,
                template=inst.template,
                description=_render(var.description, inst.function, label),
                hazards=tuple(var.hazards) if var.hazards is not None else inst.template.linked_hazards,
            )
            new_ifbs.append(refined)
            for lv in var.ls_variants:
                tpl = analysis.catalog.ls_by_id(lv.ls_template)
                new_lss.append(LsInstance(
                    id=f"{refined.id}_{lv.ls_template}.{lv.index}",
                    parent=refined,
                    template=tpl,
                    category=tpl.causal_category,
                    description=_render(lv.description, inst.function, label),
                    invert_text=lv.invert_text,
                    react_text=lv.react_text,
                ))

    return replace(analysis, ifb_instances=tuple(new_ifbs), ls_instances=tuple(new_lss),
                   constraints=(), diagnostics=tuple(diags))


def _clause(description: str) -> str:
    return description[:-1] if description.endswith(".") else description


def derive_constraints(lss: list[LsInstance],
                       modes: tuple[ConstraintKind, ...] = DEFAULT_MODES) -> list[Constraint]:
    """One constraint per LS per enabled kind; identical (kind, text) merge."""
    enabled = [k for k in DEFAULT_MODES if k in modes]
    order: list[tuple[ConstraintKind, str]] = []
    linked: dict[tuple[ConstraintKind, str], list[str]] = {}
    for ls in lss:
        for kind in enabled:
            if kind is ConstraintKind.INVERSION:
                text = ls.invert_text or f"The system must prevent: {_clause(ls.description)}."
            else:
                text = ls.react_text or (f"If {_clause(ls.description)} occurs, it must be "
                                         f"detected and recorded, and the affected service "
                                         f"must be aborted.")
            key = (kind, text)
            if key not in linked:
                linked[key] = []
                order.append(key)
            if ls.id not in linked[key]:
                linked[key].append(ls.id)
    return [Constraint(f"SC-{n}", kind, text, tuple(linked[(kind, text)]))
            for n, (kind, text) in enumerate(order, start=1)]


def run_analysis(model: SystemModel, catalog: Catalog, overlay: Overlay | None = None,
                 modes: tuple[ConstraintKind, ...] = DEFAULT_MODES) -> Analysis:
    """Full pipeline: validate, instantiate, refine, derive. Pure and deterministic."""
    diags = validate_model(model) + validate_catalog(catalog)
    if has_errors(diags):
        return Analysis(model, catalog, diagnostics=tuple(diags))

    for fn in model.functions:
        if not templates_for(catalog, fn.responsibility):
            diags.append(warning("NO_TEMPLATES",
                                 f"no templates for responsibility '{fn.responsibility.value}' "
                                 f"of function '{fn.id}'",
                                 subject_id=fn.id))

    ifbs = instantiate_ifbs(model, catalog)
    lss = instantiate_lss(ifbs, catalog, model=model)
    analysis = Analysis(model, catalog, tuple(ifbs), tuple(lss), (), tuple(diags))
    if overlay is not None:
        analysis = apply_overlay(analysis, overlay)
    constraints = derive_constraints(list(analysis.ls_instances), modes)
    return replace(analysis, constraints=tuple(constraints))
