"""Core system model: use-case context, components, functions and data flows.

A system is described as a functional interaction structure: functions hosted
in components, wired by directed data flows, with EXTERNAL marking the system
boundary. Everything is immutable; operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from .diagnostics import Diagnostic, error, warning
from .ids import EXTERNAL, ID_RE


class OperationType(str, Enum):
    SYNCHRONOUS = "synchronous"
    ASYNCHRONOUS = "asynchronous"
    UNSPECIFIED = "unspecified"


class Location(str, Enum):
    MANUFACTURER_PLACE = "manufacturer_place"
    ANYWHERE_ELSE = "anywhere_else"
    UNSPECIFIED = "unspecified"


class Connection(str, Enum):
    LOCAL = "local"
    REMOTE = "remote"
    UNSPECIFIED = "unspecified"


class ComponentKind(str, Enum):
    VEHICLE_INTERFACE = "vehicle_interface"
    NETWORK_LINK = "network_link"
    END_DEVICE = "end_device"
    EXTERNAL_ENTITY = "external_entity"
    CUSTOM = "custom"


class Responsibility(str, Enum):
    """What a function does to the data passing through it."""

    DATA_CHECK = "data_check"
    DATA_TRANSFORM = "data_transform"
    DATA_TRANSMISSION = "data_transmission"
    SERVICE_PROCESS = "service_process"


@dataclass(frozen=True)
class UseCaseContext:
    """Working-situation metadata; carried into reports, never filters expansion."""

    title: str = ""
    operation: OperationType = OperationType.UNSPECIFIED
    location: Location = Location.UNSPECIFIED
    connection: Connection = Connection.UNSPECIFIED


@dataclass(frozen=True)
class Component:
    id: str
    kind: ComponentKind
    name: str = ""
    custom_label: str | None = None

    def __post_init__(self) -> None:
        if (self.kind is ComponentKind.CUSTOM) != (self.custom_label is not None):
            raise ValueError("custom_label is required for custom kinds and forbidden otherwise")

    def kind_display(self) -> str:
        return self.custom_label if self.custom_label is not None else self.kind.value


@dataclass(frozen=True)
class FunctionNode:
    id: str
    name: str
    component: str  # component id; resolution is validate_model's job
    responsibility: Responsibility


@dataclass(frozen=True)
class DataFlow:
    id: str
    source: str  # function id or EXTERNAL
    sink: str
    via: str | None = None
    payload: str | None = None


@dataclass(frozen=True)
class SystemModel:
    context: UseCaseContext = field(default_factory=UseCaseContext)
    components: tuple[Component, ...] = ()
    functions: tuple[FunctionNode, ...] = ()
    flows: tuple[DataFlow, ...] = ()

    def component_by_id(self, component_id: str) -> Component | None:
        for c in self.components:
            if c.id == component_id:
                return c
        return None

    def function_by_id(self, function_id: str) -> FunctionNode | None:
        for f in self.functions:
            if f.id == function_id:
                return f
        return None


def validate_model(model: SystemModel) -> list[Diagnostic]:
    """Check referential and naming invariants; never raises."""
    diags: list[Diagnostic] = []
    for label, items in (("component", model.components),
                         ("function", model.functions),
                         ("flow", model.flows)):
        seen: set[str] = set()
        for item in items:
            if item.id in seen:
                diags.append(error("DUPLICATE_ID", f"{label} id '{item.id}' declared twice",
                                   subject_id=item.id))
            seen.add(item.id)
            if item.id == EXTERNAL:
                diags.append(error("RESERVED_ID", f"'{EXTERNAL}' cannot be used as a {label} id",
                                   subject_id=item.id))
            elif not ID_RE.match(item.id):
                diags.append(error("BAD_ID", f"{label} id '{item.id}' is not a valid identifier",
                                   subject_id=item.id))

    component_ids = {c.id for c in model.components}
    function_ids = {f.id for f in model.functions}

    for fn in model.functions:
        if fn.component not in component_ids:
            diags.append(error("DANGLING_COMPONENT",
                               f"function '{fn.id}' is placed in undeclared component '{fn.component}'",
                               subject_id=fn.id))

    for flow in model.flows:
        for endpoint in (flow.source, flow.sink):
            if endpoint != EXTERNAL and endpoint not in function_ids:
                diags.append(error("DANGLING_FLOW",
                                   f"flow '{flow.id}' references undeclared function '{endpoint}'",
                                   subject_id=flow.id))
        if flow.source == flow.sink:
            diags.append(error("SELF_FLOW", f"flow '{flow.id}' has identical source and sink",
                               subject_id=flow.id))
        if flow.via is not None:
            via = model.component_by_id(flow.via)
            if via is None:
                diags.append(error("DANGLING_FLOW",
                                   f"flow '{flow.id}' routes via undeclared component '{flow.via}'",
                                   subject_id=flow.id))
            elif via.kind is not ComponentKind.NETWORK_LINK:
                diags.append(error("VIA_NOT_LINK",
                                   f"flow '{flow.id}' routes via '{flow.via}', which is not a network_link",
                                   subject_id=flow.id))

    # A vehicle interface that never checks incoming data deserves a nudge.
    for comp in model.components:
        if comp.kind is ComponentKind.VEHICLE_INTERFACE:
            if not any(f.component == comp.id and f.responsibility is Responsibility.DATA_CHECK
                       for f in model.functions):
                diags.append(warning("VI_MISSING_CHECK",
                                     f"vehicle_interface '{comp.id}' hosts no data_check function",
                                     subject_id=comp.id))
    return diags


def entry_points(model: SystemModel) -> set[FunctionNode]:
    """Functions that receive a flow directly from EXTERNAL."""
    result: set[FunctionNode] = set()
    for flow in model.flows:
        if flow.source == EXTERNAL and flow.sink != EXTERNAL:
            fn = model.function_by_id(flow.sink)
            if fn is not None:
                result.add(fn)
    return result


def downstream_reachable(model: SystemModel, start: Iterable[FunctionNode]) -> set[FunctionNode]:
    """Transitive closure over function-to-function flows, start set included."""
    adjacency: dict[str, list[str]] = {}
    for flow in model.flows:
        if flow.source != EXTERNAL and flow.sink != EXTERNAL:
            adjacency.setdefault(flow.source, []).append(flow.sink)

    reached = {fn for fn in start}
    frontier = [fn.id for fn in reached]
    seen_ids = set(frontier)
    while frontier:
        current = frontier.pop()
        for nxt in adjacency.get(current, ()):
            if nxt in seen_ids:
                continue
            seen_ids.add(nxt)
            fn = model.function_by_id(nxt)
            if fn is not None:
                reached.add(fn)
                frontier.append(nxt)
    return reached
