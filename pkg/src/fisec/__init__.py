"""Guideline-driven security analysis of functional interaction structures."""

from .catalog import (Catalog, CausalCategory, Hazard, IfbTemplate, InstructorCategory,
                      InstructorMajor, InstructorMinor, Loss, LsTemplate, builtin_guideline,
                      templates_for, validate_catalog)
from .diagnostics import Diagnostic, Severity, SourcePosition
from .dsl import (IfbVariant, LsVariant, Overlay, ParseResult, Refinement, parse_catalog,
                  parse_model, parse_overlay, serialize_model)
from .engine import (Analysis, Constraint, ConstraintKind, DEFAULT_MODES, IfbInstance,
                     LsInstance, apply_overlay, derive_constraints, instantiate_ifbs,
                     instantiate_lss, run_analysis)
from .model import (Component, ComponentKind, Connection, DataFlow, FunctionNode, Location,
                    OperationType, Responsibility, SystemModel, UseCaseContext,
                    downstream_reachable, entry_points, validate_model)
from .report import emit_dot, emit_json, emit_markdown
from .trace import (EdgeLabel, NodeKind, NodeNotFoundError, TraceEdge, TraceGraph, TraceNode,
                    ancestors, build_trace_graph, collect_lints, completeness_lints,
                    descendants, reachability_lint)

__version__ = "0.1.0"
