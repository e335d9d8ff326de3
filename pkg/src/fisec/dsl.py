"""Text languages for the three input artifacts.

Three file kinds, one per artifact: ``*.fis`` system models, ``*.cat``
guideline catalogs, ``*.ovl`` refinement overlays. All parsers are total:
any input yields either a value or positioned error diagnostics, never an
exception or a partial result.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .catalog import (Catalog, CausalCategory, Hazard, IfbTemplate, InstructorCategory,
                      InstructorMinor, Loss, LsTemplate, validate_catalog)
from .diagnostics import Diagnostic, SourcePosition, error, has_errors
from .ids import EXTERNAL
from .lexer import Token, tokenize
from .model import (Component, ComponentKind, Connection, DataFlow, FunctionNode, Location,
                    OperationType, Responsibility, SystemModel, UseCaseContext)

__all__ = [
    "Diagnostic", "SourcePosition", "ParseResult",
    "Overlay", "Refinement", "IfbVariant", "LsVariant",
    "parse_model", "parse_catalog", "parse_overlay", "serialize_model",
]


@dataclass(frozen=True)
class LsVariant:
    """One analyst-numbered loss-scenario variant inside an IFB variant."""

    ls_template: str
    index: int
    description: str
    invert_text: str | None = None  # analyst wording for the inversion constraint
    react_text: str | None = None   # analyst wording for the reaction constraint


@dataclass(frozen=True)
class IfbVariant:
    index: int
    description: str
    hazards: tuple[str, ...] | None  # None = inherit the template's links
    ls_variants: tuple[LsVariant, ...]


@dataclass(frozen=True)
class Refinement:
    target: str  # generic IFB instance id, e.g. F-1_IFB-2
    variants: tuple[IfbVariant, ...]


@dataclass(frozen=True)
class Overlay:
    refinements: tuple[Refinement, ...] = ()


@dataclass(frozen=True)
class ParseResult:
    """Either a parsed value with (at most) warnings, or None with errors."""

    value: SystemModel | Catalog | Overlay | None
    diagnostics: tuple[Diagnostic, ...]

    @property
    def ok(self) -> bool:
        return self.value is not None


class _ParseError(Exception):
    def __init__(self, diag: Diagnostic):
        self.diag = diag


class _Cursor:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.k = 0

    def peek(self) -> Token:
        return self.tokens[self.k]

    def advance(self) -> Token:
        tok = self.tokens[self.k]
        if tok.kind != "EOF":
            self.k += 1
        return tok

    def at_eof(self) -> bool:
        return self.peek().kind == "EOF"

    def at_ident(self, *words: str) -> bool:
        tok = self.peek()
        return tok.kind == "IDENT" and tok.value in words

    def at_punct(self, value: str) -> bool:
        tok = self.peek()
        return tok.kind == "PUNCT" and tok.value == value


def _describe(tok: Token) -> str:
    if tok.kind == "EOF":
        return "end of input"
    if tok.kind == "STRING":
        return "a string"
    return f"'{tok.value}'"


def _fail(code: str, message: str, tok: Token) -> _ParseError:
    return _ParseError(error(code, message, tok.pos))


def _expect_ident(cur: _Cursor, what: str) -> Token:
    tok = cur.peek()
    if tok.kind != "IDENT":
        raise _fail("SYNTAX_ERROR", f"expected {what}, found {_describe(tok)}", tok)
    return cur.advance()


def _expect_declared_id(cur: _Cursor, what: str) -> Token:
    tok = _expect_ident(cur, what)
    if tok.value == EXTERNAL:
        raise _ParseError(error("RESERVED_ID", f"'{EXTERNAL}' cannot be declared as {what}", tok.pos))
    return tok


def _expect_string(cur: _Cursor, what: str) -> Token:
    tok = cur.peek()
    if tok.kind != "STRING":
        raise _fail("SYNTAX_ERROR", f"expected {what}, found {_describe(tok)}", tok)
    return cur.advance()


def _expect_int(cur: _Cursor, what: str) -> Token:
    tok = cur.peek()
    if tok.kind != "INT":
        raise _fail("SYNTAX_ERROR", f"expected {what}, found {_describe(tok)}", tok)
    return cur.advance()


def _expect_punct(cur: _Cursor, value: str) -> Token:
    tok = cur.peek()
    if not cur.at_punct(value):
        raise _fail("SYNTAX_ERROR", f"expected '{value}', found {_describe(tok)}", tok)
    return cur.advance()


def _expect_keyword(cur: _Cursor, word: str) -> Token:
    tok = cur.peek()
    if not cur.at_ident(word):
        raise _fail("SYNTAX_ERROR", f"expected '{word}', found {_describe(tok)}", tok)
    return cur.advance()


def _register(seen: set[str], id_tok: Token, label: str, errors: list[Diagnostic]) -> None:
    if id_tok.value in seen:
        errors.append(error("DUPLICATE_ID", f"{label} id '{id_tok.value}' declared twice",
                            id_tok.pos, subject_id=id_tok.value))
    seen.add(id_tok.value)


def _sync(cur: _Cursor, keywords: tuple[str, ...], k_before: int) -> None:
    """Skip to the next plausible declaration start so later errors surface too."""
    if cur.k == k_before and not cur.at_eof():
        cur.advance()
    while not cur.at_eof() and not cur.at_ident(*keywords):
        cur.advance()


# --- model files ------------------------------------------------------------

_MODEL_KEYWORDS = ("usecase", "component", "function", "flow")

_DIM_VALUES = {
    "operation": OperationType,
    "location": Location,
    "connection": Connection,
}


def parse_model(text: str, filename: str = "<model>") -> ParseResult:
    """Parse a ``*.fis`` system model; never returns a partial model."""
    tokens, lex_errors = tokenize(text, filename)
    if lex_errors:
        return ParseResult(None, tuple(lex_errors))
    cur = _Cursor(tokens)
    errors: list[Diagnostic] = []
    context = UseCaseContext()
    components: list[Component] = []
    functions: list[FunctionNode] = []
    flows: list[DataFlow] = []
    seen = {"component": set(), "function": set(), "flow": set()}
    usecase_allowed = True

    while not cur.at_eof():
        k_before = cur.k
        tok = cur.peek()
        try:
            if tok.kind != "IDENT":
                raise _fail("SYNTAX_ERROR",
                            f"expected a declaration keyword, found {_describe(tok)}", tok)
            if tok.value == "usecase":
                if not usecase_allowed:
                    raise _fail("SYNTAX_ERROR", "usecase block must be the first declaration", tok)
                context = _parse_usecase(cur)
            elif tok.value == "component":
                components.append(_parse_component(cur, seen["component"], errors))
            elif tok.value == "function":
                functions.append(_parse_function(cur, seen["function"], errors))
            elif tok.value == "flow":
                flows.append(_parse_flow(cur, seen["flow"], errors))
            else:
                raise _fail("UNKNOWN_KEYWORD", f"unknown declaration keyword '{tok.value}'", tok)
            usecase_allowed = False
        except _ParseError as exc:
            errors.append(exc.diag)
            _sync(cur, _MODEL_KEYWORDS, k_before)

    if errors:
        return ParseResult(None, tuple(errors))
    model = SystemModel(context, tuple(components), tuple(functions), tuple(flows))
    return ParseResult(model, ())


def _parse_usecase(cur: _Cursor) -> UseCaseContext:
    cur.advance()
    title = _expect_string(cur, "a use case title").value
    _expect_punct(cur, "{")
    values = {"operation": OperationType.UNSPECIFIED,
              "location": Location.UNSPECIFIED,
              "connection": Connection.UNSPECIFIED}
    given: set[str] = set()
    while not cur.at_punct("}"):
        tok = cur.peek()
        if tok.kind != "IDENT" or tok.value not in _DIM_VALUES:
            raise _fail("SYNTAX_ERROR",
                        f"expected a context dimension or '}}', found {_describe(tok)}", tok)
        if tok.value in given:
            raise _fail("SYNTAX_ERROR", f"duplicate context dimension '{tok.value}'", tok)
        given.add(tok.value)
        cur.advance()
        _expect_punct(cur, ":")
        val_tok = _expect_ident(cur, f"a {tok.value} value")
        try:
            values[tok.value] = _DIM_VALUES[tok.value](val_tok.value)
        except ValueError:
            raise _fail("UNKNOWN_KEYWORD",
                        f"'{val_tok.value}' is not a valid {tok.value} value", val_tok)
    cur.advance()
    return UseCaseContext(title, values["operation"], values["location"], values["connection"])


def _parse_component(cur: _Cursor, seen: set[str], errors: list[Diagnostic]) -> Component:
    cur.advance()
    id_tok = _expect_declared_id(cur, "a component id")
    _register(seen, id_tok, "component", errors)
    name = cur.advance().value if cur.peek().kind == "STRING" else ""
    _expect_keyword(cur, "kind")
    _expect_punct(cur, "=")
    kind_tok = _expect_ident(cur, "a component kind")
    if kind_tok.value == "custom":
        _expect_punct(cur, ":")
        label = _expect_string(cur, "a custom kind label").value
        return Component(id_tok.value, ComponentKind.CUSTOM, name, label)
    try:
        kind = ComponentKind(kind_tok.value)
    except ValueError:
        raise _fail("UNKNOWN_KEYWORD", f"'{kind_tok.value}' is not a component kind", kind_tok)
    return Component(id_tok.value, kind, name)


def _parse_function(cur: _Cursor, seen: set[str], errors: list[Diagnostic]) -> FunctionNode:
    cur.advance()
    id_tok = _expect_declared_id(cur, "a function id")
    _register(seen, id_tok, "function", errors)
    name = _expect_string(cur, "a function name").value
    _expect_keyword(cur, "in")
    comp_tok = _expect_ident(cur, "a component id")
    _expect_keyword(cur, "class")
    _expect_punct(cur, "=")
    cls_tok = _expect_ident(cur, "a responsibility class")
    try:
        responsibility = Responsibility(cls_tok.value)
    except ValueError:
        raise _fail("UNKNOWN_KEYWORD", f"'{cls_tok.value}' is not a responsibility class", cls_tok)
    return FunctionNode(id_tok.value, name, comp_tok.value, responsibility)


def _parse_flow(cur: _Cursor, seen: set[str], errors: list[Diagnostic]) -> DataFlow:
    cur.advance()
    id_tok = _expect_declared_id(cur, "a flow id")
    _register(seen, id_tok, "flow", errors)
    _expect_punct(cur, ":")
    source = _expect_ident(cur, "a flow source").value
    _expect_punct(cur, "->")
    sink = _expect_ident(cur, "a flow sink").value
    via = None
    payload = None
    if cur.at_ident("via"):
        cur.advance()
        via = _expect_ident(cur, "a link component id").value
    if cur.at_ident("payload"):
        cur.advance()
        payload = _expect_string(cur, "a payload label").value
    return DataFlow(id_tok.value, source, sink, via, payload)


# --- catalog files ----------------------------------------------------------

_CATALOG_KEYWORDS = ("loss", "hazard", "ifb", "ls")


def parse_catalog(text: str, filename: str = "<catalog>") -> ParseResult:
    """Parse a ``*.cat`` guideline catalog and validate its cross-references."""
    tokens, lex_errors = tokenize(text, filename)
    if lex_errors:
        return ParseResult(None, tuple(lex_errors))
    cur = _Cursor(tokens)
    errors: list[Diagnostic] = []
    losses: list[Loss] = []
    hazards: list[Hazard] = []
    ifbs: list[IfbTemplate] = []
    lss: list[LsTemplate] = []
    seen = {"loss": set(), "hazard": set(), "ifb": set(), "ls": set()}
    positions: dict[str, SourcePosition] = {}

    while not cur.at_eof():
        k_before = cur.k
        tok = cur.peek()
        try:
            if tok.kind != "IDENT":
                raise _fail("SYNTAX_ERROR",
                            f"expected a catalog entry keyword, found {_describe(tok)}", tok)
            if tok.value == "loss":
                cur.advance()
                id_tok = _expect_declared_id(cur, "a loss id")
                _register(seen["loss"], id_tok, "loss", errors)
                positions.setdefault(id_tok.value, id_tok.pos)
                _expect_attr(cur, "text")
                losses.append(Loss(id_tok.value, _expect_string(cur, "a description").value))
            elif tok.value == "hazard":
                cur.advance()
                id_tok = _expect_declared_id(cur, "a hazard id")
                _register(seen["hazard"], id_tok, "hazard", errors)
                positions.setdefault(id_tok.value, id_tok.pos)
                _expect_attr(cur, "losses")
                linked = _parse_id_list(cur)
                _expect_attr(cur, "text")
                hazards.append(Hazard(id_tok.value, _expect_string(cur, "a description").value, linked))
            elif tok.value == "ifb":
                cur.advance()
                id_tok = _expect_declared_id(cur, "an ifb template id")
                _register(seen["ifb"], id_tok, "ifb template", errors)
                positions.setdefault(id_tok.value, id_tok.pos)
                _expect_attr(cur, "class")
                cls_tok = _expect_ident(cur, "a responsibility class")
                try:
                    responsibility = Responsibility(cls_tok.value)
                except ValueError:
                    raise _fail("UNKNOWN_KEYWORD",
                                f"'{cls_tok.value}' is not a responsibility class", cls_tok)
                _expect_attr(cur, "instructor")
                ins_tok = _expect_ident(cur, "an instructor")
                try:
                    instructor = InstructorCategory.from_minor(InstructorMinor(ins_tok.value))
                except ValueError:
                    raise _fail("UNKNOWN_KEYWORD",
                                f"'{ins_tok.value}' is not an instructor", ins_tok)
                _expect_attr(cur, "hazards")
                linked = _parse_id_list(cur)
                _expect_attr(cur, "text")
                ifbs.append(IfbTemplate(id_tok.value, responsibility, instructor,
                                        _expect_string(cur, "a description").value, linked))
            elif tok.value == "ls":
                cur.advance()
                id_tok = _expect_declared_id(cur, "an ls template id")
                _register(seen["ls"], id_tok, "ls template", errors)
                positions.setdefault(id_tok.value, id_tok.pos)
                _expect_attr(cur, "parent")
                parent = _expect_ident(cur, "a parent ifb id").value
                _expect_attr(cur, "category")
                cat_tok = _expect_ident(cur, "a causal category")
                try:
                    category = CausalCategory(cat_tok.value)
                except ValueError:
                    raise _fail("UNKNOWN_KEYWORD",
                                f"'{cat_tok.value}' is not a causal category", cat_tok)
                _expect_attr(cur, "text")
                lss.append(LsTemplate(id_tok.value, parent, category,
                                      _expect_string(cur, "a description").value))
            else:
                raise _fail("UNKNOWN_KEYWORD", f"unknown catalog entry keyword '{tok.value}'", tok)
        except _ParseError as exc:
            errors.append(exc.diag)
            _sync(cur, _CATALOG_KEYWORDS, k_before)

    if errors:
        return ParseResult(None, tuple(errors))

    catalog = Catalog(tuple(losses), tuple(hazards), tuple(ifbs), tuple(lss))
    checks = [
        d if d.position or d.subject_id not in positions
        else replace(d, position=positions[d.subject_id])
        for d in validate_catalog(catalog)
    ]
    if has_errors(checks):
        return ParseResult(None, tuple(checks))
    return ParseResult(catalog, tuple(checks))


def _expect_attr(cur: _Cursor, name: str) -> None:
    _expect_keyword(cur, name)
    _expect_punct(cur, "=")


def _parse_id_list(cur: _Cursor) -> tuple[str, ...]:
    _expect_punct(cur, "[")
    ids: list[str] = []
    if not cur.at_punct("]"):
        ids.append(_expect_ident(cur, "an id").value)
        while cur.at_punct(","):
            cur.advance()
            ids.append(_expect_ident(cur, "an id").value)
    _expect_punct(cur, "]")
    return tuple(ids)


# --- overlay files ----------------------------------------------------------

def parse_overlay(text: str, filename: str = "<overlay>") -> ParseResult:
    """Parse a ``*.ovl`` refinement overlay; shape checks only, no resolution."""
    tokens, lex_errors = tokenize(text, filename)
    if lex_errors:
        return ParseResult(None, tuple(lex_errors))
    cur = _Cursor(tokens)
    errors: list[Diagnostic] = []
    refinements: list[Refinement] = []
    targets: set[str] = set()

    while not cur.at_eof():
        k_before = cur.k
        try:
            _expect_keyword(cur, "refine")
            target_tok = _expect_ident(cur, "an ifb instance id")
            if target_tok.value in targets:
                errors.append(error("DUPLICATE_ID",
                                    f"refinement target '{target_tok.value}' declared twice",
                                    target_tok.pos, subject_id=target_tok.value))
            targets.add(target_tok.value)
            _expect_punct(cur, "{")
            variants: list[IfbVariant] = []
            seen_indices: set[int] = set()
            expected = 1
            while not cur.at_punct("}"):
                variants.append(_parse_ifb_variant(cur, seen_indices, expected, errors))
                expected = variants[-1].index + 1
            cur.advance()
            refinements.append(Refinement(target_tok.value, tuple(variants)))
        except _ParseError as exc:
            errors.append(exc.diag)
            _sync(cur, ("refine",), k_before)

    if errors:
        return ParseResult(None, tuple(errors))
    return ParseResult(Overlay(tuple(refinements)), ())


def _parse_ifb_variant(cur: _Cursor, seen_indices: set[int], expected: int,
                       errors: list[Diagnostic]) -> IfbVariant:
    _expect_keyword(cur, "ifb")
    idx_tok = _expect_int(cur, "a variant index")
    index = int(idx_tok.value)
    if index in seen_indices:
        errors.append(error("DUPLICATE_VARIANT", f"variant index {index} declared twice",
                            idx_tok.pos))
    elif index != expected:
        errors.append(error("NONCONTIGUOUS_INDEX",
                            f"variant index {index} breaks the 1..n sequence (expected {expected})",
                            idx_tok.pos))
    seen_indices.add(index)
    description = _expect_string(cur, "a variant description").value
    hazards: tuple[str, ...] | None = None
    if cur.at_ident("hazards"):
        cur.advance()
        _expect_punct(cur, "=")
        hazards = _parse_id_list(cur)
    _expect_punct(cur, "{")
    ls_variants: list[LsVariant] = []
    seen_ls: set[tuple[str, int]] = set()
    while not cur.at_punct("}"):
        ls_variants.append(_parse_ls_variant(cur, seen_ls, errors))
    cur.advance()
    return IfbVariant(index, description, hazards, tuple(ls_variants))


def _parse_ls_variant(cur: _Cursor, seen: set[tuple[str, int]],
                      errors: list[Diagnostic]) -> LsVariant:
    _expect_keyword(cur, "ls")
    tpl_tok = _expect_ident(cur, "an ls template id")
    _expect_punct(cur, ".")
    idx_tok = _expect_int(cur, "an ls variant index")
    index = int(idx_tok.value)
    if index < 1:
        errors.append(error("NONCONTIGUOUS_INDEX", "ls variant index must be at least 1",
                            idx_tok.pos))
    key = (tpl_tok.value, index)
    if key in seen:
        errors.append(error("DUPLICATE_VARIANT",
                            f"ls variant {tpl_tok.value}.{index} declared twice", idx_tok.pos))
    seen.add(key)
    description = _expect_string(cur, "an ls variant description").value
    invert_text: str | None = None
    react_text: str | None = None
    while cur.at_ident("invert", "react"):
        word_tok = cur.advance()
        _expect_punct(cur, "=")
        value = _expect_string(cur, f"a {word_tok.value} constraint text").value
        if word_tok.value == "invert":
            if invert_text is not None:
                raise _fail("SYNTAX_ERROR", "duplicate 'invert' attribute", word_tok)
            invert_text = value
        else:
            if react_text is not None:
                raise _fail("SYNTAX_ERROR", "duplicate 'react' attribute", word_tok)
            react_text = value
    return LsVariant(tpl_tok.value, index, description, invert_text, react_text)


# --- canonical serialization ------------------------------------------------

_UNQUOTE = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t", "\r": "\\r"}


def _quote(s: str) -> str:
    return '"' + "".join(_UNQUOTE.get(ch, ch) for ch in s) + '"'


def serialize_model(model: SystemModel) -> str:
    """Canonical text for a model; parse_model inverts it structurally."""
    lines: list[str] = []
    ctx = model.context
    dims: list[str] = []
    if ctx.operation is not OperationType.UNSPECIFIED:
        dims.append(f"operation: {ctx.operation.value}")
    if ctx.location is not Location.UNSPECIFIED:
        dims.append(f"location: {ctx.location.value}")
    if ctx.connection is not Connection.UNSPECIFIED:
        dims.append(f"connection: {ctx.connection.value}")
    if ctx.title or dims:
        body = f" {' '.join(dims)}" if dims else ""
        lines.append(f"usecase {_quote(ctx.title)} {{{body} }}")

    for comp in model.components:
        parts = [f"component {comp.id}"]
        if comp.name:
            parts.append(_quote(comp.name))
        if comp.custom_label is not None:
            parts.append(f"kind=custom:{_quote(comp.custom_label)}")
        else:
            parts.append(f"kind={comp.kind.value}")
        lines.append(" ".join(parts))

    for fn in model.functions:
        lines.append(f"function {fn.id} {_quote(fn.name)} in {fn.component} "
                     f"class={fn.responsibility.value}")

    for flow in model.flows:
        line = f"flow {flow.id}: {flow.source} -> {flow.sink}"
        if flow.via is not None:
            line += f" via {flow.via}"
        if flow.payload is not None:
            line += f" payload {_quote(flow.payload)}"
        lines.append(line)

    return "\n".join(lines) + "\n" if lines else ""
