"""Tokenizer shared by the model, catalog and overlay languages."""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import Diagnostic, SourcePosition, error

# Single-character punctuation; "->" is handled separately.
_PUNCT = "{}[]:=,."

_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t", "r": "\r"}


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT | STRING | INT | PUNCT | EOF
    value: str
    pos: SourcePosition


def _is_ident_start(ch: str) -> bool:
    return ch.isascii() and ch.isalpha()


def _is_digit(ch: str) -> bool:
    return "0" <= ch <= "9"


def _is_ident_char(ch: str) -> bool:
    return ch.isascii() and (ch.isalpha() or _is_digit(ch) or ch in "_-")


def tokenize(text: str, filename: str) -> tuple[list[Token], list[Diagnostic]]:
    """Scan text into tokens; on a lexical error, stop and report its position.

    Total: never raises, always terminates. CRLF and lone CR are normalized
    to LF before positions are assigned.
    """
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue

        start = SourcePosition(filename, line, col)
        if ch == '"':
            i += 1
            col += 1
            chars: list[str] = []
            closed = False
            while i < n and text[i] != "\n":
                c = text[i]
                if c == '"':
                    i += 1
                    col += 1
                    closed = True
                    break
                if c == "\\":
                    if i + 1 >= n or text[i + 1] == "\n":
                        break
                    esc = text[i + 1]
                    if esc not in _ESCAPES:
                        bad = SourcePosition(filename, line, col)
                        return tokens, [error("LEX_ERROR", f"invalid escape '\\{esc}' in string", bad)]
                    chars.append(_ESCAPES[esc])
                    i += 2
                    col += 2
                    continue
                chars.append(c)
                i += 1
                col += 1
            if not closed:
                return tokens, [error("LEX_ERROR", "unterminated string literal", start)]
            tokens.append(Token("STRING", "".join(chars), start))
            continue
        if _is_ident_start(ch):
            j = i
            while j < n and _is_ident_char(text[j]):
                # keep "->" intact: F-1->F-2 is three tokens, not one identifier
                if text[j] == "-" and j + 1 < n and text[j + 1] == ">":
                    break
                j += 1
            tokens.append(Token("IDENT", text[i:j], start))
            col += j - i
            i = j
            continue
        if _is_digit(ch):
            j = i
            while j < n and _is_digit(text[j]):
                j += 1
            tokens.append(Token("INT", text[i:j], start))
            col += j - i
            i = j
            continue
        if ch == "-" and i + 1 < n and text[i + 1] == ">":
            tokens.append(Token("PUNCT", "->", start))
            i += 2
            col += 2
            continue
        if ch in _PUNCT:
            tokens.append(Token("PUNCT", ch, start))
            i += 1
            col += 1
            continue
        return tokens, [error("LEX_ERROR", f"unexpected character {ch!r}", start)]

    tokens.append(Token("EOF", "", SourcePosition(filename, line, col)))
    return tokens, []
