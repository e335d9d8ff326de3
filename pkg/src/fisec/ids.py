"""Identifier helpers: validity, natural ordering, and compact range display."""

from __future__ import annotations

import re

# Declared identifiers: a letter, then letters/digits/underscore/hyphen.
ID_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_-]*$")

# The word EXTERNAL is a flow endpoint, never a declarable id.
EXTERNAL = "EXTERNAL"

_DIGITS = re.compile(r"(\d+)")


def natural_key(identifier: str) -> tuple:
    """Sort key that orders embedded integers numerically (SC-2 before SC-10)."""
    parts = _DIGITS.split(identifier)
    return tuple((1, int(p)) if p.isdigit() else (0, p) for p in parts)


def _fold_point(ident: str) -> int:
    """Index just past the last hyphen of the id's final '_' segment, or -1."""
    tail_start = ident.rfind("_") + 1
    hyphen = ident.rfind("-", tail_start)
    if hyphen < tail_start:
        return -1
    return hyphen + 1


def compress_id_list(ids: list[str]) -> str:
    """Join ids, folding runs that differ only after their last name marker.

    ["F-1_IFB-2.1_LS-2.1", "F-1_IFB-2.1_LS-2.2"] -> "F-1_IFB-2.1_LS-2.1/2.2"
    Ids whose final segment has no hyphen are kept whole.
    """
    groups: list[tuple[str, list[str]]] = []
    for ident in sorted(ids, key=natural_key):
        point = _fold_point(ident)
        if point < 0:
            groups.append((ident, []))
            continue
        prefix, tail = ident[:point], ident[point:]
        if groups and groups[-1][0] == prefix and groups[-1][1]:
            groups[-1][1].append(tail)
        else:
            groups.append((prefix, [tail]))
    rendered = []
    for head, tails in groups:
        rendered.append(head if not tails else head + "/".join(tails))
    return ", ".join(rendered)
