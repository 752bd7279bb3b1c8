"""Shared text utilities: the tokenizer used by the classifier and the
translation metrics, numeric-token detection, and surface-replacement helpers.

Tokenizer rules: lowercase, split on Unicode whitespace, strip leading and
trailing punctuation/symbol characters from each chunk. Chunks matching the
numeric pattern (optional currency sign, digits with thousands separators,
optional decimal part, optional trailing percent) are kept whole, so "1,500"
and "40%" are single tokens.
"""

from __future__ import annotations

import re
import unicodedata

NUMERIC_RE = re.compile(r"[$€£]?[+-]?(\d{1,3}(,\d{3})+|\d+)(\.\d+)?%?$")


def is_numeric_token(token: str) -> bool:
    return bool(NUMERIC_RE.fullmatch(token))


def _strip_edges(chunk: str) -> str:
    # Unicode category P* (punctuation) at either edge; symbols like "<" or
    # "+" are kept as tokens, and currency signs are handled by NUMERIC_RE.
    start, end = 0, len(chunk)
    while start < end and unicodedata.category(chunk[start])[0] == "P":
        start += 1
    while end > start and unicodedata.category(chunk[end - 1])[0] == "P":
        end -= 1
    return chunk[start:end]


def tokenize(text: str) -> list[str]:
    """Lowercased word tokens with edge punctuation removed.

    Numeric chunks are preserved verbatim (including "$", ",", "." and "%")
    so they can be recognized by :func:`is_numeric_token` afterwards.
    """
    tokens: list[str] = []
    for chunk in text.lower().split():
        if NUMERIC_RE.fullmatch(chunk):
            tokens.append(chunk)
            continue
        stripped = _strip_edges(chunk)
        if not stripped:
            continue
        tokens.append(stripped)
    return tokens


def _boundary_pattern(surface: str) -> re.Pattern[str]:
    return re.compile(r"(?<![0-9A-Za-z_])" + re.escape(surface) + r"(?![0-9A-Za-z_])")


def contains_surface(text: str, surface: str) -> bool:
    """True when `surface` occurs in `text` as a whole word (or phrase)."""
    return bool(_boundary_pattern(surface).search(text))


def replace_surfaces(text: str, mapping: dict[str, str]) -> tuple[str, list[tuple[str, str]]]:
    """Apply all surface replacements in one pass.

    A single alternation pattern (longest surface first) guarantees that a
    replacement string is never itself rewritten by a later rule. Returns the
    new text and the (surface, replacement) pairs that actually fired, in
    first-occurrence order.
    """
    if not mapping:
        return text, []
    ordered = sorted(mapping, key=len, reverse=True)
    pattern = re.compile(
        r"(?<![0-9A-Za-z_])(" + "|".join(re.escape(s) for s in ordered) + r")(?![0-9A-Za-z_])"
    )
    applied: list[tuple[str, str]] = []

    def _sub(match: re.Match[str]) -> str:
        surface = match.group(1)
        replacement = mapping[surface]
        if (surface, replacement) not in applied:
            applied.append((surface, replacement))
        return replacement

    return pattern.sub(_sub, text), applied


def adapt_casing(surface: str, candidate: str) -> str:
    """Shape `candidate` to the casing pattern of the replaced `surface`.

    Candidates that already carry casing of their own (MySQL, VarName) are
    left alone. Lowercase candidates follow the surface: ALL-CAPS surfaces
    upper-case them and Title Case surfaces title-case them.
    """
    if not candidate.islower():
        return candidate
    if len(surface) > 1 and surface.isupper():
        return candidate.upper()
    if surface.istitle():
        return " ".join(w[:1].upper() + w[1:] for w in candidate.split(" "))
    return candidate
