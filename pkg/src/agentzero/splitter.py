"""Split a question stem into context sentences and a single WH task sentence."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .core import PipelineConfig
from .errors import NoTaskFound
from .text import tokenize

# Trailing abbreviations that never end a sentence.
ABBREVIATIONS = frozenset(
    {"e.g.", "i.e.", "vs.", "etc.", "cf.", "dr.", "mr.", "mrs.", "ms.", "no.", "fig.", "st."}
)

_SINGLE_INITIAL = re.compile(r"^[A-Z]\.$")
_OPENERS = "\"'“‘([{"
_CLOSERS = "\"'”’"


@dataclass(frozen=True)
class SplitQuestion:
    """Context sentences plus the task sentence at its original position."""

    context: tuple[str, ...]
    task: str
    task_index: int

    def reconstruct(self) -> str:
        sentences = list(self.context)
        sentences.insert(self.task_index, self.task)
        return " ".join(sentences)


def _trailing_word(text: str, end: int) -> str:
    start = end
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return text[start:end]


def segment_sentences(text: str) -> list[str]:
    """Rule-based sentence segmentation.

    Splits after runs of ".", "?", "!" (plus closing quotes) that are
    followed by whitespace and an uppercase letter or opening quote.
    Guards: known abbreviations, single-capital initials, and any
    terminator inside parentheses (protects code fragments). Decimal
    points and thousands separators never match because they are not
    followed by whitespace + uppercase.
    """
    sentences: list[str] = []
    start = 0
    depth = 0
    i = 0
    length = len(text)
    while i < length:
        char = text[i]
        if char in "([{":
            depth += 1
        elif char in ")]}":
            depth = max(0, depth - 1)
        elif char in ".?!" and depth == 0:
            end = i
            while end < length and text[end] in ".?!":
                end += 1
            tail = end
            while tail < length and text[tail] in _CLOSERS:
                tail += 1
            if tail < length and text[tail].isspace():
                follow = tail
                while follow < length and text[follow].isspace():
                    follow += 1
                next_char = text[follow] if follow < length else ""
                word = _trailing_word(text, end)
                is_abbrev = word.lower() in ABBREVIATIONS or _SINGLE_INITIAL.fullmatch(word)
                if next_char and (next_char.isupper() or next_char in _OPENERS) and not is_abbrev:
                    sentences.append(text[start:tail].strip())
                    start = follow
                    i = follow
                    continue
            i = tail if tail > i else i + 1
            continue
        i += 1
    last = text[start:].strip()
    if last:
        sentences.append(last)
    return [s for s in sentences if s]


def _first_token(sentence: str) -> str:
    tokens = tokenize(sentence)
    return tokens[0] if tokens else ""


def split_context_task(stem: str, cfg: PipelineConfig) -> SplitQuestion:
    """Separate a stem into context and the task sentence.

    The task is the last sentence opening with a configured WH word; when
    none exists, the final sentence is the task provided it ends with "?".
    Anything else is unsuitable for this pipeline and raises NoTaskFound.
    """
    sentences = segment_sentences(stem)
    if not sentences:
        raise NoTaskFound("stem has no sentences")
    wh_indexes = [
        i for i, sentence in enumerate(sentences) if _first_token(sentence) in cfg.wh_words
    ]
    if wh_indexes:
        task_index = wh_indexes[-1]
    elif sentences[-1].rstrip(_CLOSERS).endswith("?"):
        task_index = len(sentences) - 1
    else:
        raise NoTaskFound("no WH-initial sentence and no terminal question")
    context = tuple(s for i, s in enumerate(sentences) if i != task_index)
    return SplitQuestion(context=context, task=sentences[task_index], task_index=task_index)
