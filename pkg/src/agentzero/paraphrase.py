"""Paraphrase only the context of a split question, gate candidates by a
BLEU-4 acceptance band, and clean generation artifacts.

The band keeps rewrites that are different enough to be worth emitting but
close enough to preserve meaning; both bounds are inclusive so the
documented constants are themselves legal scores. Candidates are cleaned
before gating so artifact removal can never flip a verdict afterwards.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .core import PipelineConfig
from .errors import EmptyInput
from .metrics import bleu4_texts
from .splitter import SplitQuestion, segment_sentences

_PUNCT = ".,?!;:"
_SPACE_BEFORE_PUNCT = re.compile(r"\s+([.,?!;:])")
_RUN_OF_SAME = re.compile(r"([.,?!;:])\1+")
_MISSING_SPACE_AFTER = re.compile(r"([.,?!;:])(?=[^\W\d_])", flags=re.UNICODE)


class Verdict(enum.Enum):
    ACCEPTED = "accepted"
    TOO_DIFFERENT = "too_different"
    TOO_SIMILAR = "too_similar"


@dataclass(frozen=True)
class ParaphraseCandidate:
    text: str
    bleu4_vs_original: float
    verdict: Verdict


@dataclass(frozen=True)
class ParaphraseResult:
    """Accepted candidates (best first) plus gate counters for diagnostics."""

    accepted: tuple[ParaphraseCandidate, ...]
    candidates_generated: int
    too_similar: int
    too_different: int


def clean_artifacts(text: str) -> str:
    """Normalize generation artifacts; idempotent.

    In order: collapse whitespace runs, strip leading punctuation, remove
    spaces before punctuation, collapse runs of a repeated punctuation mark
    (after space removal, so "; ;" still collapses), ensure a space after
    punctuation followed by a letter (digits are excluded, which protects
    decimals and thousands separators), drop consecutive duplicate
    sentences, and guarantee terminal punctuation.
    """
    result = re.sub(r"\s+", " ", text).strip()
    result = result.lstrip(_PUNCT + " ")
    result = _SPACE_BEFORE_PUNCT.sub(r"\1", result)
    result = _RUN_OF_SAME.sub(r"\1", result)
    result = _MISSING_SPACE_AFTER.sub(r"\1 ", result)
    result = result.rstrip(",;: ")
    if result and result[-1] not in ".?!":
        result += "."
    # Trailing punctuation is settled before deduplication so that removing a
    # duplicate cannot change how the remaining text segments on a re-run.
    sentences = segment_sentences(result)
    deduped: list[str] = []
    for sentence in sentences:
        if not deduped or deduped[-1] != sentence:
            deduped.append(sentence)
    return " ".join(deduped)


def gate_by_bleu(
    original_context: str, candidates: list[str], cfg: PipelineConfig
) -> list[ParaphraseCandidate]:
    """Score and label every candidate against the original context.

    Returns all candidates sorted by score descending (ties by text), so
    the Accepted ones are already in most-conservative-first order. Bounds
    are inclusive on both ends. Candidates with no tokens score 0.
    """
    if not original_context.strip():
        raise EmptyInput("original context must be non-empty")
    gated: list[ParaphraseCandidate] = []
    for candidate in candidates:
        try:
            score = bleu4_texts(candidate, original_context)
        except EmptyInput:
            score = 0.0
        if score < cfg.bleu_min:
            verdict = Verdict.TOO_DIFFERENT
        elif score > cfg.bleu_max:
            verdict = Verdict.TOO_SIMILAR
        else:
            verdict = Verdict.ACCEPTED
        gated.append(ParaphraseCandidate(text=candidate, bleu4_vs_original=score, verdict=verdict))
    return sorted(gated, key=lambda c: (-c.bleu4_vs_original, c.text))


def paraphrase_context(split: SplitQuestion, gateway, cfg: PipelineConfig) -> ParaphraseResult:
    """Run the paraphraser over the joined context and gate the results.

    The task sentence is never sent to the paraphraser and never altered
    here. Raises ValueError for task-only questions (callers skip them).
    """
    if not split.context:
        raise ValueError("task-only question: nothing to paraphrase")
    original = " ".join(split.context)
    raw = gateway.paraphrase(original, cfg.max_paraphrase_candidates)
    cleaned: list[str] = []
    for candidate in raw:
        clean = clean_artifacts(candidate)
        if clean and clean not in cleaned:
            cleaned.append(clean)
    gated = gate_by_bleu(original, cleaned, cfg)
    accepted = tuple(c for c in gated if c.verdict is Verdict.ACCEPTED)
    return ParaphraseResult(
        accepted=accepted,
        candidates_generated=len(gated),
        too_similar=sum(1 for c in gated if c.verdict is Verdict.TOO_SIMILAR),
        too_different=sum(1 for c in gated if c.verdict is Verdict.TOO_DIFFERENT),
    )
