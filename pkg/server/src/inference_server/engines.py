"""Model engines behind the three endpoints.

The built-in engines are deterministic rule systems so the server is fully
functional without any checkpoint. Transformer-backed engines (see
transformers_engines) plug in through the same three protocols when model
identifiers are configured.
"""

from __future__ import annotations

import random
import re
import zlib
from typing import Protocol

MASK_MARKER = "***MASK***"

WIRE_LABELS = ("PER", "GPE", "LOC", "MISC")


class Paraphraser(Protocol):
    def paraphrase(self, text: str, n: int) -> list[str]: ...


class EntityTagger(Protocol):
    def tag(self, text: str) -> list[tuple[int, int, str]]: ...


class FillScorer(Protocol):
    def score(self, template: str, options: list[str]) -> list[tuple[str, float]]: ...


_SYNONYMS = {
    "begin": "commence",
    "start": "begin",
    "choose": "select",
    "show": "illustrate",
    "build": "assemble",
    "building": "assembling",
    "large": "sizable",
    "small": "compact",
    "quick": "swift",
    "quickly": "swiftly",
    "meeting": "gathering",
    "team": "crew",
    "question": "prompt",
    "answer": "response",
    "data": "records",
    "store": "outlet",
    "manager": "lead",
    "report": "brief",
}

_LEADS = ("Consider this:", "Picture this:")


class RuleParaphraser:
    """Synonym swaps and sentence leads, seeded by the input text."""

    def paraphrase(self, text: str, n: int) -> list[str]:
        rng = random.Random(zlib.crc32(text.encode("utf-8")))
        words = text.split(" ")
        swap_positions = [
            i for i, word in enumerate(words) if word.strip(".,!?;:").lower() in _SYNONYMS
        ]

        def swap(positions: list[int]) -> str:
            out = list(words)
            for i in positions:
                bare = out[i].strip(".,!?;:")
                tail = out[i][len(bare) :]
                replacement = _SYNONYMS[bare.lower()]
                if bare[:1].isupper():
                    replacement = replacement.capitalize()
                out[i] = replacement + tail
            return " ".join(out)

        candidates = []
        if swap_positions:
            candidates.append(swap(swap_positions))
            candidates.append(swap(swap_positions[:1]))
            if len(swap_positions) > 1:
                candidates.append(swap(rng.sample(swap_positions, len(swap_positions) - 1)))
        candidates.append(rng.choice(_LEADS) + " " + text)
        candidates.append(_LEADS[0] + " " + (swap(swap_positions) if swap_positions else text))
        unique = []
        for candidate in candidates:
            if candidate != text and candidate not in unique:
                unique.append(candidate)
        return unique[:n]


_GAZETTEER: dict[str, list[str]] = {
    "PER": ["Robert", "Annie", "James", "Maria", "Wei", "John", "Sarah", "Priya",
            "Carlos", "Nina", "Omar", "Alice", "Rachel", "Tom", "Michael", "Emma",
            "David", "Lisa"],
    "GPE": ["France", "Germany", "Japan", "Brazil", "Berlin", "Paris", "London",
            "Tokyo", "Boston", "Seattle", "Spain", "China", "India"],
    "LOC": ["Everest", "Alps", "Sahara", "Amazon", "Pacific", "Andes"],
    "MISC": ["Python", "SQL", "Java", "Excel", "Tableau", "MySQL", "PostgreSQL",
             "Linux", "Windows", "MyChar", "SVM", "Greek", "German", "Spanish"],
}


class GazetteerTagger:
    """Longest-match-first dictionary tagger emitting wire labels directly."""

    def __init__(self, gazetteer: dict[str, list[str]] | None = None):
        entries = gazetteer or _GAZETTEER
        self._entries = sorted(
            ((surface, label) for label, surfaces in entries.items() for surface in surfaces),
            key=lambda item: -len(item[0]),
        )

    def tag(self, text: str) -> list[tuple[int, int, str]]:
        spans: list[tuple[int, int, str]] = []
        for surface, label in self._entries:
            for match in re.finditer(
                r"(?<![0-9A-Za-z_])" + re.escape(surface) + r"(?![0-9A-Za-z_])", text
            ):
                start, end = match.span()
                if any(start < e and end > s for s, e, _ in spans):
                    continue
                spans.append((start, end, label))
        return sorted(spans)


_WORD_LOG_FREQ = {
    "the": -2.0, "a": -2.2, "an": -2.4, "of": -2.5, "and": -2.5, "to": -2.6,
    "james": -5.0, "maria": -5.1, "john": -5.2, "sarah": -5.3, "wei": -5.6,
    "python": -4.8, "sql": -4.9, "java": -5.0, "varname": -5.2, "berlin": -5.4,
    "france": -5.0, "japan": -5.1, "tokyo": -5.5, "paris": -5.3, "london": -5.2,
}
_UNSEEN_LOG_FREQ = -9.0


class FrequencyFillScorer:
    """Mean per-token log frequency as a stand-in fill likelihood.

    Multi-token options are scored by the per-token average, mirroring how
    masked-LM options are length-normalized.
    """

    def score(self, template: str, options: list[str]) -> list[tuple[str, float]]:
        scored: dict[str, float] = {}
        for option in options:
            tokens = [t for t in re.split(r"\W+", option.lower()) if t]
            if not tokens:
                scored[option] = _UNSEEN_LOG_FREQ
                continue
            scored[option] = sum(
                _WORD_LOG_FREQ.get(token, _UNSEEN_LOG_FREQ) for token in tokens
            ) / len(tokens)
        return sorted(scored.items(), key=lambda item: (-item[1], item[0]))


def build_engines(config) -> tuple[Paraphraser, EntityTagger, FillScorer]:
    """Instantiate engines per config; model ids switch in transformer backends."""
    if config.paraphrase_model or config.ner_model or config.fill_model:
        from . import transformers_engines as hf

        paraphraser = (
            hf.Seq2SeqParaphraser(config.paraphrase_model, config.beam_width)
            if config.paraphrase_model
            else RuleParaphraser()
        )
        tagger = (
            hf.TokenClassificationTagger(config.ner_model, config.label_map)
            if config.ner_model
            else GazetteerTagger()
        )
        scorer = hf.MaskedLmFillScorer(config.fill_model) if config.fill_model else FrequencyFillScorer()
        return paraphraser, tagger, scorer
    return RuleParaphraser(), GazetteerTagger(), FrequencyFillScorer()
