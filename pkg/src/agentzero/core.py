"""Canonical domain types, pipeline configuration, and corpus serialization.

The corpus wire format is JSONL: one question object per line with required
keys id, question, choices, answer_index, domain and an optional qtype key.
Unknown keys are ignored so richer schemas load unchanged.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import MalformedRecord


class QuestionType(enum.Enum):
    """Three-way question taxonomy. Declaration order is the tie-break order."""

    APPLICATION = "application"
    CONCEPT = "concept"
    CALCULATION = "calculation"

    @classmethod
    def from_wire(cls, value: str) -> "QuestionType":
        try:
            return cls(value.lower())
        except ValueError:
            raise MalformedRecord(f"unknown qtype {value!r}") from None


class Route(enum.Enum):
    PARAPHRASE_ONLY = "paraphrase_only"
    NER_ONLY = "ner_only"
    COMBINED = "combined"
    NONE = "none"


@dataclass(frozen=True)
class MultipleChoiceQuestion:
    id: str
    stem: str
    choices: tuple[str, ...]
    correct_index: int
    domain: str
    qtype: QuestionType | None = None

    def __post_init__(self) -> None:
        if not self.stem.strip():
            raise MalformedRecord("stem is empty")
        if len(self.choices) < 2:
            raise MalformedRecord("need at least 2 choices")
        if len(set(self.choices)) != len(self.choices):
            raise MalformedRecord("choice texts must be pairwise distinct")
        if not 0 <= self.correct_index < len(self.choices):
            raise MalformedRecord(
                f"answer_index {self.correct_index} out of range for {len(self.choices)} choices"
            )


@dataclass(frozen=True)
class GeneratedQuestion:
    """One generated variant with lineage back to its source question."""

    source_id: str
    text: str
    route: Route
    replacements: tuple[tuple[str, str], ...] = ()
    context_bleu4: float | None = None

    def __post_init__(self) -> None:
        if self.route in (Route.PARAPHRASE_ONLY, Route.COMBINED) and self.context_bleu4 is None:
            raise ValueError(f"route {self.route.value} requires context_bleu4")
        if self.route in (Route.NER_ONLY, Route.COMBINED) and not self.replacements:
            raise ValueError(f"route {self.route.value} requires replacements")

    def to_dict(self) -> dict:
        return {
            "source_id": self.source_id,
            "text": self.text,
            "route": self.route.value,
            "replacements": [list(pair) for pair in self.replacements],
            "context_bleu4": self.context_bleu4,
        }


DEFAULT_WH_WORDS = frozenset({"who", "what", "when", "where", "why", "how", "which"})

DEFAULT_ENTITY_DEFAULTS: dict[str, tuple[str, ...]] = {
    "PER": ("James", "Maria", "Wei", "John", "Sarah"),
    "GPE": ("France", "Japan", "Brazil"),
    "LOC": ("Everest", "Sahara"),
    "MISC": (),
}


@dataclass(frozen=True)
class PipelineConfig:
    """Generation hyperparameters. Defaults are the production values."""

    bleu_min: float = 0.23
    bleu_max: float = 0.8
    knn_k: int = 5
    max_paraphrase_candidates: int = 10
    max_outputs_per_question: int = 5
    wh_words: frozenset[str] = DEFAULT_WH_WORDS
    entity_defaults: dict[str, tuple[str, ...]] = field(
        default_factory=lambda: dict(DEFAULT_ENTITY_DEFAULTS)
    )
    random_seed: int = 42

    def __post_init__(self) -> None:
        if not (0.0 <= self.bleu_min < self.bleu_max <= 1.0):
            raise ValueError("need 0 <= bleu_min < bleu_max <= 1")
        if self.knn_k < 1:
            raise ValueError("knn_k must be >= 1")
        if self.max_paraphrase_candidates < 1 or self.max_outputs_per_question < 1:
            raise ValueError("candidate and output caps must be >= 1")
        if not self.wh_words:
            raise ValueError("wh_words must be non-empty")

    @classmethod
    def from_dict(cls, raw: dict) -> "PipelineConfig":
        kwargs: dict = {}
        simple = (
            "bleu_min",
            "bleu_max",
            "knn_k",
            "max_paraphrase_candidates",
            "max_outputs_per_question",
            "random_seed",
        )
        for key in simple:
            if key in raw:
                kwargs[key] = raw[key]
        if "wh_words" in raw:
            kwargs["wh_words"] = frozenset(w.lower() for w in raw["wh_words"])
        if "entity_defaults" in raw:
            kwargs["entity_defaults"] = {
                label: tuple(values) for label, values in raw["entity_defaults"].items()
            }
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        with open(path, encoding="utf-8") as handle:
            return cls.from_dict(json.load(handle))


def parse_question_record(line: str) -> MultipleChoiceQuestion:
    """Parse one JSONL record into a question, validating all invariants."""
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(f"invalid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise MalformedRecord("record must be a JSON object")
    for key in ("id", "question", "choices", "answer_index", "domain"):
        if key not in raw:
            raise MalformedRecord(f"missing required key {key!r}")
    choices = raw["choices"]
    if not isinstance(choices, list) or not all(isinstance(c, str) for c in choices):
        raise MalformedRecord("choices must be an array of strings")
    qtype = QuestionType.from_wire(raw["qtype"]) if raw.get("qtype") is not None else None
    if not isinstance(raw["answer_index"], int) or isinstance(raw["answer_index"], bool):
        raise MalformedRecord("answer_index must be an integer")
    return MultipleChoiceQuestion(
        id=str(raw["id"]),
        stem=str(raw["question"]),
        choices=tuple(choices),
        correct_index=raw["answer_index"],
        domain=str(raw["domain"]),
        qtype=qtype,
    )


def serialize_question_record(q: MultipleChoiceQuestion) -> str:
    """Single-line JSON for a question; inverse of parse_question_record."""
    doc: dict = {
        "id": q.id,
        "question": q.stem,
        "choices": list(q.choices),
        "answer_index": q.correct_index,
        "domain": q.domain,
    }
    if q.qtype is not None:
        doc["qtype"] = q.qtype.value
    return json.dumps(doc, ensure_ascii=False)


def iter_corpus(lines: Iterable[str]) -> Iterable[MultipleChoiceQuestion]:
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            yield parse_question_record(line)
        except MalformedRecord as exc:
            raise MalformedRecord(f"line {number}: {exc}") from None


def load_corpus(path: str | Path) -> list[MultipleChoiceQuestion]:
    """Read a JSONL corpus, skipping blank lines. Errors carry line numbers."""
    with open(path, encoding="utf-8") as handle:
        return list(iter_corpus(handle))


def save_corpus(path: str | Path, questions: Iterable[MultipleChoiceQuestion]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for q in questions:
            handle.write(serialize_question_record(q) + "\n")
