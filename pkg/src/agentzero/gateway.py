"""Uniform interface to the three model capabilities (paraphrase generation,
entity recognition, masked-fill scoring) with two interchangeable backends:
a deterministic in-process stub and an HTTP client for the inference sidecar.

Wire protocol (shared with the sidecar):
    POST /paraphrase {"text": str, "n": int}      -> {"candidates": [str]}
    POST /ner        {"text": str}                -> {"mentions": [{"start", "end", "label"}]}
    POST /fill       {"template": str, "options"} -> {"ranked": [{"option", "score"}]}
    GET  /health                                  -> {"status": "ok"}
"""

from __future__ import annotations

import enum
import json
import random
import threading
import time
import zlib
from dataclasses import dataclass
from importlib import resources
from typing import Protocol

import requests

from .errors import BackendUnavailable, MalformedResponse
from .splitter import segment_sentences
from .text import adapt_casing, replace_surfaces, tokenize

MASK_MARKER = "***MASK***"

BACKOFF_BASE_SECONDS = 0.1
BACKOFF_FACTOR = 2.0


class EntityLabel(enum.Enum):
    PERSON = "PER"
    GEOPOLITICAL = "GPE"
    LOCATION = "LOC"
    MISC = "MISC"


@dataclass(frozen=True)
class EntityMention:
    """Half-open character span [start, end) over the source text."""

    start: int
    end: int
    surface: str
    label: EntityLabel

    def __post_init__(self) -> None:
        if not 0 <= self.start < self.end:
            raise ValueError(f"bad span [{self.start}, {self.end})")


@dataclass(frozen=True)
class FillQuery:
    """A template with exactly one blank marker and candidate fillers."""

    template: str
    options: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.template.count(MASK_MARKER) != 1:
            raise ValueError(f"template must contain exactly one {MASK_MARKER}")
        if not self.options:
            raise ValueError("options must be non-empty")
        if len(set(self.options)) != len(self.options):
            raise ValueError("options must be pairwise distinct")


@dataclass(frozen=True)
class Stub:
    seed: int = 0


@dataclass(frozen=True)
class HttpService:
    base_url: str
    timeout_ms: int = 10_000
    retries: int = 2
    max_in_flight: int = 4

    def __post_init__(self) -> None:
        if self.timeout_ms <= 0:
            raise ValueError("timeout must be positive")
        if self.retries < 0:
            raise ValueError("retries must be >= 0")


class ModelGateway(Protocol):
    def paraphrase(self, text: str, n: int) -> list[str]: ...

    def recognize_entities(self, text: str) -> list[EntityMention]: ...

    def score_fill(self, query: FillQuery) -> list[tuple[str, float]]: ...


def _validate_mentions(text: str, mentions: list[EntityMention]) -> list[EntityMention]:
    ordered = sorted(mentions, key=lambda m: m.start)
    previous_end = 0
    for mention in ordered:
        if mention.end > len(text) or text[mention.start : mention.end] != mention.surface:
            raise MalformedResponse(
                f"span [{mention.start}, {mention.end}) does not match surface {mention.surface!r}"
            )
        if mention.start < previous_end:
            raise MalformedResponse("mentions overlap")
        previous_end = mention.end
    return ordered


def _rank_options(scored: dict[str, float]) -> list[tuple[str, float]]:
    return sorted(scored.items(), key=lambda item: (-item[1], item[0]))


def _load_data(name: str) -> dict:
    with resources.files("agentzero.data").joinpath(name).open(encoding="utf-8") as handle:
        return json.load(handle)


class StubGateway:
    """Deterministic rule-based stand-ins for the three model calls.

    Paraphrases come from synonym and phrase swaps plus sentence templates,
    entity recognition from a bundled gazetteer (longest match first), and
    fill scoring from a bundled bigram/unigram frequency table. Identical
    (seed, inputs) produce identical outputs on every platform.
    """

    def __init__(self, seed: int = 0):
        self.seed = seed
        rules = _load_data("stub_rules.json")
        self._synonyms: dict[str, str] = rules["synonyms"]
        self._phrases: dict[str, str] = rules["phrases"]
        self._prefixes: list[str] = rules["prefixes"]
        self._gazetteer: list[tuple[str, EntityLabel]] = [
            (surface, EntityLabel(label))
            for label, surfaces in rules["gazetteer"].items()
            for surface in surfaces
        ]
        self._bigrams: dict[str, float] = rules["bigrams"]
        self._unigrams: dict[str, float] = rules["unigrams"]

    def _rng(self, text: str) -> random.Random:
        return random.Random((self.seed * 0x9E3779B1) ^ zlib.crc32(text.encode("utf-8")))

    def _decapitalize(self, text: str) -> str:
        # Lowercase a leading sentence capital unless the word is a known
        # proper noun or carries further capitals (SQL, MyChar).
        first = text.split(" ", 1)[0]
        if (
            len(first) > 1
            and first[0].isupper()
            and first[1:].islower()
            and all(first != surface for surface, _ in self._gazetteer)
        ):
            return text[0].lower() + text[1:]
        return text

    def _synonym_hits(self, text: str) -> list[str]:
        hits = []
        for token in text.split():
            word = token.strip(".,;:!?()\"'")
            key = word.lower()
            if key in self._synonyms and word not in hits:
                hits.append(word)
        return hits

    def _swap(self, text: str, words: list[str]) -> str:
        mapping = {}
        for word in words:
            replacement = self._synonyms.get(word.lower())
            if replacement:
                mapping[word] = adapt_casing(word, replacement)
        new_text, _ = replace_surfaces(text, mapping)
        return new_text

    def _swap_phrases(self, text: str) -> str:
        result = text
        for phrase, replacement in self._phrases.items():
            lowered = result.lower()
            index = lowered.find(phrase)
            while index != -1:
                matched = result[index : index + len(phrase)]
                shaped = adapt_casing(matched.split(" ")[0], replacement.split(" ")[0])
                shaped = shaped + replacement[len(replacement.split(" ")[0]) :]
                result = result[:index] + shaped + result[index + len(phrase) :]
                lowered = result.lower()
                index = lowered.find(phrase, index + len(shaped))
        return result

    def paraphrase(self, text: str, n: int) -> list[str]:
        if n < 1:
            raise ValueError("n must be >= 1")
        if not text.strip():
            raise ValueError("text must be non-empty")
        rng = self._rng(text)
        hits = self._synonym_hits(text)
        candidates: list[str] = []

        phrase_swapped = self._swap_phrases(text)
        full_swap = self._swap(text, hits)
        candidates.append(self._swap(phrase_swapped, hits))
        candidates.append(full_swap)
        candidates.append(phrase_swapped)
        for size in (1, 2, 3):
            if len(hits) >= size:
                candidates.append(self._swap(text, rng.sample(hits, size)))
        sentences = segment_sentences(text)
        if len(sentences) >= 2:
            lead = self._decapitalize(sentences[0].rstrip("."))
            candidates.append("Given that " + lead + ", " + " ".join(sentences[1:]))
        candidates.append(rng.choice(self._prefixes) + " " + self._decapitalize(text))
        candidates.append(rng.choice(self._prefixes) + " " + self._decapitalize(full_swap))

        unique: list[str] = []
        for candidate in candidates:
            if candidate != text and candidate not in unique:
                unique.append(candidate)
        return unique[:n]

    def recognize_entities(self, text: str) -> list[EntityMention]:
        if not text.strip():
            raise ValueError("text must be non-empty")
        taken: list[tuple[int, int]] = []
        mentions: list[EntityMention] = []
        for surface, label in sorted(self._gazetteer, key=lambda item: -len(item[0])):
            start = 0
            while True:
                index = text.find(surface, start)
                if index == -1:
                    break
                end = index + len(surface)
                start = index + 1
                before = text[index - 1] if index > 0 else " "
                after = text[end] if end < len(text) else " "
                if before.isalnum() or before == "_" or after.isalnum() or after == "_":
                    continue
                if any(index < t_end and end > t_start for t_start, t_end in taken):
                    continue
                taken.append((index, end))
                mentions.append(EntityMention(start=index, end=end, surface=surface, label=label))
        return _validate_mentions(text, mentions)

    def score_fill(self, query: FillQuery) -> list[tuple[str, float]]:
        mask_at = query.template.find(MASK_MARKER)
        left_tokens = tokenize(query.template[:mask_at])
        right_tokens = tokenize(query.template[mask_at + len(MASK_MARKER) :])
        left = left_tokens[-1] if left_tokens else None
        right = right_tokens[0] if right_tokens else None
        scored: dict[str, float] = {}
        for option in query.options:
            tokens = tokenize(option)
            if not tokens:
                scored[option] = 0.0
                continue
            score = 0.0
            if left is not None:
                score += self._bigrams.get(f"{left} {tokens[0]}", 0.0)
            if right is not None:
                score += self._bigrams.get(f"{tokens[-1]} {right}", 0.0)
            score += 0.1 * sum(self._unigrams.get(t, 0.0) for t in tokens) / len(tokens)
            scored[option] = score
        return _rank_options(scored)


class HttpGateway:
    """HTTP client for the inference sidecar, with retries and backoff.

    Every transport failure (connection error, timeout, non-200 status)
    is retried with exponential backoff and finally surfaces as
    BackendUnavailable; schema violations raise MalformedResponse at once.
    """

    def __init__(self, service: HttpService, sleep=time.sleep):
        self.service = service
        self._sleep = sleep
        self._slots = threading.Semaphore(service.max_in_flight)

    def _post(self, endpoint: str, payload: dict) -> dict:
        url = self.service.base_url.rstrip("/") + endpoint
        timeout = self.service.timeout_ms / 1000.0
        last_error: str = "no attempt made"
        for attempt in range(self.service.retries + 1):
            if attempt:
                self._sleep(BACKOFF_BASE_SECONDS * BACKOFF_FACTOR ** (attempt - 1))
            try:
                with self._slots:
                    response = requests.post(url, json=payload, timeout=timeout)
            except requests.RequestException as exc:
                last_error = str(exc)
                continue
            if response.status_code != 200:
                last_error = f"HTTP {response.status_code}"
                continue
            try:
                return response.json()
            except ValueError as exc:
                raise MalformedResponse(f"{endpoint}: invalid JSON body: {exc}") from None
        raise BackendUnavailable(f"{url}: {last_error}")

    def paraphrase(self, text: str, n: int) -> list[str]:
        if n < 1:
            raise ValueError("n must be >= 1")
        if not text.strip():
            raise ValueError("text must be non-empty")
        body = self._post("/paraphrase", {"text": text, "n": n})
        candidates = body.get("candidates")
        if not isinstance(candidates, list) or not all(isinstance(c, str) for c in candidates):
            raise MalformedResponse("/paraphrase: candidates must be a list of strings")
        unique: list[str] = []
        for candidate in candidates:
            if candidate != text and candidate not in unique:
                unique.append(candidate)
        return unique[:n]

    def recognize_entities(self, text: str) -> list[EntityMention]:
        if not text.strip():
            raise ValueError("text must be non-empty")
        body = self._post("/ner", {"text": text})
        raw = body.get("mentions")
        if not isinstance(raw, list):
            raise MalformedResponse("/ner: mentions must be a list")
        mentions = []
        for item in raw:
            try:
                label = EntityLabel(item["label"])
                start, end = int(item["start"]), int(item["end"])
            except (KeyError, TypeError, ValueError) as exc:
                raise MalformedResponse(f"/ner: bad mention {item!r}: {exc}") from None
            if not 0 <= start < end <= len(text):
                raise MalformedResponse(f"/ner: span [{start}, {end}) out of range")
            mentions.append(
                EntityMention(start=start, end=end, surface=text[start:end], label=label)
            )
        return _validate_mentions(text, mentions)

    def score_fill(self, query: FillQuery) -> list[tuple[str, float]]:
        body = self._post("/fill", {"template": query.template, "options": list(query.options)})
        raw = body.get("ranked")
        if not isinstance(raw, list):
            raise MalformedResponse("/fill: ranked must be a list")
        scored: dict[str, float] = {}
        for item in raw:
            try:
                option, score = item["option"], float(item["score"])
            except (KeyError, TypeError, ValueError) as exc:
                raise MalformedResponse(f"/fill: bad entry {item!r}: {exc}") from None
            if option in scored:
                raise MalformedResponse(f"/fill: duplicate option {option!r}")
            scored[option] = score
        if set(scored) != set(query.options):
            raise MalformedResponse("/fill: response options do not match the request")
        return _rank_options(scored)

    def health(self) -> bool:
        url = self.service.base_url.rstrip("/") + "/health"
        try:
            response = requests.get(url, timeout=self.service.timeout_ms / 1000.0)
        except requests.RequestException:
            return False
        return response.status_code == 200


def make_gateway(kind: Stub | HttpService) -> ModelGateway:
    if isinstance(kind, Stub):
        return StubGateway(seed=kind.seed)
    return HttpGateway(kind)
