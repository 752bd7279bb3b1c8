"""Transformer-backed engines, used when model identifiers are configured.

Imports are local so the server has no hard dependency on transformers or
torch; install the `models` extra to use these. Any seq2seq paraphraser,
token-classification tagger, or masked-LM checkpoint satisfying the wire
contract is acceptable.
"""

from __future__ import annotations

import math


class Seq2SeqParaphraser:
    def __init__(self, model_id: str, beam_width: int):
        from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        self.model = AutoModelForSeq2SeqLM.from_pretrained(model_id)
        self.model.eval()
        self.beam_width = beam_width

    def paraphrase(self, text: str, n: int) -> list[str]:
        import torch

        n = min(n, self.beam_width)
        encoded = self.tokenizer(text, return_tensors="pt", truncation=True)
        with torch.no_grad():
            outputs = self.model.generate(
                **encoded,
                num_beams=self.beam_width,
                num_return_sequences=n,
                max_new_tokens=128,
            )
        decoded = self.tokenizer.batch_decode(outputs, skip_special_tokens=True)
        unique: list[str] = []
        for candidate in decoded:
            candidate = candidate.strip()
            if candidate and candidate != text and candidate not in unique:
                unique.append(candidate)
        return unique


class TokenClassificationTagger:
    def __init__(self, model_id: str, label_map: dict[str, str]):
        from transformers import pipeline

        self.pipeline = pipeline(
            "token-classification", model=model_id, aggregation_strategy="simple"
        )
        self.label_map = label_map

    def tag(self, text: str) -> list[tuple[int, int, str]]:
        spans: list[tuple[int, int, str]] = []
        for entity in self.pipeline(text):
            label = self.label_map.get(entity["entity_group"].upper())
            if label is None:
                continue
            start, end = int(entity["start"]), int(entity["end"])
            # Trim whitespace the aggregator may have absorbed so that
            # text[start:end] is the exact surface.
            while start < end and text[start].isspace():
                start += 1
            while end > start and text[end - 1].isspace():
                end -= 1
            if start >= end:
                continue
            if any(start < e and end > s for s, e, _ in spans):
                continue
            spans.append((start, end, label))
        return sorted(spans)


class MaskedLmFillScorer:
    """Scores each option by mean per-token log-likelihood in the blank."""

    def __init__(self, model_id: str):
        from transformers import AutoModelForMaskedLM, AutoTokenizer

        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        self.model = AutoModelForMaskedLM.from_pretrained(model_id)
        self.model.eval()

    def score(self, template: str, options: list[str]) -> list[tuple[str, float]]:
        import torch

        from .engines import MASK_MARKER

        scored: dict[str, float] = {}
        for option in options:
            option_ids = self.tokenizer(option, add_special_tokens=False)["input_ids"]
            if not option_ids:
                scored[option] = -math.inf
                continue
            masked = template.replace(
                MASK_MARKER, self.tokenizer.mask_token * len(option_ids), 1
            )
            encoded = self.tokenizer(masked, return_tensors="pt", truncation=True)
            mask_positions = (
                encoded["input_ids"][0] == self.tokenizer.mask_token_id
            ).nonzero(as_tuple=True)[0]
            with torch.no_grad():
                logits = self.model(**encoded).logits[0]
            log_probs = torch.log_softmax(logits, dim=-1)
            total = 0.0
            for position, token_id in zip(mask_positions, option_ids):
                total += float(log_probs[position, token_id])
            scored[option] = total / len(option_ids)
        return sorted(scored.items(), key=lambda item: (-item[1], item[0]))
