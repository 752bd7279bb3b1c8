"""Routing orchestrator: classify, split, paraphrase, replace entities.

Default route is Combined (entity replacements applied on top of each
accepted context paraphrase). When no entity is replaceable the paraphrase
stands alone; when no paraphrase survives the gate, entity replacement
stands alone; when neither works, or the question is not an application
question, nothing is generated and the outcome says why.
"""

from __future__ import annotations

import json
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import classifier as clf
from .core import (
    GeneratedQuestion,
    MultipleChoiceQuestion,
    PipelineConfig,
    QuestionType,
    Route,
    serialize_question_record,
)
from .embeddings import EmbeddingTable
from .errors import BackendUnavailable, NoTaskFound
from .gateway import ModelGateway
from .paraphrase import ParaphraseResult, paraphrase_context
from .replacement import ReplacementPlan, apply_to_split, build_replacement_plan, sample_combinations
from .splitter import split_context_task
from .text import replace_surfaces


@dataclass
class Diagnostics:
    candidates_generated: int = 0
    accepted: int = 0
    too_similar: int = 0
    too_different: int = 0
    entities_found: int = 0
    entities_replaceable: int = 0
    combinations_sampled: int = 0
    reason: str | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "candidates_generated": self.candidates_generated,
            "accepted": self.accepted,
            "too_similar": self.too_similar,
            "too_different": self.too_different,
            "entities_found": self.entities_found,
            "entities_replaceable": self.entities_replaceable,
            "combinations_sampled": self.combinations_sampled,
            "reason": self.reason,
            "error": self.error,
        }


@dataclass
class GenerationOutcome:
    source: MultipleChoiceQuestion
    outputs: list[GeneratedQuestion]
    route_taken: Route
    diagnostics: Diagnostics = field(default_factory=Diagnostics)

    def to_dict(self) -> dict:
        return {
            "source": json.loads(serialize_question_record(self.source)),
            "route": self.route_taken.value,
            "outputs": [g.to_dict() for g in self.outputs],
            "diag": self.diagnostics.to_dict(),
        }


@dataclass
class PipelineDeps:
    gateway: ModelGateway
    embeddings: EmbeddingTable
    classifier: clf.ClassifierModel | None = None


def _question_seed(cfg: PipelineConfig, question_id: str) -> int:
    return cfg.random_seed ^ zlib.crc32(question_id.encode("utf-8"))


def _resolve_qtype(q: MultipleChoiceQuestion, deps: PipelineDeps) -> QuestionType:
    if q.qtype is not None:
        return q.qtype
    if deps.classifier is None:
        raise ValueError(f"question {q.id} is unlabeled and no classifier is configured")
    label, _probs = clf.predict(deps.classifier, q)
    return label


def _surface_map(plan: ReplacementPlan, combo: dict[int, str]) -> dict[str, str]:
    return {
        plan.mentions[index].surface: replacement
        for index, replacement in combo.items()
        if replacement != plan.mentions[index].surface
    }


def _none_outcome(q: MultipleChoiceQuestion, diag: Diagnostics, reason: str) -> GenerationOutcome:
    diag.reason = reason
    return GenerationOutcome(source=q, outputs=[], route_taken=Route.NONE, diagnostics=diag)


def _dedupe(outputs: list[GeneratedQuestion], source_stem: str) -> list[GeneratedQuestion]:
    seen: set[str] = set()
    kept: list[GeneratedQuestion] = []
    for output in outputs:
        if output.text == source_stem or output.text in seen:
            continue
        seen.add(output.text)
        kept.append(output)
    return kept


def generate(
    q: MultipleChoiceQuestion, deps: PipelineDeps, cfg: PipelineConfig
) -> GenerationOutcome:
    """Produce rewrites of one question; answer choices are never touched.

    BackendUnavailable is re-raised with the diagnostics gathered so far
    attached, so batch callers can report partial progress.
    """
    diag = Diagnostics()
    try:
        return _generate(q, deps, cfg, diag)
    except BackendUnavailable as exc:
        exc.diagnostics = diag
        raise


def _generate(
    q: MultipleChoiceQuestion, deps: PipelineDeps, cfg: PipelineConfig, diag: Diagnostics
) -> GenerationOutcome:
    qtype = _resolve_qtype(q, deps)
    if qtype is not QuestionType.APPLICATION:
        return _none_outcome(q, diag, f"unsupported question type: {qtype.value}")
    try:
        split = split_context_task(q.stem, cfg)
    except NoTaskFound as exc:
        return _none_outcome(q, diag, f"no task sentence: {exc}")

    para = ParaphraseResult(accepted=(), candidates_generated=0, too_similar=0, too_different=0)
    if split.context:
        para = paraphrase_context(split, deps.gateway, cfg)
    diag.candidates_generated = para.candidates_generated
    diag.accepted = len(para.accepted)
    diag.too_similar = para.too_similar
    diag.too_different = para.too_different

    plan = None
    if split.context:
        mentions = deps.gateway.recognize_entities(" ".join(split.context))
        diag.entities_found = len(mentions)
        plan = build_replacement_plan(
            split, q, deps.gateway, deps.embeddings, cfg, mentions=mentions
        )
    diag.entities_replaceable = len(plan.mentions) if plan else 0

    seed = _question_seed(cfg, q.id)
    outputs: list[GeneratedQuestion] = []
    if para.accepted and plan:
        route = Route.COMBINED
        combos = sample_combinations(
            [list(plan.candidates[i]) for i in range(len(plan.mentions))],
            cfg.max_outputs_per_question,
            seed,
        )
        diag.combinations_sampled = len(combos)
        for candidate in para.accepted:
            for combo in combos:
                mapping = _surface_map(plan, combo)
                new_context, applied = replace_surfaces(candidate.text, mapping)
                new_task, task_applied = replace_surfaces(split.task, mapping)
                applied.extend(p for p in task_applied if p not in applied)
                if not applied:
                    # The paraphrase lost every entity surface; pairing it with
                    # this combo would yield a Combined output with nothing
                    # replaced, so skip the pair.
                    continue
                outputs.append(
                    GeneratedQuestion(
                        source_id=q.id,
                        text=new_context + " " + new_task,
                        route=Route.COMBINED,
                        replacements=tuple(applied),
                        context_bleu4=candidate.bleu4_vs_original,
                    )
                )
                if len(outputs) >= cfg.max_outputs_per_question:
                    break
            if len(outputs) >= cfg.max_outputs_per_question:
                break
    elif para.accepted:
        route = Route.PARAPHRASE_ONLY
        for candidate in para.accepted[: cfg.max_outputs_per_question]:
            outputs.append(
                GeneratedQuestion(
                    source_id=q.id,
                    text=candidate.text + " " + split.task,
                    route=Route.PARAPHRASE_ONLY,
                    replacements=(),
                    context_bleu4=candidate.bleu4_vs_original,
                )
            )
    elif plan:
        route = Route.NER_ONLY
        combos = sample_combinations(
            [list(plan.candidates[i]) for i in range(len(plan.mentions))],
            cfg.max_outputs_per_question,
            seed,
        )
        diag.combinations_sampled = len(combos)
        for combo in combos:
            new_context, new_task, applied = apply_to_split(split, plan, combo)
            if not applied:
                continue
            sentences = list(new_context)
            sentences.insert(split.task_index, new_task)
            outputs.append(
                GeneratedQuestion(
                    source_id=q.id,
                    text=" ".join(sentences),
                    route=Route.NER_ONLY,
                    replacements=tuple(applied),
                    context_bleu4=None,
                )
            )
    else:
        return _none_outcome(q, diag, "no accepted paraphrase and no replaceable entity")

    outputs = _dedupe(outputs, q.stem)
    if not outputs:
        return _none_outcome(q, diag, "all generated texts were degenerate")
    return GenerationOutcome(source=q, outputs=outputs, route_taken=route, diagnostics=diag)


def generate_corpus(
    corpus: list[MultipleChoiceQuestion],
    deps: PipelineDeps,
    cfg: PipelineConfig,
    jobs: int = 1,
) -> list[GenerationOutcome]:
    """Generate for every question, isolating per-question backend failures."""

    def _one(q: MultipleChoiceQuestion) -> GenerationOutcome:
        try:
            return generate(q, deps, cfg)
        except BackendUnavailable as exc:
            diag = getattr(exc, "diagnostics", None) or Diagnostics()
            diag.error = str(exc)
            return _none_outcome(q, diag, "backend unavailable")

    if jobs <= 1:
        return [_one(q) for q in corpus]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_one, corpus))
