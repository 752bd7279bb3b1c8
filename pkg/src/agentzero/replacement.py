"""Entity replacement: candidate lists per mention, best-fill selection,
combination sampling, and propagation of context replacements into the task.

Mentions whose surface also occurs in an answer choice are excluded up
front: replacing them could silently break answer correctness, which is the
one thing generated questions must preserve.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .core import MultipleChoiceQuestion, PipelineConfig
from .embeddings import EmbeddingTable, nearest_neighbors
from .errors import OffsetMismatch
from .gateway import MASK_MARKER, EntityMention, FillQuery, ModelGateway
from .splitter import SplitQuestion
from .text import adapt_casing, contains_surface, is_numeric_token, replace_surfaces

_ENUMERATION_LIMIT = 10_000


@dataclass(frozen=True)
class ReplacementPlan:
    """Everything needed to rewrite entities consistently in one question.

    candidates maps mention index to the fill-ranked candidate list (best
    first); chosen maps mention index to the top candidate. Task
    propagations are the chosen pairs whose surface also occurs in the task.
    """

    mentions: tuple[EntityMention, ...]
    candidates: dict[int, tuple[str, ...]]
    chosen: dict[int, str]
    task_propagations: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        for index, value in self.chosen.items():
            if value not in self.candidates[index]:
                raise ValueError(f"chosen {value!r} not in candidate list {index}")
            if value == self.mentions[index].surface:
                raise ValueError("a replacement may not equal the original surface")


def candidate_replacements(
    m: EntityMention, table: EmbeddingTable, cfg: PipelineConfig
) -> list[str]:
    """Config defaults for the label followed by up to knn_k embedding
    neighbors, deduplicated case-insensitively, never the surface itself,
    never a numeric token. An empty list means the mention is not
    replaceable."""
    ordered: list[str] = []
    seen: set[str] = {m.surface.lower()}
    for default in cfg.entity_defaults.get(m.label.value, ()):
        key = default.lower()
        if key not in seen and not is_numeric_token(default):
            seen.add(key)
            ordered.append(default)
    for neighbor, _score in nearest_neighbors(table, m.surface, cfg.knn_k):
        key = neighbor.lower()
        if key not in seen and not is_numeric_token(neighbor):
            seen.add(key)
            ordered.append(adapt_casing(m.surface, neighbor))
    return ordered


def select_best(
    context: str, m: EntityMention, candidates: list[str], gateway: ModelGateway
) -> str:
    """Mask the mention span and let the fill scorer pick the winner."""
    if not candidates:
        raise ValueError("candidates must be non-empty")
    ranked = rank_candidates(context, m, candidates, gateway)
    return ranked[0]


def rank_candidates(
    context: str, m: EntityMention, candidates: list[str], gateway: ModelGateway
) -> list[str]:
    if len(candidates) == 1:
        return list(candidates)
    template = context[: m.start] + MASK_MARKER + context[m.end :]
    ranked = gateway.score_fill(FillQuery(template=template, options=tuple(candidates)))
    return [option for option, _score in ranked]


def build_replacement_plan(
    split: SplitQuestion,
    question: MultipleChoiceQuestion,
    gateway: ModelGateway,
    table: EmbeddingTable,
    cfg: PipelineConfig,
    mentions: list[EntityMention] | None = None,
) -> ReplacementPlan | None:
    """Detect context entities and assemble ranked replacement candidates.

    Returns None when no mention survives with a non-empty candidate list
    (no context, nothing recognized, everything excluded, or no candidates).
    Callers that already ran entity recognition can pass the mentions in.
    """
    if not split.context:
        return None
    context = " ".join(split.context)
    if mentions is None:
        mentions = gateway.recognize_entities(context)
    mentions = [
        m
        for m in mentions
        if not any(contains_surface(choice, m.surface) for choice in question.choices)
    ]
    kept: list[EntityMention] = []
    candidates: dict[int, tuple[str, ...]] = {}
    chosen: dict[int, str] = {}
    surfaces_kept: set[str] = set()
    all_surfaces = {m.surface.lower() for m in mentions}
    for mention in mentions:
        if mention.surface in surfaces_kept:
            # One decision per surface: repeated occurrences are rewritten by
            # the same rule when the plan is applied.
            continue
        options = [
            option
            for option in candidate_replacements(mention, table, cfg)
            # A candidate equal to a co-occurring entity would make the output
            # ambiguous, so it is dropped here (not in candidate_replacements,
            # which stays a per-mention contract).
            if option.lower() not in all_surfaces
        ]
        if not options:
            continue
        ranked = rank_candidates(context, mention, options, gateway)
        index = len(kept)
        kept.append(mention)
        surfaces_kept.add(mention.surface)
        candidates[index] = tuple(ranked)
        chosen[index] = ranked[0]
    if not kept:
        return None
    propagations = tuple(
        (kept[i].surface, chosen[i])
        for i in sorted(chosen)
        if contains_surface(split.task, kept[i].surface)
    )
    return ReplacementPlan(
        mentions=tuple(kept),
        candidates=candidates,
        chosen=chosen,
        task_propagations=propagations,
    )


def apply_to_split(
    split: SplitQuestion, plan: ReplacementPlan, chosen: dict[int, str] | None = None
) -> tuple[tuple[str, ...], str, tuple[tuple[str, str], ...]]:
    """Apply a chosen map to the original context and task.

    All occurrences of one surface get the same replacement (a single
    alternation pass), and surfaces found in the task are rewritten there
    too. Returns (new context sentences, new task, applied pairs).
    """
    chosen = plan.chosen if chosen is None else chosen
    context = " ".join(split.context)
    for index, mention in enumerate(plan.mentions):
        if context[mention.start : mention.end] != mention.surface:
            raise OffsetMismatch(
                f"mention {index} span no longer matches {mention.surface!r} (stale plan)"
            )
    mapping = {
        plan.mentions[index].surface: replacement
        for index, replacement in chosen.items()
        if replacement != plan.mentions[index].surface
    }
    new_sentences = []
    applied: list[tuple[str, str]] = []
    for sentence in split.context:
        new_sentence, fired = replace_surfaces(sentence, mapping)
        new_sentences.append(new_sentence)
        applied.extend(pair for pair in fired if pair not in applied)
    new_task, fired = replace_surfaces(split.task, mapping)
    applied.extend(pair for pair in fired if pair not in applied)
    return tuple(new_sentences), new_task, tuple(applied)


def apply_replacements(split: SplitQuestion, plan: ReplacementPlan) -> str:
    """Rewritten stem with the plan's chosen replacements applied."""
    new_context, new_task, _ = apply_to_split(split, plan)
    sentences = list(new_context)
    sentences.insert(split.task_index, new_task)
    return " ".join(sentences)


def sample_combinations(
    candidate_lists: list[list[str]], max_outputs: int, seed: int
) -> list[dict[int, str]]:
    """Deterministic chosen-map sampling over the candidate cross product.

    The first combination takes the top-ranked candidate per mention; the
    rest are drawn uniformly without replacement. Small products are
    enumerated outright, large ones sampled by index with rejection.
    """
    if not candidate_lists or any(not options for options in candidate_lists):
        raise ValueError("every mention needs at least one candidate")
    if max_outputs < 1:
        raise ValueError("max_outputs must be >= 1")
    rng = random.Random(seed)
    first = tuple(options[0] for options in candidate_lists)
    total = 1
    for options in candidate_lists:
        total *= len(options)

    picked: list[tuple[str, ...]] = [first]
    if total <= _ENUMERATION_LIMIT:
        rest = [c for c in itertools.product(*candidate_lists) if c != first]
        picked.extend(rng.sample(rest, min(max_outputs - 1, len(rest))))
    else:
        seen = {first}
        while len(picked) < min(max_outputs, total):
            combo = tuple(options[rng.randrange(len(options))] for options in candidate_lists)
            if combo in seen:
                continue
            seen.add(combo)
            picked.append(combo)
    return [dict(enumerate(combo)) for combo in picked[:max_outputs]]
