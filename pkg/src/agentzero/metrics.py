"""From-scratch BLEU-4, METEOR, ROUGE-L and CIDEr.

These back both the paraphrase-acceptance gate and the evaluation harness.
In this project the scores compare a generated question against its source,
so LOWER values mean a more aggressive (more syntactically different)
rewrite; callers that rank generation quality minimize them.

Fixed formulations:
  * BLEU-4: geometric mean of modified 1..4-gram precisions with brevity
    penalty. A precision level with zero matches is floored at epsilon
    (1e-9); levels where the candidate has no n-grams at all are dropped
    from the mean so identical short strings still score 1.0.
  * METEOR: unigram alignment under exact-or-stem matching, scored with
    F(alpha=0.9) times the fragmentation penalty 1 - 0.5*(chunks/matches)^3.
    The alignment maximizes matches, then minimizes chunks (exactly).
  * ROUGE-L: LCS F-measure with beta=1.2.
  * CIDEr: per n in 1..4, clipped TF-IDF cosine against each reference,
    idf = log(N / df) over the reference corpus, averaged over n and pairs.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .errors import EmptyInput
from .text import tokenize

Tokens = Sequence[str]

BLEU_EPSILON = 1e-9
METEOR_ALPHA = 0.9
METEOR_GAMMA = 0.5
METEOR_BETA = 3.0
ROUGE_BETA = 1.2
CIDER_MAX_N = 4


@dataclass(frozen=True)
class MetricReport:
    """Corpus-level scores; n is the number of scored pairs."""

    bleu4: float
    meteor: float
    rouge_l: float
    cider: float
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise EmptyInput("a report needs at least one scored pair")


def _ngram_counts(tokens: Tokens, n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _bleu_level_counts(candidate: Tokens, references: list[Tokens], n: int) -> tuple[int, int]:
    """(clipped matches, total candidate n-grams) for one n-gram order."""
    cand = _ngram_counts(candidate, n)
    total = sum(cand.values())
    if total == 0:
        return 0, 0
    ceiling: Counter = Counter()
    for ref in references:
        for gram, count in _ngram_counts(ref, n).items():
            if count > ceiling[gram]:
                ceiling[gram] = count
    matched = sum(min(count, ceiling[gram]) for gram, count in cand.items())
    return matched, total


def _effective_reference_length(candidate_len: int, references: list[Tokens]) -> int:
    # Closest reference length; ties broken toward the shorter reference.
    return min((abs(len(r) - candidate_len), len(r)) for r in references)[1]


def _brevity_penalty(candidate_len: int, reference_len: int) -> float:
    if candidate_len >= reference_len:
        return 1.0
    return math.exp(1.0 - reference_len / candidate_len)


def bleu4(candidate: Tokens, references: Sequence[Tokens]) -> float:
    """Sentence BLEU-4 of a candidate against one or more references."""
    references = [r for r in references if r]
    if not candidate or not references:
        raise EmptyInput("bleu4 needs a non-empty candidate and reference")
    log_sum = 0.0
    levels = 0
    for n in range(1, 5):
        matched, total = _bleu_level_counts(candidate, references, n)
        if total == 0:
            continue
        precision = matched / total if matched else BLEU_EPSILON
        log_sum += math.log(precision)
        levels += 1
    score = math.exp(log_sum / levels)
    bp = _brevity_penalty(len(candidate), _effective_reference_length(len(candidate), references))
    return min(1.0, bp * score)


_SUFFIX_RULES: tuple[tuple[str, str, int], ...] = (
    # (suffix, replacement, minimum token length); first applicable rule wins
    ("sses", "ss", 5),
    ("ies", "i", 4),
    ("ing", "", 6),
    ("ed", "", 5),
    ("ly", "", 5),
    ("es", "", 4),
    ("s", "", 4),
)


@lru_cache(maxsize=16384)
def stem(token: str) -> str:
    """Deterministic suffix-stripping stemmer used for METEOR matching."""
    if token.endswith("ss"):
        return token
    for suffix, replacement, min_len in _SUFFIX_RULES:
        if len(token) >= min_len and token.endswith(suffix):
            return token[: -len(suffix)] + replacement
    return token


def _alignment_matches_and_chunks(candidate: Tokens, reference: Tokens) -> tuple[int, int]:
    """Exact (max matches, min chunks) alignment under stem-class matching.

    Exact-or-stem matching makes "token a matches token b" an equivalence
    relation on stem classes, so the maximum number of matches is the sum of
    clipped class counts. Minimizing chunks among maximum alignments is done
    by memoized search over candidate positions; only reference positions of
    classes with more than one occurrence on either side ("flexible") create
    branching, which keeps the state space small on natural sentences.
    """
    cand_classes = [stem(t) for t in candidate]
    ref_classes = [stem(t) for t in reference]
    cand_totals = Counter(cand_classes)
    ref_totals = Counter(ref_classes)
    quota = {k: min(cand_totals[k], ref_totals[k]) for k in cand_totals if k in ref_totals}
    matches = sum(quota.values())
    if matches == 0:
        return 0, 0

    flexible = {
        k for k in quota if cand_totals[k] > 1 or ref_totals[k] > 1
    }
    ref_positions: dict[str, list[int]] = {}
    for j, cls in enumerate(ref_classes):
        ref_positions.setdefault(cls, []).append(j)
    bit_of_ref = {j: 1 << i for i, j in enumerate(
        j for j, cls in enumerate(ref_classes) if cls in flexible
    )}
    # Candidate occurrences of each class at or after position i (for skip feasibility).
    n = len(cand_classes)
    remaining: dict[str, list[int]] = {k: [0] * (n + 1) for k in quota}
    for i in range(n - 1, -1, -1):
        for k, counts in remaining.items():
            counts[i] = counts[i + 1] + (1 if cand_classes[i] == k else 0)

    memo: dict[tuple[int, int, int], int] = {}

    def best_adjacencies(i: int, used_mask: int, prev_j: int, used_counts: dict[str, int]) -> int:
        if i == n:
            return 0
        key = (i, used_mask, prev_j)
        if key in memo:
            return memo[key]
        cls = cand_classes[i]
        best = -1
        can_skip = True
        options: list[int] = []
        if cls in quota:
            needed = quota[cls] - used_counts[cls]
            if needed > 0:
                if cls in flexible:
                    options = [
                        j
                        for j in ref_positions[cls]
                        if not (used_mask & bit_of_ref[j])
                    ]
                else:
                    options = ref_positions[cls]
                # Skipping is only legal when enough later occurrences remain.
                can_skip = remaining[cls][i + 1] > needed - 1
        for j in options:
            adjacency = 1 if prev_j >= 0 and j == prev_j + 1 else 0
            used_counts[cls] += 1
            mask = used_mask | bit_of_ref.get(j, 0)
            value = adjacency + best_adjacencies(i + 1, mask, j, used_counts)
            used_counts[cls] -= 1
            if value > best:
                best = value
        if can_skip:
            value = best_adjacencies(i + 1, used_mask, -1, used_counts)
            if value > best:
                best = value
        memo[key] = best
        return best

    adjacencies = best_adjacencies(0, 0, -1, {k: 0 for k in quota})
    return matches, matches - adjacencies


def meteor(candidate: Tokens, reference: Tokens) -> float:
    """Unigram-alignment METEOR with exact + stem matching."""
    if not candidate or not reference:
        raise EmptyInput("meteor needs non-empty token lists")
    matches, chunks = _alignment_matches_and_chunks(candidate, reference)
    if matches == 0:
        return 0.0
    precision = matches / len(candidate)
    recall = matches / len(reference)
    f_mean = (precision * recall) / (METEOR_ALPHA * precision + (1 - METEOR_ALPHA) * recall)
    penalty = METEOR_GAMMA * (chunks / matches) ** METEOR_BETA
    return f_mean * (1.0 - penalty)


def _lcs_length(a: Tokens, b: Tokens) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for token_a in a:
        current = [0]
        for j, token_b in enumerate(b):
            if token_a == token_b:
                current.append(prev[j] + 1)
            else:
                current.append(max(prev[j + 1], current[-1]))
        prev = current
    return prev[-1]


def rouge_l(candidate: Tokens, reference: Tokens) -> float:
    """LCS-based F-measure with beta=1.2."""
    if not candidate or not reference:
        raise EmptyInput("rouge_l needs non-empty token lists")
    lcs = _lcs_length(candidate, reference)
    if lcs == 0:
        return 0.0
    precision = lcs / len(candidate)
    recall = lcs / len(reference)
    beta_sq = ROUGE_BETA**2
    return (1 + beta_sq) * precision * recall / (recall + beta_sq * precision)


def _tfidf_vector(tokens: Tokens, n: int, idf: dict[tuple[str, ...], float]) -> dict:
    return {
        gram: count * idf.get(gram, idf["__unseen__"])
        for gram, count in _ngram_counts(tokens, n).items()
    }


def _clipped_cosine(cand_vec: dict, ref_vec: dict) -> float:
    norm_c = math.sqrt(sum(v * v for v in cand_vec.values()))
    norm_r = math.sqrt(sum(v * v for v in ref_vec.values()))
    if norm_c == 0.0 or norm_r == 0.0:
        return 0.0
    numerator = sum(
        min(value, ref_vec[gram]) * ref_vec[gram]
        for gram, value in cand_vec.items()
        if gram in ref_vec
    )
    return numerator / (norm_c * norm_r)


def cider(candidates_and_refs: Sequence[tuple[Tokens, Sequence[Tokens]]]) -> float:
    """Corpus CIDEr: clipped TF-IDF n-gram cosine averaged over n=1..4.

    Document frequency is computed over each item's reference set, so a
    single-pair corpus has idf = log(1) = 0 everywhere and scores 0 (the
    metric is only informative with 2+ items).
    """
    if not candidates_and_refs:
        raise EmptyInput("cider needs at least one pair")
    pairs: list[tuple[Tokens, list[Tokens]]] = []
    for cand, refs in candidates_and_refs:
        refs = [r for r in refs if r]
        if not cand or not refs:
            raise EmptyInput("cider needs non-empty candidates and references")
        pairs.append((cand, refs))

    corpus_size = len(pairs)
    idf_by_n: list[dict] = []
    for n in range(1, CIDER_MAX_N + 1):
        df: Counter = Counter()
        for _, refs in pairs:
            seen: set = set()
            for ref in refs:
                seen.update(_ngram_counts(ref, n).keys())
            df.update(seen)
        idf = {gram: math.log(corpus_size / count) for gram, count in df.items()}
        idf["__unseen__"] = math.log(corpus_size)
        idf_by_n.append(idf)

    total = 0.0
    for cand, refs in pairs:
        pair_score = 0.0
        for n in range(1, CIDER_MAX_N + 1):
            idf = idf_by_n[n - 1]
            cand_vec = _tfidf_vector(cand, n, idf)
            level = sum(_clipped_cosine(cand_vec, _tfidf_vector(r, n, idf)) for r in refs)
            pair_score += level / len(refs)
        total += pair_score / CIDER_MAX_N
    return total / corpus_size


def corpus_bleu4(pairs: Sequence[tuple[Tokens, Tokens]]) -> float:
    """Corpus BLEU with n-gram counts pooled over all pairs."""
    matched = [0] * 4
    totals = [0] * 4
    cand_len = 0
    ref_len = 0
    for cand, ref in pairs:
        for n in range(1, 5):
            m, t = _bleu_level_counts(cand, [ref], n)
            matched[n - 1] += m
            totals[n - 1] += t
        cand_len += len(cand)
        ref_len += len(ref)
    log_sum = 0.0
    levels = 0
    for m, t in zip(matched, totals):
        if t == 0:
            continue
        precision = m / t if m else BLEU_EPSILON
        log_sum += math.log(precision)
        levels += 1
    if levels == 0:
        raise EmptyInput("no n-grams to score")
    return min(1.0, _brevity_penalty(cand_len, ref_len) * math.exp(log_sum / levels))


def corpus_report(pairs: Sequence[tuple[str, str]]) -> MetricReport:
    """Score (generated, original) text pairs; lower is a stronger rewrite.

    BLEU is pooled over the corpus, METEOR and ROUGE-L are means, CIDEr is
    corpus-level by construction. Tokenization happens here.
    """
    if not pairs:
        raise EmptyInput("corpus_report needs at least one pair")
    token_pairs: list[tuple[list[str], list[str]]] = []
    for index, (generated, original) in enumerate(pairs):
        cand, ref = tokenize(generated), tokenize(original)
        if not cand or not ref:
            raise EmptyInput(f"pair {index} tokenizes to an empty side")
        token_pairs.append((cand, ref))
    return MetricReport(
        bleu4=corpus_bleu4(token_pairs),
        meteor=sum(meteor(c, r) for c, r in token_pairs) / len(token_pairs),
        rouge_l=sum(rouge_l(c, r) for c, r in token_pairs) / len(token_pairs),
        cider=cider([(c, [r]) for c, r in token_pairs]),
        n=len(token_pairs),
    )


def bleu4_texts(candidate: str, reference: str) -> float:
    """Convenience wrapper used by the paraphrase gate."""
    return bleu4(tokenize(candidate), [tokenize(reference)])
