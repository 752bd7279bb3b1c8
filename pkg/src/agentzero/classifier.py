"""Question-type classification: multinomial logistic regression over a
bag-of-words plus three handcrafted features (numeric token count, stem
length, mean choice length).

Training is plain mini-batch gradient descent on the softmax cross-entropy
with an L2 penalty, fully deterministic for a given seed. The handcrafted
features are z-normalized with training-set statistics stored on the model
because raw counts and lengths live on different scales than bag counts.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import MultipleChoiceQuestion, QuestionType
from .errors import DegenerateCorpus
from .text import is_numeric_token, tokenize

CLASS_ORDER: tuple[QuestionType, ...] = (
    QuestionType.APPLICATION,
    QuestionType.CONCEPT,
    QuestionType.CALCULATION,
)
N_CUSTOM_FEATURES = 3
SCHEMA_VERSION = 1

DEFAULT_L2 = 1e-2
DEFAULT_EPOCHS = 200
DEFAULT_LEARNING_RATE = 0.1
_BATCH_SIZE = 32


@dataclass(frozen=True)
class FeatureVector:
    """Sparse bag counts plus the handcrafted features, pre-normalization."""

    bow: dict[int, int]
    numeric_token_count: int
    question_length: int
    avg_choice_length: float


def question_tokens(q: MultipleChoiceQuestion) -> list[str]:
    tokens = tokenize(q.stem)
    for choice in q.choices:
        tokens.extend(tokenize(choice))
    return tokens


def build_vocabulary(questions: list[MultipleChoiceQuestion]) -> dict[str, int]:
    """Dense token ids assigned in sorted token order (deterministic)."""
    seen: set[str] = set()
    for q in questions:
        seen.update(question_tokens(q))
    return {token: index for index, token in enumerate(sorted(seen))}


def extract_features(q: MultipleChoiceQuestion, vocab: dict[str, int]) -> FeatureVector:
    """Deterministic featurization; OOV tokens are dropped from the bag but
    still counted in the length features. Numeric tokens are counted over
    the stem and the choices together."""
    stem_tokens = tokenize(q.stem)
    choice_token_lists = [tokenize(c) for c in q.choices]
    bow: dict[int, int] = {}
    numeric = 0
    for token in stem_tokens + [t for toks in choice_token_lists for t in toks]:
        if is_numeric_token(token):
            numeric += 1
        index = vocab.get(token)
        if index is not None:
            bow[index] = bow.get(index, 0) + 1
    avg_choice = (
        sum(len(toks) for toks in choice_token_lists) / len(choice_token_lists)
        if choice_token_lists
        else 0.0
    )
    return FeatureVector(
        bow=bow,
        numeric_token_count=numeric,
        question_length=len(stem_tokens),
        avg_choice_length=avg_choice,
    )


@dataclass
class ClassifierModel:
    vocabulary: dict[str, int]
    weights: np.ndarray  # (n_classes, |vocab| + 3)
    bias: np.ndarray  # (n_classes,)
    custom_means: np.ndarray  # (3,)
    custom_stds: np.ndarray  # (3,)
    seed: int
    train_accuracy: float

    @property
    def n_features(self) -> int:
        return len(self.vocabulary) + N_CUSTOM_FEATURES

    def featurize(self, q: MultipleChoiceQuestion) -> np.ndarray:
        fv = extract_features(q, self.vocabulary)
        x = np.zeros(self.n_features, dtype=np.float64)
        for index, count in fv.bow.items():
            x[index] = count
        custom = np.array(
            [fv.numeric_token_count, fv.question_length, fv.avg_choice_length],
            dtype=np.float64,
        )
        x[len(self.vocabulary) :] = (custom - self.custom_means) / self.custom_stds
        return x

    def logits(self, q: MultipleChoiceQuestion) -> np.ndarray:
        return self.weights @ self.featurize(q) + self.bias

    def to_json(self) -> str:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "classes": [c.value for c in CLASS_ORDER],
            "vocabulary": self.vocabulary,
            "custom_means": self.custom_means.tolist(),
            "custom_stds": self.custom_stds.tolist(),
            "weights": self.weights.tolist(),
            "bias": self.bias.tolist(),
            "seed": self.seed,
            "train_accuracy": self.train_accuracy,
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ClassifierModel":
        doc = json.loads(text)
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported model schema {doc.get('schema_version')!r}")
        if doc["classes"] != [c.value for c in CLASS_ORDER]:
            raise ValueError("model class order does not match this build")
        return cls(
            vocabulary=doc["vocabulary"],
            weights=np.asarray(doc["weights"], dtype=np.float64),
            bias=np.asarray(doc["bias"], dtype=np.float64),
            custom_means=np.asarray(doc["custom_means"], dtype=np.float64),
            custom_stds=np.asarray(doc["custom_stds"], dtype=np.float64),
            seed=doc["seed"],
            train_accuracy=doc["train_accuracy"],
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "ClassifierModel":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def loss_and_grad(
    weights: np.ndarray,
    bias: np.ndarray,
    x: np.ndarray,
    y: np.ndarray,
    l2: float,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean cross-entropy + 0.5*l2*||W||^2 and its analytic gradient.

    `y` holds class indices; the bias is not penalized. Exposed at module
    level so the gradient can be checked against finite differences.
    """
    n = x.shape[0]
    probs = softmax(x @ weights.T + bias)
    log_likelihood = -np.log(probs[np.arange(n), y] + 1e-300).mean()
    loss = log_likelihood + 0.5 * l2 * float((weights**2).sum())
    delta = probs
    delta[np.arange(n), y] -= 1.0
    delta /= n
    grad_w = delta.T @ x + l2 * weights
    grad_b = delta.sum(axis=0)
    return float(loss), grad_w, grad_b


def _design_matrix(
    corpus: list[tuple[MultipleChoiceQuestion, QuestionType]],
    vocab: dict[str, int],
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    n_features = len(vocab) + N_CUSTOM_FEATURES
    x = np.zeros((len(corpus), n_features), dtype=np.float64)
    y = np.zeros(len(corpus), dtype=np.int64)
    for row, (q, label) in enumerate(corpus):
        fv = extract_features(q, vocab)
        for index, count in fv.bow.items():
            x[row, index] = count
        x[row, len(vocab)] = fv.numeric_token_count
        x[row, len(vocab) + 1] = fv.question_length
        x[row, len(vocab) + 2] = fv.avg_choice_length
        y[row] = CLASS_ORDER.index(label)
    custom = x[:, len(vocab) :]
    means = custom.mean(axis=0)
    stds = custom.std(axis=0)
    stds[stds < 1e-12] = 1.0
    x[:, len(vocab) :] = (custom - means) / stds
    return x, y, means, stds


def train(
    corpus: list[tuple[MultipleChoiceQuestion, QuestionType]],
    seed: int,
    l2: float = DEFAULT_L2,
    epochs: int = DEFAULT_EPOCHS,
    learning_rate: float = DEFAULT_LEARNING_RATE,
) -> ClassifierModel:
    """Fit the classifier; identical corpus and seed give identical weights."""
    if len(corpus) < 2:
        raise DegenerateCorpus("need at least 2 labeled questions to fit")
    vocab = build_vocabulary([q for q, _ in corpus])
    x, y, means, stds = _design_matrix(corpus, vocab)
    n, n_features = x.shape
    weights = np.zeros((len(CLASS_ORDER), n_features), dtype=np.float64)
    bias = np.zeros(len(CLASS_ORDER), dtype=np.float64)
    rng = np.random.default_rng(seed)
    for epoch in range(1, epochs + 1):
        lr = learning_rate / np.sqrt(epoch)
        order = rng.permutation(n)
        for start in range(0, n, _BATCH_SIZE):
            batch = order[start : start + _BATCH_SIZE]
            _, grad_w, grad_b = loss_and_grad(weights, bias, x[batch], y[batch], l2)
            weights -= lr * grad_w
            bias -= lr * grad_b
    predictions = np.argmax(x @ weights.T + bias, axis=1)
    accuracy = float((predictions == y).mean())
    return ClassifierModel(
        vocabulary=vocab,
        weights=weights,
        bias=bias,
        custom_means=means,
        custom_stds=stds,
        seed=seed,
        train_accuracy=accuracy,
    )


def predict(
    model: ClassifierModel, q: MultipleChoiceQuestion
) -> tuple[QuestionType, dict[QuestionType, float]]:
    """Most probable class (ties resolved by CLASS_ORDER) and all probabilities."""
    probs = softmax(model.logits(q))
    winner = CLASS_ORDER[int(np.argmax(probs))]
    return winner, {cls: float(p) for cls, p in zip(CLASS_ORDER, probs)}


def stratified_split(
    corpus: list[tuple[MultipleChoiceQuestion, QuestionType]],
    test_fraction: float,
    seed: int,
) -> tuple[list[tuple[MultipleChoiceQuestion, QuestionType]], list[tuple[MultipleChoiceQuestion, QuestionType]]]:
    """Deterministic per-class shuffle and split, preserving class balance."""
    by_class: dict[QuestionType, list[tuple[MultipleChoiceQuestion, QuestionType]]] = {}
    for item in corpus:
        by_class.setdefault(item[1], []).append(item)
    rng = random.Random(seed)
    train_set: list[tuple[MultipleChoiceQuestion, QuestionType]] = []
    test_set: list[tuple[MultipleChoiceQuestion, QuestionType]] = []
    for label in CLASS_ORDER:
        group = by_class.get(label, [])
        if not group:
            continue
        indexes = list(range(len(group)))
        rng.shuffle(indexes)
        n_test = max(1, round(len(group) * test_fraction)) if len(group) > 1 else 0
        test_set.extend(group[i] for i in indexes[:n_test])
        train_set.extend(group[i] for i in indexes[n_test:])
    return train_set, test_set


def labeled_corpus(
    questions: list[MultipleChoiceQuestion],
) -> list[tuple[MultipleChoiceQuestion, QuestionType]]:
    """Pair questions with their qtype labels, rejecting unlabeled records."""
    pairs = []
    for q in questions:
        if q.qtype is None:
            raise DegenerateCorpus(f"question {q.id} has no qtype label")
        pairs.append((q, q.qtype))
    return pairs
