#!/usr/bin/env python
"""Retrain the bundled question-type classifier on the bundled corpus.

Training is deterministic (seed 42), so rerunning this script reproduces
the committed model file byte for byte. It also reports held-out accuracy
on a stratified 20% split as a sanity check before writing the model, which
is trained on the full corpus.
"""

from pathlib import Path

from agentzero import classifier as clf
from agentzero.core import load_corpus

SEED = 42


def main() -> None:
    data = Path(__file__).resolve().parent.parent / "src" / "agentzero" / "data"
    pairs = clf.labeled_corpus(load_corpus(data / "corpus.jsonl"))

    train_set, test_set = clf.stratified_split(pairs, 0.2, SEED)
    held_out = clf.train(train_set, seed=SEED)
    correct = sum(1 for q, label in test_set if clf.predict(held_out, q)[0] is label)
    print(f"held-out accuracy: {correct}/{len(test_set)} = {correct / len(test_set):.4f}")

    model = clf.train(pairs, seed=SEED)
    out = data / "classifier_model.json"
    model.save(out)
    print(f"train accuracy (full corpus): {model.train_accuracy:.4f}")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
