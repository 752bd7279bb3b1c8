#!/usr/bin/env python
"""End-to-end generation experiment on the bundled corpus with stub backends.

Writes the generation outcomes to out/outcomes.jsonl and prints a route
breakdown plus the four translation scores of generated-vs-original pairs
(presentation scaling: x100 for BLEU/METEOR/ROUGE-L, x10 for CIDEr).
Because the scores measure closeness to the source questions, lower values
mean more aggressive rewrites.

Usage: python scripts/run_stub_generation.py [--seed N] [--out DIR]
"""

from __future__ import annotations

import argparse
import json
from collections import Counter
from pathlib import Path

from agentzero.classifier import ClassifierModel
from agentzero.core import PipelineConfig, load_corpus
from agentzero.embeddings import load_embeddings
from agentzero.gateway import StubGateway
from agentzero.metrics import corpus_report
from agentzero.pipeline import PipelineDeps, generate_corpus

DATA = Path(__file__).resolve().parent.parent / "src" / "agentzero" / "data"


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--out", default="out")
    args = parser.parse_args()

    cfg = PipelineConfig(random_seed=args.seed)
    deps = PipelineDeps(
        gateway=StubGateway(seed=cfg.random_seed),
        embeddings=load_embeddings(DATA / "mini_glove.txt"),
        classifier=ClassifierModel.load(DATA / "classifier_model.json"),
    )
    corpus = load_corpus(DATA / "corpus.jsonl")
    outcomes = generate_corpus(corpus, deps, cfg)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "outcomes.jsonl", "w", encoding="utf-8") as handle:
        for outcome in outcomes:
            handle.write(json.dumps(outcome.to_dict(), ensure_ascii=False) + "\n")

    routes = Counter(o.route_taken.value for o in outcomes)
    total_outputs = sum(len(o.outputs) for o in outcomes)
    print(f"questions: {len(corpus)}  generated variants: {total_outputs}")
    for route, count in sorted(routes.items()):
        print(f"  route {route:16s} {count}")

    pairs = [
        (output.text, outcome.source.stem)
        for outcome in outcomes
        for output in outcome.outputs
    ]
    if pairs:
        report = corpus_report(pairs)
        print(
            "translation scores vs originals (lower = stronger rewrite): "
            f"BLEU-4 {report.bleu4 * 100:.2f}  METEOR {report.meteor * 100:.2f}  "
            f"ROUGE-L {report.rouge_l * 100:.2f}  CIDEr {report.cider * 10:.2f}  "
            f"(n={report.n})"
        )


if __name__ == "__main__":
    main()
