"""Command-line entry point.

Data goes to standard output (or --out); diagnostics go to standard error.
Exit codes: 0 success, 1 validation or usage error, 2 backend unavailable.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from importlib import resources
from pathlib import Path

from . import classifier as clf
from .core import PipelineConfig, load_corpus
from .embeddings import load_embeddings, nearest_neighbors
from .errors import BackendUnavailable, MalformedRecord, NoTaskFound
from .gateway import HttpService, Stub, make_gateway
from .metrics import corpus_report
from .pipeline import PipelineDeps, generate_corpus
from .splitter import split_context_task

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BACKEND = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _bundled(name: str) -> Path:
    return Path(str(resources.files("agentzero.data").joinpath(name)))


def _load_config(path: str | None) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    return PipelineConfig.from_file(path)


def _open_out(path: str | None):
    if path is None:
        return sys.stdout
    return open(path, "w", encoding="utf-8")


def _build_parser() -> _Parser:
    parser = _Parser(prog="agentzero", description="Multiple-choice question generation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, needs_in: bool = True) -> None:
        p.add_argument("--config", help="JSON config file mirroring the pipeline settings")
        if needs_in:
            p.add_argument("--in", dest="input", required=True, help="input JSONL path")
        p.add_argument("--out", help="output path (default: stdout)")

    p = sub.add_parser("classify", help="label each question with its predicted type")
    common(p)
    p.add_argument("--model", help="classifier model JSON (default: bundled)")

    p = sub.add_parser("split", help="split stems into context and task")
    common(p)

    p = sub.add_parser("generate", help="generate question variants")
    common(p)
    p.add_argument("--backend", choices=["stub", "http"], default="stub")
    p.add_argument("--url", help="inference service URL (or env AGENTZERO_URL)")
    p.add_argument("--seed", type=int, help="override the configured random seed")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--embeddings", help="GloVe-format embeddings (default: bundled)")
    p.add_argument("--model", help="classifier model JSON (default: bundled)")

    p = sub.add_parser("evaluate", help="score generated/original pairs with the four metrics")
    p.add_argument("--pairs", required=True, help="JSONL of {generated, original}")
    p.add_argument("--out", help="output path (default: stdout)")

    p = sub.add_parser("neighbors", help="nearest embedding neighbors of a token")
    p.add_argument("token")
    p.add_argument("-k", type=int, default=5)
    p.add_argument("--embeddings", help="GloVe-format embeddings (default: bundled)")
    p.add_argument("--out", help="output path (default: stdout)")

    p = sub.add_parser("train-classifier", help="fit the question-type classifier")
    common(p, needs_in=True)
    p.add_argument("--model-out", required=True, help="where to write the model JSON")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--l2", type=float, default=clf.DEFAULT_L2)
    p.add_argument("--epochs", type=int, default=clf.DEFAULT_EPOCHS)
    return parser


def _cmd_classify(args) -> int:
    model_path = args.model or _bundled("classifier_model.json")
    model = clf.ClassifierModel.load(model_path)
    questions = load_corpus(args.input)
    out = _open_out(args.out)
    try:
        for q in questions:
            label, probs = clf.predict(model, q)
            record = {
                "id": q.id,
                "qtype": label.value,
                "probs": {cls.value: round(p, 6) for cls, p in probs.items()},
            }
            out.write(json.dumps(record, ensure_ascii=False) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _cmd_split(args) -> int:
    cfg = _load_config(args.config)
    questions = load_corpus(args.input)
    out = _open_out(args.out)
    try:
        for q in questions:
            try:
                split = split_context_task(q.stem, cfg)
            except NoTaskFound as exc:
                print(f"agentzero: {q.id}: {exc}", file=sys.stderr)
                continue
            record = {"id": q.id, "context": list(split.context), "task": split.task}
            out.write(json.dumps(record, ensure_ascii=False) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _cmd_generate(args) -> int:
    cfg = _load_config(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, random_seed=args.seed)
    if args.backend == "http":
        url = args.url or os.environ.get("AGENTZERO_URL")
        if not url:
            print("agentzero: --backend http requires --url or AGENTZERO_URL", file=sys.stderr)
            return EXIT_USAGE
        gateway = make_gateway(HttpService(base_url=url))
        if not gateway.health():
            print(f"agentzero: inference service at {url} is not healthy", file=sys.stderr)
            return EXIT_BACKEND
    else:
        gateway = make_gateway(Stub(seed=cfg.random_seed))
    table = load_embeddings(args.embeddings or _bundled("mini_glove.txt"))
    model_path = args.model or _bundled("classifier_model.json")
    model = clf.ClassifierModel.load(model_path)
    deps = PipelineDeps(gateway=gateway, embeddings=table, classifier=model)
    questions = load_corpus(args.input)
    outcomes = generate_corpus(questions, deps, cfg, jobs=max(1, args.jobs))
    out = _open_out(args.out)
    try:
        for outcome in outcomes:
            out.write(json.dumps(outcome.to_dict(), ensure_ascii=False) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    if any(o.diagnostics.error for o in outcomes):
        failed = sum(1 for o in outcomes if o.diagnostics.error)
        print(f"agentzero: backend failed on {failed} question(s)", file=sys.stderr)
        return EXIT_BACKEND
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    pairs: list[tuple[str, str]] = []
    with open(args.pairs, encoding="utf-8") as handle:
        for number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            record = json.loads(line)
            try:
                pairs.append((record["generated"], record["original"]))
            except (KeyError, TypeError):
                print(f"agentzero: line {number}: need generated and original", file=sys.stderr)
                return EXIT_USAGE
    report = corpus_report(pairs)
    # Presentation scaling: BLEU/METEOR/ROUGE-L x100, CIDEr x10.
    doc = {
        "bleu4": round(report.bleu4 * 100, 2),
        "meteor": round(report.meteor * 100, 2),
        "rouge_l": round(report.rouge_l * 100, 2),
        "cider": round(report.cider * 10, 2),
        "n": report.n,
        "note": "lower is better: these measure closeness to the originals",
    }
    out = _open_out(args.out)
    try:
        out.write(json.dumps(doc, ensure_ascii=False) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _cmd_neighbors(args) -> int:
    table = load_embeddings(args.embeddings or _bundled("mini_glove.txt"))
    results = nearest_neighbors(table, args.token, args.k)
    out = _open_out(args.out)
    try:
        out.write(
            json.dumps(
                [{"token": t, "cosine": round(c, 6)} for t, c in results], ensure_ascii=False
            )
            + "\n"
        )
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _cmd_train_classifier(args) -> int:
    questions = load_corpus(args.input)
    pairs = clf.labeled_corpus(questions)
    train_set, test_set = clf.stratified_split(pairs, 0.2, args.seed)
    model = clf.train(train_set, seed=args.seed, l2=args.l2, epochs=args.epochs)
    correct = sum(1 for q, label in test_set if clf.predict(model, q)[0] is label)
    eval_accuracy = correct / len(test_set) if test_set else float("nan")
    model.save(args.model_out)
    summary = {
        "train_accuracy": round(model.train_accuracy, 4),
        "eval_accuracy": round(eval_accuracy, 4),
        "train_size": len(train_set),
        "eval_size": len(test_set),
        "model": args.model_out,
    }
    out = _open_out(args.out)
    try:
        out.write(json.dumps(summary) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


_COMMANDS = {
    "classify": _cmd_classify,
    "split": _cmd_split,
    "generate": _cmd_generate,
    "evaluate": _cmd_evaluate,
    "neighbors": _cmd_neighbors,
    "train-classifier": _cmd_train_classifier,
}


def run(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (MalformedRecord, ValueError) as exc:
        print(f"agentzero: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"agentzero: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BackendUnavailable as exc:
        print(f"agentzero: backend unavailable: {exc}", file=sys.stderr)
        return EXIT_BACKEND


def main() -> None:
    raise SystemExit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
