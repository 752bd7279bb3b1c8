"""Command-line behavior: exit codes, stream discipline, determinism."""

from __future__ import annotations

import json
import subprocess
import sys

from agentzero.cli import EXIT_BACKEND, EXIT_OK, EXIT_USAGE, run

from .conftest import data_path
from .oracles import cider_oracle, corpus_bleu4_oracle, meteor_oracle, rouge_l_oracle


def invoke(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


CORPUS = str(data_path("corpus.jsonl"))
PAIRS = str(data_path("eval_pairs.jsonl"))


class TestSplit:
    def test_split_emits_json_per_line(self, capsys):
        code, out, err = invoke(capsys, "split", "--in", CORPUS)
        assert code == EXIT_OK
        assert err == ""
        lines = out.strip().split("\n")
        assert len(lines) == 60
        record = json.loads(lines[1])
        assert set(record) == {"id", "context", "task"}
        assert record["task"] == "What is the first thing they should do to resolve this conflict?"

    def test_out_file_keeps_stdout_clean(self, capsys, tmp_path):
        target = tmp_path / "split.jsonl"
        code, out, err = invoke(capsys, "split", "--in", CORPUS, "--out", str(target))
        assert code == EXIT_OK
        assert out == "" and err == ""
        assert len(target.read_text(encoding="utf-8").strip().split("\n")) == 60

    def test_unsplittable_stem_warns_to_stderr_only(self, capsys, tmp_path):
        source = tmp_path / "one.jsonl"
        source.write_text(
            '{"id":"s1","question":"Do it now.","choices":["a","b"],"answer_index":0,"domain":"d"}\n',
            encoding="utf-8",
        )
        code, out, err = invoke(capsys, "split", "--in", str(source))
        assert code == EXIT_OK
        assert out == ""
        assert "s1" in err


class TestGenerate:
    def test_stub_run_is_byte_identical_across_runs(self, capsys):
        code1, out1, err1 = invoke(capsys, "generate", "--backend", "stub", "--seed", "7", "--in", CORPUS, "--jobs", "1")
        code2, out2, err2 = invoke(capsys, "generate", "--backend", "stub", "--seed", "7", "--in", CORPUS, "--jobs", "1")
        assert code1 == code2 == EXIT_OK
        assert err1 == err2 == ""
        assert out1 == out2
        lines = out1.strip().split("\n")
        assert len(lines) == 60
        record = json.loads(lines[0])
        assert set(record) == {"source", "route", "outputs", "diag"}

    def test_http_backend_requires_url(self, capsys, monkeypatch):
        monkeypatch.delenv("AGENTZERO_URL", raising=False)
        code, out, err = invoke(capsys, "generate", "--backend", "http", "--in", CORPUS)
        assert code == EXIT_USAGE
        assert "AGENTZERO_URL" in err

    def test_env_url_fallback_reaches_live_backend(self, capsys, monkeypatch, tmp_path):
        from .replay_server import replay_server

        source = tmp_path / "mini.jsonl"
        source.write_text(
            '{"id":"q2","question":"Robert and Annie begin arguing during a meeting about '
            'how to prepare a presentation. What is the first thing they should do?",'
            '"choices":["a","b"],"answer_index":0,"domain":"d","qtype":"application"}\n',
            encoding="utf-8",
        )
        with replay_server(seed=42) as url:
            monkeypatch.setenv("AGENTZERO_URL", url)
            code, out, err = invoke(capsys, "generate", "--backend", "http", "--in", str(source))
        assert code == EXIT_OK, err
        [record] = [json.loads(line) for line in out.strip().split("\n")]
        assert record["route"] == "combined"

    def test_config_file_controls_generation(self, capsys, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"max_outputs_per_question": 2}), encoding="utf-8")
        code, out, _err = invoke(
            capsys, "generate", "--backend", "stub", "--in", CORPUS, "--config", str(config)
        )
        assert code == EXIT_OK
        for line in out.strip().split("\n"):
            assert len(json.loads(line)["outputs"]) <= 2

    def test_unreachable_http_backend_exits_2(self, capsys):
        code, out, err = invoke(
            capsys, "generate", "--backend", "http", "--url", "http://127.0.0.1:9", "--in", CORPUS
        )
        assert code == EXIT_BACKEND
        assert out == ""
        assert err != ""


class TestEvaluate:
    def test_scores_match_oracles_with_presentation_scaling(self, capsys):
        from agentzero.text import tokenize

        code, out, err = invoke(capsys, "evaluate", "--pairs", PAIRS)
        assert code == EXIT_OK and err == ""
        doc = json.loads(out)
        pairs = []
        with open(PAIRS, encoding="utf-8") as handle:
            for line in handle:
                record = json.loads(line)
                pairs.append((tokenize(record["generated"]), tokenize(record["original"])))
        assert doc["n"] == 10
        assert doc["bleu4"] == round(corpus_bleu4_oracle(pairs) * 100, 2)
        assert doc["meteor"] == round(
            sum(meteor_oracle(c, r) for c, r in pairs) / len(pairs) * 100, 2
        )
        assert doc["rouge_l"] == round(
            sum(rouge_l_oracle(c, r) for c, r in pairs) / len(pairs) * 100, 2
        )
        assert doc["cider"] == round(cider_oracle([(c, [r]) for c, r in pairs]) * 10, 2)

    def test_bad_pair_record_is_usage_error(self, capsys, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"generated": "only one side"}\n', encoding="utf-8")
        code, _out, err = invoke(capsys, "evaluate", "--pairs", str(bad))
        assert code == EXIT_USAGE
        assert err != ""


class TestNeighbors:
    def test_neighbors_output(self, capsys):
        code, out, err = invoke(capsys, "neighbors", "robert", "-k", "3")
        assert code == EXIT_OK and err == ""
        results = json.loads(out)
        assert len(results) == 3
        assert all(set(r) == {"token", "cosine"} for r in results)

    def test_unknown_token_gives_empty_list(self, capsys):
        code, out, _err = invoke(capsys, "neighbors", "notaword")
        assert code == EXIT_OK
        assert json.loads(out) == []


class TestClassify:
    def test_bundled_model_labels_match(self, capsys):
        code, out, err = invoke(capsys, "classify", "--in", CORPUS)
        assert code == EXIT_OK and err == ""
        by_id = {json.loads(line)["id"]: json.loads(line) for line in out.strip().split("\n")}
        assert by_id["q001"]["qtype"] == "application"
        assert by_id["q025"]["qtype"] == "concept"
        assert by_id["q051"]["qtype"] == "calculation"
        assert abs(sum(by_id["q001"]["probs"].values()) - 1.0) < 1e-4


class TestTrainClassifier:
    def test_trains_and_reports(self, capsys, tmp_path):
        model_path = tmp_path / "model.json"
        code, out, err = invoke(
            capsys,
            "train-classifier",
            "--in",
            CORPUS,
            "--model-out",
            str(model_path),
            "--seed",
            "42",
        )
        assert code == EXIT_OK and err == ""
        summary = json.loads(out)
        assert summary["eval_accuracy"] >= 0.9
        assert model_path.exists()

    def test_unlabeled_corpus_rejected(self, capsys, tmp_path):
        unlabeled = tmp_path / "unlabeled.jsonl"
        unlabeled.write_text(
            '{"id":"x","question":"A? B?","choices":["a","b"],"answer_index":0,"domain":"d"}\n',
            encoding="utf-8",
        )
        code, _out, err = invoke(
            capsys, "train-classifier", "--in", str(unlabeled), "--model-out", str(tmp_path / "m.json")
        )
        assert code == EXIT_USAGE
        assert err != ""


class TestUsage:
    def test_no_arguments_is_usage_error(self, capsys):
        code, _out, _err = invoke(capsys)
        assert code == EXIT_USAGE

    def test_unknown_subcommand_is_usage_error(self, capsys):
        code, _out, _err = invoke(capsys, "frobnicate")
        assert code == EXIT_USAGE

    def test_missing_input_file_is_usage_error(self, capsys):
        code, _out, err = invoke(capsys, "split", "--in", "/nonexistent/x.jsonl")
        assert code == EXIT_USAGE
        assert err != ""

    def test_module_entry_point(self):
        result = subprocess.run(
            [sys.executable, "-m", "agentzero", "neighbors", "robert", "-k", "2"],
            capture_output=True,
            text=True,
            timeout=120,
        )
        assert result.returncode == 0
        assert len(json.loads(result.stdout)) == 2
