"""Corpus record parsing, serialization round trips, and config defaults."""

from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agentzero.core import (
    MultipleChoiceQuestion,
    PipelineConfig,
    QuestionType,
    load_corpus,
    parse_question_record,
    serialize_question_record,
)
from agentzero.errors import MalformedRecord

TABLE_STYLE_RECORD = (
    '{"id":"q4","question":"Robert and Annie begin arguing during a meeting about how to '
    'prepare a presentation. What is the first thing they should do to resolve this conflict?",'
    '"choices":["Look for common ground","Ask another meeting attendee to provide a neutral '
    'opinion","Listen carefully to make sure they understand the problem","Temporarily change '
    'the subject to something less argumentative"],"answer_index":2,"domain":"Soft Skills"}'
)


class TestParse:
    def test_full_record(self):
        q = parse_question_record(TABLE_STYLE_RECORD)
        assert q.id == "q4"
        assert len(q.choices) == 4
        assert q.correct_index == 2
        assert q.domain == "Soft Skills"
        assert q.qtype is None

    def test_minimal_record(self):
        q = parse_question_record(
            '{"id":"x","question":"A?","choices":["a","b"],"answer_index":0,"domain":"d"}'
        )
        assert q.choices == ("a", "b")

    def test_index_out_of_range(self):
        with pytest.raises(MalformedRecord):
            parse_question_record(
                '{"id":"x","question":"A?","choices":["a","b"],"answer_index":2,"domain":"d"}'
            )

    @pytest.mark.parametrize(
        "line",
        [
            "not json at all",
            '{"id":"x","question":"A?","choices":["a"],"answer_index":0,"domain":"d"}',
            '{"id":"x","question":"A?","choices":["a","a"],"answer_index":0,"domain":"d"}',
            '{"id":"x","question":"  ","choices":["a","b"],"answer_index":0,"domain":"d"}',
            '{"id":"x","choices":["a","b"],"answer_index":0,"domain":"d"}',
            '{"id":"x","question":"A?","choices":["a","b"],"answer_index":true,"domain":"d"}',
        ],
    )
    def test_malformed_records(self, line):
        with pytest.raises(MalformedRecord):
            parse_question_record(line)

    def test_unknown_keys_ignored(self):
        q = parse_question_record(
            '{"id":"x","question":"A?","choices":["a","b"],"answer_index":0,"domain":"d",'
            '"difficulty":3,"proficiency":"senior"}'
        )
        assert q.id == "x"

    def test_qtype_parsed(self):
        q = parse_question_record(
            '{"id":"x","question":"A?","choices":["a","b"],"answer_index":0,"domain":"d",'
            '"qtype":"concept"}'
        )
        assert q.qtype is QuestionType.CONCEPT


class TestSerialize:
    def test_round_trip_table_record(self):
        q = parse_question_record(TABLE_STYLE_RECORD)
        assert parse_question_record(serialize_question_record(q)) == q

    def test_single_line_and_key_order(self):
        q = parse_question_record(
            '{"id":"x","question":"A?","choices":["a","b"],"answer_index":0,"domain":"d"}'
        )
        line = serialize_question_record(q)
        assert "\n" not in line
        assert list(json.loads(line)) == ["id", "question", "choices", "answer_index", "domain"]
        labeled = parse_question_record(
            '{"id":"x","question":"A?","choices":["a","b"],"answer_index":0,"domain":"d",'
            '"qtype":"concept"}'
        )
        assert list(json.loads(serialize_question_record(labeled))) == [
            "id", "question", "choices", "answer_index", "domain", "qtype",
        ]

    def test_embedded_quotes_round_trip(self):
        q = MultipleChoiceQuestion(
            id="x", stem='He said "why?"', choices=('a "b"', "c\\d"), correct_index=0, domain="d"
        )
        assert parse_question_record(serialize_question_record(q)) == q


_texts = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",)), min_size=1, max_size=40
).filter(lambda s: s.strip())


@given(
    ident=_texts,
    stem=_texts,
    choices=st.lists(_texts, min_size=2, max_size=5, unique=True),
    domain=_texts,
    qtype=st.sampled_from([None, *QuestionType]),
    data=st.data(),
)
@settings(max_examples=120, deadline=None)
def test_round_trip_randomized(ident, stem, choices, domain, qtype, data):
    index = data.draw(st.integers(min_value=0, max_value=len(choices) - 1))
    q = MultipleChoiceQuestion(
        id=ident, stem=stem, choices=tuple(choices), correct_index=index, domain=domain, qtype=qtype
    )
    assert parse_question_record(serialize_question_record(q)) == q


class TestLoadCorpus:
    def test_bundled_corpus_has_sixty_records(self, corpus):
        assert len(corpus) == 60
        assert all(q.qtype is not None for q in corpus)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("", encoding="utf-8")
        assert load_corpus(path) == []

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text(
            '\n{"id":"x","question":"A?","choices":["a","b"],"answer_index":0,"domain":"d"}\n\n',
            encoding="utf-8",
        )
        assert len(load_corpus(path)) == 1

    def test_bad_line_reports_number(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text(
            '{"id":"x","question":"A?","choices":["a","b"],"answer_index":0,"domain":"d"}\n'
            "garbage\n",
            encoding="utf-8",
        )
        with pytest.raises(MalformedRecord, match="line 2"):
            load_corpus(path)

    def test_missing_file_is_os_error(self, tmp_path):
        with pytest.raises(OSError):
            load_corpus(tmp_path / "nope.jsonl")


class TestPipelineConfig:
    def test_defaults_match_documented_constants(self):
        cfg = PipelineConfig()
        assert cfg.bleu_min == 0.23
        assert cfg.bleu_max == 0.8
        assert cfg.knn_k == 5
        assert cfg.max_paraphrase_candidates == 10
        assert cfg.max_outputs_per_question == 5
        assert cfg.wh_words == frozenset({"who", "what", "when", "where", "why", "how", "which"})

    def test_invalid_band_rejected(self):
        with pytest.raises(ValueError):
            PipelineConfig(bleu_min=0.9, bleu_max=0.5)
        with pytest.raises(ValueError):
            PipelineConfig(bleu_min=-0.1)
        with pytest.raises(ValueError):
            PipelineConfig(knn_k=0)
        with pytest.raises(ValueError):
            PipelineConfig(wh_words=frozenset())

    def test_from_file(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(
            json.dumps(
                {
                    "bleu_min": 0.1,
                    "bleu_max": 0.9,
                    "knn_k": 3,
                    "wh_words": ["What", "HOW"],
                    "entity_defaults": {"PER": ["Ada"], "MISC": []},
                    "random_seed": 9,
                }
            ),
            encoding="utf-8",
        )
        cfg = PipelineConfig.from_file(path)
        assert cfg.bleu_min == 0.1
        assert cfg.knn_k == 3
        assert cfg.wh_words == frozenset({"what", "how"})
        assert cfg.entity_defaults["PER"] == ("Ada",)
        assert cfg.random_seed == 9
