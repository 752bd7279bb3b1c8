from __future__ import annotations

from importlib import resources
from pathlib import Path

import pytest

from agentzero.classifier import ClassifierModel
from agentzero.core import PipelineConfig, load_corpus
from agentzero.embeddings import load_embeddings
from agentzero.gateway import StubGateway


def data_path(name: str) -> Path:
    return Path(str(resources.files("agentzero.data").joinpath(name)))


@pytest.fixture(scope="session")
def corpus():
    return load_corpus(data_path("corpus.jsonl"))


@pytest.fixture(scope="session")
def corpus_by_id(corpus):
    return {q.id: q for q in corpus}


@pytest.fixture(scope="session")
def embedding_table():
    return load_embeddings(data_path("mini_glove.txt"))


@pytest.fixture(scope="session")
def stub_gateway():
    return StubGateway(seed=42)


@pytest.fixture()
def cfg():
    return PipelineConfig()


@pytest.fixture(scope="session")
def bundled_model():
    return ClassifierModel.load(data_path("classifier_model.json"))
