"""agentzero: zero-shot multiple-choice question generation.

Rewrites existing questions into syntactically different, semantically
equivalent variants by paraphrasing the question context and substituting
named entities, reusing the original answer set.
"""

from .core import (
    GeneratedQuestion,
    MultipleChoiceQuestion,
    PipelineConfig,
    QuestionType,
    Route,
    load_corpus,
    parse_question_record,
    serialize_question_record,
)
from .pipeline import GenerationOutcome, PipelineDeps, generate, generate_corpus

__version__ = "0.1.0"

__all__ = [
    "GeneratedQuestion",
    "GenerationOutcome",
    "MultipleChoiceQuestion",
    "PipelineConfig",
    "PipelineDeps",
    "QuestionType",
    "Route",
    "generate",
    "generate_corpus",
    "load_corpus",
    "parse_question_record",
    "serialize_question_record",
]
