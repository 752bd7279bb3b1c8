"""FastAPI application implementing the generation-toolkit wire protocol.

    POST /paraphrase {"text": str, "n": int}            -> {"candidates": [str]}
    POST /ner        {"text": str}                      -> {"mentions": [...]}
    POST /fill       {"template": str, "options": [..]} -> {"ranked": [...]}
    GET  /health                                        -> {"status": "ok"}

Error contract: 400 for schema violations, 422 for over-length input,
503 while models are still loading.
"""

from __future__ import annotations

import threading
from contextlib import asynccontextmanager

from fastapi import Depends, FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field, field_validator

from .config import ServerConfig
from .engines import MASK_MARKER, WIRE_LABELS, build_engines


class ParaphraseRequest(BaseModel):
    text: str = Field(min_length=1)
    n: int = Field(ge=1)

    @field_validator("text")
    @classmethod
    def text_not_blank(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("text must not be blank")
        return value


class ParaphraseResponse(BaseModel):
    candidates: list[str]


class NerRequest(BaseModel):
    text: str = Field(min_length=1)

    @field_validator("text")
    @classmethod
    def text_not_blank(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("text must not be blank")
        return value


class Mention(BaseModel):
    start: int
    end: int
    label: str


class NerResponse(BaseModel):
    mentions: list[Mention]


class FillRequest(BaseModel):
    template: str = Field(min_length=1)
    options: list[str] = Field(min_length=1)

    @field_validator("template")
    @classmethod
    def exactly_one_marker(cls, value: str) -> str:
        if value.count(MASK_MARKER) != 1:
            raise ValueError(f"template must contain exactly one {MASK_MARKER}")
        return value

    @field_validator("options")
    @classmethod
    def options_distinct(cls, value: list[str]) -> list[str]:
        if len(set(value)) != len(value):
            raise ValueError("options must be pairwise distinct")
        return value


class RankedOption(BaseModel):
    option: str
    score: float


class FillResponse(BaseModel):
    ranked: list[RankedOption]


class _State:
    def __init__(self) -> None:
        self.ready = False
        self.paraphraser = None
        self.tagger = None
        self.scorer = None
        # Inference is serialized per model; the engines themselves need not
        # be thread-safe.
        self.locks = {name: threading.Lock() for name in ("paraphrase", "ner", "fill")}


def create_app(config: ServerConfig | None = None) -> FastAPI:
    config = config or ServerConfig()
    state = _State()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        state.paraphraser, state.tagger, state.scorer = build_engines(config)
        state.ready = True
        yield
        state.ready = False

    app = FastAPI(title="agentzero-inference-server", lifespan=lifespan)

    @app.exception_handler(RequestValidationError)
    async def schema_violation(_request: Request, exc: RequestValidationError):
        details = [
            {"loc": [str(part) for part in error.get("loc", ())], "msg": str(error.get("msg", ""))}
            for error in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"error": details})

    def require_ready() -> _State:
        if not state.ready:
            raise HTTPException(status_code=503, detail="models are loading")
        return state

    def enforce_length(text: str) -> None:
        if len(text.split()) > config.max_input_tokens:
            raise HTTPException(
                status_code=422,
                detail=f"input exceeds {config.max_input_tokens} tokens",
            )

    @app.get("/health")
    def health():
        if not state.ready:
            return JSONResponse(status_code=503, content={"status": "loading"})
        return {"status": "ok"}

    @app.post("/paraphrase", response_model=ParaphraseResponse)
    def paraphrase(request: ParaphraseRequest, ready: _State = Depends(require_ready)):
        enforce_length(request.text)
        n = min(request.n, config.beam_width)
        with ready.locks["paraphrase"]:
            candidates = ready.paraphraser.paraphrase(request.text, n)
        unique: list[str] = []
        for candidate in candidates:
            if candidate != request.text and candidate not in unique:
                unique.append(candidate)
        return ParaphraseResponse(candidates=unique[:n])

    @app.post("/ner", response_model=NerResponse)
    def ner(request: NerRequest, ready: _State = Depends(require_ready)):
        enforce_length(request.text)
        with ready.locks["ner"]:
            spans = ready.tagger.tag(request.text)
        mentions: list[Mention] = []
        previous_end = 0
        for start, end, label in sorted(spans):
            if label not in WIRE_LABELS:
                continue
            # Contract guard: spans must be in range, non-overlapping, and
            # aligned so that text[start:end] is the exact surface.
            if start < previous_end or not 0 <= start < end <= len(request.text):
                continue
            surface = request.text[start:end]
            if surface != surface.strip():
                continue
            previous_end = end
            mentions.append(Mention(start=start, end=end, label=label))
        return NerResponse(mentions=mentions)

    @app.post("/fill", response_model=FillResponse)
    def fill(request: FillRequest, ready: _State = Depends(require_ready)):
        enforce_length(request.template)
        with ready.locks["fill"]:
            scored = ready.scorer.score(request.template, list(request.options))
        by_option = dict(scored)
        # Contract guard: every requested option exactly once, ranked by
        # descending score with lexicographic ties.
        complete = [(option, by_option.get(option, float("-inf"))) for option in request.options]
        complete.sort(key=lambda item: (-item[1], item[0]))
        return FillResponse(ranked=[RankedOption(option=o, score=s) for o, s in complete])

    return app
