"""Server configuration: YAML/JSON file plus environment overrides.

Model identifiers are configuration, not code: leave one unset (null) and
the server falls back to its built-in rule engine for that capability, so
the sidecar runs out of the box with no downloads.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path

import yaml

ENV_PREFIX = "AGENTZERO_SERVER_"

# CoNLL-style tag families mapped onto the wire labels.
DEFAULT_LABEL_MAP: dict[str, str] = {
    "PER": "PER",
    "PERSON": "PER",
    "GPE": "GPE",
    "LOC": "LOC",
    "LOCATION": "LOC",
    "ORG": "MISC",
    "MISC": "MISC",
}


@dataclass
class ServerConfig:
    host: str = "127.0.0.1"
    port: int = 8700
    paraphrase_model: str | None = None
    ner_model: str | None = None
    fill_model: str | None = None
    max_input_tokens: int = 256
    beam_width: int = 10
    label_map: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_LABEL_MAP))

    def __post_init__(self) -> None:
        if not 0 < self.port < 65536:
            raise ValueError(f"invalid port {self.port}")
        if self.max_input_tokens < 1:
            raise ValueError("max_input_tokens must be positive")
        if self.beam_width < 1:
            raise ValueError("beam_width must be positive")

    @classmethod
    def load(cls, path: str | Path | None = None, env: dict[str, str] | None = None) -> "ServerConfig":
        raw: dict = {}
        if path is not None:
            text = Path(path).read_text(encoding="utf-8")
            raw = (json.loads(text) if str(path).endswith(".json") else yaml.safe_load(text)) or {}
        env = os.environ if env is None else env
        for spec in fields(cls):
            key = ENV_PREFIX + spec.name.upper()
            if key not in env:
                continue
            value: object = env[key]
            if spec.name in ("port", "max_input_tokens", "beam_width"):
                value = int(value)  # type: ignore[arg-type]
            elif spec.name == "label_map":
                value = json.loads(value)  # type: ignore[arg-type]
            raw[spec.name] = value
        known = {spec.name for spec in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)
