"""Shared provider types: profiles, embedding vectors, configuration."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

from simloop.errors import InvalidSpec, ZeroVector


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class ProviderKind(str, Enum):
    LIVE = "live"
    STUB = "stub"
    REPLAY = "replay"


@dataclass(frozen=True)
class Profile:
    """Tag-based summary a provider produced for one data point."""

    point_id: str
    tags: tuple[str, ...]
    free_text: str
    prompt_version: int
    provider_id: str
    created_at: str = field(default_factory=utc_now_iso, compare=False)

    def __post_init__(self):
        if any(not t for t in self.tags):
            raise ValueError("profile tags must be non-empty strings")


@dataclass(frozen=True)
class EmbeddingVector:
    point_id: str
    dim: int
    values: tuple[float, ...]
    normalized: bool

    def __post_init__(self):
        if len(self.values) != self.dim:
            raise ValueError(f"dim {self.dim} but {len(self.values)} values")


def embedding_text(profile: Profile) -> str:
    """The exact string a profile embeds as: tags space-joined, newline, free text."""
    return " ".join(profile.tags) + "\n" + profile.free_text


def l2_normalize(values: list[float]) -> list[float]:
    norm = math.sqrt(sum(v * v for v in values))
    if norm < 1e-12:
        raise ZeroVector("vector norm below 1e-12 before normalization")
    return [v / norm for v in values]


def mean_pool(token_vectors: list[list[float]]) -> list[float]:
    """Order-invariant pooling for backends that return per-token vectors."""
    if not token_vectors:
        raise ZeroVector("no token vectors to pool")
    dim = len(token_vectors[0])
    pooled = [0.0] * dim
    for vec in token_vectors:
        for i, v in enumerate(vec):
            pooled[i] += v
    return [v / len(token_vectors) for v in pooled]


@dataclass(frozen=True)
class ProviderConfig:
    kind: ProviderKind
    endpoint: str = ""
    model: str = ""
    api_key_env: str = "SIM_API_KEY"
    fixture_path: str | None = None
    embed_dim: int = 256
    timeout: float = 30.0
    max_retries: int = 3
    backoff_base: float = 0.5
    max_inflight: int = 4
    record_path: str | None = None

    def validate(self) -> None:
        if self.kind is ProviderKind.LIVE:
            if not self.endpoint or not self.model:
                raise InvalidSpec("live provider needs endpoint and model")
        elif self.kind is ProviderKind.REPLAY:
            if not self.fixture_path or not Path(self.fixture_path).is_file():
                raise InvalidSpec("replay provider needs an existing fixture file",
                                  fixture_path=self.fixture_path)
        elif self.kind is ProviderKind.STUB:
            if self.embed_dim < 8:
                raise InvalidSpec("stub embed_dim must be >= 8", embed_dim=self.embed_dim)
        if self.max_retries < 0:
            raise InvalidSpec("max_retries must be >= 0", max_retries=self.max_retries)
