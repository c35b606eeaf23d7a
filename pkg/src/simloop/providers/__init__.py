"""Uniform summarizer/embedder interface over live, stub and replay backends."""
from __future__ import annotations

from simloop.providers.base import (
    EmbeddingVector,
    Profile,
    ProviderConfig,
    ProviderKind,
    embedding_text,
)
from simloop.providers.replay import RecordingProvider, ReplayProvider, fixture_key
from simloop.providers.stub import stub_embed, stub_summarize


class StubProvider:
    provider_id = "stub"

    def __init__(self, cfg: ProviderConfig):
        self._dim = cfg.embed_dim

    def summarize(self, point, prompt) -> Profile:
        tags = stub_summarize(point.payload, prompt.tag_count)
        return Profile(
            point_id=point.id,
            tags=tuple(tags),
            free_text="",
            prompt_version=prompt.interest_version,
            provider_id=self.provider_id,
        )

    def embed(self, profile: Profile) -> EmbeddingVector:
        values = stub_embed(embedding_text(profile), self._dim)
        return EmbeddingVector(
            point_id=profile.point_id,
            dim=self._dim,
            values=tuple(values),
            normalized=True,
        )


def make_provider(cfg: ProviderConfig):
    """Build the backend for a config; reuse the instance across a batch."""
    cfg.validate()
    if cfg.kind is ProviderKind.STUB:
        return StubProvider(cfg)
    if cfg.kind is ProviderKind.REPLAY:
        return ReplayProvider(cfg)
    from simloop.providers.live import LiveProvider  # httpx import stays lazy

    provider = LiveProvider(cfg)
    if cfg.record_path:
        return RecordingProvider(provider, cfg.record_path)
    return provider


def summarize(point, prompt, cfg: ProviderConfig) -> Profile:
    return make_provider(cfg).summarize(point, prompt)


def embed(profile: Profile, cfg: ProviderConfig) -> EmbeddingVector:
    return make_provider(cfg).embed(profile)


__all__ = [
    "EmbeddingVector",
    "Profile",
    "ProviderConfig",
    "ProviderKind",
    "RecordingProvider",
    "ReplayProvider",
    "StubProvider",
    "embed",
    "embedding_text",
    "fixture_key",
    "make_provider",
    "stub_embed",
    "stub_summarize",
    "summarize",
]
