"""HTTP provider speaking the chat-completions / embeddings wire shape.

Transport failures, 429 and 5xx retry with exponential backoff up to
``max_retries`` times; content errors (a reply with the wrong number of
tags) never retry. Concurrent calls are bounded by a semaphore so at most
``max_inflight`` requests are outstanding per provider instance.
"""
from __future__ import annotations

import os
import threading
import time

import httpx

from simloop.errors import (
    ProviderError,
    ProviderTimeout,
    ProviderUnreachable,
    TagCountMismatch,
)
from simloop.providers.base import (
    EmbeddingVector,
    Profile,
    ProviderConfig,
    embedding_text,
    l2_normalize,
    mean_pool,
)


def parse_tags(reply: str, want: int) -> list[str]:
    """Extract tags from a model reply.

    Splits on ``#`` when present, else commas, else newlines; exactly
    ``want`` tags must come out, never padded.
    """
    reply = reply.strip()
    if "#" in reply:
        parts = reply.split("#")
    elif "," in reply:
        parts = reply.split(",")
    else:
        parts = reply.splitlines()
    tags = [p.strip().strip(",").strip() for p in parts]
    tags = [t for t in tags if t]
    if len(tags) != want:
        raise TagCountMismatch("reply tag count is wrong", got=len(tags), want=want)
    return tags


class LiveProvider:
    def __init__(self, cfg: ProviderConfig):
        self._cfg = cfg
        self.provider_id = f"live:{cfg.model}"
        headers = {}
        api_key = os.environ.get(cfg.api_key_env, "")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        self._client = httpx.Client(
            base_url=cfg.endpoint.rstrip("/"),
            headers=headers,
            timeout=cfg.timeout,
        )
        self._inflight = threading.BoundedSemaphore(cfg.max_inflight)

    def close(self) -> None:
        self._client.close()

    def _post(self, path: str, body: dict) -> dict:
        cfg = self._cfg
        last_error: Exception | None = None
        for attempt in range(cfg.max_retries + 1):
            if attempt:
                time.sleep(cfg.backoff_base * (2 ** (attempt - 1)))
            try:
                with self._inflight:
                    response = self._client.post(path, json=body)
            except httpx.TimeoutException as exc:
                last_error = ProviderTimeout(f"request timed out: {exc}", path=path)
                continue
            except httpx.TransportError as exc:
                last_error = ProviderUnreachable(f"transport failure: {exc}", path=path)
                continue
            if response.status_code == 429 or response.status_code >= 500:
                last_error = ProviderError(
                    "retryable provider failure",
                    status=response.status_code,
                    body=response.text[:200],
                )
                continue
            if response.status_code >= 400:
                raise ProviderError(
                    "provider rejected the request",
                    status=response.status_code,
                    body=response.text[:200],
                )
            try:
                return response.json()
            except ValueError as exc:
                raise ProviderError(
                    f"provider returned non-JSON: {exc}",
                    status=response.status_code,
                    body=response.text[:200],
                ) from exc
        raise last_error  # type: ignore[misc]

    def summarize(self, point, prompt) -> Profile:
        body = {
            "model": self._cfg.model,
            "messages": [
                {"role": "user", "content": prompt.text + "\n\n" + point.payload}
            ],
        }
        data = self._post("/chat/completions", body)
        try:
            reply = data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"malformed completion response: {exc}") from exc
        tags = parse_tags(reply, prompt.tag_count)
        return Profile(
            point_id=point.id,
            tags=tuple(tags),
            free_text="",
            prompt_version=prompt.interest_version,
            provider_id=self.provider_id,
        )

    def embed(self, profile: Profile) -> EmbeddingVector:
        body = {"model": self._cfg.model, "input": embedding_text(profile)}
        data = self._post("/embeddings", body)
        try:
            values = data["data"][0]["embedding"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"malformed embedding response: {exc}") from exc
        if values and isinstance(values[0], list):
            values = mean_pool([[float(x) for x in tok] for tok in values])
        unit = l2_normalize([float(x) for x in values])
        return EmbeddingVector(
            point_id=profile.point_id,
            dim=len(unit),
            values=tuple(unit),
            normalized=True,
        )
