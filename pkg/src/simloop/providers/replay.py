"""Record/replay fixtures: deterministic provider responses keyed by hash.

A fixture file is line-delimited JSON, one ``{key, tags, free_text, values}``
object per line. ``key`` hashes the (prompt text, payload) pair that produced
the record; embeddings replay by the exact embedding text of the profile.
A missing record is always an error, never a silent stub fallback.
"""
from __future__ import annotations

import hashlib
import json
import threading
from pathlib import Path

from simloop.errors import CorruptLine, FixtureMiss
from simloop.providers.base import (
    EmbeddingVector,
    Profile,
    ProviderConfig,
    embedding_text,
    l2_normalize,
)


def fixture_key(prompt_text: str, payload: str) -> str:
    """Lowercase hex SHA-256 of ``prompt_text + "\\x00" + payload``."""
    if not prompt_text or not payload:
        raise ValueError("fixture keys need non-empty prompt text and payload")
    return hashlib.sha256(
        prompt_text.encode("utf-8") + b"\x00" + payload.encode("utf-8")
    ).hexdigest()


def _embed_lookup_key(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class ReplayProvider:
    provider_id = "replay"

    def __init__(self, cfg: ProviderConfig):
        self._by_key: dict[str, dict] = {}
        self._by_embed_text: dict[str, list[float]] = {}
        path = Path(cfg.fixture_path)
        with path.open(encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise CorruptLine(
                        f"bad fixture line: {exc}", file=str(path), line=line_no
                    ) from exc
                for required in ("key", "tags", "free_text", "values"):
                    if required not in record:
                        raise CorruptLine(
                            "fixture record lacks field",
                            file=str(path),
                            line=line_no,
                            field=required,
                        )
                self._by_key[record["key"]] = record
                if record["values"]:
                    text = " ".join(record["tags"]) + "\n" + record["free_text"]
                    self._by_embed_text[text] = [float(v) for v in record["values"]]

    def __len__(self) -> int:
        return len(self._by_key)

    def has_key(self, key: str) -> bool:
        return key in self._by_key

    def summarize(self, point, prompt) -> Profile:
        key = fixture_key(prompt.text, point.payload)
        record = self._by_key.get(key)
        if record is None:
            raise FixtureMiss("no recorded response", key=key, point_id=point.id)
        if len(record["tags"]) != prompt.tag_count:
            raise FixtureMiss(
                "recorded tag count differs from request",
                key=key,
                recorded=len(record["tags"]),
                want=prompt.tag_count,
            )
        return Profile(
            point_id=point.id,
            tags=tuple(record["tags"]),
            free_text=record["free_text"],
            prompt_version=prompt.interest_version,
            provider_id=self.provider_id,
        )

    def embed(self, profile: Profile) -> EmbeddingVector:
        text = embedding_text(profile)
        values = self._by_embed_text.get(text)
        if values is None:
            raise FixtureMiss(
                "no recorded embedding for profile text",
                key=_embed_lookup_key(text),
                point_id=profile.point_id,
            )
        unit = l2_normalize(values)
        return EmbeddingVector(
            point_id=profile.point_id,
            dim=len(unit),
            values=tuple(unit),
            normalized=True,
        )


class RecordingProvider:
    """Wraps a live provider and appends replayable fixture records.

    A record is written once its embedding arrives (the normal round embeds
    each profile right after summarizing it); ``flush`` persists any
    summaries that never got an embedding, with empty values.
    """

    def __init__(self, inner, record_path: str):
        self._inner = inner
        self._path = Path(record_path)
        self._pending: dict[str, dict] = {}
        self._write_lock = threading.Lock()
        self.provider_id = inner.provider_id

    def summarize(self, point, prompt) -> Profile:
        profile = self._inner.summarize(point, prompt)
        self._pending[profile.point_id] = {
            "key": fixture_key(prompt.text, point.payload),
            "tags": list(profile.tags),
            "free_text": profile.free_text,
            "values": [],
        }
        return profile

    def embed(self, profile: Profile) -> EmbeddingVector:
        vector = self._inner.embed(profile)
        record = self._pending.pop(profile.point_id, None)
        if record is not None:
            record["values"] = list(vector.values)
            self._append(record)
        return vector

    def flush(self) -> None:
        for point_id in sorted(self._pending):
            self._append(self._pending.pop(point_id))

    def _append(self, record: dict) -> None:
        with self._write_lock:
            with self._path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(record) + "\n")
