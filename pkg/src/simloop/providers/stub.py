"""Deterministic test doubles for summarization and embedding.

``stub_summarize`` ranks payload tokens by frequency; ``stub_embed`` is a
signed character-3-gram feature hash. Both are pure functions, so a fixed
corpus always produces bit-identical profiles and vectors.
"""
from __future__ import annotations

import hashlib
import math
import re
from collections import Counter

from simloop.errors import NotEnoughTokens, ZeroVector

# word characters minus underscore, so "modern_faucet" yields two tokens
_TOKEN = re.compile(r"[^\W_]+")


def stub_summarize(payload: str, tag_count: int) -> list[str]:
    """Top ``tag_count`` payload tokens by (frequency desc, lexicographic asc)."""
    tokens = _TOKEN.findall(payload.lower())
    counts = Counter(tokens)
    if len(counts) < tag_count:
        raise NotEnoughTokens(
            "payload has too few distinct tokens", distinct=len(counts), want=tag_count
        )
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [token for token, _ in ranked[:tag_count]]


def stub_embed(text: str, dim: int) -> list[float]:
    """Signed 3-gram hashing of the lowercased text, L2-normalized.

    The text is wrapped with one ``_`` on each side and every length-3
    window (stride 1) is hashed with SHA-256; the first four digest bytes
    (big-endian) mod ``dim`` pick the bucket and byte four's parity picks
    the sign (+1 even, -1 odd).
    """
    if not text:
        raise ZeroVector("cannot embed empty text")
    if dim < 8:
        raise ValueError(f"dim must be >= 8, got {dim}")
    padded = "_" + text.lower() + "_"
    acc = [0.0] * dim
    for i in range(len(padded) - 2):
        digest = hashlib.sha256(padded[i : i + 3].encode("utf-8")).digest()
        bucket = int.from_bytes(digest[:4], "big") % dim
        acc[bucket] += 1.0 if digest[4] % 2 == 0 else -1.0
    norm = math.sqrt(sum(v * v for v in acc))
    if norm < 1e-12:
        raise ZeroVector("3-gram signs cancelled to a zero vector")
    return [v / norm for v in acc]
