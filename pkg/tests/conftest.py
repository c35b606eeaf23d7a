"""Shared fixtures and independent oracles.

The oracle functions here are deliberately plain-Python reimplementations
(lists, loops, sorted) so index/kernel regressions cannot hide: they never
call into simloop.simcore or simloop.kernels.
"""
from __future__ import annotations

import math
import random

import pytest

from simloop.ingest import SynthSpec, synth_aml


def oracle_cosine(u, v) -> float:
    dot = 0.0
    nu = 0.0
    nv = 0.0
    for a, b in zip(u, v):
        dot += a * b
        nu += a * a
        nv += b * b
    return dot / (math.sqrt(nu) * math.sqrt(nv))


def oracle_knn(entries: list[tuple[str, list[float]]], query: list[float], k: int,
               self_id: str | None = None) -> list[tuple[str, float]]:
    """Full-scan sort over (id, unit vector) entries; ties on ascending id."""
    qn = math.sqrt(sum(x * x for x in query))
    unit = [x / qn for x in query]
    scored = []
    for pid, vec in entries:
        if pid == self_id:
            continue
        dot = 0.0
        for a, b in zip(vec, unit):
            dot += a * b
        scored.append((pid, dot))
    scored.sort(key=lambda t: (-t[1], t[0]))
    return scored[:k]


def random_unit(rng: random.Random, dim: int) -> list[float]:
    while True:
        vec = [rng.gauss(0.0, 1.0) for _ in range(dim)]
        norm = math.sqrt(sum(x * x for x in vec))
        if norm > 1e-6:
            return [x / norm for x in vec]


@pytest.fixture(scope="session")
def seed7_corpus():
    """The synthetic corpus used across provider, retrieval and CLI tests."""
    points, truth = synth_aml(SynthSpec(seed=7, n_customers=100, n_clusters=4, launder_fraction=0.1))
    return points, truth
