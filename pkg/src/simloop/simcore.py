"""Cosine similarity, exact kNN over a frozen flat index, and threshold
classification with calibration from expert pair labels.

All dot products accumulate in 64-bit floats regardless of input type and
scores are clamped to [-1, 1] before anyone classifies them. Every ordering
is made total by breaking score ties on ascending point id.
"""
from __future__ import annotations

import math
from array import array
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Iterable, Sequence

from simloop import kernels
from simloop.errors import (
    DimMismatch,
    DuplicatePoint,
    EmptyIndex,
    EmptyInput,
    InsufficientLabels,
    NotNormalized,
    UnknownId,
    ZeroVector,
)

UNIT_NORM_TOL = 1e-9
ZERO_NORM_TOL = 1e-12


class Label(str, Enum):
    SIMILAR = "similar"
    NOT_SIMILAR = "not_similar"


class ThresholdSource(str, Enum):
    EXPERT_SET = "expert_set"
    CALIBRATED = "calibrated"


@dataclass(frozen=True)
class SimilarityScore:
    a: str
    b: str
    score: float


@dataclass(frozen=True)
class Threshold:
    tau: float
    provenance: ThresholdSource
    calibration_stats: dict | None = None

    def __post_init__(self):
        if not -1.0 <= self.tau <= 1.0:
            raise ValueError(f"tau out of range: {self.tau}")


@dataclass(frozen=True)
class PairLabel:
    a: str
    b: str
    label: Label
    labeler: str

    def key(self) -> tuple[str, str, str]:
        """Unordered pair identity per labeler."""
        lo, hi = sorted((self.a, self.b))
        return (lo, hi, self.labeler)


def _as_f64(values: Sequence[float]) -> array:
    if isinstance(values, array) and values.typecode == "d":
        return values
    return array("d", values)


def _clamp(score: float) -> float:
    return -1.0 if score < -1.0 else (1.0 if score > 1.0 else score)


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    """dot(u, v) / (norm(u) * norm(v)), clamped to [-1, 1]."""
    bu, bv = _as_f64(u), _as_f64(v)
    if len(bu) != len(bv):
        raise DimMismatch("vector dims differ", got=len(bv), want=len(bu))
    nu = math.sqrt(kernels.dot(bu, bu))
    nv = math.sqrt(kernels.dot(bv, bv))
    if nu < ZERO_NORM_TOL or nv < ZERO_NORM_TOL:
        raise ZeroVector("cosine undefined for zero-norm vector")
    return _clamp(kernels.dot(bu, bv) / (nu * nv))


class VectorIndex:
    """Frozen flat store of unit vectors, queried by contiguous scan."""

    def __init__(self, dim: int, ids: Sequence[str], flat: array):
        self.dim = dim
        self.ids = tuple(ids)
        self._flat = flat
        self._pos = {pid: i for i, pid in enumerate(self.ids)}
        self.frozen = True

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, point_id: str) -> bool:
        return point_id in self._pos

    def vector(self, point_id: str) -> array:
        if point_id not in self._pos:
            raise UnknownId("point not in index", id=point_id)
        base = self._pos[point_id] * self.dim
        return self._flat[base : base + self.dim]

    def scores_against(self, unit_query: array) -> array:
        """Dot of every stored vector with an already-normalized query."""
        out = array("d", bytes(8 * len(self.ids)))
        kernels.scan(self._flat, self.dim, unit_query, out)
        return out


def build_index(vectors: Iterable) -> VectorIndex:
    """Freeze embeddings into a queryable index, validating as it goes.

    Accepts any objects with ``point_id``, ``dim``, ``values`` and
    ``normalized`` attributes (see ``providers.base.EmbeddingVector``).
    """
    ids: list[str] = []
    seen: set[str] = set()
    flat = array("d")
    dim = None
    for vec in vectors:
        if dim is None:
            dim = vec.dim
        elif vec.dim != dim:
            raise DimMismatch("mixed dims in index input", got=vec.dim, want=dim)
        values = _as_f64(vec.values)
        if len(values) != vec.dim:
            raise DimMismatch("declared dim disagrees with values", got=len(values), want=vec.dim)
        norm = math.sqrt(kernels.dot(values, values))
        if not vec.normalized or abs(norm - 1.0) > UNIT_NORM_TOL:
            raise NotNormalized("index accepts unit vectors only", id=vec.point_id, norm=norm)
        if vec.point_id in seen:
            raise DuplicatePoint("duplicate point id", id=vec.point_id)
        seen.add(vec.point_id)
        ids.append(vec.point_id)
        flat.extend(values)
    if dim is None:
        raise EmptyInput("cannot build an index from no vectors")
    return VectorIndex(dim, ids, flat)


def _normalized_query(index: VectorIndex, query: Sequence[float]) -> array:
    q = _as_f64(query)
    if len(q) != index.dim:
        raise DimMismatch("query dim mismatch", got=len(q), want=index.dim)
    norm = math.sqrt(kernels.dot(q, q))
    if norm < ZERO_NORM_TOL:
        raise ZeroVector("cannot query with a zero vector")
    return array("d", (x / norm for x in q))


def knn_query(
    index: VectorIndex,
    query: Sequence[float],
    k: int,
    self_id: str | None = None,
) -> list[SimilarityScore]:
    """Exact top-min(k, N) by descending cosine; ties on ascending id.

    ``self_id`` excludes the query point itself when querying by a stored
    point. The returned scores carry ``a=self_id`` (or ``"query"``).
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if len(index) == 0:
        raise EmptyIndex("index has no entries")
    scores = index.scores_against(_normalized_query(index, query))
    a = self_id if self_id is not None else "query"
    ranked = sorted(
        (
            (pid, _clamp(scores[i]))
            for i, pid in enumerate(index.ids)
            if pid != self_id
        ),
        key=lambda t: (-t[1], t[0]),
    )
    return [SimilarityScore(a=a, b=pid, score=s) for pid, s in ranked[:k]]


def pairwise_scores(index: VectorIndex, ids: Sequence[str]) -> list[SimilarityScore]:
    """One score per unordered pair, ordered lexicographically by (a, b)."""
    distinct = list(dict.fromkeys(ids))
    for pid in distinct:
        if pid not in index:
            raise UnknownId("point not in index", id=pid)
    if len(distinct) < 2:
        raise EmptyInput("need at least two distinct ids")
    out = []
    for a, b in combinations(sorted(distinct), 2):
        score = _clamp(kernels.dot(index.vector(a), index.vector(b)))
        out.append(SimilarityScore(a=a, b=b, score=score))
    return out


def classify(score: float, threshold: Threshold) -> Label:
    """Similar iff score >= tau; boundary is inclusive by design."""
    return Label.SIMILAR if score >= threshold.tau else Label.NOT_SIMILAR


def pair_score(index: VectorIndex, a: str, b: str) -> float:
    return _clamp(kernels.dot(index.vector(a), index.vector(b)))


def calibrate_threshold(labels: Sequence[PairLabel], index: VectorIndex) -> Threshold:
    """Pick the tau maximizing Youden's J = TPR - FPR over the label set.

    Candidates are the midpoints between adjacent distinct pair scores plus
    the extremes -1 and 1; J ties resolve to the largest tau.
    """
    positives: list[float] = []
    negatives: list[float] = []
    for lab in labels:
        score = pair_score(index, lab.a, lab.b)
        (positives if lab.label is Label.SIMILAR else negatives).append(score)
    if not positives:
        raise InsufficientLabels("no Similar labels", missing=Label.SIMILAR.value)
    if not negatives:
        raise InsufficientLabels("no NotSimilar labels", missing=Label.NOT_SIMILAR.value)

    distinct = sorted(set(positives) | set(negatives))
    candidates = {-1.0, 1.0}
    for lo, hi in zip(distinct, distinct[1:]):
        candidates.add((lo + hi) / 2.0)

    best_tau = -1.0
    best_j = -math.inf
    for tau in sorted(candidates):
        tpr = sum(1 for s in positives if s >= tau) / len(positives)
        fpr = sum(1 for s in negatives if s >= tau) / len(negatives)
        j = tpr - fpr
        if j >= best_j:  # ascending sweep, so >= lands on the largest tau
            best_j = j
            best_tau = tau
    return Threshold(
        tau=best_tau,
        provenance=ThresholdSource.CALIBRATED,
        calibration_stats={
            "j": best_j,
            "positives": len(positives),
            "negatives": len(negatives),
        },
    )
