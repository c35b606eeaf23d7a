from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simloop.errors import (
    DimMismatch,
    DuplicatePoint,
    EmptyInput,
    NotNormalized,
    UnknownId,
    ZeroVector,
)
from simloop.providers import EmbeddingVector
from simloop.simcore import (
    Label,
    Threshold,
    ThresholdSource,
    build_index,
    classify,
    cosine,
    knn_query,
    pairwise_scores,
)
from tests.conftest import oracle_cosine, oracle_knn, random_unit


def unit_vec(point_id: str, values) -> EmbeddingVector:
    norm = math.sqrt(sum(v * v for v in values))
    return EmbeddingVector(
        point_id=point_id,
        dim=len(values),
        values=tuple(v / norm for v in values),
        normalized=True,
    )


def basis_index(dim=3):
    vecs = []
    for i in range(dim):
        values = [0.0] * dim
        values[i] = 1.0
        vecs.append(EmbeddingVector(point_id=f"p{i + 1}", dim=dim, values=tuple(values), normalized=True))
    return build_index(vecs)


class TestCosine:
    def test_identity(self):
        assert cosine([1.0, 0.0, 0.0], [1.0, 0.0, 0.0]) == 1.0

    def test_orthogonal(self):
        assert cosine([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_hand_derived(self):
        # 32 / (sqrt(14) * sqrt(77)), see tools/derive_oracles.py
        assert cosine([1, 2, 3], [4, 5, 6]) == pytest.approx(0.9746318461970762, abs=1e-12)

    def test_symmetry_exact(self):
        rng = random.Random(11)
        for _ in range(50):
            dim = rng.randint(2, 64)
            u = [rng.gauss(0, 1) for _ in range(dim)]
            v = [rng.gauss(0, 1) for _ in range(dim)]
            assert cosine(u, v) == cosine(v, u)

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            cosine([1.0, 2.0], [1.0, 2.0, 3.0])

    def test_zero_vector(self):
        with pytest.raises(ZeroVector):
            cosine([0.0, 0.0], [1.0, 0.0])

    def test_clamped_range(self):
        rng = random.Random(12)
        for _ in range(200):
            u = random_unit(rng, 16)
            assert -1.0 <= cosine(u, u) <= 1.0
            assert cosine(u, u) == pytest.approx(1.0, abs=1e-9)


class TestBuildIndex:
    def test_basis_vectors(self):
        index = basis_index()
        assert len(index) == 3
        assert index.ids == ("p1", "p2", "p3")

    def test_duplicate_id_rejected(self):
        v = unit_vec("a", [1.0, 0.0])
        with pytest.raises(DuplicatePoint):
            build_index([v, v])

    def test_not_normalized_rejected(self):
        bad = EmbeddingVector(point_id="a", dim=2, values=(1.0, 1.0), normalized=True)
        with pytest.raises(NotNormalized):
            build_index([bad])

    def test_unnormalized_flag_rejected(self):
        bad = EmbeddingVector(point_id="a", dim=2, values=(1.0, 0.0), normalized=False)
        with pytest.raises(NotNormalized):
            build_index([bad])

    def test_mixed_dims_rejected(self):
        with pytest.raises(DimMismatch):
            build_index([unit_vec("a", [1.0, 0.0]), unit_vec("b", [1.0, 0.0, 0.0])])

    def test_empty_rejected(self):
        with pytest.raises(EmptyInput):
            build_index([])


class TestKnn:
    def test_exact_hit(self):
        index = basis_index()
        hits = knn_query(index, [1.0, 0.0, 0.0], k=1)
        assert [(h.b, h.score) for h in hits] == [("p1", 1.0)]

    def test_k_larger_than_index(self):
        index = basis_index()
        hits = knn_query(index, [1.0, 0.0, 0.0], k=10)
        assert len(hits) == 3
        assert [h.b for h in hits] == ["p1", "p2", "p3"]  # tie on 0.0 -> id order

    def test_self_exclusion(self):
        index = basis_index()
        hits = knn_query(index, [1.0, 0.0, 0.0], k=3, self_id="p1")
        assert [h.b for h in hits] == ["p2", "p3"]
        assert all(h.a == "p1" for h in hits)

    def test_matches_oracle_randomised(self):
        rng = random.Random(404)
        dim = 64
        entries = [(f"p{i:04d}", random_unit(rng, dim)) for i in range(300)]
        index = build_index([unit_vec(pid, v) for pid, v in entries])
        for _ in range(25):
            query = [rng.gauss(0, 1) for _ in range(dim)]
            expected = oracle_knn(entries, query, 7)
            got = knn_query(index, query, 7)
            assert [h.b for h in got] == [pid for pid, _ in expected]
            for h, (_, score) in zip(got, expected):
                assert h.score == pytest.approx(score, abs=1e-9)

    def test_matches_oracle_at_size_bounds(self):
        # the contract holds up to 2,000 points at dim 256; spot-check the
        # upper corner with a handful of queries
        rng = random.Random(777)
        dim = 256
        entries = [(f"p{i:04d}", random_unit(rng, dim)) for i in range(2000)]
        index = build_index([unit_vec(pid, v) for pid, v in entries])
        for _ in range(3):
            query = [rng.gauss(0, 1) for _ in range(dim)]
            expected = oracle_knn(entries, query, 10)
            got = knn_query(index, query, 10)
            assert [h.b for h in got] == [pid for pid, _ in expected]
            for h, (_, score) in zip(got, expected):
                assert h.score == pytest.approx(score, abs=1e-9)

    def test_zero_query(self):
        with pytest.raises(ZeroVector):
            knn_query(basis_index(), [0.0, 0.0, 0.0], k=1)

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            knn_query(basis_index(), [1.0, 0.0], k=1)

    @given(st.floats(min_value=1e-6, max_value=1e6, allow_nan=False), st.integers(0, 2**32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_scale_invariant_ordering(self, c, seed):
        rng = random.Random(seed)
        entries = [(f"p{i}", random_unit(rng, 8)) for i in range(20)]
        index = build_index([unit_vec(pid, v) for pid, v in entries])
        q = [rng.gauss(0, 1) for _ in range(8)]
        if math.sqrt(sum(x * x for x in q)) < 1e-6:
            return
        base = knn_query(index, q, k=20)
        scaled = knn_query(index, [c * x for x in q], k=20)
        assert [h.b for h in base] == [h.b for h in scaled]
        for x, y in zip(base, scaled):
            assert x.score == pytest.approx(y.score, abs=1e-12)

    def test_negative_scale_reverses(self):
        rng = random.Random(7)
        entries = [(f"p{i}", random_unit(rng, 8)) for i in range(10)]
        index = build_index([unit_vec(pid, v) for pid, v in entries])
        q = random_unit(rng, 8)
        fwd = knn_query(index, q, k=10)
        rev = knn_query(index, [-x for x in q], k=10)
        assert [h.b for h in fwd] == [h.b for h in reversed(rev)]
        for h_fwd in fwd:
            h_rev = next(h for h in rev if h.b == h_fwd.b)
            assert h_rev.score == pytest.approx(-h_fwd.score, abs=1e-12)


class TestPairwise:
    def test_single_pair(self):
        index = basis_index()
        scores = pairwise_scores(index, ["p1", "p2"])
        assert len(scores) == 1
        assert (scores[0].a, scores[0].b) == ("p1", "p2")

    def test_combinatorial_order(self):
        index = basis_index()
        scores = pairwise_scores(index, ["p3", "p1", "p2"])
        assert [(s.a, s.b) for s in scores] == [("p1", "p2"), ("p1", "p3"), ("p2", "p3")]

    def test_scores_match_oracle(self):
        rng = random.Random(21)
        entries = [(f"p{i}", random_unit(rng, 12)) for i in range(6)]
        index = build_index([unit_vec(pid, v) for pid, v in entries])
        by_id = dict(entries)
        for s in pairwise_scores(index, [pid for pid, _ in entries]):
            assert s.score == pytest.approx(oracle_cosine(by_id[s.a], by_id[s.b]), abs=1e-9)

    def test_unknown_id(self):
        with pytest.raises(UnknownId):
            pairwise_scores(basis_index(), ["p1", "nope"])


class TestClassify:
    def test_above(self):
        t = Threshold(tau=0.8, provenance=ThresholdSource.EXPERT_SET)
        assert classify(0.9, t) is Label.SIMILAR

    def test_boundary_inclusive(self):
        t = Threshold(tau=0.8, provenance=ThresholdSource.EXPERT_SET)
        assert classify(0.8, t) is Label.SIMILAR

    def test_below(self):
        t = Threshold(tau=0.0, provenance=ThresholdSource.EXPERT_SET)
        assert classify(-0.2, t) is Label.NOT_SIMILAR

    @given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
    @settings(max_examples=200, deadline=None)
    def test_monotone_in_score(self, tau, s1, s2):
        t = Threshold(tau=tau, provenance=ThresholdSource.EXPERT_SET)
        lo, hi = min(s1, s2), max(s1, s2)
        if classify(lo, t) is Label.SIMILAR:
            assert classify(hi, t) is Label.SIMILAR
