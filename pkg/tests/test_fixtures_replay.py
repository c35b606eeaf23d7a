"""Replaying the bundled fixtures must reproduce the reference tagging
runs byte-for-byte, including the preserved misclassification."""
from __future__ import annotations

import pytest

from simloop.fixtures import fixture_path
from simloop.ingest import ingest_image_manifest, ingest_tabular
from simloop.providers import ProviderConfig, ProviderKind
from simloop.session import SessionState, generate_round, start_session

ROOM_FUNCTION_TRIPLETS = [
    ("Bathroom", "ModernDesign", "SanitaryWare"),
    ("shower", "bathroom", "modern-design"),
    ("bathroom", "modern_faucet", "LED_lighting"),
    ("Bathroom", "Sink", "Toilet"),
]

ROOM_FLOOR_TRIPLETS = [
    ("bathroom", "beige_floor", "modern"),
    ("Bathroom", "Beige Floor", "Elegant Design"),
    ("Bathroom", "Beige Floor", "Compact"),
    ("bedroom", "modern design", "beige floor"),
]

AML_RISK_TRIPLET = (
    "High frequency cross-border transactions",
    "Large amounts in different currencies",
    "Inconsistent payment formats",
)


def replay_cfg(name: str) -> ProviderConfig:
    return ProviderConfig(kind=ProviderKind.REPLAY, fixture_path=str(fixture_path(name)))


@pytest.fixture
def bathroom_points():
    return ingest_image_manifest(fixture_path("bathroom_scenes.json"))


def run_round(points, interest: str, fixture: str):
    ids = [p.id for p in points]
    session = start_session("s1", ids, interest, ids)
    result = generate_round(session, points, replay_cfg(fixture))
    assert result.session.state is SessionState.GENERATED
    return result


class TestRoomFunctionRun:
    def test_tag_triplets_exact(self, bathroom_points):
        result = run_round(bathroom_points, "the functionality of the room", "room_function.jsonl")
        assert [p.tags for p in result.profiles] == ROOM_FUNCTION_TRIPLETS

    def test_embeddings_unit_norm(self, bathroom_points):
        result = run_round(bathroom_points, "the functionality of the room", "room_function.jsonl")
        for vec in result.embeddings:
            assert vec.normalized
            assert sum(v * v for v in vec.values) == pytest.approx(1.0, abs=1e-9)


class TestRoomFloorColorRun:
    def test_tag_triplets_exact(self, bathroom_points):
        result = run_round(
            bathroom_points,
            "the functionality of the room and the floor color",
            "room_floor_color.jsonl",
        )
        assert [p.tags for p in result.profiles] == ROOM_FLOOR_TRIPLETS

    def test_misclassified_row_preserved(self, bathroom_points):
        result = run_round(
            bathroom_points,
            "the functionality of the room and the floor color",
            "room_floor_color.jsonl",
        )
        assert result.profiles[3].tags == ("bedroom", "modern design", "beige floor")


class TestAmlRiskRun:
    def test_risk_tags_exact(self):
        points, _ = ingest_tabular(fixture_path("aml_customers.csv"), "id")
        interest = (
            "transaction frequency, amount patterns, beneficiary details, "
            "and geographical markers"
        )
        result = run_round(points, interest, "aml_risk.jsonl")
        for profile in result.profiles:
            assert profile.tags == AML_RISK_TRIPLET
        assessments = [p.free_text for p in result.profiles]
        assert assessments == [
            "Is Money Laundering: YES",
            "Is Money Laundering: YES",
            "Is Money Laundering: NO",
        ]


def test_wrong_interest_misses_fixture(bathroom_points):
    from simloop.errors import FixtureMiss

    ids = [p.id for p in bathroom_points]
    session = start_session("s1", ids, "something else entirely", ids)
    with pytest.raises(FixtureMiss):
        generate_round(session, bathroom_points, replay_cfg("room_function.jsonl"))
