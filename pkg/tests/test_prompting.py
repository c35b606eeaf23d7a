from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simloop.errors import EmptyInterest, InvalidTagCount
from simloop.prompting import (
    RefineMode,
    parse_interest,
    refine_interest,
    render_prompt,
)


class TestParseInterest:
    def test_single_facet(self):
        spec = parse_interest("functionality of the room")
        assert spec.facets == ("functionality of the room",)
        assert spec.version == 1

    def test_and_splits(self):
        spec = parse_interest("functionality of the room and the floor color")
        assert spec.facets == ("functionality of the room", "the floor color")

    def test_commas_split(self):
        spec = parse_interest("fraud risk, transaction volume")
        assert spec.facets == ("fraud risk", "transaction volume")

    def test_word_containing_and_not_split(self):
        spec = parse_interest("sandwich quality")
        assert spec.facets == ("sandwich quality",)

    def test_lowercased_and_deduplicated(self):
        spec = parse_interest("Floor Color, floor color")
        assert spec.facets == ("floor color",)

    def test_blank_raises(self):
        with pytest.raises(EmptyInterest):
            parse_interest("  ")


class TestRenderPrompt:
    def test_single_facet_phrase(self):
        spec = parse_interest("the functionality of the room")
        prompt = render_prompt(spec, tag_count=3)
        assert prompt.text == "Summarize the data point with 3 tags, focus on the functionality of the room"
        assert prompt.interest_version == 1
        assert prompt.tag_count == 3

    def test_two_facets_join_with_and(self):
        spec = parse_interest("the functionality of the room and the floor color")
        prompt = render_prompt(spec)
        assert prompt.text == (
            "Summarize the data point with 3 tags, "
            "focus on the functionality of the room and the floor color"
        )

    def test_no_facets_no_focus_clause(self):
        spec = refine_interest(parse_interest("x"), "", RefineMode.REPLACE)
        prompt = render_prompt(spec, tag_count=3)
        assert prompt.text == "Summarize the data point with 3 tags"

    def test_deterministic(self):
        spec = parse_interest("a, b")
        assert render_prompt(spec, 5) == render_prompt(spec, 5)

    def test_bad_tag_count(self):
        with pytest.raises(InvalidTagCount):
            render_prompt(parse_interest("x"), tag_count=0)

    @given(st.lists(st.text(alphabet="abcdefg ", min_size=1), min_size=1, max_size=5))
    @settings(max_examples=100, deadline=None)
    def test_every_facet_appears_verbatim(self, raw_parts):
        raw = ", ".join(raw_parts)
        try:
            spec = parse_interest(raw)
        except EmptyInterest:
            return
        text = render_prompt(spec).text
        for facet in spec.facets:
            assert facet in text


class TestRefineInterest:
    def test_add_extends(self):
        v1 = parse_interest("functionality of the room")
        v2 = refine_interest(v1, "the floor color", RefineMode.ADD)
        assert v2.facets == ("functionality of the room", "the floor color")
        assert v2.version == 2

    def test_replace_reparses(self):
        v1 = parse_interest("functionality of the room")
        v2 = refine_interest(v1, "fraud risk indicators", RefineMode.REPLACE)
        assert v2.facets == ("fraud risk indicators",)
        assert v2.version == 2

    def test_add_duplicate_still_bumps_version(self):
        v1 = parse_interest("floor color")
        v2 = refine_interest(v1, "floor color", RefineMode.ADD)
        assert v2.facets == v1.facets
        assert v2.version == 2

    def test_add_blank_raises(self):
        with pytest.raises(EmptyInterest):
            refine_interest(parse_interest("x"), "   ", RefineMode.ADD)

    def test_version_strictly_monotone(self):
        spec = parse_interest("a")
        versions = [spec.version]
        for i in range(5):
            spec = refine_interest(spec, f"facet {i}", RefineMode.ADD)
            versions.append(spec.version)
        assert versions == sorted(set(versions))

    def test_parse_render_roundtrip(self):
        spec = parse_interest("the functionality of the room and the floor color")
        text = render_prompt(spec).text
        clause = text.split(", focus on ", 1)[1]
        assert parse_interest(clause).facets == spec.facets
