"""Compiling a reviewer's interest criteria into summarization prompts.

Interest parsing is deliberately deterministic string work (split, trim,
lowercase, dedupe) rather than another model call, so the refinement loop
is testable and the rendered prompt is a pure function of its inputs.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from simloop.errors import EmptyInterest, InvalidTagCount

BASE_TASK = "Summarize the data point with {tag_count} tags"
DEFAULT_TAG_COUNT = 3

_FACET_SPLIT = re.compile(r",|\band\b")


class RefineMode(str, Enum):
    ADD = "add"
    REPLACE = "replace"


@dataclass(frozen=True)
class InterestSpec:
    base_task: str
    facets: tuple[str, ...]
    version: int

    def __post_init__(self):
        if not self.base_task:
            raise EmptyInterest("base task must be non-empty")
        if any(not f for f in self.facets):
            raise EmptyInterest("facets must be non-empty strings")
        if self.version < 1:
            raise ValueError(f"version must be >= 1, got {self.version}")


@dataclass(frozen=True)
class RenderedPrompt:
    text: str
    interest_version: int
    tag_count: int


def _split_facets(raw: str) -> list[str]:
    facets = []
    for part in _FACET_SPLIT.split(raw.lower()):
        part = part.strip()
        if part and part not in facets:
            facets.append(part)
    return facets


def parse_interest(raw: str) -> InterestSpec:
    """Split free-form focus text on commas and the word "and" into facets."""
    if not raw or not raw.strip():
        raise EmptyInterest("interest text is blank")
    return InterestSpec(base_task=BASE_TASK, facets=tuple(_split_facets(raw)), version=1)


def render_prompt(spec: InterestSpec, tag_count: int = DEFAULT_TAG_COUNT) -> RenderedPrompt:
    """Instantiate the instruction string; facets join with " and "."""
    if tag_count < 1:
        raise InvalidTagCount("tag count must be >= 1", tag_count=tag_count)
    text = spec.base_task.format(tag_count=tag_count)
    if spec.facets:
        text += ", focus on " + " and ".join(spec.facets)
    return RenderedPrompt(text=text, interest_version=spec.version, tag_count=tag_count)


def refine_interest(spec: InterestSpec, user_edit: str, mode: RefineMode) -> InterestSpec:
    """Next interest version: Add appends new facets, Replace reparses."""
    if mode is RefineMode.REPLACE:
        if not user_edit or not user_edit.strip():
            return InterestSpec(base_task=spec.base_task, facets=(), version=spec.version + 1)
        facets = tuple(_split_facets(user_edit))
    else:
        if not user_edit or not user_edit.strip():
            raise EmptyInterest("nothing to add")
        merged = list(spec.facets)
        for facet in _split_facets(user_edit):
            if facet not in merged:
                merged.append(facet)
        facets = tuple(merged)
    return InterestSpec(base_task=spec.base_task, facets=facets, version=spec.version + 1)
