"""The review loop: rounds of generate -> review -> refine or accept, plus
expert pair labels collected along the way for threshold calibration.

Sessions are immutable; every operation returns a new snapshot, which is
what makes failed generations trivially atomic: a provider error surfaces
before any new state exists.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Sequence

from simloop.errors import (
    AlreadyAccepted,
    EmptyInput,
    NotGenerated,
    PrecedingRoundUnreviewed,
    SelfPair,
    SessionClosed,
    UnknownId,
)
from simloop.ingest import DataPoint
from simloop.prompting import (
    DEFAULT_TAG_COUNT,
    InterestSpec,
    RefineMode,
    RenderedPrompt,
    parse_interest,
    refine_interest,
    render_prompt,
)
from simloop.providers import EmbeddingVector, Profile, ProviderConfig, make_provider
from simloop.simcore import Label, PairLabel


class SessionState(str, Enum):
    CREATED = "created"
    GENERATED = "generated"
    ACCEPTED = "accepted"


class ReviewAction(str, Enum):
    REFINE = "refine"
    ACCEPT = "accept"


@dataclass(frozen=True)
class Round:
    round_no: int
    prompt: RenderedPrompt
    profiles: tuple[Profile, ...]
    feedback: str | None = None


@dataclass(frozen=True)
class Session:
    session_id: str
    interest: InterestSpec
    point_ids: tuple[str, ...]
    rounds: tuple[Round, ...] = ()
    state: SessionState = SessionState.CREATED
    pair_labels: tuple[PairLabel, ...] = ()

    @property
    def latest_round(self) -> Round | None:
        return self.rounds[-1] if self.rounds else None


@dataclass(frozen=True)
class GenerateResult:
    session: Session
    profiles: tuple[Profile, ...]
    embeddings: tuple[EmbeddingVector, ...]


def start_session(
    session_id: str,
    point_ids: Sequence[str],
    raw_interest: str,
    known_ids: Sequence[str],
) -> Session:
    if not point_ids:
        raise EmptyInput("a session needs at least one point")
    known = set(known_ids)
    for pid in point_ids:
        if pid not in known:
            raise UnknownId("point does not exist", id=pid)
    return Session(
        session_id=session_id,
        interest=parse_interest(raw_interest),
        point_ids=tuple(dict.fromkeys(point_ids)),
    )


def generate_round(
    session: Session,
    points: Sequence[DataPoint],
    cfg: ProviderConfig,
    tag_count: int = DEFAULT_TAG_COUNT,
) -> GenerateResult:
    """Summarize and embed every session point under the current interest.

    All provider calls complete before any state changes, so a failure in
    the middle leaves the input session untouched. The caller persists the
    returned embeddings keyed by (point_id, prompt_version).
    """
    if session.state is SessionState.ACCEPTED:
        raise AlreadyAccepted("accepted sessions are terminal", session_id=session.session_id)
    last = session.latest_round
    if last is not None and last.feedback is None:
        raise PrecedingRoundUnreviewed(
            "review the previous round before regenerating",
            session_id=session.session_id,
            round_no=last.round_no,
        )

    by_id = {p.id: p for p in points}
    for pid in session.point_ids:
        if pid not in by_id:
            raise UnknownId("session point missing from supplied points", id=pid)

    provider = make_provider(cfg)
    prompt = render_prompt(session.interest, tag_count)
    profiles: list[Profile] = []
    embeddings: list[EmbeddingVector] = []
    for pid in session.point_ids:
        profile = provider.summarize(by_id[pid], prompt)
        profiles.append(profile)
        embeddings.append(provider.embed(profile))

    new_round = Round(
        round_no=len(session.rounds) + 1,
        prompt=prompt,
        profiles=tuple(profiles),
    )
    updated = replace(
        session,
        rounds=session.rounds + (new_round,),
        state=SessionState.GENERATED,
    )
    return GenerateResult(
        session=updated, profiles=tuple(profiles), embeddings=tuple(embeddings)
    )


def submit_review(
    session: Session,
    feedback: str,
    action: ReviewAction,
    edit: str = "",
    mode: RefineMode = RefineMode.ADD,
) -> Session:
    """Record feedback on the latest round, then refine the interest or accept."""
    if session.state is SessionState.ACCEPTED:
        raise AlreadyAccepted("accepted sessions are terminal", session_id=session.session_id)
    if session.state is not SessionState.GENERATED:
        raise NotGenerated("nothing to review yet", session_id=session.session_id)

    reviewed = replace(session.rounds[-1], feedback=feedback)
    rounds = session.rounds[:-1] + (reviewed,)
    if action is ReviewAction.ACCEPT:
        return replace(session, rounds=rounds, state=SessionState.ACCEPTED)
    return replace(
        session,
        rounds=rounds,
        interest=refine_interest(session.interest, edit, mode),
    )


def label_pair(
    session: Session, a: str, b: str, label: Label, labeler: str = "expert"
) -> Session:
    """Upsert the expert judgment for an unordered pair of session points."""
    if session.state is SessionState.ACCEPTED:
        raise SessionClosed("cannot label an accepted session", session_id=session.session_id)
    if a == b:
        raise SelfPair("a pair needs two distinct points", id=a)
    for pid in (a, b):
        if pid not in session.point_ids:
            raise UnknownId("point not in session", id=pid)
    new = PairLabel(a=a, b=b, label=label, labeler=labeler)
    kept = tuple(l for l in session.pair_labels if l.key() != new.key())
    return replace(session, pair_labels=kept + (new,))
