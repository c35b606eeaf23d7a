"""HTTP API over a project directory: the backend for the review UI and CLI.

Every mutating endpoint persists the project before responding. Mutations
are serialized per session (plus a global store lock), and the neighbors
index is rebuilt lazily after a mutation touches canonical vectors, under a
guard so concurrent queries see either the old or the new frozen index.

Error responses are always ``{code, message, details}``; the closed code
set lives in ``simloop.errors`` and maps onto 4xx for validation and state
conflicts, 502 for provider failures and 500 for I/O.
"""
from __future__ import annotations

import threading
from collections import defaultdict
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from simloop import simcore
from simloop.errors import (
    EmptyInput,
    NotGenerated,
    SimloopError,
    UnknownId,
    ValidationError,
)
from simloop.ingest import ingest_image_manifest, ingest_tabular
from simloop.prompting import RefineMode
from simloop.providers import ProviderConfig
from simloop.session import ReviewAction, generate_round, label_pair, start_session, submit_review
from simloop.simcore import Label, Threshold, ThresholdSource, build_index, classify, knn_query
from simloop.store import Project, load_project, save_project, session_doc

_CONFLICT_CODES = {
    "already_accepted",
    "session_closed",
    "preceding_round_unreviewed",
    "not_generated",
    "duplicate_id",
    "duplicate_point",
    "integrity_violation",
}
_NOT_FOUND_CODES = {"unknown_id", "missing_file"}


def _status_for(exc: SimloopError) -> int:
    if exc.code in _NOT_FOUND_CODES:
        return 404
    if exc.code in _CONFLICT_CODES:
        return 409
    if isinstance(exc, ValidationError):
        return 400
    if exc.code.startswith("provider") or exc.code in ("timeout", "tag_count_mismatch", "fixture_miss", "not_enough_tokens"):
        return 502
    return 500


class IngestBody(BaseModel):
    kind: str
    path: str
    id_column: str | None = None


class SessionBody(BaseModel):
    point_ids: list[str]
    interest: str


class ReviewBody(BaseModel):
    feedback: str = ""
    action: str
    edit: str | None = None
    mode: str | None = None


class LabelBody(BaseModel):
    a: str
    b: str
    label: str
    labeler: str = "expert"


class CalibrateBody(BaseModel):
    session_id: str


class ThresholdBody(BaseModel):
    tau: float


class AppState:
    def __init__(self, project_dir: str | Path, cfg: ProviderConfig, tag_count: int = 3):
        self.project_dir = Path(project_dir)
        self.cfg = cfg
        self.tag_count = tag_count
        self.project: Project = load_project(self.project_dir)
        self.store_lock = threading.RLock()
        self.session_locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
        self._index = None
        self._index_dirty = True
        self._index_lock = threading.Lock()

    def persist(self) -> None:
        save_project(self.project, self.project_dir)

    def invalidate_index(self) -> None:
        with self._index_lock:
            self._index_dirty = True

    def neighbors_index(self):
        with self._index_lock:
            if self._index_dirty:
                vectors = self.project.canonical_vectors()
                self._index = build_index(vectors) if vectors else None
                self._index_dirty = False
            return self._index

    def session_or_404(self, session_id: str):
        session = self.project.sessions.get(session_id)
        if session is None:
            raise UnknownId("no such session", session_id=session_id)
        return session

    def next_session_id(self) -> str:
        n = len(self.project.sessions) + 1
        while f"s{n:04d}" in self.project.sessions:
            n += 1
        return f"s{n:04d}"

    def snapshot(self, session) -> dict:
        """Session document plus the payloads the review screen shows."""
        doc = session_doc(session)
        doc["points"] = {
            pid: self.project.points[pid].payload for pid in session.point_ids
        }
        return doc


def create_app(project_dir: str | Path, cfg: ProviderConfig, tag_count: int = 3) -> FastAPI:
    state = AppState(project_dir, cfg, tag_count)
    app = FastAPI(title="simloop", version="0.1.0")
    app.state.simloop = state
    # the review console is served statically from anywhere, so the API
    # answers cross-origin requests (single-user desk tool, no auth)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(SimloopError)
    async def simloop_error_handler(request: Request, exc: SimloopError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={"code": exc.code, "message": exc.message, "details": exc.details},
        )

    @app.get("/health")
    def health():
        project = state.project
        return {
            "status": "ok",
            "project_id": project.project_id,
            "points": len(project.points),
            "dim": project.dim,
        }

    @app.post("/projects/{project_id}/ingest")
    def ingest(project_id: str, body: IngestBody):
        project = state.project
        if project_id != project.project_id:
            raise UnknownId("no such project", project_id=project_id)
        if body.kind == "tabular":
            points, _ = ingest_tabular(body.path, body.id_column or "id")
        elif body.kind == "images":
            points = ingest_image_manifest(body.path)
        else:
            raise ValidationError("kind must be 'tabular' or 'images'", kind=body.kind)
        with state.store_lock:
            project.add_points(points)
            state.persist()
        return {"ingested": len(points), "total": len(project.points)}

    @app.post("/sessions", status_code=201)
    def create_session(body: SessionBody):
        with state.store_lock:
            session_id = state.next_session_id()
            session = start_session(
                session_id, body.point_ids, body.interest, list(state.project.points)
            )
            state.project.sessions[session_id] = session
            state.persist()
        return state.snapshot(session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return state.snapshot(state.session_or_404(session_id))

    @app.post("/sessions/{session_id}/generate")
    def generate(session_id: str):
        with state.session_locks[session_id]:
            session = state.session_or_404(session_id)
            points = [state.project.points[pid] for pid in session.point_ids]
            result = generate_round(session, points, state.cfg, state.tag_count)
            with state.store_lock:
                state.project.add_results(result.profiles, result.embeddings)
                state.project.sessions[session_id] = result.session
                state.persist()
        return state.snapshot(result.session)

    @app.post("/sessions/{session_id}/review")
    def review(session_id: str, body: ReviewBody):
        try:
            action = ReviewAction(body.action)
        except ValueError:
            raise ValidationError("action must be 'refine' or 'accept'", action=body.action)
        mode = RefineMode(body.mode) if body.mode else RefineMode.ADD
        with state.session_locks[session_id]:
            session = state.session_or_404(session_id)
            updated = submit_review(session, body.feedback, action, edit=body.edit or "", mode=mode)
            with state.store_lock:
                state.project.sessions[session_id] = updated
                if action is ReviewAction.ACCEPT:
                    final = updated.rounds[-1]
                    state.project.mark_canonical(
                        {p.point_id: p.prompt_version for p in final.profiles}
                    )
                    state.invalidate_index()
                state.persist()
        return state.snapshot(updated)

    @app.post("/sessions/{session_id}/labels")
    def add_label(session_id: str, body: LabelBody):
        try:
            label = Label(body.label)
        except ValueError:
            raise ValidationError(
                "label must be 'similar' or 'not_similar'", label=body.label
            )
        with state.session_locks[session_id]:
            session = state.session_or_404(session_id)
            updated = label_pair(session, body.a, body.b, label, labeler=body.labeler)
            with state.store_lock:
                state.project.sessions[session_id] = updated
                state.persist()
        return state.snapshot(updated)

    @app.post("/threshold/calibrate")
    def calibrate(body: CalibrateBody):
        session = state.session_or_404(body.session_id)
        if not session.rounds:
            raise NotGenerated("session has no generated rounds", session_id=body.session_id)
        if not session.pair_labels:
            raise EmptyInput("session has no pair labels", session_id=body.session_id)
        version = session.rounds[-1].prompt.interest_version
        vectors = []
        for pid in session.point_ids:
            vec = state.project.embeddings.get((pid, version))
            if vec is not None:
                vectors.append(vec)
        index = build_index(vectors)
        threshold = simcore.calibrate_threshold(session.pair_labels, index)
        with state.store_lock:
            state.project.threshold = threshold
            state.persist()
        return {
            "tau": threshold.tau,
            "provenance": threshold.provenance.value,
            "calibration_stats": threshold.calibration_stats,
        }

    @app.put("/threshold")
    def set_threshold(body: ThresholdBody):
        if not -1.0 <= body.tau <= 1.0:
            raise ValidationError("tau must lie in [-1, 1]", tau=body.tau)
        threshold = Threshold(tau=body.tau, provenance=ThresholdSource.EXPERT_SET)
        with state.store_lock:
            state.project.threshold = threshold
            state.persist()
        return {"tau": threshold.tau, "provenance": threshold.provenance.value}

    @app.get("/points/{point_id}/neighbors")
    def neighbors(point_id: str, k: int = 5):
        if point_id not in state.project.points:
            raise UnknownId("no such point", id=point_id)
        index = state.neighbors_index()
        if index is None or point_id not in index:
            raise UnknownId(
                "point has no accepted embedding yet; accept a session first",
                id=point_id,
            )
        hits = knn_query(index, index.vector(point_id), k=k, self_id=point_id)
        threshold = state.project.threshold
        return {
            "point_id": point_id,
            "k": k,
            "threshold": threshold.tau if threshold else None,
            "neighbors": [
                {
                    "rank": rank,
                    "id": hit.b,
                    "score": hit.score,
                    "label": classify(hit.score, threshold).value if threshold else None,
                }
                for rank, hit in enumerate(hits, start=1)
            ],
        }

    return app


def serve(project_dir: str | Path, bind_addr: str, cfg: ProviderConfig, tag_count: int = 3) -> None:
    """Run the API with uvicorn; fails fast if the project will not load."""
    import uvicorn

    host, _, port = bind_addr.rpartition(":")
    app = create_app(project_dir, cfg, tag_count)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port), log_level="info")
