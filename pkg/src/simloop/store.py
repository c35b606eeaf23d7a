"""Durable project persistence: plain-text, line-oriented, atomic.

Layout inside a project directory::

    project.meta       JSON: id, dim, threshold, canonical point versions
    points.csv         one data point per row
    profiles.jsonl     one profile per line, append-only
    embeddings.jsonl   one vector per line, append-only, floats as .17g
    sessions/<id>.json one document per session
    project.lock       advisory single-writer lock

Every file write goes through a temp file plus rename. The two jsonl files
are append-only and valid at any whole-line prefix: a crash between the
profile append and the embedding append leaves orphan profiles, which load
reports as a warning; an embedding without its profile is a violation.
Floats serialize with 17 significant digits, which round-trips float64
bit-exactly.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from filelock import FileLock

from simloop.errors import (
    CorruptLine,
    DimMismatch,
    IntegrityViolation,
    IoError,
    MissingFile,
)
from simloop.ingest import DataPoint, Modality, SourceRef
from simloop.prompting import InterestSpec, RenderedPrompt
from simloop.providers import EmbeddingVector, Profile
from simloop.session import Round, Session, SessionState
from simloop.simcore import Label, PairLabel, Threshold, ThresholdSource

META_FILE = "project.meta"
POINTS_FILE = "points.csv"
PROFILES_FILE = "profiles.jsonl"
EMBEDDINGS_FILE = "embeddings.jsonl"
SESSIONS_DIR = "sessions"
LOCK_FILE = "project.lock"

POINT_COLUMNS = ("id", "modality", "payload", "origin", "index")


@dataclass
class Project:
    project_id: str
    dim: int | None = None
    points: dict[str, DataPoint] = field(default_factory=dict)
    profiles: list[Profile] = field(default_factory=list)
    embeddings: dict[tuple[str, int], EmbeddingVector] = field(default_factory=dict)
    sessions: dict[str, Session] = field(default_factory=dict)
    threshold: Threshold | None = None
    canonical: dict[str, int] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def add_points(self, points: Iterable[DataPoint]) -> None:
        for point in points:
            if point.id in self.points:
                raise IntegrityViolation("point already in project", id=point.id)
            self.points[point.id] = point

    def add_results(
        self, profiles: Sequence[Profile], embeddings: Sequence[EmbeddingVector]
    ) -> None:
        """Record a generated round's outputs; fixes dim on first use."""
        for vec in embeddings:
            if self.dim is None:
                self.dim = vec.dim
            elif vec.dim != self.dim:
                raise DimMismatch("project dim is fixed", got=vec.dim, want=self.dim)
        self.profiles.extend(profiles)
        for profile, vec in zip(profiles, embeddings):
            self.embeddings[(vec.point_id, profile.prompt_version)] = vec

    def mark_canonical(self, point_versions: dict[str, int]) -> None:
        """Accepted-round vectors become the project's canonical ones."""
        self.canonical.update(point_versions)

    def canonical_vectors(self) -> list[EmbeddingVector]:
        out = []
        for pid in sorted(self.canonical):
            out.append(self.embeddings[(pid, self.canonical[pid])])
        return out


def project_lock(project_dir: str | Path) -> FileLock:
    return FileLock(str(Path(project_dir) / LOCK_FILE))


# --- document encoding --------------------------------------------------------


def _profile_doc(profile: Profile) -> dict:
    return {
        "point_id": profile.point_id,
        "tags": list(profile.tags),
        "free_text": profile.free_text,
        "prompt_version": profile.prompt_version,
        "provider_id": profile.provider_id,
        "created_at": profile.created_at,
    }


def _profile_from(doc: dict) -> Profile:
    return Profile(
        point_id=doc["point_id"],
        tags=tuple(doc["tags"]),
        free_text=doc["free_text"],
        prompt_version=doc["prompt_version"],
        provider_id=doc["provider_id"],
        created_at=doc["created_at"],
    )


def _embedding_line(vec: EmbeddingVector, prompt_version: int) -> str:
    head = json.dumps({"point_id": vec.point_id, "prompt_version": prompt_version})
    values = ",".join(format(v, ".17g") for v in vec.values)
    return head[:-1] + ', "values": [' + values + "]}"


def _threshold_doc(threshold: Threshold | None) -> dict | None:
    if threshold is None:
        return None
    return {
        "tau": threshold.tau,
        "provenance": threshold.provenance.value,
        "calibration_stats": threshold.calibration_stats,
    }


def _threshold_from(doc: dict | None) -> Threshold | None:
    if doc is None:
        return None
    return Threshold(
        tau=doc["tau"],
        provenance=ThresholdSource(doc["provenance"]),
        calibration_stats=doc.get("calibration_stats"),
    )


def session_doc(session: Session) -> dict:
    return {
        "session_id": session.session_id,
        "state": session.state.value,
        "interest": {
            "base_task": session.interest.base_task,
            "facets": list(session.interest.facets),
            "version": session.interest.version,
        },
        "point_ids": list(session.point_ids),
        "rounds": [
            {
                "round_no": rnd.round_no,
                "prompt": {
                    "text": rnd.prompt.text,
                    "interest_version": rnd.prompt.interest_version,
                    "tag_count": rnd.prompt.tag_count,
                },
                "profiles": [_profile_doc(p) for p in rnd.profiles],
                "feedback": rnd.feedback,
            }
            for rnd in session.rounds
        ],
        "pair_labels": [
            {"a": l.a, "b": l.b, "label": l.label.value, "labeler": l.labeler}
            for l in session.pair_labels
        ],
    }


def session_from_doc(doc: dict) -> Session:
    return Session(
        session_id=doc["session_id"],
        interest=InterestSpec(
            base_task=doc["interest"]["base_task"],
            facets=tuple(doc["interest"]["facets"]),
            version=doc["interest"]["version"],
        ),
        point_ids=tuple(doc["point_ids"]),
        rounds=tuple(
            Round(
                round_no=r["round_no"],
                prompt=RenderedPrompt(
                    text=r["prompt"]["text"],
                    interest_version=r["prompt"]["interest_version"],
                    tag_count=r["prompt"]["tag_count"],
                ),
                profiles=tuple(_profile_from(p) for p in r["profiles"]),
                feedback=r["feedback"],
            )
            for r in doc["rounds"]
        ),
        state=SessionState(doc["state"]),
        pair_labels=tuple(
            PairLabel(a=l["a"], b=l["b"], label=Label(l["label"]), labeler=l["labeler"])
            for l in doc["pair_labels"]
        ),
    )


# --- writing ------------------------------------------------------------------


def _atomic_write(path: Path, text: str) -> None:
    try:
        fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=path.name + ".")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            os.unlink(tmp)
            raise
    except OSError as exc:
        raise IoError(f"cannot write {path.name}: {exc}", path=str(path)) from exc


def save_project(project: Project, project_dir: str | Path) -> None:
    """Write every project file atomically (temp file + rename each)."""
    root = Path(project_dir)
    try:
        root.mkdir(parents=True, exist_ok=True)
        (root / SESSIONS_DIR).mkdir(exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create project dir: {exc}", path=str(root)) from exc

    meta = {
        "project_id": project.project_id,
        "dim": project.dim,
        "threshold": _threshold_doc(project.threshold),
        "canonical": project.canonical,
    }
    _atomic_write(root / META_FILE, json.dumps(meta, indent=2) + "\n")

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(POINT_COLUMNS)
    for point in project.points.values():
        writer.writerow(
            (
                point.id,
                point.modality.value,
                point.payload,
                point.source_ref.origin,
                str(point.source_ref.index),
            )
        )
    _atomic_write(root / POINTS_FILE, buf.getvalue())

    _atomic_write(
        root / PROFILES_FILE,
        "".join(json.dumps(_profile_doc(p)) + "\n" for p in project.profiles),
    )
    _atomic_write(
        root / EMBEDDINGS_FILE,
        "".join(
            _embedding_line(vec, version) + "\n"
            for (pid, version), vec in project.embeddings.items()
        ),
    )
    for session in project.sessions.values():
        _atomic_write(
            root / SESSIONS_DIR / f"{session.session_id}.json",
            json.dumps(session_doc(session), indent=2) + "\n",
        )


def append_results(
    project_dir: str | Path,
    profiles: Sequence[Profile],
    embeddings: Sequence[EmbeddingVector],
) -> None:
    """Append-only fast path for new round outputs.

    Profiles land before embeddings, so a crash in between leaves orphan
    profiles (a recoverable warning on load), never orphan embeddings.
    """
    root = Path(project_dir)
    meta_path = root / META_FILE
    if not meta_path.is_file():
        raise MissingFile("project not initialised", file=META_FILE)
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    dim = meta.get("dim")
    for vec in embeddings:
        if dim is not None and vec.dim != dim:
            raise DimMismatch("project dim is fixed", got=vec.dim, want=dim)
    try:
        with (root / PROFILES_FILE).open("a", encoding="utf-8") as fh:
            for profile in profiles:
                fh.write(json.dumps(_profile_doc(profile)) + "\n")
        with (root / EMBEDDINGS_FILE).open("a", encoding="utf-8") as fh:
            for profile, vec in zip(profiles, embeddings):
                fh.write(_embedding_line(vec, profile.prompt_version) + "\n")
    except OSError as exc:
        raise IoError(f"append failed: {exc}", path=str(root)) from exc
    if dim is None and embeddings:
        meta["dim"] = embeddings[0].dim
        _atomic_write(meta_path, json.dumps(meta, indent=2) + "\n")


def append_embeddings(
    project_dir: str | Path, items: Sequence[tuple[EmbeddingVector, int]]
) -> None:
    """Append (vector, prompt_version) pairs for already-stored profiles."""
    root = Path(project_dir)
    meta_path = root / META_FILE
    if not meta_path.is_file():
        raise MissingFile("project not initialised", file=META_FILE)
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    dim = meta.get("dim")
    for vec, _ in items:
        if dim is not None and vec.dim != dim:
            raise DimMismatch("project dim is fixed", got=vec.dim, want=dim)
    try:
        with (root / EMBEDDINGS_FILE).open("a", encoding="utf-8") as fh:
            for vec, version in items:
                fh.write(_embedding_line(vec, version) + "\n")
    except OSError as exc:
        raise IoError(f"append failed: {exc}", path=str(root)) from exc
    if dim is None and items:
        meta["dim"] = items[0][0].dim
        _atomic_write(meta_path, json.dumps(meta, indent=2) + "\n")


# --- loading ------------------------------------------------------------------


def _read_jsonl(path: Path) -> list[tuple[int, dict]]:
    records = []
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            try:
                records.append((line_no, json.loads(stripped)))
            except json.JSONDecodeError as exc:
                raise CorruptLine(
                    f"unparseable line: {exc}", file=path.name, line=line_no
                ) from exc
    return records


def load_project(project_dir: str | Path) -> Project:
    """Load and fully validate a project; violations raise, never self-repair."""
    root = Path(project_dir)
    meta_path = root / META_FILE
    if not meta_path.is_file():
        raise MissingFile("no project here", file=META_FILE, path=str(root))
    try:
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorruptLine(f"bad meta: {exc}", file=META_FILE, line=1) from exc

    project = Project(
        project_id=meta["project_id"],
        dim=meta.get("dim"),
        threshold=_threshold_from(meta.get("threshold")),
        canonical={k: int(v) for k, v in (meta.get("canonical") or {}).items()},
    )

    points_path = root / POINTS_FILE
    if points_path.is_file():
        with points_path.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is not None and tuple(header) != POINT_COLUMNS:
                raise CorruptLine("unexpected points header", file=POINTS_FILE, line=1)
            for row in reader:
                if len(row) != len(POINT_COLUMNS):
                    raise CorruptLine(
                        "wrong field count", file=POINTS_FILE, line=reader.line_num
                    )
                pid, modality, payload, origin, index = row
                if pid in project.points:
                    raise IntegrityViolation("duplicate point id", id=pid)
                project.points[pid] = DataPoint(
                    id=pid,
                    modality=Modality(modality),
                    payload=payload,
                    source_ref=SourceRef(origin=origin, index=int(index)),
                )

    profiles_path = root / PROFILES_FILE
    profile_keys: set[tuple[str, int]] = set()
    if profiles_path.is_file():
        for line_no, doc in _read_jsonl(profiles_path):
            try:
                profile = _profile_from(doc)
            except (KeyError, TypeError) as exc:
                raise CorruptLine(
                    f"bad profile record: {exc}", file=PROFILES_FILE, line=line_no
                ) from exc
            if profile.point_id not in project.points:
                raise IntegrityViolation(
                    "profile references unknown point", id=profile.point_id
                )
            project.profiles.append(profile)
            profile_keys.add((profile.point_id, profile.prompt_version))

    embeddings_path = root / EMBEDDINGS_FILE
    if embeddings_path.is_file():
        for line_no, doc in _read_jsonl(embeddings_path):
            try:
                pid = doc["point_id"]
                version = doc["prompt_version"]
                values = tuple(float(v) for v in doc["values"])
            except (KeyError, TypeError, ValueError) as exc:
                raise CorruptLine(
                    f"bad embedding record: {exc}", file=EMBEDDINGS_FILE, line=line_no
                ) from exc
            if pid not in project.points:
                raise IntegrityViolation("embedding references unknown point", id=pid)
            if (pid, version) not in profile_keys:
                raise IntegrityViolation(
                    "embedding without its profile", id=pid, prompt_version=version
                )
            if project.dim is None:
                project.dim = len(values)
            if len(values) != project.dim:
                raise IntegrityViolation(
                    "embedding dim differs from project dim",
                    id=pid,
                    got=len(values),
                    want=project.dim,
                )
            project.embeddings[(pid, version)] = EmbeddingVector(
                point_id=pid, dim=len(values), values=values, normalized=True
            )

    sessions_dir = root / SESSIONS_DIR
    if sessions_dir.is_dir():
        for path in sorted(sessions_dir.glob("*.json")):
            try:
                session = session_from_doc(json.loads(path.read_text(encoding="utf-8")))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise CorruptLine(
                    f"bad session document: {exc}", file=f"{SESSIONS_DIR}/{path.name}", line=1
                ) from exc
            for pid in session.point_ids:
                if pid not in project.points:
                    raise IntegrityViolation(
                        "session references unknown point",
                        session_id=session.session_id,
                        id=pid,
                    )
            project.sessions[session.session_id] = session

    # a canonical entry whose embedding got truncated away is recoverable by
    # re-embedding, so it warns; pointing at a nonexistent point never is
    dangling = []
    for pid, version in sorted(project.canonical.items()):
        if pid not in project.points:
            raise IntegrityViolation("canonical entry for unknown point", id=pid)
        if (pid, version) not in project.embeddings:
            dangling.append(f"{pid}@v{version}")
    if dangling:
        project.warnings.append(
            "canonical vectors missing, re-embed needed: " + ", ".join(dangling)
        )

    orphans = sorted(
        {
            f"{pid}@v{version}"
            for pid, version in profile_keys
            if (pid, version) not in project.embeddings
        }
    )
    if orphans:
        project.warnings.append("orphan profiles without embeddings: " + ", ".join(orphans))
    return project
