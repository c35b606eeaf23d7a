"""Batch and operator entry point for the whole pipeline.

Exit codes: 0 success, 1 validation/usage error, 2 provider error.
Environment: SIM_API_KEY holds the live API key, SIM_API_BASE overrides the
endpoint flag. Output is plain text (no color), scores print with six
fractional digits (truncated) while stored values keep full precision.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

from simloop import simcore, store
from simloop.errors import ProviderFailure, SimloopError, UnknownId, ValidationError
from simloop.ingest import (
    SynthSpec,
    ingest_image_manifest,
    ingest_tabular,
    write_synth_csv,
)
from simloop.prompting import parse_interest, render_prompt
from simloop.providers import ProviderConfig, ProviderKind, make_provider
from simloop.providers.replay import fixture_key
from simloop.session import ReviewAction, generate_round, start_session, submit_review
from simloop.simcore import build_index, classify, knn_query
from simloop.store import (
    Project,
    append_embeddings,
    load_project,
    project_lock,
    save_project,
)


def trunc6(x: float) -> float:
    return math.trunc(x * 1_000_000) / 1_000_000


def add_provider_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("provider")
    group.add_argument("--provider", choices=["stub", "replay", "live"], default="stub")
    group.add_argument("--endpoint", default="", help="live API base URL")
    group.add_argument("--model", default="", help="live model name")
    group.add_argument("--fixture", default=None, help="replay fixture path")
    group.add_argument("--embed-dim", type=int, default=256, help="stub embedding dim")
    group.add_argument("--timeout", type=float, default=30.0)
    group.add_argument("--max-retries", type=int, default=3)
    group.add_argument("--record", default=None, help="record live responses to this fixture")


def provider_config(args: argparse.Namespace) -> ProviderConfig:
    endpoint = os.environ.get("SIM_API_BASE", "") or args.endpoint
    cfg = ProviderConfig(
        kind=ProviderKind(args.provider),
        endpoint=endpoint,
        model=args.model,
        fixture_path=args.fixture,
        embed_dim=args.embed_dim,
        timeout=args.timeout,
        max_retries=args.max_retries,
        record_path=args.record,
    )
    cfg.validate()
    return cfg


def load_or_init_project(project_dir: str) -> Project:
    root = Path(project_dir)
    if (root / store.META_FILE).is_file():
        return load_project(root)
    return Project(project_id=root.name or "project")


def require_project(project_dir: str) -> Project:
    project = load_project(project_dir)
    for warning in project.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return project


# --- subcommands ---------------------------------------------------------------


def cmd_ingest(args) -> int:
    Path(args.project).mkdir(parents=True, exist_ok=True)
    with project_lock(args.project):
        project = load_or_init_project(args.project)
        if args.source_kind == "tabular":
            points, _ = ingest_tabular(args.path, args.id_column)
        else:
            points = ingest_image_manifest(args.path)
        project.add_points(points)
        save_project(project, args.project)
    print(f"ingested {len(points)} points into {args.project} ({len(project.points)} total)")
    return 0


def cmd_synth(args) -> int:
    spec = SynthSpec(
        seed=args.seed,
        n_customers=args.n,
        n_clusters=args.clusters,
        launder_fraction=args.fraction,
    )
    truth = args.truth or str(Path(args.out).with_suffix("")) + "_truth.csv"
    count = write_synth_csv(spec, args.out, truth)
    print(f"wrote {count} customers to {args.out} (ground truth: {truth})")
    return 0


def cmd_summarize(args) -> int:
    cfg = provider_config(args)
    with project_lock(args.project):
        project = require_project(args.project)
        point_ids = args.points.split(",") if args.points else list(project.points)
        session_id = args.session_id or f"s{len(project.sessions) + 1:04d}"
        if session_id in project.sessions:
            raise ValidationError("session id already exists", session_id=session_id)
        session = start_session(session_id, point_ids, args.interest, list(project.points))
        points = [project.points[pid] for pid in session.point_ids]
        result = generate_round(session, points, cfg, args.tag_count)
        session = result.session
        if not args.no_accept:
            session = submit_review(session, "accepted from cli", ReviewAction.ACCEPT)
            project.mark_canonical(
                {p.point_id: p.prompt_version for p in session.rounds[-1].profiles}
            )
        project.add_results(result.profiles, result.embeddings)
        project.sessions[session_id] = session
        save_project(project, args.project)
    state = session.state.value
    print(f"session {session_id}: {len(result.profiles)} profiles, state={state}")
    for profile in result.profiles:
        print(f"  {profile.point_id}: {', '.join(profile.tags)}")
    return 0


def cmd_embed(args) -> int:
    cfg = provider_config(args)
    with project_lock(args.project):
        project = require_project(args.project)
        have = set(project.embeddings)
        orphans = [
            p for p in project.profiles if (p.point_id, p.prompt_version) not in have
        ]
        if not orphans:
            print("no orphan profiles; nothing to embed")
            return 0
        provider = make_provider(cfg)
        items = []
        for profile in orphans:
            vec = provider.embed(profile)
            items.append((vec, profile.prompt_version))
        append_embeddings(args.project, items)
    print(f"embedded {len(items)} orphan profiles")
    return 0


def cmd_query(args) -> int:
    project = require_project(args.project)
    vectors = project.canonical_vectors()
    if not vectors:
        raise ValidationError("project has no accepted embeddings; run summarize first")
    index = build_index(vectors)
    if args.point not in index:
        raise UnknownId("point has no accepted embedding", id=args.point)
    hits = knn_query(index, index.vector(args.point), k=args.k, self_id=args.point)
    threshold = project.threshold
    print("rank\tid\tscore\tlabel")
    for rank, hit in enumerate(hits, start=1):
        label = classify(hit.score, threshold).value if threshold else "-"
        print(f"{rank}\t{hit.b}\t{trunc6(hit.score):.6f}\t{label}")
    return 0


def cmd_calibrate(args) -> int:
    with project_lock(args.project):
        project = require_project(args.project)
        session = project.sessions.get(args.session)
        if session is None:
            raise UnknownId("no such session", session_id=args.session)
        if not session.rounds:
            raise ValidationError("session has no generated rounds", session_id=args.session)
        version = session.rounds[-1].prompt.interest_version
        vectors = [
            project.embeddings[(pid, version)]
            for pid in session.point_ids
            if (pid, version) in project.embeddings
        ]
        threshold = simcore.calibrate_threshold(session.pair_labels, build_index(vectors))
        project.threshold = threshold
        save_project(project, args.project)
    stats = threshold.calibration_stats
    print(
        f"tau={trunc6(threshold.tau):.6f} J={stats['j']:.6f} "
        f"positives={stats['positives']} negatives={stats['negatives']}"
    )
    return 0


def cmd_serve(args) -> int:
    from simloop.service import serve

    cfg = provider_config(args)
    serve(args.project, args.bind, cfg, tag_count=args.tag_count)
    return 0


def cmd_replay_verify(args) -> int:
    project = require_project(args.project)
    prompt = render_prompt(parse_interest(args.interest), args.tag_count)
    cfg = ProviderConfig(kind=ProviderKind.REPLAY, fixture_path=args.fixture)
    cfg.validate()
    provider = make_provider(cfg)
    missing = [
        pid
        for pid, point in project.points.items()
        if not provider.has_key(fixture_key(prompt.text, point.payload))
    ]
    total = len(project.points)
    if missing:
        print(f"fixture covers {total - len(missing)}/{total} points; missing:")
        for pid in missing:
            print(f"  {pid}")
        return 1
    print(f"fixture covers all {total} points for this prompt")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simloop",
        description="Interest-driven summarization, embedding, and similarity review.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load a CSV or image manifest into a project")
    p.add_argument("source_kind", choices=["tabular", "images"])
    p.add_argument("--project", required=True)
    p.add_argument("--path", required=True)
    p.add_argument("--id-column", default="id")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("synth", help="generate a synthetic AML customer CSV")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--clusters", type=int, required=True)
    p.add_argument("--fraction", type=float, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--truth", default=None)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("summarize", help="run a summarize+embed round over the project")
    p.add_argument("--project", required=True)
    p.add_argument("--interest", required=True)
    p.add_argument("--points", default=None, help="comma-separated subset of point ids")
    p.add_argument("--tag-count", type=int, default=3)
    p.add_argument("--session-id", default=None)
    p.add_argument("--no-accept", action="store_true",
                   help="leave the session open for review instead of accepting")
    add_provider_flags(p)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("embed", help="embed stored profiles that lack vectors")
    p.add_argument("--project", required=True)
    add_provider_flags(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("query", help="print the nearest neighbors of a point")
    p.add_argument("--project", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--k", type=int, default=5)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("calibrate", help="fit the similarity threshold from labels")
    p.add_argument("--project", required=True)
    p.add_argument("--session", required=True)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--project", required=True)
    p.add_argument("--bind", default="127.0.0.1:8600")
    p.add_argument("--tag-count", type=int, default=3)
    add_provider_flags(p)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("replay-verify", help="check fixture coverage for a prompt")
    p.add_argument("--project", required=True)
    p.add_argument("--fixture", required=True)
    p.add_argument("--interest", required=True)
    p.add_argument("--tag-count", type=int, default=3)
    p.set_defaults(func=cmd_replay_verify)

    return parser


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        return args.func(args)
    except ProviderFailure as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return 2
    except SimloopError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
