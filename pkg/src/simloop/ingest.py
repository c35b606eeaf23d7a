"""Loading tabular/image data into uniform data points, plus a deterministic
synthetic AML customer generator for desk-scale experiments.

Payload rendering is the bridge from structured data to text: every record
becomes ``"name=value; name=value; ..."`` in a fixed order, so downstream
summarization sees one canonical string per point and fixtures stay stable.
No type inference happens here; values stay strings and interpretation is
the summarizer's job.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable

from simloop.errors import (
    DuplicateId,
    EmptyFile,
    InvalidSpec,
    MalformedManifest,
    MalformedRow,
    MissingField,
    MissingIdColumn,
)
from simloop.rng import SplitMix64


class Modality(str, Enum):
    TABULAR = "tabular"
    IMAGE = "image"


@dataclass(frozen=True)
class SourceRef:
    origin: str
    index: int


@dataclass(frozen=True)
class DataPoint:
    id: str
    modality: Modality
    payload: str
    source_ref: SourceRef


@dataclass(frozen=True)
class TabularSchema:
    columns: tuple[str, ...]
    id_column: str


def render_pairs(pairs: Iterable[tuple[str, str]]) -> str:
    return "; ".join(f"{name}={value}" for name, value in pairs)


def ingest_tabular(path: str | Path, id_column: str) -> tuple[list[DataPoint], TabularSchema]:
    """Read an RFC 4180 CSV (header mandatory) into one DataPoint per row.

    Row order is preserved; payloads render every column in header order.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyFile("no header row", path=str(path)) from None
        if len(set(header)) != len(header):
            raise MalformedRow("duplicate column names in header", line=1)
        if id_column not in header:
            raise MissingIdColumn(
                "id column not in header", id_column=id_column, columns=header
            )
        id_pos = header.index(id_column)

        points: list[DataPoint] = []
        seen: set[str] = set()
        for i, row in enumerate(reader):
            line = reader.line_num
            if len(row) != len(header):
                raise MalformedRow(
                    "field count differs from header",
                    line=line,
                    got=len(row),
                    want=len(header),
                )
            point_id = row[id_pos]
            if not point_id:
                raise MalformedRow("empty id value", line=line)
            if point_id in seen:
                raise DuplicateId("id seen earlier in file", id=point_id, row=line)
            seen.add(point_id)
            points.append(
                DataPoint(
                    id=point_id,
                    modality=Modality.TABULAR,
                    payload=render_pairs(zip(header, row)),
                    source_ref=SourceRef(origin=str(path), index=i),
                )
            )
    return points, TabularSchema(columns=tuple(header), id_column=id_column)


def ingest_image_manifest(path: str | Path) -> list[DataPoint]:
    """Read a JSON manifest (array of {id, path, metadata?}) into DataPoints.

    Image bytes are never touched; the payload is ``path=<path>`` followed by
    the metadata pairs in sorted key order.
    """
    path = Path(path)
    try:
        entries = json.loads(path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedManifest(f"not valid JSON: {exc}", path=str(path)) from exc
    if not isinstance(entries, list):
        raise MalformedManifest("top level must be an array", path=str(path))

    points: list[DataPoint] = []
    seen: set[str] = set()
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise MalformedManifest("entry is not an object", entry=i)
        for required in ("id", "path"):
            if required not in entry or not entry[required]:
                raise MissingField("entry lacks required field", entry=i, field=required)
        entry_id = str(entry["id"])
        if entry_id in seen:
            raise DuplicateId("id seen earlier in manifest", id=entry_id, entry=i)
        seen.add(entry_id)
        metadata = entry.get("metadata") or {}
        if not isinstance(metadata, dict):
            raise MalformedManifest("metadata must be an object", entry=i)
        pairs = [("path", str(entry["path"]))]
        for key in sorted(metadata):
            value = metadata[key]
            if not isinstance(value, (str, int, float)):
                raise MalformedManifest(
                    "metadata values must be strings or numbers", entry=i, key=key
                )
            pairs.append((key, str(value)))
        points.append(
            DataPoint(
                id=entry_id,
                modality=Modality.IMAGE,
                payload=render_pairs(pairs),
                source_ref=SourceRef(origin=str(path), index=i),
            )
        )
    return points


# --- synthetic AML customers -------------------------------------------------

SYNTH_HEADER = (
    "id",
    "txn_count",
    "avg_amount",
    "currency_count",
    "cross_border_ratio",
    "payment_formats",
    "country_count",
)

# 16 single-word payment formats, sorted; cluster k is characterised by the
# triple (FORMATS[3k % 16], FORMATS[3k+1 % 16], FORMATS[3k+2 % 16]),
# disjoint for up to 5 clusters, repeating beyond that.
PAYMENT_FORMATS = (
    "ach",
    "card",
    "cash",
    "cheque",
    "crypto",
    "draft",
    "giro",
    "hawala",
    "interac",
    "prepaid",
    "remittance",
    "sepa",
    "swift",
    "voucher",
    "wire",
    "zelle",
)

# probability (percent) that a customer's recent formats also repeat one
# off-cluster format, so profiles within a cluster are similar, not identical
PROMOTE_PCT = 15


@dataclass(frozen=True)
class SynthSpec:
    seed: int
    n_customers: int
    n_clusters: int
    launder_fraction: float

    def validate(self) -> None:
        if self.seed < 0:
            raise InvalidSpec("seed must be a non-negative integer", seed=self.seed)
        if self.n_customers < 1:
            raise InvalidSpec("n_customers must be positive", n_customers=self.n_customers)
        if self.n_clusters < 1:
            raise InvalidSpec("n_clusters must be positive", n_clusters=self.n_clusters)
        if self.n_clusters > self.n_customers:
            raise InvalidSpec(
                "more clusters than customers",
                n_clusters=self.n_clusters,
                n_customers=self.n_customers,
            )
        if not 0.0 <= self.launder_fraction <= 1.0:
            raise InvalidSpec(
                "launder_fraction outside [0, 1]", launder_fraction=self.launder_fraction
            )


@dataclass(frozen=True)
class GroundTruth:
    point_id: str
    cluster: int
    laundering: bool


def cluster_format_triple(cluster: int) -> tuple[str, str, str]:
    n = len(PAYMENT_FORMATS)
    return (
        PAYMENT_FORMATS[(3 * cluster) % n],
        PAYMENT_FORMATS[(3 * cluster + 1) % n],
        PAYMENT_FORMATS[(3 * cluster + 2) % n],
    )


def synth_records(spec: SynthSpec) -> tuple[list[list[str]], list[GroundTruth]]:
    """Generate customer rows (strings, SYNTH_HEADER order) plus ground truth.

    A pure function of the spec: all draws go through SplitMix64(seed) in a
    pinned order (flag shuffle first, then per customer: txn, amount cents,
    currency, cross-border pct, country, noise count, noise picks, promote
    roll, promote pick, format shuffle). All numeric fields are integer math
    rendered with fixed widths, so output is byte-identical everywhere.

    The laundering flag only moves the three risk numerics (txn_count,
    currency_count, cross_border_ratio) into high bands; it never shows in
    the payload. Cluster membership shows as each customer's payment-format
    multiset repeating the cluster's three characteristic formats four times
    each: frequent enough that a frequency-ranked summary is dominated by
    them, while numeric values (frequency <= 2 per token) never are.
    """
    spec.validate()
    rng = SplitMix64(spec.seed)
    n = spec.n_customers

    order = list(range(n))
    rng.shuffle(order)
    n_flagged = int(spec.launder_fraction * n + 0.5)
    flagged = set(order[:n_flagged])

    used = {w for k in range(spec.n_clusters) for w in cluster_format_triple(k)}
    leftovers = [f for f in PAYMENT_FORMATS if f not in used]

    width = max(4, len(str(n)))
    rows: list[list[str]] = []
    truth: list[GroundTruth] = []
    for i in range(n):
        cluster = i % spec.n_clusters
        triple = cluster_format_triple(cluster)
        is_flagged = i in flagged

        if is_flagged:
            txn = rng.randint(400, 499)
        else:
            txn = rng.randint(100 + 25 * (cluster % 8), 109 + 25 * (cluster % 8))
        cents = rng.randint(10_000 + 40_000 * (cluster % 8), 14_999 + 40_000 * (cluster % 8))
        currency = rng.randint(6, 9) if is_flagged else rng.randint(1, 3)
        pct = rng.randint(70, 95) if is_flagged else rng.randint(0, 25)
        country = rng.randint(1, 5)

        events = [w for w in triple for _ in range(4)]
        noise_pool = list(leftovers) if leftovers else [f for f in PAYMENT_FORMATS if f not in triple]
        for _ in range(rng.randint(0, 2)):
            if noise_pool:
                events.append(noise_pool.pop(rng.randint(0, len(noise_pool) - 1)))
        if rng.randint(0, 99) < PROMOTE_PCT and noise_pool:
            promoted = noise_pool.pop(rng.randint(0, len(noise_pool) - 1))
            events.extend([promoted] * 4)
        rng.shuffle(events)

        point_id = f"c{i:0{width}d}"
        rows.append(
            [
                point_id,
                str(txn),
                f"{cents // 100}.{cents % 100:02d}",
                str(currency),
                f"0.{pct:02d}",
                ",".join(events),
                str(country),
            ]
        )
        truth.append(GroundTruth(point_id=point_id, cluster=cluster, laundering=is_flagged))
    return rows, truth


def synth_aml(spec: SynthSpec) -> tuple[list[DataPoint], list[GroundTruth]]:
    """Deterministic synthetic customers as DataPoints + cluster ground truth."""
    rows, truth = synth_records(spec)
    origin = f"synth(seed={spec.seed})"
    points = [
        DataPoint(
            id=row[0],
            modality=Modality.TABULAR,
            payload=render_pairs(zip(SYNTH_HEADER, row)),
            source_ref=SourceRef(origin=origin, index=i),
        )
        for i, row in enumerate(rows)
    ]
    return points, truth


def write_synth_csv(spec: SynthSpec, out_csv: str | Path, out_truth: str | Path) -> int:
    """Write generator output as CSV plus a ground-truth CSV; returns row count."""
    rows, truth = synth_records(spec)
    with Path(out_csv).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SYNTH_HEADER)
        writer.writerows(rows)
    with Path(out_truth).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(("id", "cluster", "is_laundering"))
        for t in truth:
            writer.writerow((t.point_id, str(t.cluster), "1" if t.laundering else "0"))
    return len(rows)
