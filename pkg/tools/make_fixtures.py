#!/usr/bin/env python3
"""Regenerates the replay fixtures shipped under src/simloop/fixtures/.

The tag values written here are the reference tagging runs the shipped
fixtures must replay bit-exactly (including the deliberately preserved
bedroom misclassification in the floor-color run); the embedding values
are the deterministic 3-gram hash of each profile at dim 256. Rerun after
changing prompt rendering or payload canonicalization, then re-run the
test suite.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

from simloop.ingest import ingest_image_manifest, ingest_tabular
from simloop.prompting import parse_interest, render_prompt
from simloop.providers import embedding_text, fixture_key, stub_embed
from simloop.providers.base import Profile

FIXTURES = Path(__file__).resolve().parent.parent / "src" / "simloop" / "fixtures"

BATHROOM_MANIFEST = [
    {"id": "bath1", "path": "scenes/bathroom/0001.jpg", "metadata": {"scene": "bathroom"}},
    {"id": "bath2", "path": "scenes/bathroom/0002.jpg", "metadata": {"scene": "bathroom"}},
    {"id": "bath3", "path": "scenes/bathroom/0003.jpg", "metadata": {"scene": "bathroom"}},
    {"id": "bath4", "path": "scenes/bathroom/0004.jpg", "metadata": {"scene": "bathroom"}},
]

ROOM_FUNCTION_INTEREST = "the functionality of the room"
ROOM_AND_FLOOR_INTEREST = "the functionality of the room and the floor color"
AML_INTEREST = (
    "transaction frequency, amount patterns, beneficiary details, and geographical markers"
)

ROOM_FUNCTION_TAGS = {
    "bath1": ["Bathroom", "ModernDesign", "SanitaryWare"],
    "bath2": ["shower", "bathroom", "modern-design"],
    "bath3": ["bathroom", "modern_faucet", "LED_lighting"],
    "bath4": ["Bathroom", "Sink", "Toilet"],
}

ROOM_FLOOR_TAGS = {
    "bath1": ["bathroom", "beige_floor", "modern"],
    "bath2": ["Bathroom", "Beige Floor", "Elegant Design"],
    "bath3": ["Bathroom", "Beige Floor", "Compact"],
    "bath4": ["bedroom", "modern design", "beige floor"],  # misclassified row, kept verbatim
}

AML_RISK_TAGS = [
    "High frequency cross-border transactions",
    "Large amounts in different currencies",
    "Inconsistent payment formats",
]

AML_CUSTOMERS = [
    # id, txn_count, avg_amount, currency_count, cross_border_ratio, payment_formats, country_count, assessment
    ("cust_a", "512", "18750.00", "7", "0.92", "wire,crypto,cash,wire,hawala", "11", "YES"),
    ("cust_b", "448", "22310.40", "6", "0.88", "swift,crypto,wire,draft", "9", "YES"),
    ("cust_c", "390", "15980.75", "6", "0.85", "wire,cash,crypto,giro", "8", "NO"),
]


def record_for(point, prompt, tags, free_text=""):
    profile = Profile(
        point_id=point.id,
        tags=tuple(tags),
        free_text=free_text,
        prompt_version=prompt.interest_version,
        provider_id="reference",
    )
    return {
        "key": fixture_key(prompt.text, point.payload),
        "tags": list(tags),
        "free_text": free_text,
        "values": stub_embed(embedding_text(profile), 256),
    }


def write_jsonl(path: Path, records):
    path.write_text("".join(json.dumps(r) + "\n" for r in records))
    print(f"wrote {path.name}: {len(records)} records")


def main() -> None:
    FIXTURES.mkdir(exist_ok=True)

    manifest_path = FIXTURES / "bathroom_scenes.json"
    manifest_path.write_text(json.dumps(BATHROOM_MANIFEST, indent=2) + "\n")
    points = ingest_image_manifest(manifest_path)

    function_prompt = render_prompt(parse_interest(ROOM_FUNCTION_INTEREST), 3)
    write_jsonl(
        FIXTURES / "room_function.jsonl",
        [record_for(p, function_prompt, ROOM_FUNCTION_TAGS[p.id]) for p in points],
    )

    floor_prompt = render_prompt(parse_interest(ROOM_AND_FLOOR_INTEREST), 3)
    write_jsonl(
        FIXTURES / "room_floor_color.jsonl",
        [record_for(p, floor_prompt, ROOM_FLOOR_TAGS[p.id]) for p in points],
    )

    customers_path = FIXTURES / "aml_customers.csv"
    with customers_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ("id", "txn_count", "avg_amount", "currency_count",
             "cross_border_ratio", "payment_formats", "country_count")
        )
        for row in AML_CUSTOMERS:
            writer.writerow(row[:-1])
    aml_points, _ = ingest_tabular(customers_path, "id")

    risk_prompt = render_prompt(parse_interest(AML_INTEREST), 3)
    assessments = {row[0]: row[-1] for row in AML_CUSTOMERS}
    write_jsonl(
        FIXTURES / "aml_risk.jsonl",
        [
            record_for(
                p, risk_prompt, AML_RISK_TAGS,
                free_text=f"Is Money Laundering: {assessments[p.id]}",
            )
            for p in aml_points
        ],
    )
    print(f"room function prompt: {function_prompt.text!r}")
    print(f"floor color prompt:   {floor_prompt.text!r}")
    print(f"aml risk prompt:      {risk_prompt.text!r}")


if __name__ == "__main__":
    main()
