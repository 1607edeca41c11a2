"""Operator-side workflows: evidence exports and the admin reports.

Export bundles are offline artifacts for an audience (policymakers,
advocates, or the worker community). A story enters a bundle only when
its audience grants the requested role *and* the worker community: the
collective's export carries what the collective itself can see, so a post
addressed solely to one outside group stays in the live feed and out of
bundles. Redaction is mandatory on everything exported, no ledger rows
ever leave, and every insight table passes cohort suppression.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from . import analytics
from .model import Story
from .privacy import ReleasedCell, SuppressedCell, redact_text
from .service import CollectiveService, ServiceError

EXPORT_SCHEMA_VERSION = 1

EXPORT_AUDIENCES = ("workers", "policymakers", "advocates")


def story_in_export(story: Story, audience: str) -> bool:
    flags = {
        "workers": story.audience.workers,
        "policymakers": story.audience.policymakers,
        "advocates": story.audience.advocates,
    }
    if audience not in flags:
        raise ServiceError("UNKNOWN_AUDIENCE", f"audience must be one of {EXPORT_AUDIENCES}", field="audience")
    return flags[audience] and story.audience.workers


@dataclass(frozen=True)
class ExportSummary:
    out_dir: Path
    stories: int
    insight_tables: int
    released_cells: int
    empty: bool


def _export_story_line(story: Story, author_platforms: list[str], display_name: str) -> dict:
    title = redact_text(story.title).redacted_text
    body = redact_text(story.body).redacted_text
    return {
        "story_id": story.story_id,
        "display_name": display_name,
        "platforms": author_platforms,
        "story_type": story.story_type.value,
        "tags": sorted(t.value for t in story.tags),
        "title": title,
        "body": body,
        "audience": story.audience.to_names(),
        "created_at": story.created_at.isoformat(),
        "like_count": len(story.likes),
        "edited": story.edit_count > 0,
    }


def _cell_line(cell) -> dict:
    if isinstance(cell, SuppressedCell):
        return {"cohort_key": cell.cohort_key, "suppressed": True}
    assert isinstance(cell, ReleasedCell)
    return {"cohort_key": cell.cohort_key, "count": cell.count, "value": str(cell.value)}


def export_bundle(service: CollectiveService, audience: str, out_dir: str | Path) -> ExportSummary:
    """Write stories.ndjson, insights.ndjson, and manifest.json for one audience.

    Output is byte-deterministic for a given store state: stable ordering,
    sorted keys, and no wall-clock fields in the manifest.
    """
    dataset = service.dataset()
    profiles = {p.worker_id: p for p in dataset.profiles}

    story_lines = []
    for story in sorted(dataset.stories, key=lambda s: s.story_id):
        if not story_in_export(story, audience):
            continue
        author = profiles[story.author_id]
        display = "anonymous" if story.display_mode.value == "anonymous" else author.username
        story_lines.append(
            _export_story_line(story, sorted(p.value for p in author.platforms), display)
        )

    workers = [
        (p, [e for e in dataset.incomes if e.worker_id == p.worker_id])
        for p in dataset.workers()
    ]
    insight_lines = []
    released_cells = 0
    for dimension in analytics.DIMENSIONS:
        for attribute in analytics.BREAKDOWN_ATTRIBUTES:
            table = analytics.collective_insight(workers, dimension, attribute, k=service.k_threshold)
            cells = [_cell_line(c) for c in table.cells]
            released_cells += sum(1 for c in cells if not c.get("suppressed"))
            insight_lines.append(
                {
                    "dimension": dimension,
                    "breakdown_attribute": attribute,
                    "k": table.k,
                    "cells": cells,
                }
            )

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    digests = {}
    for name, lines in (("stories.ndjson", story_lines), ("insights.ndjson", insight_lines)):
        digest = hashlib.sha256()
        with (out / name).open("w", encoding="utf-8") as f:
            for line in lines:
                raw = json.dumps(line, sort_keys=True, separators=(",", ":")) + "\n"
                f.write(raw)
                digest.update(raw.encode())
        digests[name] = "sha256:" + digest.hexdigest()

    manifest = {
        "schema_version": EXPORT_SCHEMA_VERSION,
        "audience": audience,
        "k": service.k_threshold,
        "counts": {"stories": len(story_lines), "insight_tables": len(insight_lines)},
        "digests": digests,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8")

    return ExportSummary(
        out_dir=out,
        stories=len(story_lines),
        insight_tables=len(insight_lines),
        released_cells=released_cells,
        empty=not story_lines and released_cells == 0,
    )


USAGE_COLUMN_TITLES = {
    "shared_stories": "# Shared Stories",
    "story_words": "# Total Words in Stories",
    "liked_stories": "# Liked Stories",
    "income_uploads": "# Income Uploads",
    "expense_uploads": "# Expense Uploads",
    "trends_visits": "# Trends Visits",
}


def usage_report_text(dataset: analytics.SystemDataset) -> str:
    stats = analytics.usage_report(dataset)
    table = analytics.render_descriptive_table(stats)
    widths = {c: max(len(USAGE_COLUMN_TITLES[c]), 8) for c in analytics.UsageStats.COLUMNS}
    header = "         " + "  ".join(USAGE_COLUMN_TITLES[c].rjust(widths[c]) for c in analytics.UsageStats.COLUMNS)
    lines = [header]
    for row in ("Average", "Median", "Max", "Total"):
        cells = "  ".join(table[row][c].rjust(widths[c]) for c in analytics.UsageStats.COLUMNS)
        lines.append(f"{row:<9}" + cells)
    lines.append(f"(over {stats.population} contributing workers)")
    return "\n".join(lines)


def story_statistics_text(dataset: analytics.SystemDataset) -> str:
    stats = analytics.story_statistics(dataset)
    platforms = ("uber", "rover", "upwork")
    lines = ["Story statistics by author platform (uber / rover / upwork):"]

    def row(label: str, values: dict[str, int]) -> str:
        cells = " / ".join(str(values.get(p, 0)) for p in platforms)
        return f"  {label:<38} {cells}   total {sum(values.get(p, 0) for p in platforms)}"

    lines.append(row("authored", stats.authored))
    means = " / ".join(stats.mean_stories_per_user[p] for p in platforms)
    lines.append(f"  {'mean stories per contributing user':<38} {means}")
    lines.append("Likes given, by liker platform:")
    for liker in platforms:
        lines.append(row(f"from {liker}", stats.likes_matrix[liker]))
    lines.append("Audience:")
    for category in ("workers_only", "policymakers_only", "workers+policymakers", "all", "private"):
        if category in stats.share_to:
            lines.append(row(f"shared to {category}", stats.share_to[category]))
    lines.append("Story type:")
    for story_type in ("strategy", "issue"):
        lines.append(row(story_type, stats.story_types[story_type]))
    tag_counts = analytics.tag_totals(dataset.stories)
    lines.append("Tag usage: " + ", ".join(f"{t}={n}" for t, n in tag_counts.items()))
    return "\n".join(lines)
