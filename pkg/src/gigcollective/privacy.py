"""Audience scoping, PII redaction, cohort suppression, and the edit trail.

The rules here are the ones every read path must flow through: a story is
visible to its author and to roles its audience flags grant, nothing
else; aggregate cells computed from fewer than k workers are withheld;
audit events are the ground truth for "edited" labels and replay.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .model import (
    AuditAction,
    AuditEvent,
    DisplayMode,
    IncomeEntry,
    Platform,
    Role,
    Story,
    WorkerProfile,
)

ADDRESS_TOKEN = "[ADDRESS]"
PHONE_TOKEN = "[PHONE]"
EMAIL_TOKEN = "[EMAIL]"


@dataclass(frozen=True)
class ViewerContext:
    viewer_id: str
    role: Role
    platforms: frozenset[Platform] = frozenset()


@dataclass(frozen=True)
class EvidenceSummary:
    """Aggregate facts from an attached entry: no location unless opted in."""

    entry_id: str
    work_date: str
    duration_minutes: int
    income_amount: str
    city: Optional[str] = None


@dataclass(frozen=True)
class VisibleStory:
    story_id: str
    display_name: str
    story_type: str
    tags: list[str]
    title: str
    body: str
    audience: list[str]
    created_at: datetime
    platforms: list[str]
    edited: bool
    like_count: int
    liked_by_viewer: bool
    media: Optional[str] = None
    evidence: list[EvidenceSummary] = field(default_factory=list)
    is_own: bool = False


def audience_allows(story: Story, viewer: ViewerContext) -> bool:
    """Pure visibility rule: author always; otherwise the audience flag for the role."""
    if viewer.viewer_id == story.author_id:
        return True
    return story.audience.allows(viewer.role)


def scope_story(
    story: Story,
    viewer: ViewerContext,
    *,
    author: WorkerProfile,
    edited: bool,
    evidence_entries: Sequence[IncomeEntry] = (),
    evidence_cities: Optional[dict[str, str]] = None,
) -> Optional[VisibleStory]:
    """Project a story for a viewer, or None when the audience denies them.

    Anonymous display strips the username; the author id never appears in
    the projection regardless of mode.
    """
    if not audience_allows(story, viewer):
        return None
    anonymous = story.display_mode is DisplayMode.ANONYMOUS
    display_name = "anonymous" if anonymous else author.username
    summaries = []
    for entry in evidence_entries:
        city = None
        if story.evidence_city_opt_in and evidence_cities:
            city = evidence_cities.get(entry.entry_id)
        summaries.append(
            EvidenceSummary(
                entry_id=entry.entry_id,
                work_date=entry.work_date.isoformat(),
                duration_minutes=entry.duration_minutes,
                income_amount=str(entry.income_amount),
                city=city,
            )
        )
    return VisibleStory(
        story_id=story.story_id,
        display_name=display_name,
        story_type=story.story_type.value,
        tags=sorted(t.value for t in story.tags),
        title=story.title,
        body=story.body,
        audience=story.audience.to_names(),
        created_at=story.created_at,
        platforms=sorted(p.value for p in author.platforms),
        edited=edited,
        like_count=len(story.likes),
        liked_by_viewer=viewer.viewer_id in story.likes,
        media=story.media,
        evidence=summaries,
        is_own=viewer.viewer_id == story.author_id,
    )


# -- redaction ----------------------------------------------------------------

_EMAIL_RE = re.compile(r"\b[A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)+\b")

# North-American phone shapes: 412-555-0101, (412) 555-0101, +1 412.555.0101,
# 4125550101. Bare digit runs shorter than 10 are left alone.
_PHONE_RE = re.compile(
    r"(?<![\w.])(?:\+?1[-.\s]?)?(?:\(\d{3}\)[-.\s]?|\d{3}[-.\s])\d{3}[-.\s]?\d{4}(?![\d-])"
    r"|(?<![\w.])\d{10}(?![\d-])"
)

_STREET_WORDS = (
    "St|Street|Ave|Avenue|Blvd|Boulevard|Rd|Road|Dr|Drive|Ln|Lane|Ct|Court|"
    "Pl|Place|Way|Ter|Terrace|Hwy|Highway|Pkwy|Parkway|Cir|Circle"
)
_ADDRESS_RE = re.compile(
    rf"\b\d{{1,5}}\s+(?:[A-Z0-9][A-Za-z0-9']*\.?\s+){{1,3}}(?:{_STREET_WORDS})\.?"
    rf"(?:\s+(?:Apt|Suite|Unit|#)\.?\s*\w+)?\b"
)


@dataclass(frozen=True)
class Finding:
    kind: str  # street_address | phone | email
    span: tuple[int, int]


@dataclass(frozen=True)
class RedactionResult:
    redacted_text: str
    findings: list[Finding]

    @property
    def clean(self) -> bool:
        return not self.findings


def redact_text(text: str) -> RedactionResult:
    """Replace street addresses, phone numbers, and emails with fixed tokens.

    Total function: clean text comes back unchanged. Spans in findings
    refer to the original text. Idempotent, since no token re-matches.
    """
    candidates: list[tuple[int, int, str, str]] = []
    for kind, pattern, token in (
        ("email", _EMAIL_RE, EMAIL_TOKEN),
        ("phone", _PHONE_RE, PHONE_TOKEN),
        ("street_address", _ADDRESS_RE, ADDRESS_TOKEN),
    ):
        for m in pattern.finditer(text):
            candidates.append((m.start(), m.end(), kind, token))
    # earlier start wins; on same start the longer match wins; the kind
    # order above breaks remaining ties (email > phone > address)
    candidates.sort(key=lambda c: (c[0], -(c[1] - c[0])))
    chosen: list[tuple[int, int, str, str]] = []
    cursor = -1
    for start, end, kind, token in candidates:
        if start > cursor:
            chosen.append((start, end, kind, token))
            cursor = end - 1
    pieces: list[str] = []
    findings: list[Finding] = []
    prev = 0
    for start, end, kind, token in chosen:
        pieces.append(text[prev:start])
        pieces.append(token)
        findings.append(Finding(kind=kind, span=(start, end)))
        prev = end
    pieces.append(text[prev:])
    return RedactionResult(redacted_text="".join(pieces), findings=findings)


# -- cohort suppression ---------------------------------------------------------

class InvalidK(ValueError):
    code = "INVALID_K"


@dataclass(frozen=True)
class CohortCell:
    cohort_key: str
    count: int
    aggregate: Fraction


@dataclass(frozen=True)
class ReleasedCell:
    cohort_key: str
    count: int
    value: Decimal
    suppressed: bool = False


@dataclass(frozen=True)
class SuppressedCell:
    cohort_key: str
    suppressed: bool = True
    # no count, no aggregate: the marker is all that leaves the system


def round_cents(value: Fraction | Decimal) -> Decimal:
    if isinstance(value, Fraction):
        value = Decimal(value.numerator) / Decimal(value.denominator)
    return value.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)


def suppress_cohorts(cells: Iterable[CohortCell], k: int) -> list[ReleasedCell | SuppressedCell]:
    """Withhold every cell computed from fewer than k workers.

    Released aggregates are rounded to two decimals; suppressed cells keep
    their key only, so the marker itself leaks neither count nor value.
    """
    if k < 1:
        raise InvalidK(f"k must be >= 1, got {k}")
    out: list[ReleasedCell | SuppressedCell] = []
    for cell in cells:
        if cell.count >= k:
            out.append(ReleasedCell(cohort_key=cell.cohort_key, count=cell.count, value=round_cents(cell.aggregate)))
        else:
            out.append(SuppressedCell(cohort_key=cell.cohort_key))
    return out


# -- edit trail ----------------------------------------------------------------

class UnauthorizedActor(Exception):
    code = "UNAUTHORIZED_ACTOR"


def record_action(store, event: AuditEvent, *, owner_id: Optional[str] = None) -> None:
    """Append an audit event after checking the actor may touch the subject."""
    if owner_id is not None and event.actor_id != owner_id:
        raise UnauthorizedActor(f"{event.actor_id} cannot act on {event.subject_kind}/{event.subject_id}")
    store.append_audit(event)


def edit_history(store, subject_kind: str, subject_id: str) -> list[AuditEvent]:
    return store.audit_for_subject(subject_kind, subject_id)


def is_edited(events: Iterable[AuditEvent]) -> bool:
    return any(e.action is AuditAction.EDIT for e in events)


def replay_history(events: Sequence[AuditEvent]) -> Optional[dict]:
    """Rebuild a record's current payload from its audit trail.

    Returns the payload dict after applying every event in order, or None
    if the trail ends in a delete. Like/unlike events maintain the "likes"
    list; create and edit events carry {"after": {...}} diffs.
    """
    state: Optional[dict] = None
    for event in events:
        if event.action is AuditAction.CREATE:
            state = dict(event.diff.get("after", {}))
        elif event.action in (AuditAction.EDIT, AuditAction.SHARE_SCOPE_CHANGE):
            if state is not None:
                state.update(event.diff.get("after", {}))
        elif event.action is AuditAction.LIKE:
            if state is not None:
                likes = set(state.get("likes", []))
                likes.add(event.actor_id)
                state["likes"] = sorted(likes)
        elif event.action is AuditAction.UNLIKE:
            if state is not None:
                likes = set(state.get("likes", []))
                likes.discard(event.actor_id)
                state["likes"] = sorted(likes)
        elif event.action is AuditAction.DELETE:
            state = None
    return state
