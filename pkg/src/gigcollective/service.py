"""Application service: every user-facing operation over one record store.

All mutations run inside a store transaction and append audit events, so
replaying a subject's trail reconstructs its current payload exactly.
Reads apply the privacy guard before anything leaves the layer.
"""

from __future__ import annotations

import base64
import binascii
import threading
import uuid
from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone
from decimal import Decimal
from typing import Callable, Iterable, Optional, Sequence

from . import analytics, ingestion, serde
from .model import (
    Audience,
    AuditAction,
    AuditEvent,
    Demographics,
    DisplayMode,
    EntrySource,
    ExpenseEntry,
    IncomeEntry,
    Platform,
    Role,
    Story,
    StoryDraft,
    StoryType,
    Tag,
    ValidationFailed,
    WorkerProfile,
    validate_expense_entry,
    validate_income_entry,
    validate_story,
)
from .privacy import (
    ViewerContext,
    VisibleStory,
    audience_allows,
    redact_text,
    scope_story,
)
from .storage import NotFound, Store


class ServiceError(Exception):
    """Operation failure carrying a problem-details shaped payload."""

    def __init__(self, code: str, message: str, *, field: Optional[str] = None, status: int = 400, extra: Optional[dict] = None):
        self.code = code
        self.field = field
        self.status = status
        self.extra = extra or {}
        super().__init__(message)

    @property
    def message(self) -> str:
        return str(self)


class LogicalClock:
    """Wall clock forced strictly monotone, so audit order never ties."""

    def __init__(self, now: Callable[[], datetime] = lambda: datetime.now(timezone.utc)):
        self._now = now
        self._last: Optional[datetime] = None
        self._lock = threading.Lock()

    def __call__(self) -> datetime:
        with self._lock:
            t = self._now()
            if self._last is not None and t <= self._last:
                t = self._last + timedelta(microseconds=1)
            self._last = t
            return t


def uuid_factory() -> str:
    return uuid.uuid4().hex


@dataclass(frozen=True)
class FeedPage:
    items: list[VisibleStory]
    next_cursor: Optional[str]


def encode_cursor(created_at: datetime, story_id: str) -> str:
    raw = f"{created_at.isoformat()}|{story_id}".encode()
    return base64.urlsafe_b64encode(raw).decode()


def decode_cursor(cursor: str) -> tuple[datetime, str]:
    try:
        raw = base64.urlsafe_b64decode(cursor.encode()).decode()
        ts, story_id = raw.split("|", 1)
        return datetime.fromisoformat(ts), story_id
    except (ValueError, binascii.Error) as e:
        raise ServiceError("INVALID_CURSOR", f"cursor is not valid: {e}", field="cursor") from None


class CollectiveService:
    def __init__(
        self,
        store: Store,
        *,
        clock: Optional[Callable[[], datetime]] = None,
        id_factory: Callable[[], str] = uuid_factory,
        k_threshold: int = 5,
    ):
        self.store = store
        self.clock = clock if clock is not None else LogicalClock()
        self.new_id = id_factory
        self.k_threshold = k_threshold

    # -- profiles ------------------------------------------------------------

    def create_profile(
        self,
        username: str,
        role: Role,
        platforms: Iterable[Platform] = (),
        demographics: Demographics = Demographics(),
        rating_snapshot: Optional[Decimal] = None,
        worker_id: Optional[str] = None,
    ) -> WorkerProfile:
        platforms = frozenset(platforms)
        if not username or not username.strip():
            raise ServiceError("USERNAME_TAKEN", "username must not be blank", field="username")
        if role is Role.WORKER and not platforms:
            raise ServiceError("PLATFORM_REQUIRED_FOR_WORKER", "workers need at least one platform", field="platforms")
        if role is not Role.WORKER and platforms:
            raise ServiceError("PLATFORM_NOT_ALLOWED", f"{role.value} accounts carry no platforms", field="platforms")
        if rating_snapshot is not None and not (0 <= rating_snapshot <= 5):
            raise ServiceError("INVALID_RATING", "rating must be within [0, 5]", field="rating_snapshot")
        with self.store.transaction():
            taken = self.store.scan("profile", lambda p: p["username"] == username)
            if taken:
                raise ServiceError("USERNAME_TAKEN", f"username {username!r} is in use", field="username", status=409)
            profile = WorkerProfile(
                worker_id=worker_id or self.new_id(),
                username=username.strip(),
                role=role,
                platforms=platforms,
                demographics=demographics,
                created_at=self.clock(),
                rating_snapshot=rating_snapshot,
            )
            self.store.put("profile", profile.worker_id, serde.profile_to_payload(profile))
        return profile

    def get_profile(self, worker_id: str) -> WorkerProfile:
        try:
            return serde.profile_from_payload(self.store.get("profile", worker_id).payload)
        except NotFound:
            raise ServiceError("NOT_FOUND", f"no profile {worker_id}", status=404) from None

    def viewer(self, worker_id: str) -> ViewerContext:
        profile = self.get_profile(worker_id)
        return ViewerContext(viewer_id=profile.worker_id, role=profile.role, platforms=profile.platforms)

    # -- audit helpers ---------------------------------------------------------

    def _audit(self, actor: str, kind: str, subject_id: str, action: AuditAction, diff: Optional[dict] = None) -> None:
        self.store.append_audit(
            AuditEvent(
                event_id=self.new_id(),
                actor_id=actor,
                subject_kind=kind,
                subject_id=subject_id,
                action=action,
                at=self.clock(),
                diff=diff or {},
            )
        )

    # -- stories ---------------------------------------------------------------

    def _owned_entry_ids(self, worker_id: str) -> set[str]:
        return {r.payload["entry_id"] for r in self.store.scan("income", owner=worker_id)}

    def post_story(self, author_id: str, draft: StoryDraft, *, acknowledge_redaction: bool = False) -> Story:
        author = self.get_profile(author_id)
        if author.role is not Role.WORKER:
            raise ServiceError("ROLE_DENIED", "only workers share stories", status=403)
        story = validate_story(
            draft,
            story_id=self.new_id(),
            created_at=self.clock(),
            owned_entry_ids=self._owned_entry_ids(author_id),
        )
        story = self._apply_redaction(story, acknowledge_redaction)
        if story.media is not None and not self.store.blobs.exists(story.media):
            raise ServiceError("NOT_FOUND", f"media blob {story.media} not found", field="media", status=404)
        with self.store.transaction():
            payload = serde.story_to_payload(story)
            self.store.put("story", story.story_id, payload)
            self._audit(author_id, "story", story.story_id, AuditAction.CREATE, {"after": payload})
        return story

    def _apply_redaction(self, story: Story, acknowledged: bool) -> Story:
        title_r = redact_text(story.title)
        body_r = redact_text(story.body)
        if title_r.clean and body_r.clean:
            return story
        if not acknowledged:
            raise ServiceError(
                "UNACKNOWLEDGED_REDACTION",
                "sensitive content found; confirm the redacted version",
                status=409,
                extra={
                    "preview": {"title": title_r.redacted_text, "body": body_r.redacted_text},
                    "findings": [
                        {"kind": f.kind, "span": list(f.span)}
                        for f in (*title_r.findings, *body_r.findings)
                    ],
                },
            )
        from dataclasses import replace

        return replace(
            story,
            title=title_r.redacted_text,
            body=body_r.redacted_text,
            original_title=story.title if not title_r.clean else None,
            original_body=story.body if not body_r.clean else None,
        )

    def _load_story(self, story_id: str) -> tuple[Story, int]:
        rec = self.store.get("story", story_id)
        return serde.story_from_payload(rec.payload), rec.version

    def get_story_for(self, viewer: ViewerContext, story_id: str) -> VisibleStory:
        try:
            story, _ = self._load_story(story_id)
        except NotFound:
            raise ServiceError("NOT_VISIBLE", "no such story in your feed", status=404) from None
        visible = self._project(story, viewer)
        if visible is None:
            raise ServiceError("NOT_VISIBLE", "no such story in your feed", status=404)
        return visible

    def _project(self, story: Story, viewer: ViewerContext) -> Optional[VisibleStory]:
        author = self.get_profile(story.author_id)
        entries = []
        cities: dict[str, str] = {}
        for entry_id in story.evidence:
            try:
                entry = serde.income_from_payload(self.store.get("income", entry_id).payload)
            except NotFound:
                continue
            entries.append(entry)
            if story.evidence_city_opt_in and entry.city:
                cities[entry.entry_id] = entry.city
        return scope_story(
            story,
            viewer,
            author=author,
            edited=story.edit_count > 0,
            evidence_entries=entries,
            evidence_cities=cities,
        )

    def list_feed(
        self,
        viewer: ViewerContext,
        *,
        story_type: Optional[StoryType] = None,
        platform: Optional[Platform] = None,
        tag: Optional[Tag] = None,
        cursor: Optional[str] = None,
        limit: int = 20,
    ) -> FeedPage:
        """Scoped story feed, newest first; cursor = (created_at, story_id)."""
        after: Optional[tuple[datetime, str]] = decode_cursor(cursor) if cursor else None
        authors: dict[str, WorkerProfile] = {}
        rows: list[Story] = []
        for rec in self.store.scan("story"):
            story = serde.story_from_payload(rec.payload)
            if not audience_allows(story, viewer):
                continue
            if story_type is not None and story.story_type is not story_type:
                continue
            if tag is not None and tag not in story.tags:
                continue
            author = authors.get(story.author_id)
            if author is None:
                author = authors[story.author_id] = self.get_profile(story.author_id)
            if platform is not None and platform not in author.platforms:
                continue
            rows.append(story)
        rows.sort(key=lambda s: (s.created_at, s.story_id), reverse=True)
        if after is not None:
            rows = [s for s in rows if (s.created_at, s.story_id) < after]
        page = rows[:limit]
        items = [self._project(s, viewer) for s in page]
        next_cursor = None
        if len(rows) > limit and page:
            last = page[-1]
            next_cursor = encode_cursor(last.created_at, last.story_id)
        return FeedPage(items=[i for i in items if i is not None], next_cursor=next_cursor)

    def _require_visible(self, viewer: ViewerContext, story_id: str) -> tuple[Story, int]:
        try:
            story, version = self._load_story(story_id)
        except NotFound:
            raise ServiceError("NOT_VISIBLE", "no such story in your feed", status=404) from None
        if not audience_allows(story, viewer):
            raise ServiceError("NOT_VISIBLE", "no such story in your feed", status=404)
        return story, version

    def like_story(self, viewer: ViewerContext, story_id: str) -> int:
        if viewer.role is not Role.WORKER:
            raise ServiceError("ROLE_CANNOT_LIKE", "only workers can like stories", status=403)
        with self.store.transaction():
            story, version = self._require_visible(viewer, story_id)
            if viewer.viewer_id in story.likes:
                return len(story.likes)
            likes = story.likes | {viewer.viewer_id}
            payload = serde.story_to_payload(story)
            payload["likes"] = sorted(likes)
            self.store.put("story", story_id, payload, expected_version=version)
            self._audit(viewer.viewer_id, "story", story_id, AuditAction.LIKE)
            return len(likes)

    def unlike_story(self, viewer: ViewerContext, story_id: str) -> int:
        if viewer.role is not Role.WORKER:
            raise ServiceError("ROLE_CANNOT_LIKE", "only workers can like stories", status=403)
        with self.store.transaction():
            story, version = self._require_visible(viewer, story_id)
            if viewer.viewer_id not in story.likes:
                return len(story.likes)
            likes = story.likes - {viewer.viewer_id}
            payload = serde.story_to_payload(story)
            payload["likes"] = sorted(likes)
            self.store.put("story", story_id, payload, expected_version=version)
            self._audit(viewer.viewer_id, "story", story_id, AuditAction.UNLIKE)
            return len(likes)

    def attach_evidence(self, author_id: str, story_id: str, entry_ids: Sequence[str], *, include_city: bool = False) -> Story:
        with self.store.transaction():
            story, version = self._load_story_owned(author_id, story_id)
            owned = self._owned_entry_ids(author_id)
            missing = [e for e in entry_ids if e not in owned]
            if missing:
                raise ServiceError(
                    "EVIDENCE_NOT_OWNED",
                    f"entries not owned by author: {', '.join(missing)}",
                    field="evidence",
                    status=403,
                )
            evidence = tuple(dict.fromkeys((*story.evidence, *entry_ids)))
            return self._write_story_edit(
                author_id,
                story,
                version,
                {"evidence": list(evidence), "evidence_city_opt_in": include_city},
            )

    def _load_story_owned(self, author_id: str, story_id: str) -> tuple[Story, int]:
        try:
            story, version = self._load_story(story_id)
        except NotFound:
            raise ServiceError("NOT_VISIBLE", "no such story", status=404) from None
        if story.author_id != author_id:
            raise ServiceError("UNAUTHORIZED_ACTOR", "not the story's author", status=403)
        return story, version

    def _write_story_edit(self, actor: str, story: Story, version: int, changes: dict) -> Story:
        """Apply payload-level changes, audit them, and bump edit_count.

        Audience changes go to a share_scope_change event and do not count
        as content edits.
        """
        payload = serde.story_to_payload(story)
        scope_change = {}
        content_change = {}
        for key, value in changes.items():
            if payload.get(key) == value:
                continue
            if key == "audience":
                scope_change[key] = value
            else:
                content_change[key] = value
        if not scope_change and not content_change:
            return story
        before = {k: payload[k] for k in (*scope_change, *content_change)}
        payload.update(scope_change)
        payload.update(content_change)
        if content_change:
            payload["edit_count"] = story.edit_count + 1
        self.store.put("story", story.story_id, payload, expected_version=version)
        if scope_change:
            self._audit(
                actor,
                "story",
                story.story_id,
                AuditAction.SHARE_SCOPE_CHANGE,
                {"before": {k: before[k] for k in scope_change}, "after": scope_change},
            )
        if content_change:
            after = dict(content_change)
            after["edit_count"] = payload["edit_count"]
            self._audit(
                actor,
                "story",
                story.story_id,
                AuditAction.EDIT,
                {"before": {k: before[k] for k in content_change}, "after": after},
            )
        return serde.story_from_payload(payload)

    def update_story(self, author_id: str, story_id: str, changes: dict, *, acknowledge_redaction: bool = False) -> Story:
        """Edit title/body/tags/type/audience/display_mode on an owned story."""
        allowed = {"title", "body", "tags", "story_type", "audience", "display_mode"}
        unknown = set(changes) - allowed
        if unknown:
            raise ServiceError("VALIDATION", f"fields not editable: {sorted(unknown)}", status=400)
        with self.store.transaction():
            story, version = self._load_story_owned(author_id, story_id)
            merged = StoryDraft(
                author_id=author_id,
                story_type=StoryType(changes.get("story_type", story.story_type.value)),
                tags=frozenset(changes.get("tags", [t.value for t in story.tags])),
                title=changes.get("title", story.title),
                body=changes.get("body", story.body),
                display_mode=DisplayMode(changes.get("display_mode", story.display_mode.value)),
                audience=(
                    Audience.from_names(changes["audience"]) if "audience" in changes else story.audience
                ),
                evidence=story.evidence,
            )
            candidate = validate_story(
                merged,
                story_id=story.story_id,
                created_at=story.created_at,
                owned_entry_ids=self._owned_entry_ids(author_id),
            )
            candidate = self._apply_redaction(candidate, acknowledge_redaction)
            payload_changes: dict = {}
            if "title" in changes or candidate.title != story.title:
                payload_changes["title"] = candidate.title
                payload_changes["original_title"] = candidate.original_title
            if "body" in changes or candidate.body != story.body:
                payload_changes["body"] = candidate.body
                payload_changes["original_body"] = candidate.original_body
            if "tags" in changes:
                payload_changes["tags"] = sorted(t.value for t in candidate.tags)
            if "story_type" in changes:
                payload_changes["story_type"] = candidate.story_type.value
            if "display_mode" in changes:
                payload_changes["display_mode"] = candidate.display_mode.value
            if "audience" in changes:
                payload_changes["audience"] = candidate.audience.to_names()
            return self._write_story_edit(author_id, story, version, payload_changes)

    def delete_story(self, author_id: str, story_id: str) -> None:
        with self.store.transaction():
            story, _ = self._load_story_owned(author_id, story_id)
            self.store.delete("story", story_id)
            self._audit(author_id, "story", story_id, AuditAction.DELETE)

    # -- ledger ------------------------------------------------------------------

    def _require_worker_platform(self, worker_id: str, platform: Platform) -> WorkerProfile:
        profile = self.get_profile(worker_id)
        if profile.role is not Role.WORKER:
            raise ServiceError("ROLE_DENIED", "only workers own ledger entries", status=403)
        if platform not in profile.platforms:
            raise ServiceError(
                "FIELD_NOT_ALLOWED_FOR_PLATFORM",
                f"{profile.username} is not on {platform.value}",
                field="platform",
                status=403,
            )
        return profile

    def add_income(self, worker_id: str, platform: Platform, draft: dict) -> IncomeEntry:
        self._require_worker_platform(worker_id, platform)
        entry = validate_income_entry(
            draft,
            platform,
            entry_id=self.new_id(),
            worker_id=worker_id,
            source=EntrySource.MANUAL,
        )
        with self.store.transaction():
            payload = serde.income_to_payload(entry)
            self.store.put("income", entry.entry_id, payload)
            self._audit(worker_id, "income", entry.entry_id, AuditAction.CREATE, {"after": payload})
        return entry

    def _load_owned(self, kind: str, owner_id: str, entry_id: str):
        try:
            rec = self.store.get(kind, entry_id)
        except NotFound:
            raise ServiceError("NOT_FOUND", f"no {kind} entry {entry_id}", status=404) from None
        if rec.payload["worker_id"] != owner_id:
            raise ServiceError("UNAUTHORIZED_ACTOR", f"{kind} entry belongs to another worker", status=403)
        return rec

    def update_income(self, worker_id: str, entry_id: str, changes: dict) -> IncomeEntry:
        with self.store.transaction():
            rec = self._load_owned("income", worker_id, entry_id)
            entry = serde.income_from_payload(rec.payload)
            draft = serde.income_to_payload(entry)
            draft.update(changes)
            updated = validate_income_entry(
                draft,
                entry.platform,
                entry_id=entry.entry_id,
                worker_id=worker_id,
                source=entry.source,
                dedupe_key=entry.dedupe_key,
            )
            payload = serde.income_to_payload(updated)
            delta = {k: payload[k] for k in payload if payload[k] != rec.payload.get(k)}
            if not delta:
                return entry
            self.store.put("income", entry_id, payload, expected_version=rec.version)
            self._audit(
                worker_id,
                "income",
                entry_id,
                AuditAction.EDIT,
                {"before": {k: rec.payload.get(k) for k in delta}, "after": delta},
            )
            return updated

    def delete_income(self, worker_id: str, entry_id: str) -> None:
        """Revoke an entry; evidence references to it disappear atomically."""
        with self.store.transaction():
            self._load_owned("income", worker_id, entry_id)
            self.store.delete("income", entry_id)
            self._audit(worker_id, "income", entry_id, AuditAction.DELETE)
            for rec in self.store.scan("story", lambda p: entry_id in p.get("evidence", [])):
                story = serde.story_from_payload(rec.payload)
                remaining = [e for e in story.evidence if e != entry_id]
                self._write_story_edit(worker_id, story, rec.version, {"evidence": remaining})

    def add_expense(self, worker_id: str, draft: dict) -> ExpenseEntry:
        profile = self.get_profile(worker_id)
        if profile.role is not Role.WORKER:
            raise ServiceError("ROLE_DENIED", "only workers own ledger entries", status=403)
        entry = validate_expense_entry(draft, entry_id=self.new_id(), worker_id=worker_id)
        if entry.photo is not None and not self.store.blobs.exists(entry.photo):
            raise ServiceError("NOT_FOUND", f"photo blob {entry.photo} not found", field="photo", status=404)
        with self.store.transaction():
            payload = serde.expense_to_payload(entry)
            self.store.put("expense", entry.entry_id, payload)
            self._audit(worker_id, "expense", entry.entry_id, AuditAction.CREATE, {"after": payload})
        return entry

    def update_expense(self, worker_id: str, entry_id: str, changes: dict) -> ExpenseEntry:
        with self.store.transaction():
            rec = self._load_owned("expense", worker_id, entry_id)
            draft = dict(rec.payload)
            draft.update(changes)
            updated = validate_expense_entry(draft, entry_id=entry_id, worker_id=worker_id)
            payload = serde.expense_to_payload(updated)
            delta = {k: payload[k] for k in payload if payload[k] != rec.payload.get(k)}
            if not delta:
                return updated
            self.store.put("expense", entry_id, payload, expected_version=rec.version)
            self._audit(
                worker_id,
                "expense",
                entry_id,
                AuditAction.EDIT,
                {"before": {k: rec.payload.get(k) for k in delta}, "after": delta},
            )
            return updated

    def delete_expense(self, worker_id: str, entry_id: str) -> None:
        with self.store.transaction():
            self._load_owned("expense", worker_id, entry_id)
            self.store.delete("expense", entry_id)
            self._audit(worker_id, "expense", entry_id, AuditAction.DELETE)

    # -- bulk import ----------------------------------------------------------------

    def import_entries(self, worker_id: str, entries: Sequence[IncomeEntry]) -> ingestion.ImportReport:
        """Idempotent upsert by dedupe key; all-or-nothing on ownership failure."""
        for entry in entries:
            if entry.worker_id != worker_id:
                raise ingestion.OwnershipMismatch(f"entry {entry.entry_id} belongs to {entry.worker_id}")
        report = ingestion.ImportReport()
        with self.store.transaction():
            existing: dict[str, tuple[dict, int]] = {}
            for rec in self.store.scan("income", owner=worker_id):
                existing[rec.payload["dedupe_key"]] = (rec.payload, rec.version)
            for entry in entries:
                payload = serde.income_to_payload(entry)
                prior = existing.get(entry.dedupe_key)
                if prior is None:
                    self.store.put("income", entry.entry_id, payload)
                    self._audit(worker_id, "income", entry.entry_id, AuditAction.CREATE, {"after": payload})
                    existing[entry.dedupe_key] = (payload, 1)
                    report.accepted += 1
                    continue
                prior_payload, version = prior
                if _content_equal(prior_payload, payload):
                    report.duplicates += 1
                    continue
                # same natural key, changed fields: refresh the stored entry
                refreshed = dict(payload)
                refreshed["entry_id"] = prior_payload["entry_id"]
                delta = {k: refreshed[k] for k in refreshed if refreshed[k] != prior_payload.get(k)}
                self.store.put("income", prior_payload["entry_id"], refreshed, expected_version=version)
                self._audit(
                    worker_id,
                    "income",
                    prior_payload["entry_id"],
                    AuditAction.EDIT,
                    {"before": {k: prior_payload.get(k) for k in delta}, "after": delta},
                )
                existing[entry.dedupe_key] = (refreshed, version + 1)
                report.accepted += 1
        return report

    def import_trips_csv(self, worker_id: str, data: bytes, *, strict: bool = False) -> ingestion.ImportReport:
        """Parse, normalize, and import an uploaded trip CSV in one shot."""
        self._require_worker_platform(worker_id, Platform.UBER)
        trips, report = ingestion.parse_trips_csv(data, strict=strict)
        entries = []
        for line_no, trip in zip(report.accepted_lines, trips):
            try:
                entries.append(ingestion.normalize_trip(trip, worker_id=worker_id, entry_id=self.new_id()))
            except ingestion.ZeroDuration as e:
                report.rejected.append((line_no, f"ZERO_DURATION: {e}"))
        import_report = self.import_entries(worker_id, entries)
        final = ingestion.ImportReport(
            accepted=import_report.accepted,
            duplicates=import_report.duplicates,
            rejected=report.rejected,
            source_digest=report.source_digest,
        )
        return final

    # -- manage data ------------------------------------------------------------------

    def manage_data(self, owner_id: str) -> dict:
        """The owner's full view of their records, pre-redaction text included."""
        profile = self.get_profile(owner_id)
        stories = [serde.story_from_payload(r.payload) for r in self.store.scan("story", owner=owner_id)]
        incomes = [serde.income_from_payload(r.payload) for r in self.store.scan("income", owner=owner_id)]
        expenses = [serde.expense_from_payload(r.payload) for r in self.store.scan("expense", owner=owner_id)]
        stories.sort(key=lambda s: (s.created_at, s.story_id), reverse=True)
        incomes.sort(key=lambda e: (e.work_date, e.entry_id), reverse=True)
        expenses.sort(key=lambda e: (e.expense_date, e.entry_id), reverse=True)
        return {"profile": profile, "stories": stories, "incomes": incomes, "expenses": expenses}

    # -- analytics facade ----------------------------------------------------------------

    def _worker_incomes(self, worker_id: str) -> list[IncomeEntry]:
        return [serde.income_from_payload(r.payload) for r in self.store.scan("income", owner=worker_id)]

    def _worker_expenses(self, worker_id: str) -> list[ExpenseEntry]:
        return [serde.expense_from_payload(r.payload) for r in self.store.scan("expense", owner=worker_id)]

    def personal_trends(self, worker_id: str, range_start: date, range_end: date) -> analytics.TrendsReport:
        try:
            return analytics.personal_trends(
                self._worker_incomes(worker_id), self._worker_expenses(worker_id), range_start, range_end
            )
        except analytics.EmptyRange as e:
            raise ServiceError("EMPTY_RANGE", str(e), field="from") from None

    def record_trends_visit(self, worker_id: str) -> int:
        with self.store.transaction():
            try:
                rec = self.store.get("telemetry", worker_id)
                visits = rec.payload.get("trends_visits", 0) + 1
                self.store.put("telemetry", worker_id, {"trends_visits": visits}, expected_version=rec.version)
            except NotFound:
                visits = 1
                self.store.put("telemetry", worker_id, {"trends_visits": 1})
        return visits

    def collective_insight(self, viewer: ViewerContext, dimension: str, breakdown: str) -> analytics.InsightTable:
        workers = []
        for rec in self.store.scan("profile", lambda p: p["role"] == Role.WORKER.value):
            profile = serde.profile_from_payload(rec.payload)
            workers.append((profile, self._worker_incomes(profile.worker_id)))
        try:
            return analytics.collective_insight(
                workers,
                dimension,
                breakdown,
                k=self.k_threshold,
                viewer_id=viewer.viewer_id if viewer.role is Role.WORKER else None,
            )
        except analytics.UnknownDimension as e:
            raise ServiceError("UNKNOWN_DIMENSION", str(e), field="dimension") from None
        except analytics.UnknownAttribute as e:
            raise ServiceError("UNKNOWN_ATTRIBUTE", str(e), field="breakdown") from None

    def project_earnings(self, worker_id: str, slots: Iterable[tuple[int, int]], *, lookback_weeks: int = 8, today: Optional[date] = None) -> analytics.Projection:
        plan = analytics.PlanInput(slots=frozenset(slots), lookback_weeks=lookback_weeks)
        try:
            return analytics.project_earnings(
                self._worker_incomes(worker_id), plan, today=today or self.clock().date()
            )
        except analytics.EmptyPlan as e:
            raise ServiceError("EMPTY_PLAN", str(e), field="slots") from None

    def dataset(self) -> analytics.SystemDataset:
        profiles = [serde.profile_from_payload(r.payload) for r in self.store.scan("profile")]
        stories = [serde.story_from_payload(r.payload) for r in self.store.scan("story")]
        incomes = [serde.income_from_payload(r.payload) for r in self.store.scan("income")]
        expenses = [serde.expense_from_payload(r.payload) for r in self.store.scan("expense")]
        visits = {r.id: r.payload.get("trends_visits", 0) for r in self.store.scan("telemetry")}
        return analytics.SystemDataset(
            profiles=profiles, stories=stories, incomes=incomes, expenses=expenses, trends_visits=visits
        )

    def store_media(self, data: bytes, media_type: str) -> str:
        blob_id = self.store.blobs.put(data, media_type)
        if not self.store.exists("blob", blob_id):
            self.store.put("blob", blob_id, {"media_type": media_type, "size": len(data)})
        return blob_id


_IDENTITY_FIELDS = {"entry_id"}


def _content_equal(a: dict, b: dict) -> bool:
    return {k: v for k, v in a.items() if k not in _IDENTITY_FIELDS} == {
        k: v for k, v in b.items() if k not in _IDENTITY_FIELDS
    }
