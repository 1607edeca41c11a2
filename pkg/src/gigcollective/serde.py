"""Record (de)serialization between domain objects and JSON payloads.

Currency values serialize as strings ("16.50"), dates and timestamps as
ISO-8601. The same payload shapes appear in storage, the HTTP API, and
NDJSON exports, so changes here are wire-format changes.
"""

from __future__ import annotations

from datetime import date, datetime, time
from decimal import Decimal
from typing import Optional

from .model import (
    Audience,
    AuditAction,
    AuditEvent,
    Demographics,
    DisplayMode,
    EntrySource,
    ExpenseEntry,
    ExpenseType,
    ExperienceLevel,
    IncomeEntry,
    Platform,
    Role,
    Story,
    StoryType,
    Tag,
    WorkerProfile,
)


def _opt(value, fn=str) -> Optional[str]:
    return fn(value) if value is not None else None


def profile_to_payload(p: WorkerProfile) -> dict:
    demo = {
        name: getattr(p.demographics, name).value
        for name in (
            "age_band",
            "gender",
            "ethnicity",
            "tenure_band",
            "education",
            "household_income_band",
            "work_status",
        )
        if getattr(p.demographics, name) is not None
    }
    return {
        "worker_id": p.worker_id,
        "username": p.username,
        "role": p.role.value,
        "platforms": sorted(pl.value for pl in p.platforms),
        "demographics": demo,
        "created_at": _opt(p.created_at, datetime.isoformat),
        "rating_snapshot": _opt(p.rating_snapshot),
    }


def profile_from_payload(d: dict) -> WorkerProfile:
    from .model import AgeBand, Education, Ethnicity, Gender, IncomeBand, TenureBand, WorkStatus

    enums = {
        "age_band": AgeBand,
        "gender": Gender,
        "ethnicity": Ethnicity,
        "tenure_band": TenureBand,
        "education": Education,
        "household_income_band": IncomeBand,
        "work_status": WorkStatus,
    }
    demo_raw = d.get("demographics", {})
    demo = Demographics(**{k: enums[k](v) for k, v in demo_raw.items()})
    return WorkerProfile(
        worker_id=d["worker_id"],
        username=d["username"],
        role=Role(d["role"]),
        platforms=frozenset(Platform(v) for v in d.get("platforms", [])),
        demographics=demo,
        created_at=datetime.fromisoformat(d["created_at"]) if d.get("created_at") else None,
        rating_snapshot=Decimal(d["rating_snapshot"]) if d.get("rating_snapshot") else None,
    )


def story_to_payload(s: Story) -> dict:
    return {
        "story_id": s.story_id,
        "author_id": s.author_id,
        "display_mode": s.display_mode.value,
        "story_type": s.story_type.value,
        "tags": sorted(t.value for t in s.tags),
        "title": s.title,
        "body": s.body,
        "audience": s.audience.to_names(),
        "created_at": s.created_at.isoformat(),
        "media": s.media,
        "evidence": list(s.evidence),
        "evidence_city_opt_in": s.evidence_city_opt_in,
        "edit_count": s.edit_count,
        "likes": sorted(s.likes),
        "original_title": s.original_title,
        "original_body": s.original_body,
    }


def story_from_payload(d: dict) -> Story:
    return Story(
        story_id=d["story_id"],
        author_id=d["author_id"],
        display_mode=DisplayMode(d["display_mode"]),
        story_type=StoryType(d["story_type"]),
        tags=frozenset(Tag(t) for t in d["tags"]),
        title=d.get("title") or "",
        body=d.get("body") or "",
        audience=Audience.from_names(d.get("audience", [])),
        created_at=datetime.fromisoformat(d["created_at"]),
        media=d.get("media"),
        evidence=tuple(d.get("evidence", [])),
        evidence_city_opt_in=bool(d.get("evidence_city_opt_in", False)),
        edit_count=int(d.get("edit_count", 0)),
        likes=frozenset(d.get("likes", [])),
        original_title=d.get("original_title"),
        original_body=d.get("original_body"),
    )


def income_to_payload(e: IncomeEntry) -> dict:
    return {
        "entry_id": e.entry_id,
        "worker_id": e.worker_id,
        "platform": e.platform.value,
        "work_date": e.work_date.isoformat(),
        "duration_minutes": e.duration_minutes,
        "work_type": e.work_type,
        "income_amount": str(e.income_amount),
        "tips": _opt(e.tips),
        "platform_fee": _opt(e.platform_fee),
        "surge_amount": _opt(e.surge_amount),
        "distance_miles": _opt(e.distance_miles),
        "travel_minutes": e.travel_minutes,
        "experience_level": e.experience_level.value if e.experience_level else None,
        "unpaid_minutes": e.unpaid_minutes,
        "start_time": _opt(e.start_time, time.isoformat),
        "city": e.city,
        "notes": e.notes,
        "source": e.source.value,
        "dedupe_key": e.dedupe_key,
    }


def income_from_payload(d: dict) -> IncomeEntry:
    return IncomeEntry(
        entry_id=d["entry_id"],
        worker_id=d["worker_id"],
        platform=Platform(d["platform"]),
        work_date=date.fromisoformat(d["work_date"]),
        duration_minutes=int(d["duration_minutes"]),
        work_type=d["work_type"],
        income_amount=Decimal(d["income_amount"]),
        tips=Decimal(d["tips"]) if d.get("tips") is not None else None,
        platform_fee=Decimal(d["platform_fee"]) if d.get("platform_fee") is not None else None,
        surge_amount=Decimal(d["surge_amount"]) if d.get("surge_amount") is not None else None,
        distance_miles=Decimal(d["distance_miles"]) if d.get("distance_miles") is not None else None,
        travel_minutes=d.get("travel_minutes"),
        experience_level=ExperienceLevel(d["experience_level"]) if d.get("experience_level") else None,
        unpaid_minutes=d.get("unpaid_minutes"),
        start_time=time.fromisoformat(d["start_time"]) if d.get("start_time") else None,
        city=d.get("city"),
        notes=d.get("notes"),
        source=EntrySource(d["source"]),
        dedupe_key=d["dedupe_key"],
    )


def expense_to_payload(e: ExpenseEntry) -> dict:
    return {
        "entry_id": e.entry_id,
        "worker_id": e.worker_id,
        "expense_date": e.expense_date.isoformat(),
        "amount": str(e.amount),
        "platform": e.platform.value if e.platform else None,
        "expense_type": e.expense_type.value if e.expense_type else None,
        "description": e.description,
        "photo": e.photo,
        "recurring": e.recurring,
    }


def expense_from_payload(d: dict) -> ExpenseEntry:
    return ExpenseEntry(
        entry_id=d["entry_id"],
        worker_id=d["worker_id"],
        expense_date=date.fromisoformat(d["expense_date"]),
        amount=Decimal(d["amount"]),
        platform=Platform(d["platform"]) if d.get("platform") else None,
        expense_type=ExpenseType(d["expense_type"]) if d.get("expense_type") else None,
        description=d.get("description"),
        photo=d.get("photo"),
        recurring=bool(d.get("recurring", False)),
    )


def audit_to_payload(e: AuditEvent) -> dict:
    return {
        "event_id": e.event_id,
        "actor_id": e.actor_id,
        "subject_kind": e.subject_kind,
        "subject_id": e.subject_id,
        "action": e.action.value,
        "at": e.at.isoformat(),
        "diff": e.diff,
    }


def audit_from_payload(d: dict) -> AuditEvent:
    return AuditEvent(
        event_id=d["event_id"],
        actor_id=d["actor_id"],
        subject_kind=d["subject_kind"],
        subject_id=d["subject_id"],
        action=AuditAction(d["action"]),
        at=datetime.fromisoformat(d["at"]),
        diff=d.get("diff", {}),
    )
