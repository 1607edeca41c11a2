"""HTTP boundary: /v1 endpoints, sessions, role authorization, rate limits.

Endpoint behavior is service operation plus scoping; the permission
matrix below is the single source of truth the authorization check and
the tests both read. Errors render as problem-details documents:
{"code", "message", "field"?} with extra context fields when an
operation provides them (e.g. redaction previews).
"""

from __future__ import annotations

import base64
import collections
import threading
import time as time_mod
from datetime import date, datetime, timezone
from typing import Optional

from fastapi import Depends, FastAPI, Header, Query, Request, Response
from fastapi.responses import JSONResponse

from . import admin, analytics, taxes
from .auth import SessionManager, create_invite, redeem_invite
from .ingestion import CsvFormatError, OwnershipMismatch
from .model import (
    Demographics,
    DisplayMode,
    Platform,
    Role,
    StoryDraft,
    StoryType,
    Tag,
    ValidationFailed,
)
from .privacy import ViewerContext, VisibleStory
from .serde import expense_to_payload, income_to_payload, story_to_payload
from .service import CollectiveService, ServiceError
from .storage import NotFound, Store, VersionConflict

WRITE_LIMIT_PER_MINUTE = 60

# endpoint id -> roles allowed (admin bootstrap token acts as Role.ADMIN)
PERMISSION_MATRIX: dict[str, frozenset[Role]] = {
    "stories.list": frozenset({Role.WORKER, Role.POLICYMAKER, Role.ADVOCATE}),
    "stories.get": frozenset({Role.WORKER, Role.POLICYMAKER, Role.ADVOCATE}),
    "stories.post": frozenset({Role.WORKER}),
    "stories.patch": frozenset({Role.WORKER}),
    "stories.delete": frozenset({Role.WORKER}),
    "stories.like": frozenset({Role.WORKER}),
    "stories.unlike": frozenset({Role.WORKER}),
    "stories.evidence": frozenset({Role.WORKER}),
    "income.list": frozenset({Role.WORKER}),
    "income.post": frozenset({Role.WORKER}),
    "income.csv": frozenset({Role.WORKER}),
    "income.patch": frozenset({Role.WORKER}),
    "income.delete": frozenset({Role.WORKER}),
    "expenses.list": frozenset({Role.WORKER}),
    "expenses.post": frozenset({Role.WORKER}),
    "expenses.patch": frozenset({Role.WORKER}),
    "expenses.delete": frozenset({Role.WORKER}),
    "data.get": frozenset({Role.WORKER}),
    "trends.personal": frozenset({Role.WORKER}),
    "insights.get": frozenset({Role.WORKER, Role.POLICYMAKER, Role.ADVOCATE}),
    "planner.project": frozenset({Role.WORKER}),
    "tax.resources": frozenset({Role.WORKER}),
    "media.post": frozenset({Role.WORKER}),
    "media.get": frozenset({Role.WORKER, Role.POLICYMAKER, Role.ADVOCATE}),
    "admin.invites": frozenset({Role.ADMIN}),
    "admin.usage_report": frozenset({Role.ADMIN}),
    "admin.story_statistics": frozenset({Role.ADMIN}),
    # policymakers/advocates may pull the export scoped to their own audience
    "admin.export": frozenset({Role.ADMIN, Role.POLICYMAKER, Role.ADVOCATE}),
}


def problem(status: int, code: str, message: str, field: Optional[str] = None, **extra) -> JSONResponse:
    body = {"code": code, "message": message}
    if field:
        body["field"] = field
    body.update(extra)
    return JSONResponse(status_code=status, content=body)


class RateLimiter:
    """Sliding one-minute window per session over write requests."""

    def __init__(self, limit: int = WRITE_LIMIT_PER_MINUTE):
        self.limit = limit
        self._events: dict[str, collections.deque] = {}
        self._lock = threading.Lock()

    def allow(self, key: str) -> bool:
        now = time_mod.monotonic()
        with self._lock:
            window = self._events.setdefault(key, collections.deque())
            while window and now - window[0] > 60:
                window.popleft()
            if len(window) >= self.limit:
                return False
            window.append(now)
            return True


def create_app(
    store: Store,
    *,
    k_threshold: int = 5,
    invite_secret: Optional[str] = None,
    tax_calendar_path: Optional[str] = None,
    tax_resources_path: Optional[str] = None,
    rate_limit: int = WRITE_LIMIT_PER_MINUTE,
) -> FastAPI:
    service = CollectiveService(store, k_threshold=k_threshold)
    sessions = SessionManager()
    limiter = RateLimiter(rate_limit)
    app = FastAPI(title="gigcollective", version="1.0")
    app.state.service = service
    app.state.sessions = sessions

    # the web client is served from its own origin; auth is bearer-token,
    # no cookies, so a permissive CORS policy does not widen access
    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    # -- auth plumbing ---------------------------------------------------------

    ADMIN_BOOTSTRAP = ViewerContext(viewer_id="admin-bootstrap", role=Role.ADMIN)

    def current_viewer(authorization: Optional[str] = Header(default=None)) -> Optional[ViewerContext]:
        if not authorization or not authorization.startswith("Bearer "):
            return None
        token = authorization.removeprefix("Bearer ").strip()
        if invite_secret and token == invite_secret:
            return ADMIN_BOOTSTRAP
        worker_id = sessions.resolve(token)
        if worker_id is None:
            return None
        try:
            return service.viewer(worker_id)
        except ServiceError:
            return None

    def authorize(endpoint: str, viewer: Optional[ViewerContext], request: Optional[Request] = None) -> ViewerContext:
        if viewer is None:
            raise ServiceError("UNAUTHENTICATED", "a valid session is required", status=401)
        if viewer.role not in PERMISSION_MATRIX[endpoint]:
            raise ServiceError("ROLE_DENIED", f"{viewer.role.value} may not call {endpoint}", status=403)
        if request is not None and request.method in ("POST", "PATCH", "DELETE"):
            if not limiter.allow(viewer.viewer_id):
                raise ServiceError("RATE_LIMITED", "write limit is 60 per minute", status=429)
        return viewer

    # -- error rendering --------------------------------------------------------

    @app.exception_handler(ServiceError)
    async def _service_error(_req, exc: ServiceError):
        return problem(exc.status, exc.code, exc.message, exc.field, **exc.extra)

    @app.exception_handler(ValidationFailed)
    async def _validation_failed(_req, exc: ValidationFailed):
        first = exc.errors[0]
        return problem(
            400,
            first.code,
            first.message or "validation failed",
            first.field,
            errors=[{"code": e.code, "field": e.field, "message": e.message} for e in exc.errors],
        )

    @app.exception_handler(CsvFormatError)
    async def _csv_error(_req, exc: CsvFormatError):
        return problem(400, exc.code, str(exc))

    @app.exception_handler(OwnershipMismatch)
    async def _ownership(_req, exc: OwnershipMismatch):
        return problem(403, exc.code, str(exc))

    @app.exception_handler(VersionConflict)
    async def _conflict(_req, exc: VersionConflict):
        return problem(409, exc.code, str(exc))

    @app.exception_handler(NotFound)
    async def _not_found(_req, exc: NotFound):
        return problem(404, "NOT_FOUND", str(exc))

    # -- auth endpoints -----------------------------------------------------------

    @app.post("/v1/auth/redeem-invite", status_code=201)
    def redeem(body: dict):
        token = body.get("token") or ""
        username = body.get("username") or ""
        demographics = _parse_demographics(body.get("demographics") or {})
        profile = redeem_invite(service, token, username, demographics)
        session_token = sessions.create(profile.worker_id)
        return {
            "session_token": session_token,
            "profile": {
                "worker_id": profile.worker_id,
                "username": profile.username,
                "role": profile.role.value,
                "platforms": sorted(p.value for p in profile.platforms),
            },
        }

    @app.get("/v1/me")
    def me(viewer: Optional[ViewerContext] = Depends(current_viewer)):
        if viewer is None:
            raise ServiceError("UNAUTHENTICATED", "a valid session is required", status=401)
        return {
            "worker_id": viewer.viewer_id,
            "role": viewer.role.value,
            "platforms": sorted(p.value for p in viewer.platforms),
        }

    # -- stories -------------------------------------------------------------------

    def _visible_story_json(v: VisibleStory) -> dict:
        return {
            "story_id": v.story_id,
            "display_name": v.display_name,
            "story_type": v.story_type,
            "tags": v.tags,
            "title": v.title,
            "body": v.body,
            "audience": v.audience,
            "created_at": v.created_at.isoformat(),
            "platforms": v.platforms,
            "edited": v.edited,
            "like_count": v.like_count,
            "liked_by_viewer": v.liked_by_viewer,
            "media": v.media,
            "is_own": v.is_own,
            "evidence": [
                {
                    "entry_id": s.entry_id,
                    "work_date": s.work_date,
                    "duration_minutes": s.duration_minutes,
                    "income_amount": s.income_amount,
                    **({"city": s.city} if s.city else {}),
                }
                for s in v.evidence
            ],
        }

    @app.get("/v1/stories")
    def list_stories(
        request: Request,
        type: Optional[str] = None,
        platform: Optional[str] = None,
        tag: Optional[str] = None,
        cursor: Optional[str] = None,
        limit: int = Query(default=20, ge=1, le=100),
        viewer: Optional[ViewerContext] = Depends(current_viewer),
    ):
        viewer = authorize("stories.list", viewer)
        try:
            story_type = StoryType(type) if type else None
            platform_f = Platform(platform) if platform else None
            tag_f = Tag(tag) if tag else None
        except ValueError as e:
            raise ServiceError("VALIDATION", str(e), field="filter") from None
        page = service.list_feed(
            viewer, story_type=story_type, platform=platform_f, tag=tag_f, cursor=cursor, limit=limit
        )
        return {"items": [_visible_story_json(v) for v in page.items], "next_cursor": page.next_cursor}

    @app.post("/v1/stories", status_code=201)
    def post_story(body: dict, request: Request, viewer: Optional[ViewerContext] = Depends(current_viewer)):
        viewer = authorize("stories.post", viewer, request)
        draft = _parse_story_draft(viewer.viewer_id, body)
        story = service.post_story(
            viewer.viewer_id, draft, acknowledge_redaction=bool(body.get("acknowledge_redaction"))
        )
        return {"story_id": story.story_id}

    @app.get("/v1/stories/{story_id}")
    def get_story(story_id: str, viewer: Optional[ViewerContext] = Depends(current_viewer)):
        viewer = authorize("stories.get", viewer)
        return _visible_story_json(service.get_story_for(viewer, story_id))

    @app.patch("/v1/stories/{story_id}")
    def patch_story(story_id: str, body: dict, request: Request, viewer: Optional[ViewerContext] = Depends(current_viewer)):
        viewer = authorize("stories.patch", viewer, request)
        changes = {k: v for k, v in body.items() if k != "acknowledge_redaction"}
        story = service.update_story(
            viewer.viewer_id, story_id, changes, acknowledge_redaction=bool(body.get("acknowledge_redaction"))
        )
        return {"story_id": story.story_id, "edit_count": story.edit_count}

    @app.delete("/v1/stories/{story_id}", status_code=204)
    def delete_story(story_id: str, request: Request, viewer: Optional[ViewerContext] = Depends(current_viewer)):
        viewer = authorize("stories.delete", viewer, request)
        service.delete_story(viewer.viewer_id, story_id)
        return Response(status_code=204)

    @app.post("/v1/stories/{story_id}/like")
    def like(story_id: str, request: Request, viewer: Optional[ViewerContext] = Depends(current_viewer)):
        viewer = authorize("stories.like", viewer, request)
        return {"like_count": service.like_story(viewer, story_id)}

    @app.delete("/v1/stories/{story_id}/like")
    def unlike(story_id: str, request: Request, viewer: Optional[ViewerContext] = Depends(current_viewer)):
        viewer = authorize("stories.unlike", viewer, request)
        return {"like_count": service.unlike_story(viewer, story_id)}

    @app.post("/v1/stories/{story_id}/evidence")
    def attach_evidence(story_id: str, body: dict, request: Request, viewer: Optional[ViewerContext] = Depends(current_viewer)):
        viewer = authorize("stories.evidence", viewer, request)
        story = service.attach_evidence(
            viewer.viewer_id,
            story_id,
            body.get("entry_ids") or [],
            include_city=bool(body.get("include_city")),
        )
        return {"story_id": story.story_id, "evidence": list(story.evidence)}

    # -- ledger ---------------------------------------------------------------------

    @app.get("/v1/income")
    def list_income(viewer: Optional[ViewerContext] = Depends(current_viewer)):
        viewer = authorize("income.list", viewer)
        data = service.manage_data(viewer.viewer_id)
        return {"items": [income_to_payload(e) for e in data["incomes"]]}

    @app.post("/v1/income", status_code=201)
    def post_income(body: dict, request: Request, viewer: Optional[ViewerContext] = Depends(current_viewer)):
        viewer = authorize("income.post", viewer, request)
        platform_raw = body.get("platform")
        if not platform_raw:
            raise ServiceError("MISSING_REQUIRED", "platform is required", field="platform")
        try:
            platform = Platform(platform_raw)
        except ValueError:
            raise ServiceError("UNKNOWN_PLATFORM", f"unknown platform {platform_raw!r}", field="platform") from None
        entry = service.add_income(viewer.viewer_id, platform, {k: v for k, v in body.items() if k != "platform"})
        return income_to_payload(entry)

    @app.post("/v1/income/csv")
    async def income_csv(request: Request, lenient: bool = False, viewer: Optional[ViewerContext] = Depends(current_viewer)):
        viewer = authorize("income.csv", viewer, request)
        data = await request.body()
        report = service.import_trips_csv(viewer.viewer_id, data, strict=not lenient)
        return {
            "accepted": report.accepted,
            "duplicates": report.duplicates,
            "rejected": [{"line": line, "error": err} for line, err in report.rejected],
            "source_digest": report.source_digest,
        }

    @app.patch("/v1/income/{entry_id}")
    def patch_income(entry_id: str, body: dict, request: Request, viewer: Optional[ViewerContext] = Depends(current_viewer)):
        viewer = authorize("income.patch", viewer, request)
        return income_to_payload(service.update_income(viewer.viewer_id, entry_id, body))

    @app.delete("/v1/income/{entry_id}", status_code=204)
    def delete_income(entry_id: str, request: Request, viewer: Optional[ViewerContext] = Depends(current_viewer)):
        viewer = authorize("income.delete", viewer, request)
        service.delete_income(viewer.viewer_id, entry_id)
        return Response(status_code=204)

    @app.get("/v1/expenses")
    def list_expenses(viewer: Optional[ViewerContext] = Depends(current_viewer)):
        viewer = authorize("expenses.list", viewer)
        data = service.manage_data(viewer.viewer_id)
        return {"items": [expense_to_payload(e) for e in data["expenses"]]}

    @app.post("/v1/expenses", status_code=201)
    def post_expense(body: dict, request: Request, viewer: Optional[ViewerContext] = Depends(current_viewer)):
        viewer = authorize("expenses.post", viewer, request)
        return expense_to_payload(service.add_expense(viewer.viewer_id, body))

    @app.patch("/v1/expenses/{entry_id}")
    def patch_expense(entry_id: str, body: dict, request: Request, viewer: Optional[ViewerContext] = Depends(current_viewer)):
        viewer = authorize("expenses.patch", viewer, request)
        return expense_to_payload(service.update_expense(viewer.viewer_id, entry_id, body))

    @app.delete("/v1/expenses/{entry_id}", status_code=204)
    def delete_expense(entry_id: str, request: Request, viewer: Optional[ViewerContext] = Depends(current_viewer)):
        viewer = authorize("expenses.delete", viewer, request)
        service.delete_expense(viewer.viewer_id, entry_id)
        return Response(status_code=204)

    @app.get("/v1/data")
    def manage_data(viewer: Optional[ViewerContext] = Depends(current_viewer)):
        viewer = authorize("data.get", viewer)
        data = service.manage_data(viewer.viewer_id)
        return {
            "stories": [story_to_payload(s) for s in data["stories"]],
            "incomes": [income_to_payload(e) for e in data["incomes"]],
            "expenses": [expense_to_payload(e) for e in data["expenses"]],
        }

    # -- analytics ---------------------------------------------------------------------

    @app.get("/v1/trends/personal")
    def trends_personal(
        from_: Optional[str] = Query(default=None, alias="from"),
        to: Optional[str] = None,
        viewer: Optional[ViewerContext] = Depends(current_viewer),
    ):
        viewer = authorize("trends.personal", viewer)
        if not from_ or not to:
            raise ServiceError("EMPTY_RANGE", "from and to are required", field="from")
        try:
            start, end = date.fromisoformat(from_), date.fromisoformat(to)
        except ValueError:
            raise ServiceError("EMPTY_RANGE", "dates must be YYYY-MM-DD", field="from") from None
        report = service.personal_trends(viewer.viewer_id, start, end)
        service.record_trends_visit(viewer.viewer_id)
        return {
            "range": {"from": report.range_start.isoformat(), "to": report.range_end.isoformat()},
            "total_income": str(report.total_income),
            "total_expenses": str(report.total_expenses),
            "net_earnings": str(report.net_earnings),
            "hours_worked": str(report.hours_worked),
            "hourly_rate": str(report.hourly_rate),
            "zero_hours": report.zero_hours,
            "daily_by_month": {d.isoformat(): str(v) for d, v in report.daily_by_month.items()},
            "weekly_series": [{"week": w, "income": str(v)} for w, v in report.weekly_series],
            "hourly_profile": [str(v) for v in report.hourly_profile],
            "paid_time_share": str(report.paid_time_share),
        }

    @app.get("/v1/insights")
    def insights(
        dimension: str,
        breakdown: str,
        viewer: Optional[ViewerContext] = Depends(current_viewer),
    ):
        viewer = authorize("insights.get", viewer)
        table = service.collective_insight(viewer, dimension, breakdown)
        cells = []
        for cell in table.cells:
            if getattr(cell, "suppressed", False):
                cells.append({"cohort_key": cell.cohort_key, "suppressed": True})
            else:
                cells.append({"cohort_key": cell.cohort_key, "count": cell.count, "value": str(cell.value)})
        return {
            "dimension": table.dimension,
            "breakdown_attribute": table.breakdown_attribute,
            "k": table.k,
            "cells": cells,
            "self_marker": str(table.self_marker) if table.self_marker is not None else None,
        }

    @app.post("/v1/planner/project")
    def planner(body: dict, request: Request, viewer: Optional[ViewerContext] = Depends(current_viewer)):
        viewer = authorize("planner.project", viewer, request)
        slots = body.get("slots") or []
        try:
            parsed = [(int(wd), int(hr)) for wd, hr in slots]
        except (TypeError, ValueError):
            raise ServiceError("EMPTY_PLAN", "slots must be [weekday, hour] pairs", field="slots") from None
        lookback = int(body.get("lookback_weeks") or 8)
        projection = service.project_earnings(viewer.viewer_id, parsed, lookback_weeks=lookback)
        return {
            "total_expected": str(projection.total_expected),
            "confidence": projection.confidence,
            "per_slot": [
                {"weekday": wd, "hour": hr, "expected": str(value)}
                for (wd, hr), value in sorted(projection.per_slot.items())
            ],
        }

    # -- tax ------------------------------------------------------------------------------

    @app.get("/v1/tax/resources")
    def tax_resources(viewer: Optional[ViewerContext] = Depends(current_viewer)):
        viewer = authorize("tax.resources", viewer)
        catalog = taxes.load_resources(tax_resources_path)
        calendar = taxes.load_calendar(tax_calendar_path)
        today = datetime.now(timezone.utc).date()
        upcoming = taxes.next_tax_day(calendar, today)
        return {
            "resources": [
                {
                    "title": r.title,
                    "audience": r.audience,
                    "platform": r.platform,
                    "url": r.url,
                    "body": r.body,
                    "tax_day_relevant": r.tax_day_relevant,
                }
                for r in catalog
            ],
            "next_tax_day": {"date": upcoming[0].isoformat(), "label": upcoming[1]} if upcoming else None,
        }

    # -- media ----------------------------------------------------------------------------

    @app.post("/v1/media", status_code=201)
    def upload_media(body: dict, request: Request, viewer: Optional[ViewerContext] = Depends(current_viewer)):
        viewer = authorize("media.post", viewer, request)
        try:
            data = base64.b64decode(body.get("data_b64") or "")
        except ValueError:
            raise ServiceError("VALIDATION", "data_b64 is not base64", field="data_b64") from None
        if not data:
            raise ServiceError("VALIDATION", "media payload is empty", field="data_b64")
        media_type = body.get("media_type") or "application/octet-stream"
        return {"blob_id": service.store_media(data, media_type)}

    @app.get("/v1/blobs/{blob_id}")
    def get_blob(blob_id: str, viewer: Optional[ViewerContext] = Depends(current_viewer)):
        viewer = authorize("media.get", viewer)
        if not _blob_visible(service, viewer, blob_id):
            raise ServiceError("NOT_VISIBLE", "no such blob", status=404)
        data = service.store.blobs.get(blob_id)
        media_type = "application/octet-stream"
        if service.store.exists("blob", blob_id):
            media_type = service.store.get("blob", blob_id).payload.get("media_type", media_type)
        return Response(content=data, media_type=media_type)

    # -- admin ------------------------------------------------------------------------------

    @app.post("/v1/admin/invites", status_code=201)
    def admin_invites(body: dict, request: Request, viewer: Optional[ViewerContext] = Depends(current_viewer)):
        viewer = authorize("admin.invites", viewer, request)
        try:
            role = Role(body.get("role") or "")
        except ValueError:
            raise ServiceError("VALIDATION", f"unknown role {body.get('role')!r}", field="role") from None
        platform = Platform(body["platform"]) if body.get("platform") else None
        count = int(body.get("count") or 1)
        tokens = [create_invite(service, role, platform) for _ in range(count)]
        return {"tokens": tokens}

    @app.get("/v1/admin/usage-report")
    def admin_usage(viewer: Optional[ViewerContext] = Depends(current_viewer)):
        viewer = authorize("admin.usage_report", viewer)
        stats = analytics.usage_report(service.dataset())
        table = analytics.render_descriptive_table(stats)
        return {
            "population": stats.population,
            "table": table,
            "totals": {name: stats.metrics[name].total for name in analytics.UsageStats.COLUMNS},
        }

    @app.get("/v1/admin/story-statistics")
    def admin_story_stats(viewer: Optional[ViewerContext] = Depends(current_viewer)):
        viewer = authorize("admin.story_statistics", viewer)
        dataset = service.dataset()
        stats = analytics.story_statistics(dataset)
        return {
            "authored": stats.authored,
            "mean_stories_per_user": stats.mean_stories_per_user,
            "likes_matrix": stats.likes_matrix,
            "share_to": stats.share_to,
            "story_types": stats.story_types,
            "tag_totals": analytics.tag_totals(dataset.stories),
        }

    @app.get("/v1/admin/export")
    def admin_export(audience: str, viewer: Optional[ViewerContext] = Depends(current_viewer)):
        viewer = authorize("admin.export", viewer)
        if viewer.role in (Role.POLICYMAKER, Role.ADVOCATE):
            own = "policymakers" if viewer.role is Role.POLICYMAKER else "advocates"
            if audience != own:
                raise ServiceError("ROLE_DENIED", f"{viewer.role.value} may export only audience={own}", status=403)
        import tempfile

        with tempfile.TemporaryDirectory() as tmp:
            summary = admin.export_bundle(service, audience, tmp)
            from pathlib import Path

            stories = [l for l in (Path(tmp) / "stories.ndjson").read_text().splitlines() if l]
            insights_lines = [l for l in (Path(tmp) / "insights.ndjson").read_text().splitlines() if l]
            manifest = (Path(tmp) / "manifest.json").read_text()
        import json as json_mod

        return {
            "manifest": json_mod.loads(manifest),
            "stories": [json_mod.loads(l) for l in stories],
            "insights": [json_mod.loads(l) for l in insights_lines],
            "warning": "EMPTY_EXPORT" if summary.empty else None,
        }

    return app


def _parse_story_draft(author_id: str, body: dict) -> StoryDraft:
    try:
        story_type = StoryType(body["story_type"]) if body.get("story_type") else None
    except ValueError:
        raise ServiceError("VALIDATION", f"unknown story_type {body.get('story_type')!r}", field="story_type") from None
    try:
        display = DisplayMode(body.get("display_mode") or "username")
    except ValueError:
        raise ServiceError("VALIDATION", "display_mode must be username or anonymous", field="display_mode") from None
    audience_names = body.get("audience")
    try:
        from .model import Audience

        audience = Audience.from_names(audience_names or [])
    except ValueError as e:
        raise ServiceError("VALIDATION", str(e), field="audience") from None
    return StoryDraft(
        author_id=author_id,
        story_type=story_type,
        tags=frozenset(body.get("tags") or []),
        title=body.get("title"),
        body=body.get("body"),
        display_mode=display,
        audience=audience,
        media=body.get("media"),
        evidence=tuple(body.get("evidence") or []),
        evidence_city_opt_in=bool(body.get("evidence_city_opt_in")),
    )


def _parse_demographics(raw: dict) -> Demographics:
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
    kwargs = {}
    for name, enum_cls in enums.items():
        if raw.get(name) is not None:
            try:
                kwargs[name] = enum_cls(raw[name])
            except ValueError:
                raise ServiceError("VALIDATION", f"unknown {name}: {raw[name]!r}", field=name) from None
    return Demographics(**kwargs)


def _blob_visible(service: CollectiveService, viewer: ViewerContext, blob_id: str) -> bool:
    """A blob is reachable only through a story the viewer can see or their own expense."""
    from .privacy import audience_allows
    from .serde import story_from_payload

    for rec in service.store.scan("story", lambda p: p.get("media") == blob_id):
        if audience_allows(story_from_payload(rec.payload), viewer):
            return True
    for rec in service.store.scan("expense", lambda p: p.get("photo") == blob_id):
        if rec.payload["worker_id"] == viewer.viewer_id:
            return True
    return False
