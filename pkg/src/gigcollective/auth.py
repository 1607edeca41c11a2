"""Invite-only registration and bearer-token sessions.

Access is invite-gated: an operator mints single-use tokens bound to a
role (and platform, for workers); redemption burns the token and creates
the profile in one transaction. Only a salted hash of the token is stored.
"""

from __future__ import annotations

import hashlib
import secrets
import threading
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Callable, Optional

from .model import Demographics, Platform, Role
from .service import CollectiveService, ServiceError
from .storage import NotFound

DEFAULT_INVITE_TTL_DAYS = 30
SESSION_IDLE_HOURS = 24


def _token_id(token: str) -> str:
    return hashlib.sha256(token.encode()).hexdigest()


def create_invite(
    service: CollectiveService,
    role: Role,
    platform: Optional[Platform] = None,
    *,
    ttl_days: int = DEFAULT_INVITE_TTL_DAYS,
) -> str:
    """Mint a single-use invite token; returned once, stored hashed."""
    if role is Role.WORKER and platform is None:
        raise ServiceError("PLATFORM_REQUIRED_FOR_WORKER", "worker invites need a platform", field="platform")
    if role is not Role.WORKER and platform is not None:
        raise ServiceError("PLATFORM_NOT_ALLOWED", f"{role.value} invites carry no platform", field="platform")
    token = secrets.token_urlsafe(24)
    expires = service.clock() + timedelta(days=ttl_days)
    service.store.put(
        "invite",
        _token_id(token),
        {
            "role": role.value,
            "platform": platform.value if platform else None,
            "expires_at": expires.isoformat(),
            "redeemed": False,
        },
    )
    return token


def redeem_invite(
    service: CollectiveService,
    token: str,
    username: str,
    demographics: Demographics = Demographics(),
):
    """Burn a valid token and create the profile it grants, atomically."""
    with service.store.transaction():
        try:
            rec = service.store.get("invite", _token_id(token))
        except NotFound:
            raise ServiceError("TOKEN_UNKNOWN", "invite token not recognized", status=401) from None
        if rec.payload["redeemed"]:
            raise ServiceError("TOKEN_USED", "invite token was already redeemed", status=409)
        if datetime.fromisoformat(rec.payload["expires_at"]) < service.clock():
            raise ServiceError("TOKEN_EXPIRED", "invite token has expired", status=410)
        role = Role(rec.payload["role"])
        platforms = [Platform(rec.payload["platform"])] if rec.payload.get("platform") else []
        profile = service.create_profile(username, role, platforms, demographics)
        burned = dict(rec.payload)
        burned["redeemed"] = True
        burned["redeemed_by"] = profile.worker_id
        service.store.put("invite", rec.id, burned, expected_version=rec.version)
    return profile


@dataclass
class _Session:
    worker_id: str
    last_seen: datetime


class SessionManager:
    """In-memory bearer sessions with idle expiry."""

    def __init__(self, clock: Callable[[], datetime] = lambda: datetime.now(timezone.utc), idle_hours: int = SESSION_IDLE_HOURS):
        self._clock = clock
        self._idle = timedelta(hours=idle_hours)
        self._sessions: dict[str, _Session] = {}
        self._lock = threading.Lock()

    def create(self, worker_id: str) -> str:
        token = secrets.token_urlsafe(24)
        with self._lock:
            self._sessions[token] = _Session(worker_id=worker_id, last_seen=self._clock())
        return token

    def resolve(self, token: str) -> Optional[str]:
        now = self._clock()
        with self._lock:
            session = self._sessions.get(token)
            if session is None:
                return None
            if now - session.last_seen > self._idle:
                del self._sessions[token]
                return None
            session.last_seen = now
            return session.worker_id

    def revoke(self, token: str) -> None:
        with self._lock:
            self._sessions.pop(token, None)
