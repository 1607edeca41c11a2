from datetime import datetime, timedelta, timezone

import pytest

from gigcollective.auth import SessionManager, create_invite, redeem_invite
from gigcollective.model import Platform, Role
from gigcollective.service import ServiceError


class TestInvites:
    def test_worker_invite_requires_platform(self, service):
        with pytest.raises(ServiceError) as exc:
            create_invite(service, Role.WORKER)
        assert exc.value.code == "PLATFORM_REQUIRED_FOR_WORKER"

    def test_platform_rejected_for_non_worker(self, service):
        with pytest.raises(ServiceError) as exc:
            create_invite(service, Role.POLICYMAKER, Platform.UBER)
        assert exc.value.code == "PLATFORM_NOT_ALLOWED"

    def test_redeem_creates_profile_with_invite_role_and_platform(self, service):
        token = create_invite(service, Role.WORKER, Platform.ROVER)
        profile = redeem_invite(service, token, "mira")
        assert profile.role is Role.WORKER
        assert profile.platforms == frozenset({Platform.ROVER})

    def test_token_burns_atomically_on_username_conflict(self, service, worker):
        token = create_invite(service, Role.WORKER, Platform.UBER)
        with pytest.raises(ServiceError) as exc:
            redeem_invite(service, token, worker.username)
        assert exc.value.code == "USERNAME_TAKEN"
        # failed redemption must not burn the token
        profile = redeem_invite(service, token, "fresh-name")
        assert profile.username == "fresh-name"

    def test_expired_token(self, service):
        token = create_invite(service, Role.ADVOCATE, ttl_days=0)
        # ttl 0: already expired by the next clock tick
        with pytest.raises(ServiceError) as exc:
            redeem_invite(service, token, "late")
        assert exc.value.code == "TOKEN_EXPIRED"

    def test_tokens_stored_hashed(self, service):
        token = create_invite(service, Role.ADVOCATE)
        for rec in service.store.scan("invite"):
            assert token not in rec.id
            assert token not in str(rec.payload)


class TestSessions:
    def test_resolve_and_revoke(self):
        sessions = SessionManager()
        token = sessions.create("w1")
        assert sessions.resolve(token) == "w1"
        sessions.revoke(token)
        assert sessions.resolve(token) is None

    def test_idle_expiry(self):
        now = [datetime(2024, 6, 1, tzinfo=timezone.utc)]
        sessions = SessionManager(clock=lambda: now[0], idle_hours=24)
        token = sessions.create("w1")
        now[0] += timedelta(hours=23)
        assert sessions.resolve(token) == "w1"  # activity refreshes idle window
        now[0] += timedelta(hours=23)
        assert sessions.resolve(token) == "w1"
        now[0] += timedelta(hours=25)
        assert sessions.resolve(token) is None

    def test_unknown_token(self):
        assert SessionManager().resolve("nope") is None
