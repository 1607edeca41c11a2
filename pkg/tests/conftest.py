from __future__ import annotations

import itertools
from datetime import datetime, timedelta, timezone

import pytest

from gigcollective.model import Platform, Role
from gigcollective.service import CollectiveService
from gigcollective.storage import Store


@pytest.fixture
def store(tmp_path):
    s = Store(tmp_path / "test.db")
    yield s
    s.close()


class TickClock:
    """Deterministic strictly-increasing clock for tests."""

    def __init__(self, start: datetime = datetime(2024, 6, 1, 12, 0, tzinfo=timezone.utc)):
        self._t = start

    def __call__(self) -> datetime:
        self._t += timedelta(seconds=1)
        return self._t


@pytest.fixture
def service(store):
    ids = (f"id{i:05d}" for i in itertools.count(1))
    return CollectiveService(store, clock=TickClock(), id_factory=lambda: next(ids))


@pytest.fixture
def worker(service):
    return service.create_profile("ada", Role.WORKER, [Platform.UBER])


@pytest.fixture
def rover_worker(service):
    return service.create_profile("bea", Role.WORKER, [Platform.ROVER])


@pytest.fixture
def policymaker(service):
    return service.create_profile("pol", Role.POLICYMAKER)


def income_draft(**overrides) -> dict:
    base = {
        "work_date": "2024-06-01",
        "duration_minutes": 60,
        "work_type": "trip",
        "income_amount": "30.00",
    }
    base.update(overrides)
    return base
