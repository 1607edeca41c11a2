"""Acceptance criteria, one test per criterion.

Each test prints `ACCEPTANCE <name>: PASS|FAIL` (visible with `pytest -s`).
Expected values for the field-study fixture are frozen from the published
study tables; property suites compare the pipeline against independent
brute-force oracles implemented here with their own arithmetic.
"""

from __future__ import annotations

import random
import time as time_mod
from contextlib import contextmanager
from datetime import date, time, timedelta
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from pathlib import Path

import pytest

from gigcollective import admin, analytics
from gigcollective.fixture import seed_field_study
from gigcollective.ingestion import parse_trips_csv
from gigcollective.model import (
    Audience,
    Demographics,
    EntrySource,
    Gender,
    IncomeEntry,
    Platform,
    Role,
    StoryDraft,
    StoryType,
    WorkerProfile,
)
from gigcollective.privacy import ReleasedCell, SuppressedCell, replay_history
from gigcollective.serde import profile_to_payload
from gigcollective.service import CollectiveService
from gigcollective.storage import Store

GOLDEN = Path(__file__).parent / "data" / "trips_golden.csv"


@contextmanager
def criterion(name: str, budget_seconds: float | None = None):
    started = time_mod.monotonic()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {name}: FAIL")
        raise
    elapsed = time_mod.monotonic() - started
    if budget_seconds is not None and elapsed > budget_seconds:
        print(f"ACCEPTANCE {name}: FAIL (took {elapsed:.1f}s, budget {budget_seconds}s)")
        pytest.fail(f"{name} exceeded time budget: {elapsed:.1f}s > {budget_seconds}s")
    print(f"ACCEPTANCE {name}: PASS ({elapsed:.2f}s)")


@pytest.fixture(scope="module")
def field_study(tmp_path_factory):
    """Seed once; the fixture-reproduction criteria read from this store."""
    store = Store(tmp_path_factory.mktemp("accept") / "field.db")
    started = time_mod.monotonic()
    service = seed_field_study(store)
    return service, time_mod.monotonic() - started


def test_fixture_usage_report_reproduces_descriptive_stats(field_study):
    with criterion("fixture-usage-report", budget_seconds=5):
        service, seed_seconds = field_study
        stats = analytics.usage_report(service.dataset())
        table = analytics.render_descriptive_table(stats)
        assert stats.population == 14
        assert table["Total"] == {
            "shared_stories": "27",
            "story_words": "3235",
            "liked_stories": "42",
            "income_uploads": "120",
            "expense_uploads": "20",
            "trends_visits": "63",
        }
        assert table["Average"] == {
            "shared_stories": "1.93",
            "story_words": "231",
            "liked_stories": "3",
            "income_uploads": "8.57",
            "expense_uploads": "1.42",
            "trends_visits": "4.5",
        }
        assert table["Median"] == {
            "shared_stories": "1",
            "story_words": "108",
            "liked_stories": "3",
            "income_uploads": "6.5",
            "expense_uploads": "1",
            "trends_visits": "4.5",
        }
        assert table["Max"] == {
            "shared_stories": "5",
            "story_words": "1493",
            "liked_stories": "11",
            "income_uploads": "41",
            "expense_uploads": "7",
            "trends_visits": "9",
        }
        assert seed_seconds < 5


def test_fixture_story_statistics_reproduce_table(field_study):
    with criterion("fixture-story-statistics"):
        service, _ = field_study
        stats = analytics.story_statistics(service.dataset())
        assert stats.authored == {"uber": 15, "rover": 11, "upwork": 1}
        assert stats.mean_stories_per_user == {"uber": "2.143", "rover": "2.2", "upwork": "0.5"}
        assert stats.likes_matrix == {
            "uber": {"uber": 13, "rover": 10, "upwork": 0},
            "rover": {"uber": 10, "rover": 10, "upwork": 0},
            "upwork": {"uber": 1, "rover": 0, "upwork": 0},
        }
        assert stats.share_to["workers_only"] == {"uber": 2, "rover": 1, "upwork": 0}
        assert stats.share_to["policymakers_only"] == {"uber": 0, "rover": 1, "upwork": 0}
        assert stats.share_to["workers+policymakers"] == {"uber": 1, "rover": 0, "upwork": 0}
        assert stats.share_to["all"] == {"uber": 12, "rover": 9, "upwork": 1}
        assert stats.story_types["strategy"] == {"uber": 10, "rover": 8, "upwork": 0}
        assert stats.story_types["issue"] == {"uber": 5, "rover": 3, "upwork": 1}


def test_fixture_policymaker_export_contains_23_stories(field_study, tmp_path):
    with criterion("fixture-policymaker-export"):
        service, _ = field_study
        summary = admin.export_bundle(service, "policymakers", tmp_path / "bundle")
        assert summary.stories == 23
        lines = (tmp_path / "bundle" / "stories.ndjson").read_text().splitlines()
        assert len(lines) == 23


def test_fixture_tag_totals_reproduce_tag_table(field_study):
    with criterion("fixture-tag-totals"):
        service, _ = field_study
        totals = analytics.tag_totals(service.dataset().stories)
        assert totals == {
            "safety": 10,
            "fair_pay": 6,
            "care_giving": 5,
            "stress": 4,
            "technology": 4,
            "other": 3,
            "ratings": 3,
            "work_time": 2,
            "algorithms": 1,
            "discrimination": 1,
        }


def test_scoping_property_suite(tmp_path):
    with criterion("scoping-brute-force", budget_seconds=30):
        rng = random.Random(2024)
        store = Store(tmp_path / "scope.db", durability="normal")
        service = CollectiveService(store)
        workers = [service.create_profile(f"w{i}", Role.WORKER, [Platform.UBER]) for i in range(30)]
        outsiders = [
            service.create_profile("pm1", Role.POLICYMAKER),
            service.create_profile("pm2", Role.POLICYMAKER),
            service.create_profile("adv1", Role.ADVOCATE),
            service.create_profile("adv2", Role.ADVOCATE),
        ]
        stories = {}
        for i in range(300):
            author = rng.choice(workers)
            audience = Audience(
                workers=rng.random() < 0.45,
                policymakers=rng.random() < 0.45,
                advocates=rng.random() < 0.45,
            )
            s = service.post_story(
                author.worker_id,
                StoryDraft(
                    author_id=author.worker_id,
                    story_type=StoryType.STRATEGY if rng.random() < 0.5 else StoryType.ISSUE,
                    tags=frozenset({"safety"}),
                    title=f"story {i}",
                    body="body",
                    audience=audience,
                ),
            )
            stories[s.story_id] = (author.worker_id, audience)

        def oracle(author_id: str, audience: Audience, viewer_id: str, role: Role) -> bool:
            # independent restatement of the visibility rule
            if viewer_id == author_id:
                return True
            return {
                Role.WORKER: audience.workers,
                Role.POLICYMAKER: audience.policymakers,
                Role.ADVOCATE: audience.advocates,
                Role.ADMIN: False,
            }[role]

        cases = 0
        violations = 0
        for profile in [*workers, *outsiders]:
            viewer = service.viewer(profile.worker_id)
            got: set[str] = set()
            cursor = None
            while True:
                page = service.list_feed(viewer, cursor=cursor, limit=97)
                ids = [v.story_id for v in page.items]
                assert len(set(ids) & got) == 0, "pagination must not repeat stories"
                got |= set(ids)
                if page.next_cursor is None:
                    break
                cursor = page.next_cursor
            for story_id, (author_id, audience) in stories.items():
                cases += 1
                expected = oracle(author_id, audience, profile.worker_id, profile.role)
                if (story_id in got) != expected:
                    violations += 1
        assert cases >= 10_000
        assert violations == 0
        store.close()


def _brute_force_insight(workers_entries, dimension, attribute, k):
    """Independent cohort computation: plain loops, Fractions, own rounding."""
    cohorts: dict[str, list[Fraction]] = {}
    for profile, entries in workers_entries:
        key = profile.demographics.attribute(attribute)
        if key is None:
            continue
        if dimension == "hourly_income_rate":
            minutes = sum(e.duration_minutes for e in entries)
            if minutes == 0:
                continue
            cents = sum(int(e.income_amount * 100) for e in entries)
            value = Fraction(cents, 100) / Fraction(minutes, 60)
        elif dimension == "tipping_rate":
            cents = sum(int(e.income_amount * 100) for e in entries)
            tips = sum(int(e.tips * 100) for e in entries if e.tips is not None)
            if cents - tips <= 0:
                continue
            value = Fraction(tips, cents - tips) * 100
        else:
            raise AssertionError(dimension)
        cohorts.setdefault(key, []).append(value)
    released = {}
    suppressed = set()
    for key, values in cohorts.items():
        if len(values) >= k:
            mean = sum(values) / len(values)
            released[key] = Decimal(mean.numerator) / Decimal(mean.denominator)
            released[key] = released[key].quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)
        else:
            suppressed.add(key)
    return released, suppressed


def _random_worker_pool(rng, n):
    genders = [Gender.MALE, Gender.FEMALE]
    pool = []
    for i in range(n):
        profile = WorkerProfile(
            worker_id=f"w{i}",
            username=f"w{i}",
            role=Role.WORKER,
            platforms=frozenset({Platform.UBER}),
            demographics=Demographics(gender=rng.choice(genders)),
        )
        entries = []
        for j in range(rng.randint(1, 4)):
            income_cents = rng.randint(100, 80_00)
            tips_cents = rng.randint(0, income_cents)
            entries.append(
                IncomeEntry(
                    entry_id=f"w{i}e{j}",
                    worker_id=f"w{i}",
                    platform=Platform.UBER,
                    work_date=date(2024, 6, 1) + timedelta(days=j),
                    duration_minutes=rng.randint(10, 300),
                    work_type="trip",
                    income_amount=Decimal(income_cents) / 100,
                    tips=Decimal(tips_cents) / 100,
                    source=EntrySource.MANUAL,
                    dedupe_key=f"w{i}e{j}",
                )
            )
        pool.append((profile, entries))
    return pool


def test_k_suppression_property_suite():
    with criterion("k-suppression", budget_seconds=30):
        rng = random.Random(77)
        for trial in range(40):
            pool = _random_worker_pool(rng, rng.randint(2, 40))
            dimension = rng.choice(["hourly_income_rate", "tipping_rate"])
            previous_released: set[str] | None = None
            for k in range(1, 11):
                table = analytics.collective_insight(pool, dimension, "gender", k=k)
                released = {c.cohort_key: c for c in table.cells if isinstance(c, ReleasedCell)}
                suppressed = {c.cohort_key for c in table.cells if isinstance(c, SuppressedCell)}
                for cell in released.values():
                    assert cell.count >= k
                oracle_released, oracle_suppressed = _brute_force_insight(pool, dimension, "gender", k)
                assert set(released) == set(oracle_released)
                assert suppressed == oracle_suppressed
                for key, cell in released.items():
                    assert cell.value == oracle_released[key], (dimension, k, key)
                if previous_released is not None:
                    assert set(released) <= previous_released, "raising k must never reveal a cell"
                previous_released = set(released)


def test_revocation_suite(tmp_path):
    with criterion("revocation", budget_seconds=60):
        rng = random.Random(4242)
        store = Store(tmp_path / "revoke.db", durability="normal")
        service = CollectiveService(store)
        with store.transaction():
            profiles = []
            for i in range(1000):
                profile = WorkerProfile(
                    worker_id=f"rw{i}",
                    username=f"rw{i}",
                    role=Role.WORKER,
                    platforms=frozenset({Platform.UBER}),
                    demographics=Demographics(gender=Gender.MALE if i % 2 else Gender.FEMALE),
                )
                store.put("profile", profile.worker_id, profile_to_payload(profile))
                profiles.append(profile)

        window = (date(2024, 5, 1), date(2024, 6, 30))
        kept_entries: dict[str, list] = {}
        doomed: dict[str, str] = {}
        for profile in profiles:
            n = rng.randint(2, 6)
            entries = []
            for j in range(n):
                entry = service.add_income(
                    profile.worker_id,
                    Platform.UBER,
                    {
                        "work_date": (date(2024, 5, 1) + timedelta(days=rng.randrange(55))).isoformat(),
                        "duration_minutes": rng.randint(10, 240),
                        "work_type": "trip",
                        "income_amount": str(Decimal(rng.randint(100, 9000)) / 100),
                    },
                )
                entries.append(entry)
            victim = rng.choice(entries)
            doomed[profile.worker_id] = victim.entry_id
            kept_entries[profile.worker_id] = [e for e in entries if e.entry_id != victim.entry_id]

        for profile in profiles:
            service.delete_income(profile.worker_id, doomed[profile.worker_id])

        for profile in profiles:
            after = service.personal_trends(profile.worker_id, *window)
            scratch = analytics.personal_trends(kept_entries[profile.worker_id], [], *window)
            assert after == scratch, profile.worker_id

        # collective insights over the revoked store equal recomputation from scratch
        remaining = service.dataset().incomes
        by_worker: dict[str, list] = {}
        for e in remaining:
            by_worker.setdefault(e.worker_id, []).append(e)
        stored = [(p, by_worker.get(p.worker_id, [])) for p in profiles]
        scratch_pool = [(p, kept_entries[p.worker_id]) for p in profiles]
        for dimension in ("hourly_income_rate", "tipping_rate"):
            via_store = analytics.collective_insight(stored, dimension, "gender", k=5)
            via_scratch = analytics.collective_insight(scratch_pool, dimension, "gender", k=5)
            assert via_store.cells == via_scratch.cells
        store.close()


def test_trends_conservation():
    with criterion("trends-conservation"):
        rng = random.Random(99)
        for trial in range(200):
            entries = []
            for j in range(rng.randint(1, 40)):
                entries.append(
                    IncomeEntry(
                        entry_id=f"t{trial}e{j}",
                        worker_id="w",
                        platform=Platform.UBER,
                        work_date=date(2024, 1, 1) + timedelta(days=rng.randrange(180)),
                        duration_minutes=rng.randint(1, 600),
                        work_type="trip",
                        income_amount=Decimal(rng.randint(0, 50_000)) / 100,
                        source=EntrySource.MANUAL,
                        dedupe_key=f"t{trial}e{j}",
                    )
                )
            report = analytics.personal_trends(entries, [], date(2024, 1, 1), date(2024, 6, 30))
            assert sum(report.daily_by_month.values()) == report.total_income
            assert sum(v for _, v in report.weekly_series) == report.total_income


def test_planner_closed_form():
    with criterion("planner-closed-form"):
        rng = random.Random(123)
        for trial in range(100):
            rate = Decimal(rng.randint(500, 6000)) / 100
            entries = []
            for j in range(rng.randint(1, 30)):
                hours = rng.randint(1, 3)
                entries.append(
                    IncomeEntry(
                        entry_id=f"p{trial}e{j}",
                        worker_id="w",
                        platform=Platform.UBER,
                        work_date=date(2024, 5, 6) + timedelta(days=rng.randrange(28)),
                        duration_minutes=60 * hours,
                        work_type="trip",
                        income_amount=rate * hours,
                        start_time=time(rng.randrange(24), 0),
                        source=EntrySource.MANUAL,
                        dedupe_key=f"p{trial}e{j}",
                    )
                )
            slot_count = rng.randint(1, 25)
            slots = set()
            while len(slots) < slot_count:
                slots.add((rng.randrange(7), rng.randrange(24)))
            projection = analytics.project_earnings(
                entries, analytics.PlanInput(slots=frozenset(slots)), today=date(2024, 6, 3)
            )
            assert projection.total_expected == rate * slot_count, (trial, rate, slot_count)


def test_csv_suite(tmp_path):
    with criterion("csv-suite", budget_seconds=10):
        # golden parse equality
        records, report = parse_trips_csv(GOLDEN.read_bytes())
        assert report.accepted == 3 and not report.rejected
        assert [r.trip_id for r in records] == ["TA100", "TB200", "TC300"]
        assert [r.fare_total for r in records] == [Decimal("14.50"), Decimal("23.75"), Decimal("19.20")]

        # idempotence through the full import path: double import changes nothing
        store = Store(tmp_path / "csv.db", durability="normal")
        service = CollectiveService(store)
        service.create_profile("ada", Role.WORKER, [Platform.UBER], worker_id="w-ada")
        first = service.import_trips_csv("w-ada", GOLDEN.read_bytes())
        assert (first.accepted, first.duplicates, first.rejected) == (3, 0, [])
        before = [e for e in service.manage_data("w-ada")["incomes"]]
        second = service.import_trips_csv("w-ada", GOLDEN.read_bytes())
        assert (second.accepted, second.duplicates) == (0, 3)
        after = [e for e in service.manage_data("w-ada")["incomes"]]
        kept = {e.entry_id: e for e in before}
        assert {e.entry_id: e for e in after} == kept, "double import must leave the ledger unchanged"

        # row-error isolation: one bad row rejected, the rest land
        lines = GOLDEN.read_text().splitlines()
        bad = lines[2].replace("2024-05-06T13:47:30+00:00", "2024-05-06T13:00:00+00:00")
        mixed = "\n".join([lines[0], lines[1].replace("TA100", "TX900"), bad.replace("TB200", "TX901"), lines[3].replace("TC300", "TX902")])
        report = service.import_trips_csv("w-ada", mixed.encode())
        assert report.accepted == 2
        assert len(report.rejected) == 1 and report.rejected[0][0] == 3
        store.close()


def test_audit_replay_suite(tmp_path):
    with criterion("audit-replay"):
        rng = random.Random(31337)
        store = Store(tmp_path / "replay.db", durability="normal")
        service = CollectiveService(store)
        authors = [service.create_profile(f"a{i}", Role.WORKER, [Platform.UBER]) for i in range(6)]
        likers = [service.create_profile(f"l{i}", Role.WORKER, [Platform.ROVER]) for i in range(5)]

        story_ids = []
        for i in range(60):
            author = rng.choice(authors)
            story = service.post_story(
                author.worker_id,
                StoryDraft(
                    author_id=author.worker_id,
                    story_type=StoryType.STRATEGY,
                    tags=frozenset({"safety"}),
                    title=f"s{i}",
                    body="original",
                    audience=Audience(workers=True, policymakers=bool(rng.getrandbits(1))),
                ),
            )
            story_ids.append((story.story_id, author.worker_id))

        entry_ids = []
        for i in range(40):
            owner = rng.choice(authors)
            entry = service.add_income(
                owner.worker_id,
                Platform.UBER,
                {
                    "work_date": "2024-06-01",
                    "duration_minutes": rng.randint(10, 120),
                    "work_type": "trip",
                    "income_amount": str(Decimal(rng.randint(100, 5000)) / 100),
                },
            )
            entry_ids.append((entry.entry_id, owner.worker_id))

        for _ in range(400):
            op = rng.randrange(6)
            if op == 0:
                story_id, author_id = rng.choice(story_ids)
                if store.exists("story", story_id):
                    service.update_story(author_id, story_id, {"title": f"edit {rng.randrange(1000)}"})
            elif op == 1:
                story_id, author_id = rng.choice(story_ids)
                if store.exists("story", story_id):
                    service.update_story(
                        author_id, story_id, {"audience": ["workers", "policymakers", "advocates"]}
                    )
            elif op == 2:
                story_id, _ = rng.choice(story_ids)
                liker = rng.choice(likers)
                if store.exists("story", story_id):
                    viewer = service.viewer(liker.worker_id)
                    try:
                        if rng.getrandbits(1):
                            service.like_story(viewer, story_id)
                        else:
                            service.unlike_story(viewer, story_id)
                    except Exception:
                        pass  # invisible to this viewer: fine, no state change
            elif op == 3:
                story_id, author_id = rng.choice(story_ids)
                if rng.random() < 0.25 and store.exists("story", story_id):
                    service.delete_story(author_id, story_id)
            elif op == 4:
                entry_id, owner_id = rng.choice(entry_ids)
                if store.exists("income", entry_id):
                    service.update_income(owner_id, entry_id, {"notes": f"n{rng.randrange(100)}"})
            else:
                entry_id, owner_id = rng.choice(entry_ids)
                if rng.random() < 0.25 and store.exists("income", entry_id):
                    service.delete_income(owner_id, entry_id)

        checked = 0
        for story_id, _ in story_ids:
            events = store.audit_for_subject("story", story_id)
            reconstructed = replay_history(events)
            if store.exists("story", story_id):
                current = store.get("story", story_id).payload
                assert reconstructed == current, story_id
                edited_events = any(e.action.value == "edit" for e in events)
                assert (current["edit_count"] > 0) == edited_events
            else:
                assert reconstructed is None
            checked += 1
        for entry_id, _ in entry_ids:
            events = store.audit_for_subject("income", entry_id)
            reconstructed = replay_history(events)
            if store.exists("income", entry_id):
                assert reconstructed == store.get("income", entry_id).payload, entry_id
            else:
                assert reconstructed is None
            checked += 1
        assert checked == 100
        store.close()
