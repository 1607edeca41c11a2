import random
from decimal import Decimal

import pytest

from gigcollective.model import Audience, Platform, Role, StoryDraft, StoryType, Tag
from gigcollective.service import ServiceError
from conftest import income_draft


def draft_for(worker, **overrides):
    fields = dict(
        author_id=worker.worker_id,
        story_type=StoryType.STRATEGY,
        tags=frozenset({"safety"}),
        title="check rider name",
        body="ask them to say it first",
        audience=Audience(workers=True, policymakers=True, advocates=True),
    )
    fields.update(overrides)
    return StoryDraft(**fields)


class TestPostStory:
    def test_persisted_and_in_manage_data(self, service, worker):
        story = service.post_story(worker.worker_id, draft_for(worker))
        listed = service.manage_data(worker.worker_id)["stories"]
        assert [s.story_id for s in listed] == [story.story_id]

    def test_redaction_flow_requires_acknowledgment(self, service, worker):
        draft = draft_for(worker, body="pickup at 123 Main St went fine")
        with pytest.raises(ServiceError) as exc:
            service.post_story(worker.worker_id, draft)
        assert exc.value.code == "UNACKNOWLEDGED_REDACTION"
        assert exc.value.extra["preview"]["body"] == "pickup at [ADDRESS] went fine"
        story = service.post_story(worker.worker_id, draft, acknowledge_redaction=True)
        assert story.body == "pickup at [ADDRESS] went fine"
        assert story.original_body == "pickup at 123 Main St went fine"

    def test_original_text_visible_only_to_author(self, service, worker, rover_worker):
        draft = draft_for(worker, body="call 412-555-0101")
        story = service.post_story(worker.worker_id, draft, acknowledge_redaction=True)
        other = service.viewer(rover_worker.worker_id)
        visible = service.get_story_for(other, story.story_id)
        assert "412-555-0101" not in visible.body
        own = service.manage_data(worker.worker_id)["stories"][0]
        assert own.original_body == "call 412-555-0101"

    def test_private_story_absent_from_other_feeds(self, service, worker, rover_worker):
        service.post_story(worker.worker_id, draft_for(worker, audience=Audience()))
        other = service.viewer(rover_worker.worker_id)
        assert service.list_feed(other).items == []
        own = service.list_feed(service.viewer(worker.worker_id))
        assert len(own.items) == 1

    def test_policymaker_cannot_post(self, service, policymaker):
        with pytest.raises(ServiceError) as exc:
            service.post_story(policymaker.worker_id, draft_for(policymaker))
        assert exc.value.code == "ROLE_DENIED"


class TestFeed:
    def test_most_recent_first(self, service, worker):
        ids = [service.post_story(worker.worker_id, draft_for(worker, title=f"s{i}")).story_id for i in range(3)]
        page = service.list_feed(service.viewer(worker.worker_id))
        assert [v.story_id for v in page.items] == list(reversed(ids))

    def test_filters_are_conjunctive(self, service, worker, rover_worker):
        service.post_story(worker.worker_id, draft_for(worker, story_type=StoryType.ISSUE, tags=frozenset({"stress"})))
        service.post_story(rover_worker.worker_id, draft_for(rover_worker, story_type=StoryType.ISSUE, tags=frozenset({"safety"})))
        viewer = service.viewer(worker.worker_id)
        page = service.list_feed(viewer, story_type=StoryType.ISSUE, platform=Platform.ROVER, tag=Tag.SAFETY)
        assert len(page.items) == 1 and page.items[0].platforms == ["rover"]

    def test_pagination_union_is_complete_without_duplicates(self, service, worker):
        expected = {service.post_story(worker.worker_id, draft_for(worker, title=f"s{i}")).story_id for i in range(23)}
        viewer = service.viewer(worker.worker_id)
        seen: list[str] = []
        cursor = None
        for _ in range(20):
            page = service.list_feed(viewer, cursor=cursor, limit=5)
            seen.extend(v.story_id for v in page.items)
            if page.next_cursor is None:
                break
            cursor = page.next_cursor
        assert len(seen) == len(set(seen)) == 23
        assert set(seen) == expected

    def test_invalid_cursor(self, service, worker):
        with pytest.raises(ServiceError) as exc:
            service.list_feed(service.viewer(worker.worker_id), cursor="!!!not-a-cursor!!!")
        assert exc.value.code == "INVALID_CURSOR"

    def test_feed_matches_brute_force_over_small_instance(self, service):
        rng = random.Random(11)
        workers = [service.create_profile(f"w{i}", Role.WORKER, [Platform.UBER]) for i in range(4)]
        policymaker = service.create_profile("pm", Role.POLICYMAKER)
        advocate = service.create_profile("adv", Role.ADVOCATE)
        stories = {}
        for i in range(24):
            author = rng.choice(workers)
            audience = Audience(workers=rng.random() < 0.5, policymakers=rng.random() < 0.5, advocates=rng.random() < 0.5)
            s = service.post_story(author.worker_id, draft_for(author, title=f"s{i}", audience=audience))
            stories[s.story_id] = (author.worker_id, audience)
        for profile in [*workers, policymaker, advocate]:
            viewer = service.viewer(profile.worker_id)
            got = set()
            cursor = None
            while True:
                page = service.list_feed(viewer, cursor=cursor, limit=7)
                got |= {v.story_id for v in page.items}
                if page.next_cursor is None:
                    break
                cursor = page.next_cursor
            want = {
                sid
                for sid, (author_id, audience) in stories.items()
                if author_id == profile.worker_id or audience.allows(profile.role)
            }
            assert got == want


class TestLikes:
    def test_like_idempotent_and_counts_cardinality(self, service, worker, rover_worker):
        story = service.post_story(worker.worker_id, draft_for(worker))
        viewer = service.viewer(rover_worker.worker_id)
        assert service.like_story(viewer, story.story_id) == 1
        assert service.like_story(viewer, story.story_id) == 1
        assert service.unlike_story(viewer, story.story_id) == 0
        assert service.unlike_story(viewer, story.story_id) == 0

    def test_cross_platform_like_allowed(self, service, worker, rover_worker):
        story = service.post_story(rover_worker.worker_id, draft_for(rover_worker))
        assert service.like_story(service.viewer(worker.worker_id), story.story_id) == 1

    def test_like_requires_visibility(self, service, worker, rover_worker):
        story = service.post_story(worker.worker_id, draft_for(worker, audience=Audience(policymakers=True)))
        with pytest.raises(ServiceError) as exc:
            service.like_story(service.viewer(rover_worker.worker_id), story.story_id)
        assert exc.value.code == "NOT_VISIBLE"

    def test_policymaker_cannot_like(self, service, worker, policymaker):
        story = service.post_story(worker.worker_id, draft_for(worker))
        with pytest.raises(ServiceError) as exc:
            service.like_story(service.viewer(policymaker.worker_id), story.story_id)
        assert exc.value.code == "ROLE_CANNOT_LIKE"

    def test_repeated_like_appends_no_audit_event(self, service, worker, rover_worker):
        story = service.post_story(worker.worker_id, draft_for(worker))
        viewer = service.viewer(rover_worker.worker_id)
        service.like_story(viewer, story.story_id)
        service.like_story(viewer, story.story_id)
        events = service.store.audit_for_subject("story", story.story_id)
        assert [e.action.value for e in events] == ["create", "like"]


class TestEvidence:
    def test_attach_owned_entry_renders_summary(self, service, worker, rover_worker):
        entry = service.add_income(worker.worker_id, Platform.UBER, income_draft())
        story = service.post_story(worker.worker_id, draft_for(worker))
        service.attach_evidence(worker.worker_id, story.story_id, [entry.entry_id])
        visible = service.get_story_for(service.viewer(rover_worker.worker_id), story.story_id)
        (summary,) = visible.evidence
        assert summary.work_date == "2024-06-01"
        assert summary.duration_minutes == 60
        assert summary.income_amount == "30.00"
        assert summary.city is None

    def test_city_hidden_unless_author_opts_in(self, service, worker, rover_worker):
        entry = service.add_income(worker.worker_id, Platform.UBER, income_draft(city="Pittsburgh"))
        story = service.post_story(worker.worker_id, draft_for(worker))
        service.attach_evidence(worker.worker_id, story.story_id, [entry.entry_id], include_city=True)
        visible = service.get_story_for(service.viewer(rover_worker.worker_id), story.story_id)
        assert visible.evidence[0].city == "Pittsburgh"

    def test_attach_foreign_entry_rejected(self, service, worker, rover_worker):
        entry = service.add_income(rover_worker.worker_id, Platform.ROVER, income_draft(work_type="walk"))
        story = service.post_story(worker.worker_id, draft_for(worker))
        with pytest.raises(ServiceError) as exc:
            service.attach_evidence(worker.worker_id, story.story_id, [entry.entry_id])
        assert exc.value.code == "EVIDENCE_NOT_OWNED"

    def test_deleting_entry_cascades_out_of_story(self, service, worker, rover_worker):
        entry = service.add_income(worker.worker_id, Platform.UBER, income_draft())
        story = service.post_story(worker.worker_id, draft_for(worker))
        service.attach_evidence(worker.worker_id, story.story_id, [entry.entry_id])
        service.delete_income(worker.worker_id, entry.entry_id)
        visible = service.get_story_for(service.viewer(rover_worker.worker_id), story.story_id)
        assert visible.evidence == []


class TestManageData:
    def test_edit_story_title_flips_edited_flag(self, service, worker, rover_worker):
        story = service.post_story(worker.worker_id, draft_for(worker))
        before = service.get_story_for(service.viewer(rover_worker.worker_id), story.story_id)
        assert not before.edited
        service.update_story(worker.worker_id, story.story_id, {"title": "better title"})
        after = service.get_story_for(service.viewer(rover_worker.worker_id), story.story_id)
        assert after.edited and after.title == "better title"

    def test_audience_change_is_scope_event_not_edit(self, service, worker):
        story = service.post_story(worker.worker_id, draft_for(worker))
        service.update_story(worker.worker_id, story.story_id, {"audience": ["workers"]})
        events = service.store.audit_for_subject("story", story.story_id)
        assert [e.action.value for e in events] == ["create", "share_scope_change"]
        updated = service.manage_data(worker.worker_id)["stories"][0]
        assert updated.edit_count == 0 and updated.audience.category() == "workers_only"

    def test_deleted_income_absent_from_trends(self, service, worker):
        from datetime import date
        e1 = service.add_income(worker.worker_id, Platform.UBER, income_draft(income_amount="30.00"))
        service.add_income(worker.worker_id, Platform.UBER, income_draft(income_amount="20.00"))
        service.delete_income(worker.worker_id, e1.entry_id)
        report = service.personal_trends(worker.worker_id, date(2024, 6, 1), date(2024, 6, 30))
        assert report.total_income == Decimal("20.00")

    def test_update_foreign_story_rejected(self, service, worker, rover_worker):
        story = service.post_story(worker.worker_id, draft_for(worker))
        with pytest.raises(ServiceError) as exc:
            service.update_story(rover_worker.worker_id, story.story_id, {"title": "hijack"})
        assert exc.value.code == "UNAUTHORIZED_ACTOR"

    def test_list_after_three_uploads(self, service, worker):
        for i in range(3):
            service.add_income(worker.worker_id, Platform.UBER, income_draft(income_amount=f"{10+i}.00"))
        assert len(service.manage_data(worker.worker_id)["incomes"]) == 3


class TestImports:
    def test_double_import_idempotent(self, service, worker):
        from gigcollective.fixture import driver2_trips_csv

        # reuse the fixture CSV generator against this worker
        first = service.import_trips_csv(worker.worker_id, driver2_trips_csv())
        assert first.accepted == 35 and first.duplicates == 0
        second = service.import_trips_csv(worker.worker_id, driver2_trips_csv())
        assert second.accepted == 0 and second.duplicates == 35
        assert len(service.manage_data(worker.worker_id)["incomes"]) == 35

    def test_disjoint_batches_add_up(self, service, worker):
        from gigcollective.ingestion import normalize_trip
        from gigcollective.fixture import driver2_trips

        trips = driver2_trips()
        batch1 = [normalize_trip(t, worker_id=worker.worker_id, entry_id=service.new_id()) for t in trips[:2]]
        batch2 = [normalize_trip(t, worker_id=worker.worker_id, entry_id=service.new_id()) for t in trips[2:5]]
        service.import_entries(worker.worker_id, batch1)
        service.import_entries(worker.worker_id, batch2)
        assert len(service.manage_data(worker.worker_id)["incomes"]) == 5

    def test_foreign_entry_aborts_whole_batch(self, service, worker, rover_worker):
        from gigcollective.ingestion import OwnershipMismatch, normalize_trip
        from gigcollective.fixture import driver2_trips

        trips = driver2_trips()
        batch = [
            normalize_trip(trips[0], worker_id=worker.worker_id, entry_id="mine"),
            normalize_trip(trips[1], worker_id=rover_worker.worker_id, entry_id="theirs"),
        ]
        with pytest.raises(OwnershipMismatch):
            service.import_entries(worker.worker_id, batch)
        assert service.manage_data(worker.worker_id)["incomes"] == []

    def test_manual_entries_never_deduped(self, service, worker):
        service.add_income(worker.worker_id, Platform.UBER, income_draft())
        service.add_income(worker.worker_id, Platform.UBER, income_draft())
        assert len(service.manage_data(worker.worker_id)["incomes"]) == 2


class TestConcurrency:
    def test_concurrent_likes_linearize_to_exact_count(self, store):
        import threading
        from gigcollective.model import Platform, Role
        from gigcollective.service import CollectiveService

        service = CollectiveService(store)
        author = service.create_profile("author", Role.WORKER, [Platform.UBER])
        likers = [service.create_profile(f"liker{i}", Role.WORKER, [Platform.ROVER]) for i in range(12)]
        story = service.post_story(author.worker_id, draft_for(author))

        failures = []

        def like(profile):
            try:
                service.like_story(service.viewer(profile.worker_id), story.story_id)
            except Exception as e:  # noqa: BLE001
                failures.append(e)

        threads = [threading.Thread(target=like, args=(p,)) for p in likers]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert failures == []
        final = service.get_story_for(service.viewer(author.worker_id), story.story_id)
        assert final.like_count == 12
        events = service.store.audit_for_subject("story", story.story_id)
        assert sum(1 for e in events if e.action.value == "like") == 12
