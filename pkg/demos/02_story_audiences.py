"""Audience scoping in action: who sees which story, and what redaction does.

Run: python demos/02_story_audiences.py
"""

import tempfile
from pathlib import Path

from gigcollective.model import Audience, Platform, Role, StoryDraft, StoryType
from gigcollective.service import CollectiveService, ServiceError
from gigcollective.storage import Store

with tempfile.TemporaryDirectory() as tmp:
    service = CollectiveService(Store(Path(tmp) / "demo.db"))
    ada = service.create_profile("ada", Role.WORKER, [Platform.UBER])
    bea = service.create_profile("bea", Role.WORKER, [Platform.ROVER])
    pat = service.create_profile("pat", Role.POLICYMAKER)

    def draft(title, audience, body="details inside"):
        return StoryDraft(
            author_id=ada.worker_id,
            story_type=StoryType.STRATEGY,
            tags=frozenset({"safety"}),
            title=title,
            body=body,
            audience=audience,
        )

    service.post_story(ada.worker_id, draft("for everyone", Audience(True, True, True)))
    service.post_story(ada.worker_id, draft("workers only", Audience(workers=True)))
    service.post_story(ada.worker_id, draft("private note", Audience()))

    for profile in (ada, bea, pat):
        feed = service.list_feed(service.viewer(profile.worker_id))
        titles = [v.title for v in feed.items]
        print(f"{profile.username:>4} ({profile.role.value}) sees: {titles}")

    try:
        service.post_story(ada.worker_id, draft("oops", Audience(workers=True), body="pickup at 123 Main St"))
    except ServiceError as e:
        print(f"\nredaction gate: {e.code} -> preview {e.extra['preview']['body']!r}")
    stored = service.post_story(
        ada.worker_id, draft("confirmed", Audience(workers=True), body="pickup at 123 Main St"),
        acknowledge_redaction=True,
    )
    print(f"stored body after acknowledgment: {stored.body!r}")
