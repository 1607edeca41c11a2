"""Tour of the bundled field-study fixture: seed, reports, evidence export.

Run: python demos/05_field_study_tour.py
"""

import tempfile
from pathlib import Path

from gigcollective import admin
from gigcollective.fixture import seed_field_study
from gigcollective.storage import Store

with tempfile.TemporaryDirectory() as tmp:
    service = seed_field_study(Store(Path(tmp) / "demo.db"))
    dataset = service.dataset()

    print(admin.usage_report_text(dataset))
    print()
    print(admin.story_statistics_text(dataset))

    out = Path(tmp) / "bundle"
    summary = admin.export_bundle(service, "policymakers", out)
    print(f"\npolicymaker evidence bundle: {summary.stories} stories, "
          f"{summary.insight_tables} insight tables -> {sorted(p.name for p in out.iterdir())}")
