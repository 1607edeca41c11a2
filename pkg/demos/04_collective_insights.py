"""Cohort suppression: small cohorts stay hidden no matter who asks.

Run: python demos/04_collective_insights.py
"""

import tempfile
from pathlib import Path

from gigcollective.model import Platform, Role
from gigcollective.service import CollectiveService
from gigcollective.storage import Store

with tempfile.TemporaryDirectory() as tmp:
    service = CollectiveService(Store(Path(tmp) / "demo.db"), k_threshold=5)

    # six drivers (released), two freelancers (suppressed at k=5)
    for i, (platform, rate) in enumerate(
        [(Platform.UBER, 20), (Platform.UBER, 22), (Platform.UBER, 19), (Platform.UBER, 25),
         (Platform.UBER, 21), (Platform.UBER, 23), (Platform.UPWORK, 60), (Platform.UPWORK, 75)]
    ):
        p = service.create_profile(f"w{i}", Role.WORKER, [platform])
        service.add_income(
            p.worker_id,
            platform,
            {
                "work_date": "2024-06-03",
                "duration_minutes": 60,
                "work_type": "trip" if platform is Platform.UBER else "hourly",
                "income_amount": f"{rate}.00",
            },
        )

    viewer = service.viewer(service.store.scan("profile")[0].payload["worker_id"])
    table = service.collective_insight(viewer, "hourly_income_rate", "platform")
    print(f"hourly income rate by platform (k={table.k}):")
    for cell in table.cells:
        if getattr(cell, "suppressed", False):
            print(f"  {cell.cohort_key:>8}  suppressed (cohort below k)")
        else:
            print(f"  {cell.cohort_key:>8}  {cell.count} workers, mean ${cell.value}/h")
    print(f"your own rate: ${table.self_marker}/h")
