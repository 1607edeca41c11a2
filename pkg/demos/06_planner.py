"""Planner what-ifs: projected earnings for planned (weekday, hour) slots.

Run: python demos/06_planner.py
"""

import tempfile
from datetime import date, timedelta
from pathlib import Path

from gigcollective.model import Platform, Role
from gigcollective.service import CollectiveService
from gigcollective.storage import Store

WEEKDAYS = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"]

with tempfile.TemporaryDirectory() as tmp:
    service = CollectiveService(Store(Path(tmp) / "demo.db"))
    ada = service.create_profile("ada", Role.WORKER, [Platform.UBER])

    # four weeks of history: strong Friday evenings, quiet Monday mornings
    for week in range(4):
        monday = date(2024, 5, 6) + timedelta(weeks=week)
        service.add_income(ada.worker_id, Platform.UBER, {
            "work_date": monday.isoformat(), "duration_minutes": 120, "work_type": "trip",
            "income_amount": "30.00", "start_time": "09:00:00",
        })
        friday = monday + timedelta(days=4)
        service.add_income(ada.worker_id, Platform.UBER, {
            "work_date": friday.isoformat(), "duration_minutes": 180, "work_type": "trip",
            "income_amount": "96.00", "start_time": "18:00:00",
        })

    plan = [(0, 9), (0, 10), (4, 18), (4, 19), (4, 20), (2, 14)]
    projection = service.project_earnings(ada.worker_id, plan, today=date(2024, 6, 3))
    print(f"confidence: {projection.confidence}")
    for (weekday, hour), expected in sorted(projection.per_slot.items()):
        print(f"  {WEEKDAYS[weekday]} {hour:02d}:00  ${expected}")
    print(f"total expected: ${projection.total_expected}")
