"""A worker's week: manual income/expense entries, then the trends report.

Run: python demos/01_ledger_and_trends.py
"""

import tempfile
from datetime import date
from pathlib import Path

from gigcollective.model import Platform, Role
from gigcollective.service import CollectiveService
from gigcollective.storage import Store

with tempfile.TemporaryDirectory() as tmp:
    service = CollectiveService(Store(Path(tmp) / "demo.db"))
    ada = service.create_profile("ada", Role.WORKER, [Platform.ROVER])

    for day, minutes, kind, amount, travel in [
        ("2024-06-03", 45, "walk", "22.00", 10),
        ("2024-06-04", 300, "house_sit", "85.00", 25),
        ("2024-06-06", 30, "drop_in", "18.50", None),
        ("2024-06-08", 60, "walk", "24.00", 15),
    ]:
        service.add_income(
            ada.worker_id,
            Platform.ROVER,
            {
                "work_date": day,
                "duration_minutes": minutes,
                "work_type": kind,
                "income_amount": amount,
                "travel_minutes": travel,
            },
        )
    service.add_expense(ada.worker_id, {"expense_date": "2024-06-05", "amount": "14.75", "expense_type": "supplies"})

    report = service.personal_trends(ada.worker_id, date(2024, 6, 3), date(2024, 6, 9))
    print(f"income  {report.total_income}   expenses {report.total_expenses}   net {report.net_earnings}")
    print(f"hours   {report.hours_worked}   hourly rate {report.hourly_rate}")
    print("by day:")
    for day, amount in report.daily_by_month.items():
        print(f"  {day}  {amount}")
