"""Trip-CSV ingestion: parsing, normalization, and duplicate suppression.

Run: python demos/03_csv_import.py
"""

import tempfile
from pathlib import Path

from gigcollective.fixture import driver2_trips_csv
from gigcollective.model import Platform, Role
from gigcollective.service import CollectiveService
from gigcollective.storage import Store

with tempfile.TemporaryDirectory() as tmp:
    service = CollectiveService(Store(Path(tmp) / "demo.db"))
    driver = service.create_profile("driver", Role.WORKER, [Platform.UBER])

    data = driver2_trips_csv()
    print(f"uploading {len(data.splitlines()) - 1} trips...")
    first = service.import_trips_csv(driver.worker_id, data)
    print(f"first import:  accepted={first.accepted} duplicates={first.duplicates} rejected={len(first.rejected)}")

    second = service.import_trips_csv(driver.worker_id, data)
    print(f"second import: accepted={second.accepted} duplicates={second.duplicates} (idempotent)")

    entries = service.manage_data(driver.worker_id)["incomes"]
    sample = entries[0]
    print(f"\nledger holds {len(entries)} entries; e.g. {sample.work_date} {sample.duration_minutes}min "
          f"${sample.income_amount} (fee ${sample.platform_fee}, source {sample.source.value})")
