"""Bulk intake: trip-CSV parsing, normalization, and duplicate suppression.

The canonical trip CSV is UTF-8, RFC-4180, comma-separated, with header:

    trip_id,request_time,begin_time,end_time,distance_miles,fare_total,service_fee,surge_amount,tip_amount,city

Timestamps are ISO-8601 with a mandatory UTC offset. Parsing is
row-isolated: a malformed row lands in the report with its line number
and never aborts the file.
"""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass, field
from datetime import datetime, timezone
from decimal import Decimal, InvalidOperation
from typing import Iterable, Optional

from .model import EntrySource, IncomeEntry, Platform, money

TRIP_COLUMNS = (
    "trip_id",
    "request_time",
    "begin_time",
    "end_time",
    "distance_miles",
    "fare_total",
    "service_fee",
    "surge_amount",
    "tip_amount",
    "city",
)


class CsvFormatError(Exception):
    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


@dataclass(frozen=True)
class TripRecord:
    trip_id: str
    request_time: datetime
    begin_time: datetime
    end_time: datetime
    distance_miles: Decimal
    fare_total: Decimal
    service_fee: Decimal
    surge_amount: Decimal
    tip_amount: Decimal
    city: Optional[str] = None


@dataclass
class ImportReport:
    accepted: int = 0
    duplicates: int = 0
    rejected: list[tuple[int, str]] = field(default_factory=list)
    source_digest: str = ""
    # line number of each accepted row, parallel to the parsed records
    accepted_lines: list[int] = field(default_factory=list)


def _parse_ts(raw: str, field_name: str) -> datetime:
    ts = datetime.fromisoformat(raw.strip())
    if ts.tzinfo is None:
        raise ValueError(f"{field_name} must carry a UTC offset")
    return ts.astimezone(timezone.utc)


def parse_trips_csv(data: bytes, *, strict: bool = True) -> tuple[list[TripRecord], ImportReport]:
    """Parse a trip CSV into records plus a row-accounting report.

    With `strict` (the default) unknown columns are an error; lenient mode
    ignores them. accepted + duplicates + len(rejected) always equals the
    number of data rows.
    """
    digest = "sha256:" + hashlib.sha256(data).hexdigest()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise CsvFormatError("MISSING_HEADER", f"not UTF-8 text: {e}") from None
    if not text.strip():
        raise CsvFormatError("EMPTY_FILE", "the file has no header row")

    reader = csv.DictReader(io.StringIO(text))
    header = reader.fieldnames or []
    missing = [c for c in TRIP_COLUMNS if c not in header]
    if missing:
        raise CsvFormatError("MISSING_HEADER", f"missing columns: {', '.join(missing)}")
    unknown = [c for c in header if c not in TRIP_COLUMNS]
    if unknown and strict:
        raise CsvFormatError("UNKNOWN_COLUMN", f"unexpected columns: {', '.join(unknown)}")

    records: list[TripRecord] = []
    report = ImportReport(source_digest=digest)
    for line_no, row in enumerate(reader, start=2):
        try:
            records.append(_parse_row(row))
            report.accepted_lines.append(line_no)
        except ValueError as e:
            report.rejected.append((line_no, str(e)))
    report.accepted = len(records)
    return records, report


def _parse_row(row: dict) -> TripRecord:
    trip_id = (row.get("trip_id") or "").strip()
    if not trip_id:
        raise ValueError("EMPTY_TRIP_ID: trip_id is required")
    try:
        request_time = _parse_ts(row["request_time"], "request_time")
        begin_time = _parse_ts(row["begin_time"], "begin_time")
        end_time = _parse_ts(row["end_time"], "end_time")
    except (ValueError, KeyError) as e:
        raise ValueError(f"BAD_TIMESTAMP: {e}") from None
    if end_time < begin_time:
        raise ValueError("TIME_ORDER: end_time precedes begin_time")
    amounts = {}
    for name in ("distance_miles", "fare_total", "service_fee", "surge_amount", "tip_amount"):
        raw = (row.get(name) or "").strip()
        try:
            value = Decimal(raw if raw else "0")
        except InvalidOperation:
            raise ValueError(f"BAD_AMOUNT: {name} is not a number") from None
        if value < 0:
            raise ValueError(f"BAD_AMOUNT: {name} is negative")
        amounts[name] = value
    city = (row.get("city") or "").strip() or None
    return TripRecord(
        trip_id=trip_id,
        request_time=request_time,
        begin_time=begin_time,
        end_time=end_time,
        distance_miles=amounts["distance_miles"],
        fare_total=money(str(amounts["fare_total"])),
        service_fee=money(str(amounts["service_fee"])),
        surge_amount=money(str(amounts["surge_amount"])),
        tip_amount=money(str(amounts["tip_amount"])),
        city=city,
    )


def serialize_trips_csv(records: Iterable[TripRecord]) -> bytes:
    """Inverse of parse_trips_csv for round-trip checks and fixtures."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRIP_COLUMNS)
    for r in records:
        writer.writerow(
            [
                r.trip_id,
                r.request_time.isoformat(),
                r.begin_time.isoformat(),
                r.end_time.isoformat(),
                str(r.distance_miles),
                str(r.fare_total),
                str(r.service_fee),
                str(r.surge_amount),
                str(r.tip_amount),
                r.city or "",
            ]
        )
    return buf.getvalue().encode("utf-8")


def trip_dedupe_key(platform: Platform, trip_id: str) -> str:
    """Stable natural key for CSV rows; manual entries never get one."""
    return hashlib.sha256(f"{platform.value}\x00{trip_id}".encode()).hexdigest()


class ZeroDuration(ValueError):
    code = "ZERO_DURATION"


def normalize_trip(trip: TripRecord, *, worker_id: str, entry_id: str) -> IncomeEntry:
    """Convert a trip into an income entry.

    duration rounds to whole minutes, ties away from zero; income is fare
    plus tip; the service fee is recorded separately. Trips whose rounded
    duration is zero are rejected, since entries must have positive time.
    """
    seconds = int((trip.end_time - trip.begin_time).total_seconds())
    duration = (seconds + 30) // 60
    if duration <= 0:
        raise ZeroDuration(f"trip {trip.trip_id}: duration rounds to zero minutes")
    begin_utc = trip.begin_time.astimezone(timezone.utc)
    return IncomeEntry(
        entry_id=entry_id,
        worker_id=worker_id,
        platform=Platform.UBER,
        work_date=begin_utc.date(),
        duration_minutes=duration,
        work_type="trip",
        income_amount=money(str(trip.fare_total + trip.tip_amount)),
        tips=trip.tip_amount,
        platform_fee=trip.service_fee,
        surge_amount=trip.surge_amount,
        distance_miles=trip.distance_miles,
        start_time=begin_utc.time().replace(microsecond=0),
        city=trip.city,
        notes=None,
        source=EntrySource.CSV_IMPORT,
        dedupe_key=trip_dedupe_key(Platform.UBER, trip.trip_id),
    )


class OwnershipMismatch(Exception):
    code = "OWNERSHIP_MISMATCH"
