"""Tax-preparation support: resource catalog and filing-deadline calendar.

The calendar is a plain text file operators can edit: one `YYYY-MM-DD
label` line per deadline, `#` comments. The catalog is curation, not
computation; entries are validated on load.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import date
from importlib import resources as importlib_resources
from pathlib import Path
from typing import Optional

AUDIENCES = ("part_time", "full_time", "all")


class TaxDataError(Exception):
    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


@dataclass(frozen=True)
class TaxResource:
    title: str
    audience: str  # part_time | full_time | all
    platform: Optional[str] = None
    url: Optional[str] = None
    body: Optional[str] = None
    tax_day_relevant: bool = False


def _default_path(name: str) -> Path:
    return Path(str(importlib_resources.files("gigcollective").joinpath("data", name)))


def load_resources(path: Optional[str | Path] = None) -> list[TaxResource]:
    path = Path(path) if path else _default_path("tax_resources.json")
    if not path.exists():
        raise TaxDataError("NO_CATALOG", f"no resource catalog at {path}")
    raw = json.loads(path.read_text(encoding="utf-8"))
    out = []
    for i, item in enumerate(raw):
        if not item.get("title"):
            raise TaxDataError("BAD_CATALOG", f"entry {i} has no title")
        if item.get("audience") not in AUDIENCES:
            raise TaxDataError("BAD_CATALOG", f"entry {i} has audience {item.get('audience')!r}")
        if not item.get("url") and not item.get("body"):
            raise TaxDataError("BAD_CATALOG", f"entry {i} needs a url or body")
        out.append(
            TaxResource(
                title=item["title"],
                audience=item["audience"],
                platform=item.get("platform"),
                url=item.get("url"),
                body=item.get("body"),
                tax_day_relevant=bool(item.get("tax_day_relevant", False)),
            )
        )
    return out


def load_calendar(path: Optional[str | Path] = None) -> list[tuple[date, str]]:
    path = Path(path) if path else _default_path("tax_calendar.txt")
    if not path.exists():
        raise TaxDataError("NO_CALENDAR", f"no tax calendar at {path}")
    entries: list[tuple[date, str]] = []
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(None, 1)
        try:
            day = date.fromisoformat(parts[0])
        except ValueError:
            raise TaxDataError("BAD_CALENDAR", f"line {line_no}: {parts[0]!r} is not a date") from None
        entries.append((day, parts[1].strip() if len(parts) > 1 else ""))
    if not entries:
        raise TaxDataError("NO_CALENDAR", f"tax calendar at {path} is empty")
    return sorted(entries)


def next_tax_day(calendar: list[tuple[date, str]], today: date) -> Optional[tuple[date, str]]:
    """Smallest configured deadline on or after today; None when past all."""
    for day, label in calendar:
        if day >= today:
            return (day, label)
    return None
