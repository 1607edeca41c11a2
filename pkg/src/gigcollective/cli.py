"""Operator CLI: invites, fixture seeding, exports, reports, tax days, serve.

Configuration comes from environment variables:

    G2G_DB_PATH               sqlite file (default ./gigcollective.db)
    G2G_BIND_ADDR             host:port for `serve` (default 127.0.0.1:8800)
    G2G_K_THRESHOLD           cohort suppression threshold (default 5)
    G2G_INVITE_SECRET         bootstrap admin bearer token for the API
    G2G_RETENTION_SWEEP_CRON  "M H * * *" daily sweep time (default 03:00)
"""

from __future__ import annotations

import argparse
import os
import sys
import threading
from datetime import date, datetime, timedelta, timezone

from . import admin, fixture, taxes
from .auth import create_invite
from .model import Platform, Role
from .service import CollectiveService, ServiceError
from .storage import Store

DEFAULT_DB = "gigcollective.db"
DEFAULT_BIND = "127.0.0.1:8800"


def _store(args) -> Store:
    return Store(args.db)


def _service(args) -> CollectiveService:
    return CollectiveService(_store(args), k_threshold=args.k)


def cmd_invite(args) -> int:
    service = _service(args)
    try:
        role = Role(args.role)
    except ValueError:
        print(f"error: unknown role {args.role!r}", file=sys.stderr)
        return 2
    platform = Platform(args.platform) if args.platform else None
    try:
        tokens = [create_invite(service, role, platform) for _ in range(args.count)]
    except ServiceError as e:
        print(f"error: {e.code}: {e}", file=sys.stderr)
        return 2
    for token in tokens:
        print(token)
    return 0


def cmd_seed(args) -> int:
    if args.fixture != fixture.FIXTURE_NAME:
        print(f"error: unknown fixture {args.fixture!r} (available: {fixture.FIXTURE_NAME})", file=sys.stderr)
        return 2
    store = _store(args)
    try:
        fixture.seed_field_study(store)
    except ServiceError as e:
        print(f"error: {e.code}: {e}", file=sys.stderr)
        return 2
    print(f"seeded {args.fixture} into {args.db}")
    return 0


def cmd_export(args) -> int:
    service = _service(args)
    try:
        summary = admin.export_bundle(service, args.audience, args.out)
    except ServiceError as e:
        print(f"error: {e.code}: {e}", file=sys.stderr)
        return 2
    print(
        f"exported {summary.stories} stories and {summary.insight_tables} insight tables "
        f"({summary.released_cells} released cells) to {summary.out_dir}"
    )
    if summary.empty:
        print("warning: EMPTY_EXPORT: the bundle contains no stories and no released cells", file=sys.stderr)
    return 0


def cmd_tax_days(args) -> int:
    try:
        calendar = taxes.load_calendar(args.calendar)
    except taxes.TaxDataError as e:
        print(f"error: {e.code}: {e}", file=sys.stderr)
        return 2
    today = date.fromisoformat(args.today) if args.today else date.today()
    upcoming = taxes.next_tax_day(calendar, today)
    if upcoming is None:
        print(f"no deadline on or after {today} in the calendar", file=sys.stderr)
        return 1
    day, label = upcoming
    print(f"{day.isoformat()}  {label}")
    return 0


def cmd_usage_report(args) -> int:
    service = _service(args)
    print(admin.usage_report_text(service.dataset()))
    return 0


def cmd_story_statistics(args) -> int:
    service = _service(args)
    print(admin.story_statistics_text(service.dataset()))
    return 0


def cmd_sweep(args) -> int:
    store = _store(args)
    removed = store.sweep_expired()
    print(f"swept {len(removed)} expired records")
    return 0


def _parse_sweep_time(cron: str) -> tuple[int, int]:
    """Accepts the daily '<minute> <hour> * * *' form; anything else means 03:00."""
    parts = cron.split()
    if len(parts) == 5 and parts[0].isdigit() and parts[1].isdigit():
        return int(parts[1]) % 24, int(parts[0]) % 60
    return 3, 0


def _start_sweeper(store: Store, cron: str) -> threading.Thread:
    hour, minute = _parse_sweep_time(cron)

    def loop() -> None:
        while True:
            now = datetime.now(timezone.utc)
            target = now.replace(hour=hour, minute=minute, second=0, microsecond=0)
            if target <= now:
                target += timedelta(days=1)
            threading.Event().wait((target - now).total_seconds())
            store.sweep_expired()

    thread = threading.Thread(target=loop, daemon=True, name="retention-sweeper")
    thread.start()
    return thread


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    store = _store(args)
    app = create_app(
        store,
        k_threshold=args.k,
        invite_secret=os.environ.get("G2G_INVITE_SECRET"),
    )
    _start_sweeper(store, os.environ.get("G2G_RETENTION_SWEEP_CRON", "0 3 * * *"))
    host, _, port = args.bind.rpartition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gigctl", description="gig data-collective operator tool")
    parser.add_argument("--db", default=os.environ.get("G2G_DB_PATH", DEFAULT_DB), help="sqlite database path")
    parser.add_argument(
        "--k",
        type=int,
        default=int(os.environ.get("G2G_K_THRESHOLD", "5")),
        help="cohort suppression threshold",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invite", help="mint single-use invite tokens")
    p.add_argument("--role", required=True, choices=[r.value for r in Role])
    p.add_argument("--platform", choices=[pl.value for pl in Platform])
    p.add_argument("--count", type=int, default=1)
    p.set_defaults(fn=cmd_invite)

    p = sub.add_parser("seed", help="populate an empty database with a fixture")
    p.add_argument("--fixture", required=True)
    p.set_defaults(fn=cmd_seed)

    p = sub.add_parser("export", help="write an audience-scoped evidence bundle")
    p.add_argument("--audience", required=True, choices=list(admin.EXPORT_AUDIENCES))
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_export)

    p = sub.add_parser("tax-days", help="next filing deadline from the calendar")
    p.add_argument("--calendar", help="calendar file (defaults to the packaged one)")
    p.add_argument("--today", help="override today's date (YYYY-MM-DD)")
    p.set_defaults(fn=cmd_tax_days)

    p = sub.add_parser("usage-report", help="descriptive per-user statistics")
    p.set_defaults(fn=cmd_usage_report)

    p = sub.add_parser("story-statistics", help="cross-platform story table")
    p.set_defaults(fn=cmd_story_statistics)

    p = sub.add_parser("sweep", help="run the retention sweep once")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--bind", default=os.environ.get("G2G_BIND_ADDR", DEFAULT_BIND))
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
