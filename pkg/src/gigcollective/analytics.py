"""Personal trends, collective insights, earnings projection, usage reports.

All computations run on exact arithmetic: currency as integer cents inside
Fractions, rounded to two decimals only at the reporting edge. Aggregates
over workers weight each worker once, regardless of how many entries they
uploaded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, timedelta
from decimal import ROUND_DOWN, ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .model import ExpenseEntry, IncomeEntry, Platform, Role, Story, WorkerProfile, story_word_count
from .privacy import CohortCell, ReleasedCell, SuppressedCell, round_cents, suppress_cohorts

DIMENSIONS = ("hourly_income_rate", "tipping_rate", "ratings")
BREAKDOWN_ATTRIBUTES = (
    "age",
    "gender",
    "ethnicity",
    "household_income",
    "education",
    "tenure",
    "work_status",
    "platform",
)


class EmptyRange(ValueError):
    code = "EMPTY_RANGE"


class EmptyPlan(ValueError):
    code = "EMPTY_PLAN"


class UnknownDimension(ValueError):
    code = "UNKNOWN_DIMENSION"


class UnknownAttribute(ValueError):
    code = "UNKNOWN_ATTRIBUTE"


def _cents(amount: Decimal) -> int:
    return int((amount * 100).to_integral_value())


def _money_frac(amount: Decimal) -> Fraction:
    return Fraction(_cents(amount), 100)


@dataclass(frozen=True)
class TrendsReport:
    range_start: date
    range_end: date
    total_income: Decimal
    total_expenses: Decimal
    net_earnings: Decimal
    hours_worked: Decimal
    hourly_rate: Decimal
    zero_hours: bool
    daily_by_month: dict[date, Decimal]
    weekly_series: list[tuple[str, Decimal]]
    hourly_profile: list[Decimal]
    paid_time_share: Decimal


def iso_week_label(d: date) -> str:
    year, week, _ = d.isocalendar()
    return f"{year}-W{week:02d}"


def _hour_slices(start_minute: int, duration: int) -> Iterable[tuple[int, int]]:
    """Split [start_minute, start_minute+duration) into (absolute hour, minutes) pieces."""
    cursor = start_minute
    remaining = duration
    while remaining > 0:
        hour = cursor // 60
        in_slot = min(remaining, 60 - (cursor % 60))
        yield hour, in_slot
        cursor += in_slot
        remaining -= in_slot


def personal_trends(
    incomes: Sequence[IncomeEntry],
    expenses: Sequence[ExpenseEntry],
    range_start: date,
    range_end: date,
) -> TrendsReport:
    """Aggregate one worker's ledger over an inclusive date range.

    hourly_rate is income per recorded (paid) hour; dead time only enters
    paid_time_share. The hourly profile averages earnings per hour-of-day
    over entries that carry a start time.
    """
    if range_start > range_end:
        raise EmptyRange(f"{range_start} > {range_end}")

    incomes = [e for e in incomes if range_start <= e.work_date <= range_end]
    expenses = [e for e in expenses if range_start <= e.expense_date <= range_end]

    total_income_c = sum(_cents(e.income_amount) for e in incomes)
    total_expense_c = sum(_cents(e.amount) for e in expenses)
    minutes = sum(e.duration_minutes for e in incomes)
    unpaid = sum(e.unpaid_minutes or 0 for e in incomes)
    has_unpaid = any(e.unpaid_minutes is not None for e in incomes)

    daily: dict[date, int] = {}
    weekly: dict[tuple[int, int], int] = {}
    for e in incomes:
        daily[e.work_date] = daily.get(e.work_date, 0) + _cents(e.income_amount)
        wk = e.work_date.isocalendar()[:2]
        weekly[wk] = weekly.get(wk, 0) + _cents(e.income_amount)

    slot_income: dict[int, Fraction] = {h: Fraction(0) for h in range(24)}
    slot_minutes: dict[int, Fraction] = {h: Fraction(0) for h in range(24)}
    for e in incomes:
        if e.start_time is None:
            continue
        start_minute = e.start_time.hour * 60 + e.start_time.minute
        per_minute = Fraction(_cents(e.income_amount), e.duration_minutes)
        for hour, mins in _hour_slices(start_minute, e.duration_minutes):
            h = hour % 24
            slot_income[h] += per_minute * mins
            slot_minutes[h] += mins
    profile = []
    for h in range(24):
        if slot_minutes[h] > 0:
            rate = slot_income[h] / (slot_minutes[h] / 60) / 100
            profile.append(round_cents(rate))
        else:
            profile.append(Decimal("0.00"))

    zero_hours = minutes == 0
    hourly_rate = Decimal("0.00")
    if not zero_hours:
        hourly_rate = round_cents(Fraction(total_income_c * 60, minutes * 100))
    share = Fraction(1)
    if has_unpaid and (minutes + unpaid) > 0:
        share = Fraction(minutes, minutes + unpaid)

    cents = Decimal("0.01")
    return TrendsReport(
        range_start=range_start,
        range_end=range_end,
        total_income=(Decimal(total_income_c) / 100).quantize(cents),
        total_expenses=(Decimal(total_expense_c) / 100).quantize(cents),
        net_earnings=(Decimal(total_income_c - total_expense_c) / 100).quantize(cents),
        hours_worked=(Decimal(minutes) / 60).quantize(cents),
        hourly_rate=hourly_rate,
        zero_hours=zero_hours,
        daily_by_month={d: (Decimal(c) / 100).quantize(cents) for d, c in sorted(daily.items())},
        weekly_series=[
            (f"{y}-W{w:02d}", (Decimal(c) / 100).quantize(cents)) for (y, w), c in sorted(weekly.items())
        ],
        hourly_profile=profile,
        paid_time_share=Decimal(share.numerator * 10000 // share.denominator) / 10000,
    )


# -- collective insights --------------------------------------------------------


@dataclass(frozen=True)
class InsightTable:
    dimension: str
    breakdown_attribute: str
    k: int
    cells: list[ReleasedCell | SuppressedCell]
    self_marker: Optional[Decimal] = None


def worker_dimension_value(
    profile: WorkerProfile,
    incomes: Sequence[IncomeEntry],
    dimension: str,
) -> Optional[Fraction]:
    """One value per worker; None when the worker has no data for it.

    tipping_rate is tips over non-tip income, as a percentage.
    """
    if dimension == "hourly_income_rate":
        minutes = sum(e.duration_minutes for e in incomes)
        if minutes == 0:
            return None
        income = sum(_money_frac(e.income_amount) for e in incomes)
        return income / Fraction(minutes, 60)
    if dimension == "tipping_rate":
        income = sum(_money_frac(e.income_amount) for e in incomes)
        tips = sum(_money_frac(e.tips) for e in incomes if e.tips is not None)
        base = income - tips
        if base <= 0:
            return None
        return tips / base * 100
    if dimension == "ratings":
        if profile.rating_snapshot is None:
            return None
        return Fraction(profile.rating_snapshot)
    raise UnknownDimension(dimension)


def collective_insight(
    workers: Sequence[tuple[WorkerProfile, Sequence[IncomeEntry]]],
    dimension: str,
    breakdown_attribute: str,
    *,
    k: int,
    viewer_id: Optional[str] = None,
) -> InsightTable:
    """Cohort means over per-worker values, passed through k-suppression.

    The platform breakdown buckets a worker into each platform they work,
    computing the dimension over that platform's entries alone; every
    other attribute uses the worker's full ledger.
    """
    if dimension not in DIMENSIONS:
        raise UnknownDimension(dimension)
    if breakdown_attribute not in BREAKDOWN_ATTRIBUTES:
        raise UnknownAttribute(breakdown_attribute)

    cohorts: dict[str, list[Fraction]] = {}
    self_value: Optional[Fraction] = None

    for profile, incomes in workers:
        if profile.role is not Role.WORKER:
            continue
        if breakdown_attribute == "platform":
            memberships = [
                (p.value, [e for e in incomes if e.platform is p]) for p in sorted(profile.platforms, key=lambda p: p.value)
            ]
        else:
            key = profile.demographics.attribute(breakdown_attribute)
            memberships = [(key, list(incomes))] if key is not None else []
        whole_value = worker_dimension_value(profile, incomes, dimension)
        if viewer_id is not None and profile.worker_id == viewer_id:
            self_value = whole_value
        for key, member_entries in memberships:
            value = (
                worker_dimension_value(profile, member_entries, dimension)
                if breakdown_attribute == "platform"
                else whole_value
            )
            if value is None:
                continue
            cohorts.setdefault(key, []).append(value)

    cells = [
        CohortCell(cohort_key=key, count=len(values), aggregate=sum(values) / len(values))
        for key, values in sorted(cohorts.items())
    ]
    released = suppress_cohorts(cells, k)
    marker = round_cents(self_value) if self_value is not None else None
    return InsightTable(
        dimension=dimension,
        breakdown_attribute=breakdown_attribute,
        k=k,
        cells=released,
        self_marker=marker,
    )


# -- planner --------------------------------------------------------------------


@dataclass(frozen=True)
class PlanInput:
    # (weekday, hour) with Monday=0, hours 0..23
    slots: frozenset[tuple[int, int]]
    lookback_weeks: int = 8


@dataclass(frozen=True)
class Projection:
    total_expected: Decimal
    per_slot: dict[tuple[int, int], Decimal]
    confidence: str  # ok | sparse_history | no_history


def project_earnings(
    incomes: Sequence[IncomeEntry],
    plan: PlanInput,
    *,
    today: date,
) -> Projection:
    """Expected earnings for planned one-hour slots from historical bucket means.

    Buckets are (weekday, hour) filled by entries with start times; slots
    with no bucket history fall back to the worker's overall mean hourly
    rate across the lookback window. total equals the sum of the reported
    per-slot values exactly.
    """
    if not plan.slots:
        raise EmptyPlan("no slots selected")
    for wd, hr in plan.slots:
        if not (0 <= wd <= 6 and 0 <= hr <= 23):
            raise EmptyPlan(f"slot out of range: ({wd}, {hr})")

    window_start = today - timedelta(weeks=plan.lookback_weeks)
    window = [e for e in incomes if window_start <= e.work_date <= today]
    if not window:
        return Projection(
            total_expected=Decimal("0.00"),
            per_slot={slot: Decimal("0.00") for slot in sorted(plan.slots)},
            confidence="no_history",
        )

    bucket_income: dict[tuple[int, int], Fraction] = {}
    bucket_minutes: dict[tuple[int, int], int] = {}
    for e in window:
        if e.start_time is None:
            continue
        start_minute = e.start_time.hour * 60 + e.start_time.minute
        per_minute = Fraction(_cents(e.income_amount), e.duration_minutes)
        for hour, mins in _hour_slices(start_minute, e.duration_minutes):
            weekday = (e.work_date + timedelta(days=hour // 24)).weekday()
            key = (weekday, hour % 24)
            bucket_income[key] = bucket_income.get(key, Fraction(0)) + per_minute * mins
            bucket_minutes[key] = bucket_minutes.get(key, 0) + mins

    total_minutes = sum(e.duration_minutes for e in window)
    overall_rate = Fraction(sum(_cents(e.income_amount) for e in window) * 60, total_minutes * 100)

    per_slot: dict[tuple[int, int], Decimal] = {}
    used_fallback = False
    for slot in sorted(plan.slots):
        if bucket_minutes.get(slot):
            rate = bucket_income[slot] / Fraction(bucket_minutes[slot], 60) / 100
        else:
            rate = overall_rate
            used_fallback = True
        per_slot[slot] = round_cents(rate)

    total = sum(per_slot.values(), Decimal("0.00"))
    return Projection(
        total_expected=total,
        per_slot=per_slot,
        confidence="sparse_history" if used_fallback else "ok",
    )


# -- usage and story statistics ---------------------------------------------------


@dataclass(frozen=True)
class SystemDataset:
    """Snapshot of the records the admin reports run over."""

    profiles: list[WorkerProfile]
    stories: list[Story]
    incomes: list[IncomeEntry]
    expenses: list[ExpenseEntry]
    trends_visits: dict[str, int] = field(default_factory=dict)

    def workers(self) -> list[WorkerProfile]:
        return [p for p in self.profiles if p.role is Role.WORKER]


def contributing_workers(dataset: SystemDataset) -> list[WorkerProfile]:
    """Workers with at least one ledger upload; the population usage stats cover."""
    uploaders = {e.worker_id for e in dataset.incomes} | {e.worker_id for e in dataset.expenses}
    return [p for p in dataset.workers() if p.worker_id in uploaders]


@dataclass(frozen=True)
class MetricStats:
    total: int
    mean: Fraction
    median: Decimal
    max: int
    by_platform: dict[str, int]


@dataclass(frozen=True)
class UsageStats:
    population: int
    metrics: dict[str, MetricStats]

    COLUMNS = (
        "shared_stories",
        "story_words",
        "liked_stories",
        "income_uploads",
        "expense_uploads",
        "trends_visits",
    )


def _median(values: list[int]) -> Decimal:
    ordered = sorted(values)
    n = len(ordered)
    if n == 0:
        return Decimal("0")
    mid = n // 2
    if n % 2 == 1:
        return Decimal(ordered[mid])
    return (Decimal(ordered[mid - 1]) + Decimal(ordered[mid])) / 2


def _metric(per_user: dict[str, int], platform_of: dict[str, Optional[str]]) -> MetricStats:
    values = list(per_user.values())
    total = sum(values)
    by_platform: dict[str, int] = {}
    for worker_id, count in per_user.items():
        key = platform_of.get(worker_id) or "unaffiliated"
        by_platform[key] = by_platform.get(key, 0) + count
    n = len(values)
    return MetricStats(
        total=total,
        mean=Fraction(total, n) if n else Fraction(0),
        median=_median(values),
        max=max(values) if values else 0,
        by_platform=by_platform,
    )


def usage_report(dataset: SystemDataset) -> UsageStats:
    """Descriptive per-user statistics over contributing workers.

    Likes given by accounts outside the population (e.g. workers who never
    uploaded) are visible in story_statistics but not counted here.
    """
    population = contributing_workers(dataset)
    ids = {p.worker_id for p in population}
    platform_of = {p.worker_id: (p.primary_platform().value if p.primary_platform() else None) for p in population}

    per_user: dict[str, dict[str, int]] = {name: {i: 0 for i in ids} for name in UsageStats.COLUMNS}
    for story in dataset.stories:
        if story.author_id in ids:
            per_user["shared_stories"][story.author_id] += 1
            per_user["story_words"][story.author_id] += story_word_count(story)
        for liker in story.likes:
            if liker in ids:
                per_user["liked_stories"][liker] += 1
    for entry in dataset.incomes:
        if entry.worker_id in ids:
            per_user["income_uploads"][entry.worker_id] += 1
    for expense in dataset.expenses:
        if expense.worker_id in ids:
            per_user["expense_uploads"][expense.worker_id] += 1
    for worker_id, visits in dataset.trends_visits.items():
        if worker_id in ids:
            per_user["trends_visits"][worker_id] += visits

    return UsageStats(
        population=len(population),
        metrics={name: _metric(per_user[name], platform_of) for name in UsageStats.COLUMNS},
    )


# Display formats for the published descriptive table: (places, rounding).
_MEAN_FORMATS = {
    "shared_stories": (2, ROUND_HALF_UP),
    "story_words": (0, ROUND_HALF_UP),
    "liked_stories": (0, ROUND_HALF_UP),
    "income_uploads": (2, ROUND_HALF_UP),
    "expense_uploads": (2, ROUND_DOWN),
    "trends_visits": (1, ROUND_HALF_UP),
}


def _fmt_fraction(value: Fraction, places: int, rounding: str) -> str:
    quantum = Decimal(1).scaleb(-places)
    dec = (Decimal(value.numerator) / Decimal(value.denominator)).quantize(quantum, rounding=rounding)
    return str(dec)


def _fmt_median(value: Decimal) -> str:
    return str(int(value)) if value == value.to_integral_value() else str(value.normalize())


def render_descriptive_table(stats: UsageStats) -> dict[str, dict[str, str]]:
    """The four-row summary table (Average/Median/Max/Total) as display strings."""
    rows: dict[str, dict[str, str]] = {"Average": {}, "Median": {}, "Max": {}, "Total": {}}
    for name in UsageStats.COLUMNS:
        m = stats.metrics[name]
        places, rounding = _MEAN_FORMATS[name]
        rows["Average"][name] = _fmt_fraction(m.mean, places, rounding)
        rows["Median"][name] = _fmt_median(m.median)
        rows["Max"][name] = str(m.max)
        rows["Total"][name] = str(m.total)
    return rows


@dataclass(frozen=True)
class StoryStats:
    authored: dict[str, int]
    mean_stories_per_user: dict[str, str]
    likes_matrix: dict[str, dict[str, int]]
    share_to: dict[str, dict[str, int]]
    story_types: dict[str, dict[str, int]]

    AUDIENCE_ROWS = ("workers_only", "policymakers_only", "workers+policymakers", "all")


def story_statistics(dataset: SystemDataset) -> StoryStats:
    """Cross-platform story table: authorship, like matrix, audiences, types.

    The like matrix covers every worker account; the per-user means use the
    contributing population, matching usage_report.
    """
    platform_of: dict[str, Optional[str]] = {
        p.worker_id: (p.primary_platform().value if p.primary_platform() else None)
        for p in dataset.workers()
    }
    platforms = [p.value for p in Platform]

    authored = {p: 0 for p in platforms}
    likes_matrix = {liker: {author: 0 for author in platforms} for liker in platforms}
    share_to: dict[str, dict[str, int]] = {}
    story_types = {t: {p: 0 for p in platforms} for t in ("strategy", "issue")}

    for story in dataset.stories:
        author_platform = platform_of.get(story.author_id)
        if author_platform is None:
            continue
        authored[author_platform] += 1
        story_types[story.story_type.value][author_platform] += 1
        category = story.audience.category()
        share_to.setdefault(category, {p: 0 for p in platforms})
        share_to[category][author_platform] += 1
        for liker in story.likes:
            liker_platform = platform_of.get(liker)
            if liker_platform is not None:
                likes_matrix[liker_platform][author_platform] += 1

    population = contributing_workers(dataset)
    users_per_platform: dict[str, int] = {p: 0 for p in platforms}
    for profile in population:
        primary = profile.primary_platform()
        if primary is not None:
            users_per_platform[primary.value] += 1

    means = {}
    for p in platforms:
        users = users_per_platform[p]
        if users == 0:
            means[p] = "0"
            continue
        dec = (Decimal(authored[p]) / Decimal(users)).quantize(Decimal("0.001"), rounding=ROUND_HALF_UP)
        means[p] = _fmt_median(dec) if dec == dec.to_integral_value() else str(dec.normalize())

    return StoryStats(
        authored=authored,
        mean_stories_per_user=means,
        likes_matrix=likes_matrix,
        share_to=share_to,
        story_types=story_types,
    )


def tag_totals(stories: Iterable[Story]) -> dict[str, int]:
    totals: dict[str, int] = {}
    for story in stories:
        for tag in story.tags:
            totals[tag.value] = totals.get(tag.value, 0) + 1
    return dict(sorted(totals.items(), key=lambda kv: (-kv[1], kv[0])))
