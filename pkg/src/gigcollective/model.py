"""Core domain types and validation for worker-entered records.

Everything here is a plain value object: validation functions take a draft
(untrusted field bag) and either return a fully-formed record or raise
:class:`ValidationFailed` carrying *all* violations, never just the first.
Money is handled as exact decimals quantized to cents; floats never enter
the ledger.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from datetime import date, datetime, time
from decimal import Decimal, InvalidOperation
from typing import Iterable, Optional

CENT = Decimal("0.01")


def money(value) -> Decimal:
    """Parse a currency amount into a cent-exact Decimal.

    Accepts str, int, or Decimal. Floats are rejected: they do not survive
    a round trip through a ledger.
    """
    if isinstance(value, float):
        raise ValueError("float currency amounts are not accepted; pass str or Decimal")
    try:
        d = Decimal(value)
    except (InvalidOperation, TypeError) as e:
        raise ValueError(f"not a currency amount: {value!r}") from e
    return d.quantize(CENT)


class Role(str, enum.Enum):
    WORKER = "worker"
    POLICYMAKER = "policymaker"
    ADVOCATE = "advocate"
    ADMIN = "admin"


class Platform(str, enum.Enum):
    UBER = "uber"
    ROVER = "rover"
    UPWORK = "upwork"

    @classmethod
    def parse(cls, value: str) -> "Platform":
        try:
            return cls(value)
        except ValueError:
            raise ValueError(f"unknown platform: {value!r}") from None


class Tag(str, enum.Enum):
    SAFETY = "safety"
    FAIR_PAY = "fair_pay"
    CARE_GIVING = "care_giving"
    STRESS = "stress"
    TECHNOLOGY = "technology"
    OTHER = "other"
    RATINGS = "ratings"
    WORK_TIME = "work_time"
    ALGORITHMS = "algorithms"
    DISCRIMINATION = "discrimination"


class StoryType(str, enum.Enum):
    STRATEGY = "strategy"
    ISSUE = "issue"


class DisplayMode(str, enum.Enum):
    USERNAME = "username"
    ANONYMOUS = "anonymous"


class EntrySource(str, enum.Enum):
    MANUAL = "manual"
    CSV_IMPORT = "csv_import"


class ExpenseType(str, enum.Enum):
    FUEL = "fuel"
    SUPPLIES = "supplies"
    EQUIPMENT = "equipment"
    FEES = "fees"
    OTHER = "other"


class ExperienceLevel(str, enum.Enum):
    ENTRY = "entry"
    INTERMEDIATE = "intermediate"
    EXPERT = "expert"


# Work types are a closed set per platform; the enums are intentionally
# minimal and extended in code, not at runtime.
WORK_TYPES: dict[Platform, frozenset[str]] = {
    Platform.UBER: frozenset({"trip"}),
    Platform.ROVER: frozenset({"walk", "drop_in", "house_sit", "boarding", "daycare"}),
    Platform.UPWORK: frozenset({"fixed_price", "hourly"}),
}

# Optional income fields that only make sense on one platform.
PLATFORM_ONLY_FIELDS: dict[str, Platform] = {
    "surge_amount": Platform.UBER,
    "distance_miles": Platform.UBER,
    "travel_minutes": Platform.ROVER,
    "experience_level": Platform.UPWORK,
}


class AgeBand(str, enum.Enum):
    AGE_18_24 = "18-24"
    AGE_25_34 = "25-34"
    AGE_35_44 = "35-44"
    AGE_45_54 = "45-54"


class Gender(str, enum.Enum):
    MALE = "male"
    FEMALE = "female"


class Ethnicity(str, enum.Enum):
    WHITE = "white"
    ASIAN = "asian"
    HISPANIC_LATINO = "hispanic_latino"


class TenureBand(str, enum.Enum):
    UNDER_HALF_YEAR = "<0.5 years"
    HALF_TO_ONE_YEAR = "0.5-1 year"
    ONE_TO_TWO_YEARS = "1-2 years"
    TWO_TO_FIVE_YEARS = "2-5 years"
    OVER_FIVE_YEARS = ">5 years"
    OVER_TEN_YEARS = ">10 years"


class Education(str, enum.Enum):
    HIGH_SCHOOL = "high_school"
    SOME_COLLEGE = "some_college"
    ASSOCIATES = "associates"
    BACHELORS = "bachelors"
    MASTERS = "masters"
    PROFESSIONAL = "professional_degree"


class IncomeBand(str, enum.Enum):
    UNDER_25K = "<25k"
    K25_50 = "25-50k"
    K50_75 = "50-75k"
    K75_100 = "75-100k"
    K100_150 = "100-150k"
    OVER_150K = ">150k"


class WorkStatus(str, enum.Enum):
    FULL_TIME = "full_time"
    PART_TIME = "part_time"


@dataclass(frozen=True)
class Demographics:
    """Self-reported attributes; every field optional, values closed enums."""

    age_band: Optional[AgeBand] = None
    gender: Optional[Gender] = None
    ethnicity: Optional[Ethnicity] = None
    tenure_band: Optional[TenureBand] = None
    education: Optional[Education] = None
    household_income_band: Optional[IncomeBand] = None
    work_status: Optional[WorkStatus] = None

    # breakdown-attribute name -> field name
    ATTRIBUTES = {
        "age": "age_band",
        "gender": "gender",
        "ethnicity": "ethnicity",
        "household_income": "household_income_band",
        "education": "education",
        "tenure": "tenure_band",
        "work_status": "work_status",
    }

    def attribute(self, name: str) -> Optional[str]:
        field_name = self.ATTRIBUTES.get(name)
        if field_name is None:
            raise ValueError(f"unknown breakdown attribute: {name!r}")
        value = getattr(self, field_name)
        return value.value if value is not None else None


@dataclass(frozen=True)
class Audience:
    """Story visibility flags. All-false means private (author only)."""

    workers: bool = False
    policymakers: bool = False
    advocates: bool = False

    def is_private(self) -> bool:
        return not (self.workers or self.policymakers or self.advocates)

    def allows(self, role: Role) -> bool:
        return {
            Role.WORKER: self.workers,
            Role.POLICYMAKER: self.policymakers,
            Role.ADVOCATE: self.advocates,
        }.get(role, False)

    def category(self) -> str:
        """Canonical label for reporting (e.g. 'workers_only', 'all')."""
        names = [
            name
            for name, on in (
                ("workers", self.workers),
                ("policymakers", self.policymakers),
                ("advocates", self.advocates),
            )
            if on
        ]
        if not names:
            return "private"
        if len(names) == 3:
            return "all"
        return "+".join(names) + ("_only" if len(names) == 1 else "")

    @classmethod
    def from_names(cls, names: Iterable[str]) -> "Audience":
        names = set(names)
        unknown = names - {"workers", "policymakers", "advocates"}
        if unknown:
            raise ValueError(f"unknown audience names: {sorted(unknown)}")
        return cls(
            workers="workers" in names,
            policymakers="policymakers" in names,
            advocates="advocates" in names,
        )

    def to_names(self) -> list[str]:
        return [
            name
            for name, on in (
                ("workers", self.workers),
                ("policymakers", self.policymakers),
                ("advocates", self.advocates),
            )
            if on
        ]


@dataclass(frozen=True)
class WorkerProfile:
    worker_id: str
    username: str
    role: Role
    platforms: frozenset[Platform] = frozenset()
    demographics: Demographics = Demographics()
    created_at: Optional[datetime] = None
    rating_snapshot: Optional[Decimal] = None

    def primary_platform(self) -> Optional[Platform]:
        """Deterministic single platform used to partition per-platform stats."""
        if not self.platforms:
            return None
        return sorted(self.platforms, key=lambda p: p.value)[0]


@dataclass(frozen=True)
class Story:
    story_id: str
    author_id: str
    display_mode: DisplayMode
    story_type: StoryType
    tags: frozenset[Tag]
    title: str
    body: str
    audience: Audience
    created_at: datetime
    media: Optional[str] = None
    evidence: tuple[str, ...] = ()
    evidence_city_opt_in: bool = False
    edit_count: int = 0
    likes: frozenset[str] = frozenset()
    # Pre-redaction text, shown only to the author in manage-data views.
    original_title: Optional[str] = None
    original_body: Optional[str] = None


@dataclass(frozen=True)
class IncomeEntry:
    entry_id: str
    worker_id: str
    platform: Platform
    work_date: date
    duration_minutes: int
    work_type: str
    income_amount: Decimal
    source: EntrySource
    dedupe_key: str
    tips: Optional[Decimal] = None
    platform_fee: Optional[Decimal] = None
    surge_amount: Optional[Decimal] = None
    distance_miles: Optional[Decimal] = None
    travel_minutes: Optional[int] = None
    experience_level: Optional[ExperienceLevel] = None
    unpaid_minutes: Optional[int] = None
    start_time: Optional[time] = None
    city: Optional[str] = None
    notes: Optional[str] = None


@dataclass(frozen=True)
class ExpenseEntry:
    entry_id: str
    worker_id: str
    expense_date: date
    amount: Decimal
    platform: Optional[Platform] = None
    expense_type: Optional[ExpenseType] = None
    description: Optional[str] = None
    photo: Optional[str] = None
    recurring: bool = False


class AuditAction(str, enum.Enum):
    CREATE = "create"
    EDIT = "edit"
    DELETE = "delete"
    LIKE = "like"
    UNLIKE = "unlike"
    SHARE_SCOPE_CHANGE = "share_scope_change"


@dataclass(frozen=True)
class AuditEvent:
    event_id: str
    actor_id: str
    subject_kind: str
    subject_id: str
    action: AuditAction
    at: datetime
    # before/after snapshots of the fields the action changed; empty for
    # deletes (tombstones carry no content).
    diff: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ValidationError:
    code: str
    field: Optional[str] = None
    message: str = ""


class ValidationFailed(Exception):
    """Raised with the complete list of violations for a draft."""

    def __init__(self, errors: list[ValidationError]):
        self.errors = errors
        super().__init__("; ".join(e.code + (f"({e.field})" if e.field else "") for e in errors))

    def codes(self) -> list[str]:
        return [e.code for e in self.errors]


def _blank(text: Optional[str]) -> bool:
    return text is None or not text.strip()


@dataclass(frozen=True)
class StoryDraft:
    author_id: str
    story_type: Optional[StoryType] = None
    tags: frozenset = frozenset()
    title: Optional[str] = None
    body: Optional[str] = None
    display_mode: DisplayMode = DisplayMode.USERNAME
    audience: Audience = Audience()
    media: Optional[str] = None
    evidence: tuple[str, ...] = ()
    evidence_city_opt_in: bool = False


def validate_story(
    draft: StoryDraft,
    *,
    story_id: str,
    created_at: datetime,
    owned_entry_ids: Iterable[str] = (),
) -> Story:
    """Validate a story draft, collecting every violation.

    `owned_entry_ids` is the set of income-entry ids owned by the draft's
    author; any evidence reference outside it is rejected.
    """
    errors: list[ValidationError] = []

    tags: set[Tag] = set()
    for raw in draft.tags:
        if isinstance(raw, Tag):
            tags.add(raw)
            continue
        try:
            tags.add(Tag(raw))
        except ValueError:
            errors.append(ValidationError("UNKNOWN_TAG", "tags", f"unknown tag: {raw!r}"))
    if not draft.tags:
        errors.append(ValidationError("EMPTY_TAGS", "tags", "at least one tag is required"))

    if _blank(draft.title) and _blank(draft.body):
        errors.append(ValidationError("EMPTY_CONTENT", "body", "a title or body is required"))

    if draft.story_type is None:
        errors.append(ValidationError("MISSING_REQUIRED", "story_type", "story type is required"))

    owned = set(owned_entry_ids)
    for entry_id in draft.evidence:
        if entry_id not in owned:
            errors.append(
                ValidationError("EVIDENCE_NOT_OWNED", "evidence", f"entry {entry_id} is not owned by author")
            )

    if errors:
        raise ValidationFailed(errors)

    return Story(
        story_id=story_id,
        author_id=draft.author_id,
        display_mode=draft.display_mode,
        story_type=draft.story_type,
        tags=frozenset(tags),
        title=(draft.title or "").strip(),
        body=(draft.body or "").strip(),
        audience=draft.audience,
        created_at=created_at,
        media=draft.media,
        evidence=tuple(draft.evidence),
        evidence_city_opt_in=draft.evidence_city_opt_in,
    )


_REQUIRED_INCOME_FIELDS = ("work_date", "duration_minutes", "work_type", "income_amount")


def validate_income_entry(
    draft: dict,
    platform: Platform,
    *,
    entry_id: str,
    worker_id: str,
    source: EntrySource = EntrySource.MANUAL,
    dedupe_key: Optional[str] = None,
) -> IncomeEntry:
    """Validate an income draft for one platform.

    The draft is a plain field bag (as received from a form or API call).
    Platform-mismatched optional fields are rejected rather than dropped.
    """
    errors: list[ValidationError] = []

    for name in _REQUIRED_INCOME_FIELDS:
        if draft.get(name) in (None, ""):
            errors.append(ValidationError("MISSING_REQUIRED", name, f"{name} is required"))

    for name, owner in PLATFORM_ONLY_FIELDS.items():
        if draft.get(name) is not None and platform != owner:
            errors.append(
                ValidationError(
                    "FIELD_NOT_ALLOWED_FOR_PLATFORM",
                    name,
                    f"{name} applies to {owner.value} entries only",
                )
            )

    work_date = draft.get("work_date")
    if isinstance(work_date, str):
        try:
            work_date = date.fromisoformat(work_date)
        except ValueError:
            errors.append(ValidationError("MISSING_REQUIRED", "work_date", "not a calendar date"))
            work_date = None

    duration = draft.get("duration_minutes")
    if duration is not None:
        try:
            duration = int(duration)
        except (TypeError, ValueError):
            errors.append(ValidationError("MISSING_REQUIRED", "duration_minutes", "not an integer"))
            duration = None
        else:
            if duration <= 0:
                errors.append(
                    ValidationError("NEGATIVE_AMOUNT", "duration_minutes", "duration must be positive")
                )

    work_type = draft.get("work_type")
    if work_type is not None and work_type not in WORK_TYPES[platform]:
        errors.append(
            ValidationError(
                "UNKNOWN_WORK_TYPE",
                "work_type",
                f"{work_type!r} is not a {platform.value} work type",
            )
        )

    amounts: dict[str, Optional[Decimal]] = {}
    for name in ("income_amount", "tips", "platform_fee", "surge_amount", "distance_miles"):
        raw = draft.get(name)
        if raw is None:
            amounts[name] = None
            continue
        try:
            value = money(raw) if name != "distance_miles" else Decimal(str(raw))
        except (ValueError, InvalidOperation):
            errors.append(ValidationError("NEGATIVE_AMOUNT", name, f"{name} is not a number"))
            amounts[name] = None
            continue
        if value < 0:
            errors.append(ValidationError("NEGATIVE_AMOUNT", name, f"{name} must be >= 0"))
        amounts[name] = value

    income = amounts.get("income_amount")
    tips = amounts.get("tips")
    if income is not None and tips is not None and tips > income:
        errors.append(ValidationError("TIPS_EXCEED_INCOME", "tips", "tips cannot exceed income"))

    ints: dict[str, Optional[int]] = {}
    for name in ("travel_minutes", "unpaid_minutes"):
        raw = draft.get(name)
        if raw is None:
            ints[name] = None
            continue
        try:
            value = int(raw)
        except (TypeError, ValueError):
            errors.append(ValidationError("NEGATIVE_AMOUNT", name, f"{name} is not an integer"))
            ints[name] = None
            continue
        if value < 0:
            errors.append(ValidationError("NEGATIVE_AMOUNT", name, f"{name} must be >= 0"))
        ints[name] = value

    experience = draft.get("experience_level")
    if experience is not None and not isinstance(experience, ExperienceLevel):
        try:
            experience = ExperienceLevel(experience)
        except ValueError:
            errors.append(
                ValidationError("UNKNOWN_WORK_TYPE", "experience_level", f"unknown level: {experience!r}")
            )
            experience = None

    start_time = draft.get("start_time")
    if isinstance(start_time, str):
        try:
            start_time = time.fromisoformat(start_time)
        except ValueError:
            errors.append(ValidationError("MISSING_REQUIRED", "start_time", "not a time of day"))
            start_time = None

    if errors:
        raise ValidationFailed(errors)

    return IncomeEntry(
        entry_id=entry_id,
        worker_id=worker_id,
        platform=platform,
        work_date=work_date,
        duration_minutes=duration,
        work_type=work_type,
        income_amount=income,
        tips=tips,
        platform_fee=amounts.get("platform_fee"),
        surge_amount=amounts.get("surge_amount"),
        distance_miles=amounts.get("distance_miles"),
        travel_minutes=ints.get("travel_minutes"),
        experience_level=experience,
        unpaid_minutes=ints.get("unpaid_minutes"),
        start_time=start_time,
        city=draft.get("city"),
        notes=draft.get("notes"),
        source=source,
        dedupe_key=dedupe_key or entry_id,
    )


def validate_expense_entry(draft: dict, *, entry_id: str, worker_id: str) -> ExpenseEntry:
    """Validate an expense draft: date and positive amount required, rest optional."""
    errors: list[ValidationError] = []

    expense_date = draft.get("expense_date")
    if expense_date in (None, ""):
        errors.append(ValidationError("MISSING_REQUIRED", "expense_date", "date is required"))
    elif isinstance(expense_date, str):
        try:
            expense_date = date.fromisoformat(expense_date)
        except ValueError:
            errors.append(ValidationError("MISSING_REQUIRED", "expense_date", "not a calendar date"))
            expense_date = None

    amount = draft.get("amount")
    if amount in (None, ""):
        errors.append(ValidationError("MISSING_REQUIRED", "amount", "amount is required"))
        amount = None
    else:
        try:
            amount = money(amount)
        except ValueError:
            errors.append(ValidationError("NONPOSITIVE_AMOUNT", "amount", "amount is not a number"))
            amount = None
        else:
            if amount <= 0:
                errors.append(ValidationError("NONPOSITIVE_AMOUNT", "amount", "amount must be > 0"))

    platform = draft.get("platform")
    if isinstance(platform, str):
        try:
            platform = Platform.parse(platform)
        except ValueError:
            errors.append(ValidationError("MISSING_REQUIRED", "platform", "unknown platform"))
            platform = None

    expense_type = draft.get("expense_type")
    if isinstance(expense_type, str):
        try:
            expense_type = ExpenseType(expense_type)
        except ValueError:
            errors.append(ValidationError("MISSING_REQUIRED", "expense_type", "unknown expense type"))
            expense_type = None

    if errors:
        raise ValidationFailed(errors)

    return ExpenseEntry(
        entry_id=entry_id,
        worker_id=worker_id,
        expense_date=expense_date,
        amount=amount,
        platform=platform,
        expense_type=expense_type,
        description=draft.get("description"),
        photo=draft.get("photo"),
        recurring=bool(draft.get("recurring", False)),
    )


def story_word_count(story: Story) -> int:
    """Whitespace-token count over title and body, the unit used in usage stats."""
    return len(story.title.split()) + len(story.body.split())
