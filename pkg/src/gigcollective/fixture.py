"""Deterministic field-study fixture.

Sixteen worker accounts were enrolled (nine drivers, five petsitters, two
freelancers); two drivers dropped out after onboarding, leaving fourteen
contributors. The dropouts never uploaded ledger data, but each left one
like on a driver story, which is why the cross-platform like matrix sums
to 44 while per-contributor usage statistics total 42.

Everything is generated from literal tables with a counting id factory
and a fixed-step clock, so two seeds into fresh stores produce
byte-identical exports.
"""

from __future__ import annotations

from datetime import date, datetime, timedelta, timezone
from decimal import Decimal

from .ingestion import TripRecord, serialize_trips_csv
from .model import (
    AgeBand,
    Audience,
    Demographics,
    Education,
    Ethnicity,
    Gender,
    IncomeBand,
    Platform,
    Role,
    StoryDraft,
    StoryType,
    Tag,
    TenureBand,
    WorkStatus,
)
from .service import CollectiveService, ServiceError
from .storage import Store

FIXTURE_NAME = "field-study"

STUDY_MONDAY = date(2024, 6, 3)
SEED_EPOCH = datetime(2024, 6, 3, 8, 0, 0, tzinfo=timezone.utc)


class SeedClock:
    """Fixed-origin clock advancing a constant step per call."""

    def __init__(self, start: datetime = SEED_EPOCH, step_seconds: int = 13):
        self._t = start
        self._step = timedelta(seconds=step_seconds)

    def __call__(self) -> datetime:
        self._t += self._step
        return self._t


class SeedIds:
    def __init__(self, prefix: str = "f"):
        self._n = 0
        self.prefix = prefix

    def __call__(self) -> str:
        self._n += 1
        return f"{self.prefix}{self._n:06d}"


def _demo(age, gender, eth, tenure, edu, income, status) -> Demographics:
    return Demographics(
        age_band=age,
        gender=gender,
        ethnicity=eth,
        tenure_band=tenure,
        education=edu,
        household_income_band=income,
        work_status=status,
    )


A, G, E, T, D, I, W = AgeBand, Gender, Ethnicity, TenureBand, Education, IncomeBand, WorkStatus

# (username, platform, demographics, rating, dropped_out)
PARTICIPANTS = [
    ("driver1", Platform.UBER, _demo(A.AGE_45_54, G.MALE, E.WHITE, T.TWO_TO_FIVE_YEARS, D.HIGH_SCHOOL, I.K25_50, W.FULL_TIME), "4.92", False),
    ("driver2", Platform.UBER, _demo(A.AGE_45_54, G.MALE, E.WHITE, T.HALF_TO_ONE_YEAR, D.BACHELORS, I.OVER_150K, W.PART_TIME), "4.85", False),
    ("driver3", Platform.UBER, _demo(A.AGE_45_54, G.MALE, E.WHITE, T.ONE_TO_TWO_YEARS, D.SOME_COLLEGE, I.K50_75, W.PART_TIME), "4.78", False),
    ("driver4", Platform.UBER, _demo(A.AGE_45_54, G.MALE, E.WHITE, T.OVER_FIVE_YEARS, D.SOME_COLLEGE, I.K25_50, W.FULL_TIME), "4.88", True),
    ("driver5", Platform.UBER, _demo(A.AGE_35_44, G.MALE, E.ASIAN, T.TWO_TO_FIVE_YEARS, D.PROFESSIONAL, I.OVER_150K, W.PART_TIME), "4.90", True),
    ("driver6", Platform.UBER, _demo(A.AGE_45_54, G.MALE, E.ASIAN, T.OVER_TEN_YEARS, D.SOME_COLLEGE, I.K25_50, W.PART_TIME), "4.95", False),
    ("driver7", Platform.UBER, _demo(A.AGE_25_34, G.MALE, E.HISPANIC_LATINO, T.TWO_TO_FIVE_YEARS, D.BACHELORS, I.K50_75, W.PART_TIME), "4.81", False),
    ("driver8", Platform.UBER, _demo(A.AGE_35_44, G.MALE, E.ASIAN, T.OVER_FIVE_YEARS, D.HIGH_SCHOOL, I.K25_50, W.FULL_TIME), "4.74", False),
    ("driver9", Platform.UBER, _demo(A.AGE_35_44, G.MALE, E.WHITE, T.OVER_FIVE_YEARS, D.BACHELORS, I.K75_100, W.PART_TIME), "4.97", False),
    ("petsitter1", Platform.ROVER, _demo(A.AGE_35_44, G.FEMALE, E.WHITE, T.OVER_FIVE_YEARS, D.SOME_COLLEGE, I.UNDER_25K, W.PART_TIME), "4.90", False),
    ("petsitter2", Platform.ROVER, _demo(A.AGE_18_24, G.FEMALE, E.WHITE, T.HALF_TO_ONE_YEAR, D.HIGH_SCHOOL, I.UNDER_25K, W.PART_TIME), "5.00", False),
    ("petsitter3", Platform.ROVER, _demo(A.AGE_25_34, G.FEMALE, E.WHITE, T.TWO_TO_FIVE_YEARS, D.HIGH_SCHOOL, I.UNDER_25K, W.FULL_TIME), "4.85", False),
    ("petsitter4", Platform.ROVER, _demo(A.AGE_35_44, G.FEMALE, E.WHITE, T.OVER_TEN_YEARS, D.BACHELORS, I.K100_150, W.PART_TIME), "4.95", False),
    ("petsitter5", Platform.ROVER, _demo(A.AGE_25_34, G.MALE, E.WHITE, T.HALF_TO_ONE_YEAR, D.MASTERS, I.K100_150, W.PART_TIME), "4.70", False),
    ("freelancer1", Platform.UPWORK, _demo(A.AGE_45_54, G.FEMALE, E.WHITE, T.UNDER_HALF_YEAR, D.ASSOCIATES, I.K25_50, W.PART_TIME), None, False),
    ("freelancer2", Platform.UPWORK, _demo(A.AGE_25_34, G.FEMALE, E.WHITE, T.OVER_FIVE_YEARS, D.PROFESSIONAL, I.K100_150, W.PART_TIME), None, False),
]

_ALL = Audience(workers=True, policymakers=True, advocates=True)
_WORKERS = Audience(workers=True)
_POLICY = Audience(policymakers=True)
_W_P = Audience(workers=True, policymakers=True)

# (key, author, type, audience, tags, title, total_words)
STORIES = [
    ("S1", "driver1", StoryType.STRATEGY, _ALL, (Tag.SAFETY,), "Confirm the rider before they get in", 520),
    ("S2", "driver1", StoryType.STRATEGY, _WORKERS, (Tag.FAIR_PAY,), "Small claims court works for withheld fees", 430),
    ("S3", "driver1", StoryType.STRATEGY, _ALL, (Tag.SAFETY, Tag.TECHNOLOGY), "Dashcam habits that saved me twice", 310),
    ("S4", "driver1", StoryType.ISSUE, _ALL, (Tag.SAFETY,), "Trespassing passenger would not leave", 150),
    ("S5", "driver1", StoryType.ISSUE, _ALL, (Tag.STRESS, Tag.SAFETY), "Night shifts are wearing me down", 83),
    ("S6", "driver2", StoryType.STRATEGY, _ALL, (Tag.TECHNOLOGY,), "Reservation queue tricks for steady mornings", 120),
    ("S7", "driver2", StoryType.STRATEGY, _W_P, (Tag.FAIR_PAY,), "Tracking upfront fare against payout", 90),
    ("S8", "driver2", StoryType.STRATEGY, _ALL, (Tag.TECHNOLOGY,), "Airport staging lot timing", 70),
    ("S9", "driver2", StoryType.ISSUE, _ALL, (Tag.SAFETY, Tag.CARE_GIVING), "Stressful ride taking an elderly man to the ER", 50),
    ("S10", "driver3", StoryType.STRATEGY, _ALL, (Tag.FAIR_PAY,), "Quest math before you chase the bonus", 80),
    ("S11", "driver3", StoryType.STRATEGY, _WORKERS, (Tag.FAIR_PAY,), "Which zones actually pay on weekends", 60),
    ("S12", "driver3", StoryType.ISSUE, _ALL, (Tag.DISCRIMINATION,), "Deactivated review took weeks while rent was due", 40),
    ("S13", "driver6", StoryType.STRATEGY, _ALL, (Tag.FAIR_PAY,), "Keep a notebook of every adjustment", 116),
    ("S14", "driver7", StoryType.ISSUE, _ALL, (Tag.OTHER,), "Unpaid time between pings is the real wage story", 100),
    ("S15", "driver8", StoryType.STRATEGY, _ALL, (Tag.RATINGS,), "Water bottles and a clean car beat gimmicks", 80),
    ("T1", "petsitter1", StoryType.STRATEGY, _ALL, (Tag.SAFETY, Tag.CARE_GIVING), "Managing three dogs on one walk safely", 140),
    ("T2", "petsitter1", StoryType.STRATEGY, _WORKERS, (Tag.CARE_GIVING, Tag.WORK_TIME), "Log the extra half hour every house sit takes", 110),
    ("T3", "petsitter1", StoryType.STRATEGY, _ALL, (Tag.SAFETY, Tag.RATINGS), "Meet and greet checklist before accepting", 90),
    ("T4", "petsitter1", StoryType.STRATEGY, _ALL, (Tag.CARE_GIVING, Tag.STRESS), "Separation anxiety routines that work", 56),
    ("T5", "petsitter1", StoryType.ISSUE, _ALL, (Tag.STRESS,), "Back to back bookings with no buffer", 40),
    ("T6", "petsitter2", StoryType.STRATEGY, _POLICY, (Tag.WORK_TIME, Tag.SAFETY), "What overnight stays really involve", 110),
    ("T7", "petsitter2", StoryType.STRATEGY, _ALL, (Tag.SAFETY, Tag.TECHNOLOGY), "Repeat clients come from the first photo update", 80),
    ("T8", "petsitter2", StoryType.ISSUE, _ALL, (Tag.ALGORITHMS, Tag.STRESS), "Search rank dropped after I declined one booking", 60),
    ("T9", "petsitter4", StoryType.STRATEGY, _ALL, (Tag.RATINGS, Tag.CARE_GIVING), "Write the review you want to receive", 90),
    ("T10", "petsitter4", StoryType.STRATEGY, _ALL, (Tag.SAFETY, Tag.OTHER), "Record unpaid tasks clients ask for", 60),
    ("T11", "petsitter5", StoryType.ISSUE, _ALL, (Tag.FAIR_PAY,), "Double charged service fee on a boarding", 60),
    ("U1", "freelancer1", StoryType.ISSUE, _ALL, (Tag.OTHER,), "Client asked for work outside the contract", 40),
]

# liker -> story keys (order is the like sequence; no self-likes; the
# policymakers-only story T6 is invisible to other workers, so unliked)
LIKES = [
    ("driver1", ("S6", "S7", "S8", "S9", "S10", "S15", "T1", "T3", "T7", "T9", "T10")),
    ("driver2", ("S1", "S10", "T4")),
    ("driver3", ("S4", "T5", "T8")),
    ("driver6", ("S1", "T2")),
    ("driver7", ("S6",)),
    ("driver8", ("T11",)),
    ("petsitter1", ("S1", "S4", "S6", "T7", "T8")),
    ("petsitter2", ("S1", "S5", "T1", "T2", "T9")),
    ("petsitter3", ("S2", "S6", "T3", "T4")),
    ("petsitter4", ("S3", "S7", "T5")),
    ("petsitter5", ("S12", "T10", "T1")),
    ("freelancer1", ("S9",)),
    ("driver4", ("S13",)),
    ("driver5", ("S14",)),
]

# contributor -> total income uploads (driver2's 41 = 6 manual + 35 CSV trips)
INCOME_COUNTS = {
    "driver1": 13,
    "driver2": 6,
    "driver3": 10,
    "driver6": 9,
    "driver7": 8,
    "driver8": 7,
    "driver9": 7,
    "petsitter1": 6,
    "petsitter2": 5,
    "petsitter3": 4,
    "petsitter4": 3,
    "petsitter5": 2,
    "freelancer1": 3,
    "freelancer2": 2,
}
CSV_TRIP_COUNT = 35

EXPENSE_COUNTS = {
    "driver1": 2,
    "driver2": 1,
    "driver3": 7,
    "driver6": 1,
    "petsitter1": 4,
    "petsitter2": 2,
    "petsitter3": 1,
    "petsitter4": 1,
    "petsitter5": 1,
}

TRENDS_VISITS = {
    "driver1": 5,
    "driver2": 9,
    "driver3": 5,
    "driver6": 4,
    "driver7": 3,
    "driver8": 2,
    "driver9": 1,
    "petsitter1": 7,
    "petsitter2": 5,
    "petsitter3": 8,
    "petsitter4": 4,
    "petsitter5": 3,
    "freelancer1": 6,
    "freelancer2": 1,
}

_WORD_BANK = (
    "the shift started slow but picked up after lunch and the app kept "
    "sending pings from across town so I stuck to my usual loop noted the "
    "times and compared against last week which made the pattern obvious "
    "once it was all written down in one place"
).split()


def _prose(words: int, salt: int) -> str:
    """Deterministic filler text with an exact whitespace-token count."""
    if words <= 0:
        return ""
    out = [_WORD_BANK[(salt + i) % len(_WORD_BANK)] for i in range(words)]
    return " ".join(out)


ROVER_WORK_TYPES = ("walk", "drop_in", "house_sit", "boarding", "daycare")
UPWORK_WORK_TYPES = ("hourly", "fixed_price")


def _manual_income_draft(platform: Platform, idx: int) -> dict:
    """Literal-arithmetic entry fields; varied but fully deterministic."""
    day = STUDY_MONDAY + timedelta(days=idx % 7)
    draft: dict = {"work_date": day.isoformat()}
    if platform is Platform.UBER:
        duration = 25 + (idx * 7) % 40
        fare = Decimal(850 + (idx * 313) % 2400) / 100
        tip = Decimal((idx * 157) % 450) / 100 if idx % 3 else None
        draft.update(
            {
                "duration_minutes": duration,
                "work_type": "trip",
                "income_amount": str(fare + (tip or 0)),
                "tips": str(tip) if tip is not None else None,
                "platform_fee": str(Decimal(200 + (idx * 91) % 400) / 100),
                "surge_amount": str(Decimal((idx * 73) % 300) / 100) if idx % 4 == 0 else None,
                "distance_miles": str(Decimal(30 + (idx * 17) % 120) / 10),
                "start_time": f"{8 + (idx * 3) % 12:02d}:{(idx * 11) % 60:02d}:00",
                "unpaid_minutes": (idx * 5) % 25 if idx % 2 else None,
            }
        )
    elif platform is Platform.ROVER:
        duration = 30 + (idx * 13) % 90
        draft.update(
            {
                "duration_minutes": duration,
                "work_type": ROVER_WORK_TYPES[idx % len(ROVER_WORK_TYPES)],
                "income_amount": str(Decimal(1500 + (idx * 411) % 4200) / 100),
                "travel_minutes": (idx * 7) % 30 if idx % 2 else None,
                "start_time": f"{7 + (idx * 5) % 11:02d}:{(idx * 23) % 60:02d}:00",
            }
        )
    else:
        duration = 60 + (idx * 29) % 180
        draft.update(
            {
                "duration_minutes": duration,
                "work_type": UPWORK_WORK_TYPES[idx % len(UPWORK_WORK_TYPES)],
                "income_amount": str(Decimal(3500 + (idx * 887) % 9000) / 100),
                "experience_level": ("intermediate", "expert")[idx % 2],
            }
        )
    return draft


def _expense_draft(platform: Platform, idx: int) -> dict:
    day = STUDY_MONDAY + timedelta(days=idx % 7)
    if platform is Platform.UBER:
        kind, amount = "fuel", Decimal(2800 + (idx * 517) % 2500) / 100
    elif platform is Platform.ROVER:
        kind, amount = "supplies", Decimal(900 + (idx * 331) % 1800) / 100
    else:
        kind, amount = "equipment", Decimal(4000 + (idx * 701) % 3000) / 100
    return {
        "expense_date": day.isoformat(),
        "amount": str(amount),
        "expense_type": kind,
        "platform": platform.value,
        "description": f"{kind} purchase {idx + 1}",
    }


def driver2_trips() -> list[TripRecord]:
    """Thirty-five historical trips for the CSV-upload participant."""
    trips = []
    for i in range(CSV_TRIP_COUNT):
        begin = datetime(2024, 4, 15, 7, 0, tzinfo=timezone.utc) + timedelta(days=i % 28, minutes=(i * 37) % 600)
        duration_min = 18 + (i * 11) % 50
        fare = Decimal(900 + (i * 239) % 2600) / 100
        tip = Decimal((i * 183) % 500) / 100 if i % 3 else Decimal("0.00")
        trips.append(
            TripRecord(
                trip_id=f"T-{1001 + i}",
                request_time=begin - timedelta(minutes=4),
                begin_time=begin,
                end_time=begin + timedelta(minutes=duration_min),
                distance_miles=Decimal(25 + (i * 19) % 130) / 10,
                fare_total=fare,
                service_fee=(fare * Decimal("0.25")).quantize(Decimal("0.01")),
                surge_amount=Decimal((i * 67) % 250) / 100 if i % 5 == 0 else Decimal("0.00"),
                tip_amount=tip,
                city="Pittsburgh" if i % 2 else "Monroeville",
            )
        )
    return trips


def driver2_trips_csv() -> bytes:
    return serialize_trips_csv(driver2_trips())


def seed_field_study(store: Store) -> CollectiveService:
    """Populate an empty store with the study fixture; NON_EMPTY_DB otherwise."""
    for kind in ("profile", "story", "income", "expense"):
        if store.count(kind):
            raise ServiceError("NON_EMPTY_DB", "seed requires an empty database", status=409)

    service = CollectiveService(store, clock=SeedClock(), id_factory=SeedIds())

    profiles = {}
    for username, platform, demographics, rating, _dropped in PARTICIPANTS:
        profiles[username] = service.create_profile(
            username,
            Role.WORKER,
            [platform],
            demographics,
            rating_snapshot=Decimal(rating) if rating else None,
            worker_id=f"w-{username}",
        )

    platform_of = {username: platform for username, platform, *_ in PARTICIPANTS}

    for username, count in INCOME_COUNTS.items():
        platform = platform_of[username]
        for i in range(count):
            salt = i + len(username) * 11
            service.add_income(profiles[username].worker_id, platform, _manual_income_draft(platform, salt))
    report = service.import_trips_csv(profiles["driver2"].worker_id, driver2_trips_csv())
    assert report.accepted == CSV_TRIP_COUNT and not report.rejected

    for username, count in EXPENSE_COUNTS.items():
        platform = platform_of[username]
        for i in range(count):
            service.add_expense(profiles[username].worker_id, _expense_draft(platform, i + len(username)))

    story_ids = {}
    for key, author, story_type, audience, tags, title, total_words in STORIES:
        body_words = total_words - len(title.split())
        draft = StoryDraft(
            author_id=profiles[author].worker_id,
            story_type=story_type,
            tags=frozenset(tags),
            title=title,
            body=_prose(body_words, salt=sum(map(ord, key))),
            audience=audience,
        )
        story = service.post_story(profiles[author].worker_id, draft)
        story_ids[key] = story.story_id

    for username, keys in LIKES:
        viewer = service.viewer(profiles[username].worker_id)
        for key in keys:
            service.like_story(viewer, story_ids[key])

    for username, visits in TRENDS_VISITS.items():
        for _ in range(visits):
            service.record_trends_visit(profiles[username].worker_id)

    return service
