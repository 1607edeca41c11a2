import json
from datetime import date

import pytest

from gigcollective import admin, taxes
from gigcollective.cli import main
from gigcollective.fixture import seed_field_study
from gigcollective.service import ServiceError
from gigcollective.storage import Store


@pytest.fixture
def seeded(tmp_path):
    store = Store(tmp_path / "seeded.db")
    service = seed_field_study(store)
    return service


class TestSeed:
    def test_seed_twice_rejected(self, seeded):
        with pytest.raises(ServiceError) as exc:
            seed_field_study(seeded.store)
        assert exc.value.code == "NON_EMPTY_DB"

    def test_seed_deterministic_byte_identical_exports(self, tmp_path):
        digests = []
        for run in ("one", "two"):
            store = Store(tmp_path / f"{run}.db")
            service = seed_field_study(store)
            out = tmp_path / f"bundle-{run}"
            admin.export_bundle(service, "policymakers", out)
            digests.append(
                (
                    (out / "stories.ndjson").read_bytes(),
                    (out / "insights.ndjson").read_bytes(),
                    (out / "manifest.json").read_bytes(),
                )
            )
        assert digests[0] == digests[1]


class TestExport:
    def test_policymaker_bundle_contents(self, seeded, tmp_path):
        summary = admin.export_bundle(seeded, "policymakers", tmp_path / "b")
        assert summary.stories == 23
        lines = [json.loads(l) for l in (tmp_path / "b" / "stories.ndjson").read_text().splitlines()]
        assert all(set(line["audience"]) >= {"workers", "policymakers"} for line in lines)
        manifest = json.loads((tmp_path / "b" / "manifest.json").read_text())
        assert manifest["counts"]["stories"] == 23
        assert manifest["digests"]["stories.ndjson"].startswith("sha256:")

    def test_no_ledger_fields_in_bundle(self, seeded, tmp_path):
        admin.export_bundle(seeded, "policymakers", tmp_path / "b")
        raw = (tmp_path / "b" / "stories.ndjson").read_text() + (tmp_path / "b" / "insights.ndjson").read_text()
        for forbidden in ("income_amount", "dedupe_key", "worker_id", "author_id", "username"):
            assert forbidden not in raw

    def test_workers_bundle_excludes_policymaker_only(self, seeded, tmp_path):
        summary = admin.export_bundle(seeded, "workers", tmp_path / "w")
        assert summary.stories == 26

    def test_export_matches_brute_force_filter(self, seeded, tmp_path):
        dataset = seeded.dataset()
        for audience in ("workers", "policymakers", "advocates"):
            summary = admin.export_bundle(seeded, audience, tmp_path / audience)
            brute = [s for s in dataset.stories if admin.story_in_export(s, audience)]
            lines = (tmp_path / audience / "stories.ndjson").read_text().splitlines()
            assert summary.stories == len(brute) == len(lines)

    def test_empty_db_gives_empty_bundle_warning(self, tmp_path):
        from gigcollective.service import CollectiveService

        store = Store(tmp_path / "empty.db")
        service = CollectiveService(store)
        summary = admin.export_bundle(service, "policymakers", tmp_path / "e")
        assert summary.empty and summary.stories == 0

    def test_insight_tables_cover_every_dimension_breakdown(self, seeded, tmp_path):
        admin.export_bundle(seeded, "policymakers", tmp_path / "b")
        lines = [json.loads(l) for l in (tmp_path / "b" / "insights.ndjson").read_text().splitlines()]
        assert len(lines) == 24  # 3 dimensions x 8 breakdowns
        platform_table = next(
            l for l in lines if l["dimension"] == "hourly_income_rate" and l["breakdown_attribute"] == "platform"
        )
        cells = {c["cohort_key"]: c for c in platform_table["cells"]}
        assert cells["uber"]["count"] == 7 and cells["rover"]["count"] == 5
        assert cells["upwork"] == {"cohort_key": "upwork", "suppressed": True}


class TestCli:
    def test_invite_prints_tokens(self, tmp_path, capsys):
        rc = main(["--db", str(tmp_path / "c.db"), "invite", "--role", "worker", "--platform", "rover", "--count", "3"])
        assert rc == 0
        out = capsys.readouterr().out.strip().splitlines()
        assert len(out) == 3 and len(set(out)) == 3

    def test_invite_platform_rejected_for_policymaker(self, tmp_path, capsys):
        rc = main(["--db", str(tmp_path / "c.db"), "invite", "--role", "policymaker", "--platform", "uber"])
        assert rc == 2
        assert "PLATFORM_NOT_ALLOWED" in capsys.readouterr().err

    def test_invite_worker_requires_platform(self, tmp_path, capsys):
        rc = main(["--db", str(tmp_path / "c.db"), "invite", "--role", "worker"])
        assert rc == 2
        assert "PLATFORM_REQUIRED_FOR_WORKER" in capsys.readouterr().err

    def test_seed_then_reports(self, tmp_path, capsys):
        db = str(tmp_path / "c.db")
        assert main(["--db", db, "seed", "--fixture", "field-study"]) == 0
        assert main(["--db", db, "usage-report"]) == 0
        out = capsys.readouterr().out
        assert "1.93" in out and "3235" in out
        assert main(["--db", db, "story-statistics"]) == 0
        out = capsys.readouterr().out
        assert "15 / 11 / 1" in out

    def test_seed_twice_fails(self, tmp_path, capsys):
        db = str(tmp_path / "c.db")
        assert main(["--db", db, "seed", "--fixture", "field-study"]) == 0
        assert main(["--db", db, "seed", "--fixture", "field-study"]) == 2
        assert "NON_EMPTY_DB" in capsys.readouterr().err

    def test_export_cli(self, tmp_path, capsys):
        db = str(tmp_path / "c.db")
        main(["--db", db, "seed", "--fixture", "field-study"])
        out_dir = tmp_path / "bundle"
        assert main(["--db", db, "export", "--audience", "policymakers", "--out", str(out_dir)]) == 0
        assert "exported 23 stories" in capsys.readouterr().out
        assert (out_dir / "manifest.json").exists()

    def test_export_empty_warns(self, tmp_path, capsys):
        db = str(tmp_path / "empty.db")
        assert main(["--db", db, "export", "--audience", "workers", "--out", str(tmp_path / "o")]) == 0
        assert "EMPTY_EXPORT" in capsys.readouterr().err


class TestTaxDays:
    def calendar(self, tmp_path):
        path = tmp_path / "cal.txt"
        path.write_text(
            "# quarterly\n2024-01-16 Q4\n2024-04-15 annual\n2024-06-17 Q2\n2024-09-16 Q3\n"
        )
        return path

    def test_next_deadline_after_today(self, tmp_path, capsys):
        rc = main(["tax-days", "--calendar", str(self.calendar(tmp_path)), "--today", "2024-03-01"])
        assert rc == 0
        assert capsys.readouterr().out.startswith("2024-04-15")

    def test_deadline_day_is_inclusive(self, tmp_path, capsys):
        rc = main(["tax-days", "--calendar", str(self.calendar(tmp_path)), "--today", "2024-04-15"])
        assert rc == 0
        assert capsys.readouterr().out.startswith("2024-04-15")

    def test_empty_calendar_errors(self, tmp_path, capsys):
        empty = tmp_path / "empty.txt"
        empty.write_text("# nothing\n")
        rc = main(["tax-days", "--calendar", str(empty)])
        assert rc == 2
        assert "NO_CALENDAR" in capsys.readouterr().err

    def test_packaged_calendar_loads(self):
        calendar = taxes.load_calendar()
        assert taxes.next_tax_day(calendar, date(2024, 3, 1))[0] == date(2024, 4, 15)

    def test_packaged_resources_validate(self):
        resources = taxes.load_resources()
        assert any(r.platform == "rover" for r in resources)
