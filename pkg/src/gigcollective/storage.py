"""Durable record store with audit semantics and snapshot reads.

Backed by a single sqlite file in WAL mode. Writes to one id are
serialized behind a process-wide writer lock; snapshot readers hold their
own connection with an open read transaction, so they observe one
committed state and never block the writer. `synchronous=FULL` keeps
acknowledged writes durable across a hard kill.
"""

from __future__ import annotations

import hashlib
import io
import json
import sqlite3
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterator, Optional

from .model import AuditAction, AuditEvent

KINDS = ("profile", "story", "income", "expense", "invite", "blob", "telemetry")
AUDIT_KIND = "audit"

SCHEMA = """
CREATE TABLE IF NOT EXISTS records (
    kind TEXT NOT NULL,
    id TEXT NOT NULL,
    version INTEGER NOT NULL,
    payload TEXT NOT NULL,
    owner TEXT,
    expires_at TEXT,
    PRIMARY KEY (kind, id)
);
CREATE INDEX IF NOT EXISTS records_owner ON records (kind, owner);
CREATE TABLE IF NOT EXISTS audit (
    seq INTEGER PRIMARY KEY AUTOINCREMENT,
    event_id TEXT NOT NULL UNIQUE,
    actor_id TEXT NOT NULL,
    subject_kind TEXT NOT NULL,
    subject_id TEXT NOT NULL,
    action TEXT NOT NULL,
    at TEXT NOT NULL,
    diff TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS audit_subject ON audit (subject_kind, subject_id, seq);
"""


class StorageError(Exception):
    code = "STORAGE_ERROR"


class VersionConflict(StorageError):
    code = "VERSION_CONFLICT"


class NotFound(StorageError):
    code = "NOT_FOUND"


class ImmutableKind(StorageError):
    code = "IMMUTABLE_KIND"


class AuditOrderViolation(StorageError):
    code = "AUDIT_ORDER"


@dataclass(frozen=True)
class Record:
    kind: str
    id: str
    version: int
    payload: dict
    expires_at: Optional[datetime] = None


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


def _parse_ts(raw: Optional[str]) -> Optional[datetime]:
    return datetime.fromisoformat(raw) if raw else None


class Snapshot:
    """Read handle pinned to one committed state of the store."""

    def __init__(self, conn: sqlite3.Connection):
        self._conn = conn
        # A read statement inside an explicit transaction pins the WAL
        # snapshot until close().
        self._conn.execute("BEGIN")
        self._conn.execute("SELECT count(*) FROM records").fetchone()

    def execute(self, sql: str, params=()) -> sqlite3.Cursor:
        return self._conn.execute(sql, params)

    def close(self) -> None:
        try:
            self._conn.rollback()
        finally:
            self._conn.close()


class Store:
    """Embedded transactional record store.

    `put` on the audit kind is forbidden; audit events go through
    `append_audit` and are never modified or removed.
    """

    def __init__(self, path: str | Path, *, durability: str = "full", clock: Callable[[], datetime] = _utcnow):
        self.path = str(path)
        self._clock = clock
        self._write_lock = threading.RLock()
        self._in_txn = False
        self._conn = sqlite3.connect(self.path, check_same_thread=False)
        self._conn.execute("PRAGMA journal_mode=WAL")
        self._conn.execute(f"PRAGMA synchronous={'FULL' if durability == 'full' else 'NORMAL'}")
        self._conn.executescript(SCHEMA)
        self._conn.commit()
        self.blobs = BlobStore(Path(self.path).with_suffix(Path(self.path).suffix + ".blobs"))

    # -- reads ---------------------------------------------------------------

    def snapshot(self) -> Snapshot:
        conn = sqlite3.connect(self.path, check_same_thread=False)
        return Snapshot(conn)

    @contextmanager
    def reading(self) -> Iterator[Snapshot]:
        snap = self.snapshot()
        try:
            yield snap
        finally:
            snap.close()

    def _live(self, row, now: datetime) -> bool:
        expires = _parse_ts(row[4])
        return expires is None or expires > now

    def get(self, kind: str, id: str, snapshot: Optional[Snapshot] = None) -> Record:
        cur = (snapshot or self._conn).execute(
            "SELECT kind, id, version, payload, expires_at FROM records WHERE kind=? AND id=?",
            (kind, id),
        )
        row = cur.fetchone()
        if row is None or not self._live(row, self._clock()):
            raise NotFound(f"{kind}/{id}")
        return Record(row[0], row[1], row[2], json.loads(row[3]), _parse_ts(row[4]))

    def exists(self, kind: str, id: str) -> bool:
        try:
            self.get(kind, id)
            return True
        except NotFound:
            return False

    def scan(
        self,
        kind: str,
        predicate: Optional[Callable[[dict], bool]] = None,
        snapshot: Optional[Snapshot] = None,
        *,
        owner: Optional[str] = None,
    ) -> list[Record]:
        now = self._clock()
        if owner is None:
            cur = (snapshot or self._conn).execute(
                "SELECT kind, id, version, payload, expires_at FROM records WHERE kind=? ORDER BY id",
                (kind,),
            )
        else:
            cur = (snapshot or self._conn).execute(
                "SELECT kind, id, version, payload, expires_at FROM records WHERE kind=? AND owner=? ORDER BY id",
                (kind, owner),
            )
        out = []
        for row in cur.fetchall():
            if not self._live(row, now):
                continue
            payload = json.loads(row[3])
            if predicate is None or predicate(payload):
                out.append(Record(row[0], row[1], row[2], payload, _parse_ts(row[4])))
        return out

    def count(self, kind: str) -> int:
        return len(self.scan(kind))

    # -- writes --------------------------------------------------------------

    @contextmanager
    def transaction(self) -> Iterator[None]:
        """Group several writes into one atomic commit (e.g. delete + cascade)."""
        with self._write_lock:
            if self._in_txn:
                yield  # nested: join the outer transaction
                return
            self._conn.execute("BEGIN IMMEDIATE")
            self._in_txn = True
            try:
                yield
            except BaseException:
                self._conn.rollback()
                raise
            finally:
                self._in_txn = False
            self._conn.commit()

    def put(
        self,
        kind: str,
        id: str,
        payload: dict,
        expected_version: Optional[int] = None,
        *,
        owner: Optional[str] = None,
        expires_at: Optional[datetime] = None,
    ) -> int:
        """Optimistic write. `expected_version=None` creates; a stale version fails."""
        if kind == AUDIT_KIND:
            raise ImmutableKind("audit records go through append_audit")
        if kind not in KINDS:
            raise StorageError(f"unknown record kind: {kind!r}")
        with self.transaction():
            row = self._conn.execute(
                "SELECT version FROM records WHERE kind=? AND id=?", (kind, id)
            ).fetchone()
            current = row[0] if row else None
            if expected_version is None:
                if current is not None:
                    raise VersionConflict(f"{kind}/{id} already exists at v{current}")
                version = 1
            else:
                if current != expected_version:
                    raise VersionConflict(f"{kind}/{id}: expected v{expected_version}, found v{current}")
                version = expected_version + 1
            self._conn.execute(
                "INSERT OR REPLACE INTO records (kind, id, version, payload, owner, expires_at) VALUES (?,?,?,?,?,?)",
                (
                    kind,
                    id,
                    version,
                    json.dumps(payload, sort_keys=True),
                    owner if owner is not None else (payload.get("worker_id") or payload.get("author_id")),
                    expires_at.isoformat() if expires_at else None,
                ),
            )
        return version

    def delete(self, kind: str, id: str) -> None:
        if kind == AUDIT_KIND:
            raise ImmutableKind("audit records are append-only")
        with self.transaction():
            cur = self._conn.execute("DELETE FROM records WHERE kind=? AND id=?", (kind, id))
            if cur.rowcount == 0:
                raise NotFound(f"{kind}/{id}")

    def set_expiry(self, kind: str, id: str, expires_at: Optional[datetime]) -> None:
        with self.transaction():
            cur = self._conn.execute(
                "UPDATE records SET expires_at=? WHERE kind=? AND id=?",
                (expires_at.isoformat() if expires_at else None, kind, id),
            )
            if cur.rowcount == 0:
                raise NotFound(f"{kind}/{id}")

    # -- audit log -----------------------------------------------------------

    def append_audit(self, event: AuditEvent) -> None:
        with self.transaction():
            last = self._conn.execute(
                "SELECT at FROM audit WHERE subject_kind=? AND subject_id=? ORDER BY seq DESC LIMIT 1",
                (event.subject_kind, event.subject_id),
            ).fetchone()
            if last is not None and event.at < datetime.fromisoformat(last[0]):
                raise AuditOrderViolation(
                    f"audit timestamps must be monotone per subject ({event.subject_kind}/{event.subject_id})"
                )
            self._conn.execute(
                "INSERT INTO audit (event_id, actor_id, subject_kind, subject_id, action, at, diff) "
                "VALUES (?,?,?,?,?,?,?)",
                (
                    event.event_id,
                    event.actor_id,
                    event.subject_kind,
                    event.subject_id,
                    event.action.value,
                    event.at.isoformat(),
                    json.dumps(event.diff, sort_keys=True),
                ),
            )

    def audit_for_subject(self, subject_kind: str, subject_id: str) -> list[AuditEvent]:
        cur = self._conn.execute(
            "SELECT event_id, actor_id, subject_kind, subject_id, action, at, diff FROM audit "
            "WHERE subject_kind=? AND subject_id=? ORDER BY seq",
            (subject_kind, subject_id),
        )
        return [self._audit_row(row) for row in cur.fetchall()]

    def audit_all(self) -> list[AuditEvent]:
        cur = self._conn.execute(
            "SELECT event_id, actor_id, subject_kind, subject_id, action, at, diff FROM audit ORDER BY seq"
        )
        return [self._audit_row(row) for row in cur.fetchall()]

    @staticmethod
    def _audit_row(row) -> AuditEvent:
        return AuditEvent(
            event_id=row[0],
            actor_id=row[1],
            subject_kind=row[2],
            subject_id=row[3],
            action=AuditAction(row[4]),
            at=datetime.fromisoformat(row[5]),
            diff=json.loads(row[6]),
        )

    # -- retention and maintenance -------------------------------------------

    def sweep_expired(self, actor_id: str = "system", id_factory: Optional[Callable[[], str]] = None) -> list[tuple[str, str]]:
        """Hard-delete expired records, leaving contentless delete tombstones."""
        now = self._clock()
        removed: list[tuple[str, str]] = []
        with self.transaction():
            cur = self._conn.execute(
                "SELECT kind, id FROM records WHERE expires_at IS NOT NULL AND expires_at <= ?",
                (now.isoformat(),),
            )
            doomed = cur.fetchall()
            for kind, id in doomed:
                self._conn.execute("DELETE FROM records WHERE kind=? AND id=?", (kind, id))
                removed.append((kind, id))
        for kind, id in removed:
            event_id = id_factory() if id_factory else hashlib.sha256(f"sweep:{kind}:{id}:{now}".encode()).hexdigest()[:32]
            self.append_audit(
                AuditEvent(
                    event_id=event_id,
                    actor_id=actor_id,
                    subject_kind=kind,
                    subject_id=id,
                    action=AuditAction.DELETE,
                    at=self._clock(),
                    diff={},
                )
            )
        return removed

    # -- versioned dump ------------------------------------------------------

    DUMP_SCHEMA_VERSION = 1

    def dump(self, out_dir: str | Path) -> Path:
        """Write all records and audit events as NDJSON plus a manifest."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        records_path = out / "records.ndjson"
        counts: dict[str, int] = {}
        digest = hashlib.sha256()
        with records_path.open("w", encoding="utf-8") as f:
            for kind in KINDS:
                for rec in self.scan(kind):
                    counts[kind] = counts.get(kind, 0) + 1
                    line = json.dumps(
                        {"kind": rec.kind, "id": rec.id, "version": rec.version, "payload": rec.payload},
                        sort_keys=True,
                        separators=(",", ":"),
                    )
                    f.write(line + "\n")
                    digest.update((line + "\n").encode())
            for event in self.audit_all():
                counts[AUDIT_KIND] = counts.get(AUDIT_KIND, 0) + 1
                line = json.dumps(
                    {
                        "kind": AUDIT_KIND,
                        "event_id": event.event_id,
                        "actor_id": event.actor_id,
                        "subject_kind": event.subject_kind,
                        "subject_id": event.subject_id,
                        "action": event.action.value,
                        "at": event.at.isoformat(),
                        "diff": event.diff,
                    },
                    sort_keys=True,
                    separators=(",", ":"),
                )
                f.write(line + "\n")
                digest.update((line + "\n").encode())
        manifest = {
            "schema_version": self.DUMP_SCHEMA_VERSION,
            "record_counts": counts,
            "content_digest": "sha256:" + digest.hexdigest(),
        }
        (out / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8")
        return records_path

    def close(self) -> None:
        self._conn.close()


class BlobStore:
    """Content-addressed blob files kept beside the database.

    Images are re-encoded on ingest so EXIF/GPS metadata never reaches disk.
    """

    def __init__(self, root: Path):
        self.root = root

    def put(self, data: bytes, media_type: str = "application/octet-stream") -> str:
        if media_type.startswith("image/"):
            data = self._strip_image_metadata(data)
        blob_id = hashlib.sha256(data).hexdigest()
        self.root.mkdir(parents=True, exist_ok=True)
        path = self.root / blob_id
        if not path.exists():
            path.write_bytes(data)
        return blob_id

    def get(self, blob_id: str) -> bytes:
        path = self.root / blob_id
        if not path.exists():
            raise NotFound(f"blob/{blob_id}")
        return path.read_bytes()

    def exists(self, blob_id: str) -> bool:
        return (self.root / blob_id).exists()

    @staticmethod
    def _strip_image_metadata(data: bytes) -> bytes:
        from PIL import Image

        with Image.open(io.BytesIO(data)) as img:
            fmt = img.format or "PNG"
            clean = Image.new(img.mode, img.size)
            clean.paste(img)
            buf = io.BytesIO()
            clean.save(buf, format=fmt)
            return buf.getvalue()
