"""Embedded persistence: a single-file SQLite store plus a blob directory.

Tables mirror the platform's entities (specimens, sequences, audit events,
weekly snapshots, containers, BINs, vocabularies, users, jobs).  Documents
are stored as canonical JSON.  Writes serialize through one lock (single
writer, many readers); callers receive plain dicts that are theirs to own.
"""

from __future__ import annotations

import json
import sqlite3
import threading
from pathlib import Path

from barcodelab.canonical import dumps, dump_bytes, sha256_hex
from barcodelab.model.audit import AuditEvent

_SCHEMA = """
CREATE TABLE IF NOT EXISTS specimens (
    sample_id TEXT PRIMARY KEY,
    project TEXT NOT NULL,
    doc TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS sequences (
    seq_key TEXT PRIMARY KEY,
    process_id TEXT NOT NULL,
    sample_id TEXT NOT NULL,
    marker TEXT NOT NULL,
    doc TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS audit (
    event_id INTEGER PRIMARY KEY AUTOINCREMENT,
    ts TEXT NOT NULL,
    actor TEXT NOT NULL,
    action TEXT NOT NULL,
    target TEXT NOT NULL,
    payload TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS snapshots (
    target TEXT NOT NULL,
    week TEXT NOT NULL,
    doc TEXT NOT NULL,
    PRIMARY KEY (target, week)
);
CREATE TABLE IF NOT EXISTS containers (
    code TEXT PRIMARY KEY,
    kind TEXT NOT NULL,
    doc TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS bins (
    bin_uri TEXT PRIMARY KEY,
    doc TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS bin_members (
    seq_key TEXT PRIMARY KEY,
    bin_uri TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS vocab (
    kind TEXT NOT NULL,
    name TEXT NOT NULL,
    doc TEXT NOT NULL,
    PRIMARY KEY (kind, name)
);
CREATE TABLE IF NOT EXISTS backbone_added (
    rank TEXT NOT NULL,
    name TEXT NOT NULL,
    parent_rank TEXT,
    parent_name TEXT,
    PRIMARY KEY (rank, name)
);
CREATE TABLE IF NOT EXISTS users (
    username TEXT PRIMARY KEY,
    token TEXT NOT NULL,
    doc TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS counters (
    name TEXT PRIMARY KEY,
    value INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS jobs (
    job_id TEXT PRIMARY KEY,
    doc TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS kv (
    key TEXT PRIMARY KEY,
    value TEXT NOT NULL
);
"""


class Store:
    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path else None
        self.write_lock = threading.RLock()
        if self.path:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._conn = sqlite3.connect(str(self.path), check_same_thread=False)
            self.blob_dir: Path | None = self.path.parent / "blobs"
            self.blob_dir.mkdir(exist_ok=True)
            self._mem_blobs: dict | None = None
        else:
            self._conn = sqlite3.connect(":memory:", check_same_thread=False)
            self.blob_dir = None
            self._mem_blobs = {}
        self._conn.executescript(_SCHEMA)
        self._read_lock = threading.RLock()

    def close(self) -> None:
        self._conn.close()

    # --- low level ---------------------------------------------------------

    def _write(self, sql: str, params: tuple = ()) -> sqlite3.Cursor:
        with self.write_lock:
            cur = self._conn.execute(sql, params)
            self._conn.commit()
            return cur

    def _read(self, sql: str, params: tuple = ()) -> list:
        with self._read_lock:
            return self._conn.execute(sql, params).fetchall()

    # --- specimens ----------------------------------------------------------

    def put_specimen(self, doc: dict) -> None:
        self._write(
            "INSERT OR REPLACE INTO specimens (sample_id, project, doc) VALUES (?, ?, ?)",
            (doc["sample_id"], doc["project"], dumps(doc)),
        )

    def get_specimen(self, sample_id: str) -> dict | None:
        rows = self._read("SELECT doc FROM specimens WHERE sample_id = ?", (sample_id,))
        return json.loads(rows[0][0]) if rows else None

    def has_specimen(self, sample_id: str) -> bool:
        return bool(self._read("SELECT 1 FROM specimens WHERE sample_id = ?", (sample_id,)))

    def iter_specimens(self, project: str | None = None) -> list:
        if project:
            rows = self._read(
                "SELECT doc FROM specimens WHERE project = ? ORDER BY sample_id", (project,)
            )
        else:
            rows = self._read("SELECT doc FROM specimens ORDER BY sample_id")
        return [json.loads(r[0]) for r in rows]

    def count_specimens(self) -> int:
        return self._read("SELECT COUNT(*) FROM specimens")[0][0]

    # --- sequences ----------------------------------------------------------

    def put_sequence(self, doc: dict) -> None:
        seq_key = f"{doc['process_id']}:{doc['marker_code']}"
        self._write(
            "INSERT OR REPLACE INTO sequences (seq_key, process_id, sample_id, marker, doc)"
            " VALUES (?, ?, ?, ?, ?)",
            (seq_key, doc["process_id"], doc["sample_id"], doc["marker_code"], dumps(doc)),
        )

    def get_sequence(self, seq_key: str) -> dict | None:
        rows = self._read("SELECT doc FROM sequences WHERE seq_key = ?", (seq_key,))
        return json.loads(rows[0][0]) if rows else None

    def iter_sequences(self, sample_id: str | None = None, marker: str | None = None) -> list:
        clauses = []
        params: list = []
        if sample_id:
            clauses.append("sample_id = ?")
            params.append(sample_id)
        if marker:
            clauses.append("marker = ?")
            params.append(marker)
        where = (" WHERE " + " AND ".join(clauses)) if clauses else ""
        rows = self._read(f"SELECT doc FROM sequences{where} ORDER BY seq_key", tuple(params))
        return [json.loads(r[0]) for r in rows]

    def sample_id_for_process(self, process_id: str) -> str | None:
        rows = self._read(
            "SELECT sample_id FROM sequences WHERE process_id = ? LIMIT 1", (process_id,)
        )
        if rows:
            return rows[0][0]
        rows = self._read(
            "SELECT sample_id, doc FROM specimens WHERE doc LIKE ?", (f'%"{process_id}"%',)
        )
        for sample_id, doc in rows:
            if process_id in json.loads(doc).get("process_ids", []):
                return sample_id
        return None

    def resolve_record_id(self, record_id: str) -> str | None:
        """Accepts a SampleID or ProcessID; returns the home sample_id."""
        if self.has_specimen(record_id):
            return record_id
        return self.sample_id_for_process(record_id)

    # --- audit ---------------------------------------------------------------

    def append_event(self, ts: str, actor: str, action: str, target: str, payload: dict) -> AuditEvent:
        cur = self._write(
            "INSERT INTO audit (ts, actor, action, target, payload) VALUES (?, ?, ?, ?, ?)",
            (ts, actor, action, target, dumps(payload)),
        )
        return AuditEvent(cur.lastrowid, ts, actor, action, target, payload)

    def events_for(self, target: str) -> list:
        rows = self._read(
            "SELECT event_id, ts, actor, action, target, payload FROM audit"
            " WHERE target = ? ORDER BY event_id",
            (target,),
        )
        return [AuditEvent(r[0], r[1], r[2], r[3], r[4], json.loads(r[5])) for r in rows]

    def all_events(self) -> list:
        rows = self._read(
            "SELECT event_id, ts, actor, action, target, payload FROM audit ORDER BY event_id"
        )
        return [AuditEvent(r[0], r[1], r[2], r[3], r[4], json.loads(r[5])) for r in rows]

    def events_for_project(self, project: str) -> list:
        rows = self._read(
            "SELECT a.event_id, a.ts, a.actor, a.action, a.target, a.payload"
            " FROM audit a JOIN specimens s ON a.target = s.sample_id"
            " WHERE s.project = ? ORDER BY a.event_id",
            (project,),
        )
        return [AuditEvent(r[0], r[1], r[2], r[3], r[4], json.loads(r[5])) for r in rows]

    # --- snapshots -------------------------------------------------------------

    def put_snapshot(self, target: str, week: str, doc: dict) -> None:
        self._write(
            "INSERT OR REPLACE INTO snapshots (target, week, doc) VALUES (?, ?, ?)",
            (target, week, dumps(doc)),
        )

    def snapshot_at(self, target: str, week: str) -> tuple | None:
        """Latest snapshot with week <= the given ISO week key."""
        rows = self._read(
            "SELECT week, doc FROM snapshots WHERE target = ? AND week <= ?"
            " ORDER BY week DESC LIMIT 1",
            (target, week),
        )
        return (rows[0][0], json.loads(rows[0][1])) if rows else None

    def snapshot_weeks(self, target: str) -> list:
        rows = self._read(
            "SELECT week FROM snapshots WHERE target = ? ORDER BY week", (target,)
        )
        return [r[0] for r in rows]

    # --- containers -------------------------------------------------------------

    def put_container(self, doc: dict) -> None:
        self._write(
            "INSERT OR REPLACE INTO containers (code, kind, doc) VALUES (?, ?, ?)",
            (doc["code"], doc["kind"], dumps(doc)),
        )

    def get_container(self, code: str) -> dict | None:
        rows = self._read("SELECT doc FROM containers WHERE code = ?", (code,))
        return json.loads(rows[0][0]) if rows else None

    def iter_containers(self, kind: str | None = None) -> list:
        if kind:
            rows = self._read("SELECT doc FROM containers WHERE kind = ? ORDER BY code", (kind,))
        else:
            rows = self._read("SELECT doc FROM containers ORDER BY code")
        return [json.loads(r[0]) for r in rows]

    # --- bins ---------------------------------------------------------------------

    def put_bin(self, doc: dict) -> None:
        self._write(
            "INSERT OR REPLACE INTO bins (bin_uri, doc) VALUES (?, ?)",
            (doc["bin_uri"], dumps(doc)),
        )
        with self.write_lock:
            self._conn.execute("DELETE FROM bin_members WHERE bin_uri = ?", (doc["bin_uri"],))
            self._conn.executemany(
                "INSERT OR REPLACE INTO bin_members (seq_key, bin_uri) VALUES (?, ?)",
                [(m, doc["bin_uri"]) for m in doc.get("members", [])],
            )
            self._conn.commit()

    def delete_bin_members(self, bin_uri: str) -> None:
        self._write("DELETE FROM bin_members WHERE bin_uri = ?", (bin_uri,))

    def get_bin(self, bin_uri: str) -> dict | None:
        rows = self._read("SELECT doc FROM bins WHERE bin_uri = ?", (bin_uri,))
        return json.loads(rows[0][0]) if rows else None

    def iter_bins(self) -> list:
        rows = self._read("SELECT doc FROM bins ORDER BY bin_uri")
        return [json.loads(r[0]) for r in rows]

    def bin_of(self, seq_key: str) -> str | None:
        rows = self._read("SELECT bin_uri FROM bin_members WHERE seq_key = ?", (seq_key,))
        return rows[0][0] if rows else None

    # --- vocabularies -----------------------------------------------------------------

    def add_vocab(self, kind: str, name: str, doc: dict | None = None) -> None:
        self._write(
            "INSERT OR REPLACE INTO vocab (kind, name, doc) VALUES (?, ?, ?)",
            (kind, name, dumps(doc or {})),
        )

    def get_vocab(self, kind: str, name: str) -> dict | None:
        rows = self._read("SELECT doc FROM vocab WHERE kind = ? AND name = ?", (kind, name))
        return json.loads(rows[0][0]) if rows else None

    def has_vocab(self, kind: str, name: str) -> bool:
        return bool(self._read("SELECT 1 FROM vocab WHERE kind = ? AND name = ?", (kind, name)))

    def iter_vocab(self, kind: str) -> list:
        rows = self._read("SELECT name, doc FROM vocab WHERE kind = ? ORDER BY name", (kind,))
        return [(r[0], json.loads(r[1])) for r in rows]

    # --- backbone additions ---------------------------------------------------------

    def add_backbone_row(self, rank: str, name: str, parent_rank: str | None, parent_name: str | None) -> None:
        self._write(
            "INSERT OR IGNORE INTO backbone_added (rank, name, parent_rank, parent_name)"
            " VALUES (?, ?, ?, ?)",
            (rank, name, parent_rank, parent_name),
        )

    def iter_backbone_rows(self) -> list:
        return self._read(
            "SELECT rank, name, parent_rank, parent_name FROM backbone_added ORDER BY rowid"
        )

    # --- users -------------------------------------------------------------------------

    def put_user(self, username: str, token: str, doc: dict | None = None) -> None:
        self._write(
            "INSERT OR REPLACE INTO users (username, token, doc) VALUES (?, ?, ?)",
            (username, token, dumps(doc or {})),
        )

    def get_user(self, username: str) -> dict | None:
        rows = self._read("SELECT token, doc FROM users WHERE username = ?", (username,))
        if not rows:
            return None
        doc = json.loads(rows[0][1])
        doc["username"] = username
        doc["token"] = rows[0][0]
        return doc

    def user_by_token(self, token: str) -> str | None:
        rows = self._read("SELECT username FROM users WHERE token = ?", (token,))
        return rows[0][0] if rows else None

    def iter_users(self) -> list:
        rows = self._read("SELECT username FROM users ORDER BY username")
        return [r[0] for r in rows]

    # --- counters ------------------------------------------------------------------------

    def next_counter(self, name: str) -> int:
        with self.write_lock:
            self._conn.execute(
                "INSERT INTO counters (name, value) VALUES (?, 0)"
                " ON CONFLICT(name) DO NOTHING",
                (name,),
            )
            self._conn.execute("UPDATE counters SET value = value + 1 WHERE name = ?", (name,))
            value = self._conn.execute(
                "SELECT value FROM counters WHERE name = ?", (name,)
            ).fetchone()[0]
            self._conn.commit()
            return value

    # --- jobs ------------------------------------------------------------------------------

    def put_job(self, doc: dict) -> None:
        self._write("INSERT OR REPLACE INTO jobs (job_id, doc) VALUES (?, ?)", (doc["job_id"], dumps(doc)))

    def get_job(self, job_id: str) -> dict | None:
        rows = self._read("SELECT doc FROM jobs WHERE job_id = ?", (job_id,))
        return json.loads(rows[0][0]) if rows else None

    # --- kv ----------------------------------------------------------------------------------

    def kv_set(self, key: str, value: dict | list | str) -> None:
        self._write("INSERT OR REPLACE INTO kv (key, value) VALUES (?, ?)", (key, dumps(value)))

    def kv_get(self, key: str):
        rows = self._read("SELECT value FROM kv WHERE key = ?", (key,))
        return json.loads(rows[0][0]) if rows else None

    # --- blobs ----------------------------------------------------------------------------------

    def put_blob(self, data: bytes) -> str:
        digest = sha256_hex(data)
        if self.blob_dir is not None:
            target = self.blob_dir / digest
            if not target.exists():
                target.write_bytes(data)
        else:
            assert self._mem_blobs is not None
            self._mem_blobs[digest] = data
        return digest

    def get_blob(self, digest: str) -> bytes | None:
        if self.blob_dir is not None:
            target = self.blob_dir / digest
            return target.read_bytes() if target.exists() else None
        assert self._mem_blobs is not None
        return self._mem_blobs.get(digest)

    # --- replayable state -------------------------------------------------------------------------

    def state_docs(self) -> dict:
        return {
            "specimens": {d["sample_id"]: d for d in self.iter_specimens()},
            "sequences": {f"{d['process_id']}:{d['marker_code']}": d for d in self.iter_sequences()},
        }

    def dump_state(self) -> bytes:
        return dump_bytes(self.state_docs())
