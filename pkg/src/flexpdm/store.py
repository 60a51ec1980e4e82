"""Persistence: users, saved layouts, audit log, chat, and minimal PDM data.

Backed by an embedded SQLite database (":memory:" works for tests). A
single connection guarded by a re-entrant lock serializes access, which is
plenty at desk scale and makes the optimistic-concurrency check on layout
saves trivially race-free. Layout documents are stored as the canonical
bytes produced by `layout.encode`, so a load returns exactly what was
saved.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import secrets
import sqlite3
import threading
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Iterator

from .layout import LayoutDocument, ValidationReport, canonical_json_bytes, decode, encode, validate
from .registry import RegistrySnapshot, builtin_catalog
from .roles import Role

MAX_USERNAME_LEN = 64
MAX_CHAT_BODY_LEN = 2000
MAX_AUDIT_PAYLOAD_BYTES = 4096
MAX_QUERY_LIMIT = 1000
DEFAULT_QUERY_LIMIT = 100

_SCRYPT_N = 2**14
_SCRYPT_R = 8
_SCRYPT_P = 1


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------


class StoreError(Exception):
    """Base class for persistence failures."""


class UnknownUser(StoreError):
    pass


class DuplicateUsername(StoreError):
    pass


class RevisionConflict(StoreError):
    """expected_revision did not match the stored revision."""

    def __init__(self, expected: int, stored: int):
        super().__init__(f"expected revision {expected} but store holds {stored}")
        self.expected = expected
        self.stored = stored


class ValidationFailed(StoreError):
    def __init__(self, report: ValidationReport):
        super().__init__(f"document has {len(report)} violation(s)")
        self.report = report


class StoreNotEmpty(StoreError):
    pass


class BadFilter(StoreError):
    pass


class EmptyBody(StoreError):
    pass


class BodyTooLong(StoreError):
    pass


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------


class EventType(Enum):
    LOGIN = "Login"
    LOGOUT = "Logout"
    LAYOUT_SAVE = "LayoutSave"
    LAYOUT_RESET = "LayoutReset"
    LAYOUT_EDIT_REJECTED = "LayoutEditRejected"
    THEME_CHANGE = "ThemeChange"
    CHAT_SEND = "ChatSend"
    USER_DETAILS_UPDATE = "UserDetailsUpdate"


class ProjectStatus(Enum):
    PLANNED = "Planned"
    ACTIVE = "Active"
    DONE = "Done"


@dataclass(frozen=True)
class UserRecord:
    user_id: str
    username: str
    password_hash: str
    role: Role
    details: dict[str, str]

    def public_obj(self) -> dict[str, Any]:
        """Wire shape; never includes the password hash."""
        return {
            "user_id": self.user_id,
            "username": self.username,
            "role": self.role.value,
            "details": dict(self.details),
        }


@dataclass(frozen=True)
class AuditEntry:
    seq: int
    timestamp: str
    user_id: str
    event_type: EventType
    payload: dict[str, Any]

    def to_obj(self) -> dict[str, Any]:
        return {
            "seq": self.seq,
            "timestamp": self.timestamp,
            "user_id": self.user_id,
            "event_type": self.event_type.value,
            "payload": self.payload,
        }


@dataclass(frozen=True)
class ChatMessage:
    seq: int
    timestamp: str
    from_user_id: str
    body: str

    def to_obj(self) -> dict[str, Any]:
        return {"seq": self.seq, "timestamp": self.timestamp, "from_user_id": self.from_user_id, "body": self.body}


@dataclass(frozen=True)
class ProductRecord:
    id: str
    name: str
    revision_label: str
    description: str

    def to_obj(self) -> dict[str, str]:
        return {"id": self.id, "name": self.name, "revision_label": self.revision_label, "description": self.description}


@dataclass(frozen=True)
class ProjectRecord:
    id: str
    name: str
    status: ProjectStatus
    description: str

    def to_obj(self) -> dict[str, str]:
        return {"id": self.id, "name": self.name, "status": self.status.value, "description": self.description}


# ---------------------------------------------------------------------------
# Password hashing (scrypt, per-user salt)
# ---------------------------------------------------------------------------


def hash_password(password: str, salt: bytes | None = None) -> str:
    salt = salt if salt is not None else secrets.token_bytes(16)
    key = hashlib.scrypt(password.encode("utf-8"), salt=salt, n=_SCRYPT_N, r=_SCRYPT_R, p=_SCRYPT_P, dklen=32)
    return f"scrypt${_SCRYPT_N}${_SCRYPT_R}${_SCRYPT_P}${salt.hex()}${key.hex()}"


def check_password(password: str, stored: str) -> bool:
    try:
        scheme, n, r, p, salt_hex, key_hex = stored.split("$")
        if scheme != "scrypt":
            return False
        key = hashlib.scrypt(
            password.encode("utf-8"), salt=bytes.fromhex(salt_hex), n=int(n), r=int(r), p=int(p), dklen=32
        )
        return hmac.compare_digest(key.hex(), key_hex)
    except (ValueError, TypeError):
        return False


# Fixed decoy so verify_password does the same work for unknown usernames.
_DECOY_HASH = hash_password("decoy", salt=b"\x00" * 16)


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


_SCHEMA = """
CREATE TABLE IF NOT EXISTS users (
    user_id TEXT PRIMARY KEY,
    username TEXT UNIQUE NOT NULL,
    password_hash TEXT NOT NULL,
    role TEXT NOT NULL,
    details TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS layouts (
    user_id TEXT PRIMARY KEY,
    doc BLOB NOT NULL,
    revision INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS audit (
    seq INTEGER PRIMARY KEY AUTOINCREMENT,
    timestamp TEXT NOT NULL,
    user_id TEXT NOT NULL,
    event_type TEXT NOT NULL,
    payload TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS chat (
    seq INTEGER PRIMARY KEY AUTOINCREMENT,
    timestamp TEXT NOT NULL,
    from_user_id TEXT NOT NULL,
    body TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS products (
    id TEXT PRIMARY KEY,
    name TEXT NOT NULL,
    revision_label TEXT NOT NULL,
    description TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS projects (
    id TEXT PRIMARY KEY,
    name TEXT NOT NULL,
    status TEXT NOT NULL,
    description TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS sessions (
    token TEXT PRIMARY KEY,
    user_id TEXT NOT NULL,
    issued_at REAL NOT NULL,
    expires_at REAL NOT NULL
);
"""


class Store:
    """Embedded store; every public method is safe to call from any thread."""

    def __init__(self, path: str | Path = ":memory:", registry: RegistrySnapshot | None = None):
        self.path = str(path)
        self.registry = registry or builtin_catalog()
        self._lock = threading.RLock()
        self._conn = sqlite3.connect(self.path, check_same_thread=False)
        self._conn.execute("PRAGMA journal_mode=WAL")
        self._conn.executescript(_SCHEMA)
        self._conn.commit()

    def close(self) -> None:
        with self._lock:
            self._conn.close()

    # -- users --------------------------------------------------------------

    def create_user(
        self,
        username: str,
        password: str,
        role: Role,
        details: dict[str, str] | None = None,
    ) -> UserRecord:
        if not username or len(username) > MAX_USERNAME_LEN:
            raise StoreError(f"username must be 1..{MAX_USERNAME_LEN} characters")
        record = UserRecord(
            user_id=f"u-{username}",
            username=username,
            password_hash=hash_password(password),
            role=role,
            details=dict(details or {}),
        )
        with self._lock:
            try:
                self._conn.execute(
                    "INSERT INTO users (user_id, username, password_hash, role, details) VALUES (?, ?, ?, ?, ?)",
                    (record.user_id, record.username, record.password_hash, record.role.value, json.dumps(record.details)),
                )
                self._conn.commit()
            except sqlite3.IntegrityError as exc:
                raise DuplicateUsername(username) from exc
        return record

    def _row_to_user(self, row: tuple) -> UserRecord:
        return UserRecord(
            user_id=row[0],
            username=row[1],
            password_hash=row[2],
            role=Role.from_name(row[3]),
            details=json.loads(row[4]),
        )

    def get_user(self, user_id: str) -> UserRecord:
        with self._lock:
            row = self._conn.execute(
                "SELECT user_id, username, password_hash, role, details FROM users WHERE user_id = ?", (user_id,)
            ).fetchone()
        if row is None:
            raise UnknownUser(user_id)
        return self._row_to_user(row)

    def get_user_by_username(self, username: str) -> UserRecord | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT user_id, username, password_hash, role, details FROM users WHERE username = ?", (username,)
            ).fetchone()
        return self._row_to_user(row) if row else None

    def update_details(self, user_id: str, details: dict[str, str]) -> UserRecord:
        with self._lock:
            user = self.get_user(user_id)
            merged = {**user.details, **details}
            self._conn.execute("UPDATE users SET details = ? WHERE user_id = ?", (json.dumps(merged), user_id))
            self._conn.commit()
            self.append_audit(user_id, EventType.USER_DETAILS_UPDATE, {"fields": sorted(details)})
        return replace(user, details=merged)

    def verify_password(self, username: str, password: str) -> UserRecord | None:
        """None means denied; unknown user and wrong password cost the same."""
        user = self.get_user_by_username(username)
        if user is None:
            check_password(password, _DECOY_HASH)
            return None
        if not check_password(password, user.password_hash):
            return None
        return user

    def list_users(self) -> list[UserRecord]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT user_id, username, password_hash, role, details FROM users ORDER BY user_id"
            ).fetchall()
        return [self._row_to_user(row) for row in rows]

    # -- layouts ------------------------------------------------------------

    def save_layout(self, user_id: str, doc: LayoutDocument, expected_revision: int) -> int:
        """Persist a layout if expected_revision matches; returns the new revision.

        The caller (API layer) is responsible for checking that the document
        belongs to the user; the store re-validates content as a backstop.
        """
        with self._lock:
            self.get_user(user_id)
            report = validate(doc, self.registry)
            if not report.ok:
                raise ValidationFailed(report)
            row = self._conn.execute("SELECT revision FROM layouts WHERE user_id = ?", (user_id,)).fetchone()
            stored = row[0] if row else 0
            if expected_revision != stored:
                raise RevisionConflict(expected_revision, stored)
            new_revision = stored + 1
            data = encode(replace(doc, revision=new_revision))
            self._conn.execute(
                "INSERT OR REPLACE INTO layouts (user_id, doc, revision) VALUES (?, ?, ?)",
                (user_id, data, new_revision),
            )
            self._conn.commit()
            self.append_audit(user_id, EventType.LAYOUT_SAVE, {"revision": new_revision})
            return new_revision

    def load_layout(self, user_id: str) -> LayoutDocument | None:
        """The most recently saved document, or None when nothing is stored."""
        with self._lock:
            self.get_user(user_id)
            row = self._conn.execute("SELECT doc FROM layouts WHERE user_id = ?", (user_id,)).fetchone()
        return decode(row[0]) if row else None

    def load_layout_bytes(self, user_id: str) -> bytes | None:
        """Stored canonical bytes, verbatim."""
        with self._lock:
            self.get_user(user_id)
            row = self._conn.execute("SELECT doc FROM layouts WHERE user_id = ?", (user_id,)).fetchone()
        return bytes(row[0]) if row else None

    def delete_layout(self, user_id: str) -> None:
        with self._lock:
            self.get_user(user_id)
            self._conn.execute("DELETE FROM layouts WHERE user_id = ?", (user_id,))
            self._conn.commit()
            self.append_audit(user_id, EventType.LAYOUT_RESET, {})

    # -- audit log ----------------------------------------------------------

    def append_audit(self, user_id: str, event_type: EventType, payload: dict[str, Any] | None = None) -> int:
        payload = payload or {}
        data = canonical_json_bytes(payload)
        if len(data) > MAX_AUDIT_PAYLOAD_BYTES:
            payload = {"_truncated": True, "original_bytes": len(data)}
            data = canonical_json_bytes(payload)
        with self._lock:
            cursor = self._conn.execute(
                "INSERT INTO audit (timestamp, user_id, event_type, payload) VALUES (?, ?, ?, ?)",
                (_utc_now(), user_id, event_type.value, data.decode("utf-8")),
            )
            self._conn.commit()
            return cursor.lastrowid

    def query_audit(
        self,
        user_id: str | None = None,
        event_type: EventType | None = None,
        since_seq: int | None = None,
        limit: int = DEFAULT_QUERY_LIMIT,
    ) -> list[AuditEntry]:
        if not 1 <= limit <= MAX_QUERY_LIMIT:
            raise BadFilter(f"limit must be in [1, {MAX_QUERY_LIMIT}]")
        clauses, params = [], []
        if user_id is not None:
            clauses.append("user_id = ?")
            params.append(user_id)
        if event_type is not None:
            clauses.append("event_type = ?")
            params.append(event_type.value)
        if since_seq is not None:
            clauses.append("seq > ?")
            params.append(since_seq)
        where = f"WHERE {' AND '.join(clauses)}" if clauses else ""
        with self._lock:
            rows = self._conn.execute(
                f"SELECT seq, timestamp, user_id, event_type, payload FROM audit {where} ORDER BY seq ASC LIMIT ?",
                (*params, limit),
            ).fetchall()
        return [
            AuditEntry(
                seq=row[0],
                timestamp=row[1],
                user_id=row[2],
                event_type=EventType(row[3]),
                payload=json.loads(row[4]),
            )
            for row in rows
        ]

    def latest_audit_seq(self) -> int:
        with self._lock:
            row = self._conn.execute("SELECT MAX(seq) FROM audit").fetchone()
        return row[0] or 0

    # -- chat ---------------------------------------------------------------

    def post_chat(self, from_user_id: str, body: str) -> int:
        if not body.strip():
            raise EmptyBody("chat message is empty")
        if len(body) > MAX_CHAT_BODY_LEN:
            raise BodyTooLong(f"chat message exceeds {MAX_CHAT_BODY_LEN} characters")
        with self._lock:
            self.get_user(from_user_id)
            cursor = self._conn.execute(
                "INSERT INTO chat (timestamp, from_user_id, body) VALUES (?, ?, ?)",
                (_utc_now(), from_user_id, body),
            )
            self._conn.commit()
            seq = cursor.lastrowid
            self.append_audit(from_user_id, EventType.CHAT_SEND, {"seq": seq})
            return seq

    def list_chat(self, since_seq: int = 0, limit: int = DEFAULT_QUERY_LIMIT) -> list[ChatMessage]:
        if not 1 <= limit <= MAX_QUERY_LIMIT:
            raise BadFilter(f"limit must be in [1, {MAX_QUERY_LIMIT}]")
        with self._lock:
            rows = self._conn.execute(
                "SELECT seq, timestamp, from_user_id, body FROM chat WHERE seq > ? ORDER BY seq ASC LIMIT ?",
                (since_seq, limit),
            ).fetchall()
        return [ChatMessage(seq=row[0], timestamp=row[1], from_user_id=row[2], body=row[3]) for row in rows]

    # -- PDM data -----------------------------------------------------------

    def add_product(self, product: ProductRecord) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT INTO products (id, name, revision_label, description) VALUES (?, ?, ?, ?)",
                (product.id, product.name, product.revision_label, product.description),
            )
            self._conn.commit()

    def add_project(self, project: ProjectRecord) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT INTO projects (id, name, status, description) VALUES (?, ?, ?, ?)",
                (project.id, project.name, project.status.value, project.description),
            )
            self._conn.commit()

    def list_products(self) -> list[ProductRecord]:
        with self._lock:
            rows = self._conn.execute("SELECT id, name, revision_label, description FROM products ORDER BY id").fetchall()
        return [ProductRecord(*row) for row in rows]

    def list_projects(self) -> list[ProjectRecord]:
        with self._lock:
            rows = self._conn.execute("SELECT id, name, status, description FROM projects ORDER BY id").fetchall()
        return [ProjectRecord(id=row[0], name=row[1], status=ProjectStatus(row[2]), description=row[3]) for row in rows]

    # -- sessions (persisted so any server over the same store agrees) ------

    def put_session(self, token: str, user_id: str, issued_at: float, expires_at: float) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT INTO sessions (token, user_id, issued_at, expires_at) VALUES (?, ?, ?, ?)",
                (token, user_id, issued_at, expires_at),
            )
            self._conn.commit()

    def get_session(self, token: str) -> tuple[str, float, float] | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT user_id, issued_at, expires_at FROM sessions WHERE token = ?", (token,)
            ).fetchone()
        return (row[0], row[1], row[2]) if row else None

    def delete_session(self, token: str) -> bool:
        with self._lock:
            cursor = self._conn.execute("DELETE FROM sessions WHERE token = ?", (token,))
            self._conn.commit()
            return cursor.rowcount > 0

    # -- seeding and export ---------------------------------------------------

    def is_empty(self) -> bool:
        with self._lock:
            for table in ("users", "products", "projects"):
                if self._conn.execute(f"SELECT COUNT(*) FROM {table}").fetchone()[0]:
                    return False
        return True

    def seed_sample_data(self) -> dict[str, int]:
        """Deterministic demo fixture: one user per non-guest role plus PDM data.

        Seeded passwords are `<username>-pw`.
        """
        with self._lock:
            if not self.is_empty():
                raise StoreNotEmpty("seed requires an empty store")
            for username, role in SEED_USERS:
                self.create_user(
                    username,
                    f"{username}-pw",
                    role,
                    details={
                        "full_name": username.capitalize(),
                        "email": f"{username}@example.test",
                        "department": "Engineering" if role is Role.ENGINEER else "Operations",
                    },
                )
            for product in SEED_PRODUCTS:
                self.add_product(product)
            for project in SEED_PROJECTS:
                self.add_project(project)
        return {"users": len(SEED_USERS), "products": len(SEED_PRODUCTS), "projects": len(SEED_PROJECTS)}

    def export_records(self, kind: str) -> Iterator[dict[str, Any]]:
        """JSON-able record dicts for one record type (CLI JSONL export)."""
        if kind == "users":
            return (user.public_obj() for user in self.list_users())
        if kind == "products":
            return (product.to_obj() for product in self.list_products())
        if kind == "projects":
            return (project.to_obj() for project in self.list_projects())
        if kind == "audit":
            return (entry.to_obj() for entry in self.query_audit(limit=MAX_QUERY_LIMIT))
        if kind == "chat":
            return (message.to_obj() for message in self.list_chat(limit=MAX_QUERY_LIMIT))
        if kind == "layouts":
            with self._lock:
                rows = self._conn.execute("SELECT user_id, doc, revision FROM layouts ORDER BY user_id").fetchall()
            return ({"user_id": r[0], "revision": r[2], "document": json.loads(r[1])} for r in rows)
        raise BadFilter(f"unknown record kind {kind!r}")


SEED_USERS = (
    ("admin", Role.ADMINISTRATOR),
    ("pm", Role.PROJECT_MANAGER),
    ("engineer", Role.ENGINEER),
    ("staff", Role.STAFF_MEMBER),
    ("businessman", Role.BUSINESSMAN),
)

SEED_PRODUCTS = tuple(
    ProductRecord(id=f"P-{1000 + n}", name=name, revision_label=rev, description=f"{name} ({rev})")
    for n, (name, rev) in enumerate(
        [
            ("Crankshaft Assembly", "A"),
            ("Gearbox Housing", "B"),
            ("Drive Shaft", "A"),
            ("Control Panel", "C"),
            ("Hydraulic Pump", "A"),
            ("Sensor Array", "B"),
            ("Cooling Manifold", "A"),
            ("Bearing Block", "D"),
            ("Valve Actuator", "A"),
            ("Wiring Harness", "B"),
        ],
        start=1,
    )
)

SEED_PROJECTS = (
    ProjectRecord("PRJ-01", "Line Retooling", ProjectStatus.ACTIVE, "Retool assembly line 2"),
    ProjectRecord("PRJ-02", "Next-Gen Gearbox", ProjectStatus.PLANNED, "Design study for gearbox v2"),
    ProjectRecord("PRJ-03", "Quality Audit", ProjectStatus.DONE, "Annual process audit"),
    ProjectRecord("PRJ-04", "Supplier Onboarding", ProjectStatus.ACTIVE, "Qualify two new suppliers"),
    ProjectRecord("PRJ-05", "Prototype Bench", ProjectStatus.PLANNED, "Bench setup for sensor tests"),
)
