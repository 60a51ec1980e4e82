"""Login sessions: bearer tokens, guest fallback, and login rate limiting.

Tokens are opaque server-side records persisted in the store, so logout
takes effect immediately and any server instance over the same store
resolves the same token to the same principal. The clock is injectable
for TTL tests.
"""

from __future__ import annotations

import secrets
import threading
import time
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Callable, Union

from .roles import Role
from .store import EventType, Store

DEFAULT_SESSION_TTL_SECONDS = 8 * 60 * 60

RATE_LIMIT_FAILURES = 10
RATE_LIMIT_WINDOW_SECONDS = 60.0


class AuthError(Exception):
    pass


class Denied(AuthError):
    """Login failed; deliberately identical for unknown user and bad password."""

    def __init__(self):
        super().__init__("invalid username or password")


class RateLimited(AuthError):
    def __init__(self):
        super().__init__("too many failed login attempts; retry later")


@dataclass(frozen=True)
class SessionToken:
    token: str
    user_id: str
    issued_at: float
    expires_at: float


@dataclass(frozen=True)
class Guest:
    pass


@dataclass(frozen=True)
class Authenticated:
    user_id: str
    role: Role


Principal = Union[Guest, Authenticated]

GUEST = Guest()


class SessionManager:
    def __init__(
        self,
        store: Store,
        ttl_seconds: float = DEFAULT_SESSION_TTL_SECONDS,
        clock: Callable[[], float] = time.time,
    ):
        self.store = store
        self.ttl_seconds = ttl_seconds
        self.clock = clock
        self._lock = threading.RLock()
        self._failures: dict[str, deque[float]] = defaultdict(deque)

    def _register_failure(self, username: str) -> None:
        with self._lock:
            self._failures[username].append(self.clock())

    def _rate_limited(self, username: str) -> bool:
        now = self.clock()
        with self._lock:
            window = self._failures[username]
            while window and now - window[0] > RATE_LIMIT_WINDOW_SECONDS:
                window.popleft()
            return len(window) >= RATE_LIMIT_FAILURES

    def login(self, username: str, password: str) -> SessionToken:
        """Issue a session token; raises Denied or RateLimited."""
        if self._rate_limited(username):
            raise RateLimited()
        user = self.store.verify_password(username, password)
        if user is None:
            self._register_failure(username)
            raise Denied()
        now = self.clock()
        session = SessionToken(
            token=secrets.token_urlsafe(32),
            user_id=user.user_id,
            issued_at=now,
            expires_at=now + self.ttl_seconds,
        )
        self.store.put_session(session.token, session.user_id, session.issued_at, session.expires_at)
        self.store.append_audit(user.user_id, EventType.LOGIN, {"username": username})
        return session

    def authenticate(self, token: str | None) -> Principal:
        """Resolve a bearer token; anything missing, unknown, or expired is Guest."""
        if not token:
            return GUEST
        row = self.store.get_session(token)
        if row is None:
            return GUEST
        user_id, _issued_at, expires_at = row
        if self.clock() >= expires_at:
            return GUEST
        try:
            user = self.store.get_user(user_id)
        except Exception:
            return GUEST
        return Authenticated(user_id=user.user_id, role=user.role)

    def logout(self, token: str | None) -> None:
        """Invalidate a token; idempotent, audited only on the first call."""
        if not token:
            return
        row = self.store.get_session(token)
        removed = self.store.delete_session(token)
        if removed and row is not None:
            self.store.append_audit(row[0], EventType.LOGOUT, {})
