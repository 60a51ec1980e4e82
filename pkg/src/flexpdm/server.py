"""HTTP+JSON wire protocol over the layout engine, registry, and store.

Three-tier shape: browser client <-> this server <-> embedded store. All
request and response bodies are UTF-8 JSON; the session token travels in
the `X-Flex-Session` header. Every error body has the fixed shape
`{"code", "message", "details"?}` with a fixed status<->code mapping.

Handlers are stateless; shared state lives in the store and the session
manager, which serialize their own writes. Any number of server instances
over the same store give the same answers.
"""

from __future__ import annotations

import time
from dataclasses import replace
from datetime import datetime, timezone
from typing import Any

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import layout
from .registry import RegistrySnapshot, builtin_catalog, compose_default, descriptor_to_obj, list_visible
from .roles import Right, Role
from .sessions import Authenticated, Denied, Guest, Principal, RateLimited, SessionManager
from .store import (
    BadFilter,
    BodyTooLong,
    EmptyBody,
    EventType,
    RevisionConflict,
    Store,
    ValidationFailed,
)

SESSION_HEADER = "X-Flex-Session"
READ_ONLY_HEADER = "X-Layout-Read-Only"
HANDLE_TIME_HEADER = "X-Handle-Ms"

#: The closed error-code set and its fixed status mapping (golden-tested).
STATUS_BY_CODE = {
    "bad_request": 400,
    "denied": 401,
    "unauthorized": 401,
    "forbidden": 403,
    "not_found": 404,
    "method_not_allowed": 405,
    "revision_conflict": 409,
    "validation_failed": 422,
    "rate_limited": 429,
    "internal_error": 500,
}

_DETAIL_UPDATABLE_FIELDS = {"full_name", "email", "department"}


class ApiError(Exception):
    """Carries one entry of the closed error-code set to the wire."""

    def __init__(self, code: str, message: str, details: Any = None):
        assert code in STATUS_BY_CODE, f"unpublished error code {code!r}"
        super().__init__(message)
        self.code = code
        self.http_status = STATUS_BY_CODE[code]
        self.message = message
        self.details = details

    def body(self) -> dict[str, Any]:
        obj: dict[str, Any] = {"code": self.code, "message": self.message}
        if self.details is not None:
            obj["details"] = self.details
        return obj


class LoginRequest(BaseModel):
    username: str
    password: str


class ChatPost(BaseModel):
    body: str


def create_app(
    store: Store,
    sessions: SessionManager | None = None,
    registry: RegistrySnapshot | None = None,
    cors_origins: list[str] | None = None,
) -> FastAPI:
    registry = registry or builtin_catalog()
    sessions = sessions or SessionManager(store)
    app = FastAPI(title="flexpdm", docs_url=None, redoc_url=None)
    app.state.store = store
    app.state.sessions = sessions
    app.state.registry = registry

    if cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=cors_origins,
            allow_methods=["*"],
            allow_headers=[SESSION_HEADER, "Content-Type"],
            expose_headers=[READ_ONLY_HEADER, HANDLE_TIME_HEADER],
        )

    @app.middleware("http")
    async def record_handle_time(request: Request, call_next):
        started = time.perf_counter()
        response = await call_next(request)
        response.headers[HANDLE_TIME_HEADER] = f"{(time.perf_counter() - started) * 1000:.3f}"
        return response

    @app.exception_handler(ApiError)
    async def api_error_handler(_request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.http_status, content=exc.body())

    @app.exception_handler(StarletteHTTPException)
    async def http_exception_handler(_request: Request, exc: StarletteHTTPException):
        code = {404: "not_found", 405: "method_not_allowed"}.get(exc.status_code, "bad_request")
        return JSONResponse(
            status_code=STATUS_BY_CODE[code],
            content=ApiError(code, str(exc.detail)).body(),
        )

    @app.exception_handler(RequestValidationError)
    async def request_validation_handler(_request: Request, exc: RequestValidationError):
        details = [{"loc": [str(part) for part in err["loc"]], "msg": err["msg"]} for err in exc.errors()]
        return JSONResponse(
            status_code=422,
            content=ApiError("validation_failed", "request body failed validation", details).body(),
        )

    @app.exception_handler(Exception)
    async def unhandled_exception_handler(_request: Request, _exc: Exception):
        return JSONResponse(status_code=500, content=ApiError("internal_error", "internal error").body())

    # -- helpers -------------------------------------------------------------

    def principal_of(request: Request) -> Principal:
        return sessions.authenticate(request.headers.get(SESSION_HEADER))

    def require_authenticated(request: Request) -> Authenticated:
        principal = principal_of(request)
        if not isinstance(principal, Authenticated):
            raise ApiError("unauthorized", "a valid session token is required")
        return principal

    def require_right(request: Request, right: Right) -> Authenticated:
        principal = require_authenticated(request)
        if right not in principal.role.rights:
            raise ApiError("forbidden", f"requires the {right.value} right")
        return principal

    def current_layout_bytes(principal: Principal) -> tuple[bytes, bool]:
        """(canonical document bytes, read_only flag) for a principal."""
        if isinstance(principal, Authenticated):
            stored = store.load_layout_bytes(principal.user_id)
            if stored is not None:
                return stored, False
            return layout.encode(compose_default(principal.role, registry)), False
        return layout.encode(compose_default(Role.GUEST, registry)), True

    # -- session endpoints ----------------------------------------------------

    @app.post("/api/login")
    def login(body: LoginRequest):
        try:
            token = sessions.login(body.username, body.password)
        except RateLimited as exc:
            raise ApiError("rate_limited", str(exc)) from exc
        except Denied as exc:
            raise ApiError("denied", str(exc)) from exc
        user = store.get_user(token.user_id)
        return {
            "token": token.token,
            "role": user.role.value,
            "expires_at": datetime.fromtimestamp(token.expires_at, tz=timezone.utc).isoformat(),
        }

    @app.post("/api/logout", status_code=204)
    def logout(request: Request):
        sessions.logout(request.headers.get(SESSION_HEADER))
        return Response(status_code=204)

    # -- layout endpoints -------------------------------------------------------

    @app.get("/api/layout")
    def get_layout(request: Request):
        data, read_only = current_layout_bytes(principal_of(request))
        return Response(
            content=data,
            media_type="application/json",
            headers={READ_ONLY_HEADER: "true" if read_only else "false"},
        )

    @app.put("/api/layout")
    async def put_layout(request: Request):
        principal = require_authenticated(request)
        if Right.EDIT_OWN_LAYOUT not in principal.role.rights:
            raise ApiError("forbidden", "this role may not save layouts")
        raw = await request.body()
        try:
            doc = layout.decode(raw)
        except layout.MalformedDocument as exc:
            raise ApiError("bad_request", str(exc)) from exc
        except (layout.FieldViolation, layout.UnsupportedSchemaVersion) as exc:
            raise ApiError("validation_failed", str(exc)) from exc
        if doc.owner != principal.user_id:
            raise ApiError("forbidden", "document owner does not match the session user")
        if doc.role is not principal.role:
            raise ApiError("forbidden", "document role does not match the session role")

        previous, _ = current_layout_bytes(principal)
        previous_theme = layout.decode(previous).theme
        try:
            revision = store.save_layout(principal.user_id, doc, expected_revision=doc.revision)
        except RevisionConflict as exc:
            raise ApiError(
                "revision_conflict",
                str(exc),
                details={"expected": exc.expected, "stored": exc.stored},
            ) from exc
        except ValidationFailed as exc:
            store.append_audit(
                principal.user_id,
                EventType.LAYOUT_EDIT_REJECTED,
                {"violations": exc.report.to_obj()},
            )
            raise ApiError(
                "validation_failed",
                "the document breaks layout rules",
                details={"violations": exc.report.to_obj()},
            ) from exc
        if doc.theme != previous_theme:
            store.append_audit(principal.user_id, EventType.THEME_CHANGE, layout.theme_to_obj(doc.theme))
        return {"revision": revision}

    @app.delete("/api/layout", status_code=204)
    def delete_layout(request: Request):
        principal = require_authenticated(request)
        store.delete_layout(principal.user_id)
        return Response(status_code=204)

    # -- registry ---------------------------------------------------------------

    @app.get("/api/components")
    def get_components(request: Request):
        principal = principal_of(request)
        role = principal.role if isinstance(principal, Authenticated) else Role.GUEST
        return [descriptor_to_obj(descriptor) for descriptor in list_visible(registry, role)]

    # -- user details -------------------------------------------------------------

    @app.get("/api/user/details")
    def get_user_details(request: Request):
        principal = require_authenticated(request)
        return store.get_user(principal.user_id).public_obj()

    @app.put("/api/user/details")
    def put_user_details(request: Request, body: dict[str, str]):
        principal = require_authenticated(request)
        unknown = set(body) - _DETAIL_UPDATABLE_FIELDS
        if unknown:
            raise ApiError(
                "validation_failed",
                f"unknown detail fields: {', '.join(sorted(unknown))}",
                details={"allowed": sorted(_DETAIL_UPDATABLE_FIELDS)},
            )
        return store.update_details(principal.user_id, body).public_obj()

    # -- audit ---------------------------------------------------------------------

    @app.get("/api/audit")
    def get_audit(request: Request, since_seq: int = 0, event_type: str | None = None, limit: int = 100):
        require_right(request, Right.VIEW_AUDIT_LOG)
        parsed_type = None
        if event_type is not None:
            try:
                parsed_type = EventType(event_type)
            except ValueError as exc:
                raise ApiError("bad_request", f"unknown event_type {event_type!r}") from exc
        try:
            entries = store.query_audit(event_type=parsed_type, since_seq=since_seq, limit=limit)
        except BadFilter as exc:
            raise ApiError("bad_request", str(exc)) from exc
        return [entry.to_obj() for entry in entries]

    # -- chat ------------------------------------------------------------------------

    @app.get("/api/chat")
    def get_chat(request: Request, since_seq: int = 0, limit: int = 100):
        require_authenticated(request)
        try:
            messages = store.list_chat(since_seq=since_seq, limit=limit)
        except BadFilter as exc:
            raise ApiError("bad_request", str(exc)) from exc
        return [message.to_obj() for message in messages]

    @app.post("/api/chat")
    def post_chat(request: Request, body: ChatPost):
        principal = require_authenticated(request)
        try:
            seq = store.post_chat(principal.user_id, body.body)
        except (EmptyBody, BodyTooLong) as exc:
            raise ApiError("validation_failed", str(exc)) from exc
        return {"seq": seq}

    # -- PDM data ----------------------------------------------------------------------

    @app.get("/api/pdm/products")
    def get_products():
        return [product.to_obj() for product in store.list_products()]

    @app.get("/api/pdm/projects")
    def get_projects():
        return [project.to_obj() for project in store.list_projects()]

    return app
