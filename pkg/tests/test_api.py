"""HTTP API tests: endpoint behavior, error schema, protocol flows."""

from __future__ import annotations

import json
from dataclasses import replace

import pytest
from fastapi.testclient import TestClient

from flexpdm.layout import Placement, Theme, decode, encode
from flexpdm.registry import builtin_catalog, compose_default
from flexpdm.roles import Role
from flexpdm.server import READ_ONLY_HEADER, SESSION_HEADER, STATUS_BY_CODE, create_app
from flexpdm.sessions import SessionManager
from flexpdm.store import EventType, Store

REGISTRY = builtin_catalog()


@pytest.fixture
def store():
    s = Store(":memory:")
    s.seed_sample_data()
    yield s
    s.close()


@pytest.fixture
def client(store):
    app = create_app(store, sessions=SessionManager(store))
    with TestClient(app) as c:
        yield c


def login(client: TestClient, username: str) -> dict:
    response = client.post("/api/login", json={"username": username, "password": f"{username}-pw"})
    assert response.status_code == 200, response.text
    return response.json()


def auth(token: str) -> dict:
    return {SESSION_HEADER: token}


def fetch_layout(client: TestClient, token: str | None = None) -> tuple[bytes, dict]:
    response = client.get("/api/layout", headers=auth(token) if token else {})
    assert response.status_code == 200
    return response.content, response.headers


def personalized(document_bytes: bytes, user_id: str) -> bytes:
    """Client-side step: set owner to the session user before saving."""
    return encode(replace(decode(document_bytes), owner=user_id))


# ---------------------------------------------------------------------------
# Login
# ---------------------------------------------------------------------------


class TestLogin:
    def test_seeded_engineer(self, client):
        body = login(client, "engineer")
        assert body["role"] == "Engineer"
        assert set(body) == {"token", "role", "expires_at"}

    def test_bad_password(self, client):
        response = client.post("/api/login", json={"username": "engineer", "password": "nope"})
        assert response.status_code == 401
        assert response.json()["code"] == "denied"

    def test_unknown_user_and_bad_password_bodies_identical(self, client):
        unknown = client.post("/api/login", json={"username": "ghost", "password": "x"})
        wrong = client.post("/api/login", json={"username": "engineer", "password": "x"})
        assert unknown.status_code == wrong.status_code == 401
        assert unknown.content == wrong.content

    def test_eleventh_failure_in_a_minute_rate_limited(self, client):
        for _ in range(10):
            assert client.post("/api/login", json={"username": "pm", "password": "bad"}).status_code == 401
        response = client.post("/api/login", json={"username": "pm", "password": "bad"})
        assert response.status_code == 429
        assert response.json()["code"] == "rate_limited"

    def test_missing_field_is_validation_failed(self, client):
        response = client.post("/api/login", json={"username": "pm"})
        assert response.status_code == 422
        assert response.json()["code"] == "validation_failed"


# ---------------------------------------------------------------------------
# Layout round trips (the stored-vs-default serving sequence)
# ---------------------------------------------------------------------------


class TestGetLayout:
    def test_fresh_user_gets_role_default_byte_for_byte(self, client):
        token = login(client, "engineer")["token"]
        data, headers = fetch_layout(client, token)
        assert data == encode(compose_default(Role.ENGINEER, REGISTRY))
        assert decode(data).revision == 0
        assert headers[READ_ONLY_HEADER] == "false"

    def test_guest_gets_guest_default_read_only(self, client):
        data, headers = fetch_layout(client)
        assert data == encode(compose_default(Role.GUEST, REGISTRY))
        assert headers[READ_ONLY_HEADER] == "true"

    def test_get_after_put_returns_saved_document(self, client):
        token = login(client, "engineer")["token"]
        data, _ = fetch_layout(client, token)
        doc = decode(personalized(data, "u-engineer"))
        moved = replace(
            doc,
            instances=tuple(
                replace(inst, placement=Placement(0, 20, 4, 6)) if inst.component_id == "chat" else inst
                for inst in doc.instances
            ),
        )
        put = client.put("/api/layout", content=encode(moved), headers=auth(token))
        assert put.status_code == 200
        assert put.json() == {"revision": 1}
        after, _ = fetch_layout(client, token)
        assert after == encode(replace(moved, revision=1))


class TestPutLayout:
    def test_requires_token(self, client):
        response = client.put("/api/layout", content=b"{}", headers={})
        assert response.status_code == 401
        assert response.json()["code"] == "unauthorized"

    def test_role_restricted_component_rejected_with_report(self, client):
        token = login(client, "engineer")["token"]
        data, _ = fetch_layout(client, token)
        doc = decode(personalized(data, "u-engineer"))
        smuggled = replace(
            doc,
            instances=doc.instances
            + (decode(encode(compose_default(Role.ADMINISTRATOR, REGISTRY))).instance("user-log-1"),),
        )
        smuggled = replace(
            smuggled,
            instances=tuple(
                replace(inst, placement=Placement(0, 30, 6, 4)) if inst.component_id == "user-log" else inst
                for inst in smuggled.instances
            ),
        )
        response = client.put("/api/layout", content=encode(smuggled), headers=auth(token))
        assert response.status_code == 422
        body = response.json()
        assert body["code"] == "validation_failed"
        assert any(v["code"] == "role_forbidden" for v in body["details"]["violations"])

    def test_stale_revision_conflicts(self, client):
        token = login(client, "engineer")["token"]
        data, _ = fetch_layout(client, token)
        doc = personalized(data, "u-engineer")
        assert client.put("/api/layout", content=doc, headers=auth(token)).status_code == 200
        response = client.put("/api/layout", content=doc, headers=auth(token))
        assert response.status_code == 409
        assert response.json()["code"] == "revision_conflict"

    def test_owner_mismatch_forbidden(self, client):
        token = login(client, "engineer")["token"]
        data, _ = fetch_layout(client, token)
        response = client.put("/api/layout", content=personalized(data, "u-staff"), headers=auth(token))
        assert response.status_code == 403
        assert response.json()["code"] == "forbidden"

    def test_role_mismatch_forbidden(self, client):
        token = login(client, "engineer")["token"]
        staff_doc = replace(compose_default(Role.STAFF_MEMBER, REGISTRY), owner="u-engineer")
        response = client.put("/api/layout", content=encode(staff_doc), headers=auth(token))
        assert response.status_code == 403

    def test_malformed_body_bad_request(self, client):
        token = login(client, "engineer")["token"]
        response = client.put("/api/layout", content=b'{"grid": ', headers=auth(token))
        assert response.status_code == 400
        assert response.json()["code"] == "bad_request"

    def test_unsupported_schema_version(self, client):
        token = login(client, "engineer")["token"]
        data, _ = fetch_layout(client, token)
        obj = json.loads(personalized(data, "u-engineer"))
        obj["schema_version"] = 999
        response = client.put("/api/layout", content=json.dumps(obj).encode(), headers=auth(token))
        assert response.status_code == 422

    def test_rejected_save_is_audited(self, client, store):
        admin_token = login(client, "admin")["token"]
        token = login(client, "engineer")["token"]
        data, _ = fetch_layout(client, token)
        obj = json.loads(personalized(data, "u-engineer"))
        obj["theme"]["background_color"] = "not-a-color"
        assert client.put("/api/layout", content=json.dumps(obj).encode(), headers=auth(token)).status_code == 422
        rejected = store.query_audit(event_type=EventType.LAYOUT_EDIT_REJECTED)
        assert len(rejected) == 1
        assert rejected[0].user_id == "u-engineer"

    def test_theme_change_is_audited(self, client, store):
        token = login(client, "engineer")["token"]
        data, _ = fetch_layout(client, token)
        doc = decode(personalized(data, "u-engineer"))
        recolored = replace(doc, theme=Theme(background_color="#101316"))
        assert client.put("/api/layout", content=encode(recolored), headers=auth(token)).status_code == 200
        changes = store.query_audit(event_type=EventType.THEME_CHANGE)
        assert len(changes) == 1
        assert changes[0].payload["background_color"] == "#101316"


class TestDeleteLayout:
    def test_delete_restores_default(self, client):
        token = login(client, "engineer")["token"]
        data, _ = fetch_layout(client, token)
        assert client.put("/api/layout", content=personalized(data, "u-engineer"), headers=auth(token)).status_code == 200
        assert client.delete("/api/layout", headers=auth(token)).status_code == 204
        after, _ = fetch_layout(client, token)
        assert after == encode(compose_default(Role.ENGINEER, REGISTRY))

    def test_delete_without_saved_layout_is_fine(self, client):
        token = login(client, "staff")["token"]
        assert client.delete("/api/layout", headers=auth(token)).status_code == 204

    def test_guest_delete_unauthorized(self, client):
        response = client.delete("/api/layout")
        assert response.status_code == 401


# ---------------------------------------------------------------------------
# Components, user details, audit, chat, PDM data
# ---------------------------------------------------------------------------


class TestComponents:
    def test_admin_sees_user_log_engineer_does_not(self, client):
        admin_ids = {d["component_id"] for d in client.get("/api/components", headers=auth(login(client, "admin")["token"])).json()}
        engineer_ids = {
            d["component_id"] for d in client.get("/api/components", headers=auth(login(client, "engineer")["token"])).json()
        }
        assert "user-log" in admin_ids
        assert "user-log" not in engineer_ids

    def test_guest_sees_only_guest_visible(self, client):
        ids = [d["component_id"] for d in client.get("/api/components").json()]
        assert ids == ["product-search"]

    def test_sorted_by_category_then_id(self, client):
        listed = client.get("/api/components", headers=auth(login(client, "admin")["token"])).json()
        keys = [(d["category"], d["component_id"]) for d in listed]
        assert keys == sorted(keys)


class TestUserDetails:
    def test_get_and_put(self, client):
        token = login(client, "staff")["token"]
        before = client.get("/api/user/details", headers=auth(token)).json()
        assert before["username"] == "staff"
        updated = client.put("/api/user/details", json={"department": "Shipping"}, headers=auth(token))
        assert updated.status_code == 200
        assert updated.json()["details"]["department"] == "Shipping"

    def test_guest_unauthorized(self, client):
        assert client.get("/api/user/details").status_code == 401

    def test_unknown_field_rejected(self, client):
        token = login(client, "staff")["token"]
        response = client.put("/api/user/details", json={"shoe_size": "44"}, headers=auth(token))
        assert response.status_code == 422


class TestAudit:
    def test_engineer_forbidden(self, client):
        response = client.get("/api/audit", headers=auth(login(client, "engineer")["token"]))
        assert response.status_code == 403
        assert response.json()["code"] == "forbidden"

    def test_guest_unauthorized(self, client):
        assert client.get("/api/audit").status_code == 401

    def test_admin_reads_entries(self, client):
        token = login(client, "admin")["token"]
        entries = client.get("/api/audit", headers=auth(token)).json()
        assert any(entry["event_type"] == "Login" for entry in entries)

    def test_event_type_filter(self, client):
        token = login(client, "admin")["token"]
        login(client, "engineer")
        entries = client.get("/api/audit", params={"event_type": "Login"}, headers=auth(token)).json()
        assert entries and all(entry["event_type"] == "Login" for entry in entries)

    def test_unknown_event_type_bad_request(self, client):
        token = login(client, "admin")["token"]
        assert client.get("/api/audit", params={"event_type": "Sneezed"}, headers=auth(token)).status_code == 400

    def test_limit_cap(self, client):
        token = login(client, "admin")["token"]
        assert client.get("/api/audit", params={"limit": 2000}, headers=auth(token)).status_code == 400


class TestChat:
    def test_guest_cannot_post(self, client):
        assert client.post("/api/chat", json={"body": "hi"}).status_code == 401

    def test_post_and_poll(self, client):
        staff = login(client, "staff")["token"]
        pm = login(client, "pm")["token"]
        seq = client.post("/api/chat", json={"body": "standup at 9"}, headers=auth(staff)).json()["seq"]
        messages = client.get("/api/chat", params={"since_seq": seq - 1}, headers=auth(pm)).json()
        assert messages[0]["body"] == "standup at 9"
        assert messages[0]["from_user_id"] == "u-staff"

    def test_empty_body_rejected(self, client):
        token = login(client, "staff")["token"]
        response = client.post("/api/chat", json={"body": "  "}, headers=auth(token))
        assert response.status_code == 422


class TestPdmData:
    def test_products_listed_for_guest(self, client):
        products = client.get("/api/pdm/products").json()
        assert len(products) == 10

    def test_projects_listed(self, client):
        projects = client.get("/api/pdm/projects").json()
        assert len(projects) == 5
        assert {p["status"] for p in projects} <= {"Planned", "Active", "Done"}


# ---------------------------------------------------------------------------
# Protocol conformance
# ---------------------------------------------------------------------------


class TestErrorSchema:
    def trigger(self, client, store, code: str):
        if code == "bad_request":
            token = login(client, "engineer")["token"]
            return client.put("/api/layout", content=b"{", headers=auth(token))
        if code == "denied":
            return client.post("/api/login", json={"username": "x", "password": "y"})
        if code == "unauthorized":
            return client.get("/api/user/details")
        if code == "forbidden":
            return client.get("/api/audit", headers=auth(login(client, "engineer")["token"]))
        if code == "not_found":
            return client.get("/api/no-such-endpoint")
        if code == "method_not_allowed":
            return client.patch("/api/layout")
        if code == "revision_conflict":
            token = login(client, "engineer")["token"]
            data, _ = fetch_layout(client, token)
            doc = personalized(data, "u-engineer")
            client.put("/api/layout", content=doc, headers=auth(token))
            return client.put("/api/layout", content=doc, headers=auth(token))
        if code == "validation_failed":
            return client.post("/api/login", json={})
        if code == "rate_limited":
            for _ in range(10):
                client.post("/api/login", json={"username": "rl", "password": "x"})
            return client.post("/api/login", json={"username": "rl", "password": "x"})
        raise AssertionError(code)

    @pytest.mark.parametrize("code", [c for c in STATUS_BY_CODE if c != "internal_error"])
    def test_every_code_maps_to_its_status(self, client, store, code):
        response = self.trigger(client, store, code)
        assert response.status_code == STATUS_BY_CODE[code]
        body = response.json()
        assert body["code"] == code
        assert isinstance(body["message"], str)
        assert set(body) <= {"code", "message", "details"}

    def test_internal_error_shape(self, store, monkeypatch):
        app = create_app(store, sessions=SessionManager(store))
        with TestClient(app, raise_server_exceptions=False) as client:
            monkeypatch.setattr(store, "list_products", lambda: 1 / 0)
            response = client.get("/api/pdm/products")
        assert response.status_code == 500
        assert response.json() == {"code": "internal_error", "message": "internal error"}


class TestSequenceFlows:
    def test_get_modify_put_logout_login_get(self, client):
        token = login(client, "engineer")["token"]
        data, _ = fetch_layout(client, token)
        doc = decode(personalized(data, "u-engineer"))
        modified = replace(doc, theme=Theme(accent_color="#AA5500"))
        assert client.put("/api/layout", content=encode(modified), headers=auth(token)).status_code == 200
        assert client.post("/api/logout", headers=auth(token)).status_code == 204
        assert client.get("/api/layout", headers=auth(token)).content == encode(
            compose_default(Role.GUEST, REGISTRY)
        )  # stale token degrades to guest
        fresh = login(client, "engineer")["token"]
        after, _ = fetch_layout(client, fresh)
        assert after == encode(replace(modified, revision=1))

    def test_get_delete_get_returns_role_default(self, client):
        token = login(client, "pm")["token"]
        data, _ = fetch_layout(client, token)
        assert client.put("/api/layout", content=personalized(data, "u-pm"), headers=auth(token)).status_code == 200
        assert client.delete("/api/layout", headers=auth(token)).status_code == 204
        after, _ = fetch_layout(client, token)
        assert after == encode(compose_default(Role.PROJECT_MANAGER, REGISTRY))


class TestStatelessness:
    def test_two_servers_same_store_agree_on_reads(self, store):
        sessions = SessionManager(store)
        with TestClient(create_app(store, sessions=sessions)) as a, TestClient(create_app(store, sessions=SessionManager(store))) as b:
            token = a.post("/api/login", json={"username": "engineer", "password": "engineer-pw"}).json()["token"]
            for path in ["/api/layout", "/api/components", "/api/pdm/products", "/api/pdm/projects"]:
                ra = a.get(path, headers={SESSION_HEADER: token})
                rb = b.get(path, headers={SESSION_HEADER: token})
                assert ra.status_code == rb.status_code == 200
                assert ra.content == rb.content
