"""Tests for the component catalog, role visibility, and default layouts."""

from __future__ import annotations

import itertools

import pytest

from flexpdm.layout import encode, validate
from flexpdm.registry import (
    DEFAULT_SEED_COMPONENTS,
    builtin_catalog,
    catalog_content_hash,
    compose_default,
    descriptor_to_obj,
    list_visible,
)
from flexpdm.roles import Right, Role

# Pinned: any intentional catalog change must update this value.
CATALOG_SHA256 = "ea14f4c43a5b0a7bf8a240c13136936259f724dd5a11263df53e1afd6e5a996b"

REGISTRY = builtin_catalog()


class TestRoles:
    def test_guest_has_view_only(self):
        assert Role.GUEST.rights == {Right.VIEW_PDM}

    def test_administrator_rights_superset_of_all(self):
        for role in Role:
            assert role.rights <= Role.ADMINISTRATOR.rights

    def test_from_name_round_trip(self):
        for role in Role:
            assert Role.from_name(role.value) is role

    def test_from_name_unknown(self):
        with pytest.raises(ValueError):
            Role.from_name("Nobody")


class TestCatalog:
    @pytest.mark.parametrize(
        "component_id",
        ["interface-setting", "user-log", "user-details", "chat", "calendar", "product-search"],
    )
    def test_contains(self, component_id):
        assert REGISTRY.get(component_id) is not None

    def test_user_log_requires_audit_right(self):
        assert REGISTRY.get("user-log").required_right == Right.VIEW_AUDIT_LOG

    @pytest.mark.parametrize("component_id", ["user-log", "user-details", "chat"])
    def test_singletons(self, component_id):
        assert REGISTRY.get(component_id).singleton

    def test_size_bounds_sane(self):
        for descriptor in REGISTRY.descriptors.values():
            assert descriptor.min_size.width <= descriptor.default_size.width <= descriptor.max_size.width
            assert descriptor.min_size.height <= descriptor.default_size.height <= descriptor.max_size.height

    def test_content_hash_pinned(self):
        assert catalog_content_hash() == CATALOG_SHA256


class TestVisibility:
    def test_user_log_hidden_from_engineer(self):
        assert "user-log" not in {d.component_id for d in list_visible(REGISTRY, Role.ENGINEER)}

    def test_user_log_shown_to_administrator(self):
        assert "user-log" in {d.component_id for d in list_visible(REGISTRY, Role.ADMINISTRATOR)}

    def test_guest_sees_exactly_guest_visible(self):
        expected = {d.component_id for d in REGISTRY.descriptors.values() if d.guest_visible and d.required_right is None}
        assert {d.component_id for d in list_visible(REGISTRY, Role.GUEST)} == expected

    def test_visibility_monotone_in_rights(self):
        for a, b in itertools.product(Role, Role):
            if a.rights >= b.rights and a is not Role.GUEST and b is not Role.GUEST:
                ids_a = {d.component_id for d in list_visible(REGISTRY, a)}
                ids_b = {d.component_id for d in list_visible(REGISTRY, b)}
                assert ids_a >= ids_b

    def test_sorted_by_category_then_id(self):
        listed = list_visible(REGISTRY, Role.ADMINISTRATOR)
        keys = [(d.category.value, d.component_id) for d in listed]
        assert keys == sorted(keys)


class TestComposeDefault:
    @pytest.mark.parametrize("role", list(Role))
    def test_validates_cleanly(self, role):
        assert validate(compose_default(role, REGISTRY), REGISTRY).ok

    @pytest.mark.parametrize("role", list(Role))
    def test_deterministic_bytes(self, role):
        assert encode(compose_default(role, REGISTRY)) == encode(compose_default(role, REGISTRY))

    def test_administrator_default_includes_user_log(self):
        doc = compose_default(Role.ADMINISTRATOR, REGISTRY)
        assert "user-log" in {inst.component_id for inst in doc.instances}

    @pytest.mark.parametrize("role", list(Role))
    def test_owner_and_revision(self, role):
        doc = compose_default(role, REGISTRY)
        assert doc.owner == f"default:{role.value}"
        assert doc.revision == 0

    @pytest.mark.parametrize("role", list(Role))
    def test_seed_components_all_placed(self, role):
        doc = compose_default(role, REGISTRY)
        assert sorted(inst.component_id for inst in doc.instances) == sorted(DEFAULT_SEED_COMPONENTS[role])

    @pytest.mark.parametrize("role", list(Role))
    def test_every_default_component_visible_to_role(self, role):
        doc = compose_default(role, REGISTRY)
        visible = {d.component_id for d in list_visible(REGISTRY, role)}
        assert {inst.component_id for inst in doc.instances} <= visible


class TestWireShape:
    def test_descriptor_obj_fields(self):
        obj = descriptor_to_obj(REGISTRY.get("user-log"))
        assert obj["required_right"] == "ViewAuditLog"
        assert obj["singleton"] is True
        assert obj["default_size"] == {"width": 6, "height": 4}
        assert obj["category"] == "system"
