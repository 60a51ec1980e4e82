"""Catalog of placeable dashboard components and per-role default layouts.

The catalog is fixed at build time; extensibility lives in the descriptor
data model, not in runtime plugin loading. Snapshots are immutable, so any
number of threads may read one concurrently.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, NamedTuple

from .layout import (
    ComponentInstance,
    GridSpec,
    LayoutDocument,
    Theme,
    canonical_json_bytes,
    component_visible_to,
    find_free_slot,
    generate_instance_id,
)
from .roles import Right, Role

__all__ = [
    "Category",
    "ComponentDescriptor",
    "RegistrySnapshot",
    "Size",
    "builtin_catalog",
    "catalog_content_hash",
    "compose_default",
    "descriptor_to_obj",
    "list_visible",
]


class Size(NamedTuple):
    width: int
    height: int


class Category(Enum):
    PDM_OPERATIONS = "pdm-operations"
    PERSONAL = "personal"
    COMMUNICATION = "communication"
    SYSTEM = "system"


@dataclass(frozen=True)
class ComponentDescriptor:
    """Registry entry for one addable component.

    `required_right` of None means the component is visible to every
    logged-in role; guests additionally need `guest_visible`. `singleton`
    components may appear at most once per document.
    """

    component_id: str
    display_name: str
    category: Category
    default_size: Size
    min_size: Size
    max_size: Size
    required_right: Right | None = None
    singleton: bool = False
    guest_visible: bool = False

    def __post_init__(self) -> None:
        if not (
            self.min_size.width <= self.default_size.width <= self.max_size.width
            and self.min_size.height <= self.default_size.height <= self.max_size.height
        ):
            raise ValueError(f"{self.component_id}: sizes must satisfy min <= default <= max componentwise")


@dataclass(frozen=True)
class RegistrySnapshot:
    """Immutable view of the registry at one version."""

    descriptors: dict[str, ComponentDescriptor] = field(default_factory=dict)
    version: int = 1

    def __post_init__(self) -> None:
        for component_id, descriptor in self.descriptors.items():
            if component_id != descriptor.component_id:
                raise ValueError(f"descriptor map key {component_id!r} != descriptor id {descriptor.component_id!r}")
        object.__setattr__(self, "descriptors", dict(self.descriptors))

    def get(self, component_id: str) -> ComponentDescriptor | None:
        return self.descriptors.get(component_id)


_BUILTIN_DESCRIPTORS = (
    ComponentDescriptor(
        component_id="interface-setting",
        display_name="Interface Setting",
        category=Category.SYSTEM,
        default_size=Size(4, 3),
        min_size=Size(3, 2),
        max_size=Size(6, 6),
    ),
    ComponentDescriptor(
        component_id="user-log",
        display_name="User Log",
        category=Category.SYSTEM,
        default_size=Size(6, 4),
        min_size=Size(4, 3),
        max_size=Size(12, 10),
        required_right=Right.VIEW_AUDIT_LOG,
        singleton=True,
    ),
    ComponentDescriptor(
        component_id="user-details",
        display_name="User Details",
        category=Category.PERSONAL,
        default_size=Size(4, 3),
        min_size=Size(3, 2),
        max_size=Size(6, 6),
        singleton=True,
    ),
    ComponentDescriptor(
        component_id="chat",
        display_name="Chat",
        category=Category.COMMUNICATION,
        default_size=Size(4, 6),
        min_size=Size(3, 4),
        max_size=Size(6, 12),
        singleton=True,
    ),
    ComponentDescriptor(
        component_id="calendar",
        display_name="Calendar",
        category=Category.PERSONAL,
        default_size=Size(4, 3),
        min_size=Size(2, 2),
        max_size=Size(6, 4),
    ),
    ComponentDescriptor(
        component_id="product-search",
        display_name="Product Search",
        category=Category.PDM_OPERATIONS,
        default_size=Size(8, 4),
        min_size=Size(4, 2),
        max_size=Size(12, 12),
        guest_visible=True,
    ),
    ComponentDescriptor(
        component_id="project-list",
        display_name="Project List",
        category=Category.PDM_OPERATIONS,
        default_size=Size(6, 4),
        min_size=Size(4, 2),
        max_size=Size(12, 12),
    ),
    ComponentDescriptor(
        component_id="document-browser",
        display_name="Document Browser",
        category=Category.PDM_OPERATIONS,
        default_size=Size(6, 5),
        min_size=Size(4, 3),
        max_size=Size(12, 12),
    ),
)

_BUILTIN_SNAPSHOT = RegistrySnapshot(
    descriptors={descriptor.component_id: descriptor for descriptor in _BUILTIN_DESCRIPTORS},
    version=1,
)

#: Components each role's default layout starts from, in placement order.
DEFAULT_SEED_COMPONENTS: dict[Role, tuple[str, ...]] = {
    Role.BUSINESSMAN: ("project-list", "calendar"),
    Role.PROJECT_MANAGER: ("project-list", "product-search", "chat", "calendar"),
    Role.ENGINEER: ("product-search", "document-browser", "chat"),
    Role.STAFF_MEMBER: ("user-details", "chat", "calendar"),
    Role.ADMINISTRATOR: ("project-list", "product-search", "chat", "calendar", "user-log"),
    Role.GUEST: ("product-search",),
}

DEFAULT_THEME = Theme()


def builtin_catalog() -> RegistrySnapshot:
    """The fixed built-in component catalog."""
    return _BUILTIN_SNAPSHOT


def list_visible(registry: RegistrySnapshot, role: Role) -> list[ComponentDescriptor]:
    """Descriptors the role may place, sorted by (category, component_id)."""
    visible = [d for d in registry.descriptors.values() if component_visible_to(d, role)]
    visible.sort(key=lambda d: (d.category.value, d.component_id))
    return visible


def compose_default(role: Role, registry: RegistrySnapshot | None = None) -> LayoutDocument:
    """System-composed starting layout for a role.

    Deterministic for a fixed (role, registry version): seed components are
    placed first-fit in seed order on the default grid. Owner is the
    distinguished `default:<role>` marker and the revision is 0.
    """
    registry = registry or builtin_catalog()
    doc = LayoutDocument(owner=f"default:{role.value}", role=role, grid=GridSpec(), theme=DEFAULT_THEME)
    for component_id in DEFAULT_SEED_COMPONENTS[role]:
        descriptor = registry.get(component_id)
        if descriptor is None:
            raise ValueError(f"default seed references unknown component {component_id!r}")
        placement = find_free_slot(doc, descriptor.default_size.width, descriptor.default_size.height)
        instance = ComponentInstance(
            instance_id=generate_instance_id(doc, component_id),
            component_id=component_id,
            placement=placement,
        )
        doc = replace(doc, instances=doc.instances + (instance,))
    return doc


def descriptor_to_obj(descriptor: ComponentDescriptor) -> dict[str, Any]:
    """Plain-JSON form of a descriptor (the /api/components wire shape)."""
    return {
        "component_id": descriptor.component_id,
        "display_name": descriptor.display_name,
        "category": descriptor.category.value,
        "default_size": {"width": descriptor.default_size.width, "height": descriptor.default_size.height},
        "min_size": {"width": descriptor.min_size.width, "height": descriptor.min_size.height},
        "max_size": {"width": descriptor.max_size.width, "height": descriptor.max_size.height},
        "required_right": descriptor.required_right.value if descriptor.required_right else None,
        "singleton": descriptor.singleton,
        "guest_visible": descriptor.guest_visible,
    }


def catalog_content_hash(registry: RegistrySnapshot | None = None) -> str:
    """SHA-256 over the canonical JSON of the catalog; pinned by a golden test."""
    registry = registry or builtin_catalog()
    obj = {
        "version": registry.version,
        "descriptors": [descriptor_to_obj(d) for d in sorted(registry.descriptors.values(), key=lambda d: d.component_id)],
    }
    return hashlib.sha256(canonical_json_bytes(obj)).hexdigest()
