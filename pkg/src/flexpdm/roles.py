"""User roles and the rights they carry.

Roles gate two things: which dashboard components a user may place
(checked by the layout validator and the component registry) and which
API endpoints a user may call. Rights are fixed per role; there is no
per-user grant table.
"""

from __future__ import annotations

from enum import Enum


class Right(Enum):
    """A capability a role grants."""

    VIEW_PDM = "ViewPDM"
    EDIT_OWN_LAYOUT = "EditOwnLayout"
    VIEW_AUDIT_LOG = "ViewAuditLog"
    MANAGE_USERS = "ManageUsers"


class Role(Enum):
    """A user category. The value is the wire/CLI spelling."""

    GUEST = "Guest"
    STAFF_MEMBER = "StaffMember"
    ENGINEER = "Engineer"
    PROJECT_MANAGER = "ProjectManager"
    BUSINESSMAN = "Businessman"
    ADMINISTRATOR = "Administrator"

    @property
    def rights(self) -> frozenset[Right]:
        return _ROLE_RIGHTS[self]

    @classmethod
    def from_name(cls, name: str) -> Role:
        """Resolve a wire/CLI role name; raises ValueError for unknown names."""
        for member in cls:
            if member.value == name:
                return member
        raise ValueError(f"unknown role: {name!r}")


_STANDARD_RIGHTS = frozenset({Right.VIEW_PDM, Right.EDIT_OWN_LAYOUT})

_ROLE_RIGHTS: dict[Role, frozenset[Right]] = {
    Role.GUEST: frozenset({Right.VIEW_PDM}),
    Role.STAFF_MEMBER: _STANDARD_RIGHTS,
    Role.ENGINEER: _STANDARD_RIGHTS,
    Role.PROJECT_MANAGER: _STANDARD_RIGHTS,
    Role.BUSINESSMAN: _STANDARD_RIGHTS,
    # Administrator holds every right any other role holds.
    Role.ADMINISTRATOR: frozenset(Right),
}
