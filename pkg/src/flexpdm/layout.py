"""Pure layout document model.

A layout document describes one user's dashboard: a column grid, a set of
placed component instances, and a theme. Everything in this module is an
immutable value and every operation is a pure function, so documents can be
shared freely across threads.

Validation never raises; it returns a report listing every violation.
Edits (`apply_edit`) either return a new valid document or raise a typed
error. `encode`/`decode` define the canonical JSON carrier used by the
store, the wire protocol, and `.layout.json` files.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import TYPE_CHECKING, Any, Iterator, Mapping, Union

from .roles import Role

if TYPE_CHECKING:
    from .registry import ComponentDescriptor, RegistrySnapshot

SCHEMA_VERSION = 1

DEFAULT_GRID_COLUMNS = 12
DEFAULT_ROW_UNIT_PX = 24

MAX_GRID_COLUMNS = 64
MIN_ROW_UNIT_PX = 8
MAX_ROW_UNIT_PX = 256

MIN_FONT_SIZE_PT = 8
MAX_FONT_SIZE_PT = 24

#: Font tokens the validator accepts. Published to clients via the protocol
#: document; the web client mirrors this list.
ALLOWED_FONT_FAMILIES = (
    "arial",
    "courier-new",
    "georgia",
    "helvetica",
    "tahoma",
    "times-new-roman",
    "verdana",
)

_COLOR_RE = re.compile(r"^#[0-9A-Fa-f]{6}$")


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------


class LayoutError(Exception):
    """Base class for layout operation failures."""


class UnknownInstance(LayoutError):
    """An edit referenced an instance_id not present in the document."""

    def __init__(self, instance_id: str):
        super().__init__(f"no instance with id {instance_id!r}")
        self.instance_id = instance_id


class WidthExceedsGrid(LayoutError):
    """A requested slot is wider than the grid itself."""


class GridMismatch(LayoutError):
    """diff() requires both documents to share a grid."""


class RoleMismatch(LayoutError):
    """diff() requires both documents to share a role."""


class EditRejected(LayoutError):
    """An edit would have produced an invalid document.

    `code` names the first violation the edit introduced; `report` carries
    the full validation report when one was produced.
    """

    def __init__(self, code: ViolationCode, message: str, report: ValidationReport | None = None):
        super().__init__(message)
        self.code = code
        self.report = report


class DocumentError(LayoutError):
    """Base class for decode failures."""


class MalformedDocument(DocumentError):
    """Input is not syntactically valid JSON."""


class UnsupportedSchemaVersion(DocumentError):
    def __init__(self, version: int):
        super().__init__(f"unsupported schema_version {version}; this build reads version {SCHEMA_VERSION}")
        self.version = version


class FieldViolation(DocumentError):
    """A document field is missing, has the wrong type, or is out of range."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path or '<document>'}: {message}")
        self.path = path


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Column grid the document is laid out on.

    `row_unit_px` is a presentational hint for renderers; it plays no part
    in placement or collision logic.
    """

    columns: int = DEFAULT_GRID_COLUMNS
    row_unit_px: int = DEFAULT_ROW_UNIT_PX

    def __post_init__(self) -> None:
        if not isinstance(self.columns, int) or not 1 <= self.columns <= MAX_GRID_COLUMNS:
            raise ValueError(f"columns must be an integer in [1, {MAX_GRID_COLUMNS}], got {self.columns!r}")
        if not isinstance(self.row_unit_px, int) or not MIN_ROW_UNIT_PX <= self.row_unit_px <= MAX_ROW_UNIT_PX:
            raise ValueError(
                f"row_unit_px must be an integer in [{MIN_ROW_UNIT_PX}, {MAX_ROW_UNIT_PX}], got {self.row_unit_px!r}"
            )


@dataclass(frozen=True)
class Placement:
    """Rectangle of grid cells occupied by one component instance."""

    col: int
    row: int
    width: int
    height: int

    def __post_init__(self) -> None:
        for name in ("col", "row"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {value!r}")
        for name in ("width", "height"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")

    def intersects(self, other: Placement) -> bool:
        return (
            self.col < other.col + other.width
            and other.col < self.col + self.width
            and self.row < other.row + other.height
            and other.row < self.row + self.height
        )


@dataclass(frozen=True)
class Theme:
    """Document-wide look and feel.

    Construction only checks types; semantic rules (color grammar, the font
    allow-list, the size range) are enforced by `validate` so that a decoded
    document with a bad theme is reported, not refused.
    """

    background_color: str = "#FFFFFF"
    accent_color: str = "#1F6FEB"
    font_family: str = "arial"
    font_size_pt: int = 12
    background_image: str | None = None

    def __post_init__(self) -> None:
        for name in ("background_color", "accent_color", "font_family"):
            if not isinstance(getattr(self, name), str):
                raise ValueError(f"{name} must be a string")
        if not isinstance(self.font_size_pt, int) or isinstance(self.font_size_pt, bool):
            raise ValueError("font_size_pt must be an integer")
        if self.background_image is not None and not isinstance(self.background_image, str):
            raise ValueError("background_image must be a string or None")


@dataclass(frozen=True)
class ComponentInstance:
    """One placed component: a registry id plus a rectangle and local options."""

    instance_id: str
    component_id: str
    placement: Placement
    settings: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not isinstance(self.instance_id, str) or not self.instance_id:
            raise ValueError("instance_id must be a non-empty string")
        if not isinstance(self.component_id, str) or not self.component_id:
            raise ValueError("component_id must be a non-empty string")
        for key, value in self.settings.items():
            if not isinstance(key, str) or not isinstance(value, str):
                raise ValueError("settings must map strings to strings")
        # Defensive copy: instances are supposed to be immutable values.
        object.__setattr__(self, "settings", dict(self.settings))


@dataclass(frozen=True)
class LayoutDocument:
    """A complete dashboard description.

    Instances are kept in a canonical order (sorted by instance_id) so that
    documents with the same content compare equal and serialize to identical
    bytes regardless of the order edits happened in.

    `revision` is the optimistic-concurrency counter owned by the store;
    pure edits never touch it.
    """

    owner: str
    role: Role
    grid: GridSpec = field(default_factory=GridSpec)
    instances: tuple[ComponentInstance, ...] = ()
    theme: Theme = field(default_factory=Theme)
    revision: int = 0
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self) -> None:
        if not isinstance(self.owner, str) or not self.owner:
            raise ValueError("owner must be a non-empty string")
        if not isinstance(self.role, Role):
            raise ValueError(f"role must be a Role, got {self.role!r}")
        if not isinstance(self.revision, int) or self.revision < 0:
            raise ValueError("revision must be a non-negative integer")
        if not isinstance(self.schema_version, int) or self.schema_version < 1:
            raise ValueError("schema_version must be a positive integer")
        ordered = tuple(sorted(self.instances, key=lambda inst: inst.instance_id))
        object.__setattr__(self, "instances", ordered)

    def instance(self, instance_id: str) -> ComponentInstance | None:
        for inst in self.instances:
            if inst.instance_id == instance_id:
                return inst
        return None

    def instance_ids(self) -> set[str]:
        return {inst.instance_id for inst in self.instances}


# ---------------------------------------------------------------------------
# Edits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AddComponent:
    """Place a new instance of a registry component.

    Without a placement the first free slot (row-major) at the descriptor's
    default size is used. Without an instance_id a deterministic
    `<component_id>-<n>` id is generated; diff() supplies explicit ids so
    that patching reproduces the target document exactly.
    """

    component_id: str
    placement: Placement | None = None
    settings: Mapping[str, str] = field(default_factory=dict)
    instance_id: str | None = None


@dataclass(frozen=True)
class RemoveComponent:
    instance_id: str


@dataclass(frozen=True)
class MoveResize:
    instance_id: str
    placement: Placement


@dataclass(frozen=True)
class SetTheme:
    theme: Theme


@dataclass(frozen=True)
class SetSetting:
    """Set one component-local option; a None value removes the key."""

    instance_id: str
    key: str
    value: str | None


LayoutEdit = Union[AddComponent, RemoveComponent, MoveResize, SetTheme, SetSetting]


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


class ViolationCode(Enum):
    OVERLAP = "overlap"
    OUT_OF_BOUNDS = "out_of_bounds"
    UNKNOWN_COMPONENT = "unknown_component"
    ROLE_FORBIDDEN = "role_forbidden"
    SIZE_BOUNDS = "size_bounds"
    DUPLICATE_INSTANCE_ID = "duplicate_instance_id"
    SINGLETON_VIOLATION = "singleton_violation"
    BAD_THEME = "bad_theme"


_CODE_ORDER = {code: index for index, code in enumerate(ViolationCode)}


@dataclass(frozen=True)
class Violation:
    code: ViolationCode
    detail: str
    subject: str

    def to_obj(self) -> dict[str, str]:
        return {"code": self.code.value, "detail": self.detail, "subject": self.subject}


@dataclass(frozen=True)
class ValidationReport:
    """Every violation found in a document; empty means valid."""

    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> list[ViolationCode]:
        return [v.code for v in self.violations]

    def __iter__(self) -> Iterator[Violation]:
        return iter(self.violations)

    def __len__(self) -> int:
        return len(self.violations)

    def to_obj(self) -> list[dict[str, str]]:
        return [v.to_obj() for v in self.violations]


def component_visible_to(descriptor: ComponentDescriptor, role: Role) -> bool:
    """Visibility rule shared by the validator and the registry listing."""
    if descriptor.required_right is not None and descriptor.required_right not in role.rights:
        return False
    if role is Role.GUEST and not descriptor.guest_visible:
        return False
    return True


def validate_theme(theme: Theme) -> list[tuple[str, str]]:
    """Return (field path, problem) pairs for a theme; empty when clean."""
    problems: list[tuple[str, str]] = []
    if not _COLOR_RE.match(theme.background_color):
        problems.append(("theme.background_color", f"{theme.background_color!r} is not a #RRGGBB color"))
    if not _COLOR_RE.match(theme.accent_color):
        problems.append(("theme.accent_color", f"{theme.accent_color!r} is not a #RRGGBB color"))
    if theme.font_family not in ALLOWED_FONT_FAMILIES:
        problems.append(("theme.font_family", f"{theme.font_family!r} is not an allowed font family"))
    if not MIN_FONT_SIZE_PT <= theme.font_size_pt <= MAX_FONT_SIZE_PT:
        problems.append(
            ("theme.font_size_pt", f"must be in [{MIN_FONT_SIZE_PT}, {MAX_FONT_SIZE_PT}], got {theme.font_size_pt}")
        )
    return problems


def validate(doc: LayoutDocument, registry: RegistrySnapshot) -> ValidationReport:
    """Check every document invariant against a registry snapshot.

    Returns every violation present, ordered by (instance position, code).
    Theme problems sort after all instance problems. Never mutates or raises.
    """
    found: list[tuple[int, Violation]] = []

    seen_ids: set[str] = set()
    singleton_positions: dict[str, int] = {}
    for index, inst in enumerate(doc.instances):
        if inst.instance_id in seen_ids:
            found.append(
                (
                    index,
                    Violation(
                        ViolationCode.DUPLICATE_INSTANCE_ID,
                        f"instance id {inst.instance_id!r} appears more than once",
                        inst.instance_id,
                    ),
                )
            )
        seen_ids.add(inst.instance_id)

        placement = inst.placement
        if placement.col + placement.width > doc.grid.columns:
            found.append(
                (
                    index,
                    Violation(
                        ViolationCode.OUT_OF_BOUNDS,
                        f"columns {placement.col}..{placement.col + placement.width - 1} exceed the"
                        f" {doc.grid.columns}-column grid",
                        inst.instance_id,
                    ),
                )
            )

        descriptor = registry.get(inst.component_id)
        if descriptor is None:
            found.append(
                (
                    index,
                    Violation(
                        ViolationCode.UNKNOWN_COMPONENT,
                        f"component {inst.component_id!r} is not in the registry",
                        inst.instance_id,
                    ),
                )
            )
            continue

        if not component_visible_to(descriptor, doc.role):
            found.append(
                (
                    index,
                    Violation(
                        ViolationCode.ROLE_FORBIDDEN,
                        f"component {inst.component_id!r} is not available to role {doc.role.value}",
                        inst.instance_id,
                    ),
                )
            )

        if not (
            descriptor.min_size.width <= placement.width <= descriptor.max_size.width
            and descriptor.min_size.height <= placement.height <= descriptor.max_size.height
        ):
            found.append(
                (
                    index,
                    Violation(
                        ViolationCode.SIZE_BOUNDS,
                        f"size {placement.width}x{placement.height} outside"
                        f" [{descriptor.min_size.width}x{descriptor.min_size.height},"
                        f" {descriptor.max_size.width}x{descriptor.max_size.height}]"
                        f" for {inst.component_id!r}",
                        inst.instance_id,
                    ),
                )
            )

        if descriptor.singleton:
            if inst.component_id in singleton_positions:
                found.append(
                    (
                        index,
                        Violation(
                            ViolationCode.SINGLETON_VIOLATION,
                            f"singleton component {inst.component_id!r} placed more than once",
                            inst.instance_id,
                        ),
                    )
                )
            else:
                singleton_positions[inst.component_id] = index

    for j in range(len(doc.instances)):
        for i in range(j):
            a, b = doc.instances[i], doc.instances[j]
            if a.placement.intersects(b.placement):
                found.append(
                    (
                        j,
                        Violation(
                            ViolationCode.OVERLAP,
                            f"instances {a.instance_id!r} and {b.instance_id!r} occupy intersecting cells",
                            b.instance_id,
                        ),
                    )
                )

    theme_position = len(doc.instances)
    for path, problem in validate_theme(doc.theme):
        found.append((theme_position, Violation(ViolationCode.BAD_THEME, problem, path)))

    found.sort(key=lambda entry: (entry[0], _CODE_ORDER[entry[1].code]))
    return ValidationReport(tuple(violation for _, violation in found))


# ---------------------------------------------------------------------------
# Placement search
# ---------------------------------------------------------------------------


def find_free_slot(doc: LayoutDocument, width: int, height: int) -> Placement:
    """First-fit placement scanning row-major (row ascending, then column).

    Rows are unbounded, so a slot always exists below the occupied area.
    Raises WidthExceedsGrid when the request is wider than the grid.
    """
    if width > doc.grid.columns:
        raise WidthExceedsGrid(f"width {width} exceeds the {doc.grid.columns}-column grid")
    taken = [inst.placement for inst in doc.instances]
    last_row = max((p.row + p.height for p in taken), default=0)
    for row in range(last_row + 1):
        for col in range(doc.grid.columns - width + 1):
            candidate = Placement(col=col, row=row, width=width, height=height)
            if not any(candidate.intersects(p) for p in taken):
                return candidate
    raise AssertionError("unreachable: the row below all instances is always free")


def generate_instance_id(doc: LayoutDocument, component_id: str) -> str:
    """Smallest `<component_id>-<n>` not already used in the document."""
    existing = doc.instance_ids()
    n = 1
    while f"{component_id}-{n}" in existing:
        n += 1
    return f"{component_id}-{n}"


# ---------------------------------------------------------------------------
# Edit application
# ---------------------------------------------------------------------------


def _checked(candidate: LayoutDocument, registry: RegistrySnapshot, context: str) -> LayoutDocument:
    report = validate(candidate, registry)
    if not report.ok:
        first = report.violations[0]
        raise EditRejected(first.code, f"{context}: {first.detail}", report)
    return candidate


def apply_edit(doc: LayoutDocument, edit: LayoutEdit, registry: RegistrySnapshot) -> LayoutDocument:
    """Apply one edit to a valid document, returning a new valid document.

    The revision is untouched; it only advances when the store persists.
    Raises EditRejected when the result would be invalid, UnknownInstance
    for edits addressing a missing instance.
    """
    if isinstance(edit, AddComponent):
        descriptor = registry.get(edit.component_id)
        if descriptor is None:
            raise EditRejected(
                ViolationCode.UNKNOWN_COMPONENT,
                f"cannot add unknown component {edit.component_id!r}",
            )
        placement = edit.placement
        if placement is None:
            try:
                placement = find_free_slot(doc, descriptor.default_size.width, descriptor.default_size.height)
            except WidthExceedsGrid as exc:
                raise EditRejected(ViolationCode.OUT_OF_BOUNDS, str(exc)) from exc
        instance_id = edit.instance_id or generate_instance_id(doc, edit.component_id)
        new_instance = ComponentInstance(
            instance_id=instance_id,
            component_id=edit.component_id,
            placement=placement,
            settings=dict(edit.settings),
        )
        candidate = replace(doc, instances=doc.instances + (new_instance,))
        return _checked(candidate, registry, f"adding {edit.component_id!r}")

    if isinstance(edit, RemoveComponent):
        if doc.instance(edit.instance_id) is None:
            raise UnknownInstance(edit.instance_id)
        remaining = tuple(inst for inst in doc.instances if inst.instance_id != edit.instance_id)
        return replace(doc, instances=remaining)

    if isinstance(edit, MoveResize):
        current = doc.instance(edit.instance_id)
        if current is None:
            raise UnknownInstance(edit.instance_id)
        if current.placement == edit.placement:
            return doc
        moved = replace(current, placement=edit.placement)
        instances = tuple(moved if inst.instance_id == edit.instance_id else inst for inst in doc.instances)
        candidate = replace(doc, instances=instances)
        return _checked(candidate, registry, f"moving {edit.instance_id!r}")

    if isinstance(edit, SetTheme):
        candidate = replace(doc, theme=edit.theme)
        return _checked(candidate, registry, "changing theme")

    if isinstance(edit, SetSetting):
        current = doc.instance(edit.instance_id)
        if current is None:
            raise UnknownInstance(edit.instance_id)
        settings = dict(current.settings)
        if edit.value is None:
            settings.pop(edit.key, None)
        else:
            settings[edit.key] = edit.value
        updated = replace(current, settings=settings)
        instances = tuple(updated if inst.instance_id == edit.instance_id else inst for inst in doc.instances)
        candidate = replace(doc, instances=instances)
        return _checked(candidate, registry, f"updating settings of {edit.instance_id!r}")

    raise TypeError(f"not a LayoutEdit: {edit!r}")


def apply_edits(doc: LayoutDocument, edits: list[LayoutEdit], registry: RegistrySnapshot) -> LayoutDocument:
    for edit in edits:
        doc = apply_edit(doc, edit, registry)
    return doc


# ---------------------------------------------------------------------------
# Diff
# ---------------------------------------------------------------------------


def diff(base: LayoutDocument, target: LayoutDocument) -> list[LayoutEdit]:
    """Edit list transforming `base` into `target` (ignoring revision).

    Emission order is removals, then moves, then adds, then settings and
    theme. Moves are ordered so that each lands on free cells; cyclic
    moves (e.g. two instances swapping places) are broken by first parking
    an instance in the unbounded space below everything. Adds come after
    moves because an added instance may target cells a move vacates.
    """
    if base.grid != target.grid:
        raise GridMismatch(f"grids differ: {base.grid} vs {target.grid}")
    if base.role != target.role:
        raise RoleMismatch(f"roles differ: {base.role.value} vs {target.role.value}")

    base_by_id = {inst.instance_id: inst for inst in base.instances}
    target_by_id = {inst.instance_id: inst for inst in target.instances}

    persisting = [
        iid
        for iid in base_by_id
        if iid in target_by_id and base_by_id[iid].component_id == target_by_id[iid].component_id
    ]
    removed = [inst.instance_id for inst in base.instances if inst.instance_id not in persisting]
    added = [inst for inst in target.instances if inst.instance_id not in persisting]

    edits: list[LayoutEdit] = [RemoveComponent(iid) for iid in removed]

    # Current occupancy while sequencing moves: persisting instances only.
    current: dict[str, Placement] = {iid: base_by_id[iid].placement for iid in persisting}
    pending: dict[str, Placement] = {
        iid: target_by_id[iid].placement for iid in persisting if base_by_id[iid].placement != target_by_id[iid].placement
    }

    def target_fits(iid: str, placement: Placement) -> bool:
        return not any(placement.intersects(other) for other_id, other in current.items() if other_id != iid)

    parked: set[str] = set()
    while pending:
        progressed = False
        for iid in sorted(pending):
            wanted = pending[iid]
            if target_fits(iid, wanted):
                edits.append(MoveResize(iid, wanted))
                current[iid] = wanted
                del pending[iid]
                progressed = True
        if pending and not progressed:
            # Every pending target is blocked by another pending instance
            # (a blocker at rest would contradict target validity). Park the
            # first such blocker below everything still in play.
            blockers = sorted(
                iid
                for iid in pending
                if iid not in parked
                and any(current[iid].intersects(pending[other]) for other in pending if other != iid)
            )
            blocker = blockers[0]
            park_row = max(
                max((p.row + p.height for p in current.values()), default=0),
                max((p.row + p.height for p in pending.values()), default=0),
            )
            placement = current[blocker]
            park = Placement(col=0, row=park_row, width=placement.width, height=placement.height)
            edits.append(MoveResize(blocker, park))
            current[blocker] = park
            parked.add(blocker)

    for inst in added:
        edits.append(
            AddComponent(
                component_id=inst.component_id,
                placement=inst.placement,
                settings=dict(inst.settings),
                instance_id=inst.instance_id,
            )
        )

    for iid in sorted(persisting):
        before, after = base_by_id[iid].settings, target_by_id[iid].settings
        for key in sorted(set(before) | set(after)):
            if before.get(key) != after.get(key):
                edits.append(SetSetting(iid, key, after.get(key)))

    if base.theme != target.theme:
        edits.append(SetTheme(target.theme))

    return edits


# ---------------------------------------------------------------------------
# Canonical serialization
# ---------------------------------------------------------------------------


def _placement_obj(placement: Placement) -> dict[str, int]:
    return {"col": placement.col, "row": placement.row, "width": placement.width, "height": placement.height}


def theme_to_obj(theme: Theme) -> dict[str, Any]:
    return {
        "background_color": theme.background_color,
        "accent_color": theme.accent_color,
        "font_family": theme.font_family,
        "font_size_pt": theme.font_size_pt,
        "background_image": theme.background_image,
    }


def document_to_obj(doc: LayoutDocument) -> dict[str, Any]:
    """Plain-JSON tree of a document (canonical key order applied by encode)."""
    return {
        "schema_version": doc.schema_version,
        "owner": doc.owner,
        "role": doc.role.value,
        "revision": doc.revision,
        "grid": {"columns": doc.grid.columns, "row_unit_px": doc.grid.row_unit_px},
        "instances": [
            {
                "instance_id": inst.instance_id,
                "component_id": inst.component_id,
                "placement": _placement_obj(inst.placement),
                "settings": dict(inst.settings),
            }
            for inst in doc.instances
        ],
        "theme": theme_to_obj(doc.theme),
    }


def canonical_json_bytes(obj: Any) -> bytes:
    """Canonical JSON: sorted keys, no insignificant whitespace, raw UTF-8."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def encode(doc: LayoutDocument) -> bytes:
    """Canonical byte form; equal documents give byte-identical output."""
    return canonical_json_bytes(document_to_obj(doc))


class _Reader:
    """Field-by-field extraction with error paths like `instances[2].placement.col`."""

    def __init__(self, obj: Any, path: str = ""):
        if not isinstance(obj, dict):
            raise FieldViolation(path, f"expected an object, got {type(obj).__name__}")
        self.obj = obj
        self.path = path

    def _at(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def require(self, key: str) -> Any:
        if key not in self.obj:
            raise FieldViolation(self._at(key), "missing required field")
        return self.obj[key]

    def string(self, key: str) -> str:
        value = self.require(key)
        if not isinstance(value, str):
            raise FieldViolation(self._at(key), f"expected a string, got {type(value).__name__}")
        return value

    def integer(self, key: str) -> int:
        value = self.require(key)
        if not isinstance(value, int) or isinstance(value, bool):
            raise FieldViolation(self._at(key), f"expected an integer, got {type(value).__name__}")
        return value

    def nested(self, key: str) -> _Reader:
        return _Reader(self.require(key), self._at(key))


def _decode_placement(reader: _Reader) -> Placement:
    try:
        return Placement(
            col=reader.integer("col"),
            row=reader.integer("row"),
            width=reader.integer("width"),
            height=reader.integer("height"),
        )
    except ValueError as exc:
        raise FieldViolation(reader.path, str(exc)) from exc


def _decode_theme(reader: _Reader) -> Theme:
    background_image = reader.obj.get("background_image")
    if background_image is not None and not isinstance(background_image, str):
        raise FieldViolation(reader._at("background_image"), "expected a string or null")
    try:
        return Theme(
            background_color=reader.string("background_color"),
            accent_color=reader.string("accent_color"),
            font_family=reader.string("font_family"),
            font_size_pt=reader.integer("font_size_pt"),
            background_image=background_image,
        )
    except ValueError as exc:
        raise FieldViolation(reader.path, str(exc)) from exc


def decode(data: bytes | str) -> LayoutDocument:
    """Parse a document from (possibly non-canonical) JSON bytes.

    Raises MalformedDocument for syntax errors, UnsupportedSchemaVersion
    for any version other than the current one, FieldViolation for
    missing/mistyped/out-of-range fields. Semantic layout rules are the
    validator's job, not the decoder's.
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedDocument(f"not valid UTF-8: {exc}") from exc
    else:
        text = data
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"not valid JSON: {exc}") from exc

    root = _Reader(obj)
    version = root.integer("schema_version")
    if version != SCHEMA_VERSION:
        raise UnsupportedSchemaVersion(version)

    role_name = root.string("role")
    try:
        role = Role.from_name(role_name)
    except ValueError as exc:
        raise FieldViolation("role", str(exc)) from exc

    grid_reader = root.nested("grid")
    try:
        grid = GridSpec(columns=grid_reader.integer("columns"), row_unit_px=grid_reader.integer("row_unit_px"))
    except ValueError as exc:
        raise FieldViolation("grid", str(exc)) from exc

    raw_instances = root.require("instances")
    if not isinstance(raw_instances, list):
        raise FieldViolation("instances", f"expected a list, got {type(raw_instances).__name__}")
    instances = []
    for index, raw in enumerate(raw_instances):
        reader = _Reader(raw, f"instances[{index}]")
        raw_settings = reader.obj.get("settings", {})
        if not isinstance(raw_settings, dict):
            raise FieldViolation(f"instances[{index}].settings", "expected an object")
        for key, value in raw_settings.items():
            if not isinstance(value, str):
                raise FieldViolation(f"instances[{index}].settings.{key}", "expected a string value")
        try:
            instances.append(
                ComponentInstance(
                    instance_id=reader.string("instance_id"),
                    component_id=reader.string("component_id"),
                    placement=_decode_placement(reader.nested("placement")),
                    settings=raw_settings,
                )
            )
        except ValueError as exc:
            raise FieldViolation(f"instances[{index}]", str(exc)) from exc

    revision = root.integer("revision")
    if revision < 0:
        raise FieldViolation("revision", "must be non-negative")

    try:
        return LayoutDocument(
            owner=root.string("owner"),
            role=role,
            grid=grid,
            instances=tuple(instances),
            theme=_decode_theme(root.nested("theme")),
            revision=revision,
            schema_version=version,
        )
    except ValueError as exc:
        raise FieldViolation("", str(exc)) from exc


# ---------------------------------------------------------------------------
# Edit serialization (diff output carrier)
# ---------------------------------------------------------------------------


def edit_to_obj(edit: LayoutEdit) -> dict[str, Any]:
    if isinstance(edit, AddComponent):
        return {
            "edit": "add_component",
            "component_id": edit.component_id,
            "placement": _placement_obj(edit.placement) if edit.placement else None,
            "settings": dict(edit.settings),
            "instance_id": edit.instance_id,
        }
    if isinstance(edit, RemoveComponent):
        return {"edit": "remove_component", "instance_id": edit.instance_id}
    if isinstance(edit, MoveResize):
        return {"edit": "move_resize", "instance_id": edit.instance_id, "placement": _placement_obj(edit.placement)}
    if isinstance(edit, SetTheme):
        return {"edit": "set_theme", "theme": theme_to_obj(edit.theme)}
    if isinstance(edit, SetSetting):
        return {"edit": "set_setting", "instance_id": edit.instance_id, "key": edit.key, "value": edit.value}
    raise TypeError(f"not a LayoutEdit: {edit!r}")


def encode_edits(edits: list[LayoutEdit]) -> bytes:
    """Canonical JSON array for an edit list (the `diff` wire/CLI format)."""
    return canonical_json_bytes([edit_to_obj(edit) for edit in edits])
