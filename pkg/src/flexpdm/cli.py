"""`flexpdm` command line tool.

Machine-readable JSON goes to stdout (canonical bytes, no trailing
newline except for JSONL export); human summaries go to stderr. Exit
codes: 0 success, 1 validation violations found, 2 usage or malformed
input, 3 store errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import layout
from .registry import builtin_catalog, compose_default, descriptor_to_obj, list_visible
from .roles import Role
from .sessions import SessionManager
from .store import Store, StoreError, StoreNotEmpty

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_USAGE = 2
EXIT_STORE = 3

EXPORT_KINDS = ("users", "products", "projects", "audit", "chat", "layouts")


def _out(data: bytes) -> None:
    sys.stdout.buffer.write(data)
    sys.stdout.buffer.flush()


def _err(message: str) -> None:
    print(message, file=sys.stderr)


class _InputError(Exception):
    pass


def _read_document(path: str) -> layout.LayoutDocument:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc}") from exc
    try:
        return layout.decode(data)
    except layout.DocumentError as exc:
        raise _InputError(f"{path}: {exc}") from exc


def _usage_error(message: str) -> int:
    _err(f"error: {message}")
    return EXIT_USAGE


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        data = Path(args.file).read_bytes()
    except OSError as exc:
        return _usage_error(f"cannot read {args.file}: {exc}")
    try:
        doc = layout.decode(data)
    except layout.DocumentError as exc:
        return _usage_error(f"{args.file}: {exc}")
    report = layout.validate(doc, builtin_catalog())
    _out(layout.canonical_json_bytes(report.to_obj()))
    if report.ok:
        _err(f"{args.file}: valid")
        return EXIT_OK
    _err(f"{args.file}: {len(report)} violation(s)")
    return EXIT_VIOLATIONS


def cmd_compose_default(args: argparse.Namespace) -> int:
    try:
        role = Role.from_name(args.role)
    except ValueError as exc:
        return _usage_error(str(exc))
    data = layout.encode(compose_default(role, builtin_catalog()))
    if args.output:
        Path(args.output).write_bytes(data)
        _err(f"wrote default {role.value} layout to {args.output}")
    else:
        _out(data)
    return EXIT_OK


def cmd_components(args: argparse.Namespace) -> int:
    registry = builtin_catalog()
    if args.role:
        try:
            role = Role.from_name(args.role)
        except ValueError as exc:
            return _usage_error(str(exc))
        obj: object = [descriptor_to_obj(d) for d in list_visible(registry, role)]
    else:
        obj = {
            "version": registry.version,
            "descriptors": [
                descriptor_to_obj(d) for d in sorted(registry.descriptors.values(), key=lambda d: d.component_id)
            ],
        }
    _out(layout.canonical_json_bytes(obj))
    return EXIT_OK


def cmd_diff(args: argparse.Namespace) -> int:
    try:
        base = _read_document(args.base)
        target = _read_document(args.target)
        edits = layout.diff(base, target)
    except (_InputError, layout.GridMismatch, layout.RoleMismatch) as exc:
        return _usage_error(str(exc))
    _out(layout.encode_edits(edits))
    _err(f"{len(edits)} edit(s)")
    return EXIT_OK


def cmd_seed(args: argparse.Namespace) -> int:
    try:
        store = Store(args.store)
    except Exception as exc:
        _err(f"error: cannot open store {args.store}: {exc}")
        return EXIT_STORE
    try:
        summary = store.seed_sample_data()
    except StoreNotEmpty as exc:
        _err(f"error: {exc}")
        return EXIT_STORE
    finally:
        store.close()
    _out(layout.canonical_json_bytes(summary))
    _err(f"seeded {args.store}")
    return EXIT_OK


def cmd_export(args: argparse.Namespace) -> int:
    try:
        store = Store(args.store)
    except Exception as exc:
        _err(f"error: cannot open store {args.store}: {exc}")
        return EXIT_STORE
    try:
        try:
            records = list(store.export_records(args.kind))
        except StoreError as exc:
            return _usage_error(str(exc))
    finally:
        store.close()
    for record in records:
        _out(layout.canonical_json_bytes(record) + b"\n")
    _err(f"{len(records)} {args.kind} record(s)")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    host, _, port_text = args.bind.rpartition(":")
    if not host or not port_text.isdigit():
        return _usage_error(f"bind address must look like HOST:PORT, got {args.bind!r}")
    try:
        store = Store(args.store)
    except Exception as exc:
        _err(f"error: cannot open store {args.store}: {exc}")
        return EXIT_STORE
    sessions = SessionManager(store, ttl_seconds=args.session_ttl)
    app = create_app(store, sessions=sessions, cors_origins=args.cors_origin or None)
    _err(f"flexpdm serving on http://{host}:{port_text}")
    uvicorn.run(app, host=host, port=int(port_text), log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flexpdm", description="Flexible PDM dashboard toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a .layout.json file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compose-default", help="print a role's default layout")
    p.add_argument("--role", required=True, help="one of " + ", ".join(role.value for role in Role))
    p.add_argument("-o", "--output", help="write to file instead of stdout")
    p.set_defaults(func=cmd_compose_default)

    p = sub.add_parser("components", help="dump the component registry")
    p.add_argument("--role", help="restrict to descriptors visible to this role")
    p.set_defaults(func=cmd_components)

    p = sub.add_parser("diff", help="edits that turn layout A into layout B")
    p.add_argument("base")
    p.add_argument("target")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("seed", help="fill an empty store with sample data")
    p.add_argument("--store", default=os.environ.get("FLEXPDM_STORE", "flexpdm.db"))
    p.set_defaults(func=cmd_seed)

    p = sub.add_parser("export", help="dump one record type as JSON lines")
    p.add_argument("--store", default=os.environ.get("FLEXPDM_STORE", "flexpdm.db"))
    p.add_argument("--kind", required=True, choices=EXPORT_KINDS)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="run the HTTP API server")
    p.add_argument("--store", default=os.environ.get("FLEXPDM_STORE", "flexpdm.db"))
    p.add_argument("--bind", default=os.environ.get("FLEXPDM_BIND", "127.0.0.1:8080"))
    p.add_argument(
        "--session-ttl",
        type=float,
        default=float(os.environ.get("FLEXPDM_SESSION_TTL", 8 * 60 * 60)),
        help="session lifetime in seconds",
    )
    p.add_argument(
        "--cors-origin",
        action="append",
        default=_env_list("FLEXPDM_CORS_ORIGINS"),
        help="allowed browser origin; repeatable",
    )
    p.set_defaults(func=cmd_serve)

    return parser


def _env_list(name: str) -> list[str]:
    raw = os.environ.get(name, "")
    return [part.strip() for part in raw.split(",") if part.strip()]


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
