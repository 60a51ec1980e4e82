"""flexpdm: role-aware flexible dashboard layouts for PDM-style web apps.

The package splits into a pure layout engine (`layout`), a component
catalog with per-role defaults (`registry`, `roles`), persistence
(`store`), session handling (`sessions`), the HTTP API (`server`), and
the `flexpdm` command line tool (`cli`).
"""

__version__ = "0.1.0"

from .layout import LayoutDocument, decode, encode, validate
from .registry import builtin_catalog, compose_default, list_visible
from .roles import Right, Role

__all__ = [
    "LayoutDocument",
    "Right",
    "Role",
    "builtin_catalog",
    "compose_default",
    "decode",
    "encode",
    "list_visible",
    "validate",
    "__version__",
]
