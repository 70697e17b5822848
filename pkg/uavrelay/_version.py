"""Package version; hatch reads ``__version__`` from this file."""
from __future__ import annotations

__version__ = "0.3.1"

# (major, minor, patch) plus any pre-release suffix, e.g. (0, 4, 0, "dev0")
_release, _, _suffix = __version__.partition("-")
version_info: tuple[int | str, ...] = (
    *(int(part) for part in _release.split(".")[:3]),
    *((_suffix,) if _suffix else ()),
)
