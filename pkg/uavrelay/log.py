"""Logger lookup for library code that has no ``self.log``."""

from __future__ import annotations

import logging
from typing import Any, Union

LoggerType = Union[logging.Logger, "logging.LoggerAdapter[Any]"]

PACKAGE = "uavrelay"

# silent unless the host configures logging or an Application is running
logging.getLogger(PACKAGE).addHandler(logging.NullHandler())

_base: LoggerType | None = None


def _base_logger() -> LoggerType:
    global _base  # noqa: PLW0603

    if _base is None:
        from traitlets.config import Application

        if Application.initialized():
            _base = Application.instance().log
        else:
            _base = logging.getLogger(PACKAGE)
    return _base


def get_logger(component: str | None = None) -> LoggerType:
    """The running Application's logger, else the ``uavrelay`` logger.

    ``component`` picks a child logger (``get_logger("quad")``) so the output of
    one module can be filtered.  Adapters have no children and are returned as is.
    """
    base = _base_logger()
    if component is None or isinstance(base, logging.LoggerAdapter):
        return base
    return base.getChild(component)


def reset_logger() -> None:
    """Forget the cached logger, e.g. after an Application instance was cleared."""
    global _base  # noqa: PLW0603
    _base = None
