from __future__ import annotations

from .units import db_to_linear, linear_to_db

__all__ = ["db_to_linear", "linear_to_db"]
