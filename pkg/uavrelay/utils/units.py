"""dB <-> linear conversions used at the configuration and CSV boundary."""

from __future__ import annotations

import typing as t

import numpy as np
import numpy.typing as npt


@t.overload
def db_to_linear(value: float) -> float: ...


@t.overload
def db_to_linear(value: npt.ArrayLike) -> npt.NDArray[np.float64]: ...


def db_to_linear(value: t.Any) -> t.Any:
    """Convert a power ratio from dB to linear scale."""
    out = np.power(10.0, np.asarray(value, dtype=float) / 10.0)
    return float(out) if out.ndim == 0 else out


@t.overload
def linear_to_db(value: float) -> float: ...


@t.overload
def linear_to_db(value: npt.ArrayLike) -> npt.NDArray[np.float64]: ...


def linear_to_db(value: t.Any) -> t.Any:
    """Convert a positive power ratio to dB."""
    arr = np.asarray(value, dtype=float)
    if np.any(arr <= 0):
        raise ValueError(f"cannot express non-positive ratio {value!r} in dB")
    out = 10.0 * np.log10(arr)
    return float(out) if out.ndim == 0 else out
