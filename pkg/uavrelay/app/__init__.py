"""Command-line application, sweep runner, result files and figures."""

from __future__ import annotations

from .application import (
    ApplicationError,
    CompareApp,
    PlotApp,
    RunApp,
    UavRelayApp,
    main,
)
from .experiment import Experiment, RunSummary, SweepAxis
from .results import ReportFormatError, ResultRow, compare_report

__all__ = [
    "ApplicationError",
    "CompareApp",
    "Experiment",
    "PlotApp",
    "ReportFormatError",
    "ResultRow",
    "RunApp",
    "RunSummary",
    "SweepAxis",
    "UavRelayApp",
    "compare_report",
    "main",
]
