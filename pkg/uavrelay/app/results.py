"""Result rows, the CSV schema and the analytic-vs-Monte-Carlo comparison report."""

# Distributed under the terms of the Modified BSD License.
from __future__ import annotations

import dataclasses
import math
import os
import typing as t

import numpy as np
import pandas as pd

# column order of the result CSV; never reorder
COLUMNS = (
    "point",
    "quantity",
    "scheme",
    "beta_dB",
    "t",
    "t_over_T",
    "H_R",
    "lambda_R",
    "lambda_T",
    "v",
    "analytic",
    "mc",
    "mc_halfwidth",
    "mc_drops",
    "I_SD_a",
    "I_SD_b",
    "I_SRD_a",
    "I_SRD_b",
    "same_tbs_diagnostic",
    "status",
    "error",
)
WALL_TIME = "wall_time"

FLOAT_FORMAT = "%.9g"

# agreement budget between the analytic engine and the simulator
ABSOLUTE_BUDGET = 0.02
HALFWIDTHS = 3.0

_REQUIRED = ("quantity", "analytic", "mc", "mc_halfwidth")


class ReportFormatError(ValueError):
    """A result CSV cannot be used for the requested report."""


@dataclasses.dataclass
class ResultRow:
    """One evaluated quantity at one sweep point."""

    point: int
    quantity: str
    scheme: str
    beta_dB: float
    t: float
    t_over_T: float | None
    H_R: float
    lambda_R: float
    lambda_T: float
    v: float
    analytic: float | None = None
    mc: float | None = None
    mc_halfwidth: float | None = None
    mc_drops: int | None = None
    I_SD_a: float | None = None
    I_SD_b: float | None = None
    I_SRD_a: float | None = None
    I_SRD_b: float | None = None
    same_tbs_diagnostic: float | None = None
    status: str = "ok"
    error: str = ""
    wall_time: float | None = None

    def __post_init__(self) -> None:
        if (self.mc is None) != (self.mc_halfwidth is None):
            raise ValueError("ResultRow.mc_halfwidth must be present exactly when mc is")
        if self.status == "ok" and self.analytic is None and self.mc is None:
            raise ValueError("ResultRow needs an analytic or a Monte-Carlo value")

    @classmethod
    def failed(cls, exc: BaseException, **fields: t.Any) -> ResultRow:
        """A row without values recording why its evaluation failed."""
        message = f"{type(exc).__name__}: {exc}".splitlines()[0]
        return cls(**fields, status="failed", error=message)

    def as_dict(self) -> dict[str, t.Any]:
        return dataclasses.asdict(self)


def to_frame(rows: t.Iterable[ResultRow], wall_time: bool = False) -> pd.DataFrame:
    columns = [*COLUMNS, WALL_TIME] if wall_time else list(COLUMNS)
    return pd.DataFrame([row.as_dict() for row in rows], columns=columns)


def write_results(frame: pd.DataFrame, path: str | os.PathLike[str]) -> str:
    """Write a result table: UTF-8, LF line endings, 9 significant digits."""
    path = os.fspath(path)
    frame.to_csv(
        path,
        index=False,
        float_format=FLOAT_FORMAT,
        lineterminator="\n",
        encoding="utf-8",
    )
    return path


def read_results(path: str | os.PathLike[str]) -> pd.DataFrame:
    """Read a result CSV written by :func:`write_results`."""
    try:
        frame = pd.read_csv(path, keep_default_na=True)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ReportFormatError(f"cannot read {os.fspath(path)!r}: {e}") from e
    missing = [c for c in ("point", "quantity", "status") if c not in frame.columns]
    if missing:
        raise ReportFormatError(f"{os.fspath(path)!r} lacks columns {missing}")
    if "error" in frame.columns:
        frame["error"] = frame["error"].fillna("")
    return frame


@dataclasses.dataclass
class ComparisonReport:
    summary: pd.DataFrame
    diagnostic: pd.DataFrame
    paths: list[str] = dataclasses.field(default_factory=list)


def _summarize(group: pd.DataFrame) -> pd.Series:
    diff = (group["analytic"] - group["mc"]).abs()
    hw = group["mc_halfwidth"]
    return pd.Series(
        {
            "rows": len(group),
            "max_abs_diff": diff.max(),
            "mean_abs_diff": diff.mean(),
            "within_3hw": float((diff <= HALFWIDTHS * hw).mean()),
            "within_budget": float((diff <= np.maximum(ABSOLUTE_BUDGET, HALFWIDTHS * hw)).mean()),
        }
    )


def compare_frame(frame: pd.DataFrame) -> ComparisonReport:
    """Agreement between the two engines per quantity, plus the same-TBS diagnostic trend."""
    missing = [c for c in _REQUIRED if c not in frame.columns]
    if missing:
        raise ReportFormatError(f"result table lacks columns {missing}")
    both = frame[frame["analytic"].notna() & frame["mc"].notna()]
    if both.empty:
        raise ReportFormatError("no row carries both an analytic and a Monte-Carlo value")
    summary = (
        both.groupby("quantity", sort=True)[["analytic", "mc", "mc_halfwidth"]]
        .apply(_summarize)
        .reset_index()
    )
    summary["rows"] = summary["rows"].astype(int)

    if "same_tbs_diagnostic" in frame.columns and "lambda_T" in frame.columns:
        diag = frame[frame["same_tbs_diagnostic"].notna()]
        diagnostic = (
            diag.groupby("lambda_T", sort=True)["same_tbs_diagnostic"]
            .agg(["count", "mean", "max"])
            .reset_index()
        )
    else:
        diagnostic = pd.DataFrame(columns=["lambda_T", "count", "mean", "max"])
    return ComparisonReport(summary, diagnostic)


def compare_report(
    csv_path: str | os.PathLike[str], out_dir: str | os.PathLike[str] | None = None
) -> ComparisonReport:
    """Summarize a result CSV next to it (or in ``out_dir``).

    Writes ``<stem>_summary.csv`` and ``<stem>_diagnostic.csv``.
    """
    csv_path = os.fspath(csv_path)
    report = compare_frame(read_results(csv_path))
    stem = os.path.splitext(os.path.basename(csv_path))[0]
    target = os.fspath(out_dir) if out_dir is not None else os.path.dirname(csv_path) or "."
    os.makedirs(target, exist_ok=True)
    for suffix, table in (("summary", report.summary), ("diagnostic", report.diagnostic)):
        path = os.path.join(target, f"{stem}_{suffix}.csv")
        write_results(table, path)
        report.paths.append(path)
    return report


def format_summary(report: ComparisonReport) -> str:
    """Plain-text rendering of the summary table for the console."""
    lines = [f"{'quantity':<14}{'rows':>6}{'max|diff|':>12}{'mean|diff|':>12}{'<=3hw':>8}"]
    for row in report.summary.itertuples(index=False):
        lines.append(
            f"{row.quantity:<14}{row.rows:>6d}{row.max_abs_diff:>12.4g}"
            f"{row.mean_abs_diff:>12.4g}{row.within_3hw:>8.1%}"
        )
    if not report.diagnostic.empty:
        worst = report.diagnostic["mean"].max()
        if math.isfinite(worst):
            lines.append(f"mean same-TBS diagnostic up to {worst:.4g}")
    return "\n".join(lines)
