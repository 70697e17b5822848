"""Parameter sweeps over the analytic engine and the Monte-Carlo simulator."""

# Distributed under the terms of the Modified BSD License.
from __future__ import annotations

import dataclasses
import itertools
import os
import threading
import time
import typing as t
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from traitlets import (
    Bool,
    Dict,
    Enum,
    Float,
    Instance,
    Int,
    List,
    TraitError,
    Unicode,
    default,
    validate,
)
from traitlets.config import LoggingConfigurable

from .. import model
from ..coverage import CoverageEngine
from ..mcsim import MonteCarloSimulator, SimulationError, SinrSamples
from ..model import CoverageQuery, MobilityState, ModelError, NetworkParams, Quantity, Scheme
from ..quad import QuadratureError
from ..utils.units import db_to_linear
from . import plots, results
from .results import ResultRow

if t.TYPE_CHECKING:
    from traitlets.utils.bunch import Bunch

TIME_AXES = ("t", "t_over_T")
SCALES = ("linear", "log", "dB")
_AXIS_KEYS = {"name", "values", "min", "max", "points", "scale"}

# failures of one evaluation that must not stop the sweep
ENGINE_ERRORS = (ModelError, QuadratureError, ArithmeticError, SimulationError, ValueError)

# quantities that go through the relay and so carry the same-TBS diagnostic
_RELAYED = {Quantity.TOTAL, Quantity.FIRST_HOP, Quantity.RELAY_LINK}


def sweepable() -> list[str]:
    """Names an axis may sweep: the threshold, time and every scalar network parameter."""
    return ["beta_dB", *TIME_AXES, *sorted(NetworkParams.class_trait_names(config=True))]


@dataclasses.dataclass(frozen=True)
class SweepAxis:
    name: str
    values: tuple[float, ...]

    @classmethod
    def from_dict(cls, spec: dict[str, t.Any]) -> SweepAxis:
        """Build an axis from ``{name, values}`` or ``{name, min, max, points, scale}``.

        A ``dB`` scale gives bounds in dB and stores linear values, except on
        parameters already kept in dB (``beta_dB``), which stay in dB.

        Raises ValueError naming the offending field.
        """
        unknown = set(spec) - _AXIS_KEYS
        if unknown:
            raise ValueError(f"keys: unknown {sorted(unknown)}")
        name = spec.get("name")
        if name not in sweepable():
            raise ValueError(f"name: unknown parameter {name!r}")
        if "values" in spec:
            values = [float(v) for v in spec["values"]]
            if not values:
                raise ValueError("values: must not be empty")
            return cls(name, tuple(values))
        missing = [k for k in ("min", "max", "points") if k not in spec]
        if missing:
            raise ValueError(f"{missing[0]}: required without 'values'")
        points = spec["points"]
        if not isinstance(points, int) or points < 1:
            raise ValueError(f"points: must be an integer >= 1, got {points!r}")
        lo, hi = float(spec["min"]), float(spec["max"])
        scale = spec.get("scale", "linear")
        if scale not in SCALES:
            raise ValueError(f"scale: must be one of {SCALES}, got {scale!r}")
        if scale == "log":
            if lo <= 0 or hi <= 0:
                raise ValueError("min: log axes need positive bounds")
            grid = np.geomspace(lo, hi, points)
        elif scale == "dB" and not name.endswith("_dB"):
            grid = np.asarray(db_to_linear(np.linspace(lo, hi, points)))
        else:
            grid = np.linspace(lo, hi, points)
        return cls(name, tuple(float(v) for v in np.atleast_1d(grid)))


@dataclasses.dataclass(frozen=True)
class SweepPoint:
    index: int
    values: dict[str, float]
    # index of the (network, time) scenario the point belongs to; points that
    # differ only in the threshold share it, and with it their drops
    scenario: int


@dataclasses.dataclass
class RunSummary:
    csv_path: str
    figures: list[str]
    rows: int
    failed: int

    @property
    def ok(self) -> bool:
        return self.failed == 0


class Experiment(LoggingConfigurable):
    """A sweep of coverage quantities over thresholds, time and network parameters.

    Points form the Cartesian product of :attr:`axes` with the last axis
    varying fastest; rows are written in that order whatever ``jobs`` is.
    """

    name = Unicode("results", help="Stem of the result CSV and figure files.").tag(config=True)

    axes = List(
        Dict(),
        help="""Sweep axes, outermost first.

        Each axis is ``{"name": ..., "values": [...]}`` or
        ``{"name": ..., "min": ..., "max": ..., "points": n, "scale": "linear"|"log"|"dB"}``.
        Names are ``beta_dB``, ``t`` [s], ``t_over_T`` (time in expected travel
        times) or any NetworkParams parameter.
        """,
    ).tag(config=True)

    quantities = List(
        Enum([q.value for q in Quantity]),
        default_value=["total"],
        minlen=1,
        help="Quantities evaluated at every point.",
    ).tag(config=True)

    engine = Enum(
        ["analytic", "mc", "both"], default_value="analytic", help="Which engine(s) to run."
    ).tag(config=True)

    scheme = Enum(
        [s.value for s in Scheme], default_value="scheme2", help="UAV mobility scheme."
    ).tag(config=True)

    beta_dB = Float(0.0, help="SINR threshold [dB] when no axis sweeps it.").tag(config=True)
    time = Float(0.0, help="Elapsed time [s] when no axis sweeps it.").tag(config=True)

    output_dir = Unicode("results", help="Directory receiving the CSV and figures.").tag(
        config=True
    )
    plots = Bool(True, help="Draw the SVG figures after the run.").tag(config=True)
    jobs = Int(1, help="Sweep points evaluated concurrently.").tag(config=True)
    diagnostics = Bool(
        True, help="Report the same-TBS diagnostic on rows that go through the relay."
    ).tag(config=True)
    record_wall_time = Bool(
        False, help="Add a wall_time column (rows then differ between reruns)."
    ).tag(config=True)

    params = Instance(NetworkParams)
    simulator = Instance(MonteCarloSimulator)

    @default("params")
    def _params_default(self) -> NetworkParams:
        return NetworkParams(parent=self)

    @default("simulator")
    def _simulator_default(self) -> MonteCarloSimulator:
        return MonteCarloSimulator(parent=self)

    @validate("axes")
    def _validate_axes(self, proposal: Bunch) -> list[dict[str, t.Any]]:
        seen: set[str] = set()
        for i, spec in enumerate(proposal.value):
            try:
                axis = SweepAxis.from_dict(spec)
            except (ValueError, TypeError) as e:
                raise TraitError(f"Experiment.axes[{i}].{e}") from e
            if axis.name in seen:
                raise TraitError(f"Experiment.axes[{i}].name: {axis.name!r} is swept twice")
            if axis.name in TIME_AXES and seen.intersection(TIME_AXES):
                raise TraitError(f"Experiment.axes[{i}].name: sweep either t or t_over_T")
            seen.add(axis.name)
        return t.cast(list[dict[str, t.Any]], proposal.value)

    @validate("jobs")
    def _validate_jobs(self, proposal: Bunch) -> int:
        if proposal.value < 1:
            raise TraitError(f"Experiment.jobs must be >= 1, got {proposal.value!r}")
        return int(proposal.value)

    @validate("time")
    def _validate_time(self, proposal: Bunch) -> float:
        if proposal.value < 0:
            raise TraitError(f"Experiment.time must be >= 0, got {proposal.value!r}")
        return float(proposal.value)

    def __init__(self, **kwargs: t.Any) -> None:
        self._lock = threading.Lock()
        self._engines: dict[tuple[t.Any, ...], CoverageEngine] = {}
        self._scenario_locks: dict[int, threading.Lock] = {}
        self._samples: dict[int, SinrSamples] = {}
        self._diagnostics: dict[int, float | None] = {}
        super().__init__(**kwargs)

    def check(self) -> None:
        """Instantiate every configured object so that config errors surface now."""
        p = self.params
        for child in (p.path_loss, p.los_model, p.k_model):
            child.trait_values()
        if self.engine != "analytic":
            _ = self.simulator
        engine = CoverageEngine(parent=self, params=p)
        for spec in (engine.inner_spec, engine.gil_pelaez_spec, engine.outer_spec):
            spec.trait_values()

    # -- planning ---------------------------------------------------------

    def sweep_axes(self) -> list[SweepAxis]:
        return [SweepAxis.from_dict(spec) for spec in self.axes]

    def plan(self) -> list[SweepPoint]:
        axes = self.sweep_axes()
        names = [a.name for a in axes]
        scenarios: dict[tuple[tuple[str, float], ...], int] = {}
        points = []
        for i, combo in enumerate(itertools.product(*(a.values for a in axes))):
            values = dict(zip(names, combo))
            key = tuple((k, v) for k, v in values.items() if k != "beta_dB")
            scenario = scenarios.setdefault(key, len(scenarios))
            points.append(SweepPoint(i, values, scenario))
        return points

    def _params_for(self, values: dict[str, float]) -> NetworkParams:
        traits = NetworkParams.class_trait_names(config=True)
        overrides = {k: v for k, v in values.items() if k in traits}
        return self.params.with_values(**overrides) if overrides else self.params

    def _time_for(
        self, params: NetworkParams, values: dict[str, float]
    ) -> tuple[float, float | None]:
        """Absolute time and time in expected travel times (None when v = 0)."""
        if "t_over_T" in values:
            travel = model.expected_travel_time(params)
            return values["t_over_T"] * travel, values["t_over_T"]
        elapsed = values.get("t", self.time)
        if params.v > 0:
            return elapsed, elapsed / model.expected_travel_time(params)
        return elapsed, None

    # -- shared per-scenario work -----------------------------------------

    def _engine_for(self, params: NetworkParams) -> CoverageEngine:
        key = params.fingerprint()
        with self._lock:
            if key not in self._engines:
                self._engines[key] = CoverageEngine(parent=self, params=params)
            return self._engines[key]

    def _scenario_lock(self, scenario: int) -> threading.Lock:
        with self._lock:
            return self._scenario_locks.setdefault(scenario, threading.Lock())

    def _samples_for(
        self, scenario: int, params: NetworkParams, mobility: MobilityState
    ) -> SinrSamples:
        with self._scenario_lock(scenario):
            if scenario not in self._samples:
                self._samples[scenario] = self.simulator.simulate_sinr(
                    params, mobility, key=(scenario,)
                )
            return self._samples[scenario]

    def _diagnostic_for(
        self, scenario: int, params: NetworkParams, mobility: MobilityState
    ) -> float | None:
        with self._scenario_lock(scenario):
            if scenario not in self._diagnostics:
                try:
                    value: float | None = model.approximation_diagnostic(params, mobility)
                except ENGINE_ERRORS as e:
                    self.log.warning("same-TBS diagnostic failed for scenario %d: %s", scenario, e)
                    value = None
                self._diagnostics[scenario] = value
            return self._diagnostics[scenario]

    # -- evaluation -------------------------------------------------------

    def _row(
        self,
        fields: dict[str, t.Any],
        quantity: Quantity,
        query: CoverageQuery,
        params: NetworkParams,
        mobility: MobilityState,
        scenario: int,
    ) -> ResultRow:
        start = time.perf_counter()
        values: dict[str, t.Any] = {}
        if self.engine in ("analytic", "both"):
            ev = self._engine_for(params).evaluate(query, mobility)
            values["analytic"] = ev.value
            if ev.breakdown is not None:
                b = ev.breakdown
                values.update(I_SD_a=b.sd_a, I_SD_b=b.sd_b, I_SRD_a=b.srd_a, I_SRD_b=b.srd_b)
        if self.engine in ("mc", "both"):
            est = self._samples_for(scenario, params, mobility).estimate(quantity, query.beta)
            values.update(mc=est.value, mc_halfwidth=est.halfwidth, mc_drops=est.n)
        if self.diagnostics and quantity in _RELAYED:
            values["same_tbs_diagnostic"] = self._diagnostic_for(scenario, params, mobility)
        if self.record_wall_time:
            values["wall_time"] = time.perf_counter() - start
        return ResultRow(**fields, **values)

    def evaluate_point(self, point: SweepPoint) -> list[ResultRow]:
        """Every configured quantity at one sweep point; failures become failed rows."""
        start = time.perf_counter()
        beta_dB = point.values.get("beta_dB", self.beta_dB)
        base: dict[str, t.Any] = {
            "point": point.index,
            "scheme": self.scheme,
            "beta_dB": beta_dB,
            "t": point.values.get("t", self.time),
            "t_over_T": point.values.get("t_over_T"),
            "H_R": self.params.H_R,
            "lambda_R": self.params.lambda_R,
            "lambda_T": self.params.lambda_T,
            "v": self.params.v,
        }
        rows = []
        try:
            params = self._params_for(point.values)
            elapsed, t_over_T = self._time_for(params, point.values)
            mobility = MobilityState(Scheme(self.scheme), params.v, elapsed)
        except (TraitError, *ENGINE_ERRORS) as e:
            self.log.warning("point %d: %s", point.index, e)
            base.update({k: v for k, v in point.values.items() if k in base})
            return [ResultRow.failed(e, quantity=q, **base) for q in self.quantities]

        base.update(
            t=elapsed,
            t_over_T=t_over_T,
            H_R=params.H_R,
            lambda_R=params.lambda_R,
            lambda_T=params.lambda_T,
            v=params.v,
        )
        for name in self.quantities:
            quantity = Quantity(name)
            fields = {**base, "quantity": name}
            try:
                query = CoverageQuery.from_db(beta_dB, elapsed, quantity)
                rows.append(self._row(fields, quantity, query, params, mobility, point.scenario))
            except ENGINE_ERRORS as e:
                self.log.warning("point %d, %s failed: %s", point.index, name, e)
                rows.append(ResultRow.failed(e, **fields))
        self.log.info(
            "point %d %s done in %.1f s",
            point.index,
            ", ".join(f"{k}={v:g}" for k, v in point.values.items()),
            time.perf_counter() - start,
        )
        return rows

    def run(self) -> RunSummary:
        """Evaluate the whole sweep, write the CSV and, if enabled, the figures."""
        points = self.plan()
        self.log.info(
            "%s: %d points x %d quantities, engine=%s",
            self.name,
            len(points),
            len(self.quantities),
            self.engine,
        )
        if self.jobs > 1 and len(points) > 1:
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                batches = list(pool.map(self.evaluate_point, points))
        else:
            batches = [self.evaluate_point(p) for p in points]
        rows = [row for batch in batches for row in batch]

        os.makedirs(self.output_dir, exist_ok=True)
        frame = results.to_frame(rows, wall_time=self.record_wall_time)
        csv_path = results.write_results(frame, os.path.join(self.output_dir, f"{self.name}.csv"))
        figures = []
        if self.plots:
            figures = plots.render_all(results.read_results(csv_path), self.output_dir, self.name)
        failed = int((frame["status"] != "ok").sum())
        if failed:
            self.log.warning("%d of %d rows failed", failed, len(rows))
        self.log.info("wrote %s", csv_path)
        return RunSummary(csv_path, figures, len(rows), failed)
