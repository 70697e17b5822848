"""The ``uavrelay`` command line: ``run``, ``compare`` and ``plot`` subcommands."""

# Distributed under the terms of the Modified BSD License.
from __future__ import annotations

import os
import typing as t

from traitlets import Bool, Instance, Unicode
from traitlets.config import Application, Config, catch_config_error

from .._version import __version__
from ..channel import LosModelParams, PathLossParams, RicianKModel
from ..coverage import CoverageEngine
from ..mcsim import MonteCarloSimulator
from ..model import NetworkParams
from ..quad import GilPelaezQuadrature, InnerQuadrature, OuterQuadrature
from . import plots, results
from .experiment import Experiment

ArgvType = t.Optional[t.List[str]]

# the only environment override; science parameters live in config files
OUTPUT_DIR_ENV = "UAVRELAY_OUTPUT_DIR"


class ApplicationError(Exception):
    """The command line cannot be acted upon."""


class UavRelayBaseApp(Application):
    """Shared options of the subcommands."""

    version = __version__
    raise_config_file_errors = Bool(True)

    output_dir = Unicode(
        "", help=f"Directory for the files written. Overridden by ${OUTPUT_DIR_ENV}."
    ).tag(config=True)

    def _argument(self, what: str) -> str:
        if not self.extra_args:
            raise ApplicationError(f"{self.name} needs a {what} argument")
        if len(self.extra_args) > 1:
            raise ApplicationError(f"{self.name} takes one {what}, got {self.extra_args}")
        path = self.extra_args[0]
        if not os.path.isfile(path):
            raise ApplicationError(f"no such {what}: {path!r}")
        return path

    def _output_dir(self, fallback: str) -> str:
        """Command line, then environment, then config, then ``fallback``."""
        env = os.environ.get(OUTPUT_DIR_ENV)
        from_cli = "output_dir" in self.cli_config.get(type(self).__name__, {})
        if env and not from_cli:
            return env
        return self.output_dir or fallback

    def _bail(self, error: ApplicationError) -> t.NoReturn:
        self.log.critical("%s", error)
        self.exit(1)
        raise AssertionError  # exit() does not return


class RunApp(UavRelayBaseApp):
    name = Unicode("uavrelay-run")
    description = """Run a sweep from a config file.

    Evaluates every configured quantity at every sweep point with the analytic
    engine, the Monte-Carlo simulator or both, writes a CSV and draws the figures.
    """
    examples = """
    uavrelay run configs/default.py
    uavrelay run configs/association.py --engine=analytic --out=figures
    uavrelay run configs/default.py --engine=mc --seed=7 --jobs=4 --no-plots
    """

    classes = [
        Experiment,
        NetworkParams,
        PathLossParams,
        LosModelParams,
        RicianKModel,
        CoverageEngine,
        InnerQuadrature,
        GilPelaezQuadrature,
        OuterQuadrature,
        MonteCarloSimulator,
    ]

    aliases = {
        **Application.aliases,
        "engine": "Experiment.engine",
        "seed": "MonteCarloSimulator.seed",
        "drops": "MonteCarloSimulator.n_drops",
        "out": "Experiment.output_dir",
        "jobs": "Experiment.jobs",
    }
    flags = {
        **Application.flags,
        "no-plots": ({"Experiment": {"plots": False}}, "Write the CSV only, no figures."),
        "wall-time": (
            {"Experiment": {"record_wall_time": True}},
            "Record the wall time of every row.",
        ),
    }

    experiment = Instance(Experiment, allow_none=True)

    @catch_config_error
    def initialize(self, argv: ArgvType = None) -> None:
        self.parse_command_line(argv)
        try:
            path = self._argument("config file")
        except ApplicationError as e:
            self._bail(e)
        directory, filename = os.path.split(os.path.abspath(path))
        self.load_config_file(filename, path=[directory])

        env = os.environ.get(OUTPUT_DIR_ENV)
        if env and "output_dir" not in self.cli_config.get("Experiment", {}):
            override = Config()
            override.Experiment.output_dir = env
            self.update_config(override)

        self.experiment = Experiment(parent=self)
        self.experiment.check()

    def start(self) -> None:
        assert self.experiment is not None
        summary = self.experiment.run()
        print(summary.csv_path)
        for path in summary.figures:
            print(path)
        if not summary.ok:
            self.log.error("%d of %d rows failed", summary.failed, summary.rows)
            self.exit(1)


class CompareApp(UavRelayBaseApp):
    name = Unicode("uavrelay-compare")
    description = """Summarize the agreement of the analytic engine and the simulator.

    Reads a CSV from an ``--engine=both`` run and writes <stem>_summary.csv and
    <stem>_diagnostic.csv next to it (or under --out).
    """
    examples = """
    uavrelay compare results/default.csv
    """

    aliases = {**Application.aliases, "out": "CompareApp.output_dir"}

    csv_path = Unicode("")

    @catch_config_error
    def initialize(self, argv: ArgvType = None) -> None:
        self.parse_command_line(argv)
        try:
            self.csv_path = self._argument("result CSV")
        except ApplicationError as e:
            self._bail(e)

    def start(self) -> None:
        out = self._output_dir(os.path.dirname(self.csv_path) or ".")
        try:
            report = results.compare_report(self.csv_path, out)
        except results.ReportFormatError as e:
            self.log.critical("%s", e)
            self.exit(1)
        print(results.format_summary(report))
        for path in report.paths:
            print(path)


class PlotApp(UavRelayBaseApp):
    name = Unicode("uavrelay-plot")
    description = """Redraw the figures of a result CSV without rerunning anything."""
    examples = """
    uavrelay plot results/association.csv --out=figures
    """

    aliases = {**Application.aliases, "out": "PlotApp.output_dir"}

    csv_path = Unicode("")

    @catch_config_error
    def initialize(self, argv: ArgvType = None) -> None:
        self.parse_command_line(argv)
        try:
            self.csv_path = self._argument("result CSV")
        except ApplicationError as e:
            self._bail(e)

    def start(self) -> None:
        out = self._output_dir(os.path.dirname(self.csv_path) or ".")
        stem = os.path.splitext(os.path.basename(self.csv_path))[0]
        try:
            frame = results.read_results(self.csv_path)
        except results.ReportFormatError as e:
            self.log.critical("%s", e)
            self.exit(1)
        written = plots.render_all(frame, out, stem)
        if not written:
            self.log.warning("%s has no data for any figure", self.csv_path)
        for path in written:
            print(path)


class UavRelayApp(Application):
    name = Unicode("uavrelay")
    version = __version__
    description = """Coverage of UAV relay networks: analytic engine and Monte-Carlo simulator."""

    subcommands = {
        "run": (RunApp, RunApp.description.splitlines()[0]),
        "compare": (CompareApp, CompareApp.description.splitlines()[0]),
        "plot": (PlotApp, PlotApp.description.splitlines()[0]),
    }

    def start(self) -> None:
        if self.subapp is None:
            print(f"No subcommand given. Choose one of {sorted(self.subcommands)}.")
            self.print_subcommands()
            self.exit(1)
        super().start()


def main(argv: ArgvType = None) -> None:
    UavRelayApp.launch_instance(argv)
