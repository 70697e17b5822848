from __future__ import annotations

import pytest
from traitlets import TraitError
from traitlets.config import Config

from uavrelay.app import experiment as experiment_module
from uavrelay.app.experiment import Experiment, SweepAxis, sweepable
from uavrelay.app.results import COLUMNS, read_results
from uavrelay.coverage import CoverageEngine, Evaluation
from uavrelay.model import (
    NetworkParams,
    Quantity,
    expected_travel_time,
    relay_association_probability,
)
from uavrelay.quad import QuadratureError

ASSOCIATION_GRID = [
    {"name": "H_R", "values": [100, 300]},
    {"name": "lambda_R", "values": [1e-7, 1e-6]},
]


def make(tmp_path, **kwargs):
    cfg = Config()
    cfg.MonteCarloSimulator.n_drops = 200
    cfg.MonteCarloSimulator.disk_radius = 20e3
    kwargs.setdefault("output_dir", str(tmp_path))
    kwargs.setdefault("plots", False)
    return Experiment(config=cfg, **kwargs)


class TestSweepAxis:
    def test_values(self):
        axis = SweepAxis.from_dict({"name": "H_R", "values": [100, 200]})
        assert axis == SweepAxis("H_R", (100.0, 200.0))

    @pytest.mark.parametrize(
        "scale,expected",
        [
            ("linear", (0.0, 5.0, 10.0)),
            ("log", (1.0, 10.0, 100.0)),
            ("dB", (1.0, 10.0, 100.0)),
        ],
    )
    def test_ranges(self, scale, expected):
        bounds = {"linear": (0, 10), "log": (1, 100), "dB": (0, 20)}[scale]
        spec = {"name": "P_T", "min": bounds[0], "max": bounds[1], "points": 3, "scale": scale}
        assert SweepAxis.from_dict(spec).values == pytest.approx(expected)

    def test_db_scale_on_a_db_parameter(self):
        spec = {"name": "beta_dB", "min": 0, "max": 20, "points": 3, "scale": "dB"}
        assert SweepAxis.from_dict(spec).values == pytest.approx((0.0, 10.0, 20.0))
        spec = {**spec, "name": "P_R"}
        assert SweepAxis.from_dict(spec).values == pytest.approx((1.0, 10.0, 100.0))

    def test_single_point(self):
        spec = {"name": "t", "min": 5, "max": 5, "points": 1}
        assert SweepAxis.from_dict(spec).values == (5.0,)

    @pytest.mark.parametrize(
        "spec,field",
        [
            ({"name": "nonsense", "values": [1]}, "name"),
            ({"name": "H_R", "values": [1], "step": 2}, "keys"),
            ({"name": "H_R", "values": []}, "values"),
            ({"name": "H_R", "min": 0, "max": 1}, "points"),
            ({"name": "H_R", "max": 1, "points": 2}, "min"),
            ({"name": "H_R", "min": 0, "max": 1, "points": 0}, "points"),
            ({"name": "H_R", "min": 0, "max": 1, "points": 2.5}, "points"),
            ({"name": "H_R", "min": 0, "max": 1, "points": 2, "scale": "cubic"}, "scale"),
            ({"name": "H_R", "min": 0, "max": 1, "points": 2, "scale": "log"}, "min"),
        ],
    )
    def test_errors_name_the_field(self, spec, field):
        with pytest.raises(ValueError, match=f"^{field}:"):
            SweepAxis.from_dict(spec)

    def test_sweepable(self):
        names = sweepable()
        assert names[:3] == ["beta_dB", "t", "t_over_T"]
        assert "lambda_R" in names
        assert "path_loss" not in names


class TestValidation:
    def test_axis_error_names_index_and_field(self):
        with pytest.raises(TraitError, match=r"Experiment\.axes\[1\]\.name"):
            Experiment(axes=[{"name": "H_R", "values": [1]}, {"name": "bogus", "values": [1]}])

    def test_axis_swept_twice(self):
        with pytest.raises(TraitError, match="swept twice"):
            Experiment(axes=[{"name": "H_R", "values": [1]}, {"name": "H_R", "values": [2]}])

    def test_one_time_axis(self):
        with pytest.raises(TraitError, match="either t or t_over_T"):
            Experiment(axes=[{"name": "t", "values": [1]}, {"name": "t_over_T", "values": [1]}])

    def test_scalars(self):
        with pytest.raises(TraitError, match="Experiment.jobs"):
            Experiment(jobs=0)
        with pytest.raises(TraitError, match="Experiment.time"):
            Experiment(time=-1.0)
        with pytest.raises(TraitError):
            Experiment(quantities=[])
        with pytest.raises(TraitError):
            Experiment(quantities=["coverage"])
        with pytest.raises(TraitError):
            Experiment(engine="exact")

    def test_check_surfaces_channel_errors(self):
        cfg = Config()
        cfg.PathLossParams.A_GL = -1.0
        with pytest.raises(TraitError, match="PathLossParams.A_GL"):
            Experiment(config=cfg).check()

    def test_config_reaches_children(self):
        cfg = Config()
        cfg.NetworkParams.H_R = 123.0
        cfg.MonteCarloSimulator.seed = 77
        exp = Experiment(config=cfg)
        exp.check()
        assert exp.params.H_R == 123.0
        assert exp.simulator.seed == 77


class TestPlan:
    def test_last_axis_fastest(self):
        exp = Experiment(
            axes=[
                {"name": "H_R", "values": [100, 200]},
                {"name": "beta_dB", "values": [0, 5, 10]},
            ]
        )
        points = exp.plan()
        assert [p.index for p in points] == list(range(6))
        assert [p.values["H_R"] for p in points] == [100, 100, 100, 200, 200, 200]
        assert [p.values["beta_dB"] for p in points] == [0, 5, 10, 0, 5, 10]
        # points differing only in the threshold share a scenario
        assert [p.scenario for p in points] == [0, 0, 0, 1, 1, 1]

    def test_no_axes(self):
        points = Experiment().plan()
        assert len(points) == 1
        assert points[0].values == {}

    def test_time_in_travel_times(self):
        exp = Experiment()
        params = NetworkParams()
        elapsed, ratio = exp._time_for(params, {"t_over_T": 2.0})
        assert elapsed == pytest.approx(2 * expected_travel_time(params))
        assert ratio == 2.0
        assert exp._time_for(NetworkParams(v=0.0), {"t": 5.0}) == (5.0, None)


class TestRun:
    def test_analytic_association(self, tmp_path):
        exp = make(tmp_path, name="assoc", quantities=["association"], axes=ASSOCIATION_GRID)
        summary = exp.run()
        assert summary.ok
        assert summary.rows == 4
        assert summary.csv_path == str(tmp_path / "assoc.csv")
        frame = read_results(summary.csv_path)
        assert list(frame.columns) == list(COLUMNS)
        assert frame["mc"].isna().all()
        for _, row in frame.iterrows():
            p = NetworkParams(H_R=row["H_R"], lambda_R=row["lambda_R"])
            expected = relay_association_probability(p, p.mobility(0.0))
            assert row["analytic"] == pytest.approx(expected, abs=1e-8)

    def test_figures(self, tmp_path):
        exp = make(tmp_path, name="fig", quantities=["association"], axes=ASSOCIATION_GRID)
        exp.plots = True
        summary = exp.run()
        assert summary.figures == [str(tmp_path / "fig_association.svg")]

    def test_both_engines_share_drops(self, tmp_path):
        exp = make(
            tmp_path,
            engine="both",
            quantities=["association"],
            axes=[{"name": "beta_dB", "values": [0, 10]}],
        )
        frame = read_results(exp.run().csv_path)
        assert frame["mc_drops"].tolist() == [200, 200]
        assert frame["mc"].iloc[0] == frame["mc"].iloc[1]
        assert (frame["mc_halfwidth"] > 0).all()

    def test_reruns_are_identical(self, tmp_path):
        def run(sub, jobs):
            exp = make(
                tmp_path / sub,
                engine="mc",
                jobs=jobs,
                quantities=["association", "direct_link"],
                axes=[
                    {"name": "H_R", "values": [100, 1000]},
                    {"name": "beta_dB", "values": [0, 5]},
                ],
            )
            with open(exp.run().csv_path, "rb") as f:
                return f.read()

        first = run("a", 1)
        assert first == run("b", 1)
        assert first == run("c", 3)

    def test_bad_point_fails_alone(self, tmp_path):
        exp = make(
            tmp_path,
            quantities=["association"],
            axes=[{"name": "H_R", "values": [-5, 100]}],
        )
        summary = exp.run()
        assert not summary.ok
        assert summary.failed == 1
        frame = read_results(summary.csv_path)
        assert frame["status"].tolist() == ["failed", "ok"]
        assert frame.loc[0, "error"].startswith("TraitError")
        assert frame.loc[0, "H_R"] == -5

    def test_engine_failure_is_recorded(self, tmp_path, mocker):
        mocker.patch.object(
            CoverageEngine, "evaluate", side_effect=QuadratureError("no convergence")
        )
        summary = make(tmp_path, quantities=["direct_link", "association"]).run()
        frame = read_results(summary.csv_path)
        assert frame["status"].tolist() == ["failed", "failed"]
        assert frame["error"].iloc[0] == "QuadratureError: no convergence"

    def test_diagnostic_on_relayed_rows(self, tmp_path, mocker):
        mocker.patch.object(
            CoverageEngine, "evaluate", return_value=Evaluation(Quantity.FIRST_HOP, 0.7)
        )
        diag = mocker.patch.object(
            experiment_module.model, "approximation_diagnostic", return_value=0.25
        )
        exp = make(
            tmp_path,
            quantities=["first_hop", "second_hop"],
            axes=[{"name": "beta_dB", "values": [0, 3]}],
        )
        frame = read_results(exp.run().csv_path)
        first = frame[frame["quantity"] == "first_hop"]
        second = frame[frame["quantity"] == "second_hop"]
        assert (first["same_tbs_diagnostic"] == 0.25).all()
        assert second["same_tbs_diagnostic"].isna().all()
        # one scenario, computed once
        assert diag.call_count == 1

    def test_failed_diagnostic_leaves_row_ok(self, tmp_path, mocker):
        mocker.patch.object(
            CoverageEngine, "evaluate", return_value=Evaluation(Quantity.TOTAL, 0.7)
        )
        mocker.patch.object(
            experiment_module.model,
            "approximation_diagnostic",
            side_effect=QuadratureError("diverged"),
        )
        frame = read_results(make(tmp_path).run().csv_path)
        assert frame["status"].tolist() == ["ok"]
        assert frame["same_tbs_diagnostic"].isna().all()

    def test_threshold_axis_converted_once(self, tmp_path, mocker):
        evaluate = mocker.patch.object(
            CoverageEngine, "evaluate", return_value=Evaluation(Quantity.DIRECT_LINK, 0.5)
        )
        exp = make(
            tmp_path,
            quantities=["direct_link"],
            axes=[{"name": "beta_dB", "min": 0, "max": 10, "points": 2, "scale": "dB"}],
        )
        frame = read_results(exp.run().csv_path)
        assert frame["beta_dB"].tolist() == [0.0, 10.0]
        betas = sorted(call.args[0].beta for call in evaluate.call_args_list)
        assert betas == pytest.approx([1.0, 10.0])

    def test_wall_time_column(self, tmp_path):
        exp = make(tmp_path, quantities=["association"], record_wall_time=True)
        frame = read_results(exp.run().csv_path)
        assert frame.columns[-1] == "wall_time"
        assert (frame["wall_time"] >= 0).all()

    def test_output_dir_created(self, tmp_path):
        exp = make(tmp_path, output_dir=str(tmp_path / "deep" / "er"), quantities=["association"])
        assert exp.run().csv_path == str(tmp_path / "deep" / "er" / "results.csv")
