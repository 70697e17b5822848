from __future__ import annotations

import math
from unittest import TestCase

import numpy as np
import pytest
from scipy import stats
from traitlets import TraitError
from traitlets.config import Config

from uavrelay import channel
from uavrelay.coverage import (
    CoverageBreakdown,
    CoverageEngine,
    NumericalIntegrityError,
    RelayCoverage,
)
from uavrelay.links import LinkKind, LosState, Role
from uavrelay.model import (
    STATIC,
    CoverageQuery,
    MobilityState,
    NetworkParams,
    Quantity,
    Scheme,
    expected_travel_time,
    relay_association_probability,
)
from uavrelay.quad import ConvergenceError, GilPelaezQuadrature, integrate_vector


def noise_only(**params):
    cfg = Config()
    cfg.NetworkParams = Config(params)
    return CoverageEngine(
        params=NetworkParams(config=cfg),
        include_interference=False,
        gil_pelaez_spec=GilPelaezQuadrature(epsabs=1e-9, epsrel=1e-9),
    )


def signal_scale(params, link, state, r):
    """Mean received signal power at serving distance ``r``."""
    loss = channel.path_loss_state(link, params.path_loss, state, r, params.H_R)
    return link.power(params) * link.gain(params, Role.TARGET) / loss


# 20 (distance, threshold) points per fading law
NOISE_LIMITED_GRID = [
    (r, x) for r in (100.0, 500.0, 1500.0, 5000.0) for x in (0.05, 0.2, 1.0, 2.0, 4.0)
]


@pytest.mark.parametrize("r,x", NOISE_LIMITED_GRID)
def test_rayleigh_noise_limited_closed_form(r, x):
    engine = noise_only()
    p = engine.params
    p.k_model.K_GL = 0.0
    a = signal_scale(p, LinkKind.SD, LosState.LOS, r)
    beta = x * a / p.sigma2
    value = engine.conditional_cp(LinkKind.SD, LosState.LOS, r, CoverageQuery(beta), STATIC)
    assert value == pytest.approx(math.exp(-x), abs=1e-6)


@pytest.mark.parametrize("r,x", NOISE_LIMITED_GRID)
def test_rician_noise_limited_closed_form(r, x):
    engine = noise_only()
    p = engine.params
    K = p.k_model.K_AL
    assert K == 10.0
    a = signal_scale(p, LinkKind.RD, LosState.LOS, r)
    beta = x * a / p.sigma2
    value = engine.conditional_cp(LinkKind.RD, LosState.LOS, r, CoverageQuery(beta), STATIC)
    expected = stats.ncx2.sf(2 * (K + 1) * x, 2, 2 * K)
    assert value == pytest.approx(expected, abs=1e-5)


def test_conditional_cp_uses_current_rn_distance():
    engine = noise_only(v=40.0)
    m = MobilityState(Scheme.SCHEME2, 40.0, 0.0)
    detail = engine.conditional_cp(
        LinkKind.RD, "LoS", 1000.0, CoverageQuery(1.0, t=10.0), m, detail=True
    )
    assert detail.distance == pytest.approx(600.0)
    assert 0.0 <= detail.value <= 1.0


def test_closer_relay_covers_better():
    engine = noise_only()
    m = MobilityState(Scheme.SCHEME2, 40.0, 0.0)
    q = CoverageQuery.from_db(30.0)
    near = engine.link_cp(LinkKind.RD, 200.0, q, m)
    far = engine.link_cp(LinkKind.RD, 20000.0, q, m)
    assert near > far


class TestEvaluate(TestCase):
    def setUp(self):
        self.engine = noise_only(H_R=300.0)
        self.p = self.engine.params

    def test_association_matches_model(self):
        q = CoverageQuery(1.0, t=30.0, quantity=Quantity.ASSOCIATION)
        m = self.p.mobility(0.0)
        expected = relay_association_probability(self.p, m.at(30.0))
        assert self.engine.evaluate(q, m).value == pytest.approx(expected)

    def test_static_schemes_identical_at_time_zero(self):
        q = CoverageQuery.from_db(0.0, quantity=Quantity.DIRECT_LINK)
        values = {self.engine.evaluate(q, self.p.mobility(0.0, s)).value for s in Scheme}
        assert len(values) == 1

    def test_hover_ignores_time(self):
        q0 = CoverageQuery.from_db(0.0, quantity=Quantity.SECOND_HOP)
        q1 = CoverageQuery.from_db(0.0, t=50.0, quantity=Quantity.SECOND_HOP)
        hover = self.p.mobility(0.0, "hover")
        assert self.engine.evaluate(q1, hover).value == self.engine.evaluate(q0, hover).value

    def test_tiny_threshold_covers_everyone(self):
        q = CoverageQuery(1e-12)
        result = self.engine.evaluate(q, STATIC)
        terms = result.breakdown
        assert result.quantity is Quantity.TOTAL
        assert terms.total == pytest.approx(1.0, abs=1e-3)
        association = relay_association_probability(self.p, STATIC)
        assert terms.relay == pytest.approx(association, abs=1e-3)
        assert terms.direct == pytest.approx(1.0 - association, abs=1e-3)
        assert terms.srd_a == 0.0

    def test_moving_relays_use_hover_region(self):
        q = CoverageQuery(1e-12, t=30.0)
        terms = self.engine.total_cp(q, self.p.mobility(0.0))
        assert terms.srd_a > 0.0
        assert terms.total == pytest.approx(1.0, abs=1e-3)

    def test_relay_quantities(self):
        q = CoverageQuery.from_db(0.0, quantity=Quantity.RELAY_LINK)
        result = self.engine.evaluate(q, STATIC)
        assert result.relay is not None
        assert result.value == pytest.approx(result.relay.first_hop * result.relay.second_hop)
        assert 0.0 < result.value < 1.0

    def test_higher_threshold_lowers_coverage(self):
        m = self.p.mobility(0.0)
        low = self.engine.direct_cp(CoverageQuery.from_db(-10.0), m)
        high = self.engine.direct_cp(CoverageQuery.from_db(20.0), m)
        assert high < low


class TestEngineSettings(TestCase):
    def test_table_density(self):
        with pytest.raises(TraitError, match="table_points_per_decade"):
            CoverageEngine(table_points_per_decade=3)

    def test_table_range(self):
        with pytest.raises(TraitError, match="table_min < table_max"):
            CoverageEngine(table_min=0.0)
        with pytest.raises(TraitError, match="table_min < table_max"):
            CoverageEngine(table_min=1e10)
        engine = CoverageEngine(table_min=1e-3, table_max=1e3)
        assert engine.table_max == 1e3

    def test_specs_from_config(self):
        cfg = Config()
        cfg.GilPelaezQuadrature.epsabs = 1e-8
        cfg.NetworkParams.H_R = 250.0
        engine = CoverageEngine(config=cfg)
        assert engine.gil_pelaez_spec.epsabs == 1e-8
        assert engine.params.H_R == 250.0

    def test_integrity_check(self):
        engine = CoverageEngine()
        with pytest.raises(NumericalIntegrityError, match="outside"):
            engine._check_probability(1.5, 1e-3, "P")
        assert engine._check_probability(1.0005, 1e-3, "P") == 1.0
        assert engine._check_probability(-1e-4, 1e-3, "P") == 0.0


class TestCaches(TestCase):
    def setUp(self):
        self.engine = noise_only()
        self.q = CoverageQuery(1.0)

    def fill(self):
        self.engine.link_cp(LinkKind.SD, 500.0, self.q, STATIC)
        assert self.engine._link_cps

    def test_param_change_clears(self):
        self.fill()
        self.engine.params.sigma2 = 1e-9
        assert not self.engine._link_cps

    def test_channel_change_clears(self):
        self.fill()
        self.engine.params.path_loss.alpha_GN = 3.5
        assert not self.engine._link_cps

    def test_new_params_are_watched(self):
        self.engine.params = NetworkParams()
        self.fill()
        self.engine.params.los_model.d1 = 20.0
        assert not self.engine._link_cps

    def test_settings_change_clears(self):
        self.fill()
        self.engine.include_interference = True
        assert not self.engine._link_cps

    def test_cached_value_reused(self):
        self.fill()
        first = self.engine.link_cp(LinkKind.SD, 500.0, self.q, STATIC)
        key = next(iter(self.engine._link_cps))
        self.engine._link_cps[key] = 0.123
        assert self.engine.link_cp(LinkKind.SD, 500.0, self.q, STATIC) == 0.123
        assert first != 0.123


def test_breakdown_properties():
    terms = CoverageBreakdown(0.1, 0.2, 0.3, 0.05)
    assert terms.direct == pytest.approx(0.3)
    assert terms.relay == pytest.approx(0.35)
    assert terms.total == pytest.approx(0.65)
    assert RelayCoverage(0.5, 0.4).two_hop == pytest.approx(0.2)


class TestInterference(TestCase):
    def setUp(self):
        self.engine = CoverageEngine()

    def test_transform_at_zero(self):
        value = self.engine.interference_lt(LinkKind.SD, STATIC, 500.0, 0.0)
        assert value == pytest.approx(1.0)

    def test_mean_falls_with_serving_distance(self):
        near = self.engine.mean_interference(LinkKind.SD, STATIC, 200.0)
        far = self.engine.mean_interference(LinkKind.SD, STATIC, 5000.0)
        assert near > far > 0.0

    def test_mean_is_slope_of_transform(self):
        mean = self.engine.mean_interference(LinkKind.SD, STATIC, 500.0)
        eps = 1e-4 / mean
        lt = self.engine.interference_lt(LinkKind.SD, STATIC, 500.0, eps)
        assert -math.log(lt.real) / eps == pytest.approx(mean, rel=2e-2)

    def test_no_interference(self):
        engine = CoverageEngine(include_interference=False)
        assert engine.interference_table(LinkKind.SD, STATIC, 500.0) is None
        np.testing.assert_allclose(
            engine.interference_lt(LinkKind.SD, STATIC, 500.0, [1.0, 2.0]), [1.0, 1.0]
        )

    @pytest.mark.slow
    def test_table_matches_transform(self):
        table = self.engine.interference_table(LinkKind.SR, STATIC, 800.0)
        assert table is not None
        for w in (0.01, 1.0, 30.0):
            y = w / table.mean
            direct = self.engine.interference_lt(LinkKind.SR, STATIC, 800.0, 1j * y)
            tabulated = np.exp(table(y) - 1j * y * table.mean)
            assert abs(direct - tabulated) < 1e-4

    @pytest.mark.slow
    def test_moving_relays_interference(self):
        m = MobilityState(Scheme.SCHEME2, 40.0, 20.0)
        static = self.engine.mean_interference(LinkKind.RD, STATIC, 1500.0)
        moving = self.engine.mean_interference(LinkKind.RD, m, 1500.0)
        assert moving > 0.0
        assert moving != static

    @pytest.mark.slow
    def test_interference_lowers_coverage(self):
        q = CoverageQuery.from_db(0.0)
        quiet = noise_only().conditional_cp(LinkKind.SD, "LoS", 500.0, q, STATIC)
        noisy = self.engine.conditional_cp(LinkKind.SD, "LoS", 500.0, q, STATIC)
        assert noisy < quiet


@pytest.mark.parametrize(
    "link,r",
    [
        (LinkKind.SD, 500.0),
        (LinkKind.SD, 2000.0),
        (LinkKind.SR, 10.0),
        (LinkKind.SR, 500.0),
        (LinkKind.RD, 10.0),
        (LinkKind.RD, 500.0),
    ],
)
def test_link_coverage_in_default_network(link, r):
    engine = CoverageEngine(params=NetworkParams(H_R=1000.0))
    value = engine.link_cp(link, r, CoverageQuery.from_db(0.0), STATIC)
    assert 0.0 < value < 1.0


def small_table_engine():
    return CoverageEngine(table_min=1e-2, table_max=1e2, table_points_per_decade=4)


def test_unconverged_table_blocks_are_split(mocker):
    reference = small_table_engine().interference_table(LinkKind.SD, STATIC, 500.0)
    widths = []

    def at_most_two(f, a, b, spec, points=None):
        n = np.asarray(f(a)).size
        if n > 2:
            raise ConvergenceError("too many components")
        widths.append(n)
        return integrate_vector(f, a, b, spec, points=points)

    patched = mocker.patch("uavrelay.coverage.integrate_vector", side_effect=at_most_two)
    table = small_table_engine().interference_table(LinkKind.SD, STATIC, 500.0)
    assert patched.call_count > len(widths)
    # 17 grid points, each integrated exactly once
    assert sum(widths) == 17
    assert table.mean == reference.mean
    for y in np.logspace(-2, 2, 9) / table.mean:
        assert table(y) == pytest.approx(reference(y), abs=1e-5)


def test_unconverged_single_point_raises(mocker):
    mocker.patch("uavrelay.coverage.integrate_vector", side_effect=ConvergenceError("no luck"))
    with pytest.raises(ConvergenceError, match="no luck"):
        small_table_engine().interference_table(LinkKind.SD, STATIC, 500.0)


@pytest.mark.slow
class TestTrends:
    def test_relay_density_matters_less_once_relays_fly_in(self):
        lambdas = np.logspace(-8, -6, 5)
        heights = (100.0, 500.0, 1000.0)

        def association(t):
            m = MobilityState(Scheme.SCHEME2, 40.0, t)
            return np.array(
                [
                    [
                        relay_association_probability(NetworkParams(lambda_R=lam, H_R=h), m)
                        for lam in lambdas
                    ]
                    for h in heights
                ]
            )

        start = association(0.0)
        later = association(100.0)
        assert np.all(np.diff(start, axis=1) > 0)
        assert np.all(np.diff(start, axis=0) < 0)
        spread = np.ptp(start, axis=1).max()
        assert np.ptp(later, axis=1).max() < spread

    @pytest.mark.parametrize("H_R", [1000.0, 2000.0])
    def test_second_hop_peaks_near_travel_time(self, H_R):
        params = NetworkParams(H_R=H_R)
        engine = CoverageEngine(params=params)
        travel = expected_travel_time(params)
        ratios = np.linspace(0.0, 3.0, 13)
        values = []
        for ratio in ratios:
            t = ratio * travel
            q = CoverageQuery.from_db(0.0, t, Quantity.SECOND_HOP)
            values.append(engine.evaluate(q, params.mobility(t)).value)
        values = np.array(values)
        assert np.all(np.diff(values[ratios <= 1.0]) >= -1e-4)
        assert 0.75 <= ratios[np.argmax(values)] <= 1.75

    def test_high_relays_beat_low_relays(self):
        q = CoverageQuery.from_db(0.0)
        low = CoverageEngine(params=NetworkParams(H_R=100.0)).evaluate(q, STATIC).value
        high = CoverageEngine(params=NetworkParams(H_R=1000.0)).evaluate(q, STATIC).value
        assert high > low
