from __future__ import annotations

import math
from unittest import TestCase

import numpy as np
import pytest
from scipy import stats
from traitlets import TraitError

from uavrelay import channel
from uavrelay.channel import LosModelParams, PathLossParams, RicianKModel
from uavrelay.links import LinkKind, LosState, Propagation, Role
from uavrelay.model import NetworkParams
from uavrelay.utils import db_to_linear, linear_to_db


def distance_k(propagation, state, r):
    """K factor growing linearly with distance, used through its import string."""
    return 1.0 + r / 100.0


def negative_k(propagation, state, r):
    return -np.ones_like(r)


class TestPathLoss(TestCase):
    def setUp(self):
        self.pl = PathLossParams()

    def test_ground_link_at_zero_distance(self):
        los, nlos = channel.path_loss(LinkKind.SD, self.pl, 0.0)
        assert los == pytest.approx(0.01)
        assert nlos == pytest.approx(0.01)

    def test_air_link_uses_altitude(self):
        los, nlos = channel.path_loss(LinkKind.RD, self.pl, 0.0, H_R=1000.0)
        assert los == pytest.approx(0.01 * 1000.0**3)
        assert nlos == pytest.approx(0.01 * 1000.0**4)

    def test_air_distance_is_floored(self):
        assert channel.effective_distance(LinkKind.SR, 0.0, 0.0) == channel.MIN_A2G_DISTANCE
        assert channel.effective_distance(LinkKind.SR, 3.0, 4.0) == pytest.approx(5.0)

    def test_ground_distance_is_shifted(self):
        assert channel.effective_distance(LinkKind.SD, 9.0, 1000.0) == pytest.approx(10.0)

    def test_vectorised(self):
        r = np.array([0.0, 10.0, 100.0])
        los, nlos = channel.path_loss(LinkKind.SD, self.pl, r)
        assert los.shape == (3,)
        assert np.all(np.diff(los) > 0)
        assert np.all(nlos >= los)

    def test_scalar_in_scalar_out(self):
        los, _ = channel.path_loss(LinkKind.SD, self.pl, 5.0)
        assert isinstance(los, float)

    def test_intercept_must_be_positive(self):
        with pytest.raises(TraitError, match="PathLossParams.A_GL"):
            PathLossParams(A_GL=0.0)

    def test_sanity_warnings(self):
        assert self.pl.check_sanity() == []
        pl = PathLossParams(alpha_AL=1.5)
        problems = pl.check_sanity()
        assert any("alpha_AL" in p and "free space" in p for p in problems)
        pl = PathLossParams(alpha_GL=4.0, alpha_GN=3.0)
        assert any("alpha_GN" in p for p in pl.check_sanity())


class TestLosProbability(TestCase):
    def setUp(self):
        self.los = LosModelParams()

    def test_ground_close_range_is_los(self):
        assert channel.los_probability(LinkKind.SD, self.los, 0.0) == 1.0
        assert channel.los_probability(LinkKind.SD, self.los, 10.0) == pytest.approx(1.0)

    def test_ground_far_range(self):
        r = 1000.0
        expected = 18.0 / r * (1 - math.exp(-r / 63.0)) + math.exp(-r / 63.0)
        assert channel.los_probability(LinkKind.SD, self.los, r) == pytest.approx(expected)

    def test_air_overhead_is_los(self):
        assert channel.los_probability(LinkKind.RD, self.los, 0.0, 1000.0) > 0.999

    def test_air_decreases_with_distance(self):
        r = np.linspace(0, 20000, 50)
        p = channel.los_probability(LinkKind.RD, self.los, r, 500.0)
        assert np.all(np.diff(p) <= 0)
        assert np.all((p >= 0) & (p <= 1))

    def test_air_increases_with_altitude(self):
        low = channel.los_probability(LinkKind.SR, self.los, 2000.0, 100.0)
        high = channel.los_probability(LinkKind.SR, self.los, 2000.0, 2000.0)
        assert high > low

    def test_state_probabilities_sum_to_one(self):
        r = np.array([0.0, 50.0, 500.0, 5000.0])
        for link in LinkKind:
            p_los = channel.state_probability(link, self.los, LosState.LOS, r, 300.0)
            p_nlos = channel.state_probability(link, self.los, LosState.NLOS, r, 300.0)
            np.testing.assert_allclose(p_los + p_nlos, 1.0)

    def test_parameters_must_be_positive(self):
        with pytest.raises(TraitError, match="LosModelParams.d1"):
            LosModelParams(d1=-1.0)


@pytest.mark.parametrize("K", [0.0, 1.0, 10.0])
def test_rician_transform_at_zero(K):
    assert channel.rician_power_lt(K, 0.0) == pytest.approx(1.0)


def test_rayleigh_transform():
    s = np.array([0.1, 1.0, 10.0])
    np.testing.assert_allclose(channel.rician_power_lt(0.0, s), 1.0 / (1.0 + s))


@pytest.mark.parametrize("K", [0.0, 3.0, 10.0])
def test_rician_power_has_unit_mean(K):
    eps = 1e-6
    slope = (1.0 - channel.rician_power_lt(K, eps)) / eps
    assert slope == pytest.approx(1.0, rel=1e-4)


def test_rician_characteristic_function_is_bounded():
    x = np.linspace(0.0, 100.0, 101)
    values = channel.rician_power_lt(10.0, -1j * x)
    assert np.all(np.abs(values) <= 1.0 + 1e-12)


@pytest.mark.parametrize("K", [0.0, 1.0, 3.0, 10.0])
@pytest.mark.parametrize("s", [0.1, 0.5, 1.0, 2.0, 5.0])
def test_rician_transform_matches_noncentral_chi2(K, s):
    # unit-mean power is a noncentral chi-square with 2 degrees of freedom over 2(K + 1)
    scale = 2.0 * (K + 1.0)
    dist = stats.ncx2(2, 2.0 * K) if K > 0 else stats.chi2(2)
    expected = dist.expect(lambda y: math.exp(-s * y / scale), epsabs=1e-12, epsrel=1e-10)
    assert channel.rician_power_lt(K, s) == pytest.approx(expected, abs=1e-7)


def test_rician_transform_example():
    assert channel.rician_power_lt(10.0, 1.0) == pytest.approx(11 / 12 * math.exp(-10 / 12))
    assert channel.rician_power_lt(10.0, 1.0) == pytest.approx(0.39838, abs=1e-5)


class TestRicianKModel(TestCase):
    def test_constants(self):
        k = RicianKModel()
        assert k.is_constant
        assert k.k_factor(Propagation.G2G, LosState.LOS, 10.0) == 10.0
        assert k.k_factor(Propagation.A2G, LosState.NLOS, 10.0) == 0.0
        np.testing.assert_array_equal(
            k.k_factor(Propagation.A2G, LosState.LOS, np.array([1.0, 2.0])), [10.0, 10.0]
        )

    def test_negative_constant_rejected(self):
        with pytest.raises(TraitError, match="RicianKModel.K_AL"):
            RicianKModel(K_AL=-1.0)

    def test_distance_dependent(self):
        k = RicianKModel(k_factor_function="tests.test_channel.distance_k")
        assert not k.is_constant
        assert k.k_factor(Propagation.A2G, LosState.LOS, 200.0) == pytest.approx(3.0)

    def test_bad_import_string(self):
        with pytest.raises(TraitError, match="k_factor_function"):
            RicianKModel(k_factor_function="tests.test_channel.no_such_thing")

    def test_negative_output_rejected(self):
        k = RicianKModel(k_factor_function="tests.test_channel.negative_k")
        with pytest.raises(ValueError, match="negative"):
            k.k_factor(Propagation.G2G, LosState.LOS, np.array([1.0]))

    def test_reset_to_constant(self):
        k = RicianKModel(k_factor_function="tests.test_channel.distance_k")
        k.k_factor_function = ""
        assert k.is_constant


def test_beamforming_gains():
    p = NetworkParams(G_TM=4.0, G_Tm=0.25, G_RM=2.0, G_Rm=0.5)
    assert channel.beamforming_gain(p, LinkKind.SD, Role.TARGET) == 4.0
    assert channel.beamforming_gain(p, LinkKind.SD, "interference") == 0.25
    assert channel.beamforming_gain(p, LinkKind.SR, Role.TARGET) == 8.0
    assert channel.beamforming_gain(p, LinkKind.SR, Role.INTERFERENCE) == 0.125
    assert channel.beamforming_gain(p, LinkKind.RD, Role.TARGET) == 2.0
    assert channel.beamforming_gain(p, LinkKind.RD, Role.INTERFERENCE) == 0.5


class TestUnits(TestCase):
    def test_round_values(self):
        assert db_to_linear(10.0) == pytest.approx(10.0)
        assert db_to_linear(-20.0) == pytest.approx(0.01)
        assert linear_to_db(100.0) == pytest.approx(20.0)

    def test_arrays(self):
        np.testing.assert_allclose(db_to_linear(np.array([0.0, 3.0])), [1.0, 10**0.3])

    def test_non_positive_ratio(self):
        with pytest.raises(ValueError, match="non-positive"):
            linear_to_db(0.0)
