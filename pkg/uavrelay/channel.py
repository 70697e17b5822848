"""Propagation: path loss, LoS probability, Rician fading and beamforming gains.

All functions are vectorised over the distance argument ``r`` (ground distance
in metres) and return a Python ``float`` for scalar input.
"""

# Distributed under the terms of the Modified BSD License.
from __future__ import annotations

import typing as t

import numpy as np
import numpy.typing as npt
from traitlets import Float, TraitError, Unicode, observe, validate
from traitlets.config import Configurable, LoggingConfigurable
from traitlets.utils.importstring import import_item

from .links import LinkKind, LosState, Propagation, Role

if t.TYPE_CHECKING:
    from traitlets.utils.bunch import Bunch

    from .model import NetworkParams

KFactorFunction = t.Callable[[Propagation, LosState, npt.NDArray[np.float64]], npt.ArrayLike]

# the A2G 3-D distance is floored so that H_R = 0 stays finite under the relay
MIN_A2G_DISTANCE = 1.0


def _scalar_or_array(value: npt.NDArray[t.Any]) -> t.Any:
    return value.item() if value.ndim == 0 else value


class PathLossParams(LoggingConfigurable):
    """Linear-scale intercepts and exponents of the power-law path loss.

    ``L(d) = A * d**alpha`` with ``A`` a *linear* intercept: ``A = 0.01``
    corresponds to a floating intercept of -20 dB.
    """

    A_GL = Float(0.01, help="G2G LoS intercept (linear scale).").tag(config=True)
    A_GN = Float(0.01, help="G2G NLoS intercept (linear scale).").tag(config=True)
    A_AL = Float(0.01, help="A2G LoS intercept (linear scale).").tag(config=True)
    A_AN = Float(0.01, help="A2G NLoS intercept (linear scale).").tag(config=True)
    alpha_GL = Float(3.0, help="G2G LoS path loss exponent.").tag(config=True)
    alpha_GN = Float(4.0, help="G2G NLoS path loss exponent.").tag(config=True)
    alpha_AL = Float(3.0, help="A2G LoS path loss exponent.").tag(config=True)
    alpha_AN = Float(4.0, help="A2G NLoS path loss exponent.").tag(config=True)

    @validate("A_GL", "A_GN", "A_AL", "A_AN")
    def _validate_intercept(self, proposal: Bunch) -> float:
        if not proposal.value > 0:
            raise TraitError(
                f"{type(self).__name__}.{proposal.trait.name} must be > 0, got {proposal.value!r}"
            )
        return float(proposal.value)

    @observe("alpha_GL", "alpha_GN", "alpha_AL", "alpha_AN")
    def _alpha_changed(self, change: Bunch) -> None:
        self.check_sanity()

    def check_sanity(self) -> list[str]:
        """Log (never raise) when exponents look physically odd.

        Returns the list of warnings emitted.
        """
        problems = []
        for cls in ("G", "A"):
            los = getattr(self, f"alpha_{cls}L")
            nlos = getattr(self, f"alpha_{cls}N")
            for name, value in ((f"alpha_{cls}L", los), (f"alpha_{cls}N", nlos)):
                if value < 2:
                    problems.append(f"{type(self).__name__}.{name}={value} is below free space (2)")
            if nlos < los:
                problems.append(
                    f"{type(self).__name__}.alpha_{cls}N={nlos} is smaller than alpha_{cls}L={los}"
                )
        for msg in problems:
            self.log.warning(msg)
        return problems

    def intercept(self, propagation: Propagation, state: LosState) -> float:
        return float(getattr(self, f"A_{propagation.value[0]}{state.suffix}"))

    def exponent(self, propagation: Propagation, state: LosState) -> float:
        return float(getattr(self, f"alpha_{propagation.value[0]}{state.suffix}"))


class LosModelParams(Configurable):
    """Parameters of the G2G d1/d2 model and of the A2G elevation-angle model."""

    d1 = Float(18.0, help="G2G near-field critical distance [m].").tag(config=True)
    d2 = Float(63.0, help="G2G far-field critical distance [m].").tag(config=True)
    a = Float(9.612, help="A2G LoS fitting parameter a.").tag(config=True)
    b = Float(0.158, help="A2G LoS fitting parameter b.").tag(config=True)

    @validate("d1", "d2", "a", "b")
    def _validate_positive(self, proposal: Bunch) -> float:
        if not proposal.value > 0:
            raise TraitError(
                f"{type(self).__name__}.{proposal.trait.name} must be > 0, got {proposal.value!r}"
            )
        return float(proposal.value)


class RicianKModel(Configurable):
    """Rician K factor per propagation class and LoS state.

    By default the K factor is constant.  ``k_factor_function`` names a
    callable ``f(propagation, los_state, r) -> K`` which replaces the
    constants with a distance-dependent model.
    """

    K_GL = Float(10.0, help="G2G LoS Rician K factor.").tag(config=True)
    K_GN = Float(0.0, help="G2G NLoS Rician K factor.").tag(config=True)
    K_AL = Float(10.0, help="A2G LoS Rician K factor.").tag(config=True)
    K_AN = Float(0.0, help="A2G NLoS Rician K factor.").tag(config=True)

    k_factor_function = Unicode(
        "",
        help="""Import string of a distance-dependent K factor.

        The callable is invoked as ``f(propagation, los_state, r)`` with ``r``
        an array of ground distances and must return non-negative values.
        Leave empty to use the constant K_GL ... K_AN.
        """,
    ).tag(config=True)

    _function: KFactorFunction | None = None

    @validate("K_GL", "K_GN", "K_AL", "K_AN")
    def _validate_k(self, proposal: Bunch) -> float:
        if proposal.value < 0:
            raise TraitError(
                f"{type(self).__name__}.{proposal.trait.name} must be >= 0, got {proposal.value!r}"
            )
        return float(proposal.value)

    @validate("k_factor_function")
    def _validate_function(self, proposal: Bunch) -> str:
        name = proposal.value
        if name:
            try:
                func = import_item(name)
            except (ImportError, AttributeError, ValueError) as e:
                raise TraitError(
                    f"{type(self).__name__}.k_factor_function: cannot import {name!r}: {e}"
                ) from e
            if not callable(func):
                raise TraitError(
                    f"{type(self).__name__}.k_factor_function: {name!r} is not callable"
                )
            self._function = func
        else:
            self._function = None
        return t.cast(str, name)

    @property
    def is_constant(self) -> bool:
        return self._function is None

    def constant(self, propagation: Propagation, state: LosState) -> float:
        return float(getattr(self, f"K_{propagation.value[0]}{state.suffix}"))

    def k_factor(self, propagation: Propagation, state: LosState, r: npt.ArrayLike) -> t.Any:
        """K factor at ground distance(s) ``r``."""
        r = np.asarray(r, dtype=float)
        if self._function is None:
            return _scalar_or_array(np.full_like(r, self.constant(propagation, state)))
        k = np.broadcast_to(np.asarray(self._function(propagation, state, r), dtype=float), r.shape)
        if np.any(k < 0) or not np.all(np.isfinite(k)):
            raise ValueError(
                f"{self.k_factor_function} returned a negative or non-finite K factor"
            )
        return _scalar_or_array(np.array(k))


def effective_distance(link: LinkKind, r: npt.ArrayLike, H_R: float) -> t.Any:
    """Distance entering the path loss: ``1 + r`` for G2G, the floored 3-D distance for A2G."""
    r = np.asarray(r, dtype=float)
    if link.propagation is Propagation.G2G:
        return _scalar_or_array(1.0 + r)
    return _scalar_or_array(np.maximum(np.hypot(r, H_R), MIN_A2G_DISTANCE))


def path_loss_state(
    link: LinkKind, params: PathLossParams, state: LosState, r: npt.ArrayLike, H_R: float
) -> t.Any:
    d = np.asarray(effective_distance(link, r, H_R))
    prop = link.propagation
    return _scalar_or_array(params.intercept(prop, state) * d ** params.exponent(prop, state))


def path_loss(
    link: LinkKind, params: PathLossParams, r: npt.ArrayLike, H_R: float = 0.0
) -> tuple[t.Any, t.Any]:
    """Linear path loss ``(L_LoS, L_NLoS)`` of ``link`` at ground distance ``r``."""
    return (
        path_loss_state(link, params, LosState.LOS, r, H_R),
        path_loss_state(link, params, LosState.NLOS, r, H_R),
    )


def los_probability(
    link: LinkKind, params: LosModelParams, r: npt.ArrayLike, H_R: float = 0.0
) -> t.Any:
    """LoS probability of ``link`` at ground distance ``r``.

    The NLoS probability is ``1 - los_probability(...)``.
    """
    r = np.asarray(r, dtype=float)
    if link.propagation is Propagation.G2G:
        with np.errstate(divide="ignore"):
            near = np.minimum(np.where(r > 0, params.d1 / np.where(r > 0, r, 1.0), 1.0), 1.0)
        far = np.exp(-r / params.d2)
        p = near * (1.0 - far) + far
    else:
        theta = np.where(r > 0, np.degrees(np.arctan2(H_R, np.where(r > 0, r, 1.0))), 90.0)
        p = 1.0 / (1.0 + params.a * np.exp(-params.b * (theta - params.a)))
    return _scalar_or_array(np.clip(p, 0.0, 1.0))


def state_probability(
    link: LinkKind, params: LosModelParams, state: LosState, r: npt.ArrayLike, H_R: float = 0.0
) -> t.Any:
    p = np.asarray(los_probability(link, params, r, H_R))
    return _scalar_or_array(p if state is LosState.LOS else 1.0 - p)


def rician_power_lt(K: npt.ArrayLike, s: npt.ArrayLike) -> t.Any:
    """Laplace transform of a unit-power Rician fading power gain.

    ``((K+1)/(K+1+s)) * exp(-K s / (K+1+s))``, for real or complex ``s``.
    ``K = 0`` is Rayleigh fading, ``1/(1+s)``.
    """
    K = np.asarray(K, dtype=float)
    s = np.asarray(s)
    denom = K + 1.0 + s
    out = (K + 1.0) / denom * np.exp(-K * s / denom)
    return _scalar_or_array(out)


def beamforming_gain(params: NetworkParams, link: LinkKind, role: Role | str) -> float:
    """Sectored-antenna gain of ``link`` for the serving transmitter or an interferer."""
    return link.gain(params, Role(role))
