"""Network topology, association geometry and serving-distance distributions.

The typical UE sits at the origin.  TBSs and UAV relays (RNs) form two
independent homogeneous Poisson point processes of densities ``lambda_T`` and
``lambda_R``; the RNs fly at altitude ``H_R``.  Under the second mobility
scheme the serving RN flies straight towards the UE at speed ``v`` while all
other RNs move in independent random directions.
"""

# Distributed under the terms of the Modified BSD License.
from __future__ import annotations

import dataclasses
import enum
import math
import typing as t

import numpy as np
import numpy.typing as npt
from scipy import special
from traitlets import Float, Instance, TraitError, default, validate
from traitlets.config import Config, Configurable

from .channel import LosModelParams, PathLossParams, RicianKModel
from .links import LinkKind, LosState, Propagation, Role
from .quad import QuadratureSpec, integrate_semi_infinite
from .utils.units import db_to_linear

if t.TYPE_CHECKING:
    from traitlets.utils.bunch import Bunch

__all__ = [
    "AssociationRegions",
    "CoverageQuery",
    "DomainError",
    "LinkKind",
    "LosState",
    "MobilityState",
    "ModelError",
    "NetworkParams",
    "Propagation",
    "Quantity",
    "Role",
    "Scheme",
    "approximation_diagnostic",
    "direct_association_probability",
    "expected_travel_time",
    "interferer_density",
    "mean_nearest_distance",
    "nearest_distance_ccdf",
    "nearest_distance_pdf",
    "relay_association_probability",
    "same_tbs_probability",
    "serving_rn_distance",
]

# tolerance on the arccos argument of the moving-interferer density
ARCCOS_SLACK = 1e-9


class ModelError(Exception):
    """Internal inconsistency in the network model."""


class DomainError(ModelError, ValueError):
    """An argument is outside the domain of a model function."""


def _out(value: npt.NDArray[t.Any]) -> t.Any:
    return value.item() if value.ndim == 0 else value


class NetworkParams(Configurable):
    """All scenario constants: densities, powers, altitude, gains and channel.

    The channel parameter sets are child configurables and are configured
    under their own sections (``c.PathLossParams.alpha_AL = 3``).
    """

    lambda_T = Float(5e-8, help="Density of terrestrial base stations [1/m²].").tag(config=True)
    lambda_R = Float(1e-7, help="Density of UAV relay nodes [1/m²].").tag(config=True)
    H_R = Float(1000.0, help="Altitude of the UAV relay nodes [m].").tag(config=True)
    P_T = Float(1.0, help="TBS transmit power [W].").tag(config=True)
    P_R = Float(1.0, help="RN transmit power [W].").tag(config=True)
    sigma2 = Float(1e-10, help="Noise power [W].").tag(config=True)
    v = Float(40.0, help="UAV speed [m/s].").tag(config=True)
    G_TM = Float(2.0, help="Main-lobe beamforming gain of the TBSs.").tag(config=True)
    G_Tm = Float(0.5, help="Side-lobe beamforming gain of the TBSs.").tag(config=True)
    G_RM = Float(1.0, help="Main-lobe beamforming gain of the RNs.").tag(config=True)
    G_Rm = Float(1.0, help="Side-lobe beamforming gain of the RNs.").tag(config=True)

    path_loss = Instance(PathLossParams)
    los_model = Instance(LosModelParams)
    k_model = Instance(RicianKModel)

    @default("path_loss")
    def _path_loss_default(self) -> PathLossParams:
        return PathLossParams(parent=self)

    @default("los_model")
    def _los_model_default(self) -> LosModelParams:
        return LosModelParams(parent=self)

    @default("k_model")
    def _k_model_default(self) -> RicianKModel:
        return RicianKModel(parent=self)

    def _fail(self, name: str, requirement: str, value: t.Any) -> t.NoReturn:
        raise TraitError(f"{type(self).__name__}.{name} must be {requirement}, got {value!r}")

    @validate("lambda_T", "lambda_R", "P_T", "P_R")
    def _validate_positive(self, proposal: Bunch) -> float:
        if not proposal.value > 0:
            self._fail(proposal.trait.name, "> 0", proposal.value)
        return float(proposal.value)

    @validate("H_R", "sigma2", "v")
    def _validate_nonnegative(self, proposal: Bunch) -> float:
        if not proposal.value >= 0:
            self._fail(proposal.trait.name, ">= 0", proposal.value)
        return float(proposal.value)

    @validate("G_TM", "G_Tm")
    def _validate_tbs_gains(self, proposal: Bunch) -> float:
        value = proposal.value
        if not value > 0:
            self._fail(proposal.trait.name, "> 0", value)
        main, side = (value, self.G_Tm) if proposal.trait.name == "G_TM" else (self.G_TM, value)
        if main < side:
            self._fail(proposal.trait.name, f"such that G_TM >= G_Tm ({main} < {side})", value)
        return float(value)

    @validate("G_RM", "G_Rm")
    def _validate_rn_gains(self, proposal: Bunch) -> float:
        value = proposal.value
        if not value > 0:
            self._fail(proposal.trait.name, "> 0", value)
        main, side = (value, self.G_Rm) if proposal.trait.name == "G_RM" else (self.G_RM, value)
        if main < side:
            self._fail(proposal.trait.name, f"such that G_RM >= G_Rm ({main} < {side})", value)
        return float(value)

    def to_config(self) -> Config:
        """Plain nested ``Config`` of this object and its channel children.

        Suitable for pickling to worker processes; rebuild with
        ``NetworkParams(config=cfg)``.
        """
        cfg = Config()
        for obj in (self, self.path_loss, self.los_model, self.k_model):
            cfg[type(obj).__name__] = Config(obj.trait_values(config=True))
        return cfg

    def with_values(self, **changes: float) -> NetworkParams:
        """A copy with some scalar parameters replaced (used by sweeps)."""
        cfg = self.to_config()
        for name, value in changes.items():
            if not self.has_trait(name):
                raise KeyError(f"NetworkParams has no parameter {name!r}")
            cfg.NetworkParams[name] = value
        return type(self)(config=cfg)

    def mobility(self, t: float = 0.0, scheme: Scheme | str = "scheme2") -> MobilityState:
        return MobilityState(Scheme(scheme), self.v, t)

    def fingerprint(self) -> tuple[t.Any, ...]:
        """Hashable snapshot of every parameter, for cache keys."""
        cfg = self.to_config()
        return tuple(
            (section, tuple(sorted(cfg[section].items()))) for section in sorted(cfg.keys())
        )


class Scheme(enum.Enum):
    HOVER = "hover"
    SCHEME1 = "scheme1"
    SCHEME2 = "scheme2"


@dataclasses.dataclass(frozen=True)
class MobilityState:
    """Mobility scheme, UAV speed [m/s] and elapsed time [s]."""

    scheme: Scheme = Scheme.SCHEME2
    v: float = 0.0
    t: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if self.t < 0:
            raise DomainError(f"MobilityState.t must be >= 0, got {self.t!r}")
        if self.v < 0:
            raise DomainError(f"MobilityState.v must be >= 0, got {self.v!r}")

    @property
    def vt(self) -> float:
        return self.v * self.t

    def at(self, t: float) -> MobilityState:
        return dataclasses.replace(self, t=t)

    def effective(self) -> MobilityState:
        """The state the analytical model evaluates.

        Hovering and the first scheme behave like the second scheme at t = 0,
        and every static state collapses to the same value.
        """
        if self.scheme is Scheme.SCHEME2 and self.vt > 0:
            return self
        return STATIC


STATIC = MobilityState(Scheme.SCHEME2, 0.0, 0.0)


class Quantity(enum.Enum):
    TOTAL = "total"
    DIRECT_LINK = "direct_link"
    FIRST_HOP = "first_hop"
    SECOND_HOP = "second_hop"
    RELAY_LINK = "relay_link"
    ASSOCIATION = "association"


@dataclasses.dataclass(frozen=True)
class CoverageQuery:
    """SINR threshold (linear), time and requested quantity."""

    beta: float
    t: float = 0.0
    quantity: Quantity = Quantity.TOTAL

    def __post_init__(self) -> None:
        object.__setattr__(self, "quantity", Quantity(self.quantity))
        if not self.beta > 0:
            raise DomainError(f"CoverageQuery.beta must be > 0, got {self.beta!r}")
        if self.t < 0:
            raise DomainError(f"CoverageQuery.t must be >= 0, got {self.t!r}")

    @classmethod
    def from_db(
        cls, beta_dB: float, t: float = 0.0, quantity: Quantity | str = Quantity.TOTAL
    ) -> CoverageQuery:
        return cls(db_to_linear(beta_dB), t, Quantity(quantity))

    @property
    def beta_dB(self) -> float:
        return 10.0 * math.log10(self.beta)


@dataclasses.dataclass(frozen=True)
class AssociationRegions:
    """Nearest-neighbour split of the ``(r_SD, r_RD0)`` quadrant at time t.

    The UE is served directly iff ``r_SD**2 <= r_RD(t)**2 + H_R**2``.
    """

    H_R: float
    vt: float

    def boundary(self, r_RD0: npt.ArrayLike) -> t.Any:
        """Largest ``r_SD`` still served directly, as a function of ``r_RD0``."""
        r_t = np.asarray(serving_rn_distance(r_RD0, 1.0, self.vt))
        return _out(np.sqrt(r_t**2 + self.H_R**2))

    def is_direct(self, r_SD: npt.ArrayLike, r_RD0: npt.ArrayLike) -> t.Any:
        r_SD = np.asarray(r_SD, dtype=float)
        return _out(np.asarray(r_SD <= np.asarray(self.boundary(r_RD0))))

    def is_relay(self, r_SD: npt.ArrayLike, r_RD0: npt.ArrayLike) -> t.Any:
        return _out(~np.asarray(self.is_direct(r_SD, r_RD0)))


def serving_rn_distance(r_RD0: npt.ArrayLike, v: float, t: float) -> t.Any:
    """Ground distance of the serving RN at time t: ``max(r_RD0 - v t, 0)``."""
    return _out(np.maximum(np.asarray(r_RD0, dtype=float) - v * t, 0.0))


def nearest_distance_pdf(params: NetworkParams, link: LinkKind, r: npt.ArrayLike) -> t.Any:
    """``2 pi lambda r exp(-pi lambda r^2)``, the nearest-neighbour distance density."""
    lam = link.density(params)
    r = np.asarray(r, dtype=float)
    return _out(2.0 * np.pi * lam * r * np.exp(-np.pi * lam * r**2))


def nearest_distance_ccdf(params: NetworkParams, link: LinkKind, r: npt.ArrayLike) -> t.Any:
    """Void probability of the disc of radius r."""
    lam = link.density(params)
    return _out(np.exp(-np.pi * lam * np.asarray(r, dtype=float) ** 2))


def mean_nearest_distance(params: NetworkParams, link: LinkKind) -> float:
    return 1.0 / (2.0 * math.sqrt(link.density(params)))


def expected_travel_time(params: NetworkParams) -> float:
    """Mean initial distance to the serving RN divided by the UAV speed."""
    if params.v <= 0:
        raise DomainError("expected_travel_time needs NetworkParams.v > 0")
    return mean_nearest_distance(params, LinkKind.RD) / params.v


def interferer_density(
    params: NetworkParams,
    link: LinkKind,
    mobility: MobilityState,
    serving_dist_0: float,
    r: npt.ArrayLike,
) -> t.Any:
    """Density of the interferers of ``link`` at ground distance ``r`` [1/m²].

    ``serving_dist_0`` is the initial distance to the serving transmitter.
    TBSs do not move, so the SD and SR interferers form a density ``lambda_T``
    outside the serving distance.  RN interferers under the second scheme see
    the serving RN's hole deformed by the motion of the other RNs.
    """
    r = np.asarray(r, dtype=float)
    lam = link.density(params)
    m = mobility.effective()
    vt = m.vt
    if link is not LinkKind.RD or vt == 0:
        return _out(np.where(r >= serving_dist_0, lam, 0.0))

    r0 = float(serving_dist_0)
    inner = abs(r0 - vt)
    outer = r0 + vt
    with np.errstate(divide="ignore", invalid="ignore"):
        arg = (r0**2 - r**2 - vt**2) / (2.0 * r * vt)
    # r -> 0 on the ring only when r0 == vt, where arg -> 0
    arg = np.where(r > 0, arg, 0.0)
    ring = (r >= inner) & (r < outer)
    if np.any(ring & (np.abs(arg) > 1 + ARCCOS_SLACK)):
        raise ModelError(f"arccos argument out of range in the interferer density at r0={r0}")
    ring_value = lam / np.pi * np.arccos(np.clip(np.where(ring, arg, 1.0), -1.0, 1.0))
    inside = lam if r0 < vt else 0.0
    out = np.where(r >= outer, lam, np.where(ring, ring_value, inside))
    return _out(out)


def interferer_breakpoints(
    link: LinkKind, mobility: MobilityState, serving_dist_0: float
) -> list[float]:
    """Distances where :func:`interferer_density` changes form."""
    m = mobility.effective()
    if link is not LinkKind.RD or m.vt == 0:
        return [float(serving_dist_0)]
    return sorted({abs(serving_dist_0 - m.vt), serving_dist_0 + m.vt})


def same_tbs_probability(
    params: NetworkParams, r_SD: npt.ArrayLike, r_RD_t: npt.ArrayLike
) -> t.Any:
    """Probability that the UE and its serving RN pick the same nearest TBS.

    ``exp(-pi lambda_T (r_SD^2 + r_RD^2)) I0(2 pi lambda_T r_SD r_RD)``
    evaluated as ``i0e(b) exp(-pi lambda_T (r_SD - r_RD)^2)`` so neither
    factor overflows.
    """
    lam = params.lambda_T
    r1 = np.asarray(r_SD, dtype=float)
    r2 = np.asarray(r_RD_t, dtype=float)
    b = 2.0 * np.pi * lam * r1 * r2
    return _out(np.clip(special.i0e(b) * np.exp(-np.pi * lam * (r1 - r2) ** 2), 0.0, 1.0))


def _association_spec(spec: QuadratureSpec | None) -> QuadratureSpec:
    return spec if spec is not None else QuadratureSpec(epsabs=1e-11, epsrel=1e-10)


def relay_association_probability(
    params: NetworkParams,
    mobility: MobilityState,
    spec: QuadratureSpec | None = None,
) -> float:
    """Probability that the UE is served through a relay at time t.

    Lower-tail term: the serving RN already hovers above the UE, so the
    relay wins iff no TBS lies within H_R.  Upper-tail term: integral over the
    serving RN's remaining distance ``u = r_RD0 - vt``.
    """
    lt, lr, H = params.lambda_T, params.lambda_R, params.H_R
    vt = mobility.effective().vt
    hover_mass = math.exp(-math.pi * lt * H**2) * -math.expm1(-math.pi * lr * vt**2)

    def f(u: float) -> float:
        r = u + vt
        return 2 * math.pi * lr * r * math.exp(-math.pi * (lt * u**2 + lr * r**2))

    scale = 1.0 / math.sqrt(math.pi * (lt + lr))
    res = integrate_semi_infinite(f, _association_spec(spec), scale=scale, points=[scale])
    value = hover_mass + math.exp(-math.pi * lt * H**2) * res.value
    return min(max(value, 0.0), 1.0)


def direct_association_probability(
    params: NetworkParams,
    mobility: MobilityState,
    spec: QuadratureSpec | None = None,
) -> float:
    return 1.0 - relay_association_probability(params, mobility, spec)


def approximation_diagnostic(
    params: NetworkParams,
    mobility: MobilityState,
    spec: QuadratureSpec | None = None,
) -> float:
    """Mean same-TBS probability over the relay-association region.

    Averages :func:`same_tbs_probability` over ``(r_SD, r_RD0)`` drawn from
    their nearest-neighbour densities and restricted to relay association.
    It measures how far the independence of the two TBS distances is from
    the truth; 0 means exact.
    """
    spec = spec if spec is not None else QuadratureSpec(epsabs=1e-7, epsrel=1e-6)
    regions = AssociationRegions(params.H_R, mobility.effective().vt)
    vt = regions.vt
    H = params.H_R
    ct = math.pi * params.lambda_T
    cr = math.pi * params.lambda_R

    def inner(r0: float) -> float:
        # r_SD ranges over (boundary, inf)
        lo = float(regions.boundary(r0))
        r_t = max(r0 - vt, 0.0)

        def g(r: float) -> float:
            pdf = nearest_distance_pdf(params, LinkKind.SD, r)
            return float(pdf * same_tbs_probability(params, r, r_t))

        tail_scale = 1.0 / math.sqrt(ct)
        return integrate_semi_infinite(g, spec, a=lo, scale=tail_scale).value

    def weight(r0: float) -> float:
        return float(nearest_distance_pdf(params, LinkKind.RD, r0))

    def outer(r0: float) -> float:
        return weight(r0) * inner(r0)

    def envelope(r0: float) -> float:
        return weight(r0) * math.exp(-ct * (max(r0 - vt, 0.0) ** 2 + H**2))

    total = integrate_semi_infinite(
        outer, spec, envelope=envelope, scale=1.0 / math.sqrt(cr), points=[vt] if vt > 0 else []
    ).value
    mass = relay_association_probability(params, mobility)
    if mass <= 0:
        return 0.0
    return float(min(max(total / mass, 0.0), 1.0))
