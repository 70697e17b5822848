"""Analytical coverage engine.

Three nested layers of integration:

1. the radial PGFL integral giving the Laplace transform of the aggregate
   interference of a link (``interference_lt``);
2. the Gil-Pelaez inversion giving the coverage probability of a link
   conditioned on its serving distance and LoS state (``conditional_cp``);
3. the distance integrals over the serving-node distributions, split by
   association region (``total_cp``).

The interference exponent is tabulated once per (link, serving distance,
mobility) on a logarithmic grid and reused by every SINR threshold, LoS state
and Gil-Pelaez node.
"""

# Distributed under the terms of the Modified BSD License.
from __future__ import annotations

import cmath
import dataclasses
import math
import threading
import typing as t

import numpy as np
import numpy.typing as npt
from scipy.interpolate import CubicSpline
from traitlets import Bool, Float, Instance, Int, TraitError, default, observe, validate
from traitlets.config import LoggingConfigurable

from . import channel, model
from .links import LinkKind, LosState, Role
from .model import CoverageQuery, MobilityState, NetworkParams, Quantity
from .quad import (
    ConvergenceError,
    GilPelaezQuadrature,
    InnerQuadrature,
    OuterQuadrature,
    QuadratureSpec,
    gil_pelaez_integral,
    integrate,
    integrate_semi_infinite,
    integrate_vector,
)

if t.TYPE_CHECKING:
    from traitlets.utils.bunch import Bunch

# exp(-700) underflows to ~1e-304: the characteristic function is zero there
UNDERFLOW = -700.0


class NumericalIntegrityError(ArithmeticError):
    """A probability left [0, 1] by more than the declared tolerance allows."""


@dataclasses.dataclass(frozen=True)
class ConditionalCP:
    link: LinkKind
    distance: float
    value: float
    error: float = 0.0


@dataclasses.dataclass(frozen=True)
class CoverageBreakdown:
    """The four association-region terms of the total coverage probability."""

    sd_a: float
    sd_b: float
    srd_a: float
    srd_b: float

    @property
    def total(self) -> float:
        return self.sd_a + self.sd_b + self.srd_a + self.srd_b

    @property
    def direct(self) -> float:
        return self.sd_a + self.sd_b

    @property
    def relay(self) -> float:
        return self.srd_a + self.srd_b


@dataclasses.dataclass(frozen=True)
class RelayCoverage:
    first_hop: float
    second_hop: float

    @property
    def two_hop(self) -> float:
        return self.first_hop * self.second_hop


@dataclasses.dataclass(frozen=True)
class Evaluation:
    """Value of one requested quantity plus whatever diagnostics came with it."""

    quantity: Quantity
    value: float
    breakdown: CoverageBreakdown | None = None
    relay: RelayCoverage | None = None


class InterferenceTable:
    """Centred log-characteristic function of an aggregate interference.

    Holds ``D(y) = log E[exp(-j y I)] + j y E[I]`` on a log grid of ``y``
    and interpolates it with cubic splines in ``log y``.  Below the grid
    ``D`` is continued quadratically (its leading behaviour at 0), above it
    by a power law.
    """

    def __init__(
        self, y: npt.NDArray[np.float64], centred: npt.NDArray[np.complex128], mean: float
    ) -> None:
        self.mean = mean
        self.y_min = float(y[0])
        self.y_max = float(y[-1])
        self._d_min = complex(centred[0])
        self._d_max = complex(centred[-1])
        log_y = np.log(y)
        self._re = CubicSpline(log_y, centred.real)
        self._im = CubicSpline(log_y, centred.imag)
        ratio = math.log(y[-1] / y[-2])
        re_last, re_prev = centred.real[-1], centred.real[-2]
        if re_last < 0 and re_prev < 0:
            self._tail_power = math.log(re_last / re_prev) / ratio
        else:
            self._tail_power = 0.0

    def __call__(self, y: float) -> complex:
        if y <= 0:
            return 0j
        if y < self.y_min:
            return self._d_min * (y / self.y_min) ** 2
        if y > self.y_max:
            if self._d_max.real < UNDERFLOW:
                return complex(-math.inf, 0.0)
            return self._d_max * (y / self.y_max) ** self._tail_power
        ly = math.log(y)
        return complex(float(self._re(ly)), float(self._im(ly)))


class CoverageEngine(LoggingConfigurable):
    """Evaluates coverage probabilities of the two-hop UAV relay network."""

    params = Instance(NetworkParams)

    include_interference = Bool(
        True, help="Include aggregate interference. When False links are noise-limited."
    ).tag(config=True)

    table_points_per_decade = Int(
        20, help="Grid density of the tabulated interference exponent."
    ).tag(config=True)
    table_min = Float(
        1e-6, help="Smallest tabulated argument, in units of 1 / mean interference."
    ).tag(config=True)
    table_max = Float(
        1e9, help="Largest tabulated argument, in units of 1 / mean interference."
    ).tag(config=True)

    inner_spec = Instance(QuadratureSpec)
    gil_pelaez_spec = Instance(QuadratureSpec)
    outer_spec = Instance(QuadratureSpec)

    @default("params")
    def _params_default(self) -> NetworkParams:
        params = NetworkParams(parent=self)
        self._watch(params)
        return params

    @default("inner_spec")
    def _inner_default(self) -> QuadratureSpec:
        return InnerQuadrature(parent=self)

    @default("gil_pelaez_spec")
    def _gp_default(self) -> QuadratureSpec:
        return GilPelaezQuadrature(parent=self)

    @default("outer_spec")
    def _outer_default(self) -> QuadratureSpec:
        return OuterQuadrature(parent=self)

    @validate("table_points_per_decade")
    def _validate_density(self, proposal: Bunch) -> int:
        if proposal.value < 4:
            raise TraitError(
                f"CoverageEngine.table_points_per_decade must be >= 4, got {proposal.value}"
            )
        return int(proposal.value)

    @validate("table_min", "table_max")
    def _validate_range(self, proposal: Bunch) -> float:
        lo = proposal.value if proposal.trait.name == "table_min" else self.table_min
        hi = proposal.value if proposal.trait.name == "table_max" else self.table_max
        if not 0 < lo < hi:
            raise TraitError(
                f"CoverageEngine.{proposal.trait.name}: need 0 < table_min < table_max, "
                f"got {lo!r}, {hi!r}"
            )
        return float(proposal.value)

    @observe("params")
    def _params_changed(self, change: Bunch) -> None:
        self.clear_cache()
        self._watch(change.new)

    @observe("include_interference", "table_points_per_decade", "table_min", "table_max")
    def _settings_changed(self, change: Bunch) -> None:
        self.clear_cache()

    def __init__(self, **kwargs: t.Any) -> None:
        self._lock = threading.Lock()
        self._tables: dict[tuple[t.Any, ...], InterferenceTable | None] = {}
        self._means: dict[tuple[t.Any, ...], float] = {}
        self._link_cps: dict[tuple[t.Any, ...], float] = {}
        super().__init__(**kwargs)

    def _watch(self, params: NetworkParams) -> None:
        for obj in (params, params.path_loss, params.los_model, params.k_model):
            obj.observe(self._on_param_change)

    def _on_param_change(self, change: Bunch) -> None:
        self.clear_cache()

    def clear_cache(self) -> None:
        with self._lock:
            self._tables.clear()
            self._means.clear()
            self._link_cps.clear()

    # -- geometry helpers -------------------------------------------------

    @staticmethod
    def _mobility(query: CoverageQuery, mobility: MobilityState) -> MobilityState:
        return mobility.at(query.t).effective()

    @staticmethod
    def _key_mobility(link: LinkKind, m: MobilityState) -> MobilityState:
        # only the RN interferers move
        return m if link is LinkKind.RD else model.STATIC

    def _serving_distance(self, link: LinkKind, r0: float, m: MobilityState) -> float:
        if link is LinkKind.RD:
            return float(model.serving_rn_distance(r0, m.v, m.t))
        return float(r0)

    def _support_start(self, link: LinkKind, m: MobilityState, d0: float) -> float:
        if link is LinkKind.RD and m.vt > 0:
            return max(d0 - m.vt, 0.0)
        return d0

    def _interferer_terms(
        self, link: LinkKind, r: float
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """LoS/NLoS probabilities, received interfering powers and K factors at ``r``."""
        p = self.params
        H = p.H_R
        gain = link.power(p) * link.gain(p, Role.INTERFERENCE)
        p_los = float(channel.los_probability(link, p.los_model, r, H))
        probs = np.array([p_los, 1.0 - p_los])
        states = (LosState.LOS, LosState.NLOS)
        losses = np.array([channel.path_loss_state(link, p.path_loss, s, r, H) for s in states])
        ks = np.array([p.k_model.k_factor(link.propagation, s, r) for s in states])
        return probs, gain / losses, ks

    # -- interference ------------------------------------------------------

    def mean_interference(
        self, link: LinkKind, mobility: MobilityState, serving_dist: float
    ) -> float:
        """Mean aggregate interference [W] given the initial serving distance."""
        m = self._key_mobility(link, mobility.effective())
        key = (link, float(serving_dist), m)
        with self._lock:
            if key in self._means:
                return self._means[key]
        value = self._compute_mean(link, m, float(serving_dist))
        with self._lock:
            self._means[key] = value
        return value

    def _compute_mean(self, link: LinkKind, m: MobilityState, d0: float) -> float:
        p = self.params

        def f(r: float) -> float:
            probs, powers, _ = self._interferer_terms(link, r)
            lam = float(model.interferer_density(p, link, m, d0, r))
            return float(np.dot(probs, powers)) * lam * 2.0 * math.pi * r

        start = self._support_start(link, m, d0)
        breaks = model.interferer_breakpoints(link, m, d0)
        scale = max(model.mean_nearest_distance(p, link), p.H_R, 1.0)
        res = integrate_semi_infinite(
            f, self.inner_spec, a=start, scale=scale, points=[*breaks, p.H_R]
        )
        return max(res.value, 0.0)

    def _radial_integrand(
        self, link: LinkKind, m: MobilityState, d0: float, s: np.ndarray
    ) -> t.Callable[[float], np.ndarray]:
        p = self.params

        def f(r: float) -> np.ndarray:
            lam = float(model.interferer_density(p, link, m, d0, r))
            if lam == 0.0:
                return np.zeros(s.shape, dtype=complex)
            probs, powers, ks = self._interferer_terms(link, r)
            lt = sum(
                probs[i] * np.asarray(channel.rician_power_lt(ks[i], s * powers[i]))
                for i in range(2)
            )
            return (1.0 - np.asarray(lt)) * lam * 2.0 * math.pi * r

        return f

    def interference_lt(
        self,
        link: LinkKind,
        mobility: MobilityState,
        serving_dist: float,
        s: complex | npt.ArrayLike,
    ) -> t.Any:
        """Laplace transform ``E[exp(-s I)]`` of the aggregate interference of ``link``.

        ``serving_dist`` is the initial distance to the serving transmitter;
        ``s`` may be complex and array-valued.
        """
        s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
        if not self.include_interference:
            out = np.ones(s_arr.shape, dtype=complex)
        else:
            m = self._key_mobility(link, mobility.effective())
            d0 = float(serving_dist)
            f = self._radial_integrand(link, m, d0, s_arr)
            start = self._support_start(link, m, d0)
            breaks = [*model.interferer_breakpoints(link, m, d0), self.params.H_R]
            res = integrate_vector(f, start, math.inf, self.inner_spec, points=breaks)
            out = np.exp(-res.value)
        return out.item() if np.ndim(s) == 0 else out

    def interference_table(
        self, link: LinkKind, mobility: MobilityState, serving_dist: float
    ) -> InterferenceTable | None:
        """The tabulated interference exponent, or ``None`` without interference."""
        if not self.include_interference:
            return None
        m = self._key_mobility(link, mobility.effective())
        d0 = float(serving_dist)
        key = (link, d0, m)
        with self._lock:
            if key in self._tables:
                return self._tables[key]
        table = self._build_table(link, m, d0)
        with self._lock:
            self._tables[key] = table
        return table

    def _build_table(self, link: LinkKind, m: MobilityState, d0: float) -> InterferenceTable | None:
        mean = self.mean_interference(link, m, d0)
        if not mean > 1e-300:
            return None
        decades = math.log10(self.table_max / self.table_min)
        n = int(round(decades * self.table_points_per_decade)) + 1
        w = np.logspace(math.log10(self.table_min), math.log10(self.table_max), n)
        y = w / mean
        start = self._support_start(link, m, d0)
        breaks = [*model.interferer_breakpoints(link, m, d0), self.params.H_R]
        exponent = np.empty(n, dtype=complex)
        subdivisions = 0
        # one quad_vec call per decade of w
        for block in np.array_split(np.arange(n), max(1, round(decades))):
            values, used = self._table_block(link, m, d0, w[block], mean, start, breaks)
            exponent[block] = -values
            subdivisions += used
        centred = exponent + 1j * y * mean
        self.log.debug(
            "interference table %s d0=%.1f vt=%.1f: mean=%.3g, %d intervals",
            link.value,
            d0,
            m.vt,
            mean,
            subdivisions,
        )
        return InterferenceTable(y, centred, mean)

    def _table_block(
        self,
        link: LinkKind,
        m: MobilityState,
        d0: float,
        w: npt.NDArray[np.float64],
        mean: float,
        start: float,
        breaks: list[float],
    ) -> tuple[npt.NDArray[np.complex128], int]:
        """``-log LT`` at ``s = j w / mean``; a block that does not converge is halved."""
        radial = self._radial_integrand(link, m, d0, 1j * w / mean)
        # epsabs still bounds the error of the exponent, not of its normalised form
        spec = self.inner_spec.replace(epsabs=self.inner_spec.epsabs / float(w[-1]))

        # components normalised by w: each is O(1) at small w
        def f(r: float) -> np.ndarray:
            return radial(r) / w

        try:
            res = integrate_vector(f, start, math.inf, spec, points=breaks)
        except ConvergenceError:
            if w.size == 1:
                raise
            half = w.size // 2
            lo, used_lo = self._table_block(link, m, d0, w[:half], mean, start, breaks)
            hi, used_hi = self._table_block(link, m, d0, w[half:], mean, start, breaks)
            return np.concatenate([lo, hi]), used_lo + used_hi
        return res.value * w, res.subdivisions

    # -- coverage probabilities -------------------------------------------

    def _check_probability(self, value: float, tol: float, what: str) -> float:
        if value < -tol or value > 1.0 + tol:
            raise NumericalIntegrityError(
                f"{what} = {value!r} is outside [0, 1] by more than {tol:g}"
            )
        return min(max(value, 0.0), 1.0)

    def conditional_cp(
        self,
        link: LinkKind,
        los_state: LosState | str,
        r: float,
        query: CoverageQuery,
        mobility: MobilityState,
        *,
        detail: bool = False,
    ) -> t.Any:
        """Coverage probability of ``link`` given its initial serving distance and LoS state.

        For the RD link ``r`` is the initial distance; the signal uses the
        distance at ``query.t``.
        """
        state = LosState(los_state)
        p = self.params
        m = self._mobility(query, mobility)
        d = self._serving_distance(link, r, m)
        loss = float(channel.path_loss_state(link, p.path_loss, state, d, p.H_R))
        a = link.power(p) * link.gain(p, Role.TARGET) / loss
        K = float(p.k_model.k_factor(link.propagation, state, d))
        beta = query.beta

        table = self.interference_table(link, m, r)
        mean = table.mean if table is not None else 0.0
        mu = beta / a
        shift = beta * (p.sigma2 + mean) / a

        def g(x: float) -> complex:
            value = complex(channel.rician_power_lt(K, -1j * x))
            if table is not None:
                d_val = table(x * mu)
                if d_val.real == -math.inf:
                    return 0j
                value *= cmath.exp(d_val)
            return value

        spec = self.gil_pelaez_spec
        res = gil_pelaez_integral(g, spec, shift=shift, head=1e-3 / max(1.0, shift))
        tol = 10.0 * max(spec.epsabs, res.error)
        what = f"P[{link.value}|{state.value}, r={r:g}]"
        value = self._check_probability(0.5 + res.value, tol, what)
        if detail:
            return ConditionalCP(link, d, value, res.error)
        return value

    def link_cp(
        self, link: LinkKind, r: float, query: CoverageQuery, mobility: MobilityState
    ) -> float:
        """LoS/NLoS mixture of :meth:`conditional_cp` at initial serving distance ``r``."""
        m = self._mobility(query, mobility)
        key = (link, float(r), query.beta, self._key_mobility(link, m))
        with self._lock:
            if key in self._link_cps:
                return self._link_cps[key]
        p = self.params
        d = self._serving_distance(link, r, m)
        p_los = float(channel.los_probability(link, p.los_model, d, p.H_R))
        value = 0.0
        for state, weight in ((LosState.LOS, p_los), (LosState.NLOS, 1.0 - p_los)):
            if weight > 0.0:
                value += weight * self.conditional_cp(link, state, r, query, m)
        with self._lock:
            self._link_cps[key] = value
        return value

    def _distance_integral(
        self,
        link: LinkKind,
        query: CoverageQuery,
        mobility: MobilityState,
        weight: t.Callable[[float], float],
        lo: float,
        hi: float = math.inf,
        points: t.Sequence[float] = (),
    ) -> float:
        """``int_lo^hi P_link|r * f_link(r) * weight(r) dr``."""
        p = self.params
        if hi <= lo:
            return 0.0

        def envelope(r: float) -> float:
            return float(model.nearest_distance_pdf(p, link, r)) * weight(r)

        def f(r: float) -> float:
            e = envelope(r)
            if e == 0.0:
                return 0.0
            return self.link_cp(link, r, query, mobility) * e

        if math.isfinite(hi):
            return integrate(f, lo, hi, self.outer_spec, points=points).value
        scale = model.mean_nearest_distance(p, link)
        res = integrate_semi_infinite(
            f, self.outer_spec, a=lo, envelope=envelope, scale=scale, points=points
        )
        return res.value

    def direct_cp(self, query: CoverageQuery, mobility: MobilityState) -> float:
        """Coverage probability of the direct link alone (relays ignored)."""
        value = self._distance_integral(LinkKind.SD, query, mobility, lambda r: 1.0, 0.0)
        return self._check_probability(value, 10 * self.outer_spec.epsabs, "direct link CP")

    def relay_cp(self, query: CoverageQuery, mobility: MobilityState) -> RelayCoverage:
        """Unconditional first-hop and second-hop CPs; their product is the two-hop CP."""
        m = self._mobility(query, mobility)
        tol = 10 * self.outer_spec.epsabs
        first = self._distance_integral(LinkKind.SR, query, m, lambda r: 1.0, 0.0)
        points = [m.vt] if m.vt > 0 else []
        second = self._distance_integral(LinkKind.RD, query, m, lambda r: 1.0, 0.0, points=points)
        return RelayCoverage(
            self._check_probability(first, tol, "first hop CP"),
            self._check_probability(second, tol, "second hop CP"),
        )

    def total_cp(self, query: CoverageQuery, mobility: MobilityState) -> CoverageBreakdown:
        """Coverage probability of the typical UE, split by association region."""
        p = self.params
        m = self._mobility(query, mobility)
        vt = m.vt
        H = p.H_R
        lt = math.pi * p.lambda_T
        lr = math.pi * p.lambda_R
        tol = 10 * self.outer_spec.epsabs

        sd_a = self._distance_integral(LinkKind.SD, query, m, lambda r: 1.0, 0.0, H)

        def no_closer_rn(r: float) -> float:
            return math.exp(-lr * (math.sqrt(max(r * r - H * H, 0.0)) + vt) ** 2)

        sd_b = self._distance_integral(LinkKind.SD, query, m, no_closer_rn, H)

        first = self._distance_integral(LinkKind.SR, query, m, lambda r: 1.0, 0.0)
        srd_a = 0.0
        if vt > 0:
            arrived = self._distance_integral(LinkKind.RD, query, m, lambda r: 1.0, 0.0, vt)
            srd_a = math.exp(-lt * H * H) * first * arrived

        def no_closer_tbs(r: float) -> float:
            return math.exp(-lt * ((r - vt) ** 2 + H * H))

        srd_b = first * self._distance_integral(LinkKind.RD, query, m, no_closer_tbs, vt)

        terms = CoverageBreakdown(
            *(self._check_probability(v, tol, name) for v, name in (
                (sd_a, "I_SD_a"), (sd_b, "I_SD_b"), (srd_a, "I_SRD_a"), (srd_b, "I_SRD_b"),
            ))
        )
        if terms.total > 1.0 + 1e-4:
            raise NumericalIntegrityError(f"region terms sum to {terms.total!r} > 1")
        self.log.debug(
            "total CP beta=%.3g t=%g: %.6f (SD %.4f/%.4f, SRD %.4f/%.4f)",
            query.beta,
            m.t,
            terms.total,
            sd_a,
            sd_b,
            srd_a,
            srd_b,
        )
        return terms

    def evaluate(self, query: CoverageQuery, mobility: MobilityState) -> Evaluation:
        """Evaluate the quantity named by ``query.quantity``."""
        q = query.quantity
        if q is Quantity.TOTAL:
            terms = self.total_cp(query, mobility)
            return Evaluation(q, min(terms.total, 1.0), breakdown=terms)
        if q is Quantity.DIRECT_LINK:
            return Evaluation(q, self.direct_cp(query, mobility))
        if q is Quantity.ASSOCIATION:
            value = model.relay_association_probability(self.params, mobility.at(query.t))
            return Evaluation(q, value)
        relay = self.relay_cp(query, mobility)
        value = {
            Quantity.FIRST_HOP: relay.first_hop,
            Quantity.SECOND_HOP: relay.second_hop,
            Quantity.RELAY_LINK: relay.two_hop,
        }[q]
        return Evaluation(q, value, relay=relay)
