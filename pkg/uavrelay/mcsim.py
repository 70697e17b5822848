"""Monte-Carlo simulator of the UAV relay network.

Every drop samples both Poisson processes in a disk around the UE, moves the
RNs to time ``t``, resolves nearest-neighbour association and draws LoS
states and Rician fading for every transmitter.  Drop ``i`` draws from its
own counter-based stream (Philox keyed by ``SeedSequence(seed, spawn_key=(..., i))``)
so results do not depend on how drops are split between workers.
"""

# Distributed under the terms of the Modified BSD License.
from __future__ import annotations

import dataclasses
import enum
import math
import typing as t
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import numpy.typing as npt
import pandas as pd
from scipy.integrate import trapezoid
from traitlets import Bool, Float, Int, TraitError, validate
from traitlets.config import Config, LoggingConfigurable

from . import channel, model
from .links import LinkKind, LosState, Role
from .model import CoverageQuery, MobilityState, NetworkParams, Quantity, Scheme

if t.TYPE_CHECKING:
    from traitlets.utils.bunch import Bunch

FloatArray = npt.NDArray[np.float64]

# two-sided 95% normal quantile
Z95 = 1.96


class SimulationError(RuntimeError):
    """A drop could not be generated."""


class Association(enum.Enum):
    DIRECT = "direct"
    RELAY = "relay"


@dataclasses.dataclass(frozen=True)
class McEstimate:
    """Empirical probability with its 95% normal-approximation half-width."""

    value: float
    halfwidth: float
    n: int
    seed: int | None = None

    @classmethod
    def from_hits(cls, hits: int, n: int, seed: int | None = None) -> McEstimate:
        if n < 1:
            raise SimulationError("an estimate needs at least one drop")
        p = hits / n
        return cls(p, Z95 * math.sqrt(p * (1.0 - p) / n), n, seed)

    def agrees_with(self, value: float, k: float = 3.0, floor: float = 0.0) -> bool:
        """True if ``value`` lies within ``max(floor, k half-widths)`` of the estimate."""
        return abs(self.value - value) <= max(floor, k * self.halfwidth)


@dataclasses.dataclass
class DropRealization:
    """One sampled network at time t as seen from the UE at the origin."""

    tbs: FloatArray
    rn_initial: FloatArray
    rn: FloatArray
    serving_tbs: int
    serving_rn: int | None
    rn_serving_tbs: int | None
    association: Association
    los: dict[LinkKind, npt.NDArray[np.bool_]]
    fading: dict[LinkKind, FloatArray]
    sinr: dict[LinkKind, float]
    resamples: int = 0

    @property
    def r_SD(self) -> float:
        return float(np.hypot(*self.tbs[self.serving_tbs]))

    @property
    def r_RD0(self) -> float:
        if self.serving_rn is None:
            return math.inf
        return float(np.hypot(*self.rn_initial[self.serving_rn]))

    @property
    def r_RD(self) -> float:
        if self.serving_rn is None:
            return math.inf
        return float(np.hypot(*self.rn[self.serving_rn]))

    @property
    def same_tbs(self) -> bool:
        return self.rn_serving_tbs is not None and self.rn_serving_tbs == self.serving_tbs


# the per-drop columns a simulation returns
_COLUMNS = ("sd", "sr", "rd", "relay", "has_rn", "r_SD", "r_RD0", "r_RD", "same_tbs", "resamples")


@dataclasses.dataclass
class SinrSamples:
    """Per-drop SINRs and geometry of a simulated scenario.

    Any number of thresholds can be read from one set of drops.
    """

    sd: FloatArray
    sr: FloatArray
    rd: FloatArray
    relay: npt.NDArray[np.bool_]
    has_rn: npt.NDArray[np.bool_]
    r_SD: FloatArray
    r_RD0: FloatArray
    r_RD: FloatArray
    same_tbs: npt.NDArray[np.bool_]
    resamples: npt.NDArray[np.int64]
    seed: int | None = None

    @property
    def n(self) -> int:
        return int(self.sd.shape[0])

    def covered(self, quantity: Quantity | str, beta: float) -> npt.NDArray[np.bool_]:
        q = Quantity(quantity)
        if q is Quantity.ASSOCIATION:
            return self.relay
        relay_sinr = np.minimum(self.sr, self.rd)
        if q is Quantity.DIRECT_LINK:
            return self.sd >= beta
        if q is Quantity.FIRST_HOP:
            return self.sr >= beta
        if q is Quantity.SECOND_HOP:
            return self.rd >= beta
        if q is Quantity.RELAY_LINK:
            return relay_sinr >= beta
        return np.where(self.relay, relay_sinr, self.sd) >= beta

    def estimate(self, quantity: Quantity | str, beta: float) -> McEstimate:
        hits = int(np.count_nonzero(self.covered(quantity, beta)))
        return McEstimate.from_hits(hits, self.n, self.seed)


def drop_generator(seed: int, index: int, key: t.Sequence[int] = ()) -> np.random.Generator:
    """Independent stream of drop ``index`` under root ``seed`` and scenario ``key``."""
    ss = np.random.SeedSequence(seed, spawn_key=(*key, index))
    return np.random.Generator(np.random.Philox(ss))


def disk_points(rng: np.random.Generator, density: float, radius: float) -> FloatArray:
    """Homogeneous Poisson points in the disk of ``radius`` around the origin."""
    n = rng.poisson(density * math.pi * radius**2)
    rho = radius * np.sqrt(rng.random(n))
    phi = 2.0 * math.pi * rng.random(n)
    return np.column_stack((rho * np.cos(phi), rho * np.sin(phi)))


def random_walk(rng: np.random.Generator, points: FloatArray, distance: float) -> FloatArray:
    """Move every point ``distance`` in an independent uniform direction."""
    phi = 2.0 * math.pi * rng.random(points.shape[0])
    return points + distance * np.column_stack((np.cos(phi), np.sin(phi)))


def rician_power(rng: np.random.Generator, K: npt.ArrayLike) -> FloatArray:
    """Unit-mean Rician power gains, one per entry of ``K``."""
    K = np.asarray(K, dtype=float)
    nu = np.sqrt(K / (K + 1.0))
    sigma = np.sqrt(0.5 / (K + 1.0))
    n = rng.standard_normal((2, *K.shape))
    return (nu + sigma * n[0]) ** 2 + (sigma * n[1]) ** 2


def _pinned_point(rng: np.random.Generator, r: float) -> FloatArray:
    phi = 2.0 * math.pi * rng.random()
    return np.array([r * math.cos(phi), r * math.sin(phi)])


class MonteCarloSimulator(LoggingConfigurable):
    """Drop-based simulation of the network, the reference for the analytic engine."""

    n_drops = Int(50000, help="Number of independent drops per estimate.").tag(config=True)
    seed = Int(0, help="Root seed; every drop derives its own stream from it.").tag(config=True)
    disk_radius = Float(100e3, help="Radius of the simulated disk [m].").tag(config=True)
    shared_los_draws = Bool(
        True,
        help="""Draw one LoS uniform per transmitter and reuse it for every receiver.

        When False each (transmitter, receiver) pair gets an independent draw.
        """,
    ).tag(config=True)
    include_interference = Bool(True, help="Add aggregate interference to the SINR.").tag(
        config=True
    )
    include_noise = Bool(True, help="Add thermal noise to the SINR.").tag(config=True)
    max_resamples = Int(
        100, help="Redraws allowed for a drop without any TBS before giving up."
    ).tag(config=True)
    jobs = Int(1, help="Worker processes used to simulate drops.").tag(config=True)
    chunk_size = Int(5000, help="Drops per worker task.").tag(config=True)

    @validate("n_drops", "max_resamples", "jobs", "chunk_size")
    def _validate_count(self, proposal: Bunch) -> int:
        minimum = 0 if proposal.trait.name == "max_resamples" else 1
        if proposal.value < minimum:
            raise TraitError(
                f"MonteCarloSimulator.{proposal.trait.name} must be >= {minimum}, "
                f"got {proposal.value!r}"
            )
        return int(proposal.value)

    @validate("seed")
    def _validate_seed(self, proposal: Bunch) -> int:
        if proposal.value < 0:
            raise TraitError(f"MonteCarloSimulator.seed must be >= 0, got {proposal.value!r}")
        return int(proposal.value)

    @validate("disk_radius")
    def _validate_radius(self, proposal: Bunch) -> float:
        if not proposal.value > 0:
            raise TraitError(
                f"MonteCarloSimulator.disk_radius must be > 0, got {proposal.value!r}"
            )
        return float(proposal.value)

    # -- one drop -----------------------------------------------------------

    def _sample_tbs(
        self, params: NetworkParams, rng: np.random.Generator
    ) -> tuple[FloatArray, int]:
        for attempt in range(self.max_resamples + 1):
            tbs = disk_points(rng, params.lambda_T, self.disk_radius)
            if tbs.shape[0] > 0:
                return tbs, attempt
        raise SimulationError(
            f"no TBS in the disk after {self.max_resamples} redraws; "
            "increase lambda_T or disk_radius"
        )

    def _move_rns(
        self, rng: np.random.Generator, rn0: FloatArray, mobility: MobilityState
    ) -> tuple[FloatArray, int | None]:
        """Positions at time t and the serving RN index."""
        if rn0.shape[0] == 0:
            return rn0, None
        vt = mobility.vt
        if mobility.scheme is Scheme.HOVER or vt == 0:
            rn = rn0.copy()
            return rn, int(np.argmin(np.hypot(rn[:, 0], rn[:, 1])))
        if mobility.scheme is Scheme.SCHEME1:
            rn = random_walk(rng, rn0, vt)
            return rn, int(np.argmin(np.hypot(rn[:, 0], rn[:, 1])))
        serving = int(np.argmin(np.hypot(rn0[:, 0], rn0[:, 1])))
        rn = random_walk(rng, rn0, vt)
        r0 = float(np.hypot(*rn0[serving]))
        rn[serving] = rn0[serving] * (max(r0 - vt, 0.0) / r0 if r0 > 0 else 0.0)
        return rn, serving

    def _los(
        self,
        params: NetworkParams,
        link: LinkKind,
        dist: FloatArray,
        uniforms: FloatArray,
    ) -> npt.NDArray[np.bool_]:
        p = np.asarray(channel.los_probability(link, params.los_model, dist, params.H_R))
        return uniforms < p

    def _sinr(
        self,
        params: NetworkParams,
        link: LinkKind,
        dist: FloatArray,
        los: npt.NDArray[np.bool_],
        serving: int,
        rng: np.random.Generator,
    ) -> tuple[float, FloatArray]:
        """SINR at the receiver of ``link`` and the fading draws of every transmitter."""
        H = params.H_R
        pl = params.path_loss
        km = params.k_model
        prop = link.propagation
        loss = np.where(
            los,
            channel.path_loss_state(link, pl, LosState.LOS, dist, H),
            channel.path_loss_state(link, pl, LosState.NLOS, dist, H),
        )
        K = np.where(
            los,
            km.k_factor(prop, LosState.LOS, dist),
            km.k_factor(prop, LosState.NLOS, dist),
        )
        fading = rician_power(rng, K)
        gains = np.full(dist.shape, link.gain(params, Role.INTERFERENCE))
        gains[serving] = link.gain(params, Role.TARGET)
        received = link.power(params) * gains / loss * fading
        signal = float(received[serving])
        interference = float(received.sum() - signal) if self.include_interference else 0.0
        noise = params.sigma2 if self.include_noise else 0.0
        denom = interference + noise
        return (signal / denom if denom > 0 else math.inf), fading

    def simulate_drop(
        self, params: NetworkParams, mobility: MobilityState, rng: np.random.Generator
    ) -> DropRealization:
        """Sample one network, move it to time t and compute the SINR of every link."""
        tbs, resamples = self._sample_tbs(params, rng)
        rn0 = disk_points(rng, params.lambda_R, self.disk_radius)
        rn, serving_rn = self._move_rns(rng, rn0, mobility)

        d_sd = np.hypot(tbs[:, 0], tbs[:, 1])
        serving_tbs = int(np.argmin(d_sd))
        u_tbs = rng.random(tbs.shape[0])
        u_tbs_rn = u_tbs if self.shared_los_draws else rng.random(tbs.shape[0])
        u_rn = rng.random(rn.shape[0])

        los = {LinkKind.SD: self._los(params, LinkKind.SD, d_sd, u_tbs)}
        sinr_sd, fade_sd = self._sinr(params, LinkKind.SD, d_sd, los[LinkKind.SD], serving_tbs, rng)
        fading = {LinkKind.SD: fade_sd}
        sinr = {LinkKind.SD: sinr_sd, LinkKind.SR: 0.0, LinkKind.RD: 0.0}

        rn_serving_tbs = None
        association = Association.DIRECT
        if serving_rn is not None:
            rel = tbs - rn[serving_rn]
            d_sr = np.hypot(rel[:, 0], rel[:, 1])
            rn_serving_tbs = int(np.argmin(d_sr))
            d_rd = np.hypot(rn[:, 0], rn[:, 1])
            los[LinkKind.SR] = self._los(params, LinkKind.SR, d_sr, u_tbs_rn)
            los[LinkKind.RD] = self._los(params, LinkKind.RD, d_rd, u_rn)
            sinr[LinkKind.SR], fading[LinkKind.SR] = self._sinr(
                params, LinkKind.SR, d_sr, los[LinkKind.SR], rn_serving_tbs, rng
            )
            sinr[LinkKind.RD], fading[LinkKind.RD] = self._sinr(
                params, LinkKind.RD, d_rd, los[LinkKind.RD], serving_rn, rng
            )
            if d_sd[serving_tbs] ** 2 > d_rd[serving_rn] ** 2 + params.H_R**2:
                association = Association.RELAY

        return DropRealization(
            tbs=tbs,
            rn_initial=rn0,
            rn=rn,
            serving_tbs=serving_tbs,
            serving_rn=serving_rn,
            rn_serving_tbs=rn_serving_tbs,
            association=association,
            los=los,
            fading=fading,
            sinr=sinr,
            resamples=resamples,
        )

    # -- many drops ---------------------------------------------------------

    def _payload(
        self, params: NetworkParams, mobility: MobilityState, seed: int, key: t.Sequence[int]
    ) -> dict[str, t.Any]:
        return {
            "params": {k: dict(v) for k, v in params.to_config().items()},
            "simulator": self.trait_values(config=True),
            "mobility": (mobility.scheme.value, mobility.v, mobility.t),
            "seed": seed,
            "key": tuple(key),
        }

    def _simulate_range(
        self,
        params: NetworkParams,
        mobility: MobilityState,
        seed: int,
        key: t.Sequence[int],
        start: int,
        stop: int,
    ) -> dict[str, np.ndarray]:
        rows: dict[str, list[t.Any]] = {name: [] for name in _COLUMNS}
        for i in range(start, stop):
            drop = self.simulate_drop(params, mobility, drop_generator(seed, i, key))
            rows["sd"].append(drop.sinr[LinkKind.SD])
            rows["sr"].append(drop.sinr[LinkKind.SR])
            rows["rd"].append(drop.sinr[LinkKind.RD])
            rows["relay"].append(drop.association is Association.RELAY)
            rows["has_rn"].append(drop.serving_rn is not None)
            rows["r_SD"].append(drop.r_SD)
            rows["r_RD0"].append(drop.r_RD0)
            rows["r_RD"].append(drop.r_RD)
            rows["same_tbs"].append(drop.same_tbs)
            rows["resamples"].append(drop.resamples)
        return {name: np.asarray(values) for name, values in rows.items()}

    def simulate_sinr(
        self,
        params: NetworkParams,
        mobility: MobilityState,
        n_drops: int | None = None,
        seed: int | None = None,
        key: t.Sequence[int] = (),
    ) -> SinrSamples:
        """Simulate ``n_drops`` drops and return their per-link SINRs."""
        n = self.n_drops if n_drops is None else int(n_drops)
        seed = self.seed if seed is None else int(seed)
        if n < 1:
            raise SimulationError("n_drops must be >= 1")
        bounds = [(s, min(s + self.chunk_size, n)) for s in range(0, n, self.chunk_size)]
        if self.jobs > 1 and len(bounds) > 1:
            payload = self._payload(params, mobility, seed, key)
            with ProcessPoolExecutor(max_workers=self.jobs) as pool:
                parts = list(pool.map(_simulate_chunk, [(payload, a, b) for a, b in bounds]))
        else:
            parts = [self._simulate_range(params, mobility, seed, key, a, b) for a, b in bounds]
        columns = {name: np.concatenate([p[name] for p in parts]) for name in _COLUMNS}
        total_resamples = int(columns["resamples"].sum())
        if total_resamples:
            self.log.warning("%d drops had to be redrawn for lack of any TBS", total_resamples)
        return SinrSamples(
            sd=columns["sd"].astype(float),
            sr=columns["sr"].astype(float),
            rd=columns["rd"].astype(float),
            relay=columns["relay"].astype(bool),
            has_rn=columns["has_rn"].astype(bool),
            r_SD=columns["r_SD"].astype(float),
            r_RD0=columns["r_RD0"].astype(float),
            r_RD=columns["r_RD"].astype(float),
            same_tbs=columns["same_tbs"].astype(bool),
            resamples=columns["resamples"].astype(np.int64),
            seed=seed,
        )

    def estimate(
        self,
        params: NetworkParams,
        query: CoverageQuery,
        mobility: MobilityState,
        n_drops: int | None = None,
        seed: int | None = None,
    ) -> McEstimate:
        """Empirical probability that the requested quantity is covered at ``query.beta``."""
        samples = self.simulate_sinr(params, mobility.at(query.t), n_drops, seed)
        return samples.estimate(query.quantity, query.beta)

    # -- model checks -------------------------------------------------------

    def measure_same_tbs_rate(
        self,
        params: NetworkParams,
        mobility: MobilityState | None = None,
        n_drops: int | None = None,
        seed: int | None = None,
        bins: int = 5,
    ) -> tuple[McEstimate, pd.DataFrame]:
        """How often the UE and its serving RN share their nearest TBS.

        Returns the overall rate over drops with an RN and a table binned by
        equal-count quantiles of ``r_SD`` and ``r_RD(t)``, each bin carrying
        the mean of :func:`~uavrelay.model.same_tbs_probability` over its drops.
        """
        mobility = mobility if mobility is not None else params.mobility()
        samples = self.simulate_sinr(params, mobility, n_drops, seed)
        mask = samples.has_rn
        frame = pd.DataFrame(
            {
                "r_SD": samples.r_SD[mask],
                "r_RD": samples.r_RD[mask],
                "same": samples.same_tbs[mask],
            }
        )
        overall = McEstimate.from_hits(int(frame["same"].sum()), max(len(frame), 1), samples.seed)
        frame["model"] = model.same_tbs_probability(
            params, frame["r_SD"].to_numpy(), frame["r_RD"].to_numpy()
        )
        frame["sd_bin"] = pd.qcut(frame["r_SD"], bins, duplicates="drop")
        frame["rd_bin"] = pd.qcut(frame["r_RD"].rank(method="first"), bins, labels=False)
        grouped = frame.groupby(["sd_bin", "rd_bin"], observed=True)
        table = grouped.agg(
            r_SD_mean=("r_SD", "mean"),
            r_RD_mean=("r_RD", "mean"),
            drops=("same", "size"),
            rate=("same", "mean"),
            model=("model", "mean"),
        ).reset_index()
        table["halfwidth"] = Z95 * np.sqrt(table["rate"] * (1 - table["rate"]) / table["drops"])
        return overall, table

    def nearest_distance_samples(
        self,
        params: NetworkParams,
        link: LinkKind,
        n_drops: int | None = None,
        seed: int | None = None,
    ) -> FloatArray:
        """Distance from the origin to the nearest transmitter of ``link``'s process."""
        n = self.n_drops if n_drops is None else int(n_drops)
        seed = self.seed if seed is None else int(seed)
        lam = link.density(params)
        out = np.empty(n)
        for i in range(n):
            rng = drop_generator(seed, i, (1,))
            pts = disk_points(rng, lam, self.disk_radius)
            out[i] = np.hypot(pts[:, 0], pts[:, 1]).min() if pts.shape[0] else math.inf
        return out

    def _pinned_interferers(
        self,
        params: NetworkParams,
        link: LinkKind,
        mobility: MobilityState,
        serving_dist: float,
        rng: np.random.Generator,
    ) -> tuple[FloatArray, FloatArray]:
        """Serving transmitter and interferers around a receiver at the origin.

        The serving transmitter sits at initial distance ``serving_dist``;
        the others form the link's process outside that distance, then move
        if they are RNs.
        """
        pts = disk_points(rng, link.density(params), self.disk_radius)
        pts = pts[np.hypot(pts[:, 0], pts[:, 1]) > serving_dist]
        serving = _pinned_point(rng, serving_dist)
        m = mobility.effective()
        if link is LinkKind.RD and m.vt > 0:
            pts = random_walk(rng, pts, m.vt)
            r_t = float(model.serving_rn_distance(serving_dist, m.v, m.t))
            serving = serving * (r_t / serving_dist if serving_dist > 0 else 0.0)
        return serving, pts

    def interference_samples(
        self,
        params: NetworkParams,
        link: LinkKind,
        mobility: MobilityState,
        serving_dist: float,
        n_drops: int | None = None,
        seed: int | None = None,
    ) -> FloatArray:
        """Aggregate interference [W] at the receiver of ``link`` with the serving node pinned."""
        n = self.n_drops if n_drops is None else int(n_drops)
        seed = self.seed if seed is None else int(seed)
        out = np.empty(n)
        gain = link.power(params) * link.gain(params, Role.INTERFERENCE)
        for i in range(n):
            rng = drop_generator(seed, i, (2,))
            _, pts = self._pinned_interferers(params, link, mobility, serving_dist, rng)
            dist = np.hypot(pts[:, 0], pts[:, 1])
            los = self._los(params, link, dist, rng.random(dist.shape[0]))
            out[i] = self._received(params, link, dist, los, gain, rng).sum()
        return out

    def _received(
        self,
        params: NetworkParams,
        link: LinkKind,
        dist: FloatArray,
        los: npt.NDArray[np.bool_],
        gain: float,
        rng: np.random.Generator,
    ) -> FloatArray:
        prop = link.propagation
        H = params.H_R
        loss = np.where(
            los,
            channel.path_loss_state(link, params.path_loss, LosState.LOS, dist, H),
            channel.path_loss_state(link, params.path_loss, LosState.NLOS, dist, H),
        )
        K = np.where(
            los,
            params.k_model.k_factor(prop, LosState.LOS, dist),
            params.k_model.k_factor(prop, LosState.NLOS, dist),
        )
        return gain / loss * rician_power(rng, K)

    def estimate_link(
        self,
        params: NetworkParams,
        link: LinkKind,
        serving_dist: float,
        query: CoverageQuery,
        mobility: MobilityState,
        los_state: LosState | str | None = None,
        n_drops: int | None = None,
        seed: int | None = None,
    ) -> McEstimate:
        """Coverage of ``link`` with its serving node pinned at initial distance ``serving_dist``.

        ``los_state`` forces the serving link's LoS state; by default it is
        drawn from the LoS probability at the distance at ``query.t``.
        """
        n = self.n_drops if n_drops is None else int(n_drops)
        seed = self.seed if seed is None else int(seed)
        m = mobility.at(query.t)
        forced = None if los_state is None else LosState(los_state)
        target = link.power(params) * link.gain(params, Role.TARGET)
        interferer = link.power(params) * link.gain(params, Role.INTERFERENCE)
        hits = 0
        for i in range(n):
            rng = drop_generator(seed, i, (3,))
            serving, pts = self._pinned_interferers(params, link, m, serving_dist, rng)
            d = np.array([float(np.hypot(*serving))])
            if forced is None:
                los = self._los(params, link, d, rng.random(1))
            else:
                los = np.array([forced is LosState.LOS])
            signal = float(self._received(params, link, d, los, target, rng)[0])
            interference = 0.0
            if self.include_interference and pts.shape[0]:
                dist = np.hypot(pts[:, 0], pts[:, 1])
                los_i = self._los(params, link, dist, rng.random(dist.shape[0]))
                received = self._received(params, link, dist, los_i, interferer, rng)
                interference = float(received.sum())
            noise = params.sigma2 if self.include_noise else 0.0
            denom = interference + noise
            if denom == 0 or signal >= query.beta * denom:
                hits += 1
        return McEstimate.from_hits(hits, n, seed)

    def interferer_profile(
        self,
        params: NetworkParams,
        mobility: MobilityState,
        serving_dist: float,
        edges: npt.ArrayLike,
        n_drops: int | None = None,
        seed: int | None = None,
    ) -> pd.DataFrame:
        """Empirical radial density of the interfering RNs against the analytic one.

        The serving RN is pinned at initial distance ``serving_dist``.  Each
        row is an annulus ``[r_lo, r_hi)`` with the empirical density, its
        95% half-width (Poisson counts) and the analytic density averaged over
        the annulus.
        """
        n = self.n_drops if n_drops is None else int(n_drops)
        seed = self.seed if seed is None else int(seed)
        edges = np.asarray(edges, dtype=float)
        counts = np.zeros(edges.shape[0] - 1, dtype=np.int64)
        for i in range(n):
            rng = drop_generator(seed, i, (4,))
            _, pts = self._pinned_interferers(params, LinkKind.RD, mobility, serving_dist, rng)
            hist, _ = np.histogram(np.hypot(pts[:, 0], pts[:, 1]), bins=edges)
            counts += hist
        area = math.pi * (edges[1:] ** 2 - edges[:-1] ** 2)
        analytic = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            r = np.linspace(lo, hi, 65)
            dens = np.asarray(
                model.interferer_density(params, LinkKind.RD, mobility, serving_dist, r)
            )
            analytic.append(2.0 * trapezoid(dens * r, r) / (hi**2 - lo**2))
        return pd.DataFrame(
            {
                "r_lo": edges[:-1],
                "r_hi": edges[1:],
                "count": counts,
                "density": counts / (n * area),
                "halfwidth": Z95 * np.sqrt(np.maximum(counts, 1)) / (n * area),
                "analytic": analytic,
            }
        )


def _simulate_chunk(task: tuple[dict[str, t.Any], int, int]) -> dict[str, np.ndarray]:
    payload, start, stop = task
    params = NetworkParams(config=Config(payload["params"]))
    sim = MonteCarloSimulator(**{**payload["simulator"], "jobs": 1})
    scheme, v, time = payload["mobility"]
    mobility = MobilityState(Scheme(scheme), v, time)
    return sim._simulate_range(params, mobility, payload["seed"], payload["key"], start, stop)


__all__ = [
    "Association",
    "DropRealization",
    "McEstimate",
    "MonteCarloSimulator",
    "SimulationError",
    "SinrSamples",
    "disk_points",
    "drop_generator",
    "rician_power",
]
