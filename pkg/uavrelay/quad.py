"""Adaptive quadrature with explicit tolerance accounting.

Thin, deterministic layer over :mod:`scipy.integrate`:

* :func:`integrate` -- finite interval, QUADPACK ``quad``;
* :func:`integrate_semi_infinite` -- ``[a, inf)``, truncated where an
  envelope has decayed below ``envelope_threshold`` of its peak;
* :func:`integrate_vector` -- complex vector-valued integrands via ``quad_vec``;
* :func:`gil_pelaez_integral` -- ``(1/pi) int_0^inf Im[g(x) exp(-j c x)] / x dx``.

Each tolerance tier is a :class:`QuadratureSpec` configurable so tolerances
can be set from a config file, e.g. ``c.GilPelaezQuadrature.epsabs = 1e-7``.
"""

# Distributed under the terms of the Modified BSD License.
from __future__ import annotations

import dataclasses
import math
import typing as t

import numpy as np
from scipy import integrate as si
from traitlets import Float, Int, TraitError, validate
from traitlets.config import Configurable

from .log import get_logger

if t.TYPE_CHECKING:
    from traitlets.utils.bunch import Bunch

ScalarFunc = t.Callable[[float], float]
ComplexFunc = t.Callable[[float], complex]

# an estimate that misses its tolerance by at most this factor is kept
ACCEPT_FACTOR = 10.0


class QuadratureError(Exception):
    """Base class for quadrature failures."""


class ConvergenceError(QuadratureError):
    """The requested tolerance was not reached.

    The best available estimate is attached as :attr:`result`.
    """

    def __init__(self, message: str, result: QuadratureResult | None = None) -> None:
        super().__init__(message)
        self.result = result


@dataclasses.dataclass(frozen=True)
class QuadratureResult:
    value: t.Any
    error: float
    subdivisions: int = 0
    truncation: float | None = None

    def __post_init__(self) -> None:
        if self.error < 0 or not math.isfinite(self.error):
            raise QuadratureError(f"invalid error estimate {self.error!r}")


class QuadratureSpec(Configurable):
    """Tolerances and limits of one layer of numerical integration."""

    epsabs = Float(1e-7, help="Absolute tolerance.").tag(config=True)
    epsrel = Float(1e-7, help="Relative tolerance.").tag(config=True)
    limit = Int(200, help="Maximum number of adaptive subdivisions.").tag(config=True)
    envelope_threshold = Float(
        1e-12,
        help="Semi-infinite integrals are truncated where the integrand envelope "
        "falls below this fraction of its peak.",
    ).tag(config=True)
    truncation_cap = Float(
        1e9,
        help="Largest truncation point tried, in units of the integrand's natural scale. "
        "An integrand that has not decayed by then is reported as non-convergent.",
    ).tag(config=True)
    scan_points = Int(16, help="Points per decade of the truncation warm scan.").tag(config=True)
    max_cycles = Int(200, help="Maximum number of cycles of Fourier (QAWF) integrals.").tag(
        config=True
    )

    @validate("epsabs", "epsrel", "envelope_threshold", "truncation_cap")
    def _validate_positive(self, proposal: Bunch) -> float:
        if not proposal.value > 0:
            raise TraitError(
                f"{type(self).__name__}.{proposal.trait.name} must be > 0, got {proposal.value!r}"
            )
        return float(proposal.value)

    @validate("limit", "scan_points", "max_cycles")
    def _validate_count(self, proposal: Bunch) -> int:
        if proposal.value < 1:
            raise TraitError(
                f"{type(self).__name__}.{proposal.trait.name} must be >= 1, got {proposal.value!r}"
            )
        return int(proposal.value)

    def replace(self, **changes: t.Any) -> QuadratureSpec:
        """A copy of this spec with some values changed."""
        values = self.trait_values(config=True)
        values.update(changes)
        return type(self)(**values)

    def tolerance(self, value: float) -> float:
        return max(self.epsabs, self.epsrel * abs(value))


class InnerQuadrature(QuadratureSpec):
    """Radial PGFL integrals of the interference Laplace transforms."""

    epsabs = Float(1e-7, help="Absolute tolerance.").tag(config=True)
    epsrel = Float(1e-7, help="Relative tolerance.").tag(config=True)
    limit = Int(
        2000, help="Maximum number of adaptive subdivisions; the tabulated integrals are long."
    ).tag(config=True)


class GilPelaezQuadrature(QuadratureSpec):
    """The oscillatory inversion integral of the conditional coverage probability."""

    epsabs = Float(1e-6, help="Absolute tolerance.").tag(config=True)
    epsrel = Float(1e-6, help="Relative tolerance.").tag(config=True)


class OuterQuadrature(QuadratureSpec):
    """Distance integrals over the serving-node distributions."""

    epsabs = Float(1e-5, help="Absolute tolerance.").tag(config=True)
    epsrel = Float(1e-5, help="Relative tolerance.").tag(config=True)


def _check_finite(value: t.Any, what: str) -> None:
    if not np.all(np.isfinite(value)):
        raise QuadratureError(f"{what} produced a non-finite value {value!r}")


def integrate(
    f: ScalarFunc,
    a: float,
    b: float,
    spec: QuadratureSpec,
    points: t.Sequence[float] | None = None,
) -> QuadratureResult:
    """Adaptive Gauss-Kronrod integration of ``f`` over ``[a, b]``."""
    if b == a:
        return QuadratureResult(0.0, 0.0, 0, None)
    pts = None
    if points is not None and math.isfinite(b):
        lo, hi = min(a, b), max(a, b)
        pts = sorted({p for p in points if lo < p < hi}) or None
    out = si.quad(
        f,
        a,
        b,
        epsabs=spec.epsabs,
        epsrel=spec.epsrel,
        limit=spec.limit,
        points=pts,
        full_output=1,
    )
    value, abserr, info = out[0], float(out[1]), out[2]
    _check_finite(value, f"integral over [{a}, {b}]")
    result = QuadratureResult(float(value), abs(abserr), int(info.get("last", 0)), None)
    if len(out) > 3 and abserr > spec.tolerance(value):
        raise ConvergenceError(
            f"quad over [{a}, {b}] reached error {abserr:.3g} > {spec.tolerance(value):.3g}: "
            f"{out[3].splitlines()[0]}",
            result,
        )
    return result


def find_truncation(
    envelope: ScalarFunc,
    spec: QuadratureSpec,
    start: float = 0.0,
    scale: float = 1.0,
) -> tuple[float, float] | None:
    """Warm log-grid scan for the truncation point of a decaying integrand.

    Returns ``(cut, peak_location)`` where ``cut`` is the first grid point
    beyond the envelope's peak at which it falls below
    ``envelope_threshold * peak``, or ``None`` if that never happens before
    ``start + truncation_cap * scale``.
    """
    decades = math.log10(spec.truncation_cap) + 6
    n = int(decades * spec.scan_points) + 1
    grid = start + scale * np.logspace(-6, math.log10(spec.truncation_cap), n)
    peak = 0.0
    peak_at = grid[0]
    for x in grid:
        e = abs(float(envelope(float(x))))
        if not math.isfinite(e):
            continue
        if e > peak:
            peak, peak_at = e, float(x)
        elif peak > 0 and e < spec.envelope_threshold * peak:
            return float(x), peak_at
    if peak == 0.0:
        # identically zero integrand
        return float(grid[0]), float(grid[0])
    return None


def integrate_semi_infinite(
    f: ScalarFunc,
    spec: QuadratureSpec,
    *,
    a: float = 0.0,
    envelope: ScalarFunc | None = None,
    scale: float = 1.0,
    points: t.Sequence[float] = (),
) -> QuadratureResult:
    """Integrate ``f`` over ``[a, inf)``.

    The tail is cut where ``envelope`` (``|f|`` by default) has decayed below
    ``spec.envelope_threshold`` of its peak; ``scale`` is the integrand's
    natural length scale used to place the scan grid.  Integrands which do not
    decay within the scan fall back to QUADPACK's infinite-range rule.
    """
    env = envelope if envelope is not None else f
    found = find_truncation(env, spec, a, scale)
    if found is None:
        get_logger("quad").debug(
            "no truncation below cap %g, integrating to inf", spec.truncation_cap
        )
        res = integrate(f, a, math.inf, spec)
        return dataclasses.replace(res, truncation=math.inf)
    cut, peak_at = found
    res = integrate(f, a, cut, spec, points=[*points, peak_at])
    get_logger("quad").debug("truncated at %g (%d subdivisions)", cut, res.subdivisions)
    return dataclasses.replace(res, truncation=cut)


def integrate_vector(
    f: t.Callable[[float], np.ndarray],
    a: float,
    b: float,
    spec: QuadratureSpec,
    points: t.Sequence[float] | None = None,
) -> QuadratureResult:
    """Integrate a complex vector-valued ``f`` over ``[a, b]`` (``b`` may be ``inf``).

    Error control is on the max-norm over all components.  When ``quad_vec``
    stops short of the tolerance the estimate is kept, with a warning, as long
    as its error is within ``ACCEPT_FACTOR`` times the tolerance.
    """

    def stacked(x: float) -> np.ndarray:
        v = np.asarray(f(x))
        return np.concatenate([v.real, v.imag])

    pts = None
    if points is not None:
        pts = sorted({p for p in points if a < p < b}) or None
    value, err, info = si.quad_vec(
        stacked,
        a,
        b,
        epsabs=spec.epsabs,
        epsrel=spec.epsrel,
        norm="max",
        limit=spec.limit,
        points=pts,
        full_output=True,
    )
    n = value.shape[0] // 2
    out = value[:n] + 1j * value[n:]
    _check_finite(out, f"vector integral over [{a}, {b}]")
    result = QuadratureResult(out, float(err), int(info.intervals.shape[0]), b)
    if info.status != 0:
        budget = spec.tolerance(float(np.max(np.abs(value)))) if value.size else spec.epsabs
        if not err <= ACCEPT_FACTOR * budget:
            raise ConvergenceError(
                f"quad_vec over [{a}, {b}]: {info.message} "
                f"(error {err:.3g}, tolerance {budget:.3g})",
                result,
            )
        get_logger("quad").warning(
            "quad_vec over [%g, %g]: %s; keeping estimate with error %.3g (tolerance %.3g)",
            a,
            b,
            info.message,
            err,
            budget,
        )
    return result


def _head_integral(h: ScalarFunc, x0: float) -> float:
    # h is analytic at 0 but evaluating it there divides 0 by 0: fit a
    # quadratic through three nodes of (0, x0] and integrate that instead.
    nodes = np.array([x0 / 3.0, 2.0 * x0 / 3.0, x0])
    values = np.array([h(float(x)) for x in nodes])
    poly = np.polyint(np.polyfit(nodes, values, 2))
    return float(np.polyval(poly, x0) - np.polyval(poly, 0.0))


# phase cycles up to which an oscillatory tail is left to plain adaptive quadrature
_MAX_PLAIN_CYCLES = 10


def gil_pelaez_integral(
    g: ComplexFunc,
    spec: QuadratureSpec,
    *,
    shift: float = 0.0,
    head: float = 1e-3,
    scale: float = 1.0,
) -> QuadratureResult:
    """``(1/pi) int_0^inf Im[g(x) exp(-j shift x)] / x dx``.

    With ``g`` the characteristic function of ``X`` this is
    ``P(X > shift) - 1/2``.  ``g`` is expected to be smooth; when the
    integrand decays within a few periods of the phase ``exp(-j shift x)``
    it is truncated and integrated directly, otherwise the phase is handled
    as a Fourier weight (QUADPACK QAWF), which also copes with ``g`` that
    barely decays.  With ``shift == 0`` the integrand must decay.

    ``head`` is the width of the interval next to 0 handled by quadratic
    extrapolation.
    """
    c = float(shift)

    def h(x: float) -> float:
        return (g(x) * complex(math.cos(c * x), -math.sin(c * x))).imag / x

    def envelope(x: float) -> float:
        return abs(g(x)) / x

    head_value = _head_integral(h, head)
    found = find_truncation(envelope, spec, head, scale)

    if found is None and c == 0.0:
        raise ConvergenceError(
            "Gil-Pelaez integrand did not decay below "
            f"{spec.envelope_threshold:g} of its peak by {spec.truncation_cap:g}"
        )
    if found is not None and abs(c) * found[0] <= 2 * math.pi * _MAX_PLAIN_CYCLES:
        cut, peak_at = found
        tail = integrate(h, head, cut, spec, points=[peak_at])
        return QuadratureResult(
            (head_value + tail.value) / math.pi, tail.error / math.pi, tail.subdivisions, cut
        )

    omega = abs(c)
    sign = math.copysign(1.0, c)

    # Im[g e^{-jcx}] = Im g cos(|c| x) - sign(c) Re g sin(|c| x)
    def cos_part(x: float) -> float:
        return g(x).imag / x

    def sin_part(x: float) -> float:
        return -sign * g(x).real / x

    total = head_value
    error = 0.0
    cycles = 0
    for part, weight in ((cos_part, "cos"), (sin_part, "sin")):
        out = si.quad(
            part,
            head,
            math.inf,
            weight=weight,
            wvar=omega,
            epsabs=spec.epsabs * math.pi / 2,
            limlst=spec.max_cycles,
            limit=spec.limit,
            full_output=1,
        )
        value, abserr = float(out[0]), abs(float(out[1]))
        _check_finite(value, f"Fourier integral ({weight})")
        total += value
        error += abserr
        cycles += int(out[2].get("lst", 0))
        if len(out) > 3 and abserr > spec.epsabs * math.pi:
            partial = QuadratureResult(total / math.pi, error / math.pi, cycles, math.inf)
            raise ConvergenceError(
                f"Fourier integral ({weight}, omega={omega:g}) reached error "
                f"{abserr:.3g}: {out[3].splitlines()[0]}",
                partial,
            )
    get_logger("quad").debug("Gil-Pelaez integral: shift=%g, %d cycles", c, cycles)
    return QuadratureResult(total / math.pi, error / math.pi, cycles, math.inf)
