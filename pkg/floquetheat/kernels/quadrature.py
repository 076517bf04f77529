"""Resonance-aware adaptive quadrature.

Heat-rate and covariance integrands of weakly damped networks are sharply peaked around
the normal frequencies and their sidebands. A global adaptive rule started on a coarse
partition can step right over a peak whose width is far below the node spacing (an
unhinted Lorentzian of width ``1e-4`` on ``[0, 10]`` is typically missed or found only
after many wasted subdivisions). :func:`integrate` therefore forces breakpoints around
each :class:`PeakHint` at geometrically spaced distances, down to a sixteenth of the
peak width:

>>> import numpy as np
>>> width = 1e-4
>>> lorentzian = lambda x: width / ((x - 1.0) ** 2 + width**2)
>>> spec = QuadratureSpec(abs_tol=1e-10, rel_tol=1e-10, peaks=(PeakHint(1.0, width),))
>>> exact = np.arctan(9 / width) + np.arctan(1 / width)
>>> bool(abs(integrate(lorentzian, 0.0, 10.0, spec) - exact) < 1e-8)
True
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad, quad_vec

from floquetheat.errors import DomainError, QuadratureError

log = logging.getLogger(__name__)

#: Distances from a peak center, in units of the peak width, that become breakpoints.
PEAK_SCALES = (1 / 16, 1 / 4, 1.0, 4.0, 16.0)


@dataclass(frozen=True)
class PeakHint:
    "A resonance of the integrand at ``center`` with half-width ``width``."

    center: float
    width: float


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and resonance hints for :func:`integrate`.

    Args:
        abs_tol: Absolute error tolerance.
        rel_tol: Relative error tolerance.
        peaks: Known resonances of the integrand.
        omega_max: Upper cutoff replacing an infinite upper limit. ``None`` means that
            the caller decides (usually from the spectral supports).
        limit: Maximum number of subintervals.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-8
    peaks: Tuple[PeakHint, ...] = ()
    omega_max: Optional[float] = None
    limit: int = 4000

    def __post_init__(self):
        if not self.abs_tol > 0 or not self.rel_tol > 0:
            raise ValueError(
                f"Quadrature tolerances must be positive, got abs_tol={self.abs_tol} "
                f"and rel_tol={self.rel_tol}."
            )
        if self.limit < 1:
            raise ValueError(f"The subdivision limit must be positive, got {self.limit}.")
        hinted = max((p.center + p.width for p in self.peaks), default=-math.inf)
        if self.omega_max is not None and self.omega_max <= hinted:
            raise ValueError(
                f"omega_max={self.omega_max} does not exceed the hinted peak at "
                f"{hinted:.6g}."
            )

    def with_peaks(self, peaks: Iterable[PeakHint]) -> "QuadratureSpec":
        return replace(self, peaks=tuple(self.peaks) + tuple(peaks))

    def with_tolerances(
        self, abs_tol: Optional[float] = None, rel_tol: Optional[float] = None
    ) -> "QuadratureSpec":
        return replace(
            self,
            abs_tol=self.abs_tol if abs_tol is None else abs_tol,
            rel_tol=self.rel_tol if rel_tol is None else rel_tol,
        )


def breakpoints(
    a: float, b: float, peaks: Sequence[PeakHint] = (), extra: Iterable[float] = ()
) -> Tuple[float, ...]:
    """Return the sorted breakpoints strictly inside ``(a, b)`` for the given peaks.

    >>> breakpoints(0.0, 2.0, [PeakHint(1.0, 0.5)])
    (0.5, 0.875, 0.96875, 1.0, 1.03125, 1.125, 1.5)
    >>> breakpoints(0.0, 1.0, extra=[0.5, 3.0])
    (0.5,)
    """
    points = set(float(x) for x in extra)
    for peak in peaks:
        if peak.width <= 0 or not math.isfinite(peak.width):
            continue
        points.add(peak.center)
        for scale in PEAK_SCALES:
            points.add(peak.center - scale * peak.width)
            points.add(peak.center + scale * peak.width)
    return tuple(sorted(x for x in points if a < x < b))


def integrate(
    f: Callable[[float], np.ndarray],
    a: float,
    b: float,
    spec: QuadratureSpec = QuadratureSpec(),
    points: Iterable[float] = (),
    term: Optional[Sequence] = None,
    with_error: bool = False,
):
    """Integrate a scalar- or vector-valued ``f`` over ``[a, b]`` (``b`` may be
    ``inf``), forcing subdivision around the peaks of ``spec``.

    With ``with_error`` a ``(result, error_estimate)`` pair is returned.

    Raises:
        QuadratureError: if the tolerance is not reached within ``spec.limit``
            subintervals. The error carries the partial estimate and ``term``.
    """
    if a == b:
        zero = np.zeros_like(np.asarray(f(a), dtype=float))
        return (zero, 0.0) if with_error else zero
    pts = breakpoints(a, b, spec.peaks, points)
    if math.isinf(b) and pts:
        # quad_vec maps infinite intervals onto [0, 1]; keep the breakpoints on the
        # finite part only.
        head, head_err = _quad_vec(f, a, pts[-1], spec, pts[:-1], term)
        tail, tail_err = _quad_vec(f, pts[-1], b, spec, (), term)
        result, error = head + tail, head_err + tail_err
    else:
        result, error = _quad_vec(f, a, b, spec, pts, term)
    log.debug("Integrated over [%g, %g] with %d breakpoints (error %.3e).", a, b, len(pts), error)
    return (result, error) if with_error else result


def _quad_vec(f, a, b, spec: QuadratureSpec, pts, term):
    result, error, info = quad_vec(
        f,
        a,
        b,
        epsabs=spec.abs_tol,
        epsrel=spec.rel_tol,
        limit=spec.limit,
        points=pts or None,
        norm="max",
        full_output=True,
    )
    if not info.success:
        raise QuadratureError(
            f"Adaptive quadrature over [{a:g}, {b:g}] did not converge: {info.message}",
            achieved=float(error),
            estimate=result,
            term=term,
        )
    return result, float(error)


def checked_quad(
    f: Callable[[float], float],
    a: float,
    b: float,
    spec: QuadratureSpec = QuadratureSpec(),
    term: Optional[str] = None,
    **options,
) -> Tuple[float, float]:
    """Scalar QUADPACK quadrature that fails loudly.

    ``options`` are passed on to :func:`scipy.integrate.quad` (``points``, ``weight``,
    ``wvar``). Returns ``(value, error_estimate)``.

    Raises:
        QuadratureError: if QUADPACK reports a failure (subdivision limit, roundoff,
            bad integrand behavior) instead of returning a quietly degraded value.
    """
    value, error, _info, *message = quad(
        f,
        a,
        b,
        epsabs=spec.abs_tol,
        epsrel=spec.rel_tol,
        limit=spec.limit,
        full_output=1,
        **options,
    )
    if message:
        raise QuadratureError(
            f"QUADPACK over [{a:g}, {b:g}] failed: {message[0].splitlines()[0]}",
            achieved=float(error),
            estimate=value,
            term=term,
        )
    return float(value), float(error)


def principal_value(
    f: Callable[[float], float],
    x: float,
    a: float,
    b: float,
    method: str = "cauchy",
    spec: QuadratureSpec = QuadratureSpec(),
    points: Sequence[float] = (),
    term: Optional[str] = None,
) -> float:
    """Return the Cauchy principal value of :math:`\\int_a^b f(\\nu)/(\\nu - x)\\,d\\nu`.

    ``method="cauchy"`` uses QUADPACK's Cauchy-weighted rule on an interval centered on
    the pole; ``method="subtraction"`` integrates :math:`(f(\\nu)-f(x))/(\\nu-x)` and adds
    the singular part :math:`f(x)\\log((b-x)/(x-a))` analytically. Both require
    ``a < x < b`` and raise :class:`~floquetheat.errors.QuadratureError` when a piece
    fails to converge.

    >>> round(principal_value(lambda v: 1.0, 0.5, 0.0, 2.0), 12)
    1.098612288668
    >>> round(principal_value(lambda v: 1.0, 0.5, 0.0, 2.0, method="subtraction"), 12)
    1.098612288668
    """
    if not a < x < b:
        raise DomainError(
            f"The principal value needs the pole {x:g} strictly inside [{a:g}, {b:g}]."
        )
    inner = tuple(p for p in points if a < p < b and p != x)
    if method == "cauchy":
        # QUADPACK's Cauchy rule does not accept breakpoints, so kinks split the range.
        edges = (a, *sorted(inner), b)
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            if not lo < x < hi:
                total += checked_quad(lambda v: f(v) / (v - x), lo, hi, spec, term)[0]
                continue
            # The Cauchy rule degrades when the pole sits close to an edge of its
            # interval; it only gets the part symmetric about the pole.
            half = min(x - lo, hi - x)
            total += checked_quad(f, x - half, x + half, spec, term, weight="cauchy", wvar=x)[0]
            for left, right in ((lo, x - half), (x + half, hi)):
                if right > left:
                    total += checked_quad(lambda v: f(v) / (v - x), left, right, spec, term)[0]
        return total
    if method == "subtraction":
        fx = f(x)
        value, _ = checked_quad(
            lambda v: (f(v) - fx) / (v - x), a, b, spec, term, points=sorted({x, *inner})
        )
        return value + fx * math.log((b - x) / (x - a))
    raise ValueError(f"Unknown principal value method {method!r}.")


if __name__ == "__main__":
    import doctest

    doctest.testmod()
