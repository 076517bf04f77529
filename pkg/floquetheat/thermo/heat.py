"""Cycle-averaged heat rates of every reservoir and their split into elementary
processes.

The heat rate of reservoir :math:`\\alpha` (positive when heat flows from the reservoir
into the network) is a frequency integral over the transition probabilities
:math:`p^{(k)}_{\\alpha\\beta}` of :mod:`floquetheat.thermo.probability`. Grouping its
terms by the sign of :math:`s_k = \\omega + k\\omega_d` and by whether both quanta
belong to the same reservoir gives

- *resonant pumping* (RP): a quantum of one reservoir is scattered into another one;
- *resonant heating* (RH): a quantum is scattered within the same reservoir, which for a
  time-reversal invariant drive always heats it;
- *non-resonant heating* (NRH): the drive creates pairs of quanta (:math:`s_k < 0`),
  which heats every reservoir and is the only process left at zero temperature.

The vacuum terms of the resonant processes cancel for time-reversal invariant drives;
their integral is kept in the report as :attr:`ReservoirHeat.vacuum_residual`.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from floquetheat.errors import UnsupportedConfigurationError
from floquetheat.floquet.sidebands import FloquetSolution
from floquetheat.kernels.noise import occupation
from floquetheat.kernels.quadrature import QuadratureSpec, integrate
from floquetheat.model import ReservoirSpec, label
from floquetheat.thermo.probability import TransitionProbability

log = logging.getLogger(__name__)

COMPONENTS = ("total", "rp", "rh", "nrh", "vacuum", "work")
ReservoirKey = Union[int, str]


class HeatIntegrands:
    """The frequency integrands of every heat-rate component, each a vector over the
    reservoirs.

    All of them vanish above the largest spectral support, and the non-resonant one
    also above :math:`k_{max}|\\omega_d|`."""

    def __init__(self, sol: FloquetSolution, reservoirs: Sequence[ReservoirSpec]):
        self.sol = sol
        self.reservoirs = tuple(reservoirs)
        self.probability = TransitionProbability(sol, self.reservoirs)
        self.temperatures = np.array([r.temperature for r in self.reservoirs])
        self.sidebands = sol.sidebands
        self.drive_freq = sol.drive_freq
        self.off_diagonal = 1.0 - np.eye(len(self.reservoirs))

    def _setup(self, omega: float):
        p = self.probability(omega)
        s = self.probability.shifted(omega)
        n = occupation(omega, self.temperatures)
        return p, s, n

    def total(self, omega: float) -> np.ndarray:
        "The general expression, valid for any drive."
        p, s, n = self._setup(omega)
        h = n + 0.5
        out = np.einsum("k,kab,b->a", np.abs(s), p, h)
        into = omega * h * np.einsum("k,kba->a", np.sign(s), p)
        return into - out

    def rp(self, omega: float) -> np.ndarray:
        p, s, n = self._setup(omega)
        resonant = s > 0
        pr = p[resonant] * self.off_diagonal
        into = omega * n * pr.sum(axis=(0, 1))
        out = np.einsum("k,kab,b->a", s[resonant], pr, n)
        return into - out

    def rh(self, omega: float) -> np.ndarray:
        """Same-reservoir scattering with each up-conversion paired with the matching
        down-conversion, :math:`-\\sum_{k\\omega_d>0} k\\omega_d\\,p^{(k)}_{\\alpha\\alpha}(\\omega)
        [N_\\alpha(\\omega) - N_\\alpha(\\omega+k\\omega_d)]`, which is never positive."""
        p = self.probability(omega)
        total = np.zeros(len(self.reservoirs))
        for i, k in enumerate(self.sidebands):
            gain = k * self.drive_freq
            if gain <= 0:
                continue
            drop = occupation(omega, self.temperatures) - occupation(
                omega + gain, self.temperatures
            )
            total -= gain * np.diagonal(p[i]) * drop
        return total

    def rh_literal(self, omega: float) -> np.ndarray:
        "Same-reservoir scattering summed term by term over the resonant sidebands."
        p, s, n = self._setup(omega)
        resonant = s > 0
        gains = self.sidebands[resonant] * self.drive_freq
        return -np.einsum("k,kaa->a", gains, p[resonant]) * n

    def nrh(self, omega: float) -> np.ndarray:
        p, s, n = self._setup(omega)
        pairs = s < 0
        h = n + 0.5
        out = np.einsum("k,kab,b->a", np.abs(s[pairs]), p[pairs], h)
        into = omega * h * p[pairs].sum(axis=(0, 1))
        return -(out + into)

    def vacuum(self, omega: float) -> np.ndarray:
        p, s, _ = self._setup(omega)
        resonant = s > 0
        out = np.einsum("k,kab->a", s[resonant], p[resonant])
        into = omega * p[resonant].sum(axis=(0, 1))
        return 0.5 * (into - out)

    def work(self, omega: float) -> np.ndarray:
        """The work rate split by the reservoir whose quantum is absorbed,
        :math:`-\\tilde Q_\\beta(\\omega)\\coth(\\omega/2T_\\beta)` (see
        :mod:`floquetheat.thermo.transfer`)."""
        p, s, n = self._setup(omega)
        gains = self.sidebands * self.drive_freq * np.sign(s)
        return 0.5 * np.einsum("k,kab->b", gains, p) * (2 * n + 1)


@dataclass(frozen=True)
class ReservoirHeat:
    """The heat rates of one reservoir (energy per time, positive into the network).

    For drives that are not time-reversal invariant only :attr:`total` and :attr:`rp`
    are defined; the other parts are NaN."""

    name: str
    temperature: float
    total: float  #: The general expression, valid for every drive.
    rp: float = math.nan
    rh: float = math.nan
    nrh: float = math.nan
    #: Integral of the resonant vacuum terms (zero for time-reversal invariant drives).
    vacuum_residual: float = math.nan
    error_estimate: float = 0.0  #: Largest quadrature error estimate of the parts.

    @property
    def split_total(self) -> float:
        "RP + RH + NRH, which equals :attr:`total` for time-reversal invariant drives."
        return self.rp + self.rh + self.nrh


@dataclass(frozen=True)
class HeatRateReport:
    "Heat rates of every reservoir plus the work rate of the drive."

    heats: Tuple[ReservoirHeat, ...]
    #: Work rate integrated from the heat transfer matrix, independently of the totals.
    work_rate: float
    drive_freq: float
    k_max: int
    time_reversal_invariant: bool
    settings: Dict[str, float] = field(default_factory=dict)
    #: Work rate from the covariance, see :meth:`with_direct_work_rate`.
    direct_work_rate: float = math.nan

    def __getitem__(self, key: ReservoirKey) -> ReservoirHeat:
        if isinstance(key, str):
            for heat in self.heats:
                if heat.name == key:
                    return heat
            raise KeyError(key)
        return self.heats[key]

    def __len__(self) -> int:
        return len(self.heats)

    @property
    def totals(self) -> np.ndarray:
        return np.array([h.total for h in self.heats])

    @property
    def first_law_residual(self) -> float:
        "work_rate + sum of the totals, zero up to quadrature error."
        return self.work_rate + float(np.sum(self.totals))

    @property
    def entropy_production(self) -> float:
        return entropy_production(self.heats)

    @property
    def work_rate_discrepancy(self) -> float:
        "work_rate minus :attr:`direct_work_rate` (NaN until the latter is attached)."
        return self.work_rate - self.direct_work_rate

    def with_direct_work_rate(self, series) -> "HeatRateReport":
        """Attach the work rate computed from a
        :class:`~floquetheat.covariance.CovarianceSeries` of the same solution, an
        estimate independent of the heat integrals."""
        from floquetheat.covariance import direct_work_rate

        report = replace(self, direct_work_rate=direct_work_rate(series))
        log.info(
            "Work rate %.6e from the heat rates, %.6e from the covariance (discrepancy %.3e).",
            report.work_rate, report.direct_work_rate, report.work_rate_discrepancy,
        )
        return report


def _index(reservoirs: Sequence[ReservoirSpec], key: ReservoirKey) -> int:
    if isinstance(key, str):
        for i, r in enumerate(reservoirs):
            if r.name == key:
                return i
        raise KeyError(f"No reservoir named {key!r}.")
    return int(key)


def _is_time_reversal_invariant(sol: FloquetSolution) -> bool:
    return sol.model.time_reversal_invariant or not sol.model.is_driven


def _points(sol: FloquetSolution, reservoirs: Sequence[ReservoirSpec]) -> Tuple[float, ...]:
    points = set(sol.harmonic_points())
    for r in reservoirs:
        for kink in r.spectral.kinks:
            for k in sol.sidebands:
                points.add(kink - k * sol.drive_freq)
    return tuple(sorted(p for p in points if p > 0))


def quadrature_setup(sol, reservoirs, spec: Optional[QuadratureSpec]):
    """Return the quadrature settings with resonance hints, the upper limit (the
    largest spectral support unless ``spec.omega_max`` is set) and the breakpoints."""
    spec = spec or QuadratureSpec()
    top = spec.omega_max or max(r.spectral.support for r in reservoirs)
    hints = [h for h in sol.peak_hints() if h.center + h.width < top]
    return spec.with_peaks(hints), top, _points(sol, reservoirs)


def heat_component(
    component: str,
    sol: FloquetSolution,
    reservoirs: Sequence[ReservoirSpec],
    spec: Optional[QuadratureSpec] = None,
    integrands: Optional[HeatIntegrands] = None,
) -> Tuple[np.ndarray, float]:
    """Integrate one component for all reservoirs at once.

    Returns:
        The vector of rates (one per reservoir) and the quadrature error estimate.
    """
    if component not in COMPONENTS + ("rh_literal",):
        raise ValueError(f"Unknown heat-rate component {component!r}.")
    integrands = integrands or HeatIntegrands(sol, reservoirs)
    spec, top, points = quadrature_setup(sol, reservoirs, spec)
    if component == "nrh":
        top = min(top, sol.k_max * abs(sol.drive_freq))
    value, error = integrate(
        getattr(integrands, component), 0.0, top, spec, points, term=(component,), with_error=True
    )
    return np.atleast_1d(value), error


def heat_rates(
    sol: FloquetSolution,
    reservoirs: Sequence[ReservoirSpec],
    spec: Optional[QuadratureSpec] = None,
) -> HeatRateReport:
    """Compute every heat-rate component of every reservoir.

    Each component is a separate adaptive integral (so that a small component keeps its
    own relative accuracy), and all of them share the cached sideband solves.
    """
    reservoirs = tuple(reservoirs)
    integrands = HeatIntegrands(sol, reservoirs)
    tri = _is_time_reversal_invariant(sol)
    wanted = ("total", "rp", "work") + (("rh", "nrh", "vacuum") if tri else ())
    values, errors = {}, {}
    for component in wanted:
        values[component], errors[component] = heat_component(
            component, sol, reservoirs, spec, integrands
        )
    nan = np.full(len(reservoirs), math.nan)
    error = max(errors.values())
    heats = tuple(
        ReservoirHeat(
            name=label(r, i),
            temperature=r.temperature,
            total=float(values["total"][i]),
            rp=float(values["rp"][i]),
            rh=float(values.get("rh", nan)[i]),
            nrh=float(values.get("nrh", nan)[i]),
            vacuum_residual=float(values.get("vacuum", nan)[i]),
            error_estimate=error,
        )
        for i, r in enumerate(reservoirs)
    )
    spec = spec or QuadratureSpec()
    report = HeatRateReport(
        heats,
        work_rate=float(np.sum(values["work"])),
        drive_freq=sol.drive_freq,
        k_max=sol.k_max,
        time_reversal_invariant=tri,
        settings={"abs_tol": spec.abs_tol, "rel_tol": spec.rel_tol},
    )
    for heat in heats:
        log.info(
            "Reservoir %s: total %.6e (rp %.6e, rh %.6e, nrh %.6e).",
            heat.name, heat.total, heat.rp, heat.rh, heat.nrh,
        )
    return report


def heat_rp(
    alpha: ReservoirKey,
    sol: FloquetSolution,
    reservoirs: Sequence[ReservoirSpec],
    spec: Optional[QuadratureSpec] = None,
) -> float:
    "Return the resonant-pumping rate of reservoir ``alpha``."
    value, _ = heat_component("rp", sol, reservoirs, spec)
    return float(value[_index(reservoirs, alpha)])


def _require_time_reversal_invariant(sol: FloquetSolution, what: str):
    if not _is_time_reversal_invariant(sol):
        raise UnsupportedConfigurationError(
            f"The {what} rate is only defined for time-reversal invariant drives; use "
            "heat_total_general for this model."
        )


def heat_rh(
    alpha: ReservoirKey,
    sol: FloquetSolution,
    reservoirs: Sequence[ReservoirSpec],
    spec: Optional[QuadratureSpec] = None,
) -> float:
    "Return the resonant-heating rate of reservoir ``alpha`` (never positive)."
    _require_time_reversal_invariant(sol, "resonant-heating")
    value, _ = heat_component("rh", sol, reservoirs, spec)
    return float(value[_index(reservoirs, alpha)])


def heat_nrh(
    alpha: ReservoirKey,
    sol: FloquetSolution,
    reservoirs: Sequence[ReservoirSpec],
    spec: Optional[QuadratureSpec] = None,
) -> float:
    "Return the non-resonant heating rate of reservoir ``alpha`` (never positive)."
    _require_time_reversal_invariant(sol, "non-resonant heating")
    value, _ = heat_component("nrh", sol, reservoirs, spec)
    return float(value[_index(reservoirs, alpha)])


def heat_total_general(
    alpha: ReservoirKey,
    sol: FloquetSolution,
    reservoirs: Sequence[ReservoirSpec],
    spec: Optional[QuadratureSpec] = None,
) -> float:
    "Return the total heat rate of reservoir ``alpha`` for an arbitrary drive."
    value, _ = heat_component("total", sol, reservoirs, spec)
    return float(value[_index(reservoirs, alpha)])


def work_rate(heats: Sequence[ReservoirHeat]) -> float:
    "Return the work rate :math:`-\\sum_\\alpha \\dot Q_\\alpha` required by the first law."
    return -float(sum(h.total for h in heats))


def entropy_production(heats: Sequence[ReservoirHeat]) -> float:
    """Return :math:`\\sum_\\alpha -\\dot Q_\\alpha / T_\\alpha`.

    A reservoir at zero temperature contributes :math:`+\\infty` when heat flows into
    it (beyond its quadrature error), :math:`-\\infty` when heat flows out of it, and 0
    otherwise.

    >>> cold = ReservoirHeat("a", temperature=0.0, total=-1e-3, error_estimate=1e-12)
    >>> hot = ReservoirHeat("b", temperature=2.0, total=2e-3)
    >>> entropy_production([cold, hot])
    inf
    >>> entropy_production([ReservoirHeat("a", 1.0, -1.0), ReservoirHeat("b", 2.0, 2.0)])
    0.0
    """
    total = 0.0
    for h in heats:
        if h.temperature > 0:
            total += -h.total / h.temperature
        elif abs(h.total) > h.error_estimate:
            total += math.inf if h.total < 0 else -math.inf
    return total


def planck_check(
    sol: FloquetSolution,
    reservoir: ReservoirSpec,
    spec: Optional[QuadratureSpec] = None,
) -> float:
    """Return :math:`\\dot W(\\omega_d) + \\dot W(-\\omega_d)` for a network coupled to a
    single reservoir, which cannot be negative (no work is extracted from a single
    thermal reservoir)."""
    forward = sol
    backward = sol.with_drive_freq(-sol.drive_freq)
    total = 0.0
    for s in (forward, backward):
        value, _ = heat_component("total", s, [reservoir], spec)
        total -= float(value[0])
    return total


if __name__ == "__main__":
    import doctest

    doctest.testmod()
