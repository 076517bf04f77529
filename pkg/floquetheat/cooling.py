"""Cooling a reservoir by driving the network, and the lowest temperature it reaches.

A reservoir :math:`\\alpha` whose spectral density vanishes at the lowest normal
frequency :math:`\\Omega_0` can be cooled by the adaptive drive
:math:`\\omega_d = \\Omega_0 - T`: resonant pumping lifts its quanta at frequency
:math:`T` into the other reservoirs. Non-resonant heating grows faster than pumping
shrinks as :math:`T \\to 0`, so the two balance at a minimum temperature
:math:`T_{min} \\propto \\gamma_0^{1/(1+\\lambda_\\alpha)}`.

The temperature of a reservoir with heat capacity :math:`C_v = c_d T^d` follows

.. math:: \\frac{dT}{dt} = -\\frac{\\dot Q_\\alpha(T)}{C_v(T)},

where every rate is evaluated with all reservoirs at the current temperature :math:`T`
and the drive set by the protocol.
"""

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import stats
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq
from tqdm import tqdm

from floquetheat.errors import (
    DomainError,
    FloquetHeatError,
    QuadratureError,
    StepSizeError,
    UnsupportedConfigurationError,
)
from floquetheat.floquet.green import UndrivenGreen
from floquetheat.floquet.sidebands import FloquetSolution
from floquetheat.kernels.damping import static_damping
from floquetheat.kernels.quadrature import PeakHint, QuadratureSpec
from floquetheat.model import NetworkModel, ReservoirSpec, two_bath_setup, with_temperatures
from floquetheat.scan import ForAll, Grid
from floquetheat.thermo.heat import HeatIntegrands, heat_component

log = logging.getLogger(__name__)

STRATEGIES = ("adaptive", "fixed")
TMIN_STATUSES = ("found", "always_cooling", "never_cooling", "failed")
#: Rates of the cooling regime are tiny, so only the relative tolerance matters.
COOLING_QUADRATURE = QuadratureSpec(abs_tol=1e-24, rel_tol=1e-7)
#: A heating integral that stalls with an error below this fraction of the pumping rate
#: is still good enough to place the balance point.
ACCEPTED_FRACTION = 1e-4
#: The trajectory is stationary once |d log T/dt| falls below this fraction of its
#: initial value.
STATIONARY_FRACTION = 1e-3
#: |dT/dt| above this fraction of omega_d * T violates the quasi-static assumption.
QUASI_STATIC_FRACTION = 1e-2


@dataclass(frozen=True)
class CoolingProtocol:
    """How the drive follows the temperature, and the heat capacity of the reservoir.

    Args:
        strategy: ``"adaptive"`` drives at :math:`\\Omega_0 - T`, ``"fixed"`` at
            ``drive_freq``.
        heat_capacity: The constant :math:`c_d` of :math:`C_v = c_d T^d`.
        dimension: The exponent :math:`d` (1, 2 or 3).
        floor: Trajectories stop at this temperature.
        t_max: Trajectories stop at this time.
    """

    strategy: str = "adaptive"
    drive_freq: Optional[float] = None
    heat_capacity: float = 1.0
    dimension: int = 1
    floor: float = 1e-4
    t_max: float = 1e15

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"Unknown strategy {self.strategy!r}, expected one of {STRATEGIES}.")
        if self.strategy == "fixed" and self.drive_freq is None:
            raise ValueError("The fixed strategy needs a drive_freq.")
        if not self.heat_capacity > 0:
            raise ValueError(f"heat_capacity must be > 0, got {self.heat_capacity}.")
        if self.dimension not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.dimension}.")
        if not self.floor > 0:
            raise ValueError(f"floor must be > 0, got {self.floor}.")

    def capacity(self, temperature):
        return self.heat_capacity * np.asarray(temperature) ** self.dimension

    def drive_for(self, temperature: float) -> Optional[float]:
        "The drive frequency at ``temperature``, ``None`` for the adaptive choice."
        return self.drive_freq if self.strategy == "fixed" else None


@dataclass(frozen=True)
class CoolingRates:
    "The heat rates of the cooled reservoir at one temperature."

    temperature: float
    drive_freq: float
    rp: float
    rh: float
    nrh: float

    @property
    def total(self) -> float:
        return self.rp + self.rh + self.nrh

    @property
    def net_cooling(self) -> float:
        "Pumping minus all heating, positive while the reservoir still cools."
        return self.rp + self.rh - abs(self.nrh)


@dataclass(frozen=True, eq=False)
class CoolingSetup:
    """A network, its reservoirs, and which reservoir to cool.

    The reservoirs' temperatures and the drive frequency of ``model`` are placeholders:
    :meth:`at` sets both for every evaluated temperature.

    Args:
        model: The driven network (its drive amplitude is kept, its frequency is not).
        reservoirs: The reservoirs; ``alpha`` indexes the one being cooled.
        gamma0: The reference coupling that the reservoir strengths are relative to.
        method: Sideband method, ``"perturbative"`` (weak driving) or ``"banded"``.
        zero_nrh: Drop non-resonant heating, a diagnostic that shows the apparent
            third-law violation of the resonant processes alone.
        spec: Quadrature settings.
        k_max: Sideband truncation of the banded method.
    """

    model: NetworkModel
    reservoirs: Tuple[ReservoirSpec, ...]
    alpha: int = 0
    gamma0: float = 1e-3
    method: str = "perturbative"
    zero_nrh: bool = False
    spec: QuadratureSpec = COOLING_QUADRATURE
    k_max: Optional[int] = None
    green: UndrivenGreen = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "reservoirs", tuple(self.reservoirs))
        object.__setattr__(self, "green", UndrivenGreen(self.model, self.reservoirs))

    @classmethod
    def two_bath(
        cls,
        gamma0: float = 1e-3,
        lambda_alpha: float = 1.0,
        lambda_beta: float = 1.0,
        v1: float = 0.05,
        **kwargs,
    ) -> "CoolingSetup":
        "The single-oscillator, two-bath setup of :func:`~floquetheat.model.two_bath_setup`."
        model, reservoirs = two_bath_setup(gamma0, lambda_alpha, lambda_beta, v1=v1)
        return cls(model, tuple(reservoirs), alpha=0, gamma0=gamma0, **kwargs)

    @property
    def omega0(self) -> float:
        "The lowest normal frequency of the renormalized network."
        frequencies, _ = self.green.normal_modes()
        return float(frequencies[0])

    def with_coupling(self, gamma0: float) -> "CoolingSetup":
        """Return the setup with every coupling scaled to the reference ``gamma0``.

        The bare potential absorbs the change of :math:`\\gamma(0)`, so the renormalized
        network (and :attr:`omega0`) stays the same."""
        factor = gamma0 / self.gamma0
        reservoirs = tuple(r.scaled(factor) for r in self.reservoirs)
        shift = static_damping(reservoirs) - static_damping(self.reservoirs)
        model = dataclasses.replace(self.model, v_static=self.model.v_static + shift)
        return dataclasses.replace(self, model=model, reservoirs=reservoirs, gamma0=gamma0)

    def at(
        self, temperature: float, drive_freq: Optional[float] = None
    ) -> Tuple[NetworkModel, Tuple[ReservoirSpec, ...]]:
        """Return the model and reservoirs with every reservoir at ``temperature`` and
        the drive at ``drive_freq`` (:math:`\\Omega_0 - T` if not given)."""
        if temperature < 0:
            raise DomainError(f"Temperatures must be >= 0, got {temperature}.")
        if drive_freq is None:
            drive_freq = self.omega0 - temperature
        if not drive_freq > 0:
            raise UnsupportedConfigurationError(
                f"The adaptive drive needs T < Omega_0 = {self.omega0:.6g}, got T={temperature:.6g}."
            )
        model = self.model.with_drive_freq(drive_freq)
        return model, tuple(with_temperatures(self.reservoirs, temperature))

    def solution(self, temperature: float, drive_freq: Optional[float] = None) -> FloquetSolution:
        model, reservoirs = self.at(temperature, drive_freq)
        return FloquetSolution(model, reservoirs, self.k_max, self.method, self.green)

    def rates(self, temperature: float, drive_freq: Optional[float] = None) -> CoolingRates:
        """Return the heat rates of the cooled reservoir at ``temperature``.

        Pumping is integrated first. The heating terms only matter next to it, so their
        absolute tolerance is ``spec.rel_tol`` times the pumping rate. An integral that
        stalls with an error below :data:`ACCEPTED_FRACTION` of that rate (of its own
        value, for pumping) is kept with a warning.
        """
        sol = self.solution(temperature, drive_freq)
        integrands = HeatIntegrands(sol, sol.reservoirs)
        # The thermal factors vary on the scale of T, far below the resonance widths
        # of a strongly cooled reservoir.
        spec = self.spec.with_peaks([PeakHint(temperature, temperature)]) if temperature > 0 else self.spec
        values = {"nrh": 0.0}
        values["rp"] = self._component("rp", sol, spec, integrands, scale=0.0)
        heating_spec = spec.with_tolerances(abs_tol=max(spec.abs_tol, spec.rel_tol * abs(values["rp"])))
        for component in ("rh",) if self.zero_nrh else ("rh", "nrh"):
            values[component] = self._component(
                component, sol, heating_spec, integrands, scale=abs(values["rp"])
            )
        rates = CoolingRates(temperature, sol.drive_freq, **values)
        log.debug(
            "T=%.6g: rp %.6e, rh %.6e, nrh %.6e.", temperature, rates.rp, rates.rh, rates.nrh
        )
        return rates

    def _component(self, component, sol, spec, integrands, scale: float) -> float:
        try:
            value, _ = heat_component(component, sol, sol.reservoirs, spec, integrands)
        except QuadratureError as exc:
            if exc.estimate is None:
                raise
            value = np.atleast_1d(exc.estimate)
            if not exc.achieved <= ACCEPTED_FRACTION * max(scale, abs(float(value[self.alpha]))):
                raise
            log.warning("Keeping an unconverged %s estimate at gamma0=%.3e: %s", component, self.gamma0, exc)
        return float(value[self.alpha])


@dataclass(frozen=True)
class TminOutcome:
    """The result of :func:`find_tmin` at one coupling.

    ``status`` is ``"found"`` when the net cooling changes sign in the bracket,
    ``"always_cooling"`` when the reservoir still cools at the floor,
    ``"never_cooling"`` when it already heats at the top of the bracket, and
    ``"failed"`` when a rate could not be computed (``message`` says why)."""

    status: str
    t_min: float
    gamma0: float
    bracket: Tuple[float, float]
    message: str = ""

    @property
    def found(self) -> bool:
        return self.status == "found"


def find_tmin(
    setup: CoolingSetup,
    floor: float = 1e-4,
    ceiling: Optional[float] = None,
    rel_tol: float = 1e-3,
) -> TminOutcome:
    """Find the temperature where resonant cooling of the reservoir equals the heating.

    This is the root of :attr:`CoolingRates.net_cooling`,
    :math:`\\dot Q_{RP} + \\dot Q_{RH} - |\\dot Q_{NRH}|`, under the adaptive drive.
    It is bracketed by ``[floor, ceiling]`` (``ceiling`` defaults to
    :math:`\\Omega_0/4`) and located in :math:`\\log T` to the relative tolerance
    ``rel_tol``. A failure of the rate computation gives a ``"failed"`` outcome
    instead of an exception, so one bad coupling does not end a scan.
    """
    ceiling = setup.omega0 / 4 if ceiling is None else ceiling
    if not 0 < floor < ceiling:
        raise ValueError(f"Need 0 < floor < ceiling, got [{floor}, {ceiling}].")
    net = lambda log_t: setup.rates(math.exp(log_t)).net_cooling
    lo, hi = math.log(floor), math.log(ceiling)
    try:
        f_lo, f_hi = net(lo), net(hi)
        if f_lo > 0 and f_hi > 0:
            outcome = TminOutcome("always_cooling", math.nan, setup.gamma0, (floor, ceiling))
        elif f_lo <= 0 and f_hi <= 0:
            outcome = TminOutcome("never_cooling", math.nan, setup.gamma0, (floor, ceiling))
        else:
            root = brentq(net, lo, hi, xtol=rel_tol)
            outcome = TminOutcome("found", math.exp(root), setup.gamma0, (floor, ceiling))
    except FloquetHeatError as exc:
        log.warning("gamma0=%.3e: no minimum temperature, %s", setup.gamma0, exc)
        return TminOutcome("failed", math.nan, setup.gamma0, (floor, ceiling), str(exc))
    log.info("gamma0=%.3e: %s (T_min=%.6g).", setup.gamma0, outcome.status, outcome.t_min)
    return outcome


@dataclass(frozen=True)
class TminResult:
    "Minimum temperatures over a coupling grid and their log-log fit."

    gammas: np.ndarray
    t_min: np.ndarray  #: NaN where no minimum was found in the bracket.
    outcomes: Tuple[TminOutcome, ...]
    slope: float
    slope_halfwidth: float  #: 95% confidence half-width of :attr:`slope`.
    intercept: float


@dataclass
class _TminAt:
    "Picklable kernel of :func:`scan_tmin`."

    setup: CoolingSetup
    floor: float
    ceiling: Optional[float]

    def __call__(self, gamma0: float) -> TminOutcome:
        return find_tmin(self.setup.with_coupling(gamma0), self.floor, self.ceiling)


def fit_power_law(x: np.ndarray, y: np.ndarray, confidence: float = 0.95) -> Tuple[float, float, float]:
    """Fit :math:`\\log y = s\\log x + c` by least squares.

    Returns:
        The slope, its Student-t confidence half-width, and the intercept.

    >>> slope, halfwidth, _ = fit_power_law(np.array([1.0, 4.0, 16.0]), np.array([1.0, 2.0, 4.0]))
    >>> round(slope, 12), round(halfwidth, 12)
    (0.5, 0.0)
    """
    fit = stats.linregress(np.log(x), np.log(y))
    quantile = stats.t.ppf(0.5 + confidence / 2, len(x) - 2)
    return float(fit.slope), float(quantile * fit.stderr), float(fit.intercept)


def scan_tmin(
    setup: CoolingSetup,
    gammas: Sequence[float],
    vmap_impl=None,
    floor: float = 1e-4,
    ceiling: Optional[float] = None,
) -> TminResult:
    """Run :func:`find_tmin` over a grid of couplings and fit
    :math:`T_{min} \\propto \\gamma_0^s`.

    ``vmap_impl`` runs the grid points, e.g. :func:`~floquetheat.scan.pool_vmap`."""
    looped = ForAll("gamma0", vmap_impl=vmap_impl)(_TminAt(setup, floor, ceiling))
    outcomes = tuple(looped(Grid(gamma0=gammas)))
    gammas = np.array([o.gamma0 for o in outcomes])
    t_min = np.array([o.t_min for o in outcomes])
    found = np.isfinite(t_min)
    failed = [o.gamma0 for o in outcomes if o.status == "failed"]
    if failed:
        log.warning("The rates failed at gamma0 = %s; those points are left out of the fit.", failed)
    if found.sum() >= 3:
        slope, halfwidth, intercept = fit_power_law(gammas[found], t_min[found])
        log.info("T_min ~ gamma0^%.4f +- %.4f over %d points.", slope, halfwidth, found.sum())
    else:
        slope = halfwidth = intercept = math.nan
        log.warning("Only %d of %d couplings have a minimum temperature; no fit.", found.sum(), len(gammas))
    order = np.argsort(gammas[found])
    if np.any(np.diff(t_min[found][order]) < 0):
        log.warning("T_min is not nondecreasing in gamma0 over the scanned range.")
    return TminResult(gammas, t_min, outcomes, slope, halfwidth, intercept)


@dataclass(frozen=True, eq=False)
class HeatRateTable:
    """Cooling rates tabulated on a temperature grid and interpolated with PCHIP in
    :math:`\\log T` (values outside of the grid are clamped to its ends)."""

    rates: Tuple[CoolingRates, ...]

    def __post_init__(self):
        temperatures = np.array([r.temperature for r in self.rates])
        if np.any(temperatures <= 0) or np.any(np.diff(temperatures) <= 0):
            raise ValueError("Tabulated temperatures must be positive and increasing.")
        x = np.log(temperatures)
        interpolants = {
            name: PchipInterpolator(x, [getattr(r, name) for r in self.rates])
            for name in ("drive_freq", "rp", "rh", "nrh")
        }
        object.__setattr__(self, "_interpolants", interpolants)
        object.__setattr__(self, "_range", (x[0], x[-1]))

    @classmethod
    def build(
        cls,
        setup: CoolingSetup,
        protocol: CoolingProtocol,
        lower: float,
        upper: float,
        points: int = 32,
        progress: bool = False,
    ) -> "HeatRateTable":
        "Evaluate the setup on ``points`` log-spaced temperatures in ``[lower, upper]``."
        temperatures = np.geomspace(lower, upper, points)
        rates = tuple(
            setup.rates(t, protocol.drive_for(t))
            for t in tqdm(temperatures, desc="heat-rate table", disable=not progress)
        )
        return cls(rates)

    @property
    def temperatures(self) -> np.ndarray:
        return np.array([r.temperature for r in self.rates])

    def __call__(self, temperature: float) -> CoolingRates:
        x = float(np.clip(math.log(temperature), *self._range))
        values = {name: float(f(x)) for name, f in self._interpolants.items()}
        return CoolingRates(temperature, **values)


@dataclass(frozen=True)
class CoolingTrajectory:
    "Samples of a cooling trajectory at the integrator's steps."

    times: np.ndarray
    temperatures: np.ndarray
    drive_freqs: np.ndarray
    rp: np.ndarray
    nrh: np.ndarray
    total: np.ndarray
    #: Samples where :math:`|dT/dt|` is not small against :math:`\omega_d T`.
    quasi_static_violations: np.ndarray
    termination: str  #: ``"floor"``, ``"stationary"`` or ``"t_max"``.

    @property
    def final_temperature(self) -> float:
        return float(self.temperatures[-1])

    @property
    def reached_floor(self) -> bool:
        return self.termination == "floor"


def _event(f: Callable, direction: float) -> Callable:
    f.terminal = True
    f.direction = direction
    return f


def integrate_trajectory(
    protocol: CoolingProtocol,
    setup: CoolingSetup,
    t_start: float,
    table: Optional[HeatRateTable] = None,
    exact: bool = False,
    progress: bool = False,
) -> CoolingTrajectory:
    """Integrate the reservoir temperature from ``t_start`` until it reaches the floor,
    becomes stationary, or the protocol's ``t_max`` passes.

    The rates come from ``table`` (built on ``[floor, t_start]`` when not given), or
    from the full pipeline at every step with ``exact``. The ODE is integrated for
    :math:`\\log T`.

    Raises:
        StepSizeError: if the integrator's step size collapses.
    """
    if not t_start > protocol.floor:
        raise ValueError(f"t_start={t_start} must be above the floor {protocol.floor}.")
    if exact:
        rate_at = lambda t: setup.rates(t, protocol.drive_for(t))
    else:
        if table is None:
            table = HeatRateTable.build(setup, protocol, protocol.floor, t_start, progress=progress)
        rate_at = table

    def log_rate(temperature: float) -> float:
        q = rate_at(temperature).total
        return -q / (protocol.capacity(temperature) * temperature)

    def rhs(_, y):
        return [log_rate(math.exp(y[0]))]

    initial = abs(log_rate(t_start))
    if initial == 0:
        log.info("The reservoir exchanges no heat at T=%.6g; its temperature is constant.", t_start)
        times = np.array([0.0, protocol.t_max])
        rates = rate_at(t_start)
        return CoolingTrajectory(
            times, np.full(2, t_start), np.full(2, rates.drive_freq), np.full(2, rates.rp),
            np.full(2, rates.nrh), np.zeros(2), np.zeros(2, dtype=bool), "stationary",
        )

    floor_event = _event(lambda _, y: y[0] - math.log(protocol.floor), -1)
    stationary_event = _event(
        lambda _, y: abs(log_rate(math.exp(y[0]))) - STATIONARY_FRACTION * initial, -1
    )
    solution = solve_ivp(
        rhs,
        (0.0, protocol.t_max),
        [math.log(t_start)],
        method="LSODA",
        events=[floor_event, stationary_event],
        rtol=1e-8,
        atol=1e-10,
    )
    if solution.status == -1:
        raise StepSizeError(
            f"The cooling trajectory stalled: {solution.message}",
            last_state=(float(solution.t[-1]), math.exp(solution.y[0, -1])),
        )
    if solution.status == 1:
        termination = "floor" if len(solution.t_events[0]) else "stationary"
    else:
        termination = "t_max"

    temperatures = np.exp(solution.y[0])
    samples = [rate_at(t) for t in temperatures]
    drive_freqs = np.array([r.drive_freq for r in samples])
    total = np.array([r.total for r in samples])
    slope = np.abs(total / protocol.capacity(temperatures))
    violations = slope > QUASI_STATIC_FRACTION * drive_freqs * temperatures
    if np.any(violations):
        log.warning(
            "%d of %d trajectory samples violate the quasi-static assumption.",
            violations.sum(), len(violations),
        )
    log.info(
        "Trajectory from T=%.6g ended (%s) at t=%.6g, T=%.6g.",
        t_start, termination, solution.t[-1], temperatures[-1],
    )
    return CoolingTrajectory(
        solution.t,
        temperatures,
        drive_freqs,
        np.array([r.rp for r in samples]),
        np.array([r.nrh for r in samples]),
        total,
        violations,
        termination,
    )


if __name__ == "__main__":
    import doctest

    doctest.testmod()
