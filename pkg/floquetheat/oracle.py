"""A brute-force time-domain check of the Floquet heat rates.

Every reservoir is replaced by ``N`` explicit oscillators (unit mass) on a uniform
frequency grid, coupled bilinearly to its sites, and the covariance of the whole closed
system is propagated in time. Its phase-space vector
:math:`z = (x, X, p, \\Pi)` (system and bath positions, then momenta) obeys
:math:`\\dot z = A(t) z` with

.. math:: A(t) = \\begin{pmatrix} 0 & \\mathbb{M}^{-1} \\\\ -K(t) & 0 \\end{pmatrix},
    \\qquad K(t) = \\begin{pmatrix} V(t) & C \\\\ C^T & \\mathrm{diag}(\\omega_j^2)\\end{pmatrix},

so a covariance evolves as :math:`\\sigma \\mapsto \\Phi\\sigma\\Phi^T`. The one-period
propagator :math:`\\Phi` is built from fourth-order Magnus steps, each the exponential of
a Hamiltonian generator and hence symplectic.

Couplings follow the midpoint rule :math:`C_j^2 = \\omega_j I(\\omega_j)\\Delta\\omega`, which
reproduces both :math:`\\gamma(0) = \\int I/\\omega` and the dissipative part
:math:`\\frac{\\pi}{2}I(\\omega)` as the grid is refined. A finite bath returns its energy
after the recurrence time :math:`2\\pi/\\Delta\\omega`, so the whole simulation must end
before it: the coupling has to be strong enough for the network to relax well within
that horizon (at ``gamma ~ 1e-3`` the relaxation time is far beyond the recurrence time
of a few hundred modes).
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import block_diag, eigh, expm

from floquetheat.errors import OracleError
from floquetheat.floquet.sidebands import FloquetSolution
from floquetheat.kernels.damping import static_damping
from floquetheat.kernels.noise import coth_factor
from floquetheat.kernels.quadrature import QuadratureSpec
from floquetheat.model import NetworkModel, ReservoirSpec, label
from floquetheat.thermo.heat import heat_component

log = logging.getLogger(__name__)

#: Relative change of the system covariance over the last period that still counts as
#: periodic.
PERIODICITY_TOL = 1e-3
#: Relative tolerance of the identity between system-side and bath-side heat rates.
IDENTITY_RTOL = 0.05
IDENTITY_ATOL = 1e-8
#: The covariance trace may grow by this factor before the run counts as unstable.
BLOW_UP = 1e8


@dataclass(frozen=True, eq=False)
class DiscretizedBath:
    "Explicit oscillators replacing one reservoir at one site."

    frequencies: np.ndarray  #: Midpoints :math:`\omega_j` of a uniform grid.
    couplings: np.ndarray  #: :math:`C_j = \sqrt{\omega_j I(\omega_j)\Delta\omega}`.
    site: int
    temperature: float
    name: str = ""  #: The reservoir this bath belongs to.

    @property
    def n_modes(self) -> int:
        return len(self.frequencies)

    @property
    def spacing(self) -> float:
        return 2 * float(self.frequencies[0])

    @property
    def recurrence_time(self) -> float:
        return 2 * math.pi / self.spacing

    @property
    def static_damping(self) -> float:
        "The discrete :math:`\\gamma(0) = \\sum_j C_j^2/\\omega_j^2`."
        return float(np.sum(self.couplings**2 / self.frequencies**2))

    def thermal_blocks(self) -> Tuple[np.ndarray, np.ndarray]:
        """Return the diagonals of the thermal position and momentum covariances,
        :math:`\\coth(\\omega/2T)/2\\omega` and :math:`\\omega\\coth(\\omega/2T)/2`."""
        coth = coth_factor(self.frequencies, self.temperature)
        return coth / (2 * self.frequencies), self.frequencies * coth / 2


def discretize(
    reservoir: ReservoirSpec,
    n_modes: int,
    omega_max: float,
    name: Optional[str] = None,
) -> Tuple[DiscretizedBath, ...]:
    """Replace a reservoir by ``n_modes`` oscillators on ``(0, omega_max)`` for each
    site it couples to.

    Every site gets its own independent set of modes, so the induced spectral density
    stays diagonal like the reservoir's projector.

    >>> from floquetheat.spectral import PowerLawCutoff
    >>> density = PowerLawCutoff(strength=0.1, exponent=1, cutoff=1.2, sharpness=0.1)
    >>> (bath,) = discretize(ReservoirSpec.on_sites([0], 1, density, 0.5), 300, 3.0)
    >>> bath.n_modes, round(bath.spacing, 12)
    (300, 0.01)
    """
    if n_modes < 1 or not omega_max > 0:
        raise ValueError(f"Need n_modes >= 1 and omega_max > 0, got {n_modes} and {omega_max}.")
    spacing = omega_max / n_modes
    frequencies = (np.arange(n_modes) + 0.5) * spacing
    couplings = np.sqrt(frequencies * reservoir.spectral(frequencies) * spacing)
    name = reservoir.name if name is None else name
    return tuple(
        DiscretizedBath(frequencies, couplings, site, reservoir.temperature, name)
        for site in reservoir.sites
    )


@dataclass(frozen=True, eq=False)
class FullCovarianceState:
    "The covariance of the phase-space vector :math:`(x, X, p, \\Pi)` at one time."

    covariance: np.ndarray
    time: float

    @property
    def dimension(self) -> int:
        "The number of degrees of freedom (system plus bath modes)."
        return self.covariance.shape[0] // 2

    def system_block(self, n_sites: int) -> np.ndarray:
        "Return the ``2n x 2n`` covariance of :math:`(x, p)`."
        d = self.dimension
        index = np.r_[0:n_sites, d : d + n_sites]
        return self.covariance[np.ix_(index, index)]


class _Network:
    "The generator :math:`A(t)` of the closed system and its initial state."

    def __init__(
        self,
        model: NetworkModel,
        baths: Sequence[DiscretizedBath],
        counterterm: Optional[np.ndarray] = None,
    ):
        n = model.n_sites
        self.model = model
        self.baths = tuple(baths)
        self.n = n
        self.n_bath = sum(b.n_modes for b in self.baths)
        self.dimension = n + self.n_bath
        self.couplings = np.zeros((n, self.n_bath))
        self.columns: Dict[str, List[int]] = {}
        start = 0
        discrete = np.zeros((n, n))
        for bath in self.baths:
            cols = list(range(start, start + bath.n_modes))
            self.couplings[bath.site, cols] = bath.couplings
            self.columns.setdefault(bath.name, []).extend(cols)
            discrete[bath.site, bath.site] += bath.static_damping
            start += bath.n_modes
        if counterterm is None:
            counterterm = discrete
        # The bare potential of the model contains the continuum counterterm; swap it
        # for the discrete one so that both see the same renormalized network.
        self.correction = discrete - counterterm
        self.renormalized = model.v_static - counterterm
        bath_frequencies = np.concatenate([np.zeros(0)] + [b.frequencies for b in self.baths])
        self.bath_frequencies = bath_frequencies

        d = self.dimension
        self.inverse_mass = block_diag(np.linalg.inv(model.mass), np.eye(self.n_bath))
        stiffness = np.zeros((d, d))
        stiffness[:n, :n] = model.v_static + self.correction
        stiffness[:n, n:] = self.couplings
        stiffness[n:, :n] = self.couplings.T
        stiffness[n:, n:] = np.diag(bath_frequencies**2)
        self.static = np.zeros((2 * d, 2 * d))
        self.static[:d, d:] = self.inverse_mass
        self.static[d:, :d] = -stiffness

    def __call__(self, t: float) -> np.ndarray:
        if not self.model.is_driven:
            return self.static
        a = self.static.copy()
        d, n = self.dimension, self.n
        a[d : d + n, :n] -= self.model.drive_at(t) - self.model.v_static
        return a

    def step(self, t: float, h: float) -> np.ndarray:
        "Return the fourth-order Magnus propagator from ``t`` to ``t + h``."
        offset = math.sqrt(3) / 6
        a1 = self(t + (0.5 - offset) * h)
        a2 = self(t + (0.5 + offset) * h)
        generator = 0.5 * h * (a1 + a2)
        if self.model.is_driven:
            generator += math.sqrt(3) / 12 * h**2 * (a2 @ a1 - a1 @ a2)
        return expm(generator)

    def initial_state(self) -> np.ndarray:
        """Return the product of the system's ground state (for the renormalized
        potential) and thermal bath states."""
        n, d = self.n, self.dimension
        squares, modes = eigh(self.renormalized, self.model.mass)
        if np.any(squares <= 0):
            raise OracleError("The renormalized potential of the discretized network is not positive.", 0.0)
        omegas = np.sqrt(squares)
        xx_bath, pp_bath = np.zeros(0), np.zeros(0)
        if self.baths:
            blocks = [b.thermal_blocks() for b in self.baths]
            xx_bath = np.concatenate([xx for xx, _ in blocks])
            pp_bath = np.concatenate([pp for _, pp in blocks])
        sigma = np.zeros((2 * d, 2 * d))
        sigma[:n, :n] = 0.5 * modes @ np.diag(1 / omegas) @ modes.T
        mass = self.model.mass
        sigma[d : d + n, d : d + n] = 0.5 * mass @ modes @ np.diag(omegas) @ modes.T @ mass
        sigma[n:d, n:d] = np.diag(xx_bath)
        sigma[d + n :, d + n :] = np.diag(pp_bath)
        return sigma


@dataclass(frozen=True, eq=False)
class OracleTrajectory:
    """Samples of the steady state over the measured periods.

    Only the blocks needed for heat rates are kept: the system covariance and the
    cross covariances :math:`\\langle p X^T\\rangle` and :math:`\\langle x \\Pi^T\\rangle`."""

    times: np.ndarray
    system: np.ndarray  #: Shape ``(samples, 2n, 2n)``.
    momentum_bath_position: np.ndarray  #: :math:`\langle p X^T\rangle`, ``(samples, n, N)``.
    position_bath_momentum: np.ndarray  #: :math:`\langle x \Pi^T\rangle`, ``(samples, n, N)``.
    couplings: np.ndarray  #: The ``n x N`` coupling matrix :math:`C`.
    columns: Dict[str, List[int]]  #: Bath columns of each reservoir.
    inverse_mass: np.ndarray
    final_state: FullCovarianceState
    periodicity: float  #: Relative change of the system block over the last period.

    @property
    def reservoir_names(self) -> Tuple[str, ...]:
        return tuple(self.columns)


def simulate(
    model: NetworkModel,
    baths: Sequence[DiscretizedBath],
    burn_in_periods: int = 20,
    periods: int = 1,
    samples_per_period: int = 64,
    counterterm: Optional[np.ndarray] = None,
) -> OracleTrajectory:
    """Propagate the closed system from a product state and sample its last ``periods``
    drive periods.

    Args:
        model: The driven network.
        baths: Its discretized reservoirs.
        burn_in_periods: Periods propagated with the one-period propagator before
            sampling starts.
        periods: Periods sampled at the end.
        samples_per_period: Magnus steps (and samples) per period.
        counterterm: The static damping already included in ``model.v_static``; it is
            replaced by the discrete one. ``None`` uses the model's potential as is.

    Raises:
        OracleError: if the run would outlast a bath's recurrence time or the
            covariance blows up.
    """
    network = _Network(model, baths, counterterm)
    period = model.period
    horizon = (burn_in_periods + periods) * period
    for bath in network.baths:
        if horizon >= bath.recurrence_time:
            raise OracleError(
                f"The simulation horizon {horizon:.6g} reaches the recurrence time "
                f"{bath.recurrence_time:.6g} of bath {bath.name!r}; use more modes.",
                horizon,
            )
    if samples_per_period < 64:
        log.warning("Only %d steps per period; the drive may be under-resolved.", samples_per_period)

    h = period / samples_per_period
    sigma = network.initial_state()
    scale = np.trace(sigma)

    def check(t: float):
        if not np.all(np.isfinite(sigma)) or np.trace(sigma) > BLOW_UP * scale:
            raise OracleError("The covariance blew up; the drive may be parametrically unstable.", t)

    if burn_in_periods:
        monodromy = np.eye(2 * network.dimension)
        for j in range(samples_per_period):
            monodromy = network.step(j * h, h) @ monodromy
        for p in range(burn_in_periods):
            sigma = monodromy @ sigma @ monodromy.T
            sigma = 0.5 * (sigma + sigma.T)
            check((p + 1) * period)
    log.info("Burn-in of %d periods done (dimension %d).", burn_in_periods, network.dimension)

    n, d = network.n, network.dimension
    system_index = np.r_[0:n, d : d + n]
    times, system, p_x, x_p = [], [], [], []
    start = burn_in_periods * period
    last_period_start = None
    for p in range(periods):
        last_period_start = sigma[np.ix_(system_index, system_index)]
        for j in range(samples_per_period):
            t = start + (p * samples_per_period + j) * h
            times.append(t)
            system.append(sigma[np.ix_(system_index, system_index)])
            p_x.append(sigma[d : d + n, n:d])
            x_p.append(sigma[:n, d + n :])
            step = network.step(j * h, h)
            sigma = step @ sigma @ step.T
        sigma = 0.5 * (sigma + sigma.T)
        check(start + (p + 1) * period)

    end = sigma[np.ix_(system_index, system_index)]
    periodicity = float(np.max(np.abs(end - last_period_start)) / np.max(np.abs(end)))
    log.debug("Change of the system covariance over the last period: %.3e.", periodicity)
    return OracleTrajectory(
        np.array(times),
        np.array(system),
        np.array(p_x),
        np.array(x_p),
        network.couplings,
        network.columns,
        network.inverse_mass[:n, :n],
        FullCovarianceState(sigma, start + periods * period),
        periodicity,
    )


@dataclass(frozen=True)
class OracleHeat:
    "The cycle-averaged heat rate of one reservoir, measured on both sides of the coupling."

    name: str
    system_side: float  #: :math:`-\langle p^T M^{-1} C_\alpha X_\alpha\rangle`, into the network.
    bath_side: float  #: :math:`-\langle x^T C_\alpha \Pi_\alpha\rangle`, into the bath.

    @property
    def identity_residual(self) -> float:
        "system_side + bath_side, zero when no energy is stored in the coupling."
        return self.system_side + self.bath_side


def measure_heat(
    trajectory: OracleTrajectory, reservoir: Union[str, int], check: bool = True
) -> OracleHeat:
    """Average the heat rate of a reservoir over the sampled periods.

    Raises:
        OracleError: with ``check``, if the trajectory is not periodic or the system-side
            and bath-side rates disagree.
    """
    names = trajectory.reservoir_names
    name = names[reservoir] if isinstance(reservoir, int) else reservoir
    cols = trajectory.columns[name]
    c = trajectory.couplings[:, cols]
    p_x = trajectory.momentum_bath_position[:, :, cols]
    x_p = trajectory.position_bath_momentum[:, :, cols]
    system_side = -float(np.mean(np.einsum("ij,sjk,ik->s", trajectory.inverse_mass, p_x, c)))
    bath_side = -float(np.mean(np.einsum("sik,ik->s", x_p, c)))
    heat = OracleHeat(name, system_side, bath_side)
    if check:
        if trajectory.periodicity > PERIODICITY_TOL:
            raise OracleError(
                f"The trajectory is not periodic yet (relative change {trajectory.periodicity:.3e} "
                "over the last period); increase the burn-in.",
                float(trajectory.times[-1]),
            )
        bound = IDENTITY_RTOL * max(abs(system_side), abs(bath_side)) + IDENTITY_ATOL
        if abs(heat.identity_residual) > bound:
            raise OracleError(
                f"Heat into the network ({system_side:.6e}) and out of bath {name!r} "
                f"({bath_side:.6e}) do not balance.",
                float(trajectory.times[-1]),
            )
    return heat


@dataclass(frozen=True)
class OracleComparison:
    "Per-reservoir heat rates of the time-domain oracle and of the Floquet pipeline."

    names: Tuple[str, ...]
    oracle: np.ndarray
    bath_side: np.ndarray
    floquet: np.ndarray

    @property
    def relative(self) -> np.ndarray:
        scale = np.maximum(np.abs(self.floquet), IDENTITY_ATOL)
        return np.abs(self.oracle - self.floquet) / scale

    @property
    def max_relative(self) -> float:
        return float(np.max(self.relative))


def compare_with_floquet(
    model: NetworkModel,
    reservoirs: Sequence[ReservoirSpec],
    n_modes: int = 200,
    omega_max: float = 3.0,
    burn_in_periods: int = 20,
    periods: int = 1,
    samples_per_period: int = 64,
    k_max: Optional[int] = None,
    spec: Optional[QuadratureSpec] = None,
) -> OracleComparison:
    "Measure every reservoir's heat rate with the oracle and with the Floquet pipeline."
    reservoirs = tuple(reservoirs)
    names = tuple(label(r, i) for i, r in enumerate(reservoirs))
    baths = [
        bath
        for name, r in zip(names, reservoirs)
        for bath in discretize(r, n_modes, omega_max, name)
    ]
    trajectory = simulate(
        model, baths, burn_in_periods, periods, samples_per_period, static_damping(reservoirs)
    )
    heats = [measure_heat(trajectory, name) for name in names]
    sol = FloquetSolution(model, reservoirs, k_max)
    floquet, _ = heat_component("total", sol, reservoirs, spec)
    comparison = OracleComparison(
        names,
        np.array([h.system_side for h in heats]),
        np.array([h.bath_side for h in heats]),
        np.asarray(floquet, dtype=float),
    )
    for name, o, f in zip(names, comparison.oracle, comparison.floquet):
        log.info("Reservoir %s: oracle %.6e, Floquet %.6e.", name, o, f)
    return comparison


if __name__ == "__main__":
    import doctest

    doctest.testmod()
