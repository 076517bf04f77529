"""Closed-form heat rates for weak coupling and weak driving.

For small coupling the undriven Green function is a sum over the normal modes of the
closed network,

.. math:: \\hat g(i\\omega) \\approx \\sum_a \\frac{q_a q_a^T}{\\Omega_a^2 - (\\omega - i\\Gamma_a)^2},

and, for a single-harmonic drive :math:`V(t) = V_0 + 2V_1\\cos(\\omega_d t)` below the
lowest mode, the resonant heat rate of a reservoir reduces to a few evaluations of the
spectral densities at :math:`\\Omega_0` and :math:`\\Omega_0 - \\omega_d`. Only the lowest
mode contributes to these closed forms.

Matrix elements in a mode are written with a superscript: :math:`X^0 = q_0^T X q_0` and
:math:`I^0_\\alpha(\\omega) = i_\\alpha(\\omega)\\,q_0^T P_\\alpha q_0`.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from floquetheat.errors import (
    DegeneracyError,
    DomainError,
    OutOfRegimeError,
    UnsupportedConfigurationError,
)
from floquetheat.floquet.green import UndrivenGreen
from floquetheat.kernels.noise import occupation as occupation_factor
from floquetheat.model import NetworkModel, ReservoirSpec, label

log = logging.getLogger(__name__)

#: Adjacent modes closer than this many widths count as degenerate.
DEGENERACY_WIDTHS = 10.0
#: Widths above this fraction of the mode frequency are flagged.
WIDTH_WARNING = 0.1


@dataclass(frozen=True, eq=False)
class NormalModeBasis:
    """Normal modes of :math:`(M, V_R)` with their measured resonance widths.

    The modes are the columns of :attr:`modes`, normalized so that
    :math:`q_a^T M q_b = \\delta_{ab}`."""

    frequencies: np.ndarray  #: Ascending :math:`\Omega_a` of the closed network.
    modes: np.ndarray
    widths: np.ndarray  #: Half-widths :math:`\Gamma_a` at half maximum.
    peaks: np.ndarray  #: Dressed peak frequencies of :math:`|q_a^T\hat g q_a|^2`.
    reservoirs: Tuple[ReservoirSpec, ...] = ()

    @property
    def n_modes(self) -> int:
        return len(self.frequencies)

    def element(self, matrix: np.ndarray, mode: int = 0) -> complex:
        "Return the matrix element :math:`q_a^T X q_a`."
        q = self.modes[:, mode]
        value = q @ np.asarray(matrix) @ q
        return complex(value) if np.iscomplexobj(value) else float(value)

    def density(self, alpha: int, omega, mode: int = 0) -> np.ndarray:
        "Return :math:`I^a_\\alpha(\\omega) = i_\\alpha(\\omega)\\,q_a^T P_\\alpha q_a`."
        r = self.reservoirs[alpha]
        return r.spectral(omega) * self.element(r.site_projector, mode)


def normal_modes(
    model: NetworkModel,
    reservoirs: Sequence[ReservoirSpec],
    green: Optional[UndrivenGreen] = None,
) -> NormalModeBasis:
    """Diagonalize :math:`(V_R, M)` and measure every mode's resonance.

    Raises:
        DegeneracyError: if two adjacent frequencies coincide or are closer than
            :data:`DEGENERACY_WIDTHS` times the largest width.
    """
    if green is None:
        green = UndrivenGreen(model, reservoirs)
    frequencies, modes = green.normal_modes()
    gaps = np.diff(frequencies)
    scale = max(float(np.max(frequencies, initial=0.0)), 1.0)
    if np.any(gaps <= 1e-12 * scale):
        a = int(np.argmin(gaps))
        raise DegeneracyError(
            f"Normal frequencies {frequencies[a]:.8g} and {frequencies[a + 1]:.8g} are degenerate."
        )
    resonances = green.resonances()
    widths = np.array([r.width for r in resonances])
    peaks = np.array([r.center for r in resonances])
    if len(gaps) and np.any(gaps < DEGENERACY_WIDTHS * widths.max()):
        a = int(np.argmin(gaps))
        raise DegeneracyError(
            f"Modes {a} and {a + 1} are {gaps[a]:.3e} apart, less than "
            f"{DEGENERACY_WIDTHS:g} widths ({widths.max():.3e})."
        )
    for a, (omega, width) in enumerate(zip(frequencies, widths)):
        if width > WIDTH_WARNING * omega:
            log.warning(
                "Mode %d has width %.3e, not small against its frequency %.6g; the "
                "weak-coupling forms are unreliable.", a, width, omega,
            )
    return NormalModeBasis(frequencies, modes, widths, peaks, tuple(reservoirs))


def weak_green(basis: NormalModeBasis, omega) -> np.ndarray:
    "Return the mode expansion of :math:`\\hat g(i\\omega)`, shape ``(*omega.shape, n, n)``."
    omega = np.asarray(omega, dtype=float)[..., None]
    denominators = basis.peaks**2 - (omega - 1j * basis.widths) ** 2
    return np.einsum("...a,ia,ja->...ij", 1.0 / denominators, basis.modes, basis.modes)


def _require_two_reservoirs(basis: NormalModeBasis):
    if len(basis.reservoirs) != 2:
        raise UnsupportedConfigurationError(
            f"The closed forms need exactly two reservoirs, got {len(basis.reservoirs)}."
        )


def _lowest(basis: NormalModeBasis, drive_freq: float) -> Tuple[float, float]:
    omega0, width0 = float(basis.peaks[0]), float(basis.widths[0])
    if not 0 < drive_freq < omega0:
        raise UnsupportedConfigurationError(
            f"The closed forms need 0 < omega_d < Omega_0 = {omega0:.6g}, got {drive_freq:.6g}."
        )
    if not width0 > 0:
        raise UnsupportedConfigurationError("The lowest mode is not damped by any reservoir.")
    return omega0, width0


def resonant_transition_integral(
    a: int,
    b: int,
    basis: NormalModeBasis,
    v1: np.ndarray,
    drive_freq: float,
    temperature: float,
    occupation: str = "planck",
) -> float:
    """Return the Lorentzian approximation of :math:`\\int p^{(1)}_{ab}(\\omega)
    N_b(\\omega)\\,d\\omega`: a quantum of reservoir ``b`` at :math:`\\Omega_0-\\omega_d`
    is lifted by the drive into reservoir ``a`` at :math:`\\Omega_0`,

    .. math:: \\frac{\\pi^2}{8}\\frac{I^0_a(\\Omega_0)\\,I^0_b(\\Omega_0-\\omega_d)\\,
        |V_1^0|^2\\,N_b(\\Omega_0-\\omega_d)}{\\Omega_0^2\\,\\Gamma_0\\,
        (\\Omega_0^2-(\\Omega_0-\\omega_d)^2)^2}.
    """
    omega0, width0 = _lowest(basis, drive_freq)
    lower = omega0 - drive_freq
    v10 = abs(basis.element(v1))
    n = float(occupation_factor(lower, temperature, occupation))
    numerator = float(basis.density(a, omega0) * basis.density(b, lower)) * v10**2 * n
    return math.pi**2 / 8 * numerator / (omega0**2 * width0 * (omega0**2 - lower**2) ** 2)


def _bracket(alpha: int, basis: NormalModeBasis, drive_freq: float) -> float:
    omega0, _ = _lowest(basis, drive_freq)
    beta = 1 - alpha
    lower = omega0 - drive_freq
    i = lambda x, w: float(basis.density(x, w))
    return (
        lower * i(beta, omega0) * i(alpha, lower)
        - omega0 * i(alpha, omega0) * i(beta, lower)
        - drive_freq * i(alpha, omega0) * i(alpha, lower)
    )


def cooling_criterion(alpha: int, basis: NormalModeBasis, drive_freq: float) -> int:
    """Return the sign of the bracket of :func:`resonant_heat_closed_form`: +1 when the
    drive extracts heat from reservoir ``alpha``, -1 when it heats it."""
    _require_two_reservoirs(basis)
    return int(np.sign(_bracket(alpha, basis, drive_freq)))


def resonant_heat_closed_form(
    alpha: int,
    basis: NormalModeBasis,
    v1: np.ndarray,
    drive_freq: float,
    temperature: float,
    occupation: str = "planck",
) -> float:
    """Return the resonant (pumping plus heating) heat rate of reservoir ``alpha`` when
    both reservoirs are at ``temperature``,

    .. math:: \\frac{\\pi^2}{8}\\frac{N(\\Omega_0-\\omega_d)\\,|V_1^0|^2}{\\Gamma_0\\Omega_0^2
        (\\Omega_0^2-(\\Omega_0-\\omega_d)^2)^2}\\Big[(\\Omega_0-\\omega_d)I^0_\\beta(\\Omega_0)
        I^0_\\alpha(\\Omega_0-\\omega_d) - \\Omega_0 I^0_\\alpha(\\Omega_0)
        I^0_\\beta(\\Omega_0-\\omega_d) - \\omega_d I^0_\\alpha(\\Omega_0)
        I^0_\\alpha(\\Omega_0-\\omega_d)\\Big].

    Spectrally equivalent reservoirs make the bracket negative; a reservoir ``alpha``
    whose density vanishes at :math:`\\Omega_0` makes it positive, so ``alpha`` is cooled.

    Raises:
        UnsupportedConfigurationError: unless there are exactly two reservoirs and
            :math:`0 < \\omega_d < \\Omega_0`.
    """
    _require_two_reservoirs(basis)
    if temperature < 0:
        raise DomainError(f"Temperatures must be >= 0, got {temperature}.")
    beta = 1 - alpha
    omega0, _ = _lowest(basis, drive_freq)
    rate = lambda a, b: resonant_transition_integral(
        a, b, basis, v1, drive_freq, temperature, occupation
    )
    value = (
        (omega0 - drive_freq) * rate(beta, alpha)
        - omega0 * rate(alpha, beta)
        - drive_freq * rate(alpha, alpha)
    )
    log.debug(
        "Closed-form resonant heat of %s at omega_d=%.6g, T=%.4g: %.6e.",
        label(basis.reservoirs[alpha], alpha), drive_freq, temperature, value,
    )
    return value


def adaptive_heat(
    alpha: int,
    basis: NormalModeBasis,
    v1: np.ndarray,
    temperature: float,
    occupation: str = "boltzmann",
) -> float:
    """Return the resonant heat rate of reservoir ``alpha`` under the adaptive drive
    :math:`\\omega_d = \\Omega_0 - T` for :math:`T \\ll \\Omega_0`,

    .. math:: \\frac{\\pi^2}{8e}\\frac{|V_1^0|^2}{\\Omega_0^6}\\,T\\,I^0_\\alpha(T)
        \\frac{\\sum_{\\beta\\neq\\alpha}I^0_\\beta(\\Omega_0)}{\\Gamma_0}.

    The factor :math:`e^{-1}` is the Boltzmann occupation at :math:`\\omega = T`;
    ``occupation="planck"`` uses :math:`1/(e-1)` instead.

    Raises:
        OutOfRegimeError: if ``temperature >= Omega_0 / 2``.
    """
    if temperature < 0:
        raise DomainError(f"Temperatures must be >= 0, got {temperature}.")
    omega0, width0 = float(basis.peaks[0]), float(basis.widths[0])
    if temperature >= omega0 / 2:
        raise OutOfRegimeError(
            f"The adaptive form needs T << Omega_0; T={temperature:.4g} is not below "
            f"Omega_0/2={omega0 / 2:.4g}."
        )
    if temperature == 0:
        return 0.0
    v10 = abs(basis.element(v1))
    others = sum(
        float(basis.density(beta, omega0)) for beta in range(len(basis.reservoirs)) if beta != alpha
    )
    n = float(occupation_factor(temperature, temperature, occupation))
    cold = float(basis.density(alpha, temperature))
    return math.pi**2 / 8 * n * v10**2 / omega0**6 * temperature * cold * others / width0
