"""Thermal occupations and the Fourier transform of the noise kernel.

>>> float(planck(1.0, 0.0))
0.0
>>> bool(abs(planck(2.0, 1.0) - 1 / (np.exp(2.0) - 1)) < 1e-15)
True
"""

from typing import Sequence

import numpy as np

from floquetheat.errors import DomainError
from floquetheat.model import ReservoirSpec

OCCUPATIONS = ("planck", "boltzmann")


def planck(omega, temperature):
    """The Planck distribution :math:`N(\\omega) = 1/(e^{\\omega/T} - 1)`, exactly 0 at
    ``T = 0``.

    Raises:
        DomainError: if any ``omega <= 0`` or ``temperature < 0``.
    """
    omega = np.asarray(omega, dtype=float)
    temperature = np.asarray(temperature, dtype=float)
    if np.any(omega <= 0):
        raise DomainError(f"The Planck distribution needs omega > 0, got {omega}.")
    if np.any(temperature < 0):
        raise DomainError(f"Temperatures must be >= 0, got {temperature}.")
    return occupation(omega, temperature)


def occupation(omega, temperature, kind: str = "planck"):
    """Vectorized occupation factor without domain checks; 0 where ``omega <= 0`` or
    ``T == 0``.

    ``kind="boltzmann"`` gives the low-temperature approximation :math:`e^{-\\omega/T}`.
    """
    omega = np.asarray(omega, dtype=float)
    temperature = np.asarray(temperature, dtype=float)
    positive = (omega > 0) & (temperature > 0)
    x = np.where(positive, omega / np.where(temperature > 0, temperature, 1.0), 1.0)
    with np.errstate(over="ignore"):
        if kind == "planck":
            value = 1.0 / np.expm1(x)
        elif kind == "boltzmann":
            value = np.exp(-x)
        else:
            raise ValueError(f"Unknown occupation {kind!r}, expected one of {OCCUPATIONS}.")
    return np.where(positive, value, 0.0)


def coth_factor(omega, temperature):
    "Return :math:`\\coth(\\omega/2T) = 2N(\\omega) + 1` for ``omega > 0``."
    return 2 * occupation(omega, temperature) + 1


class NoiseKernelFT:
    """The Fourier transform of the noise kernel,
    :math:`\\tilde\\nu(\\omega) = \\sum_\\alpha I_\\alpha(\\omega)\\coth(\\omega/2T_\\alpha)`,
    for ``omega > 0``.

    >>> from floquetheat.spectral import PowerLawCutoff
    >>> density = PowerLawCutoff(strength=0.1, exponent=1, cutoff=1.2, sharpness=0.1)
    >>> bath = ReservoirSpec.on_sites([0], 1, density, temperature=0.0)
    >>> nu = NoiseKernelFT([bath])
    >>> bool(np.allclose(nu(0.7), bath.density(0.7)))
    True
    """

    def __init__(self, reservoirs: Sequence[ReservoirSpec]):
        self.reservoirs = tuple(reservoirs)

    def weights(self, omega) -> np.ndarray:
        "Return the scalar factors :math:`i_\\alpha(\\omega)\\coth(\\omega/2T_\\alpha)`, shape ``(m, ...)``."
        omega = np.asarray(omega, dtype=float)
        return np.stack(
            [r.spectral(omega) * coth_factor(omega, r.temperature) for r in self.reservoirs]
        )

    def term(self, alpha: int, omega) -> np.ndarray:
        "Return the contribution of reservoir ``alpha`` as a matrix."
        r = self.reservoirs[alpha]
        value = r.spectral(omega) * coth_factor(omega, r.temperature)
        return np.multiply.outer(value, r.site_projector)

    def __call__(self, omega) -> np.ndarray:
        return sum(self.term(alpha, omega) for alpha in range(len(self.reservoirs)))


if __name__ == "__main__":
    import doctest

    doctest.testmod()
