"""The Green function of the undriven network,

.. math:: \\hat g(i\\omega) = \\left(-M\\omega^2 + V_R + i\\omega\\hat\\gamma(i\\omega)\\right)^{-1},

where :math:`V_R = V_0 - \\gamma(0)` is the static potential renormalized by the
reservoirs. Its resonances (the dressed normal frequencies and their half-widths) are
what every frequency integral downstream has to resolve.
"""

import logging
from typing import Sequence, Tuple

import numpy as np
from scipy.linalg import eigh
from scipy.optimize import brentq, minimize_scalar

from floquetheat.kernels.damping import DampingKernel
from floquetheat.kernels.quadrature import PeakHint
from floquetheat.model import NetworkModel, ReservoirSpec

log = logging.getLogger(__name__)

#: Resonances are searched for within this many estimated widths of their centers.
SEARCH_WIDTHS = 10.0
#: The half maximum is bracketed within this many estimated widths.
BRACKET_WIDTHS = 50.0


class UndrivenGreen:
    """:math:`\\hat g(i\\omega)` and its inverse for a model and its reservoirs.

    Only the static part of the model is used; the drive enters through the sideband
    system (:mod:`floquetheat.floquet.sidebands`).

    >>> from floquetheat.spectral import PowerLawCutoff
    >>> density = PowerLawCutoff(strength=0.0, exponent=1, cutoff=1.2, sharpness=0.1)
    >>> bath = ReservoirSpec.on_sites([0], 1, density, temperature=0.0)
    >>> green = UndrivenGreen(NetworkModel.undriven([[1.0]], [[4.0]]), [bath])
    >>> complex(green(1.0)[0, 0])
    (0.3333333333333333+0j)
    """

    def __init__(
        self,
        model: NetworkModel,
        reservoirs: Sequence[ReservoirSpec],
        exact: bool = False,
        method: str = "cauchy",
    ):
        self.mass = model.mass
        self.reservoirs = tuple(reservoirs)
        self.damping = DampingKernel(self.reservoirs, exact=exact, method=method)
        self.renormalized = model.v_static - self.damping.static if self.reservoirs else model.v_static
        self._modes = None
        self._resonances = None

    @property
    def n_sites(self) -> int:
        return self.mass.shape[0]

    def inverse(self, omega) -> np.ndarray:
        "Return :math:`\\hat g(i\\omega)^{-1}`, shape ``(*omega.shape, n, n)``."
        omega = np.asarray(omega, dtype=float)
        w2 = (omega**2)[..., None, None]
        inverse = -self.mass * w2 + self.renormalized
        if self.reservoirs:
            inverse = inverse + self.damping.self_energy(omega)
        return inverse

    def __call__(self, omega) -> np.ndarray:
        return np.linalg.inv(self.inverse(omega))

    def normal_modes(self) -> Tuple[np.ndarray, np.ndarray]:
        """Return the ascending normal frequencies of :math:`(M, V_R)` and the
        M-orthonormal modes as columns."""
        if self._modes is None:
            squares, modes = eigh(self.renormalized, self.mass)
            self._modes = (np.sqrt(np.clip(squares, 0.0, None)), modes)
        return self._modes

    def mode_response(self, omega, mode: np.ndarray) -> np.ndarray:
        "Return :math:`q^T \\hat g(i\\omega) q` for a mode vector ``q``."
        return np.einsum("i,...ij,j->...", mode, self(omega), mode)

    def mode_coupling(self, omega: float, mode: np.ndarray) -> Tuple[float, float]:
        """Return the mode-projected dissipative density :math:`\\sum_\\alpha
        i_\\alpha(\\omega)\\,q^T P_\\alpha q` and principal part at ``omega``."""
        weights = np.array([mode @ r.site_projector @ mode for r in self.reservoirs])
        if not self.reservoirs:
            return 0.0, 0.0
        density = float(weights @ (self.damping.dissipative(omega) * 2 / np.pi))
        principal = float(weights @ self.damping.principal(omega))
        return density, principal

    def resonance(self, index: int) -> PeakHint:
        """Locate the dressed resonance of normal mode ``index``: the peak of
        :math:`|q_a^T\\hat g(i\\omega)q_a|^2` and its half-width at half maximum."""
        frequencies, modes = self.normal_modes()
        omega, mode = float(frequencies[index]), modes[:, index]
        density, principal = self.mode_coupling(omega, mode)
        estimate = np.pi * density / (4 * omega) if omega > 0 else 0.0
        center = omega - principal / 2
        if not estimate > 0:
            return PeakHint(center, 0.0)

        power = lambda w: float(np.abs(self.mode_response(w, mode)) ** 2)
        lo = max(center - SEARCH_WIDTHS * estimate, center / 2)
        found = minimize_scalar(
            lambda w: -power(w),
            bounds=(lo, center + SEARCH_WIDTHS * estimate),
            method="bounded",
            options={"xatol": 1e-6 * estimate},
        )
        peak = float(found.x)
        half = power(peak) / 2
        excess = lambda w: power(w) - half
        left_end = max(peak - BRACKET_WIDTHS * estimate, peak / 2)
        right_end = peak + BRACKET_WIDTHS * estimate
        if excess(left_end) < 0 and excess(right_end) < 0:
            left = brentq(excess, left_end, peak, xtol=1e-6 * estimate)
            right = brentq(excess, peak, right_end, xtol=1e-6 * estimate)
            width = (right - left) / 2
        else:
            log.warning(
                "Could not bracket the half maximum of mode %d at %.6g; using the "
                "analytic width estimate %.3e.", index, peak, estimate,
            )
            width = estimate
        log.debug("Mode %d: peak %.8g, half-width %.3e (estimate %.3e).", index, peak, width, estimate)
        return PeakHint(peak, width)

    def resonances(self) -> Tuple[PeakHint, ...]:
        "Return :meth:`resonance` for every normal mode (measured once, then cached)."
        if self._resonances is None:
            self._resonances = tuple(self.resonance(a) for a in range(self.n_sites))
        return self._resonances


if __name__ == "__main__":
    import doctest

    doctest.testmod()
