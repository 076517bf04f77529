"""Transition probabilities between reservoir modes,

.. math:: p^{(k)}_{\\alpha\\beta}(\\omega) = \\frac{\\pi}{2}\\,\\mathrm{Tr}\\left[
    I_\\alpha(|\\omega + k\\omega_d|)\\,A_k(\\omega)\\,I_\\beta(\\omega)\\,
    A_k^\\dagger(\\omega)\\right],

the rate at which the drive scatters a quantum of frequency :math:`\\omega` from
reservoir :math:`\\beta` into a quantum of frequency :math:`|\\omega + k\\omega_d|` of
reservoir :math:`\\alpha`. With diagonal projectors the trace reduces to sums of
:math:`|A_k|^2` over the coupled sites, which is what :func:`transition_weights`
computes.
"""

from typing import Sequence

import numpy as np

from floquetheat.floquet.sidebands import FloquetSolution
from floquetheat.model import ReservoirSpec


def site_masks(reservoirs: Sequence[ReservoirSpec]) -> np.ndarray:
    "Return the 0/1 site masks of the reservoirs, shape ``(m, n)``."
    return np.stack([r.site_projector.diagonal() for r in reservoirs])


def transition_weights(blocks: np.ndarray, masks: np.ndarray) -> np.ndarray:
    """Return :math:`W_{k\\alpha\\beta} = \\sum_{j\\in\\alpha,\\,l\\in\\beta}
    |A_k|^2_{jl}`, shape ``(2 * k_max + 1, m, m)``.

    >>> blocks = np.array([[[1.0, 2.0], [0.0, 1j]]])
    >>> transition_weights(blocks, np.eye(2)).tolist()
    [[[1.0, 4.0], [0.0, 1.0]]]
    """
    return np.einsum("aj,kjl,bl->kab", masks, np.abs(blocks) ** 2, masks)


class TransitionProbability:
    """:math:`p^{(k)}_{\\alpha\\beta}(\\omega)` for every sideband and reservoir pair.

    Calling it at ``omega > 0`` returns an array of shape ``(2 * k_max + 1, m, m)``
    indexed ``[k + k_max, alpha, beta]``. Every entry is non-negative.
    """

    def __init__(self, sol: FloquetSolution, reservoirs: Sequence[ReservoirSpec]):
        self.sol = sol
        self.reservoirs = tuple(reservoirs)
        self.masks = site_masks(self.reservoirs)

    @property
    def sidebands(self) -> np.ndarray:
        return self.sol.sidebands

    def shifted(self, omega: float) -> np.ndarray:
        "Return the sideband frequencies :math:`s_k = \\omega + k\\omega_d`."
        return omega + self.sidebands * self.sol.drive_freq

    def densities(self, omega) -> np.ndarray:
        "Return the scalar densities :math:`i_\\alpha(\\omega)`, shape ``(m, ...)``."
        return np.stack([r.spectral.magnitude(np.abs(omega)) for r in self.reservoirs])

    def __call__(self, omega: float) -> np.ndarray:
        weights = transition_weights(self.sol(omega), self.masks)
        outgoing = self.densities(self.shifted(omega)).T  # (2K+1, m)
        incoming = self.densities(omega)  # (m,)
        return 0.5 * np.pi * outgoing[:, :, None] * weights * incoming[None, None, :]
