"""The heat transfer matrix.

Every heat rate can be written as :math:`\\dot Q_\\alpha = \\sum_\\beta \\int_0^\\infty
Q_{\\alpha\\beta}(\\omega)\\coth(\\omega/2T_\\beta)\\,d\\omega`, with off-diagonal entries

.. math:: Q_{\\alpha\\beta}(\\omega) = -\\frac12\\sum_k |s_k|\\,p^{(k)}_{\\alpha\\beta}(\\omega),

and the sum over the first index
:math:`\\tilde Q_\\beta = \\sum_\\alpha Q_{\\alpha\\beta}
= -\\frac12\\sum_k k\\omega_d\\,\\mathrm{sgn}(s_k)\\sum_\\alpha p^{(k)}_{\\alpha\\beta}`,
which fixes the diagonal. :math:`\\tilde Q` vanishes without drive, and the work rate
is :math:`\\dot W = -\\sum_\\beta\\int\\tilde Q_\\beta\\coth(\\omega/2T_\\beta)`.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from floquetheat.floquet.sidebands import FloquetSolution
from floquetheat.kernels.noise import coth_factor
from floquetheat.kernels.quadrature import QuadratureSpec, integrate
from floquetheat.model import ReservoirSpec
from floquetheat.thermo.heat import quadrature_setup
from floquetheat.thermo.probability import TransitionProbability


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    "The heat transfer matrix :math:`Q_{\\alpha\\beta}(\\omega)` at one frequency."

    omega: float
    matrix: np.ndarray  #: :math:`Q_{\\alpha\\beta}`, diagonal included.
    marginals: np.ndarray  #: :math:`\\tilde Q_\\beta`, the column sums of the matrix.


def transfer_matrix(
    sol: FloquetSolution,
    reservoirs: Sequence[ReservoirSpec],
    omega: float,
    probability: Optional[TransitionProbability] = None,
) -> TransferMatrix:
    "Return :math:`Q_{\\alpha\\beta}(\\omega)` and :math:`\\tilde Q_\\beta(\\omega)`."
    probability = probability or TransitionProbability(sol, reservoirs)
    p = probability(omega)
    s = probability.shifted(omega)
    matrix = -0.5 * np.einsum("k,kab->ab", np.abs(s), p)
    gains = sol.sidebands * sol.drive_freq * np.sign(s)
    marginals = -0.5 * np.einsum("k,kab->b", gains, p)
    off_diagonal_sums = matrix.sum(axis=0) - np.diagonal(matrix)
    np.fill_diagonal(matrix, marginals - off_diagonal_sums)
    return TransferMatrix(float(omega), matrix, marginals)


def _coth(reservoirs: Sequence[ReservoirSpec], omega: float) -> np.ndarray:
    return np.array([coth_factor(omega, r.temperature) for r in reservoirs])


def reconstructed_heat(
    sol: FloquetSolution,
    reservoirs: Sequence[ReservoirSpec],
    spec: Optional[QuadratureSpec] = None,
) -> np.ndarray:
    """Return the heat rates rebuilt from the transfer matrix,
    :math:`\\dot Q_\\alpha = \\sum_\\beta\\int Q_{\\alpha\\beta}\\coth_\\beta`."""
    reservoirs = tuple(reservoirs)
    probability = TransitionProbability(sol, reservoirs)
    spec, top, points = quadrature_setup(sol, reservoirs, spec)

    def integrand(omega):
        q = transfer_matrix(sol, reservoirs, omega, probability).matrix
        return q @ _coth(reservoirs, omega)

    return np.atleast_1d(integrate(integrand, 0.0, top, spec, points, term=("transfer",)))


def transfer_work_rate(
    sol: FloquetSolution,
    reservoirs: Sequence[ReservoirSpec],
    spec: Optional[QuadratureSpec] = None,
) -> float:
    "Return :math:`\\dot W = -\\sum_\\beta\\int\\tilde Q_\\beta\\coth_\\beta`."
    reservoirs = tuple(reservoirs)
    probability = TransitionProbability(sol, reservoirs)
    spec, top, points = quadrature_setup(sol, reservoirs, spec)

    def integrand(omega):
        marginals = transfer_matrix(sol, reservoirs, omega, probability).marginals
        return -float(marginals @ _coth(reservoirs, omega))

    return float(integrate(integrand, 0.0, top, spec, points, term=("work",)))
