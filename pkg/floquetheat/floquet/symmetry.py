"""Numerical checks of the exact symmetries of the sideband amplitudes.

With :math:`A^r_k` the amplitudes of the time-reversed drive :math:`V(-t)`:

- (a) :math:`A^r_k(\\omega, \\omega_d) = A_{-k}(\\omega, -\\omega_d)`,
- (b) :math:`A^r_k(\\omega) = A_{-k}^T(\\omega + k\\omega_d)`,
- (c) :math:`A_k^*(\\omega) = A_{-k}(-\\omega)`.

(a) and (c) also hold exactly for the truncated system. (b) maps the truncation window
of one frequency onto a shifted one, so it is checked only for ``|k| <= k_max // 2``
where the truncation error is negligible.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from floquetheat.errors import GridMismatchError
from floquetheat.floquet.sidebands import FloquetSolution

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SymmetryReport:
    "Maximum violations of the three relations, relative to :math:`\\max\\|A_0\\|`."

    reversal: float  #: Relation (a).
    transpose: float  #: Relation (b).
    conjugation: float  #: Relation (c).

    @property
    def max_violation(self) -> float:
        return max(self.reversal, self.transpose, self.conjugation)

    def passed(self, tol: float = 1e-8) -> bool:
        return self.max_violation < tol


def _violation(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b), initial=0.0))


def check_symmetries(
    sol: FloquetSolution,
    sol_reversed: FloquetSolution,
    omegas: Optional[Sequence[float]] = None,
) -> SymmetryReport:
    """Check relations (a)-(c) on a frequency grid.

    Relation (b) is compared only for ``|k| <= k_max // 2``: the shifted frequency sees
    a different truncation window, so the outer sidebands differ by truncation error.

    Args:
        sol: The solution for the drive :math:`V(t)`.
        sol_reversed: The solution for :math:`V(-t)` (``sol`` itself for a
            time-reversal invariant drive).
        omegas: The grid. By default both solutions' solved grids are used, and they
            must coincide.

    Raises:
        GridMismatchError: if the two solutions were solved on different grids, or no
            grid is available.
    """
    if omegas is None:
        omegas, other = sol.omegas, sol_reversed.omegas
        if omegas.shape != other.shape or np.any(omegas != other):
            raise GridMismatchError(
                f"The solutions were solved on different grids ({len(omegas)} and "
                f"{len(other)} frequencies); pass an explicit grid or solve both on the "
                "same one."
            )
    omegas = [float(w) for w in omegas]
    if not omegas:
        raise GridMismatchError("No frequencies to check the symmetries on.")
    if sol.k_max != sol_reversed.k_max:
        raise GridMismatchError(
            f"The solutions use different truncations ({sol.k_max} and {sol_reversed.k_max})."
        )

    negated = sol.with_drive_freq(-sol.drive_freq)
    scale = max(np.max(np.abs(sol.at(w)[0])) for w in omegas)
    k_max = sol.k_max
    reversal = transpose = conjugation = 0.0
    for omega in omegas:
        here, reversed_here = sol.at(omega), sol_reversed.at(omega)
        mirrored, negated_here = sol.at(-omega), negated.at(omega)
        for k in range(-k_max, k_max + 1):
            reversal = max(reversal, _violation(reversed_here[k], negated_here[-k]))
            conjugation = max(conjugation, _violation(here[k].conj(), mirrored[-k]))
            if abs(k) <= k_max // 2:
                shifted = sol.at(omega + k * sol.drive_freq)
                transpose = max(transpose, _violation(reversed_here[k], shifted[-k].T))
    report = SymmetryReport(reversal / scale, transpose / scale, conjugation / scale)
    log.debug("Symmetry violations: %s", report)
    return report
