"""The asymptotic Floquet response of a driven network: the undriven Green function,
the sideband amplitudes :math:`A_k(\\omega)` and their symmetries."""

from floquetheat.floquet.green import UndrivenGreen
from floquetheat.floquet.sidebands import (
    FloquetSolution,
    SidebandBlocks,
    choose_kmax,
    perturbative_sidebands,
    solve_sidebands,
)
from floquetheat.floquet.symmetry import SymmetryReport, check_symmetries

__all__ = [
    "UndrivenGreen",
    "FloquetSolution",
    "SidebandBlocks",
    "choose_kmax",
    "perturbative_sidebands",
    "solve_sidebands",
    "SymmetryReport",
    "check_symmetries",
]
