"""Heat rates, their decomposition into elementary processes, the heat transfer matrix,
work and entropy production."""

from floquetheat.thermo.heat import (
    HeatIntegrands,
    HeatRateReport,
    ReservoirHeat,
    entropy_production,
    heat_component,
    heat_nrh,
    heat_rates,
    heat_rh,
    heat_rp,
    heat_total_general,
    planck_check,
    work_rate,
)
from floquetheat.thermo.probability import TransitionProbability, transition_weights
from floquetheat.thermo.transfer import (
    TransferMatrix,
    reconstructed_heat,
    transfer_matrix,
    transfer_work_rate,
)

__all__ = [
    "HeatIntegrands",
    "HeatRateReport",
    "ReservoirHeat",
    "entropy_production",
    "heat_component",
    "heat_nrh",
    "heat_rates",
    "heat_rh",
    "heat_rp",
    "heat_total_general",
    "planck_check",
    "work_rate",
    "TransitionProbability",
    "transition_weights",
    "TransferMatrix",
    "reconstructed_heat",
    "transfer_matrix",
    "transfer_work_rate",
]
