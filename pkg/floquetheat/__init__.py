from floquetheat.errors import FloquetHeatError
from floquetheat.floquet.sidebands import FloquetSolution
from floquetheat.model import NetworkModel, ReservoirSpec
from floquetheat.thermo.heat import heat_rates

__all__ = [
    "config",
    "cooling",
    "covariance",
    "errors",
    "floquet",
    "kernels",
    "model",
    "oracle",
    "scan",
    "spectral",
    "thermo",
    "util",
    "weakcoupling",
    "FloquetHeatError",
    "FloquetSolution",
    "NetworkModel",
    "ReservoirSpec",
    "heat_rates",
]
__version__ = "0.1.0"
