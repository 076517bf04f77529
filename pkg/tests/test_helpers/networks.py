"Small networks shared by the tests."

from floquetheat.kernels.damping import static_damping
from floquetheat.model import NetworkModel, ReservoirSpec
from floquetheat.spectral import PowerLawCutoff


def ohmic(strength: float = 0.05, cutoff: float = 1.5, sharpness: float = 0.1) -> PowerLawCutoff:
    return PowerLawCutoff(strength=strength, exponent=1.0, cutoff=cutoff, sharpness=sharpness)


def single_oscillator(
    temperatures=(0.5, 0.5),
    strengths=(0.05, 0.03),
    v1: float = 0.05,
    drive_freq: float = 0.45,
):
    """One unit-frequency oscillator (after renormalization) coupled to one ohmic
    reservoir per entry of ``temperatures``, driven by ``2 v1 cos(drive_freq t)``."""
    reservoirs = [
        ReservoirSpec.on_sites([0], 1, ohmic(strength, cutoff=1.5 + 0.3 * i), t, name)
        for i, (strength, t, name) in enumerate(zip(strengths, temperatures, "ab"))
    ]
    v_static = 1.0 + static_damping(reservoirs)
    if v1 == 0:
        model = NetworkModel.undriven([[1.0]], v_static, drive_freq)
    else:
        model = NetworkModel.cosine_drive([[1.0]], v_static, [[v1]], drive_freq)
    return model, reservoirs


def two_site_chain(temperatures=(0.4, 0.2), v1: float = 0.04, drive_freq: float = 0.5):
    "Two coupled oscillators with a reservoir at each end."
    reservoirs = [
        ReservoirSpec.on_sites([0], 2, ohmic(0.04), temperatures[0], "left"),
        ReservoirSpec.on_sites([1], 2, ohmic(0.02, cutoff=1.8), temperatures[1], "right"),
    ]
    mass = [[1.0, 0.0], [0.0, 1.0]]
    v_static = [[1.3, -0.2], [-0.2, 2.0]]
    v1 = [[v1, 0.0], [0.0, 0.5 * v1]]
    return NetworkModel.cosine_drive(mass, v_static, v1, drive_freq), reservoirs
