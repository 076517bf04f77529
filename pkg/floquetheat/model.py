"""The driven oscillator network and the reservoirs it is coupled to.

A :class:`NetworkModel` describes the system Hamiltonian
:math:`H_S(t) = (P^T M^{-1} P + X^T V(t) X)/2` with a periodic potential

.. math:: V(t) = V_0 + \\sum_{k \\neq 0} V_k e^{i k \\omega_d t},

and a :class:`ReservoirSpec` describes one bosonic reservoir: the sites it couples to,
its spectral density, and its temperature. Natural units are used throughout
(:math:`\\hbar = k_B = 1`, bath oscillators have unit mass) and all frequencies are in
units of :attr:`NetworkModel.reference_frequency`.

Both types are immutable: their arrays are made read-only on construction so that they
can be shared freely between worker processes.

>>> model = NetworkModel.cosine_drive(mass=[[1.0]], v_static=[[1.0]], v1=[[0.25]],
...                                   drive_freq=0.9)
>>> model.harmonics
(-1, 1)
>>> float(model.drive_at(0.0)[0, 0])
1.5
"""

import dataclasses
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from floquetheat.spectral import (
    GappedAtOmega0,
    PowerLawCutoff,
    SpectralDensity,
    evaluate_spectral,
    spectral_from_dict,
    spectral_to_dict,
)


def _frozen(array, dtype=float) -> np.ndarray:
    # Adding zero turns -0.0 into 0.0 so that equal models are bitwise equal.
    array = np.array(array, dtype=dtype) + 0.0
    array.setflags(write=False)
    return array


def _same(a: np.ndarray, b: np.ndarray) -> bool:
    "Bitwise equality of two arrays (so that NaNs compare equal to themselves)."
    return a.shape == b.shape and a.dtype == b.dtype and a.tobytes() == b.tobytes()


@dataclass(frozen=True, eq=False)
class NetworkModel:
    """A network of coupled harmonic oscillators with a periodic potential.

    Missing negative harmonics are filled in as complex conjugates of the positive ones,
    which is what a real :math:`V(t)` requires. Use :meth:`cosine_drive` for the common
    :math:`V(t) = V_0 + 2 V_1 \\cos(\\omega_d t)` protocol."""

    mass: np.ndarray  #: Symmetric positive definite mass matrix :math:`M`.
    v_static: np.ndarray  #: The bare static potential :math:`V_0`.
    #: Fourier coefficients :math:`V_k` of the drive, keyed by ``k != 0``.
    v_fourier: Mapping[int, np.ndarray] = field(default_factory=dict)
    drive_freq: float = 1.0  #: Fundamental drive frequency :math:`\omega_d`.
    #: Set when :math:`V(t) = V(-t)`, i.e. when :math:`V_k = V_{-k}` are all real.
    time_reversal_invariant: bool = False
    reference_frequency: float = 1.0  #: The unit :math:`\Omega_0` of all frequencies.

    def __post_init__(self):
        object.__setattr__(self, "mass", _frozen(self.mass))
        object.__setattr__(self, "v_static", _frozen(self.v_static))
        fourier: Dict[int, np.ndarray] = {}
        for k, v in self.v_fourier.items():
            k = int(k)
            if k == 0:
                raise ValueError(
                    "The k=0 Fourier coefficient is the static potential; pass it as "
                    "v_static instead."
                )
            fourier[k] = _frozen(v, complex)
        for k in list(fourier):
            if -k not in fourier:
                fourier[-k] = _frozen(fourier[k].conj(), complex)
        object.__setattr__(self, "v_fourier", dict(sorted(fourier.items())))
        object.__setattr__(self, "drive_freq", float(self.drive_freq))
        object.__setattr__(
            self, "time_reversal_invariant", bool(self.time_reversal_invariant)
        )
        object.__setattr__(self, "reference_frequency", float(self.reference_frequency))

    @classmethod
    def cosine_drive(
        cls,
        mass,
        v_static,
        v1,
        drive_freq: float,
        reference_frequency: float = 1.0,
    ) -> "NetworkModel":
        "Return the time-reversal invariant model with :math:`V(t)=V_0+2V_1\\cos(\\omega_d t)`."
        v1 = np.asarray(v1, dtype=float)
        return cls(
            mass,
            v_static,
            {1: v1, -1: v1},
            drive_freq,
            time_reversal_invariant=True,
            reference_frequency=reference_frequency,
        )

    @classmethod
    def undriven(cls, mass, v_static, drive_freq: float = 1.0) -> "NetworkModel":
        "Return a model without drive (it is trivially time-reversal invariant)."
        return cls(mass, v_static, {}, drive_freq, time_reversal_invariant=True)

    @property
    def n_sites(self) -> int:
        return self.mass.shape[0]

    @property
    def harmonics(self) -> Tuple[int, ...]:
        "The harmonics ``k`` with a nonzero drive coefficient, in increasing order."
        return tuple(k for k, v in self.v_fourier.items() if np.any(v != 0))

    @property
    def max_harmonic(self) -> int:
        "The largest ``|k|`` among :attr:`harmonics` (0 for an undriven model)."
        return max((abs(k) for k in self.harmonics), default=0)

    @property
    def is_driven(self) -> bool:
        return bool(self.harmonics)

    @property
    def period(self) -> float:
        return 2 * np.pi / abs(self.drive_freq)

    def fourier(self, k: int) -> np.ndarray:
        "Return :math:`V_k` (the static potential for ``k == 0``, zero if absent)."
        if k == 0:
            return self.v_static.astype(complex)
        if k in self.v_fourier:
            return self.v_fourier[k]
        return np.zeros((self.n_sites, self.n_sites), dtype=complex)

    def drive_at(self, t: float) -> np.ndarray:
        "Return the (real) potential :math:`V(t)`."
        v = self.v_static.astype(complex)
        for k, vk in self.v_fourier.items():
            v = v + vk * np.exp(1j * k * self.drive_freq * t)
        return v.real

    def drive_rate_at(self, t: float) -> np.ndarray:
        "Return :math:`\\dot V(t)`."
        v = np.zeros((self.n_sites, self.n_sites), dtype=complex)
        for k, vk in self.v_fourier.items():
            w = k * self.drive_freq
            v = v + 1j * w * vk * np.exp(1j * w * t)
        return v.real

    def time_reversed(self) -> "NetworkModel":
        "Return the model driven by :math:`V(-t)`, i.e. with :math:`V_k \\mapsto V_{-k}`."
        reversed_fourier = {-k: v for k, v in self.v_fourier.items()}
        return dataclasses.replace(self, v_fourier=reversed_fourier)

    def with_drive_freq(self, drive_freq: float) -> "NetworkModel":
        "Return a copy with another drive frequency (negative values are allowed)."
        return dataclasses.replace(self, drive_freq=drive_freq)

    def with_drive_scaled(self, factor: float) -> "NetworkModel":
        "Return a copy with every :math:`V_k`, ``k != 0``, multiplied by ``factor``."
        scaled = {k: factor * v for k, v in self.v_fourier.items()}
        return dataclasses.replace(self, v_fourier=scaled)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NetworkModel):
            return NotImplemented
        return (
            _same(self.mass, other.mass)
            and _same(self.v_static, other.v_static)
            and self.v_fourier.keys() == other.v_fourier.keys()
            and all(_same(v, other.v_fourier[k]) for k, v in self.v_fourier.items())
            and self.drive_freq == other.drive_freq
            and self.time_reversal_invariant == other.time_reversal_invariant
            and self.reference_frequency == other.reference_frequency
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class ReservoirSpec:
    """A bosonic reservoir at temperature :math:`T_\\alpha` coupled to the sites
    selected by the diagonal projector :math:`P_\\alpha`.

    The matrix spectral density seen by the network is
    :math:`I_\\alpha(\\omega) = i_\\alpha(\\omega) P_\\alpha`.

    >>> bath = ReservoirSpec.on_sites([1], n_sites=3, spectral=PowerLawCutoff(
    ...     strength=0.1, exponent=1, cutoff=1.2, sharpness=0.1), temperature=0.5)
    >>> bath.sites
    (1,)
    >>> bath.site_projector.diagonal().tolist()
    [0.0, 1.0, 0.0]
    """

    site_projector: np.ndarray  #: Diagonal 0/1 matrix :math:`P_\alpha`.
    spectral: SpectralDensity  #: The scalar spectral density :math:`i_\alpha`.
    temperature: float  #: :math:`T_\alpha \geq 0`.
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "site_projector", _frozen(self.site_projector))
        object.__setattr__(self, "temperature", float(self.temperature))

    @classmethod
    def on_sites(
        cls,
        sites: Sequence[int],
        n_sites: int,
        spectral: SpectralDensity,
        temperature: float,
        name: str = "",
    ) -> "ReservoirSpec":
        projector = np.zeros((n_sites, n_sites))
        for site in sites:
            projector[site, site] = 1.0
        return cls(projector, spectral, temperature, name)

    @property
    def n_sites(self) -> int:
        return self.site_projector.shape[0]

    @property
    def sites(self) -> Tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.site_projector.diagonal()))

    @property
    def mask(self) -> np.ndarray:
        "Boolean mask of the coupled sites."
        return self.site_projector.diagonal() != 0

    def density(self, omega) -> np.ndarray:
        "Return the matrix spectral density :math:`I_\\alpha(\\omega)` (odd in omega)."
        return evaluate_spectral(self.spectral, omega, self.site_projector)

    def scaled(self, factor: float) -> "ReservoirSpec":
        "Return a copy with the spectral strength multiplied by ``factor``."
        return dataclasses.replace(self, spectral=self.spectral.scaled(factor))

    def with_temperature(self, temperature: float) -> "ReservoirSpec":
        return dataclasses.replace(self, temperature=temperature)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ReservoirSpec):
            return NotImplemented
        return (
            _same(self.site_projector, other.site_projector)
            and self.spectral == other.spectral
            and self.temperature == other.temperature
            and self.name == other.name
        )

    __hash__ = None


def label(reservoir: ReservoirSpec, index: int) -> str:
    "The reservoir's name, or its index when it has none."
    return reservoir.name or str(index)


def scale_coupling(
    reservoirs: Sequence[ReservoirSpec], gamma0: float, reference: float = 1.0
) -> List[ReservoirSpec]:
    """Rescale every reservoir's coupling strength by ``gamma0 / reference``.

    Relative strengths between reservoirs are kept, so with ``reference`` equal to the
    current reference coupling, :math:`\\gamma_\\alpha/\\gamma_0` stays fixed."""
    return [r.scaled(gamma0 / reference) for r in reservoirs]


def with_temperatures(
    reservoirs: Sequence[ReservoirSpec], temperatures
) -> List[ReservoirSpec]:
    "Return the reservoirs with new temperatures (a scalar applies to all of them)."
    temperatures = np.broadcast_to(temperatures, (len(reservoirs),))
    return [r.with_temperature(float(t)) for r, t in zip(reservoirs, temperatures)]


def model_to_dict(model: NetworkModel) -> dict:
    """Return a plain-data (TOML/JSON friendly) description of a model.

    Floats are written as Python floats, so a round-trip through
    :func:`model_from_dict` is bitwise exact."""
    drive = []
    for k, v in model.v_fourier.items():
        entry = {"k": k, "matrix": v.real.tolist()}
        if np.any(v.imag != 0):
            entry["imag"] = v.imag.tolist()
        drive.append(entry)
    return {
        "mass": model.mass.tolist(),
        "v_static": model.v_static.tolist(),
        "drive_freq": model.drive_freq,
        "time_reversal_invariant": model.time_reversal_invariant,
        "reference_frequency": model.reference_frequency,
        "drive": drive,
    }


def model_from_dict(data: Mapping) -> NetworkModel:
    "Inverse of :func:`model_to_dict`."
    fourier = {}
    for entry in data.get("drive", ()):
        v = np.array(entry["matrix"], dtype=complex)
        if entry.get("imag") is not None:
            v = v + 1j * np.array(entry["imag"], dtype=float)
        fourier[int(entry["k"])] = v
    return NetworkModel(
        mass=data["mass"],
        v_static=data["v_static"],
        v_fourier=fourier,
        drive_freq=data["drive_freq"],
        time_reversal_invariant=data.get("time_reversal_invariant", False),
        reference_frequency=data.get("reference_frequency", 1.0),
    )


def reservoirs_to_dict(reservoirs: Sequence[ReservoirSpec]) -> List[dict]:
    return [
        {
            "name": r.name,
            "sites": list(r.sites),
            "n_sites": r.n_sites,
            "temperature": r.temperature,
            "spectral": spectral_to_dict(r.spectral),
        }
        for r in reservoirs
    ]


def reservoirs_from_dict(
    data: Sequence[Mapping], n_sites: Optional[int] = None
) -> List[ReservoirSpec]:
    "Inverse of :func:`reservoirs_to_dict`."
    return [
        ReservoirSpec.on_sites(
            entry["sites"],
            n_sites if n_sites is not None else entry["n_sites"],
            spectral_from_dict(entry["spectral"]),
            entry["temperature"],
            entry.get("name", ""),
        )
        for entry in data
    ]


#: Parameters of the two-bath cooling configuration (in units of the oscillator
#: frequency): cold bath ``alpha`` gapped at the oscillator frequency, hot bath ``beta``
#: with a plain power law.
TWO_BATH_DENSITIES = {
    "alpha": {"relative_strength": 0.7, "cutoff": 0.9, "sharpness": 0.04},
    "beta": {"relative_strength": 1.0, "cutoff": 1.2, "sharpness": 0.1},
}


def two_bath_setup(
    gamma0: float = 1e-3,
    lambda_alpha: float = 1.0,
    lambda_beta: float = 1.0,
    temperature: float = 0.1,
    v1: float = 0.05,
    omega0: float = 1.0,
    drive_freq: Optional[float] = None,
) -> Tuple[NetworkModel, List[ReservoirSpec]]:
    """Build the single-oscillator, two-bath cooling configuration.

    The oscillator has unit mass and its *renormalized* frequency is ``omega0``: the
    static potential includes the counter-term :math:`\\gamma(0) = \\int I/\\omega`. The
    drive is :math:`V(t) = V_0 + 2 V_1 \\cos(\\omega_d t)` with the adaptive choice
    :math:`\\omega_d = \\Omega_0 - T_0` unless ``drive_freq`` is given.

    Reservoir ``alpha`` (index 0) is the one to be cooled; its spectral density vanishes
    at ``omega0`` so that the cooling condition holds exactly.
    """
    from floquetheat.kernels.damping import static_damping_scalar

    a, b = TWO_BATH_DENSITIES["alpha"], TWO_BATH_DENSITIES["beta"]
    alpha_density = GappedAtOmega0(
        strength=a["relative_strength"] * gamma0,
        exponent=lambda_alpha,
        cutoff=a["cutoff"] * omega0,
        sharpness=a["sharpness"] * omega0,
        gap=omega0,
    )
    beta_density = PowerLawCutoff(
        strength=b["relative_strength"] * gamma0,
        exponent=lambda_beta,
        cutoff=b["cutoff"] * omega0,
        sharpness=b["sharpness"] * omega0,
    )
    counter_term = static_damping_scalar(alpha_density) + static_damping_scalar(
        beta_density
    )
    if drive_freq is None:
        drive_freq = omega0 - temperature
    model = NetworkModel.cosine_drive(
        mass=[[1.0]],
        v_static=[[omega0**2 + counter_term]],
        v1=[[v1]],
        drive_freq=drive_freq,
        reference_frequency=omega0,
    )
    reservoirs = [
        ReservoirSpec.on_sites([0], 1, alpha_density, temperature, "alpha"),
        ReservoirSpec.on_sites([0], 1, beta_density, temperature, "beta"),
    ]
    return model, reservoirs


if __name__ == "__main__":
    import doctest

    doctest.testmod()
