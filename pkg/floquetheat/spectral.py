"""Spectral densities of bosonic reservoirs.

A spectral density :math:`I(\\omega)` fully characterizes how a reservoir acts on the
network. Each family here describes the scalar density :math:`i(\\omega)` of one
reservoir; the matrix density seen by the network is ``i(omega) * P`` where ``P`` is the
reservoir's site projector (see :class:`~floquetheat.model.ReservoirSpec`).

All families share the exponential cutoff :func:`cutoff`:

>>> float(cutoff(0.0))
0.5

Negative frequencies use the odd extension :math:`I(-\\omega) = -I(\\omega)`:

>>> density = PowerLawCutoff(strength=0.1, exponent=1, cutoff=1.2, sharpness=0.1)
>>> bool(density(-0.5) == -density(0.5))
True
"""

import dataclasses
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, ClassVar, Optional, Tuple, Union

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import expit

from floquetheat.errors import RangeError

ArrayLike = Union[float, np.ndarray]

#: Beyond ``cutoff + SUPPORT_WIDTHS * sharpness`` the cutoff function is below 1e-26.
SUPPORT_WIDTHS = 60.0


def cutoff(x: ArrayLike) -> np.ndarray:
    """The exponential cutoff :math:`\\theta(x) = e^{-x}/(1+e^{-x})`, evaluated without
    overflow for large ``|x|``."""
    return expit(-np.asarray(x, dtype=float))


class SpectralDensity(ABC):
    """Base class for the scalar spectral density of a single reservoir.

    Sub-classes implement :meth:`magnitude` for non-negative frequencies; calling the
    object applies the odd extension."""

    family: ClassVar[str] = ""
    strength: float  #: The overall coupling strength (the density is linear in it).

    @property
    @abstractmethod
    def support(self) -> float:
        "A frequency above which the density is numerically zero."

    @property
    def kinks(self) -> Tuple[float, ...]:
        "Frequencies where the density is continuous but not smooth."
        return ()

    @property
    def features(self) -> Tuple[Tuple[float, float], ...]:
        "(center, width) pairs of regions where the density changes quickly."
        return ()

    @abstractmethod
    def magnitude(self, omega: ArrayLike) -> np.ndarray:
        "Return :math:`i(\\omega)` for ``omega >= 0``."

    @abstractmethod
    def over_omega(self, omega: ArrayLike) -> np.ndarray:
        """Return :math:`i(\\omega)/\\omega` for ``omega >= 0``, using the limit value at
        ``omega = 0``."""

    @abstractmethod
    def scaled(self, factor: float) -> "SpectralDensity":
        "Return a copy with the strength multiplied by ``factor``."

    def unit(self) -> "SpectralDensity":
        "Return the density normalized to unit strength (itself if the strength is 0)."
        if self.strength == 0:
            return self
        return self.scaled(1.0 / self.strength)

    def __call__(self, omega: ArrayLike) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        return np.sign(omega) * self.magnitude(np.abs(omega))


def _power(omega: np.ndarray, exponent: float) -> np.ndarray:
    "``omega**exponent`` without warnings at zero (``0**0 == 1``, ``0**-x == inf``)."
    with np.errstate(divide="ignore"):
        return np.power(omega, exponent)


def _as_floats(obj, *names):
    for name in names:
        object.__setattr__(obj, name, float(getattr(obj, name)))


@dataclass(frozen=True)
class PowerLawCutoff(SpectralDensity):
    """:math:`i(\\omega) = \\gamma\\,\\omega^\\lambda\\,\\theta((\\omega-\\Lambda)/r)`.

    ``exponent == 1`` is the ohmic case.

    >>> density = PowerLawCutoff(strength=0.1, exponent=1, cutoff=1.2, sharpness=0.1)
    >>> float(density(0.0))
    0.0
    """

    family: ClassVar[str] = "power_law"

    strength: float  #: Coupling strength :math:`\gamma`.
    exponent: float  #: Low-frequency exponent :math:`\lambda > 0`.
    cutoff: float  #: Cutoff frequency :math:`\Lambda`.
    sharpness: float  #: Width :math:`r` of the cutoff.

    def __post_init__(self):
        _as_floats(self, "strength", "exponent", "cutoff", "sharpness")

    @property
    def support(self) -> float:
        return self.cutoff + SUPPORT_WIDTHS * self.sharpness

    @property
    def features(self) -> Tuple[Tuple[float, float], ...]:
        return ((self.cutoff, self.sharpness),)

    def _envelope(self, omega: np.ndarray) -> np.ndarray:
        return self.strength * cutoff((omega - self.cutoff) / self.sharpness)

    def magnitude(self, omega: ArrayLike) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        return _power(omega, self.exponent) * self._envelope(omega)

    def over_omega(self, omega: ArrayLike) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        return _power(omega, self.exponent - 1) * self._envelope(omega)

    def scaled(self, factor: float) -> "PowerLawCutoff":
        return dataclasses.replace(self, strength=self.strength * factor)


@dataclass(frozen=True)
class GappedAtOmega0(SpectralDensity):
    """:math:`i(\\omega) = \\gamma\\,\\omega^\\lambda\\,|\\Omega_0-\\omega|\\,
    \\theta((\\omega-\\Lambda)/r)`, which vanishes exactly at the gap frequency.

    The absolute value keeps the density non-negative above the gap.

    >>> density = GappedAtOmega0(strength=1e-3, exponent=1, cutoff=0.9, sharpness=0.04)
    >>> float(density(1.0))
    0.0
    """

    family: ClassVar[str] = "gapped"

    strength: float
    exponent: float
    cutoff: float
    sharpness: float
    gap: float = 1.0  #: The frequency :math:`\Omega_0` where the density vanishes.

    def __post_init__(self):
        _as_floats(self, "strength", "exponent", "cutoff", "sharpness", "gap")

    @property
    def support(self) -> float:
        return max(self.cutoff + SUPPORT_WIDTHS * self.sharpness, 2 * self.gap)

    @property
    def kinks(self) -> Tuple[float, ...]:
        return (self.gap,)

    @property
    def features(self) -> Tuple[Tuple[float, float], ...]:
        return ((self.cutoff, self.sharpness), (self.gap, self.sharpness))

    def _envelope(self, omega: np.ndarray) -> np.ndarray:
        return (
            self.strength
            * np.abs(self.gap - omega)
            * cutoff((omega - self.cutoff) / self.sharpness)
        )

    def magnitude(self, omega: ArrayLike) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        return _power(omega, self.exponent) * self._envelope(omega)

    def over_omega(self, omega: ArrayLike) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        return _power(omega, self.exponent - 1) * self._envelope(omega)

    def scaled(self, factor: float) -> "GappedAtOmega0":
        return dataclasses.replace(self, strength=self.strength * factor)


@dataclass(frozen=True)
class Tabulated(SpectralDensity):
    """A density given by samples on a grid, interpolated with a monotonicity-preserving
    cubic (so interpolated values stay non-negative).

    Evaluating outside of the grid raises a :class:`~floquetheat.errors.RangeError`
    unless ``fill_outside`` is set.

    >>> density = Tabulated(grid=(0.0, 1.0, 2.0), values=(0.0, 0.5, 0.0))
    >>> float(density(1.0))
    0.5
    >>> density(3.0)
    Traceback (most recent call last):
    ...
    floquetheat.errors.RangeError: Tabulated spectral density evaluated at 3 outside of its grid [0, 2].
    """

    family: ClassVar[str] = "tabulated"

    grid: Tuple[float, ...]  #: Strictly increasing, non-negative frequencies.
    values: Tuple[float, ...]  #: Non-negative samples of :math:`i(\omega)`.
    fill_outside: Optional[float] = None  #: Value used outside of the grid, if any.
    _interp: Any = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        grid = tuple(float(x) for x in self.grid)
        values = tuple(float(x) for x in self.values)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_interp", PchipInterpolator(grid, values))

    @property
    def strength(self) -> float:
        return 1.0

    @property
    def support(self) -> float:
        return self.grid[-1]

    def magnitude(self, omega: ArrayLike) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        lo, hi = self.grid[0], self.grid[-1]
        outside = ((omega < lo) | (omega > hi)) & (omega != 0)
        if np.any(outside) and self.fill_outside is None:
            bad = float(np.atleast_1d(omega)[np.atleast_1d(outside)][0])
            raise RangeError(
                f"Tabulated spectral density evaluated at {bad:g} outside of "
                f"its grid [{lo:g}, {hi:g}]."
            )
        inside = np.clip(omega, lo, hi)
        result = np.where(outside, self.fill_outside or 0.0, self._interp(inside))
        return np.where(omega == 0, 0.0, result)

    def over_omega(self, omega: ArrayLike) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        safe = np.where(omega == 0, 1.0, omega)
        at_zero = float(self._interp.derivative()(0.0)) if self.grid[0] == 0 else 0.0
        return np.where(omega == 0, at_zero, self.magnitude(omega) / safe)

    def scaled(self, factor: float) -> "Tabulated":
        return dataclasses.replace(
            self, values=tuple(factor * v for v in self.values)
        )


def evaluate_spectral(
    spec: SpectralDensity, omega: ArrayLike, projector: Optional[np.ndarray] = None
) -> np.ndarray:
    """Evaluate a spectral density with the odd extension for negative ``omega``.

    With a ``projector`` the matrix density ``i(omega) * projector`` is returned.

    >>> density = GappedAtOmega0(strength=0.1, exponent=1, cutoff=0.9, sharpness=0.04)
    >>> evaluate_spectral(density, 1.0, np.eye(2)).tolist()
    [[0.0, 0.0], [0.0, 0.0]]
    """
    value = spec(omega)
    if projector is None:
        return value
    return np.multiply.outer(value, projector)


FAMILIES = {
    cls.family: cls for cls in (PowerLawCutoff, GappedAtOmega0, Tabulated)
}  #: Spectral density families by their configuration name.


def spectral_to_dict(spec: SpectralDensity) -> dict:
    """Return a plain-data description of a spectral density.

    >>> spectral_to_dict(PowerLawCutoff(strength=0.1, exponent=1, cutoff=1.2, sharpness=0.1))
    {'family': 'power_law', 'strength': 0.1, 'exponent': 1.0, 'cutoff': 1.2, 'sharpness': 0.1}
    """
    data = {"family": spec.family}
    for f in dataclasses.fields(spec):
        if not f.init:
            continue
        value = getattr(spec, f.name)
        data[f.name] = list(value) if isinstance(value, tuple) else value
    return data


def spectral_from_dict(data: dict) -> SpectralDensity:
    "Inverse of :func:`spectral_to_dict`."
    data = dict(data)
    family = data.pop("family", None)
    if family not in FAMILIES:
        raise ValueError(
            f"Unknown spectral family {family!r}, expected one of {sorted(FAMILIES)}."
        )
    return FAMILIES[family](**data)


if __name__ == "__main__":
    import doctest

    doctest.testmod()
