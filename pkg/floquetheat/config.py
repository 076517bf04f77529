"""Run configurations: TOML files validated by pydantic models.

A configuration has a ``[model]`` table, an array of ``[[reservoirs]]`` and optional
``[solver]``, ``[scan]``, ``[cooling]``, ``[oracle]`` and ``[output]`` tables. Unknown keys
are rejected and numeric fields are range-checked; every problem is reported as a
:class:`~floquetheat.errors.ConfigError` naming the key (and the line, for TOML syntax
errors).

>>> config = parse_config('''
... [model]
... mass = [[1.0]]
... v_static = [[1.0]]
... renormalized = true
...
... [[reservoirs]]
... sites = [0]
... temperature = 0.5
... spectral = {family = "power_law", strength = 0.1, exponent = 1, cutoff = 1.2, sharpness = 0.1}
... ''')
>>> config.solver.k_max, config.reservoirs[0].temperature
('auto', 0.5)
>>> parse_config(config.model_dump_toml().replace("temperature = 0.5", "temperature = -1"))
Traceback (most recent call last):
    ...
floquetheat.errors.ConfigError: reservoirs.0.temperature: Input should be greater than or equal to 0
"""

import hashlib
import json
import logging
import math
import re
import sys
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from floquetheat.errors import ConfigError
from floquetheat.kernels.quadrature import QuadratureSpec
from floquetheat.model import NetworkModel, ReservoirSpec, model_from_dict
from floquetheat.spectral import SpectralDensity, spectral_from_dict

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger(__name__)

#: Directory of the bundled configurations.
FIXTURES = Path(__file__).parent / "fixtures"
Matrix = List[List[float]]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class DriveEntry(_Section):
    "One harmonic :math:`V_k` of the drive (the conjugate harmonic is implied)."

    k: int
    matrix: Matrix
    imag: Optional[Matrix] = None

    @field_validator("k")
    @classmethod
    def _nonzero(cls, k: int) -> int:
        if k == 0:
            raise ValueError("the k=0 harmonic is the static potential v_static")
        return k


class ModelSection(_Section):
    mass: Matrix
    v_static: Matrix
    #: When set, ``v_static`` is the renormalized potential and the static damping of
    #: the reservoirs is added to it.
    renormalized: bool = False
    drive_freq: float = Field(1.0, gt=0)
    time_reversal_invariant: bool = False
    reference_frequency: float = Field(1.0, gt=0)
    drive: List[DriveEntry] = []

    @model_validator(mode="after")
    def _square(self) -> "ModelSection":
        n = len(self.mass)
        for name, matrix in [("mass", self.mass), ("v_static", self.v_static)] + [
            (f"drive k={d.k}", d.matrix) for d in self.drive
        ]:
            if len(matrix) != n or any(len(row) != n for row in matrix):
                raise ValueError(f"{name} must be a {n}x{n} matrix")
        return self


class SpectralSection(_Section):
    family: Literal["power_law", "gapped", "tabulated"]
    strength: Optional[float] = Field(None, ge=0)
    exponent: Optional[float] = Field(None, gt=0)
    cutoff: Optional[float] = Field(None, gt=0)
    sharpness: Optional[float] = Field(None, gt=0)
    gap: Optional[float] = Field(None, gt=0)
    #: CSV file of ``omega, value`` rows for the tabulated family, relative to the
    #: configuration file.
    file: Optional[str] = None
    grid: Optional[List[float]] = None
    values: Optional[List[float]] = None
    fill_outside: Optional[float] = Field(0.0, ge=0)

    @model_validator(mode="after")
    def _complete(self) -> "SpectralSection":
        if self.family == "tabulated":
            if self.file is None and (self.grid is None or self.values is None):
                raise ValueError("a tabulated density needs a file or grid and values")
            return self
        required = ["strength", "exponent", "cutoff", "sharpness"]
        if self.family == "power_law" and self.gap is not None:
            raise ValueError("gap only applies to the gapped family")
        missing = [name for name in required if getattr(self, name) is None]
        if missing:
            raise ValueError(f"family {self.family!r} needs {', '.join(missing)}")
        return self

    def build(self, base: Path) -> SpectralDensity:
        if self.family != "tabulated":
            data = self.model_dump(exclude_none=True, exclude={"file", "grid", "values", "fill_outside"})
            return spectral_from_dict(data)
        grid, values = self.grid, self.values
        if self.file is not None:
            path = base / self.file
            if not path.is_file():
                raise ConfigError(f"file {str(path)!r} does not exist", key="spectral.file")
            table = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
            grid, values = table[:, 0], table[:, 1]
        return spectral_from_dict(
            {"family": "tabulated", "grid": grid, "values": values, "fill_outside": self.fill_outside}
        )


class ReservoirSection(_Section):
    name: str = ""
    sites: List[int] = Field(min_length=1)
    temperature: float = Field(ge=0)
    spectral: SpectralSection

    @field_validator("sites")
    @classmethod
    def _non_negative(cls, sites: List[int]) -> List[int]:
        if any(s < 0 for s in sites):
            raise ValueError("site indices must be >= 0")
        return sites


class SolverSection(_Section):
    k_max: Union[Literal["auto"], int] = "auto"
    abs_tol: float = Field(1e-12, gt=0)
    rel_tol: float = Field(1e-8, gt=0, lt=1)
    omega_max: Optional[float] = Field(None, gt=0)
    limit: int = Field(4000, ge=1)
    method: Literal["banded", "perturbative"] = "banded"

    @field_validator("k_max")
    @classmethod
    def _k_max(cls, k_max):
        if k_max != "auto" and k_max < 0:
            raise ValueError("k_max must be 'auto' or >= 0")
        return k_max

    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(
            abs_tol=self.abs_tol, rel_tol=self.rel_tol, omega_max=self.omega_max, limit=self.limit
        )

    @property
    def fixed_kmax(self) -> Optional[int]:
        return None if self.k_max == "auto" else int(self.k_max)


class ScanSection(_Section):
    #: Temperatures applied to every reservoir; empty keeps the configured ones.
    temperatures: List[float] = []
    drive_freqs: List[float] = []
    gammas: List[float] = list(np.geomspace(1e-6, 1e-4, 8).tolist())
    #: Overrides the spectral exponent of the cooled reservoir.
    lambda_alpha: Optional[float] = Field(None, gt=0)

    @field_validator("temperatures")
    @classmethod
    def _temperatures(cls, values: List[float]) -> List[float]:
        if any(not t >= 0 for t in values):
            raise ValueError("temperatures must be >= 0")
        return values

    @field_validator("drive_freqs", "gammas")
    @classmethod
    def _positive(cls, values: List[float]) -> List[float]:
        if any(not v > 0 for v in values):
            raise ValueError("values must be > 0")
        return values


class CoolingSection(_Section):
    alpha: int = Field(0, ge=0)  #: Index of the cooled reservoir.
    gamma0: float = Field(1e-3, gt=0)  #: The reference coupling of the configured strengths.
    strategy: Literal["adaptive", "fixed"] = "adaptive"
    drive_freq: Optional[float] = Field(None, gt=0)
    heat_capacity: float = Field(1.0, gt=0)
    dimension: int = Field(1, ge=1, le=3)
    floor: float = Field(1e-4, gt=0)
    ceiling: Optional[float] = Field(None, gt=0)
    t_start: float = Field(0.1, gt=0)
    t_max: float = Field(1e15, gt=0)
    method: Literal["banded", "perturbative"] = "perturbative"
    zero_nrh: bool = False
    exact: bool = False
    table_points: int = Field(32, ge=2)

    @model_validator(mode="after")
    def _ordered(self) -> "CoolingSection":
        if not self.t_start > self.floor:
            raise ValueError("t_start must be above floor")
        if self.strategy == "fixed" and self.drive_freq is None:
            raise ValueError("the fixed strategy needs drive_freq")
        return self


class OracleSection(_Section):
    modes: int = Field(200, ge=1)
    omega_max: float = Field(3.0, gt=0)
    burn_in_periods: int = Field(20, ge=0)
    periods: int = Field(1, ge=1)
    samples_per_period: int = Field(64, ge=4)
    tolerance: float = Field(0.05, gt=0)  #: Largest accepted relative discrepancy.


class OutputSection(_Section):
    directory: str = "."
    samples: int = Field(64, ge=2)  #: Covariance samples per period.


class RunConfig(_Section):
    model: ModelSection
    reservoirs: List[ReservoirSection] = []
    solver: SolverSection = SolverSection()
    scan: ScanSection = ScanSection()
    cooling: CoolingSection = CoolingSection()
    oracle: OracleSection = OracleSection()
    output: OutputSection = OutputSection()
    threads: int = Field(1, ge=1)
    #: Directory that relative file paths are resolved against.
    base: str = Field(".", exclude=True)

    @model_validator(mode="after")
    def _sites(self) -> "RunConfig":
        n = len(self.model.mass)
        for i, r in enumerate(self.reservoirs):
            if any(s >= n for s in r.sites):
                raise ValueError(f"reservoir {i} couples to a site outside of the {n}-site network")
        if self.reservoirs and self.cooling.alpha >= len(self.reservoirs):
            raise ValueError("cooling.alpha is not a reservoir index")
        return self

    def build(self) -> Tuple[NetworkModel, List[ReservoirSpec]]:
        """Return the network and its reservoirs.

        With ``model.renormalized`` the static damping is added to ``v_static`` so that
        the configured matrix is the renormalized potential."""
        from floquetheat.kernels.damping import static_damping

        n = len(self.model.mass)
        base = Path(self.base)
        reservoirs = []
        for i, r in enumerate(self.reservoirs):
            spectral = r.spectral
            if self.scan.lambda_alpha is not None and i == self.cooling.alpha:
                spectral = spectral.model_copy(update={"exponent": self.scan.lambda_alpha})
            try:
                density = spectral.build(base)
            except ConfigError as e:
                raise ConfigError(str(e).split(": ", 1)[-1], key=f"reservoirs.{i}.{e.key}") from e
            reservoirs.append(ReservoirSpec.on_sites(r.sites, n, density, r.temperature, r.name))
        data = self.model.model_dump()
        if self.model.renormalized and reservoirs:
            data["v_static"] = (np.array(data["v_static"]) + static_damping(reservoirs)).tolist()
        return model_from_dict(data), reservoirs

    def config_hash(self) -> str:
        "A short hash of the validated configuration, stable across runs."
        canonical = json.dumps(self.model_dump(mode="json"), sort_keys=True)
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]

    def model_dump_toml(self) -> str:
        "Write the configuration back as TOML (only the subset of TOML it needs)."
        return _to_toml(self.model_dump(mode="json", exclude_none=True))


def _key(loc: Tuple[Any, ...]) -> str:
    return ".".join(str(part) for part in loc)


def _merge(data: Dict[str, Any], overrides: Mapping[str, Any]) -> Dict[str, Any]:
    merged = dict(data)
    for key, value in overrides.items():
        if isinstance(value, Mapping):
            merged[key] = _merge(merged.get(key, {}), value)
        else:
            merged[key] = value
    return merged


def parse_config(
    text: str, base: Union[str, Path] = ".", overrides: Optional[Mapping[str, Any]] = None
) -> RunConfig:
    """Parse and validate a TOML configuration.

    Args:
        text: The TOML document.
        base: Directory that relative file paths are resolved against.
        overrides: Nested values replacing those of the document (command-line flags).

    Raises:
        ConfigError: on a syntax error, an unknown key or an invalid value.
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        line = getattr(e, "lineno", None)
        if line is None:
            match = re.search(r"line (\d+)", str(e))
            line = int(match.group(1)) if match else None
        raise ConfigError(str(e).split(" (at ")[0], line=line) from e
    data = _merge(data, overrides or {})
    data["base"] = str(base)
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        error = e.errors()[0]
        message = error["msg"].removeprefix("Value error, ")
        raise ConfigError(message, key=_key(error["loc"]) or None) from e


def load_config(path: Union[str, Path], overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    "Read and validate the configuration file at ``path``."
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"configuration file {str(path)!r} does not exist")
    config = parse_config(path.read_text(), path.parent, overrides)
    log.info("Loaded %s (hash %s).", path, config.config_hash())
    return config


def _toml_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    if isinstance(value, Mapping):
        return "{" + ", ".join(f"{k} = {_toml_value(v)}" for k, v in value.items()) + "}"
    return repr(value)


def _to_toml(data: Mapping[str, Any]) -> str:
    lines = [f"{k} = {_toml_value(v)}" for k, v in data.items() if not isinstance(v, (Mapping, list))]
    for key, value in data.items():
        if isinstance(value, Mapping):
            lines += ["", f"[{key}]"]
            lines += [f"{k} = {_toml_value(v)}" for k, v in value.items()]
        elif isinstance(value, list) and value and all(isinstance(v, Mapping) for v in value):
            for entry in value:
                lines += ["", f"[[{key}]]"]
                lines += [f"{k} = {_toml_value(v)}" for k, v in entry.items()]
        elif isinstance(value, list):
            lines.insert(0, f"{key} = {_toml_value(value)}")
    return "\n".join(lines) + "\n"


if __name__ == "__main__":
    import doctest

    doctest.testmod()
