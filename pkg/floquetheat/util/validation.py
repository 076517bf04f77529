"Validate a network model and its reservoirs against their invariants."

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy.linalg import eigh, eigvalsh

from floquetheat.errors import ValidationError
from floquetheat.model import NetworkModel, ReservoirSpec, label

log = logging.getLogger(__name__)

#: Relative tolerance for symmetry and reality checks.
SYMMETRY_RTOL = 1e-12


@dataclass(frozen=True)
class ValidationReport:
    "The outcome of :func:`validate`: itemized violations and non-fatal warnings."

    violations: Tuple[str, ...] = ()
    warnings: Tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.violations

    def raise_if_failed(self):
        "Raise a :class:`ValidationError` listing every violation, if there are any."
        if self.violations:
            raise ValidationError("\n".join(self.violations))

    def __str__(self) -> str:
        lines = ["PASS" if self.passed else "FAIL"]
        lines += [f"  - violation: {v}" for v in self.violations]
        lines += [f"  - warning: {w}" for w in self.warnings]
        return "\n".join(lines)


def _scale(matrix: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(matrix), initial=0.0)))


def _check_square(matrix: np.ndarray, n: int, name: str):
    "Raise a :class:`ValidationError` if ``matrix`` is not ``n`` by ``n``."
    if matrix.shape != (n, n):
        raise ValidationError(f"{name} has shape {matrix.shape}, expected {(n, n)}.")


def _check_symmetric(matrix: np.ndarray, name: str):
    if np.max(np.abs(matrix - matrix.T), initial=0.0) > SYMMETRY_RTOL * _scale(matrix):
        raise ValidationError(f"{name} is not symmetric.")


def _check_positive_definite(matrix: np.ndarray, name: str):
    """Raise a :class:`ValidationError` if the symmetric ``matrix`` has a non-positive
    eigenvalue.

    >>> _check_positive_definite(np.diag([1.0, -1.0]), "v_static")
    Traceback (most recent call last):
        ...
    floquetheat.errors.ValidationError: v_static is not positive definite (smallest eigenvalue -1).
    """
    smallest = float(eigvalsh(matrix)[0])
    if not smallest > 0:
        raise ValidationError(
            f"{name} is not positive definite (smallest eigenvalue {smallest:.6g})."
        )


def _check_fourier_reality(model: NetworkModel):
    """Raise a :class:`ValidationError` unless :math:`V_{-k} = V_k^*` for every
    harmonic, i.e. unless :math:`V(t)` is real."""
    for k, vk in model.v_fourier.items():
        partner = model.fourier(-k)
        if np.max(np.abs(partner - vk.conj()), initial=0.0) > SYMMETRY_RTOL * _scale(vk):
            raise ValidationError(
                f"V_{{{-k}}} is not the complex conjugate of V_{{{k}}}, so V(t) is not real."
            )
        _check_symmetric(vk, f"V_{{{k}}}")


def _check_time_reversal(model: NetworkModel):
    """Raise a :class:`ValidationError` if the model is flagged time-reversal invariant
    but some :math:`V_k` is not real or differs from :math:`V_{-k}`."""
    if not model.time_reversal_invariant:
        return
    for k, vk in model.v_fourier.items():
        tol = SYMMETRY_RTOL * _scale(vk)
        if np.max(np.abs(vk.imag), initial=0.0) > tol or np.max(
            np.abs(vk - model.fourier(-k)), initial=0.0
        ) > tol:
            raise ValidationError(
                f"The model is flagged time-reversal invariant but V_{{{k}}} is not real "
                f"and equal to V_{{{-k}}}."
            )


def _check_projector(reservoir: ReservoirSpec, name: str, n: int):
    projector = reservoir.site_projector
    _check_square(projector, n, f"Projector of reservoir {name}")
    off_diagonal = projector - np.diag(projector.diagonal())
    diagonal = projector.diagonal()
    if np.any(off_diagonal != 0) or not np.all((diagonal == 0) | (diagonal == 1)):
        raise ValidationError(f"Projector of reservoir {name} is not a diagonal 0/1 matrix.")
    if not np.any(diagonal):
        raise ValidationError(f"Reservoir {name} is not coupled to any site.")


def _check_temperature(reservoir: ReservoirSpec, name: str):
    if not reservoir.temperature >= 0:
        raise ValidationError(
            f"Reservoir {name} has temperature {reservoir.temperature}, which must be >= 0."
        )


def _orthogonality_warnings(reservoirs: Sequence[ReservoirSpec]) -> List[str]:
    warnings = []
    for i, a in enumerate(reservoirs):
        for j in range(i + 1, len(reservoirs)):
            b = reservoirs[j]
            if a.site_projector.shape == b.site_projector.shape and np.any(
                a.site_projector @ b.site_projector
            ):
                warnings.append(
                    f"Reservoirs {label(a, i)} and {label(b, j)} share sites; heat rates "
                    "are still defined but the projectors are not orthogonal."
                )
    return warnings


def normal_frequencies(mass: np.ndarray, potential: np.ndarray) -> np.ndarray:
    "Return the ascending normal frequencies of ``(mass, potential)``."
    return np.sqrt(np.clip(eigh(potential, mass, eigvals_only=True), 0.0, None))


def parametric_risks(
    model: NetworkModel, frequencies: np.ndarray, margin: float
) -> List[str]:
    """Return a warning for each drive harmonic with :math:`|k\\omega_d - 2\\Omega_a|`
    below ``margin`` (a heuristic for parametric resonance, not a stability proof).

    >>> model = NetworkModel.cosine_drive([[1.0]], [[1.0]], [[0.1]], drive_freq=2.01)
    >>> parametric_risks(model, np.array([1.0]), margin=0.05)
    ['Harmonic k=1 drives at 2.01, within 0.05 of twice the normal frequency 1.']
    """
    risks = []
    for k in model.harmonics:
        if k <= 0:
            continue
        for omega in frequencies:
            if abs(k * model.drive_freq - 2 * omega) < margin:
                risks.append(
                    f"Harmonic k={k} drives at {k * model.drive_freq:.6g}, within "
                    f"{margin:g} of twice the normal frequency {omega:.6g}."
                )
    return risks


def validate(
    model: NetworkModel,
    reservoirs: Sequence[ReservoirSpec],
    margin: float = 0.05,
) -> ValidationReport:
    """Check a model and its reservoirs, collecting every violated invariant instead of
    stopping at the first.

    Args:
        model: The driven network.
        reservoirs: The reservoirs coupled to it.
        margin: Frequency margin of the parametric-resonance heuristic, which only ever
            produces warnings.

    >>> validate(NetworkModel.undriven([[1.0]], [[1.0]]), []).passed
    True
    >>> report = validate(NetworkModel.undriven([[1.0, 0], [0, 1.0]], [[1.0, 0], [0, -1.0]]), [])
    >>> report.passed
    False
    >>> report.violations
    ('v_static is not positive definite (smallest eigenvalue -1).',)
    """
    from floquetheat.kernels.damping import static_damping

    violations: List[str] = []
    warnings: List[str] = []

    def collect(check, *args) -> bool:
        try:
            check(*args)
        except ValidationError as e:
            violations.append(str(e))
            return False
        return True

    n = model.n_sites
    shapes_ok = all(
        [
            collect(_check_square, model.mass, n, "mass"),
            collect(_check_square, model.v_static, n, "v_static"),
            *(
                collect(_check_square, vk, n, f"V_{{{k}}}")
                for k, vk in model.v_fourier.items()
            ),
        ]
    )
    if shapes_ok:
        mass_ok = collect(_check_symmetric, model.mass, "mass") and collect(
            _check_positive_definite, model.mass, "mass"
        )
        v_ok = collect(_check_symmetric, model.v_static, "v_static") and collect(
            _check_positive_definite, model.v_static, "v_static"
        )
        collect(_check_fourier_reality, model)
        collect(_check_time_reversal, model)
    else:
        mass_ok = v_ok = False

    projectors_ok = True
    for i, r in enumerate(reservoirs):
        name = label(r, i)
        projectors_ok &= collect(_check_projector, r, name, n)
        collect(_check_temperature, r, name)
    if projectors_ok:
        warnings += _orthogonality_warnings(reservoirs)

    if mass_ok and v_ok and projectors_ok:
        renormalized = model.v_static - static_damping(reservoirs) if reservoirs else model.v_static
        if collect(
            _check_positive_definite, renormalized, "The renormalized potential V_0 - gamma(0)"
        ):
            frequencies = normal_frequencies(model.mass, renormalized)
            warnings += parametric_risks(model, frequencies, margin)

    for w in warnings:
        log.warning(w)
    return ValidationReport(tuple(violations), tuple(warnings))


if __name__ == "__main__":
    import doctest

    doctest.testmod()
