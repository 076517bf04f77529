"""The Laplace transform of the damping kernel,

.. math:: \\hat\\gamma(s) = \\int_0^\\infty \\frac{I(\\nu)}{\\nu} \\frac{s}{\\nu^2+s^2}\\,d\\nu,

and its boundary values on the imaginary axis. For :math:`s = i\\omega` approached from
:math:`\\Re s > 0`,

.. math:: \\hat\\gamma(i\\omega) = \\frac{\\pi}{2}\\frac{I(|\\omega|)}{|\\omega|}
    + i\\,\\omega\\,\\mathrm{P}\\!\\!\\int_0^\\infty \\frac{I(\\nu)/\\nu}{\\nu^2-\\omega^2}\\,d\\nu,

where the real part is the fluctuation-dissipation value and the imaginary part (the
"principal part" below) is odd in :math:`\\omega`.

Every reservoir contributes :math:`P_\\alpha\\,\\hat\\gamma_\\alpha(s)`, and
:math:`\\hat\\gamma_\\alpha` is linear in the coupling strength, so principal parts are
tabulated once per *unit-strength* density and shared between reservoirs and coupling
scans.
"""

import functools
import logging
from typing import Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from floquetheat.errors import QuadratureError
from floquetheat.kernels.quadrature import QuadratureSpec, checked_quad, principal_value
from floquetheat.model import ReservoirSpec
from floquetheat.spectral import SpectralDensity

log = logging.getLogger(__name__)

#: Principal parts are tabulated up to this multiple of the density support.
TABLE_SPAN = 8.0
TABLE_POINTS = 1201
#: Tight tolerances for the one-off integrals behind the tables.
_TABLE_QUADRATURE = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-11, limit=2000)


def _segments(density: SpectralDensity) -> Tuple[float, ...]:
    "Breakpoints of the integrals over a density: its kinks and cutoff regions."
    points = set(density.kinks)
    for center, width in density.features:
        points.update((center - 10 * width, center, center + 10 * width))
    return tuple(sorted(p for p in points if 0 < p < density.support))


def _moment(density: SpectralDensity, power: int) -> float:
    "Return :math:`\\int_0^\\infty i(\\nu)\\,\\nu^{power}\\,d\\nu` (``power >= -1``)."
    f = (
        density.over_omega
        if power == -1
        else (lambda v: density.magnitude(v) * v**power)
    )
    value, _ = checked_quad(
        lambda v: float(f(v)),
        0.0,
        density.support,
        _TABLE_QUADRATURE,
        f"moment {power} of {density!r}",
        points=_segments(density) or None,
    )
    return value


@functools.lru_cache(maxsize=None)
def static_damping_scalar(density: SpectralDensity) -> float:
    """Return :math:`\\gamma(0) = \\int_0^\\infty i(\\nu)/\\nu\\,d\\nu`.

    >>> from floquetheat.spectral import PowerLawCutoff
    >>> density = PowerLawCutoff(strength=0.1, exponent=1, cutoff=1.0, sharpness=1e-3)
    >>> round(static_damping_scalar(density), 6)  # ~ strength * cutoff for a sharp cutoff
    0.1
    """
    return _moment(density, -1)


def static_damping(reservoirs: Sequence[ReservoirSpec]) -> np.ndarray:
    "Return the static damping matrix :math:`\\gamma^{xx}(0) = \\int I(\\nu)/\\nu\\,d\\nu`."
    n = reservoirs[0].n_sites if reservoirs else 0
    result = np.zeros((n, n))
    for r in reservoirs:
        result = result + static_damping_scalar(r.spectral) * r.site_projector
    return result


def principal_part(
    density: SpectralDensity,
    omega: float,
    method: str = "cauchy",
    spec: QuadratureSpec = _TABLE_QUADRATURE,
) -> float:
    """Return :math:`\\Im\\hat\\gamma(i\\omega)` for one scalar density by direct
    principal-value quadrature.

    Using :math:`\\frac{\\omega}{\\nu^2-\\omega^2} = \\frac12\\left(\\frac{1}{\\nu-\\omega}
    - \\frac{1}{\\nu+\\omega}\\right)` the singular part becomes a Cauchy principal
    value, computed with :func:`~floquetheat.kernels.quadrature.principal_value`."""
    omega = float(omega)
    if omega == 0.0:
        return 0.0
    if omega < 0:
        return -principal_part(density, -omega, method, spec)
    f = lambda v: float(density.over_omega(v))
    top = density.support
    points = _segments(density)
    term = f"principal part at {omega:g}"
    if omega >= top:
        value, _ = checked_quad(
            lambda v: f(v) * omega / (v * v - omega * omega),
            0.0,
            top,
            spec,
            term,
            points=points or None,
        )
        return value
    singular = principal_value(f, omega, 0.0, top, method, spec, points, term)
    regular, _ = checked_quad(
        lambda v: f(v) / (v + omega), 0.0, top, spec, term, points=points or None
    )
    return 0.5 * (singular - regular)


_FALLBACK = {"cauchy": "subtraction", "subtraction": "cauchy"}


def _tabulated_point(density: SpectralDensity, omega: float, method: str) -> float:
    try:
        return principal_part(density, omega, method)
    except QuadratureError as exc:
        other = _FALLBACK[method]
        log.warning("%s; retrying with the %s method.", exc, other)
        return principal_part(density, omega, other)


class _PrincipalTable:
    """Cubic-spline table of :func:`principal_part` on ``[0, TABLE_SPAN * support]``
    with the large-frequency expansion
    :math:`-(\\gamma_0/\\omega + m_2/\\omega^3 + m_4/\\omega^5)` beyond it."""

    def __init__(self, density: SpectralDensity, method: str):
        self.top = TABLE_SPAN * density.support
        grid = set(np.linspace(0.0, self.top, TABLE_POINTS))
        for center, width in density.features:
            grid.update(center + width * np.linspace(-12, 12, 193))
        for kink in density.kinks:
            grid.update(kink + 0.02 * kink * np.linspace(-1, 1, 81))
        if hasattr(density, "grid"):
            grid.update(density.grid)
        grid = np.array(sorted(x for x in grid if 0 <= x <= self.top))
        values = np.array([_tabulated_point(density, x, method) for x in grid])
        self.spline = CubicSpline(grid, values)
        self.moments = (
            _moment(density, -1),
            _moment(density, 1),
            _moment(density, 3),
        )
        log.debug(
            "Tabulated the principal part of %r on %d points up to %g.",
            density, len(grid), self.top,
        )

    def __call__(self, omega) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        a = np.abs(omega)
        inside = a <= self.top
        safe = np.where(inside, 1.0, a)
        g0, m2, m4 = self.moments
        outside = -(g0 / safe + m2 / safe**3 + m4 / safe**5)
        value = np.where(inside, self.spline(np.where(inside, a, 0.0)), outside)
        return np.sign(omega) * value


@functools.lru_cache(maxsize=None)
def _principal_table(unit_density: SpectralDensity, method: str) -> _PrincipalTable:
    return _PrincipalTable(unit_density, method)


class DampingKernel:
    """Boundary values :math:`\\hat\\gamma_\\alpha(i\\omega)` of every reservoir.

    Args:
        reservoirs: The reservoirs coupled to the network.
        exact: Evaluate principal parts by direct quadrature at every frequency instead
            of through the cached spline tables.
        method: The principal value method, ``"cauchy"`` or ``"subtraction"``.
    """

    def __init__(
        self,
        reservoirs: Sequence[ReservoirSpec],
        exact: bool = False,
        method: str = "cauchy",
    ):
        self.reservoirs = tuple(reservoirs)
        self.exact = exact
        self.method = method
        self.static = static_damping(self.reservoirs)

    def principal(self, omega) -> np.ndarray:
        "Return :math:`\\Im\\hat\\gamma_\\alpha(i\\omega)` for every reservoir, shape ``(m, ...)``."
        omega = np.asarray(omega, dtype=float)
        rows = []
        for r in self.reservoirs:
            density = r.spectral
            if density.strength == 0:
                rows.append(np.zeros_like(omega))
            elif self.exact:
                rows.append(
                    np.vectorize(lambda w: principal_part(density, w, self.method))(omega)
                )
            else:
                table = _principal_table(density.unit(), self.method)
                rows.append(density.strength * table(omega))
        return np.stack(rows) if rows else np.zeros((0,) + omega.shape)

    def dissipative(self, omega) -> np.ndarray:
        """Return :math:`\\omega\\,\\Re\\hat\\gamma_\\alpha(i\\omega) = \\frac{\\pi}{2}
        i_\\alpha(\\omega)` (odd in omega), shape ``(m, ...)``."""
        omega = np.asarray(omega, dtype=float)
        return np.stack([0.5 * np.pi * r.spectral(omega) for r in self.reservoirs])

    def boundary(self, omega) -> np.ndarray:
        "Return the complex scalars :math:`\\hat\\gamma_\\alpha(i\\omega)`, shape ``(m, ...)``."
        omega = np.asarray(omega, dtype=float)
        real = np.stack(
            [0.5 * np.pi * r.spectral.over_omega(np.abs(omega)) for r in self.reservoirs]
        )
        return real + 1j * self.principal(omega)

    def self_energy(self, omega) -> np.ndarray:
        """Return :math:`i\\omega\\hat\\gamma(i\\omega)` as matrices, shape ``(..., n, n)``.

        This is the reservoir contribution to :math:`\\hat g(i\\omega)^{-1}`."""
        omega = np.asarray(omega, dtype=float)
        if not self.reservoirs:
            return np.zeros(omega.shape + self.static.shape, dtype=complex)
        scalars = -omega * self.principal(omega) + 1j * self.dissipative(omega)
        projectors = np.stack([r.site_projector for r in self.reservoirs])
        return np.einsum("a...,aij->...ij", scalars, projectors)


def damping_laplace(
    reservoirs: Sequence[ReservoirSpec],
    s: complex,
    spec: QuadratureSpec = _TABLE_QUADRATURE,
    method: str = "cauchy",
) -> np.ndarray:
    """Return the matrix :math:`\\hat\\gamma(s)` for ``Re s >= 0``.

    For ``Re s > 0`` the defining integral is evaluated directly. On the imaginary axis
    the boundary value (fluctuation-dissipation real part, principal-value imaginary
    part) is returned.
    """
    s = complex(s)
    if s.real < 0:
        raise ValueError(f"damping_laplace needs Re s >= 0, got s={s}.")
    n = reservoirs[0].n_sites if reservoirs else 0
    result = np.zeros((n, n), dtype=complex)
    for r in reservoirs:
        density = r.spectral
        if s.real == 0:
            omega = s.imag
            real = 0.5 * np.pi * float(density.over_omega(abs(omega))) if omega else 0.0
            value = real + 1j * principal_part(density, omega, method, spec)
        else:
            kernel = lambda v: float(density.over_omega(v)) / (v * v + s * s)
            points = _segments(density) or None
            term = f"damping at s={s:g}"
            re, _ = checked_quad(
                lambda v: (s * kernel(v)).real, 0, density.support, spec, term, points=points
            )
            im, _ = checked_quad(
                lambda v: (s * kernel(v)).imag, 0, density.support, spec, term, points=points
            )
            value = re + 1j * im
        result = result + value * r.site_projector
    return result


if __name__ == "__main__":
    import doctest

    doctest.testmod()
