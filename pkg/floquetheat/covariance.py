"""The periodic asymptotic covariance of the network.

In the asymptotic state the network is Gaussian with a covariance that repeats with
the drive period. Its Fourier blocks are frequency integrals over the sideband
amplitudes,

.. math:: \\sigma^{xx}_{jl} = \\frac12\\int_0^\\infty A_j(\\omega)\\,\\tilde\\nu(\\omega)
    \\,A_l^\\dagger(\\omega)\\,d\\omega,

with an extra factor :math:`(\\omega + l\\omega_d)` for :math:`\\sigma^{xp}` and
:math:`(\\omega+j\\omega_d)(\\omega+l\\omega_d)` for :math:`\\sigma^{pp}`, and the
time-domain covariance is

.. math:: \\sigma^{xx}(t) = \\Re\\sum_{jl}\\sigma^{xx}_{jl}e^{i\\omega_d(j-l)t},\\quad
    \\sigma^{xp}(t) = \\Im\\Big[\\sum_{jl}\\sigma^{xp}_{jl}e^{i\\omega_d(j-l)t}\\Big]M,\\quad
    \\sigma^{pp}(t) = M\\,\\Re\\Big[\\sum_{jl}\\sigma^{pp}_{jl}e^{i\\omega_d(j-l)t}\\Big]M.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from floquetheat.floquet.sidebands import FloquetSolution
from floquetheat.kernels.noise import NoiseKernelFT
from floquetheat.kernels.quadrature import QuadratureSpec, integrate
from floquetheat.model import NetworkModel, ReservoirSpec
from floquetheat.thermo.heat import quadrature_setup

log = logging.getLogger(__name__)

#: Time samples per period used by the physicality scans.
SAMPLES_PER_PERIOD = 64
#: Absolute tolerance on the Heisenberg bound of the symplectic eigenvalues.
HEISENBERG_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class CovarianceSeries:
    """Fourier blocks of the periodic covariance, each of shape
    ``(2 * k_max + 1, 2 * k_max + 1, n, n)`` and indexed by ``(j + k_max, l + k_max)``."""

    xx: np.ndarray
    xp: np.ndarray
    pp: np.ndarray
    model: NetworkModel
    k_max: int
    error_estimate: float = 0.0

    @property
    def drive_freq(self) -> float:
        return self.model.drive_freq

    @property
    def mass(self) -> np.ndarray:
        return self.model.mass

    @property
    def n_sites(self) -> int:
        return self.model.n_sites

    @property
    def sidebands(self) -> np.ndarray:
        return np.arange(-self.k_max, self.k_max + 1)

    def times(self, samples: int = SAMPLES_PER_PERIOD) -> np.ndarray:
        "Return ``samples`` equally spaced times covering one period."
        return np.linspace(0.0, self.model.period, samples, endpoint=False)


def _block_integrand(sol: FloquetSolution, noise: NoiseKernelFT):
    sidebands = sol.sidebands
    drive_freq = sol.drive_freq

    def integrand(omega: float) -> np.ndarray:
        a = sol(omega)
        inner = 0.5 * np.einsum("jab,bc,ldc->jlad", a, noise(omega), a.conj())
        s = omega + sidebands * drive_freq
        blocks = np.stack(
            [inner, inner * s[None, :, None, None], inner * np.multiply.outer(s, s)[..., None, None]]
        )
        return np.stack([blocks.real, blocks.imag])

    return integrand


def sigma_blocks(
    sol: FloquetSolution,
    reservoirs: Sequence[ReservoirSpec],
    spec: Optional[QuadratureSpec] = None,
) -> CovarianceSeries:
    """Integrate the covariance Fourier blocks of a solved model.

    All blocks share one vector-valued adaptive quadrature (real and imaginary parts are
    integrated as separate components).

    Raises:
        QuadratureError: if the quadrature does not converge.
    """
    reservoirs = tuple(reservoirs)
    spec, top, points = quadrature_setup(sol, reservoirs, spec)
    integrand = _block_integrand(sol, NoiseKernelFT(reservoirs))
    value, error = integrate(integrand, 0.0, top, spec, points, term=("covariance",), with_error=True)
    blocks = value[0] + 1j * value[1]
    log.debug("Integrated %d covariance blocks (error %.3e).", blocks[0].size, error)
    return CovarianceSeries(blocks[0], blocks[1], blocks[2], sol.model, sol.k_max, error)


def _phases(series: CovarianceSeries, t: float) -> np.ndarray:
    m = series.sidebands
    return np.exp(1j * series.drive_freq * np.subtract.outer(m, m) * t)


def sigma_at(series: CovarianceSeries, t: float) -> np.ndarray:
    """Return the real ``2n x 2n`` covariance :math:`[[\\sigma^{xx}, \\sigma^{xp}],
    [\\sigma^{xp\\,T}, \\sigma^{pp}]]` at time ``t``."""
    phases = _phases(series, t)
    m = series.mass
    xx = np.einsum("jl,jlab->ab", phases, series.xx).real
    xp = np.einsum("jl,jlab->ab", phases, series.xp).imag @ m
    pp = m @ np.einsum("jl,jlab->ab", phases, series.pp).real @ m
    xx = 0.5 * (xx + xx.T)
    pp = 0.5 * (pp + pp.T)
    return np.block([[xx, xp], [xp.T, pp]])


def symplectic_form(n: int) -> np.ndarray:
    "Return :math:`\\Omega = [[0, 1], [-1, 0]]` for ``n`` degrees of freedom."
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def symplectic_eigenvalues(sigma: np.ndarray) -> np.ndarray:
    """Return the ascending symplectic eigenvalues of a ``2n x 2n`` covariance, the
    moduli of the eigenvalues of :math:`i\\Omega\\sigma` (which come in pairs).

    >>> symplectic_eigenvalues(np.diag([0.5, 0.5]))
    array([0.5])
    >>> symplectic_eigenvalues(np.diag([2.0, 0.125]))
    array([0.5])
    """
    n = sigma.shape[0] // 2
    moduli = np.sort(np.abs(np.linalg.eigvals(1j * symplectic_form(n) @ sigma)))
    return moduli[::2]


def min_symplectic_eigenvalue(series: CovarianceSeries, samples: int = SAMPLES_PER_PERIOD) -> float:
    """Return the smallest symplectic eigenvalue over ``samples`` times of one period.

    It is at least 1/2 (up to :data:`HEISENBERG_TOL`) for a physical state; a smaller
    value is logged as a warning."""
    smallest = min(symplectic_eigenvalues(sigma_at(series, t))[0] for t in series.times(samples))
    if smallest < 0.5 - HEISENBERG_TOL:
        log.warning("The covariance violates the Heisenberg bound: symplectic eigenvalue %.8g.", smallest)
    return float(smallest)


def mean_energy(series: CovarianceSeries, t: float) -> float:
    "Return :math:`\\langle H_S\\rangle(t) = \\frac12\\mathrm{Tr}[M^{-1}\\sigma^{pp}] + \\frac12\\mathrm{Tr}[V(t)\\sigma^{xx}]`."
    n = series.n_sites
    sigma = sigma_at(series, t)
    kinetic = np.trace(np.linalg.solve(series.mass, sigma[n:, n:]))
    potential = np.trace(series.model.drive_at(t) @ sigma[:n, :n])
    return float(0.5 * (kinetic + potential))


def energy_series(
    series: CovarianceSeries, samples: int = SAMPLES_PER_PERIOD
) -> Tuple[np.ndarray, np.ndarray]:
    "Return the times and :func:`mean_energy` values over one period."
    times = series.times(samples)
    return times, np.array([mean_energy(series, t) for t in times])


def _diagonal_sums(blocks: np.ndarray, k_max: int) -> dict:
    "Return :math:`S_m = \\sum_{j-l=m}\\sigma_{jl}` for every ``m``."
    size = 2 * k_max + 1
    sums = {}
    for m in range(-2 * k_max, 2 * k_max + 1):
        j = np.arange(max(0, m), min(size, size + m))
        sums[m] = blocks[j, j - m].sum(axis=0)
    return sums


def direct_work_rate(series: CovarianceSeries) -> float:
    """Return the cycle average of :math:`\\frac12\\mathrm{Tr}[\\dot V(t)\\sigma^{xx}(t)]`
    evaluated on the Fourier blocks, an estimate of the work rate independent of the
    heat integrals."""
    sums = _diagonal_sums(series.xx, series.k_max)
    zero = np.zeros((series.n_sites, series.n_sites), dtype=complex)
    total = 0.0j
    for k, vk in series.model.v_fourier.items():
        paired = sums.get(-k, zero) + sums.get(k, zero).conj()
        total += 1j * k * series.drive_freq * np.trace(vk @ paired)
    return float(0.25 * total.real)


if __name__ == "__main__":
    import doctest

    doctest.testmod()
