"""Sideband amplitudes of the asymptotic Floquet response.

For a drive :math:`V(t) = V_0 + \\sum_{k\\neq 0} V_k e^{ik\\omega_d t}` the asymptotic
response at frequency :math:`\\omega` is
:math:`p(\\omega, t) = \\sum_k A_k(\\omega) e^{ik\\omega_d t}`, and the amplitudes solve

.. math:: \\hat g(i s_k)^{-1} A_k + \\sum_{j \\neq 0} V_j A_{k-j} = \\delta_{k,0}
    \\mathbb{1}, \\qquad s_k = \\omega + k\\omega_d.

Truncated at :math:`|k| \\le K` this is a block-banded linear system with bandwidth set
by the largest drive harmonic. :func:`solve_sidebands` solves it exactly,
:func:`perturbative_sidebands` to second order in the drive.
"""

import logging
import re
import threading
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from floquetheat.errors import InstabilityError
from floquetheat.floquet.green import UndrivenGreen
from floquetheat.kernels.quadrature import PeakHint
from floquetheat.model import NetworkModel, ReservoirSpec

log = logging.getLogger(__name__)

#: Sideband systems with a larger condition estimate raise an InstabilityError.
CONDITION_LIMIT = 1e14
METHODS = ("banded", "perturbative")
_SINGULAR = re.compile(r"diagonal (\d+)")


@dataclass(frozen=True, eq=False)
class SidebandBlocks:
    """The amplitudes :math:`A_k(\\omega)` for ``-k_max <= k <= k_max`` at one frequency.

    Indexing with ``k`` returns :math:`A_k`, zero outside of the truncation."""

    omega: float
    blocks: np.ndarray  #: Shape ``(2 * k_max + 1, n, n)``, ordered by increasing ``k``.
    k_max: int
    residual: float  #: Max-norm residual of the (truncated) block equations.
    condition: float = float("nan")  #: Condition estimate of the block system.

    @property
    def sidebands(self) -> np.ndarray:
        return np.arange(-self.k_max, self.k_max + 1)

    def __getitem__(self, k: int) -> np.ndarray:
        if abs(k) > self.k_max:
            return np.zeros(self.blocks.shape[1:], dtype=complex)
        return self.blocks[k + self.k_max]


def _block_matrix(
    model: NetworkModel, green: UndrivenGreen, omega: float, k_max: int
) -> np.ndarray:
    "Assemble the dense block matrix of the truncated sideband system."
    n = model.n_sites
    ks = np.arange(-k_max, k_max + 1)
    diagonal = green.inverse(omega + ks * model.drive_freq)
    size = len(ks) * n
    matrix = np.zeros((size, size), dtype=complex)
    for i, k in enumerate(ks):
        matrix[i * n : (i + 1) * n, i * n : (i + 1) * n] = diagonal[i]
        for j, kk in enumerate(ks):
            if j != i and (k - kk) in model.v_fourier:
                matrix[i * n : (i + 1) * n, j * n : (j + 1) * n] = model.v_fourier[k - kk]
    return matrix


def _banded(matrix: np.ndarray, lower: int, upper: int) -> np.ndarray:
    "Return ``matrix`` in the diagonal-ordered form used by :func:`solve_banded`."
    size = matrix.shape[0]
    rows, cols = np.indices(matrix.shape)
    inside = (cols - rows <= upper) & (rows - cols <= lower)
    ab = np.zeros((lower + upper + 1, size), dtype=matrix.dtype)
    ab[(upper + rows - cols)[inside], cols[inside]] = matrix[inside]
    return ab


def _solve_banded(matrix: np.ndarray, bandwidth: int, rhs: np.ndarray) -> np.ndarray:
    if matrix.shape[0] == 1:
        # solve_banded assumes a sub- and a super-diagonal for 1 x 1 systems.
        if matrix[0, 0] == 0:
            raise LinAlgError("singular matrix")
        return rhs / matrix[0, 0]
    return solve_banded(
        (bandwidth, bandwidth), _banded(matrix, bandwidth, bandwidth), rhs, check_finite=False
    )


def _rhs(n: int, k_max: int) -> np.ndarray:
    rhs = np.zeros(((2 * k_max + 1) * n, n), dtype=complex)
    rhs[k_max * n : (k_max + 1) * n] = np.eye(n)
    return rhs


def _residual(matrix: np.ndarray, solution: np.ndarray, n: int, k_max: int) -> float:
    return float(np.max(np.abs(matrix @ solution - _rhs(n, k_max)), initial=0.0))


def solve_sidebands(
    model: NetworkModel,
    reservoirs: Sequence[ReservoirSpec],
    omega: float,
    k_max: int,
    green: Optional[UndrivenGreen] = None,
    condition_limit: float = CONDITION_LIMIT,
) -> SidebandBlocks:
    """Solve the block system for :math:`A_k(\\omega)`, ``|k| <= k_max``, by banded LU
    with partial pivoting.

    Raises:
        InstabilityError: if the system is singular or its condition estimate
            :math:`\\|B\\|_1\\|B^{-1}e\\|_1` exceeds ``condition_limit``. The error names
            the sideband where the solve broke down (or the largest amplitude).
    """
    if green is None:
        green = UndrivenGreen(model, reservoirs)
    n = model.n_sites
    bandwidth = (model.max_harmonic + 1) * n - 1
    matrix = _block_matrix(model, green, omega, k_max)
    try:
        solution = _solve_banded(matrix, bandwidth, _rhs(n, k_max))
    except LinAlgError as e:
        match = _SINGULAR.search(str(e))
        sideband = int(match.group(1)) // n - k_max if match else None
        raise InstabilityError(
            f"The sideband system at omega={omega:.6g} is singular ({e}).",
            sideband=sideband,
        ) from e
    blocks = solution.reshape(2 * k_max + 1, n, n)
    condition = float(np.linalg.norm(matrix, 1) * np.linalg.norm(solution, 1))
    if not np.isfinite(condition) or condition > condition_limit:
        worst = int(np.argmax(np.linalg.norm(blocks, axis=(1, 2)))) - k_max
        raise InstabilityError(
            f"The sideband system at omega={omega:.6g} is ill-conditioned "
            f"(estimate {condition:.3e}); the drive may be parametrically unstable.",
            sideband=worst,
            condition=condition,
        )
    residual = _residual(matrix, solution, n, k_max)
    log.debug("Solved sidebands at omega=%.8g: condition %.3e, residual %.3e.", omega, condition, residual)
    return SidebandBlocks(float(omega), blocks, k_max, residual, condition)


def perturbative_sidebands(
    model: NetworkModel,
    reservoirs: Sequence[ReservoirSpec],
    omega: float,
    green: Optional[UndrivenGreen] = None,
) -> SidebandBlocks:
    """Return the amplitudes to second order in the drive,

    .. math:: A_k = -\\hat g(is_k) V_k \\hat g(i\\omega), \\qquad
        A_0 = \\hat g(i\\omega) + \\sum_{k\\neq 0}\\hat g(i\\omega) V_k
        \\hat g(is_{-k}) V_{-k}\\hat g(i\\omega),

    with ``k_max`` the largest drive harmonic."""
    if green is None:
        green = UndrivenGreen(model, reservoirs)
    n, q = model.n_sites, model.max_harmonic
    ks = np.arange(-q, q + 1)
    gs = green(omega + ks * model.drive_freq)
    g0 = gs[q]
    blocks = np.zeros((2 * q + 1, n, n), dtype=complex)
    blocks[q] = g0
    for k in model.harmonics:
        blocks[k + q] = -gs[k + q] @ model.v_fourier[k] @ g0
        blocks[q] = blocks[q] + g0 @ model.v_fourier[k] @ gs[q - k] @ model.v_fourier[-k] @ g0
    matrix = _block_matrix(model, green, omega, q)
    residual = _residual(matrix, blocks.reshape(-1, n), n, q)
    return SidebandBlocks(float(omega), blocks, q, residual)


def _probe_signature(
    model: NetworkModel, green: UndrivenGreen, omegas: Iterable[float], k_max: int
) -> np.ndarray:
    "Sample :math:`\\sum_k |s_k|\\,\\|A_k(\\omega)\\|_F^2` on a probe grid."
    values = []
    for omega in omegas:
        blocks = solve_sidebands(model, green.reservoirs, omega, k_max, green)
        s = np.abs(omega + blocks.sidebands * model.drive_freq)
        values.append(np.sum(s * np.sum(np.abs(blocks.blocks) ** 2, axis=(1, 2))))
    return np.array(values)


def choose_kmax(
    model: NetworkModel,
    reservoirs: Sequence[ReservoirSpec],
    probes: Optional[Sequence[float]] = None,
    rel_tol: float = 1e-8,
    start: int = 4,
    limit: int = 64,
    green: Optional[UndrivenGreen] = None,
) -> int:
    """Choose the sideband truncation: start at ``start`` and double until the sampled
    heat-integrand signature changes by less than ``0.1 * rel_tol`` (relative).

    An undriven model needs no sidebands and gets ``k_max = 0``."""
    if not model.is_driven:
        return 0
    if green is None:
        green = UndrivenGreen(model, reservoirs)
    if probes is None:
        frequencies, _ = green.normal_modes()
        probes = [*(0.5 * frequencies), *(0.9 * frequencies), *(1.1 * frequencies)]
    k_max = max(start, model.max_harmonic)
    previous = _probe_signature(model, green, probes, k_max)
    while 2 * k_max <= limit:
        current = _probe_signature(model, green, probes, 2 * k_max)
        change = np.max(np.abs(current - previous)) / max(np.max(np.abs(current)), 1e-300)
        log.debug("k_max %d -> %d changes the probe signature by %.3e.", k_max, 2 * k_max, change)
        if change < 0.1 * rel_tol:
            return k_max
        k_max, previous = 2 * k_max, current
    log.warning("The sideband truncation did not converge up to k_max=%d.", k_max)
    return k_max


class FloquetSolution:
    """Sideband amplitudes of one model, solved lazily per frequency and cached.

    The cache is safe under concurrent use: values are deterministic, so a duplicate
    solve on a race is harmless and the last write wins.

    Args:
        model: The driven network.
        reservoirs: The reservoirs coupled to it.
        k_max: Sideband truncation. ``None`` chooses it with :func:`choose_kmax`. The
            perturbative method always uses the largest drive harmonic.
        method: ``"banded"`` (the exact truncated solve) or ``"perturbative"``.
        green: A prebuilt :class:`UndrivenGreen` to share between solutions.
    """

    def __init__(
        self,
        model: NetworkModel,
        reservoirs: Sequence[ReservoirSpec],
        k_max: Optional[int] = None,
        method: str = "banded",
        green: Optional[UndrivenGreen] = None,
        condition_limit: float = CONDITION_LIMIT,
    ):
        if method not in METHODS:
            raise ValueError(f"Unknown sideband method {method!r}, expected one of {METHODS}.")
        self.model = model
        self.reservoirs = tuple(reservoirs)
        self.method = method
        self.green = green if green is not None else UndrivenGreen(model, self.reservoirs)
        if method == "perturbative":
            k_max = model.max_harmonic
        elif k_max is None:
            k_max = choose_kmax(model, self.reservoirs, green=self.green)
        self.k_max = int(k_max)
        self.condition_limit = condition_limit
        self._cache: Dict[float, SidebandBlocks] = {}
        self._lock = threading.Lock()

    @property
    def n_sites(self) -> int:
        return self.model.n_sites

    @property
    def drive_freq(self) -> float:
        return self.model.drive_freq

    @property
    def sidebands(self) -> np.ndarray:
        return np.arange(-self.k_max, self.k_max + 1)

    def at(self, omega: float) -> SidebandBlocks:
        "Return the (cached) amplitudes at ``omega``."
        omega = float(omega)
        cached = self._cache.get(omega)
        if cached is not None:
            return cached
        if self.method == "perturbative":
            result = perturbative_sidebands(self.model, self.reservoirs, omega, self.green)
        else:
            result = solve_sidebands(
                self.model, self.reservoirs, omega, self.k_max, self.green, self.condition_limit
            )
        with self._lock:
            self._cache[omega] = result
        return result

    def __call__(self, omega: float) -> np.ndarray:
        "Return the stacked :math:`A_k(\\omega)`, shape ``(2 * k_max + 1, n, n)``."
        return self.at(omega).blocks

    def solve(self, omegas: Iterable[float]) -> Tuple[SidebandBlocks, ...]:
        "Solve on an explicit grid (populating the cache)."
        return tuple(self.at(omega) for omega in omegas)

    @property
    def omegas(self) -> np.ndarray:
        "The solved frequencies, ascending."
        with self._lock:
            return np.array(sorted(self._cache))

    @property
    def residuals(self) -> np.ndarray:
        "Residual norms aligned with :attr:`omegas`."
        with self._lock:
            return np.array([self._cache[w].residual for w in sorted(self._cache)])

    def tail_ratio(self, omega: float) -> float:
        "Return :math:`\\|A_{\\pm k_{max}}\\| / \\|A_0\\|`, a bound on the truncated tail."
        blocks = self.at(omega)
        head = np.linalg.norm(blocks[0])
        tail = max(np.linalg.norm(blocks[self.k_max]), np.linalg.norm(blocks[-self.k_max]))
        return float(tail / head) if head > 0 else 0.0

    def peak_hints(self) -> Tuple[PeakHint, ...]:
        """Return quadrature hints for the resonances :math:`\\pm\\Omega_a - k\\omega_d`
        of every sideband that fall on positive frequencies."""
        hints = []
        for resonance in self.green.resonances():
            if not resonance.width > 0:
                continue
            for k in self.sidebands:
                for center in (resonance.center, -resonance.center):
                    shifted = center - k * self.drive_freq
                    if shifted > 0:
                        hints.append(PeakHint(shifted, resonance.width))
        return tuple(sorted(set(hints), key=lambda h: h.center))

    def harmonic_points(self) -> Tuple[float, ...]:
        "Frequencies :math:`m|\\omega_d|` where some :math:`s_k` changes sign."
        return tuple(m * abs(self.drive_freq) for m in range(1, self.k_max + 1))

    def with_model(self, model: NetworkModel) -> "FloquetSolution":
        "Return an empty solution for another drive of the same static network."
        return FloquetSolution(
            model,
            self.reservoirs,
            self.k_max if self.method == "banded" else None,
            self.method,
            self.green,
            self.condition_limit,
        )

    def time_reversed(self) -> "FloquetSolution":
        "Return an empty solution for the drive :math:`V(-t)`."
        return self.with_model(self.model.time_reversed())

    def with_drive_freq(self, drive_freq: float) -> "FloquetSolution":
        return self.with_model(self.model.with_drive_freq(drive_freq))

    def __repr__(self) -> str:
        return (
            f"FloquetSolution(n_sites={self.n_sites}, k_max={self.k_max}, "
            f"method={self.method!r}, solved={len(self._cache)})"
        )

