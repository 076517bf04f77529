"""The ``floquetheat`` command line.

Every command reads a TOML configuration (the bundled two-bath cooling fixture by
default), runs one computation and writes ``<command>.csv`` to the output directory.
Each CSV starts with ``#`` comment lines recording the configuration hash, the
quadrature tolerances and the sideband truncation, followed by a header row.

Exit codes: 0 on success, 1 when a validation suite or oracle comparison fails, 2 on a
configuration or numerical error.
"""

import argparse
import csv
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from floquetheat.config import FIXTURES, RunConfig, load_config
from floquetheat.cooling import CoolingProtocol, CoolingSetup, HeatRateTable, integrate_trajectory, scan_tmin
from floquetheat.covariance import direct_work_rate, min_symplectic_eigenvalue, mean_energy, sigma_at, sigma_blocks, symplectic_eigenvalues
from floquetheat.errors import FloquetHeatError
from floquetheat.floquet.sidebands import FloquetSolution
from floquetheat.floquet.symmetry import check_symmetries
from floquetheat.kernels.quadrature import QuadratureSpec
from floquetheat.model import NetworkModel, ReservoirSpec, with_temperatures
from floquetheat.oracle import compare_with_floquet
from floquetheat.scan import ForAll, Grid, pool_vmap
from floquetheat.thermo.heat import HeatRateReport, heat_rates
from floquetheat.util.validation import validate

log = logging.getLogger(__name__)

DEFAULT_CONFIG = FIXTURES / "two_bath_cooling.toml"
#: Bounds of the validation suite.
FIRST_LAW_RTOL = 1e-6
SECOND_LAW_TOL = 1e-8
SIGN_TOL = 1e-12
SYMMETRY_TOL = 1e-8
HEISENBERG_TOL = 1e-6
#: Work rate from the covariance against the one from the heat rates, relative to the
#: largest heat rate.
WORK_RATE_RTOL = 1e-4
WORK_RATE_ATOL = 1e-9

Row = Sequence[Any]


def _format(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (float, np.floating)):
        return repr(float(value)) if not math.isfinite(value) else f"{float(value):.12e}"
    return str(value)


def write_csv(
    path: Path,
    columns: Sequence[str],
    rows: Iterable[Row],
    config: RunConfig,
    spec: QuadratureSpec,
    k_max: Any,
    meta: Optional[Dict[str, Any]] = None,
) -> Path:
    """Write ``rows`` under a comment block recording how they were computed.

    Floats are written with a fixed format, so the same configuration gives the same
    bytes."""
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {
        "config_hash": config.config_hash(),
        "abs_tol": spec.abs_tol,
        "rel_tol": spec.rel_tol,
        "k_max": k_max,
        **(meta or {}),
    }
    with open(path, "w", newline="") as f:
        for key, value in header.items():
            f.write(f"# {key}: {_format(value)}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format(v) for v in row])
    log.info("Wrote %s.", path)
    return path


def _flatten(nested, depth: int) -> List[Any]:
    if depth == 0:
        return [nested]
    return [item for inner in nested for item in _flatten(inner, depth - 1)]


def run_grid(kernel: Callable, axes: Dict[str, Sequence[float]], vmap_impl) -> List[Any]:
    """Run ``kernel`` over the product of ``axes`` (row-major) and return a flat list.

    Only the outermost axis is distributed over ``vmap_impl``."""
    if not axes:
        return [kernel()]
    first, *rest = axes
    looped = kernel
    if rest:
        looped = ForAll(*rest)(kernel)
    looped = ForAll(first, vmap_impl=vmap_impl)(looped)
    return _flatten(looped(Grid(axes)), len(axes))


@dataclass
class _HeatRatesAt:
    "Picklable kernel of the ``heat-rates`` command."

    model: NetworkModel
    reservoirs: Tuple[ReservoirSpec, ...]
    k_max: Optional[int]
    method: str
    spec: QuadratureSpec

    def __call__(self, temperature: Optional[float] = None, drive_freq: Optional[float] = None) -> HeatRateReport:
        model = self.model if drive_freq is None else self.model.with_drive_freq(drive_freq)
        reservoirs = self.reservoirs
        if temperature is not None:
            reservoirs = tuple(with_temperatures(reservoirs, temperature))
        sol = FloquetSolution(model, reservoirs, self.k_max, self.method)
        return heat_rates(sol, reservoirs, self.spec)


class _Run:
    "What every command needs: the configuration, its network, and where to write."

    def __init__(self, config: RunConfig, args: argparse.Namespace):
        self.config = config
        self.args = args
        self.model, self.reservoirs = config.build()
        self.spec = config.solver.quadrature()
        self.vmap = pool_vmap(config.threads, progress=sys.stderr.isatty(), desc=args.command)

    def output(self, name: str) -> Path:
        return Path(self.config.output.directory) / f"{name}.csv"

    def solution(self) -> FloquetSolution:
        return FloquetSolution(self.model, self.reservoirs, self.config.solver.fixed_kmax, self.config.solver.method)

    def cooling_setup(self) -> CoolingSetup:
        c = self.config.cooling
        return CoolingSetup(
            self.model,
            tuple(self.reservoirs),
            alpha=c.alpha,
            gamma0=c.gamma0,
            method=c.method,
            zero_nrh=c.zero_nrh,
            k_max=self.config.solver.fixed_kmax,
        )


def heat_rates_command(run: _Run) -> int:
    scan = run.config.scan
    axes = {}
    if scan.temperatures:
        axes["temperature"] = scan.temperatures
    if scan.drive_freqs:
        axes["drive_freq"] = scan.drive_freqs
    kernel = _HeatRatesAt(run.model, tuple(run.reservoirs), run.config.solver.fixed_kmax, run.config.solver.method, run.spec)
    reports = run_grid(kernel, axes, run.vmap)
    rows = [
        (
            heat.temperature, report.drive_freq, heat.name, heat.total, heat.rp, heat.rh,
            heat.nrh, heat.vacuum_residual, report.work_rate, report.first_law_residual,
            report.entropy_production,
        )
        for report in reports
        for heat in report.heats
    ]
    columns = [
        "temperature", "drive_freq", "reservoir", "total", "rp", "rh", "nrh",
        "vacuum_residual", "work_rate", "first_law_residual", "entropy_production",
    ]
    k_max = sorted({r.k_max for r in reports})
    write_csv(run.output("heat-rates"), columns, rows, run.config, run.spec, k_max[0] if len(k_max) == 1 else k_max)
    return 0


def tmin_scan_command(run: _Run) -> int:
    setup = run.cooling_setup()
    cooling = run.config.cooling
    result = scan_tmin(setup, run.config.scan.gammas, run.vmap, cooling.floor, cooling.ceiling)
    rows = [
        (o.gamma0, o.status, o.t_min, o.bracket[0], o.bracket[1])
        for o in result.outcomes
    ]
    meta = {
        "slope": result.slope,
        "slope_halfwidth": result.slope_halfwidth,
        "intercept": result.intercept,
        "zero_nrh": setup.zero_nrh,
    }
    write_csv(
        run.output("tmin-scan"),
        ["gamma0", "status", "t_min", "bracket_low", "bracket_high"],
        rows, run.config, setup.spec, setup.k_max if setup.method == "banded" else "perturbative", meta,
    )
    return 0


def trajectory_command(run: _Run) -> int:
    setup = run.cooling_setup()
    c = run.config.cooling
    protocol = CoolingProtocol(c.strategy, c.drive_freq, c.heat_capacity, c.dimension, c.floor, c.t_max)
    table = None
    if not c.exact:
        table = HeatRateTable.build(setup, protocol, c.floor, c.t_start, c.table_points, progress=sys.stderr.isatty())
    trajectory = integrate_trajectory(protocol, setup, c.t_start, table, exact=c.exact)
    rows = zip(
        trajectory.times, trajectory.temperatures, trajectory.drive_freqs, trajectory.rp,
        trajectory.nrh, trajectory.total, trajectory.quasi_static_violations,
    )
    meta = {
        "termination": trajectory.termination,
        "final_temperature": trajectory.final_temperature,
        "zero_nrh": setup.zero_nrh,
    }
    write_csv(
        run.output("trajectory"),
        ["t", "temperature", "drive_freq", "rp", "nrh", "total", "quasi_static_violation"],
        rows, run.config, setup.spec, setup.k_max if setup.method == "banded" else "perturbative", meta,
    )
    return 0


def _phase_space_labels(n: int) -> List[str]:
    return [f"x{i}" for i in range(n)] + [f"p{i}" for i in range(n)]


def covariance_command(run: _Run) -> int:
    sol = run.solution()
    series = sigma_blocks(sol, run.reservoirs, run.spec)
    labels = _phase_space_labels(series.n_sites)
    pairs = [(a, b) for a in range(len(labels)) for b in range(a, len(labels))]
    rows = []
    for t in series.times(run.config.output.samples):
        sigma = sigma_at(series, t)
        nu = symplectic_eigenvalues(sigma)[0]
        rows.append((t, mean_energy(series, t), nu, *(sigma[a, b] for a, b in pairs)))
    columns = ["t", "energy", "min_symplectic", *(f"{labels[a]}_{labels[b]}" for a, b in pairs)]
    meta = {"direct_work_rate": direct_work_rate(series), "error_estimate": series.error_estimate}
    write_csv(run.output("covariance"), columns, rows, run.config, run.spec, sol.k_max, meta)
    return 0


def _suite(run: _Run) -> List[Tuple[str, float, float, bool]]:
    "Run every check of the validation suite, returning ``(name, value, bound, passed)``."
    report = validate(run.model, run.reservoirs)
    checks = [(f"model: {v}", math.nan, math.nan, False) for v in report.violations]
    if not report.passed:
        return checks
    checks.append(("model", 0.0, 0.0, True))

    sol = run.solution()
    rates = heat_rates(sol, run.reservoirs, run.spec)
    scale = max(1.0, float(np.sum(np.abs(rates.totals))))
    residual = abs(rates.first_law_residual)
    checks.append(("first_law", residual, FIRST_LAW_RTOL * scale, residual <= FIRST_LAW_RTOL * scale))
    entropy = rates.entropy_production
    checks.append(("second_law", entropy, -SECOND_LAW_TOL, entropy >= -SECOND_LAW_TOL))
    if rates.time_reversal_invariant:
        for heat in rates.heats:
            bound = SIGN_TOL + heat.error_estimate
            checks.append((f"rh_sign[{heat.name}]", heat.rh, bound, heat.rh <= bound))
            checks.append((f"nrh_sign[{heat.name}]", heat.nrh, bound, heat.nrh <= bound))
        if sol.k_max > 0:
            frequencies, _ = sol.green.normal_modes()
            probes = [f * s for f in frequencies for s in (0.5, 0.9, 1.1)]
            violation = check_symmetries(sol, sol, probes).max_violation
            checks.append(("symmetries", violation, SYMMETRY_TOL, violation < SYMMETRY_TOL))
    series = sigma_blocks(sol, run.reservoirs, run.spec)
    nu = min_symplectic_eigenvalue(series, run.config.output.samples)
    checks.append(("heisenberg", nu, 0.5 - HEISENBERG_TOL, nu >= 0.5 - HEISENBERG_TOL))
    rates = rates.with_direct_work_rate(series)
    discrepancy = abs(rates.work_rate_discrepancy)
    bound = WORK_RATE_RTOL * float(np.max(np.abs(rates.totals), initial=0.0)) + WORK_RATE_ATOL
    checks.append(("work_rate", discrepancy, bound, discrepancy <= bound))
    return checks


def validate_command(run: _Run) -> int:
    checks = _suite(run)
    failed = [name for name, *_, passed in checks if not passed]
    write_csv(
        run.output("validate"), ["check", "value", "bound", "passed"], checks, run.config,
        run.spec, run.config.solver.k_max, {"failed": len(failed)},
    )
    for name, value, bound, passed in checks:
        print(f"{'PASS' if passed else 'FAIL'} {name} ({_format(value)} vs {_format(bound)})")
    return 1 if failed else 0


def oracle_compare_command(run: _Run) -> int:
    o = run.config.oracle
    comparison = compare_with_floquet(
        run.model, run.reservoirs, o.modes, o.omega_max, o.burn_in_periods, o.periods,
        o.samples_per_period, run.config.solver.fixed_kmax, run.spec,
    )
    rows = zip(comparison.names, comparison.oracle, comparison.bath_side, comparison.floquet, comparison.relative)
    meta = {"modes": o.modes, "omega_max": o.omega_max, "max_relative": comparison.max_relative}
    write_csv(
        run.output("oracle-compare"), ["reservoir", "oracle", "bath_side", "floquet", "relative"],
        rows, run.config, run.spec, run.config.solver.k_max, meta,
    )
    return 1 if comparison.max_relative > o.tolerance else 0


COMMANDS: Dict[str, Tuple[Callable[[_Run], int], str]] = {
    "heat-rates": (
        heat_rates_command,
        "Heat rates of every reservoir over the [scan] temperature and drive grids. "
        "Columns: temperature, drive_freq, reservoir, total, rp, rh, nrh, "
        "vacuum_residual, work_rate, first_law_residual, entropy_production.",
    ),
    "tmin-scan": (
        tmin_scan_command,
        "Minimum temperature of the cooled reservoir over the [scan] coupling grid, with "
        "the fitted log-log slope in the header. Columns: gamma0, status, t_min, "
        "bracket_low, bracket_high.",
    ),
    "trajectory": (
        trajectory_command,
        "Cooling trajectory of the [cooling] protocol. Columns: t, temperature, "
        "drive_freq, rp, nrh, total, quasi_static_violation.",
    ),
    "covariance": (
        covariance_command,
        "Asymptotic covariance over one drive period. Columns: t, energy, "
        "min_symplectic, and the upper triangle of sigma over (x0.., p0..).",
    ),
    "validate": (
        validate_command,
        "First and second law, sign laws, symmetries and the Heisenberg bound. "
        "Columns: check, value, bound, passed. Exits 1 if any check fails.",
    ),
    "oracle-compare": (
        oracle_compare_command,
        "Heat rates of the time-domain oracle against the Floquet pipeline. Columns: "
        "reservoir, oracle, bath_side, floquet, relative. Exits 1 beyond [oracle] tolerance.",
    ),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=DEFAULT_CONFIG, help="TOML configuration (default: the bundled cooling fixture)")
    common.add_argument("--out", help="output directory (overrides [output] directory)")
    common.add_argument("--kmax", type=int, help="sideband truncation (overrides [solver] k_max)")
    common.add_argument("--tol", type=float, help="relative quadrature tolerance (overrides [solver] rel_tol)")
    common.add_argument("--threads", type=int, help="worker processes for grid scans")
    common.add_argument("--zero-nrh", action="store_true", help="drop non-resonant heating in the cooling commands")
    common.add_argument("--lambda", dest="lambda_alpha", type=float, help="spectral exponent of the cooled reservoir")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")

    parser = argparse.ArgumentParser(
        prog="floquetheat",
        description="Heat flows and cooling limits of driven linear quantum networks.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    for name, (_, description) in COMMANDS.items():
        commands.add_parser(name, parents=[common], help=description.split(". ")[0], description=description)
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    overrides: Dict[str, Any] = {}
    solver = {}
    if args.kmax is not None:
        solver["k_max"] = args.kmax
    if args.tol is not None:
        solver["rel_tol"] = args.tol
    if solver:
        overrides["solver"] = solver
    if args.out is not None:
        overrides["output"] = {"directory": args.out}
    if args.threads is not None:
        overrides["threads"] = args.threads
    if args.zero_nrh:
        overrides["cooling"] = {"zero_nrh": True}
    if args.lambda_alpha is not None:
        overrides["scan"] = {"lambda_alpha": args.lambda_alpha}
    return overrides


def _context(error: BaseException) -> str:
    "The module where ``error`` was raised."
    module = __name__
    tb = error.__traceback__
    while tb is not None:
        module = tb.tb_frame.f_globals.get("__name__", module)
        tb = tb.tb_next
    return module


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    command, _ = COMMANDS[args.command]
    try:
        config = load_config(args.config, _overrides(args))
        return command(_Run(config, args))
    except (FloquetHeatError, ValueError, np.linalg.LinAlgError) as e:
        print(f"floquetheat {args.command}: {_context(e)}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
