import numpy as np
import pytest

from floquetheat.errors import InstabilityError
from floquetheat.floquet.green import UndrivenGreen
from floquetheat.floquet.sidebands import (
    FloquetSolution,
    choose_kmax,
    perturbative_sidebands,
    solve_sidebands,
)
from floquetheat.model import NetworkModel, two_bath_setup
from test_helpers.networks import single_oscillator, two_site_chain


def test_undriven_amplitudes_are_the_green_function():
    model, reservoirs = single_oscillator(v1=0.0)
    blocks = solve_sidebands(model, reservoirs, 0.6, k_max=2)
    np.testing.assert_allclose(blocks[0], UndrivenGreen(model, reservoirs)(0.6), rtol=1e-12)
    for k in (-2, -1, 1, 2):
        np.testing.assert_array_equal(blocks[k], 0)
    np.testing.assert_array_equal(blocks[5], 0)


def test_banded_solve_satisfies_the_block_equations():
    model, reservoirs = two_site_chain()
    blocks = solve_sidebands(model, reservoirs, 0.37, k_max=6)
    assert blocks.blocks.shape == (13, 2, 2)
    assert blocks.residual < 1e-12
    assert blocks.condition < 1e6


def test_weak_drive_matches_second_order():
    model, reservoirs = single_oscillator(v1=1e-3)
    exact = solve_sidebands(model, reservoirs, 0.3, k_max=4)
    approximate = perturbative_sidebands(model, reservoirs, 0.3)
    assert approximate.k_max == 1
    for k in (-1, 0, 1):
        np.testing.assert_allclose(approximate[k], exact[k], rtol=1e-4)


def test_amplitudes_decay_with_sideband_order():
    model, reservoirs = single_oscillator()
    sol = FloquetSolution(model, reservoirs, k_max=8)
    norms = np.linalg.norm(sol(0.3), axis=(1, 2))
    assert max(norms[0], norms[-1]) < 1e-4 * norms[8]
    assert sol.tail_ratio(0.3) < 1e-4



@pytest.mark.parametrize("omega", [0.05, 0.1, 0.5, 0.95, 1.5])
def test_truncation_has_converged_on_the_cooling_setup(omega):
    model, reservoirs = two_bath_setup(gamma0=1e-3)
    coarse = solve_sidebands(model, reservoirs, omega, k_max=6)
    fine = solve_sidebands(model, reservoirs, omega, k_max=8)
    scale = np.max(np.abs(fine.blocks))
    for k in range(-6, 7):
        assert np.max(np.abs(coarse[k] - fine[k])) < 1e-9 * scale

def test_ill_conditioned_systems_are_reported():
    model, reservoirs = single_oscillator()
    with pytest.raises(InstabilityError) as info:
        solve_sidebands(model, reservoirs, 0.9, k_max=4, condition_limit=10.0)
    assert -4 <= info.value.sideband <= 4
    assert info.value.condition > 10.0


def test_singular_systems_are_reported():
    model = NetworkModel.undriven([[1.0]], [[1.0]])
    with pytest.raises(InstabilityError, match="singular"):
        solve_sidebands(model, [], 1.0, k_max=0)


def test_truncation_is_chosen_for_driven_models_only():
    model, reservoirs = single_oscillator()
    assert choose_kmax(model.with_drive_scaled(0.0), reservoirs) == 0
    k_max = choose_kmax(model, reservoirs)
    assert 4 <= k_max <= 64


def test_solution_caches_solves():
    model, reservoirs = single_oscillator()
    sol = FloquetSolution(model, reservoirs, k_max=4)
    first = sol.at(0.5)
    assert sol.at(0.5) is first
    sol.solve([0.2, 0.8])
    np.testing.assert_array_equal(sol.omegas, [0.2, 0.5, 0.8])
    assert sol.residuals.shape == (3,)
    assert "solved=3" in repr(sol)


def test_peak_hints_follow_the_sidebands():
    model, reservoirs = single_oscillator()
    sol = FloquetSolution(model, reservoirs, k_max=2)
    (resonance,) = sol.green.resonances()
    centers = [h.center for h in sol.peak_hints()]
    for k in (-2, -1, 0, 1, 2):
        shifted = resonance.center - k * model.drive_freq
        if shifted > 0:
            assert min(abs(c - shifted) for c in centers) < 1e-12
    assert all(c > 0 for c in centers)
    assert sol.harmonic_points() == pytest.approx((0.45, 0.9))


def test_derived_solutions():
    model, reservoirs = single_oscillator()
    sol = FloquetSolution(model, reservoirs, k_max=3)
    assert sol.with_drive_freq(0.5).drive_freq == 0.5
    assert sol.with_drive_freq(0.5).k_max == 3
    assert sol.time_reversed().model == model.time_reversed()
    assert FloquetSolution(model, reservoirs, method="perturbative").k_max == 1
    with pytest.raises(ValueError):
        FloquetSolution(model, reservoirs, method="dense")
