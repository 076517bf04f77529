import numpy as np
import pytest

from floquetheat.errors import OracleError
from floquetheat.kernels.damping import static_damping
from floquetheat.kernels.noise import coth_factor
from floquetheat.model import NetworkModel, two_bath_setup
from floquetheat.oracle import (
    DiscretizedBath,
    compare_with_floquet,
    discretize,
    measure_heat,
    simulate,
)
from test_helpers.networks import single_oscillator, two_site_chain


def test_discretization_reproduces_the_static_damping():
    _, reservoirs = two_site_chain()
    for reservoir in reservoirs:
        (bath,) = discretize(reservoir, 600, 6.0)
        np.testing.assert_allclose(
            bath.static_damping, static_damping([reservoir]).sum(), rtol=1e-2
        )
        assert bath.site == reservoir.sites[0]
        assert bath.name == reservoir.name


def test_discretization_arguments():
    _, reservoirs = single_oscillator()
    with pytest.raises(ValueError):
        discretize(reservoirs[0], 0, 3.0)
    with pytest.raises(ValueError):
        discretize(reservoirs[0], 10, -1.0)
    (bath,) = discretize(reservoirs[0], 30, 3.0, name="renamed")
    assert bath.name == "renamed"
    assert bath.recurrence_time == pytest.approx(2 * np.pi / 0.1)


def test_thermal_bath_blocks():
    frequencies = np.array([0.25, 0.75])
    bath = DiscretizedBath(frequencies, np.zeros(2), 0, 0.3)
    xx, pp = bath.thermal_blocks()
    np.testing.assert_allclose(xx * pp, (coth_factor(frequencies, 0.3) / 2) ** 2)


def test_uncoupled_oscillator_stays_in_its_ground_state():
    model = NetworkModel.undriven(np.eye(1), np.eye(1))
    bath = DiscretizedBath((np.arange(20) + 0.5) * 0.15, np.zeros(20), 0, 0.5, "a")
    trajectory = simulate(model, [bath], burn_in_periods=2, periods=1)
    assert trajectory.system.shape == (64, 2, 2)
    np.testing.assert_allclose(trajectory.system[-1], 0.5 * np.eye(2), atol=1e-10)
    assert trajectory.periodicity < 1e-10
    heat = measure_heat(trajectory, 0)
    assert heat.system_side == 0
    assert heat.bath_side == 0
    assert trajectory.final_state.dimension == 21


def test_run_beyond_the_recurrence_time_is_refused():
    model, reservoirs = single_oscillator()
    baths = [b for r in reservoirs for b in discretize(r, 10, 3.0)]
    with pytest.raises(OracleError, match="recurrence"):
        simulate(model, baths, burn_in_periods=20)


@pytest.mark.slow
def test_oracle_agrees_with_the_floquet_rates():
    model, reservoirs = single_oscillator(temperatures=(0.6, 0.2))
    comparison = compare_with_floquet(model, reservoirs, n_modes=200, burn_in_periods=12)
    assert comparison.names == ("a", "b")
    assert comparison.floquet[0] > 0
    assert comparison.oracle[0] > 0
    assert comparison.max_relative < 0.15
    np.testing.assert_allclose(comparison.bath_side, -comparison.oracle, rtol=0.05, atol=1e-8)


@pytest.mark.slow
def test_oracle_agrees_on_the_two_bath_cooling_setup():
    # At gamma0 = 1e-3 the relaxation time is far beyond any affordable recurrence time,
    # so the same setup is checked at a coupling where 50 periods suffice to relax.
    model, reservoirs = two_bath_setup(gamma0=0.05, temperature=0.1)
    comparison = compare_with_floquet(
        model, reservoirs, n_modes=300, omega_max=2.0, burn_in_periods=50
    )
    assert comparison.names == ("alpha", "beta")
    scale = np.max(np.abs(comparison.floquet))
    np.testing.assert_allclose(comparison.oracle, comparison.floquet, rtol=0, atol=0.05 * scale)
