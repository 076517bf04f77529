import math
from dataclasses import replace

import numpy as np
import pytest

from floquetheat import cooling
from floquetheat.cooling import (
    COOLING_QUADRATURE,
    CoolingProtocol,
    CoolingRates,
    CoolingSetup,
    HeatRateTable,
    find_tmin,
    integrate_trajectory,
    scan_tmin,
)
from floquetheat.errors import DomainError, QuadratureError, UnsupportedConfigurationError


def _table(total):
    temperatures = np.geomspace(1e-5, 1.0, 21)
    return HeatRateTable(
        tuple(CoolingRates(t, 1.0 - t, rp=total(t), rh=0.0, nrh=0.0) for t in temperatures)
    )


@pytest.fixture(scope="module")
def setup():
    return CoolingSetup.two_bath(gamma0=1e-3)


def test_protocol_validation():
    with pytest.raises(ValueError):
        CoolingProtocol(strategy="greedy")
    with pytest.raises(ValueError):
        CoolingProtocol(strategy="fixed")
    with pytest.raises(ValueError):
        CoolingProtocol(dimension=4)
    with pytest.raises(ValueError):
        CoolingProtocol(heat_capacity=0.0)
    protocol = CoolingProtocol(heat_capacity=2.0, dimension=3)
    assert protocol.capacity(0.5) == pytest.approx(0.25)
    assert protocol.drive_for(0.1) is None
    assert CoolingProtocol("fixed", drive_freq=0.8).drive_for(0.1) == 0.8


def test_rates_bookkeeping():
    rates = CoolingRates(0.1, 0.9, rp=3.0, rh=-1.0, nrh=-0.5)
    assert rates.total == 1.5
    assert rates.net_cooling == 1.5


def test_table_interpolates_and_clamps():
    table = _table(lambda t: t**2)
    np.testing.assert_allclose(table(table.temperatures[7]).rp, table.temperatures[7] ** 2, rtol=1e-12)
    assert table(2.0).rp == pytest.approx(1.0)
    assert table(2.0).temperature == 2.0
    assert table(1e-3).drive_freq == pytest.approx(1.0 - 1e-3, rel=1e-3)
    with pytest.raises(ValueError):
        HeatRateTable((CoolingRates(0.2, 0.8, 0, 0, 0), CoolingRates(0.1, 0.9, 0, 0, 0)))


def test_trajectory_reaches_the_floor():
    # With Q = T^2 and C = T, d log T / dt = -1.
    protocol = CoolingProtocol(floor=1e-4, t_max=100.0)
    trajectory = integrate_trajectory(protocol, None, t_start=0.1, table=_table(lambda t: t**2))
    assert trajectory.termination == "floor"
    assert trajectory.reached_floor
    assert trajectory.final_temperature == pytest.approx(1e-4, rel=1e-6)
    assert trajectory.times[-1] == pytest.approx(math.log(1e3), rel=1e-2)
    assert np.all(np.diff(trajectory.temperatures) < 0)
    assert trajectory.quasi_static_violations.all()


def test_trajectory_without_heat_exchange_is_stationary():
    protocol = CoolingProtocol(floor=1e-4, t_max=10.0)
    trajectory = integrate_trajectory(protocol, None, t_start=0.1, table=_table(lambda t: 0.0))
    assert trajectory.termination == "stationary"
    assert trajectory.temperatures.tolist() == [0.1, 0.1]


def test_trajectory_starts_above_the_floor():
    with pytest.raises(ValueError):
        integrate_trajectory(CoolingProtocol(floor=0.1), None, t_start=0.05, table=_table(lambda t: t))


def test_setup_evaluation_points(setup):
    assert setup.omega0 == pytest.approx(1.0, rel=1e-10)
    model, reservoirs = setup.at(0.1)
    assert model.drive_freq == pytest.approx(0.9)
    assert [r.temperature for r in reservoirs] == [0.1, 0.1]
    assert setup.at(0.1, drive_freq=0.7)[0].drive_freq == 0.7
    with pytest.raises(DomainError):
        setup.at(-0.1)
    with pytest.raises(UnsupportedConfigurationError):
        setup.at(1.5)
    with pytest.raises(ValueError):
        find_tmin(setup, floor=0.1, ceiling=0.01)


def test_coupling_changes_keep_the_renormalized_frequency(setup):
    weaker = setup.with_coupling(1e-5)
    assert weaker.gamma0 == 1e-5
    assert weaker.omega0 == pytest.approx(setup.omega0, rel=1e-10)
    assert weaker.reservoirs[1].spectral.strength == pytest.approx(1e-5)



def _fake_rates(self, temperature, drive_freq=None):
    # Balance at T = gamma0; the weakest coupling cannot be evaluated.
    if self.gamma0 < 1e-5:
        raise QuadratureError("stalled", achieved=1e-18, term=("nrh",))
    return CoolingRates(temperature, 1.0 - temperature, temperature**2, 0.0, -self.gamma0 * temperature)


def test_failed_couplings_do_not_end_a_scan(setup, monkeypatch):
    monkeypatch.setattr(CoolingSetup, "rates", _fake_rates)
    outcome = find_tmin(setup.with_coupling(1e-6))
    assert outcome.status == "failed"
    assert math.isnan(outcome.t_min)
    assert "stalled" in outcome.message
    result = scan_tmin(setup, [1e-6, 1e-3, 3e-3, 1e-2, 3e-2])
    assert [o.status for o in result.outcomes] == ["failed"] + ["found"] * 4
    np.testing.assert_allclose(result.t_min[1:], [1e-3, 3e-3, 1e-2, 3e-2], rtol=1e-2)
    assert result.slope == pytest.approx(1.0, abs=1e-2)


def _fake_component(achieved):
    seen = {}

    def component(name, sol, reservoirs, spec, integrands):
        seen[name] = spec
        if name == "nrh":
            raise QuadratureError("stalled", achieved=achieved, estimate=np.array([-1.0, 0.3]))
        return {"rp": np.array([2.0, -2.0]), "rh": np.array([-0.5, 0.1])}[name], 0.0

    return component, seen


def test_heating_tolerance_follows_the_pumping_rate(setup, monkeypatch, caplog):
    component, seen = _fake_component(achieved=1e-5)
    monkeypatch.setattr(cooling, "heat_component", component)
    rates = setup.rates(0.1)
    assert (rates.rp, rates.rh, rates.nrh) == (2.0, -0.5, -1.0)
    assert seen["rp"].abs_tol == COOLING_QUADRATURE.abs_tol
    assert seen["nrh"].abs_tol == pytest.approx(2.0 * COOLING_QUADRATURE.rel_tol)
    assert "unconverged nrh" in caplog.text


def test_unconverged_heating_far_from_the_pumping_rate_is_raised(setup, monkeypatch):
    component, _ = _fake_component(achieved=1e-2)
    monkeypatch.setattr(cooling, "heat_component", component)
    with pytest.raises(QuadratureError):
        setup.rates(0.1)

@pytest.mark.slow
def test_adaptive_drive_cools_the_gapped_reservoir(setup):
    rates = setup.rates(0.1)
    assert rates.drive_freq == pytest.approx(0.9)
    assert rates.rp > 0
    assert rates.rh <= 0
    assert rates.nrh <= 0
    assert rates.net_cooling > 0
    resonant_only = replace(setup, zero_nrh=True).rates(0.1)
    assert resonant_only.nrh == 0.0
    assert resonant_only.rp == pytest.approx(rates.rp, rel=1e-6)


@pytest.mark.slow
def test_table_reproduces_the_pipeline_on_its_grid(setup):
    protocol = CoolingProtocol()
    table = HeatRateTable.build(setup, protocol, 0.05, 0.1, points=3)
    direct = setup.rates(0.1)
    assert table(0.1).rp == pytest.approx(direct.rp, rel=1e-10)
    assert table(0.1).nrh == pytest.approx(direct.nrh, rel=1e-10)


@pytest.mark.slow
@pytest.mark.parametrize("lambda_alpha, slope", [(1.0, 1 / 2), (2.0, 1 / 3)])
def test_minimum_temperature_power_law(lambda_alpha, slope):
    setup = CoolingSetup.two_bath(gamma0=1e-4, lambda_alpha=lambda_alpha)
    result = scan_tmin(setup, np.geomspace(1e-6, 1e-4, 8))
    assert [o.status for o in result.outcomes] == ["found"] * 8
    assert np.all(result.t_min > 0)
    assert np.all(np.diff(result.t_min) >= 0)
    assert result.slope == pytest.approx(slope, abs=0.05)


@pytest.mark.slow
def test_heating_stops_the_trajectory_at_the_minimum_temperature(setup):
    outcome = find_tmin(setup)
    assert outcome.found
    assert 0 < outcome.t_min < 0.1

    with_heating = integrate_trajectory(CoolingProtocol(floor=outcome.t_min / 2), setup, t_start=0.1)
    assert with_heating.termination == "stationary"
    assert with_heating.final_temperature == pytest.approx(outcome.t_min, rel=0.2)

    resonant_only = integrate_trajectory(
        CoolingProtocol(floor=outcome.t_min / 2), replace(setup, zero_nrh=True), t_start=0.1
    )
    assert resonant_only.termination == "floor"
    assert resonant_only.reached_floor
