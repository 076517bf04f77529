import numpy as np
import pytest

from floquetheat.errors import (
    DegeneracyError,
    OutOfRegimeError,
    UnsupportedConfigurationError,
)
from floquetheat.floquet.green import UndrivenGreen
from floquetheat.model import NetworkModel, ReservoirSpec, two_bath_setup
from floquetheat.weakcoupling import (
    adaptive_heat,
    cooling_criterion,
    normal_modes,
    resonant_heat_closed_form,
    resonant_transition_integral,
    weak_green,
)
from test_helpers.networks import ohmic, single_oscillator


@pytest.fixture(scope="module")
def cooling_basis():
    model, reservoirs = two_bath_setup(gamma0=1e-3, drive_freq=0.9)
    return model, normal_modes(model, reservoirs)


def test_mode_expansion_off_resonance():
    model, reservoirs = single_oscillator(strengths=(2e-3, 1e-3), v1=0.0)
    basis = normal_modes(model, reservoirs)
    exact = UndrivenGreen(model, reservoirs)
    for omega in (0.3, 0.6, 1.5):
        np.testing.assert_allclose(weak_green(basis, omega), exact(omega), rtol=1e-2)


def test_gapped_reservoir_is_cooled(cooling_basis):
    _, basis = cooling_basis
    assert cooling_criterion(0, basis, 0.9) == 1
    assert cooling_criterion(1, basis, 0.9) == -1


def test_closed_form_signs(cooling_basis):
    model, basis = cooling_basis
    v1 = model.fourier(1).real
    cooled = resonant_heat_closed_form(0, basis, v1, 0.9, temperature=0.1)
    heated = resonant_heat_closed_form(1, basis, v1, 0.9, temperature=0.1)
    assert cooled > 0 > heated
    assert resonant_heat_closed_form(0, basis, v1, 0.9, temperature=0.0) == 0.0


def test_transition_integral_scales_with_the_drive(cooling_basis):
    model, basis = cooling_basis
    v1 = model.fourier(1).real
    single = resonant_transition_integral(1, 0, basis, v1, 0.9, 0.1)
    double = resonant_transition_integral(1, 0, basis, 2 * v1, 0.9, 0.1)
    assert single > 0
    assert double == pytest.approx(4 * single)


def test_adaptive_form(cooling_basis):
    model, basis = cooling_basis
    v1 = model.fourier(1).real
    assert adaptive_heat(0, basis, v1, 0.0) == 0.0
    low, high = (adaptive_heat(0, basis, v1, t) for t in (0.01, 0.02))
    # Linear in T and in the ohmic density at T.
    assert high / low == pytest.approx(4.0, rel=0.05)
    assert adaptive_heat(0, basis, v1, 0.05, "planck") > adaptive_heat(0, basis, v1, 0.05)
    with pytest.raises(OutOfRegimeError):
        adaptive_heat(0, basis, v1, 0.6)


def test_closed_forms_need_a_drive_below_the_mode(cooling_basis):
    model, basis = cooling_basis
    with pytest.raises(UnsupportedConfigurationError):
        resonant_heat_closed_form(0, basis, model.fourier(1).real, 1.2, 0.1)


def test_closed_forms_need_two_reservoirs():
    model, reservoirs = single_oscillator(strengths=(2e-3, 1e-3), temperatures=(0.1, 0.1))
    reservoirs = reservoirs + [ReservoirSpec.on_sites([0], 1, ohmic(1e-3), 0.1, "c")]
    basis = normal_modes(model, reservoirs)
    with pytest.raises(UnsupportedConfigurationError):
        cooling_criterion(0, basis, 0.5)


def test_degenerate_modes_are_rejected():
    model = NetworkModel.undriven(np.eye(2), np.eye(2))
    reservoirs = [ReservoirSpec.on_sites([0], 2, ohmic(1e-3), 0.1)]
    with pytest.raises(DegeneracyError):
        normal_modes(model, reservoirs)


def test_mode_elements(cooling_basis):
    _, basis = cooling_basis
    assert basis.n_modes == 1
    assert basis.frequencies[0] == pytest.approx(1.0)
    assert basis.element(np.eye(1)) == pytest.approx(1.0)
    assert float(basis.density(0, 1.0)) == 0.0
