import numpy as np
import pytest

from floquetheat.floquet.green import UndrivenGreen
from floquetheat.model import (
    NetworkModel,
    ReservoirSpec,
    two_bath_setup,
    label,
    model_from_dict,
    model_to_dict,
    reservoirs_from_dict,
    reservoirs_to_dict,
    scale_coupling,
    with_temperatures,
)
from floquetheat.spectral import PowerLawCutoff
from test_helpers.networks import ohmic, two_site_chain


def test_negative_harmonics_are_conjugates():
    model = NetworkModel([[1.0]], [[1.0]], {2: [[0.1 + 0.2j]]}, drive_freq=0.5)
    assert model.harmonics == (-2, 2)
    assert model.max_harmonic == 2
    np.testing.assert_array_equal(model.fourier(-2), [[0.1 - 0.2j]])
    np.testing.assert_array_equal(model.fourier(1), [[0.0]])


def test_static_harmonic_is_rejected():
    with pytest.raises(ValueError, match="static potential"):
        NetworkModel([[1.0]], [[1.0]], {0: [[0.1]]})


def test_cosine_drive_in_time():
    model = NetworkModel.cosine_drive([[1.0]], [[2.0]], [[0.1]], drive_freq=0.7)
    assert model.time_reversal_invariant
    for t in np.linspace(0, model.period, 7):
        np.testing.assert_allclose(model.drive_at(t), [[2.0 + 0.2 * np.cos(0.7 * t)]], rtol=1e-14)
        np.testing.assert_allclose(
            model.drive_rate_at(t), [[-0.2 * 0.7 * np.sin(0.7 * t)]], atol=1e-15
        )


def test_time_reversal():
    model = NetworkModel([[1.0]], [[1.0]], {1: [[0.1j]]}, drive_freq=0.5)
    reversed_model = model.time_reversed()
    for t in (0.3, 1.1, 4.0):
        np.testing.assert_allclose(reversed_model.drive_at(t), model.drive_at(-t), atol=1e-15)
    assert reversed_model.time_reversed() == model


def test_undriven_model():
    model = NetworkModel.undriven([[1.0]], [[2.0]])
    assert not model.is_driven
    assert model.max_harmonic == 0
    assert model.time_reversal_invariant


def test_models_compare_by_value():
    a = NetworkModel.cosine_drive([[1.0]], [[2.0]], [[0.1]], drive_freq=0.7)
    b = NetworkModel.cosine_drive([[1.0]], [[2.0]], [[0.1]], drive_freq=0.7)
    assert a == b
    assert a != a.with_drive_freq(0.8)
    assert a != a.with_drive_scaled(2.0)


def test_model_arrays_are_frozen():
    model = NetworkModel.undriven([[1.0]], [[2.0]])
    with pytest.raises(ValueError):
        model.v_static[0, 0] = 3.0


def test_model_description():
    model, reservoirs = two_site_chain()
    assert model_from_dict(model_to_dict(model)) == model
    assert reservoirs_from_dict(reservoirs_to_dict(reservoirs)) == reservoirs


def test_reservoir_projector():
    bath = ReservoirSpec.on_sites([0, 2], 3, ohmic(), temperature=0.2)
    assert bath.sites == (0, 2)
    assert bath.mask.tolist() == [True, False, True]
    np.testing.assert_allclose(bath.density(0.5), ohmic()(0.5) * np.diag([1.0, 0.0, 1.0]))
    assert label(bath, 3) == "3"
    assert label(ReservoirSpec.on_sites([0], 1, ohmic(), 0.2, "cold"), 0) == "cold"


def test_coupling_and_temperature_helpers():
    _, reservoirs = two_site_chain()
    scaled = scale_coupling(reservoirs, gamma0=2e-3, reference=1e-3)
    assert [r.spectral.strength for r in scaled] == pytest.approx(
        [2 * r.spectral.strength for r in reservoirs]
    )
    assert [r.temperature for r in with_temperatures(reservoirs, 0.05)] == [0.05, 0.05]
    assert [r.temperature for r in with_temperatures(reservoirs, [0.1, 0.2])] == [0.1, 0.2]


def test_cooling_configuration_is_renormalized_to_omega0():
    model, reservoirs = two_bath_setup(gamma0=1e-3, omega0=1.0)
    assert [r.name for r in reservoirs] == ["alpha", "beta"]
    assert model.drive_freq == pytest.approx(0.9)
    green = UndrivenGreen(model, reservoirs)
    np.testing.assert_allclose(green.renormalized, [[1.0]], rtol=1e-12)
    assert float(reservoirs[0].spectral(1.0)) == 0.0
    assert float(reservoirs[1].spectral(1.0)) > 0.0


def test_reservoir_equality_ignores_identity():
    density = PowerLawCutoff(strength=0.1, exponent=1, cutoff=1.2, sharpness=0.1)
    a = ReservoirSpec.on_sites([0], 1, density, 0.5)
    b = ReservoirSpec.on_sites([0], 1, density, 0.5)
    assert a == b
    assert a != a.with_temperature(0.6)
