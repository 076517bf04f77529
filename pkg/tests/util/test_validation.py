import numpy as np
import pytest

from floquetheat.errors import ValidationError
from floquetheat.model import NetworkModel, ReservoirSpec
from floquetheat.util.validation import normal_frequencies, parametric_risks, validate
from test_helpers.networks import ohmic, single_oscillator, two_site_chain


def test_valid_networks_pass():
    for model, reservoirs in (single_oscillator(), two_site_chain()):
        report = validate(model, reservoirs)
        assert report.passed, str(report)
        report.raise_if_failed()


def test_every_violation_is_collected():
    model = NetworkModel.undriven([[1.0, 0.1], [0.0, 1.0]], [[1.0, 0.0], [0.0, -2.0]])
    bath = ReservoirSpec.on_sites([0], 2, ohmic(), temperature=-0.1, name="cold")
    report = validate(model, [bath])
    assert not report.passed
    assert any("mass is not symmetric" in v for v in report.violations)
    assert any("v_static is not positive definite" in v for v in report.violations)
    assert any("cold has temperature -0.1" in v for v in report.violations)
    with pytest.raises(ValidationError):
        report.raise_if_failed()


def test_wrong_shapes():
    model = NetworkModel.undriven([[1.0]], [[1.0, 0.0], [0.0, 1.0]])
    report = validate(model, [])
    assert report.violations == ("v_static has shape (2, 2), expected (1, 1).",)


def test_projector_must_select_a_site():
    bath = ReservoirSpec(np.zeros((1, 1)), ohmic(), 0.1, "idle")
    report = validate(NetworkModel.undriven([[1.0]], [[1.0]]), [bath])
    assert report.violations == ("Reservoir idle is not coupled to any site.",)


def test_renormalization_can_destabilize():
    bath = ReservoirSpec.on_sites([0], 1, ohmic(strength=2.0), 0.1)
    report = validate(NetworkModel.undriven([[1.0]], [[1.0]]), [bath])
    assert any("renormalized potential" in v for v in report.violations)


def test_time_reversal_flag_is_checked():
    model = NetworkModel([[1.0]], [[1.0]], {1: [[0.1j]]}, 0.5, time_reversal_invariant=True)
    report = validate(model, [])
    assert any("time-reversal invariant" in v for v in report.violations)


def test_shared_sites_only_warn():
    bath = ReservoirSpec.on_sites([0], 1, ohmic(0.01), 0.1, "a")
    other = ReservoirSpec.on_sites([0], 1, ohmic(0.01), 0.2, "b")
    report = validate(NetworkModel.undriven([[1.0]], [[1.0]]), [bath, other])
    assert report.passed
    assert any("share sites" in w for w in report.warnings)


def test_parametric_risks():
    model = NetworkModel.cosine_drive([[1.0]], [[1.0]], [[0.1]], drive_freq=1.0)
    assert parametric_risks(model, np.array([1.0]), margin=0.05) == []
    assert len(parametric_risks(model.with_drive_freq(1.98), np.array([1.0]), margin=0.05)) == 1


def test_normal_frequencies():
    np.testing.assert_allclose(
        normal_frequencies(np.diag([1.0, 4.0]), np.diag([4.0, 4.0])), [1.0, 2.0]
    )
