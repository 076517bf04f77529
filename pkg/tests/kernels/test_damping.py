import logging

import numpy as np
import pytest

from floquetheat.errors import QuadratureError
from floquetheat.kernels import damping
from floquetheat.kernels.damping import (
    DampingKernel,
    damping_laplace,
    principal_part,
    static_damping,
    static_damping_scalar,
)
from floquetheat.model import ReservoirSpec
from floquetheat.kernels.quadrature import PeakHint, QuadratureSpec, integrate
from floquetheat.spectral import GappedAtOmega0, PowerLawCutoff, Tabulated

ohmic = PowerLawCutoff(strength=0.05, exponent=1, cutoff=1.2, sharpness=0.1)
gapped = GappedAtOmega0(strength=0.02, exponent=1, cutoff=0.9, sharpness=0.04, gap=1.0)


def _baths(n_sites=2):
    return [
        ReservoirSpec.on_sites([0], n_sites, ohmic, 0.1, "a"),
        ReservoirSpec.on_sites([n_sites - 1], n_sites, gapped, 0.2, "b"),
    ]


def test_static_damping_is_linear_in_strength():
    assert static_damping_scalar(ohmic.scaled(3.0)) == pytest.approx(
        3 * static_damping_scalar(ohmic), rel=1e-10
    )
    matrix = static_damping(_baths())
    np.testing.assert_allclose(
        matrix, np.diag([static_damping_scalar(ohmic), static_damping_scalar(gapped)])
    )


@pytest.mark.parametrize("density", [ohmic, gapped])
@pytest.mark.parametrize("omega", [0.3, 0.95, 1.05, 2.5])
def test_principal_value_methods_agree(density, omega):
    assert principal_part(density, omega, "cauchy") == pytest.approx(
        principal_part(density, omega, "subtraction"), rel=1e-6, abs=1e-12
    )


@pytest.mark.parametrize("density", [ohmic, gapped])
def test_principal_part_is_odd(density):
    assert principal_part(density, -0.7) == -principal_part(density, 0.7)
    assert principal_part(density, 0.0) == 0.0


def test_tables_match_direct_quadrature():
    omegas = np.array([0.2, 0.8, 0.97, 1.3, 4.0, 100.0])
    baths = _baths()
    tabulated = DampingKernel(baths).principal(omegas)
    direct = DampingKernel(baths, exact=True).principal(omegas)
    np.testing.assert_allclose(tabulated, direct, rtol=1e-3, atol=1e-8)


def test_self_energy_is_projected():
    baths = _baths()
    kernel = DampingKernel(baths)
    sigma = kernel.self_energy(np.array([0.5, 1.5]))
    assert sigma.shape == (2, 2, 2)
    np.testing.assert_array_equal(sigma[:, 0, 1], 0)
    np.testing.assert_allclose(sigma[:, 0, 0].imag, 0.5 * np.pi * ohmic(np.array([0.5, 1.5])))
    np.testing.assert_allclose(sigma[:, 1, 1].imag, 0.5 * np.pi * gapped(np.array([0.5, 1.5])))


def test_boundary_value_real_part():
    kernel = DampingKernel(_baths(1))
    values = kernel.boundary(0.6)
    np.testing.assert_allclose(values.real, 0.5 * np.pi * np.array([ohmic(0.6), gapped(0.6)]) / 0.6)


def test_laplace_transform_decays_as_static_damping_over_s():
    baths = _baths(1)
    value = damping_laplace(baths, 1000.0)
    np.testing.assert_allclose(value.real, static_damping(baths) / 1000.0, rtol=1e-3)
    np.testing.assert_allclose(value.imag, 0.0, atol=1e-15)


def test_laplace_transform_on_the_imaginary_axis():
    baths = _baths(1)
    value = damping_laplace(baths, 0.7j)[0, 0]
    expected = DampingKernel(baths, exact=True).boundary(0.7).sum()
    assert value == pytest.approx(expected, rel=1e-10)


def test_laplace_transform_needs_the_right_half_plane():
    with pytest.raises(ValueError):
        damping_laplace(_baths(1), -1.0 + 0.5j)


def test_fluctuation_dissipation_real_part():
    # Re gamma(eps + i omega) -> pi i(omega) / (2 omega) as eps -> 0
    omega, eps = 0.7, 1e-10
    s = complex(eps, omega)
    spec = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-12, peaks=(PeakHint(omega, eps),))
    direct = integrate(
        lambda v: float(ohmic.over_omega(v)) * (s / (v * v + s * s)).real,
        0.0,
        ohmic.support,
        spec,
        points=(ohmic.cutoff,),
    )
    assert direct == pytest.approx(DampingKernel(_baths(1)).boundary(omega)[0].real, rel=1e-8)


def test_quadrature_failures_name_the_frequency():
    kinked = Tabulated(grid=(0.0, 0.37, 1.0), values=(0.0, 0.8, 0.0))
    spec = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-14, limit=3)
    with pytest.raises(QuadratureError, match="principal part at 0.6"):
        principal_part(kinked, 0.6, spec=spec)
    assert principal_part(kinked, 0.6, "cauchy") == pytest.approx(
        principal_part(kinked, 0.6, "subtraction"), rel=1e-6
    )


def test_tables_fall_back_to_the_other_method(monkeypatch, caplog):
    def flaky(density, omega, method="cauchy", spec=None):
        if method == "cauchy":
            raise QuadratureError("QUADPACK failed", term=f"principal part at {omega:g}")
        return 2.0

    monkeypatch.setattr(damping, "principal_part", flaky)
    with caplog.at_level(logging.WARNING, logger="floquetheat.kernels.damping"):
        assert damping._tabulated_point(ohmic, 0.4, "cauchy") == 2.0
    assert "retrying with the subtraction method" in caplog.text
