import numpy as np
import pytest

from floquetheat.floquet.sidebands import FloquetSolution
from floquetheat.thermo.heat import heat_rates
from floquetheat.thermo.probability import TransitionProbability, site_masks, transition_weights
from floquetheat.thermo.transfer import reconstructed_heat, transfer_matrix, transfer_work_rate
from test_helpers.networks import single_oscillator, two_site_chain


@pytest.fixture(scope="module")
def chain():
    model, reservoirs = two_site_chain()
    sol = FloquetSolution(model, reservoirs)
    return sol, reservoirs


def test_probabilities_are_non_negative(chain):
    sol, reservoirs = chain
    probability = TransitionProbability(sol, reservoirs)
    for omega in (0.1, 0.6, 1.2, 2.0):
        p = probability(omega)
        assert p.shape == (2 * sol.k_max + 1, 2, 2)
        assert np.all(p >= 0)


def test_undriven_probabilities_are_symmetric():
    model, reservoirs = single_oscillator(v1=0.0)
    p = TransitionProbability(FloquetSolution(model, reservoirs), reservoirs)(0.8)
    assert p.shape == (1, 2, 2)
    np.testing.assert_allclose(p[0], p[0].T, rtol=1e-14)


def test_weights_sum_over_coupled_sites():
    blocks = np.arange(8.0).reshape(2, 2, 2) * (1 + 1j)
    masks = np.array([[1.0, 1.0], [0.0, 1.0]])
    weights = transition_weights(blocks, masks)
    np.testing.assert_allclose(weights[1, 0, 1], 2 * (5.0**2 + 7.0**2))
    np.testing.assert_allclose(weights[0].sum(), 2 * (0 + 1 + 4 + 9) + 2 * (1 + 9) + 2 * (2**2 + 3**2) + 2 * 9)
    np.testing.assert_array_equal(site_masks(two_site_chain()[1]), np.eye(2))


def test_transfer_matrix_structure(chain):
    sol, reservoirs = chain
    q = transfer_matrix(sol, reservoirs, 0.7)
    np.testing.assert_allclose(q.matrix.sum(axis=0), q.marginals, rtol=1e-12, atol=1e-16)
    off_diagonal = q.matrix[~np.eye(2, dtype=bool)]
    assert np.all(off_diagonal <= 0)


def test_undriven_transfer_matrix_has_no_marginals():
    model, reservoirs = single_oscillator(v1=0.0)
    q = transfer_matrix(FloquetSolution(model, reservoirs), reservoirs, 0.8)
    np.testing.assert_array_equal(q.marginals, 0.0)
    np.testing.assert_allclose(q.matrix, q.matrix.T, rtol=1e-14)


def test_heat_rates_are_rebuilt_from_the_transfer_matrix(chain):
    sol, reservoirs = chain
    report = heat_rates(sol, reservoirs)
    scale = max(abs(report.totals))
    np.testing.assert_allclose(reconstructed_heat(sol, reservoirs), report.totals, atol=1e-7 * scale)
    assert transfer_work_rate(sol, reservoirs) == pytest.approx(report.work_rate, abs=1e-7 * scale)
