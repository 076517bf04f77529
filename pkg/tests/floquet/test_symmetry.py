import numpy as np
import pytest

from floquetheat.errors import GridMismatchError
from floquetheat.floquet.sidebands import FloquetSolution
from floquetheat.floquet.symmetry import check_symmetries
from floquetheat.model import NetworkModel
from test_helpers.networks import two_site_chain

PROBES = [0.2, 0.55, 0.9, 1.3]


def test_time_reversal_invariant_drive():
    model, reservoirs = two_site_chain()
    sol = FloquetSolution(model, reservoirs, k_max=16)
    report = check_symmetries(sol, sol, PROBES)
    assert report.passed(1e-8), report



def test_transpose_relation_under_a_short_truncation():
    # Only |k| <= 3 enter relation (b) at k_max = 6.
    model, reservoirs = two_site_chain()
    sol = FloquetSolution(model, reservoirs, k_max=6)
    report = check_symmetries(sol, sol, PROBES)
    assert report.transpose < 1e-8, report
    assert report.passed(1e-8), report

def test_general_drive():
    model, reservoirs = two_site_chain()
    v1 = np.array([[0.03 + 0.02j, 0.01], [0.01, 0.02 - 0.01j]])
    general = NetworkModel(model.mass, model.v_static, {1: v1, 2: 0.5 * v1}, model.drive_freq)
    sol = FloquetSolution(general, reservoirs, k_max=16)
    report = check_symmetries(sol, sol.time_reversed(), PROBES)
    assert report.passed(1e-8), report


def test_a_wrong_partner_is_detected():
    model, reservoirs = two_site_chain()
    v1 = np.array([[0.03 + 0.02j, 0.0], [0.0, 0.02]])
    general = NetworkModel(model.mass, model.v_static, {1: v1}, model.drive_freq)
    sol = FloquetSolution(general, reservoirs, k_max=8)
    assert check_symmetries(sol, sol, PROBES).reversal > 1e-6


def test_grids_must_match():
    model, reservoirs = two_site_chain()
    sol = FloquetSolution(model, reservoirs, k_max=4)
    other = FloquetSolution(model, reservoirs, k_max=4)
    sol.solve([0.3, 0.6])
    other.solve([0.3])
    with pytest.raises(GridMismatchError):
        check_symmetries(sol, other)
    with pytest.raises(GridMismatchError):
        check_symmetries(sol, FloquetSolution(model, reservoirs, k_max=6), [0.3])
