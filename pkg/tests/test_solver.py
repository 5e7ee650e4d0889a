import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kronred.errors import OutOfIntervalError
from kronred.network.potential import k_value, nodal_currents
from kronred.network.reduction import collect_samples, reduced_hessian
from kronred.network.solver import (interior_hessian_check, reduced_potential, sensitivity, solve_interior)
from kronred.utils.helper import load_network

from conftest import network_path


def diode_interior(z1, z2):
    """Interior potential of two opposing diodes meeting at node 0."""
    return math.log(2.0) - math.log(math.exp(-z1) + math.exp(-z2))


def test_diode_closed_form_on_random_points(diode_opposite):
    rng = np.random.default_rng(7)
    for z_boundary in rng.uniform(-2.0, 2.0, size=(100, 2)):
        solution = solve_interior(diode_opposite, z_boundary)
        assert solution.converged
        assert solution.iterations <= 30
        z0 = diode_interior(*z_boundary)
        assert abs(solution.z_C[0] - z0) <= 1e-9
        closed_form = z_boundary.sum() - 2.0 * z0
        assert abs(reduced_potential(diode_opposite, z_boundary, solution) - closed_form) <= 1e-9


def test_diode_example_values(diode_opposite):
    solution = solve_interior(diode_opposite, [1.0, 0.0])
    assert solution.z_C[0] == pytest.approx(0.379885, abs=1e-6)
    z0 = diode_interior(1.0, 0.0)
    assert reduced_potential(diode_opposite, [1.0, 0.0], solution) == pytest.approx(1.0 - 2.0 * z0, abs=1e-10)
    assert reduced_potential(diode_opposite, [1.0, 0.0]) == pytest.approx(0.240229, abs=1e-5)


def test_series_and_same_orientation_midpoint(linear_series, diode_same):
    assert solve_interior(linear_series, [1.0, 0.0]).z_C[0] == pytest.approx(0.5, abs=1e-12)
    assert solve_interior(diode_same, [1.0, 0.0]).z_C[0] == pytest.approx(0.5, abs=1e-10)


def test_boundary_currents_are_gradient_of_potential(diode_opposite):
    solution = solve_interior(diode_opposite, [1.0, 0.0])
    full = nodal_currents(diode_opposite, solution.z)
    np.testing.assert_allclose(full[[1, 2]], solution.J_B, atol=1e-14)
    assert abs(full[0]) <= 1e-10
    assert abs(solution.J_B.sum()) <= 1e-9


def test_sensitivity_closed_form_and_row_sums(diode_opposite):
    z_boundary = np.array([0.8, -0.4])
    solution = solve_interior(diode_opposite, z_boundary)
    z0 = solution.z_C[0]
    expected = 0.5 * np.exp(z0 - z_boundary)
    np.testing.assert_allclose(sensitivity(diode_opposite, z_boundary, solution)[0], expected, atol=1e-9)
    assert sensitivity(diode_opposite, z_boundary).sum() == pytest.approx(1.0, abs=1e-10)


@given(seed=st.integers(0, 10_000))
def test_sensitivity_matches_finite_differences(seed):
    net = load_network(network_path("diode_triangle"))
    rng = np.random.default_rng(seed)
    z_boundary = rng.uniform(-1.5, 1.5, 3)
    jacobian = sensitivity(net, z_boundary)
    np.testing.assert_allclose(jacobian.sum(axis=1), 1.0, atol=1e-9)
    h = 1e-4
    for b in range(3):
        shift = np.zeros(3)
        shift[b] = h
        numeric = (solve_interior(net, z_boundary + shift).z_C - solve_interior(net, z_boundary - shift).z_C) / (2 * h)
        np.testing.assert_allclose(numeric, jacobian[:, b], atol=1e-5)


@given(seed=st.integers(0, 10_000))
def test_envelope_identity(seed):
    net = load_network(network_path("diode_triangle"))
    rng = np.random.default_rng(seed)
    z_boundary = rng.uniform(-1.5, 1.5, 3)
    J_B = solve_interior(net, z_boundary).J_B
    h = 1e-5
    for b in range(3):
        shift = np.zeros(3)
        shift[b] = h
        numeric = (reduced_potential(net, z_boundary + shift) - reduced_potential(net, z_boundary - shift)) / (2 * h)
        assert abs(numeric - J_B[b]) <= 1e-6 * (1 + abs(J_B[b]))


@given(seed=st.integers(0, 10_000), shift=st.floats(-5.0, 5.0))
def test_reduced_potential_convex_and_shift_invariant(seed, shift):
    net = load_network(network_path("diode_triangle"))
    rng = np.random.default_rng(seed)
    z_boundary = rng.uniform(-1.0, 1.0, 3)
    base = reduced_potential(net, z_boundary)
    assert abs(reduced_potential(net, z_boundary + shift) - base) <= 1e-9 * (1 + abs(base))
    eigenvalues = np.linalg.eigvalsh(reduced_hessian(net, z_boundary))
    assert eigenvalues[0] >= -1e-9
    assert eigenvalues[1] > 0.0


def test_interior_minimises_potential(diode_opposite):
    solution = solve_interior(diode_opposite, [0.5, -0.7])
    best = k_value(diode_opposite, solution.z)
    for delta in (-1e-3, 1e-3, -0.1, 0.1):
        trial = solution.z.copy()
        trial[0] += delta
        assert k_value(diode_opposite, trial) > best
    assert interior_hessian_check(diode_opposite, solution.z) > 0.0


def test_no_central_nodes_returns_boundary_currents(diode_opposite):
    every_node = diode_opposite.with_boundary([0, 1, 2])
    solution = solve_interior(every_node, [0.0, 1.0, 0.0])
    assert solution.iterations == 0
    assert solution.z_C.size == 0
    np.testing.assert_allclose(solution.J_B, nodal_currents(diode_opposite, [0.0, 1.0, 0.0]))


def test_start_outside_interval_names_edge(diode_opposite):
    with pytest.raises(OutOfIntervalError) as info:
        solve_interior(diode_opposite, [20.0, 0.0])
    assert info.value.edge is not None


def test_wrong_boundary_length(diode_opposite):
    with pytest.raises(ValueError):
        solve_interior(diode_opposite, [1.0, 0.0, 0.0])


def test_threaded_samples_keep_order(diode_triangle):
    samples = np.random.default_rng(3).uniform(-2.0, 2.0, size=(12, 3))
    serial = collect_samples(diode_triangle, samples)
    threaded = collect_samples(diode_triangle, samples, workers=4)
    for z_boundary, one, other in zip(samples, serial, threaded):
        np.testing.assert_array_equal(one.z_B, z_boundary)
        np.testing.assert_array_equal(one.J_B, other.J_B)
        np.testing.assert_array_equal(one.hessian, other.hessian)
