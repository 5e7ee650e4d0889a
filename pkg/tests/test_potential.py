import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kronred.errors import GraphError, HomogeneityError, OutOfIntervalError
from kronred.network.exprlaw import make_law
from kronred.network.graph import DirectedGraph, check_laplacian_structure
from kronred.network.potential import (Network, dissipated_power, evaluate_potential, k_value, min_heat_check,
                                       nodal_currents, orientation_changes_potential, power_balance_check,
                                       weighted_laplacian)

from conftest import linear_network


def single_edge(law="2*y"):
    return Network.build(DirectedGraph(("a", "b"), ((0, 1),)), [make_law(law)], ["a"])


def test_k_value_examples(diode_opposite):
    assert k_value(diode_opposite, [0.0, 0.0, 0.0]) == 0.0
    expected = math.exp(-1.0) - (-1.0) - 1.0
    assert k_value(diode_opposite, [0.0, 1.0, 0.0]) == pytest.approx(expected, abs=1e-12)
    assert k_value(single_edge(), [1.0, 0.0]) == pytest.approx(1.0, abs=1e-12)


def test_out_of_interval_names_edge(diode_opposite):
    with pytest.raises(OutOfIntervalError) as info:
        k_value(diode_opposite, [0.0, 9.0, 0.0])
    assert info.value.edge == "0 (1->0)"


def test_nodal_current_examples(diode_opposite):
    np.testing.assert_allclose(nodal_currents(diode_opposite, [0.7, 0.7, 0.7]), 0.0, atol=1e-15)
    two_node = Network.build(DirectedGraph(("a", "b"), ((0, 1),)), [make_law("y")], ["a", "b"])
    np.testing.assert_allclose(nodal_currents(two_node, [0.0, 1.0]), [-1.0, 1.0])
    J = nodal_currents(diode_opposite, [0.0, 1.0, 0.0])
    np.testing.assert_allclose(J, [math.exp(-1) - 1, 1 - math.exp(-1), 0.0], atol=1e-15)


def test_weighted_laplacian_examples(diode_opposite, linear_star):
    np.testing.assert_allclose(weighted_laplacian(single_edge("y"), [0.3, -2.0]), [[1, -1], [-1, 1]])
    np.testing.assert_allclose(weighted_laplacian(diode_opposite, np.zeros(3)),
                               [[2, -1, -1], [-1, 1, 0], [-1, 0, 1]])
    assert weighted_laplacian(linear_star, np.zeros(4))[0, 0] == 3.0


def test_dissipated_power_examples(diode_opposite):
    assert dissipated_power(single_edge("y"), [1.0, 0.0]) == pytest.approx(1.0)
    assert dissipated_power(diode_opposite, [0.4, 0.4, 0.4]) == 0.0
    assert dissipated_power(diode_opposite, [0.0, 1.0, 0.0]) == pytest.approx(1 - math.exp(-1), abs=1e-15)


def test_power_balance_examples():
    report = power_balance_check(single_edge("y"), [1.0, 0.0])
    assert report.edge_power == pytest.approx(1.0)
    assert report.nodal_power == pytest.approx(1.0)
    assert report.passed
    zero = power_balance_check(single_edge("y"), [0.0, 0.0])
    assert zero.edge_power == zero.nodal_power == 0.0


def test_network_requires_connected_graph():
    graph = DirectedGraph(("0", "1", "2", "3"), ((0, 1), (2, 3)))
    with pytest.raises(GraphError, match="not connected"):
        Network.build(graph, [make_law("y"), make_law("y")], [0, 2])


@given(seed=st.integers(0, 10_000))
def test_gradient_and_hessian_match_finite_differences(seed):
    rng = np.random.default_rng(seed)
    graph = DirectedGraph(("0", "1", "2", "3"), ((1, 0), (2, 0), (3, 0), (1, 2), (2, 3)))
    texts = ["exp(y) - 1", "y + tanh(y)", "sinh(y)", "y + y^3", "2*y"]
    net = Network.build(graph, [make_law(text) for text in texts], [1, 2, 3])
    z = rng.uniform(-1.0, 1.0, 4)
    evaluation = evaluate_potential(net, z)
    h = 1e-5
    numeric_grad = np.array([(k_value(net, z + h * e) - k_value(net, z - h * e)) / (2 * h) for e in np.eye(4)])
    assert np.abs(numeric_grad - evaluation.grad).max() <= 1e-6 * (1 + np.abs(evaluation.grad).max())
    numeric_hess = np.array([(nodal_currents(net, z + h * e) - nodal_currents(net, z - h * e)) / (2 * h)
                             for e in np.eye(4)])
    assert np.abs(numeric_hess - evaluation.hess).max() <= 1e-5 * (1 + np.abs(evaluation.hess).max())
    assert check_laplacian_structure(evaluation.hess).passed
    c = rng.uniform(-10.0, 10.0)
    assert abs(k_value(net, z + c) - evaluation.K) <= 1e-10 * (1 + abs(evaluation.K))
    assert power_balance_check(net, z).passed


def test_orientation_matters_for_diode_only(diode_opposite, linear_series):
    z = np.array([0.2, 1.0, -0.5])
    assert abs(orientation_changes_potential(diode_opposite, 0, z)) > 1e-3
    assert abs(orientation_changes_potential(linear_series, 0, z)) <= 1e-12


def test_min_heat_agrees_for_quadratic_series(linear_series):
    report = min_heat_check(linear_series, np.array([1.0, -0.5]), degree=2)
    assert report.passed
    assert report.max_difference <= 1e-8


def test_min_heat_refuses_diode(diode_opposite):
    with pytest.raises(HomogeneityError) as info:
        min_heat_check(diode_opposite, np.array([1.0, 0.0]), degree=2)
    assert info.value.t in (0.5, 2.0)
    assert info.value.z is not None


def test_min_heat_on_random_quadratic_network():
    net = linear_network(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 2), (1, 4)], [1.0, 2.0, 0.5, 1.5, 1.0, 0.7], [0, 3])
    report = min_heat_check(net, np.array([0.3, -1.0]), degree=2)
    assert report.passed
