import numpy as np
import pytest

from kronred.errors import AssumptionError, LinearLawError
from kronred.network.graph import DirectedGraph, build_incidence, check_laplacian_structure, laplacian
from kronred.network.reduction import (CycleSpace, SamplingPlan, effective_curve, infer_reduced_graph,
                                       integrability_diagnostic, kron_reduce_laplacian, recover_edge_laws_acyclic,
                                       recover_edge_laws_cyclic, reduce_linear, reduced_hessian)
from kronred.utils.helper import load_network

from conftest import linear_network, network_path, random_linear_network

SMALL_PLAN = SamplingPlan(count=16, holdout=8)


def test_sampling_plan_gauge_and_seeds():
    plan = SamplingPlan(count=5, holdout=3, seed=11)
    samples = plan.boundary_samples(4)
    assert samples.shape == (5, 4)
    np.testing.assert_array_equal(samples[:, -1], 0.0)
    np.testing.assert_array_equal(samples, plan.boundary_samples(4))
    assert plan.boundary_samples(4, holdout=True).shape == (3, 4)
    assert not np.allclose(plan.boundary_samples(4, holdout=True), samples[:3])


def test_schur_complement_examples():
    star = laplacian(build_incidence(DirectedGraph(("0", "1", "2", "3"), ((1, 0), (2, 0), (3, 0)))), np.ones(3))
    np.testing.assert_allclose(kron_reduce_laplacian(star, [1, 2, 3]),
                               [[2 / 3, -1 / 3, -1 / 3], [-1 / 3, 2 / 3, -1 / 3], [-1 / 3, -1 / 3, 2 / 3]],
                               atol=1e-14)
    path = laplacian(build_incidence(DirectedGraph(("0", "1", "2"), ((0, 1), (1, 2)))), np.ones(2))
    np.testing.assert_allclose(kron_reduce_laplacian(path, [0, 2]), [[0.5, -0.5], [-0.5, 0.5]], atol=1e-14)


def test_sequential_elimination_matches_block():
    rng = np.random.default_rng(5)
    for _ in range(20):
        net = random_linear_network(rng)
        weights = np.array([law.linear_conductance for law in net.laws])
        full = laplacian(net.incidence, weights)
        keep = list(net.partition.boundary)
        block = kron_reduce_laplacian(full, keep)
        sequential = kron_reduce_laplacian(full, keep, sequential=True)
        assert np.abs(block - sequential).max() <= 1e-10


def test_reduced_hessian_of_linear_star_is_triangle(linear_star):
    hessian = reduced_hessian(linear_star, [0.4, -1.0, 0.0])
    np.testing.assert_allclose(hessian, kron_reduce_laplacian(np.array(
        [[3, -1, -1, -1], [-1, 1, 0, 0], [-1, 0, 1, 0], [-1, 0, 0, 1]], dtype=float), [1, 2, 3]), atol=1e-12)


def test_infer_star_gives_triangle(linear_star):
    graph, certificate = infer_reduced_graph(linear_star, SMALL_PLAN)
    assert graph.node_ids == ("1", "2", "3")
    assert graph.edges == ((0, 1), (0, 2), (1, 2))
    assert certificate.support_stable
    assert not certificate.acyclic
    assert certificate.support_pairs == (("1", "2"), ("1", "3"), ("2", "3"))
    assert set(certificate.supports) == {"111"}
    assert certificate.samples_used == SMALL_PLAN.count


def test_infer_path_keeps_blocked_pair_apart():
    net = linear_network(4, [(0, 1), (1, 2), (2, 3)], [1.0, 1.0, 1.0], [0, 1, 3])
    graph, certificate = infer_reduced_graph(net, SMALL_PLAN)
    assert graph.edges == ((0, 1), (1, 2))
    assert certificate.acyclic


def test_acyclic_recovery_opposite_diodes(diode_opposite):
    graph, certificate = infer_reduced_graph(diode_opposite)
    assert graph.edges == ((0, 1),)
    reduced = recover_edge_laws_acyclic(diode_opposite, graph, certificate=certificate)
    grid = np.linspace(-3.5, 3.5, 57)
    np.testing.assert_allclose(reduced.tables[0](grid), np.tanh(grid / 2), atol=1e-6)
    np.testing.assert_allclose(reduced.tables[0].integral(grid), 2 * np.log(np.cosh(grid / 2)), atol=1e-6)
    assert reduced.certificate.accepted
    assert reduced.certificate.acyclic
    assert reduced.certificate.integrability_max_asymmetry == 0.0
    assert reduced.certificate.consistency_residual <= 1e-6


def test_acyclic_recovery_same_orientation(diode_same):
    reduced = recover_edge_laws_acyclic(diode_same, infer_reduced_graph(diode_same)[0])
    grid = np.linspace(-3.5, 3.5, 57)
    np.testing.assert_allclose(reduced.tables[0](grid), np.exp(grid / 2) - 1, atol=1e-6)
    assert reduced.certificate.accepted


def test_acyclic_recovery_linear_series(linear_series):
    reduced = recover_edge_laws_acyclic(linear_series, infer_reduced_graph(linear_series)[0])
    np.testing.assert_allclose(reduced.tables[0].slope, 0.5, atol=1e-9)
    assert reduced.certificate.hessian_mismatch <= 1e-9


@pytest.mark.parametrize("name", ["diode_opposite", "diode_same", "odd_series", "memristor_pair"])
def test_held_out_residual_on_shipped_networks(name):
    net = load_network(network_path(name))
    graph, certificate = infer_reduced_graph(net)
    reduced = recover_edge_laws_acyclic(net, graph, certificate=certificate)
    assert reduced.certificate.accepted
    assert reduced.certificate.hessian_mismatch <= 1e-4
    assert reduced.domain == net.domain


def test_acyclic_recovery_refuses_cycles(linear_star):
    graph, _ = infer_reduced_graph(linear_star, SMALL_PLAN)
    with pytest.raises(AssumptionError):
        recover_edge_laws_acyclic(linear_star, graph, SMALL_PLAN)


def test_cyclic_recovery_on_quadratic_triangle(quadratic_triangle):
    graph, certificate = infer_reduced_graph(quadratic_triangle)
    assert not certificate.acyclic
    reduced = recover_edge_laws_cyclic(quadratic_triangle, graph, certificate=certificate)
    assert reduced.certificate.consistency_residual <= 1e-8
    assert reduced.certificate.accepted
    exact = reduce_linear(quadratic_triangle)
    assert exact.graph.edges == reduced.graph.edges
    for table, weight in zip(reduced.tables, exact.exact_weights):
        np.testing.assert_allclose(table.slope, weight, rtol=1e-6)


def test_cyclic_recovery_flags_diode_triangle(diode_triangle):
    graph, certificate = infer_reduced_graph(diode_triangle)
    assert graph.edges == ((0, 1), (0, 2), (1, 2))
    assert certificate.support_stable
    reduced = recover_edge_laws_cyclic(diode_triangle, graph, certificate=certificate)
    assert reduced.certificate.accepted is False
    assert reduced.certificate.consistency_residual > 1e-6
    assert not reduced.certificate.acyclic
    assert np.isnan(integrability_diagnostic(diode_triangle, graph, CycleSpace.from_graph(graph), reduced))


def test_cyclic_recovery_delegates_on_acyclic_graph(diode_opposite):
    graph, certificate = infer_reduced_graph(diode_opposite)
    acyclic = recover_edge_laws_acyclic(diode_opposite, graph, certificate=certificate)
    routed = recover_edge_laws_cyclic(diode_opposite, graph, certificate=certificate)
    for one, other in zip(acyclic.tables, routed.tables):
        np.testing.assert_array_equal(one.y, other.y)
        np.testing.assert_array_equal(one.current, other.current)


def test_integrability_not_assessed_on_a_single_cycle(quadratic_triangle):
    graph, certificate = infer_reduced_graph(quadratic_triangle)
    reduced = recover_edge_laws_cyclic(quadratic_triangle, graph, certificate=certificate)
    assert np.isnan(integrability_diagnostic(quadratic_triangle, graph, CycleSpace.from_graph(graph), reduced))


def test_integrability_vanishes_for_separable_fits():
    star = linear_network(5, [(1, 0), (2, 0), (3, 0), (4, 0)], [1.0, 2.0, 0.5, 1.5], [1, 2, 3, 4])
    graph, certificate = infer_reduced_graph(star)
    cycles = CycleSpace.from_graph(graph)
    assert cycles.dimension == 3
    reduced = recover_edge_laws_cyclic(star, graph, certificate=certificate)
    assert reduced.certificate.accepted
    assert integrability_diagnostic(star, graph, cycles, reduced) <= 1e-6


def test_effective_curve_of_opposite_diodes(diode_opposite):
    grid = np.linspace(-3.0, 3.0, 41)
    points = effective_curve(diode_opposite, "1", "2", grid)
    assert all(point.ok for point in points)
    np.testing.assert_allclose([p.I for p in points], np.tanh(grid / 2), atol=1e-8)
    np.testing.assert_allclose([p.G for p in points], 2 * np.log(np.cosh(grid / 2)), atol=1e-8)


def test_effective_curve_same_orientation(diode_same):
    grid = np.linspace(-3.0, 3.0, 41)
    forward = effective_curve(diode_same, "2", "1", grid)
    np.testing.assert_allclose([p.I for p in forward], np.exp(grid / 2) - 1, atol=1e-8)
    backward = effective_curve(diode_same, "1", "2", grid)
    np.testing.assert_allclose([p.I for p in backward], 1 - np.exp(-grid / 2), atol=1e-8)


def test_effective_curve_symmetry(odd_series, diode_same):
    grid = np.array([-2.0, -1.0, 1.0, 2.0])
    odd = [p.I for p in effective_curve(odd_series, "1", "2", grid)]
    assert odd[0] == pytest.approx(-odd[3], abs=1e-10)
    assert odd[1] == pytest.approx(-odd[2], abs=1e-10)
    skewed = [p.I for p in effective_curve(diode_same, "2", "1", grid)]
    assert abs(skewed[0] + skewed[3]) > 0.5


def test_effective_curve_marks_failed_points(diode_opposite):
    points = effective_curve(diode_opposite, "1", "2", [1.0, 30.0])
    assert points[0].ok
    assert not points[1].ok
    assert np.isnan(points[1].I)
    assert points[1].message


def test_reduce_linear_examples(linear_star, linear_series):
    triangle = reduce_linear(linear_star)
    assert triangle.graph.edges == ((0, 1), (0, 2), (1, 2))
    np.testing.assert_allclose(triangle.exact_weights, 1 / 3, atol=1e-14)
    assert triangle.certificate.accepted

    series = reduce_linear(linear_series)
    np.testing.assert_allclose(series.exact_weights, [0.5], atol=1e-14)
    assert float(series.tables[0](2.0)) == pytest.approx(1.0, abs=1e-14)


def test_reduce_linear_adds_direct_boundary_edge():
    base = linear_network(4, [(1, 0), (2, 0), (3, 0)], [1.0, 1.0, 1.0], [1, 2, 3])
    extra = linear_network(4, [(1, 0), (2, 0), (3, 0), (1, 2)], [1.0, 1.0, 1.0, 0.25], [1, 2, 3])
    difference = reduce_linear(extra).exact_weights - reduce_linear(base).exact_weights
    np.testing.assert_allclose(difference, [0.25, 0.0, 0.0], atol=1e-14)


def test_reduce_linear_without_central_nodes_keeps_graph():
    net = linear_network(3, [(0, 1), (1, 2), (0, 1)], [1.0, 2.0, 3.0], [0, 1, 2])
    reduced = reduce_linear(net)
    assert reduced.graph.edges == ((0, 1), (1, 2), (0, 1))
    np.testing.assert_array_equal(reduced.exact_weights, [1.0, 2.0, 3.0])


def test_reduce_linear_refuses_nonlinear_laws(diode_opposite):
    with pytest.raises(LinearLawError):
        reduce_linear(diode_opposite)


def test_sampled_reduction_matches_exact_on_random_linear_graphs():
    rng = np.random.default_rng(2024)
    plan = SamplingPlan(count=24, holdout=4, refine_points=9, basis_size=3, table_points=9)
    for _ in range(50):
        net = random_linear_network(rng)
        exact = reduce_linear(net)
        graph, certificate = infer_reduced_graph(net, plan)
        assert graph.edges == exact.graph.edges
        assert certificate.support_stable
        reduced = recover_edge_laws_cyclic(net, graph, plan, certificate=certificate)
        assert reduced.certificate.accepted
        for table, weight in zip(reduced.tables, exact.exact_weights):
            np.testing.assert_allclose(table.slope, weight, rtol=1e-7)
        z_boundary = plan.boundary_samples(net.partition.n_boundary)[0]
        assert check_laplacian_structure(reduced.laplacian(z_boundary)).passed
        assert check_laplacian_structure(exact.laplacian(z_boundary)).passed
