import os
from pathlib import Path

import hypothesis
import numpy as np
import pytest

from kronred.network.exprlaw import make_law
from kronred.network.graph import DirectedGraph
from kronred.network.potential import Network
from kronred.utils.helper import load_network

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=100, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "fast"))

NETWORKS = Path(__file__).resolve().parent.parent / "networks"


def network_path(name: str) -> str:
    return str(NETWORKS / f"{name}.json")


@pytest.fixture
def diode_opposite():
    return load_network(network_path("diode_opposite"))


@pytest.fixture
def diode_same():
    return load_network(network_path("diode_same"))


@pytest.fixture
def diode_triangle():
    return load_network(network_path("diode_triangle"))


@pytest.fixture
def linear_series():
    return load_network(network_path("linear_series"))


@pytest.fixture
def linear_star():
    return load_network(network_path("linear_star"))


@pytest.fixture
def quadratic_triangle():
    return load_network(network_path("quadratic_triangle"))


@pytest.fixture
def odd_series():
    return load_network(network_path("odd_series"))


def linear_network(n, edges, weights, boundary):
    """Network with g(y) = w y on every edge; node names are "0".."n-1"."""
    graph = DirectedGraph(tuple(str(i) for i in range(n)), tuple(edges))
    laws = [make_law(f"{float(w)!r}*y") for w in weights]
    return Network.build(graph, laws, list(boundary))


def random_linear_network(rng, max_nodes=12):
    """Connected random graph (spanning tree plus extra edges) with positive linear laws."""
    n = int(rng.integers(3, max_nodes + 1))
    edges = []
    for node in range(1, n):
        edges.append((int(rng.integers(0, node)), node))
    for _ in range(int(rng.integers(0, n))):
        tail, head = rng.choice(n, size=2, replace=False)
        edges.append((int(tail), int(head)))
    weights = rng.uniform(0.5, 2.0, len(edges))
    n_boundary = int(rng.integers(2, n))
    boundary = sorted(int(b) for b in rng.choice(n, size=n_boundary, replace=False))
    return linear_network(n, edges, weights, boundary)
