"""Network Potential

K(z) = Σ_j G_j((Dᵀz)_j), its gradient (nodal currents), its Hessian (the
state-dependent weighted Laplacian), and the power bookkeeping built on them.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from kronred.errors import GraphError, HomogeneityError, LawError, OutOfIntervalError
from kronred.network.exprlaw import EdgeLaw, cocontent
from kronred.network.graph import DirectedGraph, NodePartition, build_incidence, is_connected
from kronred.tools.helper import Domain

logger = logging.getLogger(__name__)

POWER_BALANCE_TOL = 1e-12
HOMOGENEITY_TOL = 1e-8
MIN_HEAT_TOL = 1e-8


@dataclass(frozen=True)
class Network:
    """
    Connected directed graph with one certified EdgeLaw per edge and a
    boundary / central node split.
    """
    graph: DirectedGraph
    laws: Tuple[EdgeLaw, ...]
    partition: NodePartition
    domain: Domain = Domain.RESISTOR
    incidence: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "laws", tuple(self.laws))
        if len(self.laws) != self.graph.m:
            raise GraphError(f"{len(self.laws)} laws given for {self.graph.m} edges")
        if not is_connected(self.graph):
            raise GraphError("the underlying undirected graph is not connected")
        for j, law in enumerate(self.laws):
            if not law.convexity_margin > 0.0:
                raise LawError(f"law of edge {self.graph.edge_label(j)} is not certified strongly convex")
        covered = set(self.partition.boundary) | set(self.partition.central)
        if covered != set(range(self.graph.n)):
            raise GraphError("partition does not cover the node set")
        object.__setattr__(self, "incidence", build_incidence(self.graph))

    @classmethod
    def build(cls, graph: DirectedGraph, laws: Sequence[EdgeLaw], boundary: Iterable,
              domain: Domain = Domain.RESISTOR) -> "Network":
        """Builds a network; `boundary` holds node names or indices."""
        indices = [graph.index(b) if isinstance(b, str) else int(b) for b in boundary]
        return cls(graph, tuple(laws), NodePartition.from_boundary(graph.n, indices), domain)

    def with_boundary(self, boundary: Iterable) -> "Network":
        """Same network with a different boundary set (names or indices)."""
        indices = [self.graph.index(b) if isinstance(b, str) else int(b) for b in boundary]
        return replace(self, partition=NodePartition.from_boundary(self.graph.n, indices))

    def with_graph(self, graph: DirectedGraph) -> "Network":
        return replace(self, graph=graph)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def m(self) -> int:
        return self.graph.m

    @property
    def boundary_names(self) -> Tuple[str, ...]:
        return tuple(self.graph.node_ids[i] for i in self.partition.boundary)

    @property
    def is_linear(self) -> bool:
        return all(law.linear_conductance is not None for law in self.laws)

    def assemble(self, z_boundary, z_central) -> np.ndarray:
        """Full potential vector from its boundary and central parts."""
        z = np.zeros(self.n)
        z[list(self.partition.boundary)] = np.asarray(z_boundary, dtype=float)
        if self.partition.central:
            z[list(self.partition.central)] = np.asarray(z_central, dtype=float)
        return z


@dataclass(frozen=True)
class PotentialEval:
    """K, its gradient and Hessian at one potential vector."""
    z: np.ndarray
    y: np.ndarray
    K: float
    grad: np.ndarray
    hess: np.ndarray


@dataclass(frozen=True)
class PowerBalanceReport:
    """Edge power VᵀI against nodal power ψᵀJ."""
    edge_power: float
    nodal_power: float
    difference: float
    passed: bool


@dataclass(frozen=True)
class MinHeatReport:
    """Constraint solve against dissipated-power minimisation for homogeneous K."""
    degree: float
    z_constraint: np.ndarray
    z_power_minimizer: np.ndarray
    max_difference: float
    passed: bool


def edge_voltages(net: Network, z, check: bool = True) -> np.ndarray:
    """
    y = Dᵀz.

    Raises:
        OutOfIntervalError: naming the first edge whose voltage leaves its
            law's validity interval (only with `check`).
    """
    y = net.incidence.T @ np.asarray(z, dtype=float)
    if check:
        for j, law in enumerate(net.laws):
            if not law.contains(y[j]):
                raise OutOfIntervalError(float(y[j]), law.validity_interval, net.graph.edge_label(j))
    return y


def edge_currents(net: Network, y) -> np.ndarray:
    return np.array([float(law.conductance(v)) for law, v in zip(net.laws, y)])


def edge_slopes(net: Network, y) -> np.ndarray:
    return np.array([float(law.slope(v)) for law, v in zip(net.laws, y)])


def k_value(net: Network, z) -> float:
    """K(z) = Σ_j G_j((Dᵀz)_j) with every G_j anchored at G_j(0) = 0."""
    y = edge_voltages(net, z)
    return float(sum(cocontent(law, v) for law, v in zip(net.laws, y)))


def nodal_currents(net: Network, z) -> np.ndarray:
    """J = ∂K/∂z = D g(Dᵀz); sums to zero up to rounding."""
    y = edge_voltages(net, z)
    return net.incidence @ edge_currents(net, y)


def weighted_laplacian(net: Network, z) -> np.ndarray:
    """∂²K/∂z² = D diag(g'(Dᵀz)) Dᵀ."""
    y = edge_voltages(net, z)
    incidence = net.incidence.astype(float)
    return (incidence * edge_slopes(net, y)) @ incidence.T


def evaluate_potential(net: Network, z) -> PotentialEval:
    """K, gradient and Hessian at z in one pass."""
    z = np.asarray(z, dtype=float)
    y = edge_voltages(net, z)
    incidence = net.incidence.astype(float)
    value = float(sum(cocontent(law, v) for law, v in zip(net.laws, y)))
    grad = incidence @ edge_currents(net, y)
    hess = (incidence * edge_slopes(net, y)) @ incidence.T
    return PotentialEval(z=z, y=y, K=value, grad=grad, hess=hess)


def dissipated_power(net: Network, z) -> float:
    """zᵀ ∂K/∂z, equal to (Dᵀz)ᵀ g(Dᵀz)."""
    z = np.asarray(z, dtype=float)
    return float(z @ nodal_currents(net, z))


def power_balance_check(net: Network, z) -> PowerBalanceReport:
    """
    Computes VᵀI on the edges and ψᵀJ on the nodes independently and
    compares them (Tellegen-style balance through D I = J).
    """
    z = np.asarray(z, dtype=float)
    y = edge_voltages(net, z)
    currents = edge_currents(net, y)
    edge_power = float(y @ currents)
    nodal_power = float(z @ (net.incidence @ currents))
    difference = abs(edge_power - nodal_power)
    passed = difference <= POWER_BALANCE_TOL * (1.0 + abs(edge_power))
    return PowerBalanceReport(edge_power, nodal_power, difference, passed)


def homogeneity_probe_radius(net: Network) -> float:
    """Half-width for random potentials such that 2z stays inside every validity box."""
    return min(min(-law.validity_interval[0], law.validity_interval[1]) for law in net.laws) / 4.0


def check_homogeneity(net: Network, degree: float, trials: int = 8, seed: int = 0) -> None:
    """
    Sampled test of K(tz) = t^k K(z) for t in {0.5, 2}.

    Raises:
        HomogeneityError: carrying the first violating (z, t).
    """
    rng = np.random.default_rng(seed)
    radius = homogeneity_probe_radius(net)
    for _ in range(trials):
        z = rng.uniform(-radius, radius, net.n)
        base = k_value(net, z)
        for t in (0.5, 2.0):
            expected = t ** degree * base
            scaled = k_value(net, t * z)
            if abs(scaled - expected) > HOMOGENEITY_TOL * abs(expected) + 1e-15:
                raise HomogeneityError(
                    f"K is not homogeneous of degree {degree}: K(tz)={scaled!r}, t^k K(z)={expected!r} at t={t}",
                    z=z, t=t)


def min_heat_check(net: Network, z_boundary, degree: float, seed: int = 0) -> MinHeatReport:
    """
    For homogeneous K, the interior solution of ∂K/∂z_C = 0 must also
    minimise the dissipated power over z_C. Compares the Newton solve with a
    BFGS minimisation of zᵀD g(Dᵀz) started at the boundary mean.

    Raises:
        HomogeneityError: the network fails the sampled homogeneity test.
    """
    from kronred.network.solver import solve_interior  # pylint: disable=import-outside-toplevel

    check_homogeneity(net, degree, seed=seed)
    z_boundary = np.asarray(z_boundary, dtype=float)
    solution = solve_interior(net, z_boundary)
    central = list(net.partition.central)
    if not central:
        empty = np.zeros(0)
        return MinHeatReport(degree, empty, empty, 0.0, True)

    incidence = net.incidence.astype(float)
    incidence_central = incidence[central]

    def power(z_central):
        y = incidence.T @ net.assemble(z_boundary, z_central)
        return float(y @ edge_currents(net, y))

    def power_gradient(z_central):
        y = incidence.T @ net.assemble(z_boundary, z_central)
        return incidence_central @ (edge_currents(net, y) + y * edge_slopes(net, y))

    start = np.full(len(central), z_boundary.mean())
    result = optimize.minimize(power, start, jac=power_gradient, method="BFGS",
                               options={"gtol": 1e-13, "maxiter": 10000})
    difference = float(np.abs(result.x - solution.z_C).max())
    logger.debug("minimum-heat comparison: %s, max difference %.3e", result.message, difference)
    return MinHeatReport(degree, solution.z_C, result.x, difference, difference <= MIN_HEAT_TOL)


def shift_invariance_error(net: Network, z, shift: float) -> float:
    """|K(z + c1) - K(z)|."""
    z = np.asarray(z, dtype=float)
    return abs(k_value(net, z + shift) - k_value(net, z))


def orientation_changes_potential(net: Network, edge: int, z) -> Optional[float]:
    """K difference caused by reversing one edge; None if the flipped voltages leave the box."""
    flipped = net.with_graph(net.graph.flipped(edge))
    try:
        return k_value(flipped, z) - k_value(net, z)
    except OutOfIntervalError:
        return None
