"""Kron Reduction

Eliminates the central nodes of a nonlinear network: reduced Hessians by
Schur complement, the reduced graph read off their sign pattern, and
per-edge reduced laws recovered from sampled boundary behaviour.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy import linalg, optimize
from scipy.interpolate import BSpline

from kronred.errors import (AssumptionError, ConfigurationError, GraphError, InconsistentPairsError,
                            KronError, LinearLawError, NonMonotoneError, RankDeficiencyError)
from kronred.network.graph import (DirectedGraph, build_incidence, cycle_space, graph_from_laplacian,
                                   is_acyclic, laplacian, support_threshold)
from kronred.network.potential import Network
from kronred.network.solver import (SolveResult, interior_blocks, reduced_potential, sensitivity,
                                    solve_interior)
from kronred.network.tables import EdgeTable
from kronred.tools.helper import Domain

logger = logging.getLogger(__name__)

PAIR_VOLTAGE_TOL = 1e-9
PAIR_CURRENT_TOL = 1e-7
TABLE_MIN_SPACING = 1e-6
ACCEPT_TOL = 1e-6
SPLINE_DEGREE = 2


@dataclass(frozen=True)
class SamplingPlan:
    """
    Boundary samples used to probe a network.

    `count` random z_B uniform in [-radius, radius]^{n_B}, gauge-fixed by
    subtracting the last component; `holdout` further samples from seed + 1
    validate the recovered laws. Acyclic recovery adds a grid of
    `refine_points` voltages on [-2 radius, 2 radius] per reduced edge.
    """
    count: int = 64
    radius: float = 2.0
    seed: int = 0
    refine_points: int = 129
    holdout: int = 16
    basis_size: int = 8
    table_points: int = 129
    workers: int = 1

    def __post_init__(self):
        if self.count < 2:
            raise ConfigurationError(f"at least two samples are required, got {self.count}")
        if not self.radius > 0.0:
            raise ConfigurationError(f"sampling range must be positive, got {self.radius}")
        if self.workers < 1:
            raise ConfigurationError(f"worker count must be at least 1, got {self.workers}")

    def boundary_samples(self, n_boundary: int, holdout: bool = False) -> np.ndarray:
        rows = self.holdout if holdout else self.count
        rng = np.random.default_rng(self.seed + (1 if holdout else 0))
        samples = rng.uniform(-self.radius, self.radius, size=(rows, n_boundary))
        return samples - samples[:, -1:]


DEFAULT_PLAN = SamplingPlan()


@dataclass(frozen=True)
class SampleRecord:
    """One boundary sample: z_B, the boundary currents there, and the reduced Hessian."""
    z_B: np.ndarray
    J_B: np.ndarray
    hessian: np.ndarray


@dataclass(frozen=True)
class CycleSpace:
    """Columns of `matrix` span ker D̂, one fundamental cycle per chord."""
    matrix: np.ndarray

    @classmethod
    def from_graph(cls, graph: DirectedGraph) -> "CycleSpace":
        return cls(cycle_space(graph))

    @property
    def dimension(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class AssumptionCertificate:
    """
    What a reduction could and could not certify.

    `supports` holds one bitmap per sample over `support_pairs` (boundary
    name pairs in lexicographic position order); the support is stable iff
    all bitmaps agree.
    """
    samples_used: int
    support_stable: bool
    acyclic: bool
    support_pairs: Tuple[Tuple[str, str], ...] = ()
    supports: Tuple[str, ...] = ()
    consistency_residual: float = float("nan")
    integrability_max_asymmetry: float = float("nan")
    hessian_mismatch: float = float("nan")
    accepted: bool = False


@dataclass(frozen=True)
class CurvePoint:
    """One row of an effective two-terminal curve; failed solves keep nan values."""
    V: float
    I: float
    G: float
    ok: bool = True
    message: str = ""


@dataclass(frozen=True)
class ReducedNetwork:
    """
    Network on the boundary nodes with one tabulated law per reduced edge.

    Evaluates like the original at the boundary: J_B = D̂ f(D̂ᵀz_B).
    """
    graph: DirectedGraph
    tables: Tuple[EdgeTable, ...]
    certificate: AssumptionCertificate
    domain: Domain = Domain.RESISTOR
    exact_weights: Optional[np.ndarray] = None
    incidence: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "tables", tuple(self.tables))
        if len(self.tables) != self.graph.m:
            raise GraphError(f"{len(self.tables)} tables given for {self.graph.m} reduced edges")
        object.__setattr__(self, "incidence", build_incidence(self.graph).astype(float))

    def edge_voltages(self, z_boundary) -> np.ndarray:
        return self.incidence.T @ np.asarray(z_boundary, dtype=float)

    def boundary_currents(self, z_boundary) -> np.ndarray:
        y = self.edge_voltages(z_boundary)
        return self.incidence @ np.array([float(table(v)) for table, v in zip(self.tables, y)])

    def reduced_potential(self, z_boundary) -> float:
        y = self.edge_voltages(z_boundary)
        return float(sum(float(table.integral(v)) for table, v in zip(self.tables, y)))

    def laplacian(self, z_boundary) -> np.ndarray:
        y = self.edge_voltages(z_boundary)
        slopes = np.array([float(table.derivative(v)) for table, v in zip(self.tables, y)])
        return laplacian(self.incidence, slopes)

    def with_certificate(self, **changes) -> "ReducedNetwork":
        return replace(self, certificate=replace(self.certificate, **changes))


def reduced_hessian(net: Network, z_boundary, solution: Optional[SolveResult] = None) -> np.ndarray:
    """
    ∂²K̂/∂z_B² = K_BB - K_BC K_CC⁻¹ K_CB at (z_C(z_B), z_B).

    Without central nodes this is the full Hessian.
    """
    solution = solution or solve_interior(net, z_boundary)
    _, block_cb, block_bb = interior_blocks(net, solution.z)
    if not net.partition.central:
        return block_bb
    schur = block_bb + block_cb.T @ sensitivity(net, z_boundary, solution)
    return 0.5 * (schur + schur.T)


def kron_reduce_laplacian(matrix: np.ndarray, keep: Sequence[int], sequential: bool = False) -> np.ndarray:
    """
    Schur complement of a Laplacian onto the `keep` nodes, in the order given.

    With `sequential` the other nodes are eliminated one at a time in
    ascending index order, each step a one-node Schur complement.
    """
    matrix = np.asarray(matrix, dtype=float)
    keep = [int(k) for k in keep]
    eliminated = [i for i in range(matrix.shape[0]) if i not in set(keep)]
    if not eliminated:
        return matrix[np.ix_(keep, keep)].copy()
    if not sequential:
        coupling = matrix[np.ix_(eliminated, keep)]
        block = matrix[np.ix_(eliminated, eliminated)]
        schur = matrix[np.ix_(keep, keep)] - coupling.T @ linalg.solve(block, coupling, assume_a="pos")
        return 0.5 * (schur + schur.T)

    remaining = list(range(matrix.shape[0]))
    current = matrix.copy()
    for node in eliminated:
        pos = remaining.index(node)
        pivot = current[pos, pos]
        current = current - np.outer(current[:, pos], current[pos, :]) / pivot
        current = np.delete(np.delete(current, pos, axis=0), pos, axis=1)
        remaining.pop(pos)
    order = [remaining.index(k) for k in keep]
    schur = current[np.ix_(order, order)]
    return 0.5 * (schur + schur.T)


def _record(net: Network, z_boundary) -> SampleRecord:
    solution = solve_interior(net, z_boundary)
    return SampleRecord(np.asarray(z_boundary, dtype=float), solution.J_B,
                        reduced_hessian(net, z_boundary, solution))


def collect_samples(net: Network, samples: Sequence, workers: int = 1) -> List[SampleRecord]:
    """Solves and Schur complements per sample, in input order."""
    if workers <= 1 or len(samples) <= 1:
        return [_record(net, z_b) for z_b in samples]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda z_b: _record(net, z_b), samples))


def _support_pairs(n_boundary: int) -> List[Tuple[int, int]]:
    return [(p, q) for p in range(n_boundary) for q in range(p + 1, n_boundary)]


def _bitmap(hessian: np.ndarray, pairs) -> str:
    threshold = support_threshold(hessian)
    return "".join("1" if abs(hessian[p, q]) > threshold else "0" for p, q in pairs)


def _certify_support(net: Network, records: Sequence[SampleRecord]) -> Tuple[DirectedGraph, AssumptionCertificate]:
    pairs = _support_pairs(net.partition.n_boundary)
    bitmaps = tuple(_bitmap(record.hessian, pairs) for record in records)
    union = [pair for position, pair in enumerate(pairs) if any(b[position] == "1" for b in bitmaps)]
    graph = DirectedGraph(net.boundary_names, tuple(union))
    stable = len(set(bitmaps)) <= 1
    names = net.boundary_names
    certificate = AssumptionCertificate(
        samples_used=len(records),
        support_stable=stable,
        acyclic=is_acyclic(graph),
        support_pairs=tuple((names[p], names[q]) for p, q in pairs),
        supports=bitmaps,
        integrability_max_asymmetry=0.0 if is_acyclic(graph) else float("nan"),
    )
    return graph, certificate


def infer_reduced_graph(net: Network, plan: SamplingPlan = DEFAULT_PLAN,
                        records: Optional[Sequence[SampleRecord]] = None
                        ) -> Tuple[DirectedGraph, AssumptionCertificate]:
    """
    Reduced graph from the union of the sampled Schur-complement supports.

    Edge (p, q) is present at a sample when |S_pq| exceeds 1e-10 + 1e-9 max
    diagonal; edges run from the lower to the higher boundary position.
    Differing supports are flagged in the certificate, not raised.
    """
    if records is None:
        samples = plan.boundary_samples(net.partition.n_boundary)
        records = collect_samples(net, samples, plan.workers)
    graph, certificate = _certify_support(net, records)
    logger.info("inferred %d reduced edges on %d boundary nodes from %d samples",
                graph.m, graph.n, len(records))
    if not certificate.support_stable:
        logger.warning("reduced edge support differs across samples (%d distinct patterns); using the union",
                       len(set(certificate.supports)))
    return graph, certificate


def _edge_weights(graph: DirectedGraph, hessian: np.ndarray) -> np.ndarray:
    return np.array([-hessian[tail, head] for tail, head in graph.edges])


def _pool_pairs(graph: DirectedGraph, records: Sequence[SampleRecord], certificate: AssumptionCertificate):
    """Per-edge (voltage, current, slope) arrays, sorted by voltage and checked for consistency."""
    if graph.m == 0:
        return []
    incidence = build_incidence(graph).astype(float)
    voltages, currents, slopes = [], [], []
    for record in records:
        current, *_ = np.linalg.lstsq(incidence, record.J_B, rcond=None)
        voltages.append(incidence.T @ record.z_B)
        currents.append(current)
        slopes.append(_edge_weights(graph, record.hessian))
    voltages, currents, slopes = np.array(voltages), np.array(currents), np.array(slopes)

    pooled = []
    for j in range(graph.m):
        order = np.lexsort((currents[:, j], voltages[:, j]))
        y, current, slope = voltages[order, j], currents[order, j], slopes[order, j]
        close = np.abs(np.diff(y)) <= PAIR_VOLTAGE_TOL
        clash = close & (np.abs(np.diff(current)) > PAIR_CURRENT_TOL)
        if np.any(clash):
            k = int(np.argmax(clash))
            raise InconsistentPairsError(
                f"reduced edge {graph.edge_label(j)}: currents {current[k]!r} and {current[k + 1]!r} "
                f"at voltage {y[k]!r}; the reduced current is not a function of its own voltage",
                certificate=certificate)
        keep = [0]
        for k in range(1, y.size):
            if y[k] - y[keep[-1]] > TABLE_MIN_SPACING:
                keep.append(k)
        pooled.append((y[keep], current[keep], slope[keep]))
    return pooled


def _refinement_samples(graph: DirectedGraph, plan: SamplingPlan) -> np.ndarray:
    """Boundary potentials exciting one reduced tree edge at a time on a voltage grid."""
    grid = np.linspace(-2.0 * plan.radius, 2.0 * plan.radius, plan.refine_points)
    forest = graph.undirected()
    rows = []
    for j, (tail, head) in enumerate(graph.edges):
        cut = forest.copy()
        cut.remove_edge(tail, head, key=j)
        side = list(nx.node_connected_component(cut, head))
        for v in grid:
            z_boundary = np.zeros(graph.n)
            z_boundary[side] = v
            rows.append(z_boundary)
    return np.array(rows).reshape(-1, graph.n)


def held_out_residual(net: Network, reduced: ReducedNetwork, plan: SamplingPlan = DEFAULT_PLAN
                      ) -> Tuple[float, bool]:
    """
    max ||D̂ f(D̂ᵀz_B) - J_B(z_B)||_inf over fresh samples, and whether every
    sample stays within 1e-6 (1 + ||J_B||_inf).
    """
    samples = plan.boundary_samples(net.partition.n_boundary, holdout=True)
    worst, accepted = 0.0, True
    for z_boundary in samples:
        exact = solve_interior(net, z_boundary).J_B
        error = float(np.abs(reduced.boundary_currents(z_boundary) - exact).max())
        worst = max(worst, error)
        accepted &= error <= ACCEPT_TOL * (1.0 + float(np.abs(exact).max()))
    return worst, bool(accepted)


def hessian_mismatch(reduced: ReducedNetwork, records: Sequence[SampleRecord]) -> float:
    """Largest relative gap between D̂ diag(f'(ŷ)) D̂ᵀ and the sampled reduced Hessians."""
    worst = 0.0
    for record in records:
        scale = max(float(np.abs(record.hessian).max()), np.finfo(float).tiny)
        worst = max(worst, float(np.abs(reduced.laplacian(record.z_B) - record.hessian).max()) / scale)
    return worst


def recover_edge_laws_acyclic(net: Network, graph: DirectedGraph, plan: SamplingPlan = DEFAULT_PLAN,
                              records: Optional[Sequence[SampleRecord]] = None,
                              certificate: Optional[AssumptionCertificate] = None) -> ReducedNetwork:
    """
    Tabulates the reduced law of every edge of an acyclic reduced graph.

    D̂ Î = J_B is solved exactly per sample; the pooled (ŷ, Î) pairs, with
    slopes taken from the reduced-Hessian weights, become monotone Hermite
    tables. Each reduced edge is also swept alone over [-2R, 2R].

    Raises:
        AssumptionError: the reduced graph has cycles.
        InconsistentPairsError: equal voltages carry different currents.
        NonMonotoneError: pooled currents are not strictly increasing.
    """
    if not is_acyclic(graph):
        raise AssumptionError("reduced graph has cycles; use the cyclic recovery", certificate=certificate)
    if records is None:
        records = collect_samples(net, plan.boundary_samples(net.partition.n_boundary), plan.workers)
    if certificate is None:
        _, certificate = _certify_support(net, records)
    if not certificate.support_stable:
        logger.warning("recovering laws on an unstable reduced support")

    refinement = collect_samples(net, _refinement_samples(graph, plan), plan.workers)
    logger.info("acyclic recovery: %d random and %d sweep samples", len(records), len(refinement))
    pooled = _pool_pairs(graph, list(records) + refinement, certificate)
    try:
        tables = tuple(EdgeTable.from_samples(y, current, slope) for y, current, slope in pooled)
    except NonMonotoneError as exc:
        raise NonMonotoneError(str(exc), certificate=certificate) from exc

    reduced = ReducedNetwork(graph, tables, replace(certificate, acyclic=True), net.domain)
    residual, accepted = held_out_residual(net, reduced, plan)
    logger.info("acyclic recovery: held-out residual %.3e", residual)
    return reduced.with_certificate(consistency_residual=residual,
                                    integrability_max_asymmetry=0.0,
                                    hessian_mismatch=hessian_mismatch(reduced, records),
                                    accepted=accepted)


class _EdgeBasis:
    """Integrated clamped B-splines φ_k(y) = ∫₀^y B_k on quantile knots of the sampled voltages."""

    def __init__(self, voltages: np.ndarray, size: int, degree: int = SPLINE_DEGREE):
        lo, hi = min(float(voltages.min()), 0.0), max(float(voltages.max()), 0.0)
        n_interior = max(size - degree - 1, 0)
        interior = np.quantile(voltages, np.linspace(0.0, 1.0, n_interior + 2)[1:-1])
        interior = np.unique(interior[(interior > lo) & (interior < hi)])
        knots = np.r_[[lo] * (degree + 1), interior, [hi] * (degree + 1)]
        self.lo, self.hi = lo, hi
        self.size = len(knots) - degree - 1
        self.basis = BSpline(knots, np.eye(self.size), degree, extrapolate=True)
        self.primitive = self.basis.antiderivative()

    def integrated(self, y) -> np.ndarray:
        return self.primitive(np.atleast_1d(y)) - self.primitive(0.0)

    def derivative(self, y) -> np.ndarray:
        return self.basis(np.atleast_1d(y))


def recover_edge_laws_cyclic(net: Network, graph: DirectedGraph, plan: SamplingPlan = DEFAULT_PLAN,
                             records: Optional[Sequence[SampleRecord]] = None,
                             certificate: Optional[AssumptionCertificate] = None) -> ReducedNetwork:
    """
    Best-effort separable fit Î_j = f_j(ŷ_j) on a reduced graph with cycles.

    Minimises Σ_s ||D̂ f(D̂ᵀz_s) - J_B(z_s)||² with every f_j a non-negative
    combination of integrated quadratic B-splines (f_j(0) = 0, f_j' ≥ 0),
    then tabulates the fit. A held-out residual above tolerance leaves the
    result flagged (`accepted` false) rather than raising. Acyclic graphs
    are delegated to `recover_edge_laws_acyclic`.

    Raises:
        RankDeficiencyError: the least-squares system is rank deficient.
        NonMonotoneError: a fitted law is not strictly increasing.
    """
    if is_acyclic(graph):
        return recover_edge_laws_acyclic(net, graph, plan, records, certificate)
    if records is None:
        records = collect_samples(net, plan.boundary_samples(net.partition.n_boundary), plan.workers)
    if certificate is None:
        _, certificate = _certify_support(net, records)
    if not certificate.support_stable:
        logger.warning("recovering laws on an unstable reduced support")

    incidence = build_incidence(graph).astype(float)
    z_samples = np.array([record.z_B for record in records])
    targets = np.array([record.J_B for record in records])
    voltages = z_samples @ incidence
    bases = [_EdgeBasis(voltages[:, j], plan.basis_size) for j in range(graph.m)]

    blocks = []
    for j, basis in enumerate(bases):
        integrated = basis.integrated(voltages[:, j])
        block = incidence[:, j][None, :, None] * integrated[:, None, :]
        blocks.append(block.reshape(len(records) * graph.n, basis.size))
    design = np.hstack(blocks)
    rank = np.linalg.matrix_rank(design)
    if rank < design.shape[1]:
        raise RankDeficiencyError(
            f"cyclic fit has rank {rank} for {design.shape[1]} coefficients; add samples or shrink the basis",
            certificate=certificate)
    fit = optimize.lsq_linear(design, targets.reshape(-1), bounds=(0.0, np.inf), method="bvls", tol=1e-12)
    training = float(np.abs(design @ fit.x - targets.reshape(-1)).max())
    logger.info("cyclic recovery: %d coefficients, training residual %.3e", design.shape[1], training)

    tables, offset = [], 0
    for j, basis in enumerate(bases):
        coefficients = fit.x[offset:offset + basis.size]
        offset += basis.size
        grid = np.linspace(basis.lo, basis.hi, plan.table_points)
        slope = basis.derivative(grid) @ coefficients
        if np.any(slope <= 0.0):
            k = int(np.argmax(slope <= 0.0))
            raise NonMonotoneError(
                f"fitted law of reduced edge {graph.edge_label(j)} has slope {slope[k]!r} at y={grid[k]!r}",
                certificate=certificate)
        try:
            tables.append(EdgeTable.from_samples(grid, basis.integrated(grid) @ coefficients, slope))
        except NonMonotoneError as exc:
            raise NonMonotoneError(str(exc), certificate=certificate) from exc

    reduced = ReducedNetwork(graph, tuple(tables), replace(certificate, acyclic=False), net.domain)
    residual, accepted = held_out_residual(net, reduced, plan)
    if accepted:
        logger.info("cyclic recovery accepted: held-out residual %.3e", residual)
    else:
        logger.warning("cyclic recovery flagged: held-out residual %.3e above tolerance", residual)
    return reduced.with_certificate(consistency_residual=residual,
                                    hessian_mismatch=hessian_mismatch(reduced, records),
                                    accepted=accepted)


def integrability_diagnostic(net: Network, graph: DirectedGraph, cycles: CycleSpace, reduced: ReducedNetwork,
                             plan: SamplingPlan = DEFAULT_PLAN,
                             records: Optional[Sequence[SampleRecord]] = None,
                             step: float = 1e-4) -> float:
    """
    Largest asymmetry |∂_k S_ij - ∂_i S_kj| of the cycle-space correction.

    S(ŷ) = F⁺ (Ŵ - diag f'(ŷ)) F⁺ᵀ with Ŵ the sampled reduced weights and f
    the fitted laws. Derivatives are central differences along the first
    n_B - 1 boundary potentials (the last one is the gauge); i and k run over
    indices below min(dim ker D̂, n_B - 1). Zero without cycles. NaN when that
    span leaves no index pair, as for a single cycle: nothing is measured there.
    """
    if cycles.dimension == 0:
        return 0.0
    span = min(cycles.dimension, graph.n - 1)
    if span < 2:
        logger.info("integrability diagnostic not assessed: no index pairs (cycle dimension %d)", cycles.dimension)
        return float("nan")
    if records is None:
        records = collect_samples(net, plan.boundary_samples(net.partition.n_boundary), plan.workers)
    pseudo_inverse = np.linalg.pinv(cycles.matrix)
    incidence = build_incidence(graph).astype(float)

    def correction(z_boundary) -> np.ndarray:
        weights = _edge_weights(graph, reduced_hessian(net, z_boundary))
        y = incidence.T @ z_boundary
        fitted = np.array([float(table.derivative(v)) for table, v in zip(reduced.tables, y)])
        return pseudo_inverse @ np.diag(weights - fitted) @ pseudo_inverse.T

    worst = 0.0
    for record in records:
        gradient = []
        for b in range(span):
            shift = np.zeros(graph.n)
            shift[b] = step
            gradient.append((correction(record.z_B + shift) - correction(record.z_B - shift)) / (2.0 * step))
        for i in range(span):
            for k in range(i + 1, span):
                worst = max(worst, float(np.abs(gradient[k][i, :] - gradient[i][k, :]).max()))
    logger.info("integrability diagnostic: max asymmetry %.3e", worst)
    return worst


def effective_curve(net: Network, a, b, v_grid: Sequence[float]) -> List[CurvePoint]:
    """
    Two-terminal curve between boundary nodes `a` and `b` (names or indices).

    Every other node is central. At each V, z_a = V and z_b = 0; I is the
    nodal current at `a` and G = K̂(V, 0) - K̂(0, 0). Failed solves give a
    marked point instead of raising.
    """
    index_a = net.graph.index(a) if isinstance(a, str) else int(a)
    index_b = net.graph.index(b) if isinstance(b, str) else int(b)
    if index_a == index_b:
        raise GraphError("effective curve needs two distinct terminals")
    two_terminal = net.with_boundary([index_a, index_b])
    position_a = two_terminal.partition.boundary.index(index_a)

    base = reduced_potential(two_terminal, np.zeros(2))
    points = []
    for v in v_grid:
        z_boundary = np.zeros(2)
        z_boundary[position_a] = v
        try:
            solution = solve_interior(two_terminal, z_boundary)
        except KronError as exc:
            logger.warning("effective curve: solve failed at V=%r: %s", v, exc)
            points.append(CurvePoint(float(v), float("nan"), float("nan"), ok=False, message=str(exc)))
            continue
        current = float(solution.J_B[position_a])
        points.append(CurvePoint(float(v), current, reduced_potential(two_terminal, z_boundary, solution) - base))
    return points


def reduce_linear(net: Network, plan: SamplingPlan = DEFAULT_PLAN) -> ReducedNetwork:
    """
    Exact reduction of an all-quadratic network: one Laplacian Schur complement.

    Tables are exact lines over [-2R, 2R]. Without central nodes the graph
    is kept as given, parallel edges included.

    Raises:
        LinearLawError: some law is not g(y) = ḡ y.
    """
    weights = []
    for j, law in enumerate(net.laws):
        if law.linear_conductance is None:
            raise LinearLawError(f"edge {net.graph.edge_label(j)} has non-linear law `{law.text}`")
        weights.append(law.linear_conductance)
    weights = np.array(weights)

    if not net.partition.central:
        graph = DirectedGraph(net.graph.node_ids, net.graph.edges)
    else:
        full = laplacian(net.incidence, weights)
        schur = kron_reduce_laplacian(full, net.partition.boundary)
        graph, weights = graph_from_laplacian(schur, net.boundary_names)

    grid = np.linspace(-2.0 * plan.radius, 2.0 * plan.radius, 5)
    tables = tuple(EdgeTable.from_samples(grid, w * grid, np.full(grid.size, w), limit=False) for w in weights)
    pairs = _support_pairs(graph.n)
    present = {tuple(sorted(edge)) for edge in graph.edges}
    bitmap = "".join("1" if pair in present else "0" for pair in pairs)
    certificate = AssumptionCertificate(
        samples_used=0,
        support_stable=True,
        acyclic=is_acyclic(graph),
        support_pairs=tuple((graph.node_ids[p], graph.node_ids[q]) for p, q in pairs),
        supports=(bitmap,),
        consistency_residual=0.0,
        integrability_max_asymmetry=0.0,
        hessian_mismatch=0.0,
        accepted=True,
    )
    logger.info("exact linear reduction: %d reduced edges", graph.m)
    return ReducedNetwork(graph, tables, certificate, net.domain, exact_weights=weights)
