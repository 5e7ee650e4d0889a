"""Directed Graphs and Incidence Algebra"""
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from kronred.errors import GraphError, LaplacianStructureError

logger = logging.getLogger(__name__)

SUPPORT_ABS_TOL = 1e-10
SUPPORT_REL_TOL = 1e-9
"""Edge-support thresholds: |L_ik| counts as an edge above abs + rel * max diagonal."""


@dataclass(frozen=True)
class DirectedGraph:
    """
    Directed graph with ordered named nodes and ordered (tail, head) edges.

    Edges store node indices. Parallel edges are allowed; self-loops are not.
    Connectivity is not enforced here (see `is_connected`).
    """
    node_ids: Tuple[str, ...]
    edges: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "node_ids", tuple(str(name) for name in self.node_ids))
        object.__setattr__(self, "edges", tuple((int(t), int(h)) for t, h in self.edges))
        duplicates = [name for name, count in Counter(self.node_ids).items() if count > 1]
        if duplicates:
            raise GraphError(f"duplicate node name {duplicates[0]!r}")
        for j, (tail, head) in enumerate(self.edges):
            if not (0 <= tail < self.n and 0 <= head < self.n):
                raise GraphError(f"edge {j} references a node outside 0..{self.n - 1}")
            if tail == head:
                raise GraphError(f"edge {j} is a self-loop at node {self.node_ids[tail]!r}")

    @classmethod
    def from_names(cls, node_ids: Sequence[str], named_edges: Iterable[Tuple[str, str]]) -> "DirectedGraph":
        """Builds a graph from node names and (from, to) name pairs."""
        node_ids = tuple(str(name) for name in node_ids)
        if len(set(node_ids)) != len(node_ids):
            return cls(node_ids)  # raises the duplicate error
        position = {name: i for i, name in enumerate(node_ids)}
        edges = []
        for tail, head in named_edges:
            for name in (tail, head):
                if str(name) not in position:
                    raise GraphError(f"edge references undeclared node {name!r}")
            edges.append((position[str(tail)], position[str(head)]))
        return cls(node_ids, tuple(edges))

    @property
    def n(self) -> int:
        return len(self.node_ids)

    @property
    def m(self) -> int:
        return len(self.edges)

    def index(self, name: str) -> int:
        try:
            return self.node_ids.index(str(name))
        except ValueError as exc:
            raise GraphError(f"unknown node {name!r}") from exc

    def edge_label(self, j: int) -> str:
        tail, head = self.edges[j]
        return f"{j} ({self.node_ids[tail]}->{self.node_ids[head]})"

    def flipped(self, j: int) -> "DirectedGraph":
        """Same graph with edge `j` reversed."""
        edges = list(self.edges)
        tail, head = edges[j]
        edges[j] = (head, tail)
        return DirectedGraph(self.node_ids, tuple(edges))

    def undirected(self) -> nx.MultiGraph:
        """Underlying undirected multigraph on node indices; edge keys are edge indices."""
        multigraph = nx.MultiGraph()
        multigraph.add_nodes_from(range(self.n))
        for j, (tail, head) in enumerate(self.edges):
            multigraph.add_edge(tail, head, key=j)
        return multigraph


@dataclass(frozen=True)
class NodePartition:
    """Boundary / central split of node indices, each kept in ascending order."""
    boundary: Tuple[int, ...]
    central: Tuple[int, ...]

    def __post_init__(self):
        if not self.boundary:
            raise GraphError("at least one boundary node is required")
        if set(self.boundary) & set(self.central):
            raise GraphError("boundary and central node sets overlap")

    @classmethod
    def from_boundary(cls, n: int, boundary: Iterable[int]) -> "NodePartition":
        chosen = sorted(set(int(i) for i in boundary))
        if any(i < 0 or i >= n for i in chosen):
            raise GraphError("boundary index out of range")
        central = tuple(i for i in range(n) if i not in set(chosen))
        return cls(tuple(chosen), central)

    @property
    def n_boundary(self) -> int:
        return len(self.boundary)


def build_incidence(g: DirectedGraph) -> np.ndarray:
    """
    n x m incidence matrix: column j has +1 at the head and -1 at the tail of edge j.

    Hence (Dᵀz)_j = z_head - z_tail.
    """
    incidence = np.zeros((g.n, g.m), dtype=int)
    for j, (tail, head) in enumerate(g.edges):
        incidence[head, j] = 1
        incidence[tail, j] = -1
    return incidence


def is_connected(g: DirectedGraph) -> bool:
    """True iff the underlying undirected graph is connected (a single node counts)."""
    if g.n == 0:
        return False
    return nx.is_connected(g.undirected())


def is_acyclic(g: DirectedGraph) -> bool:
    """True iff the underlying undirected multigraph is a forest (ker D = {0})."""
    if g.n == 0:
        return True
    components = nx.number_connected_components(g.undirected())
    return g.m == g.n - components


def laplacian(incidence: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """D diag(w) Dᵀ."""
    incidence = np.asarray(incidence, dtype=float)
    return (incidence * np.asarray(weights, dtype=float)) @ incidence.T


def support_threshold(matrix: np.ndarray) -> float:
    diagonal = np.diag(matrix)
    largest = float(np.abs(diagonal).max()) if diagonal.size else 0.0
    return SUPPORT_ABS_TOL + SUPPORT_REL_TOL * largest


def graph_from_laplacian(matrix: np.ndarray,
                         node_ids: Sequence[str],
                         threshold: Optional[float] = None,
                         tol: Optional[float] = None) -> Tuple[DirectedGraph, np.ndarray]:
    """
    Reads a simple weighted graph off a Laplacian sign pattern.

    One edge i->k (i < k) per off-diagonal entry below -threshold, with weight
    -L_ik. `threshold` defaults to the edge-support threshold and `tol`, used
    for the symmetry, row-sum, sign and reconstruction checks, to
    1e-8 * (1 + ||L||_inf).

    Raises:
        LaplacianStructureError: asymmetric, nonzero row sums, positive
            off-diagonal, or the reconstruction misses L.
    """
    matrix = np.asarray(matrix, dtype=float)
    n = matrix.shape[0]
    if matrix.shape != (n, n) or len(node_ids) != n:
        raise LaplacianStructureError("matrix must be square and match the node list")
    scale = 1.0 + (np.linalg.norm(matrix, np.inf) if n else 0.0)
    tol = 1e-8 * scale if tol is None else tol
    threshold = support_threshold(matrix) if threshold is None else threshold

    if n and np.abs(matrix - matrix.T).max() > tol:
        raise LaplacianStructureError("matrix is not symmetric")
    if n and np.abs(matrix.sum(axis=1)).max() > tol:
        raise LaplacianStructureError(f"row sum {np.abs(matrix.sum(axis=1)).max():.3e} exceeds {tol:.3e}")
    off_diagonal = matrix - np.diag(np.diag(matrix))
    if n and off_diagonal.max() > tol:
        i, k = np.unravel_index(np.argmax(off_diagonal), off_diagonal.shape)
        raise LaplacianStructureError(f"positive off-diagonal entry at ({i}, {k}): {off_diagonal[i, k]:.3e}")

    edges, weights = [], []
    for i in range(n):
        for k in range(i + 1, n):
            if -matrix[i, k] > threshold:
                edges.append((i, k))
                weights.append(-matrix[i, k])
    graph = DirectedGraph(tuple(node_ids), tuple(edges))
    weights = np.asarray(weights, dtype=float)

    reconstruction = laplacian(build_incidence(graph), weights) if graph.m else np.zeros((n, n))
    error = np.linalg.norm(reconstruction - matrix, np.inf) if n else 0.0
    if error > 1e-8 * scale:
        raise LaplacianStructureError(f"reconstruction error {error:.3e} exceeds {1e-8 * scale:.3e}")
    return graph, weights


def cycle_space(g: DirectedGraph) -> np.ndarray:
    """
    m x (m - n + components) matrix F whose columns span ker D.

    One fundamental cycle per chord of a spanning forest picked greedily in
    edge order; each column is +1 on its chord.
    """
    forest = nx.Graph()
    forest.add_nodes_from(range(g.n))
    union_find = nx.utils.UnionFind(range(g.n))
    chords = []
    for j, (tail, head) in enumerate(g.edges):
        if union_find[tail] == union_find[head]:
            chords.append(j)
        else:
            union_find.union(tail, head)
            forest.add_edge(tail, head, index=j)

    basis = np.zeros((g.m, len(chords)))
    for column, j in enumerate(chords):
        tail, head = g.edges[j]
        basis[j, column] = 1.0
        path = nx.shortest_path(forest, head, tail)
        for u, v in zip(path[:-1], path[1:]):
            k = forest.edges[u, v]["index"]
            basis[k, column] += 1.0 if g.edges[k] == (u, v) else -1.0
    return basis


def reduced_support_by_paths(g: DirectedGraph, partition: NodePartition) -> Set[Tuple[int, int]]:
    """
    Predicted reduced-graph support from connectivity alone.

    Returns pairs (p, q), p < q, of positions in `partition.boundary` joined by
    a path whose intermediate nodes are all central.
    """
    multigraph = g.undirected()
    central_graph = multigraph.subgraph(partition.central)
    component_of = {}
    for label, component in enumerate(nx.connected_components(central_graph)):
        for node in component:
            component_of[node] = label

    reach: List[Set] = []
    for node in partition.boundary:
        touched = set()
        for neighbour in multigraph.neighbors(node):
            if neighbour in component_of:
                touched.add(("central", component_of[neighbour]))
            else:
                touched.add(("boundary", neighbour))
        reach.append(touched)

    support = set()
    for p, node_p in enumerate(partition.boundary):
        for q in range(p + 1, partition.n_boundary):
            node_q = partition.boundary[q]
            direct = ("boundary", node_q) in reach[p]
            shared = any(item[0] == "central" and item in reach[q] for item in reach[p])
            if direct or shared:
                support.add((p, q))
    return support


@dataclass(frozen=True)
class LaplacianCheck:
    """Measured structure quantities of a candidate Laplacian."""
    symmetry_error: float
    row_sum_error: float
    max_off_diagonal: float
    min_eigenvalue: float
    second_eigenvalue: float
    passed: bool


def check_laplacian_structure(matrix: np.ndarray,
                              connected: bool = True,
                              row_tol: float = 1e-10,
                              off_diagonal_tol: float = 1e-12,
                              psd_tol: float = 1e-9) -> LaplacianCheck:
    """
    Symmetry, zero row sums, non-positive off-diagonals, positive
    semi-definiteness, and (for connected graphs) kernel exactly span{1}.

    Tolerances are relative to 1 + max |L_ii|.
    """
    matrix = np.asarray(matrix, dtype=float)
    n = matrix.shape[0]
    symmetry_error = float(np.abs(matrix - matrix.T).max()) if n else 0.0
    row_sum_error = float(np.abs(matrix.sum(axis=1)).max()) if n else 0.0
    off_diagonal = matrix - np.diag(np.diag(matrix))
    max_off_diagonal = float(off_diagonal.max()) if n > 1 else 0.0
    eigenvalues = np.linalg.eigvalsh(0.5 * (matrix + matrix.T)) if n else np.zeros(0)
    min_eigenvalue = float(eigenvalues[0]) if n else 0.0
    second = float(eigenvalues[1]) if n > 1 else float("inf")
    scale = 1.0 + (float(np.abs(np.diag(matrix)).max()) if n else 0.0)
    passed = (symmetry_error <= row_tol * scale
              and row_sum_error <= row_tol * scale
              and max_off_diagonal <= off_diagonal_tol * scale
              and min_eigenvalue >= -psd_tol * scale
              and (not connected or second > psd_tol * scale))
    return LaplacianCheck(symmetry_error, row_sum_error, max_off_diagonal, min_eigenvalue, second, passed)
