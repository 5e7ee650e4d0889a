"""Network Checks"""
import logging
from dataclasses import asdict, dataclass, field
from typing import List

import numpy as np

from kronred.errors import KronError, NetworkFileError
from kronred.network.exprlaw import check_strong_convexity
from kronred.network.graph import (NodePartition, check_laplacian_structure, is_connected,
                                   reduced_support_by_paths)
from kronred.network.potential import (Network, homogeneity_probe_radius, power_balance_check,
                                       shift_invariance_error, weighted_laplacian, k_value)
from kronred.network.reduction import SamplingPlan, infer_reduced_graph, reduced_hessian
from kronred.network.solver import interior_hessian_check, solve_interior
from kronred.tools.helper import Domain
from kronred.tools.schema import NetworkFileSchema
from kronred.utils.helper import graph_from_schema, law_from_schema

logger = logging.getLogger(__name__)

SHIFT_TOL = 1e-9
CHECK_PLAN = SamplingPlan(count=8)


@dataclass(frozen=True)
class CheckResult:
    """One named check with its measured quantity."""
    name: str
    passed: bool
    measured: float
    detail: str = ""


@dataclass
class DiagnosticReport:
    """Every check run on a network file, in execution order."""
    checks: List[CheckResult] = field(default_factory=list)
    certificate: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def add(self, name: str, passed: bool, measured: float, detail: str = "") -> None:
        self.checks.append(CheckResult(name, bool(passed), float(measured), detail))

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [
                {**asdict(check), "measured": None if np.isnan(check.measured) else check.measured}
                for check in self.checks
            ],
            "certificate": self.certificate,
        }


def _probe_point(net: Network, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    radius = homogeneity_probe_radius(net)
    return rng.uniform(-radius, radius, net.n)


def _numeric_checks(net: Network, report: DiagnosticReport) -> None:
    z = _probe_point(net)
    structure = check_laplacian_structure(weighted_laplacian(net, z))
    report.add("laplacian structure", structure.passed, max(structure.symmetry_error, structure.row_sum_error),
               f"min eigenvalue {structure.min_eigenvalue:.3e}, second {structure.second_eigenvalue:.3e}")

    shift = 0.5 * homogeneity_probe_radius(net)
    error = shift_invariance_error(net, z, shift)
    report.add("shift invariance", error <= SHIFT_TOL * (1.0 + abs(k_value(net, z))), error,
               f"|K(z + {shift:g}) - K(z)|")

    balance = power_balance_check(net, z)
    report.add("power balance", balance.passed, balance.difference,
               f"V.I = {balance.edge_power:.6g}, psi.J = {balance.nodal_power:.6g}")

    z_boundary = CHECK_PLAN.boundary_samples(net.partition.n_boundary)[0]
    solution = solve_interior(net, z_boundary)
    eigenvalue = interior_hessian_check(net, solution.z)
    report.add("interior hessian", eigenvalue > 0.0, eigenvalue, "smallest eigenvalue of the central block")

    schur = check_laplacian_structure(reduced_hessian(net, z_boundary, solution))
    report.add("reduced laplacian structure", schur.passed, max(schur.symmetry_error, schur.row_sum_error),
               f"min eigenvalue {schur.min_eigenvalue:.3e}")

    graph, certificate = infer_reduced_graph(net, CHECK_PLAN)
    report.add("support stability", certificate.support_stable, len(set(certificate.supports)),
               f"{graph.m} reduced edges, acyclic={certificate.acyclic}")
    predicted = reduced_support_by_paths(net.graph, net.partition)
    inferred = set(graph.edges)
    report.add("support matches path connectivity", predicted == inferred, len(predicted ^ inferred),
               "pairs joined through central nodes only")
    report.certificate = {
        "samples_used": certificate.samples_used,
        "support_stable": certificate.support_stable,
        "acyclic": certificate.acyclic,
        "supports": list(certificate.supports),
    }


def run_checks(schema: NetworkFileSchema) -> DiagnosticReport:
    """
    Structural and numerical checks of a validated network document.

    Numeric checks need a connected graph with strongly convex laws and are
    skipped (not failed) otherwise.

    Raises:
        NetworkFileError: unknown names or unparsable laws.
    """
    report = DiagnosticReport()
    graph = graph_from_schema(schema)
    connected = is_connected(graph)
    report.add("connectivity", connected, float(connected), f"{graph.n} nodes, {graph.m} edges")

    laws, convex = [], True
    for j, edge in enumerate(schema.edges):
        law = law_from_schema(edge, f"edges[{j}].law", certify=False)
        convexity = check_strong_convexity(law)
        convex &= convexity.passed
        if convexity.passed:
            law = law_from_schema(edge, f"edges[{j}].law")
            report.add(f"convexity {graph.edge_label(j)}", True, convexity.margin, f"min g' on {law.validity_interval}")
        else:
            report.add(f"convexity {graph.edge_label(j)}", False, convexity.violation_slope,
                       f"g'({convexity.violation_y:.6g}) <= 0 for `{law.text}`")
        laws.append(law)

    if not (connected and convex):
        logger.info("skipping numeric checks: connected=%s, convex=%s", connected, convex)
        return report

    try:
        net = Network(graph, tuple(laws),
                      NodePartition.from_boundary(graph.n, [graph.index(b) for b in schema.boundary]),
                      Domain(schema.domain))
    except KronError as exc:
        raise NetworkFileError(str(exc)) from exc
    try:
        _numeric_checks(net, report)
    except KronError as exc:
        report.add("numeric checks", False, float("nan"), f"{type(exc).__name__}: {exc}")
    return report
