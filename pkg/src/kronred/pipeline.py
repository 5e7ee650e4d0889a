"""Reduction Graph Starting Point"""
import logging
from dataclasses import replace
from typing import Optional

import numpy as np
from langgraph.graph import END, StateGraph

from kronred.network.potential import Network
from kronred.network.reduction import (DEFAULT_PLAN, CycleSpace, ReducedNetwork, SamplingPlan, collect_samples,
                                       infer_reduced_graph, integrability_diagnostic, recover_edge_laws_acyclic,
                                       recover_edge_laws_cyclic, reduce_linear)
from kronred.tools.helper import (NodeName, ReductionStage, ReductionState, RuntimeConfig, get_finish_route,
                                  get_recovery_route)

logger = logging.getLogger(__name__)


def inference_node(state: ReductionState) -> ReductionState:
    """Samples the network and infers the reduced graph with its support certificate."""
    net, plan = state["network"], state["plan"]
    records = collect_samples(net, plan.boundary_samples(net.partition.n_boundary), plan.workers)
    graph, certificate = infer_reduced_graph(net, plan, records)
    return {"graph": graph, "certificate": certificate, "records": records,
            "stage": state["stage"] + [ReductionStage.INFERENCE]}


def acyclic_node(state: ReductionState) -> ReductionState:
    reduced = recover_edge_laws_acyclic(state["network"], state["graph"], state["plan"],
                                        state["records"], state["certificate"])
    return {"reduced": reduced, "stage": state["stage"] + [ReductionStage.ACYCLIC_RECOVERY]}


def cyclic_node(state: ReductionState) -> ReductionState:
    reduced = recover_edge_laws_cyclic(state["network"], state["graph"], state["plan"],
                                       state["records"], state["certificate"])
    return {"reduced": reduced, "stage": state["stage"] + [ReductionStage.CYCLIC_RECOVERY]}


def integrability_node(state: ReductionState) -> ReductionState:
    """Attaches the integrability asymmetry of the cyclic fit to its certificate."""
    reduced = state["reduced"]
    asymmetry = integrability_diagnostic(state["network"], state["graph"], CycleSpace.from_graph(state["graph"]),
                                         reduced, state["plan"], state["records"])
    return {"reduced": reduced.with_certificate(integrability_max_asymmetry=asymmetry),
            "stage": state["stage"] + [ReductionStage.INTEGRABILITY]}


def linear_node(state: ReductionState) -> ReductionState:
    """
    Attaches the exact Schur weights of an all-quadratic network.

    The weights are only attached when the exact support equals the sampled one.
    """
    reduced = state["reduced"]
    exact = reduce_linear(state["network"], state["plan"])
    if exact.graph.edges != reduced.graph.edges:
        logger.warning("exact reduced support %s differs from the sampled support %s; weights not attached",
                       exact.graph.edges, reduced.graph.edges)
        return {"stage": state["stage"] + [ReductionStage.LINEAR]}
    return {"reduced": replace(reduced, exact_weights=exact.exact_weights),
            "stage": state["stage"] + [ReductionStage.LINEAR]}


def create_graph():
    """
    Creates and compiles the reduction workflow.

    Inference routes to the acyclic or the cyclic recovery; the cyclic branch
    runs the integrability diagnostic; all-quadratic networks finish with the
    exact linear reduction.

    Returns:
        CompiledGraph: Runnable workflow over ReductionState.
    """
    graph = StateGraph(ReductionState)
    graph.add_node(NodeName.INFERENCE.value, inference_node)
    graph.add_node(NodeName.ACYCLIC_RECOVERY.value, acyclic_node)
    graph.add_node(NodeName.CYCLIC_RECOVERY.value, cyclic_node)
    graph.add_node(NodeName.INTEGRABILITY.value, integrability_node)
    graph.add_node(NodeName.LINEAR.value, linear_node)

    graph.add_conditional_edges(NodeName.INFERENCE.value, get_recovery_route,
                                [NodeName.ACYCLIC_RECOVERY.value, NodeName.CYCLIC_RECOVERY.value])
    graph.add_edge(NodeName.CYCLIC_RECOVERY.value, NodeName.INTEGRABILITY.value)
    graph.add_conditional_edges(NodeName.ACYCLIC_RECOVERY.value, get_finish_route, [NodeName.LINEAR.value, END])
    graph.add_conditional_edges(NodeName.INTEGRABILITY.value, get_finish_route, [NodeName.LINEAR.value, END])
    graph.add_edge(NodeName.LINEAR.value, END)

    graph.set_entry_point(NodeName.INFERENCE.value)
    return graph.compile()


def set_mlflow(config: RuntimeConfig) -> bool:
    """
    Points MLflow at the configured tracking server and experiment.

    Returns:
        bool: False when no tracking URI is configured.
    """
    if not config.get("mlflow_uri"):
        return False
    import mlflow  # pylint: disable=import-outside-toplevel

    mlflow.set_tracking_uri(config["mlflow_uri"])
    if mlflow.get_experiment_by_name(config["mlflow_experiment"]) is None:
        mlflow.create_experiment(config["mlflow_experiment"])
    mlflow.set_experiment(config["mlflow_experiment"])
    return True


def _finite(value: float) -> Optional[float]:
    return None if np.isnan(value) else float(value)


def log_reduction(reduced: ReducedNetwork, plan: SamplingPlan) -> None:
    """Logs the sampling plan and the certificate of one reduction to the active MLflow run."""
    import mlflow  # pylint: disable=import-outside-toplevel

    certificate = reduced.certificate
    with mlflow.start_run():
        mlflow.log_params({"samples": plan.count, "range": plan.radius, "seed": plan.seed,
                           "refine_points": plan.refine_points, "holdout": plan.holdout})
        metrics = {
            "reduced_edges": float(reduced.graph.m),
            "support_stable": float(certificate.support_stable),
            "acyclic": float(certificate.acyclic),
            "accepted": float(certificate.accepted),
            "consistency_residual": _finite(certificate.consistency_residual),
            "integrability_max_asymmetry": _finite(certificate.integrability_max_asymmetry),
            "hessian_mismatch": _finite(certificate.hessian_mismatch),
        }
        mlflow.log_metrics({key: value for key, value in metrics.items() if value is not None})


def reduce_network(net: Network, plan: SamplingPlan = DEFAULT_PLAN,
                   config: Optional[RuntimeConfig] = None) -> ReducedNetwork:
    """
    Runs the reduction workflow on a network.

    Args:
        net (Network): Network with its boundary set.
        plan (SamplingPlan, optional): Sampling settings.
        config (RuntimeConfig, optional): Enables MLflow tracking when it names a URI.

    Returns:
        ReducedNetwork: Tables, certificate and, for all-quadratic inputs, exact weights.
    """
    final = create_graph().invoke({"network": net, "plan": plan, "stage": []})
    stages = " -> ".join(stage.value for stage in final["stage"])
    logger.info("reduction finished: %s", stages)
    reduced = final["reduced"]
    if config is not None and set_mlflow(config):
        log_reduction(reduced, plan)
    return reduced
