"""Helper Functions"""
import logging
import os
from enum import Enum

from langgraph.graph import END
from typing_extensions import TypedDict

from kronred.errors import ConfigurationError


class Domain(Enum):
    """
    Physical reading of a network; changes labels, never numbers.
    """
    RESISTOR = "resistor"
    MEMRISTOR = "memristor"


DOMAIN_LABELS = {
    Domain.RESISTOR: {
        "potential": "potential",
        "voltage": "voltage",
        "current": "current",
        "conductance": "conductance",
        "cocontent": "co-content",
        "power": "power",
    },
    Domain.MEMRISTOR: {
        "potential": "nodal flux",
        "voltage": "flux",
        "current": "charge",
        "conductance": "memductance",
        "cocontent": "action",
        "power": "flux-charge product",
    },
}
"""Report labels per domain."""


class ReductionStage(Enum):
    """
    Enum for the stages of the reduce workflow.
    """
    INFERENCE = "inference"
    ACYCLIC_RECOVERY = "acyclic_recovery"
    CYCLIC_RECOVERY = "cyclic_recovery"
    INTEGRABILITY = "integrability"
    LINEAR = "linear"


class NodeName(Enum):
    """
    Enum for node names.
    """
    INFERENCE = "Reduced Graph Inference"
    ACYCLIC_RECOVERY = "Acyclic Law Recovery"
    CYCLIC_RECOVERY = "Cyclic Law Recovery"
    INTEGRABILITY = "Integrability Diagnostic"
    LINEAR = "Exact Linear Reduction"


class ReductionState(TypedDict, total=False):
    """
    State for the reduction graph.
    """
    network: object
    plan: object
    graph: object
    certificate: object
    records: list
    reduced: object
    stage: list[ReductionStage]


class RuntimeConfig(TypedDict):
    """
    Configuration read from the environment.
    """
    threads: int
    log_level: str
    mlflow_uri: str | None
    mlflow_experiment: str


def get_runtime_config(environ=None) -> RuntimeConfig:
    """
    Reads the KRONRED_* environment variables.

    Args:
        environ (Mapping, optional): Variables to read; defaults to os.environ.

    Returns:
        RuntimeConfig: Thread cap, log level and optional MLflow target.

    Raises:
        ConfigurationError: KRONRED_THREADS is not a positive integer, or
            KRONRED_LOG_LEVEL names no logging level.
    """
    environ = os.environ if environ is None else environ
    raw_threads = environ.get("KRONRED_THREADS")
    if raw_threads is None or raw_threads == "":
        threads = os.cpu_count() or 1
    else:
        try:
            threads = int(raw_threads)
        except ValueError as exc:
            raise ConfigurationError(f"KRONRED_THREADS must be an integer, got {raw_threads!r}") from exc
        if threads < 1:
            raise ConfigurationError(f"KRONRED_THREADS must be at least 1, got {threads}")
    log_level = environ.get("KRONRED_LOG_LEVEL", "WARNING").upper()
    if not isinstance(logging.getLevelName(log_level), int):
        raise ConfigurationError(f"KRONRED_LOG_LEVEL {log_level!r} is not a logging level")
    return RuntimeConfig(
        threads=threads,
        log_level=log_level,
        mlflow_uri=environ.get("KRONRED_MLFLOW_URI") or None,
        mlflow_experiment=environ.get("KRONRED_MLFLOW_EXPERIMENT", "kronred"),
    )


def get_recovery_route(state: ReductionState) -> str:
    """
    Picks the law-recovery node after inference.

    Args:
        state (ReductionState): State holding the inferred certificate.

    Returns:
        str: Node name of the acyclic or the cyclic recovery.
    """
    if state["certificate"].acyclic:
        return NodeName.ACYCLIC_RECOVERY.value
    return NodeName.CYCLIC_RECOVERY.value


def get_finish_route(state: ReductionState) -> str:
    """
    Sends all-quadratic networks through the exact linear reduction, others to END.
    """
    if state["network"].is_linear:
        return NodeName.LINEAR.value
    return END
