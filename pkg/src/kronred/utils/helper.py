"""Helper Functions"""
import io
import math
import sys
from typing import Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import ValidationError
from tabulate import tabulate

from kronred.errors import KronError, LawError, NetworkFileError
from kronred.network.exprlaw import DEFAULT_INTERVAL, EdgeLaw, LawKind, make_law
from kronred.network.graph import DirectedGraph
from kronred.network.potential import Network
from kronred.network.reduction import AssumptionCertificate, CurvePoint, ReducedNetwork
from kronred.network.tables import EdgeTable
from kronred.tools.helper import DOMAIN_LABELS, Domain
from kronred.tools.schema import (CertificateSchema, EdgeSchema, EdgeTableSchema, NetworkFileSchema,
                                  ReducedEdgeSchema, ReducedNetworkFileSchema)

CSV_FLOAT_FORMAT = "%.17g"


def read_text(path: str) -> str:
    """Reads a file, or stdin for "-"."""
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise NetworkFileError(f"cannot read {path}: {exc.strerror}") from exc


def write_text(path: Optional[str], text: str) -> None:
    """Writes to a file, or stdout for None / "-"."""
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)


def _location(error: ValidationError) -> str:
    first = error.errors()[0]
    parts = []
    for item in first["loc"]:
        if isinstance(item, int):
            parts.append(f"[{item}]")
        else:
            parts.append(("." if parts else "") + str(item))
    return "".join(parts) or "$"


def parse_network_file(text: str) -> NetworkFileSchema:
    """
    Validates a network document.

    Raises:
        NetworkFileError: malformed JSON or a schema violation, with its location.
    """
    try:
        return NetworkFileSchema.model_validate_json(text)
    except ValidationError as exc:
        raise NetworkFileError(exc.errors()[0]["msg"], _location(exc)) from exc


def graph_from_schema(schema: NetworkFileSchema) -> DirectedGraph:
    """Directed graph of a network document; unknown names are reported with their location."""
    declared = set(schema.nodes)
    for i, edge in enumerate(schema.edges):
        for key, name in (("from", edge.tail), ("to", edge.head)):
            if name not in declared:
                raise NetworkFileError(f"undeclared node {name!r}", f"edges[{i}].{key}")
    for i, name in enumerate(schema.boundary):
        if name not in declared:
            raise NetworkFileError(f"undeclared boundary node {name!r}", f"boundary[{i}]")
    try:
        return DirectedGraph.from_names(schema.nodes, [(e.tail, e.head) for e in schema.edges])
    except KronError as exc:
        raise NetworkFileError(str(exc), "edges") from exc


def law_from_schema(edge: EdgeSchema, location: str, certify: bool = True) -> EdgeLaw:
    interval = edge.interval if edge.interval is not None else DEFAULT_INTERVAL
    try:
        return make_law(edge.law, LawKind(edge.kind), interval, certify=certify)
    except LawError as exc:
        raise NetworkFileError(str(exc), location) from exc


def network_from_schema(schema: NetworkFileSchema) -> Network:
    """
    Builds a certified Network from a validated document.

    Raises:
        NetworkFileError: unknown names, bad laws (with the edge location),
            or a disconnected graph.
    """
    graph = graph_from_schema(schema)
    laws = [law_from_schema(edge, f"edges[{i}].law") for i, edge in enumerate(schema.edges)]
    try:
        return Network.build(graph, laws, schema.boundary, Domain(schema.domain))
    except KronError as exc:
        raise NetworkFileError(str(exc)) from exc


def load_network(path: str) -> Network:
    return network_from_schema(parse_network_file(read_text(path)))


def _finite_or_none(value: float) -> Optional[float]:
    return None if value is None or math.isnan(value) else float(value)


def certificate_to_schema(certificate: AssumptionCertificate) -> CertificateSchema:
    return CertificateSchema(
        samples_used=certificate.samples_used,
        support_stable=certificate.support_stable,
        acyclic=certificate.acyclic,
        support_pairs=[tuple(pair) for pair in certificate.support_pairs],
        supports=list(certificate.supports),
        consistency_residual=_finite_or_none(certificate.consistency_residual),
        integrability_max_asymmetry=_finite_or_none(certificate.integrability_max_asymmetry),
        hessian_mismatch=_finite_or_none(certificate.hessian_mismatch),
        accepted=certificate.accepted,
    )


def certificate_from_schema(schema: CertificateSchema) -> AssumptionCertificate:
    nan = float("nan")
    return AssumptionCertificate(
        samples_used=schema.samples_used,
        support_stable=schema.support_stable,
        acyclic=schema.acyclic,
        support_pairs=tuple(tuple(pair) for pair in schema.support_pairs),
        supports=tuple(schema.supports),
        consistency_residual=nan if schema.consistency_residual is None else schema.consistency_residual,
        integrability_max_asymmetry=(nan if schema.integrability_max_asymmetry is None
                                     else schema.integrability_max_asymmetry),
        hessian_mismatch=nan if schema.hessian_mismatch is None else schema.hessian_mismatch,
        accepted=schema.accepted,
    )


def dump_reduced(reduced: ReducedNetwork) -> str:
    """Reduced-network document as indented JSON; floats keep their shortest exact repr."""
    names = reduced.graph.node_ids
    edges = []
    for j, ((tail, head), table) in enumerate(zip(reduced.graph.edges, reduced.tables)):
        weight = None if reduced.exact_weights is None else float(reduced.exact_weights[j])
        edges.append(ReducedEdgeSchema(
            tail=names[tail],
            head=names[head],
            table=EdgeTableSchema(y=table.y.tolist(), current=table.current.tolist(),
                                  slope=table.slope.tolist(), cocontent=table.cocontent.tolist()),
            exact_weight=weight,
        ))
    document = ReducedNetworkFileSchema(
        domain=reduced.domain.value,
        nodes=list(names),
        edges=edges,
        certificate=certificate_to_schema(reduced.certificate),
    )
    return document.model_dump_json(indent=2, by_alias=True) + "\n"


def load_reduced(text: str) -> ReducedNetwork:
    """
    Rebuilds an evaluable ReducedNetwork from its document.

    Raises:
        NetworkFileError: schema violation or unusable tables.
    """
    try:
        document = ReducedNetworkFileSchema.model_validate_json(text)
    except ValidationError as exc:
        raise NetworkFileError(exc.errors()[0]["msg"], _location(exc)) from exc
    try:
        graph = DirectedGraph.from_names(document.nodes, [(e.tail, e.head) for e in document.edges])
        tables = tuple(EdgeTable(y=np.array(e.table.y), current=np.array(e.table.current),
                                 slope=np.array(e.table.slope), cocontent=np.array(e.table.cocontent))
                       for e in document.edges)
    except (KronError, ValueError) as exc:
        raise NetworkFileError(str(exc), "edges") from exc
    weights = [e.exact_weight for e in document.edges]
    exact = np.array(weights) if weights and all(w is not None for w in weights) else None
    return ReducedNetwork(graph, tables, certificate_from_schema(document.certificate),
                          Domain(document.domain), exact_weights=exact)


def labels(domain: Domain) -> dict:
    return DOMAIN_LABELS[domain]


def curve_frame(points: Sequence[CurvePoint]) -> pd.DataFrame:
    return pd.DataFrame({
        "V": [p.V for p in points],
        "I": [p.I for p in points],
        "Ghat": [p.G for p in points],
    })


def curve_csv(points: Sequence[CurvePoint]) -> str:
    """CSV with header V,I,Ghat at 17 significant digits; failed rows read FAILED."""
    buffer = io.StringIO()
    curve_frame(points).to_csv(buffer, index=False, float_format=CSV_FLOAT_FORMAT,
                               na_rep="FAILED", lineterminator="\n")
    return buffer.getvalue()


def format_table(rows: Iterable[Sequence], headers: List[str]) -> str:
    return tabulate(list(rows), headers=headers, tablefmt="github", floatfmt=".6g")


def format_vector(names: Sequence[str], values) -> str:
    return format_table(zip(names, np.asarray(values, dtype=float)), ["node", "value"])
