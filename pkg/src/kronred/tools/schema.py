"""Schema Structure"""
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field


class EdgeSchema(BaseModel):
    """Schema for one edge of a network file."""
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    tail: str = Field(alias="from", description="Name of the tail node.")
    head: str = Field(alias="to", description="Name of the head node.")
    law: str = Field(description="Law text in the variable y.")
    kind: Literal["conductance", "cocontent"] = Field(
        default="conductance",
        description="Whether `law` gives the current g(y) or the co-content G(y)."
    )
    interval: Optional[Tuple[float, float]] = Field(
        default=None,
        description="Validity interval (lo, hi) with lo < 0 < hi; defaults to [-8, 8]."
    )


class NetworkFileSchema(BaseModel):
    """Schema for a network file."""
    model_config = ConfigDict(extra="forbid")

    domain: Literal["resistor", "memristor"] = "resistor"
    nodes: List[str] = Field(min_length=1, description="Ordered node names.")
    boundary: List[str] = Field(min_length=1, description="Names of the boundary nodes.")
    edges: List[EdgeSchema] = Field(default_factory=list)


class EdgeTableSchema(BaseModel):
    """Schema for the sampled law of a reduced edge."""
    model_config = ConfigDict(extra="forbid")

    y: List[float]
    current: List[float]
    slope: List[float]
    cocontent: List[float]


class ReducedEdgeSchema(BaseModel):
    """Schema for one reduced edge."""
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    tail: str = Field(alias="from")
    head: str = Field(alias="to")
    table: EdgeTableSchema
    exact_weight: Optional[float] = Field(
        default=None,
        description="Exact conductance, present only for all-quadratic inputs."
    )


class CertificateSchema(BaseModel):
    """Schema for an assumption certificate; unavailable quantities are null."""
    model_config = ConfigDict(extra="forbid")

    samples_used: int
    support_stable: bool
    acyclic: bool
    support_pairs: List[Tuple[str, str]] = Field(default_factory=list)
    supports: List[str] = Field(default_factory=list)
    consistency_residual: Optional[float] = None
    integrability_max_asymmetry: Optional[float] = None
    hessian_mismatch: Optional[float] = None
    accepted: bool = False


class ReducedNetworkFileSchema(BaseModel):
    """Schema for a reduced-network file."""
    model_config = ConfigDict(extra="forbid")

    domain: Literal["resistor", "memristor"] = "resistor"
    nodes: List[str] = Field(min_length=1)
    interpolation: Literal["monotone-cubic-hermite"] = "monotone-cubic-hermite"
    edges: List[ReducedEdgeSchema] = Field(default_factory=list)
    certificate: CertificateSchema
