"""Pydantic request/response models for the HTTP service and CLI."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, model_validator

from .. import constructions, patterns
from ..errors import DomainError


class FamilyDocument(BaseModel):
    """Inline family in the canonical document shape."""

    K: int
    label: str = ""
    sets: list[list[int]]


class FamilySpec(BaseModel):
    """Either a builtin family kind with its sizes, or an inline document."""

    kind: Literal["exact", "disjoint", "nested", "circular"] | None = None
    K: int | None = None
    M: int | None = None
    depth: int | None = None
    document: FamilyDocument | None = None

    @model_validator(mode="after")
    def _one_source(self) -> "FamilySpec":
        if (self.kind is None) == (self.document is None):
            raise ValueError("specify exactly one of kind or document")
        if self.kind is not None and self.K is None:
            raise ValueError("builtin kinds require K")
        return self

    def build(self) -> patterns.PatternFamily:
        if self.document is not None:
            return patterns.build_family(
                self.document.K, self.document.sets, label=self.document.label
            )
        if self.kind == "exact":
            return constructions.exact_search_family(self.K)
        if self.kind == "circular":
            return constructions.circular_family(self.K)
        if self.M is None:
            raise DomainError(f"family kind {self.kind!r} requires M")
        if self.kind == "disjoint":
            return constructions.disjoint_subfamily(self.K, self.M)
        if self.depth is None:
            raise DomainError("nested families require depth")
        return constructions.nested_gamma_subfamily(self.K, self.M, self.depth)


class Figure1Request(BaseModel):
    K_max: int
    N_list: list[int] = Field(min_length=1)


class BoundRequest(BaseModel):
    family: FamilySpec
    N: int
    strategy: Literal["exhaustive", "greedy"] | None = None
    sequence: list[int] | None = None
    max_len: int | None = None

    @model_validator(mode="after")
    def _strategy_or_sequence(self) -> "BoundRequest":
        if self.strategy is not None and self.sequence is not None:
            raise ValueError("give either a strategy or an explicit sequence")
        return self


class SuffcondRequest(BaseModel):
    family: FamilySpec
    sequence: list[int]
    horizon: int


class Prop5Request(BaseModel):
    K: int


class ProtocolRunRequest(BaseModel):
    family: FamilySpec
    N: int
    L: int
    seed: int
    trials: int = 1
    target_failure: float = 1e-3
    block_length: int = 4096
    sessions_per_dataset: int = 128


class ProtocolAuditRequest(BaseModel):
    family: FamilySpec
    N: int
    seed: int
    trials: int = 10000
    thetas: list[int] | None = None
    significance: float = 0.01


class Report(BaseModel):
    """Envelope every subcommand answers with."""

    tool_version: str
    subcommand: str
    config: dict
    results: dict


class ErrorBody(BaseModel):
    type: str
    message: str


class ErrorReport(BaseModel):
    error: ErrorBody
