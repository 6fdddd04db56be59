"""Pydantic request/response models for the verification service.

Numeric payloads follow the file formats: probabilities travel as decimal
strings inside plain JSON objects, reports as the deterministic dicts from
:mod:`fairsample.reports`.
"""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field


class CheckRequest(BaseModel):
    source: str = Field(description="diagram source text (the .diagram DSL)")
    seed: int | None = None


class CheckResponse(BaseModel):
    report: dict[str, Any]
    text: str
    exit_code: int


class SimulateRequest(BaseModel):
    model: dict[str, Any] = Field(description="a .model.json object")
    postselect: bool = False
    seed: int | None = None


class SimulateResponse(BaseModel):
    behavior: dict[str, Any]
    functionals: dict[str, Any]
    acceptance: list[Any] | None = None
    text: str


class IsLocalRequest(BaseModel):
    behavior: dict[str, Any] = Field(description="a .behavior.json object")
    tol: float = 1e-9


class IsLocalResponse(BaseModel):
    local: bool
    residual: str
    weights: list[Any] | None = None
    certificate: dict[str, Any] | None = None
    text: str
    exit_code: int


class BellRequest(BaseModel):
    behavior: dict[str, Any]
    functional: Literal["chsh", "mermin3", "svetlichny3"]


class BellResponse(BaseModel):
    functional: str
    value: str
    local_bound: str
    hybrid_bound: str | None = None
    text: str


class DemoResponse(BaseModel):
    name: str
    report: dict[str, Any]
    text: str


class SweepRequest(BaseModel):
    variant: Literal["constant", "lambda", "factorized"]
    n: int = 500
    seed: int = 0


class SweepResponse(BaseModel):
    report: dict[str, Any]
    text: str


class HealthResponse(BaseModel):
    status: str
    tool: str
    version: str
