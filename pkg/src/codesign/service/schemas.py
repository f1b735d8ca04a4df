"""Request and response models of the HTTP API."""

from __future__ import annotations

from pydantic import BaseModel, Field


class ChatRequest(BaseModel):
    session: str = "default"
    prompt: str


class ChatResponse(BaseModel):
    session: str
    response: str
    result: dict
    trace: list[dict]
    tool: str | None = None
    revision: int


class PropagateRequest(BaseModel):
    faults: list[str]


class ReplicateRequest(BaseModel):
    target: str
    copies: int = Field(default=2, ge=2)


class ReplicateResponse(BaseModel):
    target: str
    replicas: list[str]
    revision: int


class HistoryResponse(BaseModel):
    session: str
    turns: list[dict]


class HealthResponse(BaseModel):
    status: str
    revision: int
    nodes: int
    backend: str


class ErrorDetail(BaseModel):
    type: str
    message: str


class ErrorBody(BaseModel):
    error: ErrorDetail
