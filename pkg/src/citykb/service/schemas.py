"""Request/response models for the HTTP API."""

from __future__ import annotations

from typing import Literal, Union

from pydantic import BaseModel, ConfigDict, Field


class TermOut(BaseModel):
    type: Literal["iri", "literal", "bnode"]
    value: str
    datatype: str | None = None
    lang: str | None = None


class FilterIn(BaseModel):
    var: str
    op: Literal["lt", "le", "eq", "str-eq", "contains"]
    value: Union[float, int, str]


TermIn = Union[str, dict]


class QueryRequest(BaseModel):
    patterns: list[list[TermIn]] = Field(min_length=1)
    filters: list[FilterIn] = []
    project: list[str] = []
    limit: int | None = None
    offset: int = 0


class QueryResponse(BaseModel):
    columns: list[str]
    rows: list[list[TermOut]]


class NearItem(BaseModel):
    service: str
    distance_meters: float


class NearResponse(BaseModel):
    items: list[NearItem]


class ClosestNumberResponse(BaseModel):
    entry: str
    street_number: str
    road: str
    distance_meters: float


class CandidateOut(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    iri: str
    road_iri: str
    road_name: str = ""
    matched_field: str = "official-name"
    level: str = "street"
    step: int = 0
    lat: float | None = None
    lon: float | None = None


class ReviewCardOut(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    review_id: str
    service_iri: str
    street: str = ""
    number: str = ""
    municipality: str = ""
    candidates: list[CandidateOut] = []
    discovered_at: str = ""
    status: str = "pending"
    chosen_iri: str | None = None
    reviewer: str | None = None


class ReviewPage(BaseModel):
    items: list[ReviewCardOut]
    total: int
    page: int
    page_size: int


class ResolutionRequest(BaseModel):
    choice: str  # candidate IRI or "reject"
    idempotency_key: str = Field(alias="idempotencyKey")
    reviewer: str = ""

    model_config = ConfigDict(populate_by_name=True)


class QuadOut(BaseModel):
    subject: str
    predicate: str
    object: str
    graph: str


class ResolutionResponse(BaseModel):
    review_id: str
    status: str
    replay: bool
    emitted: list[QuadOut]


class DatasetOut(BaseModel):
    dataset_id: str
    source: str
    format: str
    period_seconds: float
    category: str
    latest_record_version: int | None = None
    active_graph_version: int | None = None


class IngestReportOut(BaseModel):
    dataset_id: str
    new_version: int | None = None
    record_count: int = 0
    skipped: bool = False
    error: str | None = None


class CheckResultOut(BaseModel):
    check_id: str
    violation_count: int
    samples: list[str]
    severity: str


class CheckRunOut(BaseModel):
    run_id: str
    timestamp: str
    results: list[CheckResultOut]


class RegressionEntryOut(BaseModel):
    check_id: str
    baseline: int
    current: int


class RegressionReportOut(BaseModel):
    baseline_run_id: str
    current_run_id: str
    regressions: list[RegressionEntryOut]
    improvements: list[RegressionEntryOut]


class ProblemDetail(BaseModel):
    type: str = "about:blank"
    title: str
    status: int
    detail: str = ""
    code: str = "error"
