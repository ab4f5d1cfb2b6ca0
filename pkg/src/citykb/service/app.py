"""HTTP face of a workspace: queries, geo lookups, the review queue, dataset
and validation operations. Errors come back as problem-detail objects with
machine-readable codes."""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..geo import GeoError, GeoIndex, GeoPoint
from ..querylang import (
    FilterClause,
    GraphPatternQuery,
    QueryCompileError,
    TriplePattern,
    Var,
    evaluate,
)
from ..review import ReviewError
from ..store import StoreError
from ..terms import BlankNode, Iri, Literal, XSD_STRING
from ..validation import diff_runs
from ..workspace import Workspace, WorkspaceError
from . import schemas


def _parse_term(raw, namespaces) -> object:
    if isinstance(raw, dict):
        if "iri" in raw:
            return Iri(raw["iri"])
        if "literal" in raw:
            datatype = raw.get("datatype")
            return Literal(
                str(raw["literal"]),
                Iri(datatype) if datatype else XSD_STRING,
                raw.get("lang"),
            )
        if "var" in raw:
            return Var(str(raw["var"]))
        raise QueryCompileError(f"unintelligible term object: {raw}")
    text = str(raw)
    if text.startswith("?"):
        return Var(text[1:])
    if "://" in text:
        return Iri(text)
    prefix, sep, local = text.partition(":")
    if sep and prefix in namespaces:
        return Iri(namespaces[prefix] + local)
    return Literal(text)


def _term_out(term) -> schemas.TermOut:
    if isinstance(term, Iri):
        return schemas.TermOut(type="iri", value=str(term))
    if isinstance(term, BlankNode):
        return schemas.TermOut(type="bnode", value=term.label)
    if isinstance(term, Literal):
        return schemas.TermOut(
            type="literal",
            value=term.lexical,
            datatype=str(term.datatype),
            lang=term.lang,
        )
    return schemas.TermOut(type="literal", value=str(term))


_ERROR_CODES = {
    WorkspaceError: (400, "workspace-error"),
    QueryCompileError: (400, "query-compile-error"),
    GeoError: (400, "geo-error"),
    StoreError: (409, "store-error"),
}


def create_app(workspace: Workspace, frontend_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="citykb", version="0.1.0")
    app.state.workspace = workspace
    geo_index = GeoIndex(workspace.store, workspace.catalog)

    def problem(status: int, title: str, detail: str, code: str) -> JSONResponse:
        payload = schemas.ProblemDetail(
            title=title, status=status, detail=detail, code=code
        )
        return JSONResponse(payload.model_dump(), status_code=status)

    @app.exception_handler(ReviewError)
    async def review_error(request: Request, exc: ReviewError):
        status = {"not-found": 404, "already-resolved": 409, "bad-choice": 422}.get(
            exc.code, 400
        )
        return problem(status, "review error", str(exc), exc.code)

    for exc_type, (status, code) in _ERROR_CODES.items():
        def _make(status=status, code=code):
            async def handler(request: Request, exc: Exception):
                return problem(status, code.replace("-", " "), str(exc), code)

            return handler

        app.add_exception_handler(exc_type, _make())

    # -- knowledge base --------------------------------------------------------

    @app.post("/query", response_model=schemas.QueryResponse)
    def run_query(body: schemas.QueryRequest):
        namespaces = workspace.catalog.namespaces
        patterns = []
        for triple in body.patterns:
            if len(triple) != 3:
                raise QueryCompileError(f"pattern needs 3 terms, got {len(triple)}")
            s, p, o = (_parse_term(t, namespaces) for t in triple)
            patterns.append(TriplePattern(s, p, o))
        filters = tuple(
            FilterClause(f.var, f.op, f.value) for f in body.filters
        )
        query = GraphPatternQuery(
            tuple(patterns), filters, tuple(body.project), body.limit, body.offset
        )
        table = evaluate(query, workspace.store)
        return schemas.QueryResponse(
            columns=table.columns,
            rows=[[_term_out(t) for t in row] for row in table.rows],
        )

    @app.get("/near", response_model=schemas.NearResponse)
    def near(
        lat: float,
        lon: float,
        radius: float,
        category: str | None = None,
    ):
        found = geo_index.near_services(GeoPoint(lat, lon), radius, category)
        return schemas.NearResponse(
            items=[
                schemas.NearItem(service=str(s), distance_meters=d) for s, d in found
            ]
        )

    @app.get("/closest-number", response_model=schemas.ClosestNumberResponse)
    def closest_number(lat: float, lon: float):
        hit = geo_index.closest_street_number(GeoPoint(lat, lon))
        if hit is None:
            return problem(404, "not found", "the store has no located entries", "no-entries")
        entry, sn, road, distance = hit
        return schemas.ClosestNumberResponse(
            entry=str(entry),
            street_number=str(sn),
            road=str(road),
            distance_meters=distance,
        )

    # -- review queue -------------------------------------------------------------

    @app.get("/reviews", response_model=schemas.ReviewPage)
    def reviews(
        status: str = "pending",
        municipality: str | None = None,
        step: int | None = None,
        page: int = Query(1, ge=1),
        page_size: int = Query(10, ge=1, le=200),
    ):
        items = workspace.review_queue.list_items(
            status=status or None, municipality=municipality, step=step
        )
        start = (page - 1) * page_size
        window = items[start : start + page_size]
        return schemas.ReviewPage(
            items=[schemas.ReviewCardOut.model_validate(i) for i in window],
            total=len(items),
            page=page,
            page_size=page_size,
        )

    @app.post("/reviews/{review_id}/resolution", response_model=schemas.ResolutionResponse)
    def resolve(review_id: str, body: schemas.ResolutionRequest):
        resolution = workspace.resolve_review(
            review_id, body.choice, body.idempotency_key, body.reviewer
        )
        return schemas.ResolutionResponse(
            review_id=resolution.item.review_id,
            status=resolution.item.status,
            replay=resolution.replay,
            emitted=[
                schemas.QuadOut(
                    subject=str(q.subject),
                    predicate=str(q.predicate),
                    object=str(q.object) if not isinstance(q.object, Literal) else q.object.lexical,
                    graph=str(q.graph),
                )
                for q in resolution.emitted
            ],
        )

    # -- datasets -------------------------------------------------------------------

    @app.get("/datasets", response_model=list[schemas.DatasetOut])
    def datasets():
        out = []
        for descriptor in workspace.config.datasets.values():
            out.append(
                schemas.DatasetOut(
                    dataset_id=descriptor.dataset_id,
                    source=descriptor.source,
                    format=descriptor.format,
                    period_seconds=descriptor.period_seconds,
                    category=descriptor.category,
                    latest_record_version=workspace.record_store.latest_version(
                        descriptor.dataset_id
                    ),
                    active_graph_version=workspace.store.active_version(
                        descriptor.dataset_id
                    ),
                )
            )
        return out

    @app.post("/datasets/{dataset_id}/ingest", response_model=schemas.IngestReportOut)
    def trigger_ingest(dataset_id: str):
        report = workspace.ingest(dataset_id)
        return schemas.IngestReportOut(
            dataset_id=report.dataset_id,
            new_version=report.new_version,
            record_count=report.record_count,
            skipped=report.skipped,
            error=report.error,
        )

    # -- validation --------------------------------------------------------------------

    def _run_out(run) -> schemas.CheckRunOut:
        return schemas.CheckRunOut(
            run_id=run.run_id,
            timestamp=run.timestamp,
            results=[
                schemas.CheckResultOut(
                    check_id=r.check_id,
                    violation_count=r.violation_count,
                    samples=r.samples,
                    severity=r.severity,
                )
                for r in run.results
            ],
        )

    @app.post("/validation/runs", response_model=schemas.CheckRunOut)
    def trigger_validation():
        run, _ = workspace.validate()
        return _run_out(run)

    @app.get("/validation/runs/{run_id}", response_model=schemas.CheckRunOut)
    def get_run(run_id: str):
        run = workspace.runs.get(run_id)
        if run is None:
            return problem(404, "not found", f"no validation run {run_id!r}", "no-run")
        return _run_out(run)

    @app.get("/validation/diff", response_model=schemas.RegressionReportOut)
    def validation_diff(base: str, cur: str):
        base_run = workspace.runs.get(base)
        cur_run = workspace.runs.get(cur)
        if base_run is None or cur_run is None:
            missing = base if base_run is None else cur
            return problem(404, "not found", f"no validation run {missing!r}", "no-run")
        report = diff_runs(base_run, cur_run)
        return schemas.RegressionReportOut(**report.to_json())

    # -- static console -----------------------------------------------------------------

    if frontend_dir and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="console")

    return app
