"""HTTP+JSON API over the pipeline, for the companion UI and other clients.

POST /answer runs the three stages for one query, either over segments
supplied in the request or over a preloaded dataset query, with optional
per-request parameter overrides that never touch the server-wide defaults.
GET /datasets and /datasets/{id}/queries enumerate what is loaded;
GET /health reports the version and bound providers. Validation problems
are 400s (not the framework's default 422), unknown ids are 404s, and
provider failures surface as 502s carrying partial results when the
inference stage succeeded but explanation did not.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .config import RunConfig, build_pipeline
from .dataset import DatasetRecord, load_dataset
from .explain import ALL_SEGMENTS_FAILED as EXPLANATION_FAILED
from .inference import ALL_SEGMENTS_FAILED as INFERENCE_FAILED
from .pipeline import CountAnswerPipeline
from .providers.base import ProviderError
from .types import TextSegment


class SegmentIn(BaseModel):
    id: str
    rank: int = Field(ge=1)
    text: str


class OverridesIn(BaseModel):
    theta_inference: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    theta_explanation: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    alpha: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    strategy_count: Optional[str] = None
    strategy_instance: Optional[str] = None

    def as_params(self) -> dict:
        mapping = {
            "theta_inference": self.theta_inference,
            "theta_explanation": self.theta_explanation,
            "alpha": self.alpha,
            "count_strategy": self.strategy_count,
            "instance_strategy": self.strategy_instance,
        }
        return {k: v for k, v in mapping.items() if v is not None}


class AnswerRequest(BaseModel):
    query: Optional[str] = None
    segments: Optional[list[SegmentIn]] = None
    dataset_query_id: Optional[str] = None
    overrides: Optional[OverridesIn] = None


def _error(status: int, message: str, **extra) -> JSONResponse:
    return JSONResponse(status_code=status, content={"detail": message, **extra})


def create_app(
    config: Optional[RunConfig] = None,
    datasets: Optional[dict[str, list[DatasetRecord]]] = None,
) -> FastAPI:
    """Build the service around one pipeline and a set of loaded datasets."""
    config = config or RunConfig()
    if datasets is None:
        datasets = {
            Path(p).stem: load_dataset(p) for p in config.datasets
        }
    base_pipeline = build_pipeline(config)

    app = FastAPI(title="countqa", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(config.cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        paths = [
            ".".join(str(part) for part in err.get("loc", ())) or "body"
            for err in exc.errors()
        ]
        return _error(400, f"invalid request: {', '.join(paths)}")

    def find_record(query_id: str) -> Optional[DatasetRecord]:
        for records in datasets.values():
            for record in records:
                if record.query.id == query_id:
                    return record
        return None

    @app.post("/answer")
    def answer(request: AnswerRequest):
        has_segments = request.segments is not None
        has_dataset_ref = request.dataset_query_id is not None
        if has_segments == has_dataset_ref:
            return _error(
                400, "provide exactly one of 'segments' or 'dataset_query_id'"
            )

        pipeline: CountAnswerPipeline = base_pipeline
        if request.overrides is not None:
            params = request.overrides.as_params()
            if params:
                pipeline = base_pipeline.with_overrides(**params)

        if has_segments:
            if not (request.query or "").strip():
                return _error(400, "'query' is required with inline segments")
            try:
                segments = tuple(
                    TextSegment(s.id, s.rank, s.text) for s in request.segments
                )
            except ValueError as exc:
                return _error(400, f"invalid segment: {exc}")
            query_text = request.query
            query_id = "adhoc"
        else:
            record = find_record(request.dataset_query_id)
            if record is None:
                return _error(
                    404, f"unknown dataset query id {request.dataset_query_id!r}"
                )
            segments = record.segments
            query_text = record.query.text
            query_id = record.query.id

        try:
            result = pipeline.answer(query_text, segments, query_id=query_id)
        except ValueError as exc:
            return _error(400, str(exc))
        except ProviderError as exc:
            return _error(502, f"provider failure: {exc}", partial=False)

        record_dict = result.to_record()
        inference_down = INFERENCE_FAILED in result.diagnostics
        explanation_down = EXPLANATION_FAILED in result.diagnostics
        if inference_down or explanation_down:
            partial = not (inference_down and explanation_down)
            return _error(
                502,
                "provider failure during "
                + " and ".join(
                    stage for stage, down in
                    (("inference", inference_down),
                     ("explanation", explanation_down)) if down
                ),
                partial=partial,
                result=record_dict if partial else None,
            )
        return record_dict

    @app.get("/datasets")
    def list_datasets():
        return [
            {"id": dataset_id, "queries": len(records)}
            for dataset_id, records in sorted(datasets.items())
        ]

    @app.get("/datasets/{dataset_id}/queries")
    def list_queries(dataset_id: str):
        if dataset_id not in datasets:
            return _error(404, f"unknown dataset {dataset_id!r}")
        return [
            {"id": record.query.id, "query": record.query.text}
            for record in datasets[dataset_id]
        ]

    @app.get("/health")
    def health():
        providers = {
            "span_predictor": type(base_pipeline._span_predictor()).__name__,
            "similarity": type(base_pipeline._similarity()).__name__,
            "entity_recognizer": type(base_pipeline._ner()).__name__,
            "entailment": type(base_pipeline._entailment()).__name__,
            "pos_tagger": type(base_pipeline._tagger()).__name__,
        }
        return {"status": "ok", "version": __version__, "providers": providers}

    return app
