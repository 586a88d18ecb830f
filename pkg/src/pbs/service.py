"""HTTP facade over inference and solving.

A stateless pure-function wrapper: every request is parsed with the same
strict parsers the CLI uses, and every error body is an ApiError document
{"status", "code", "detail", "field_path"?}.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import __version__
from .diagrams import sample_series, series_to_dict
from .inference import InferenceError, InferenceOptions, build_beam_spec, report_to_dict
from .llm import LlmConfig, LlmError, build_request, request_structured_beam
from .model import (
    BeamValidationError,
    ParseError,
    beam_to_dict,
    canonical_schema,
    deserialize_beam,
    validate_beam,
)
from .detections import (
    DEFAULT_CONFIDENCE_THRESHOLD,
    DEFAULT_IOU_THRESHOLD,
    parse_detections,
)
from .solver import SolverError, solution_to_dict, solve_beam

_ALLOWED_STATUSES = (400, 404, 422, 500, 502)


def _api_error(status: int, code: str, detail: str, field_path: str | None = None) -> JSONResponse:
    if status not in _ALLOWED_STATUSES:
        status = 400 if status < 500 else 500
    body: dict[str, Any] = {"status": status, "code": code, "detail": detail}
    if field_path:
        body["field_path"] = field_path
    return JSONResponse(status_code=status, content=body)


def create_app(*, ui_dir: str | None = None, llm_config: LlmConfig | None = None,
               cors_allow: list[str] | None = None) -> FastAPI:
    app = FastAPI(title="beam solver service", version=__version__, docs_url=None,
                  redoc_url=None, openapi_url=None)

    if cors_allow:
        from fastapi.middleware.cors import CORSMiddleware
        app.add_middleware(CORSMiddleware, allow_origins=cors_allow,
                           allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(StarletteHTTPException)
    async def _http_exception(request: Request, exc: StarletteHTTPException):
        status = 404 if exc.status_code in (404, 405) else exc.status_code
        return _api_error(status, "not_found" if status == 404 else "error", str(exc.detail))

    @app.exception_handler(RequestValidationError)
    async def _query_validation(request: Request, exc: RequestValidationError):
        return _api_error(400, "bad_request", str(exc))

    @app.exception_handler(Exception)
    async def _unhandled(request: Request, exc: Exception):
        return _api_error(500, "internal_error", f"{type(exc).__name__}: {exc}")

    @app.get("/api/health")
    async def health():
        return JSONResponse({"status": "ok", "version": __version__})

    @app.get("/api/schema")
    async def schema():
        return JSONResponse(canonical_schema())

    @app.post("/api/infer")
    async def infer(request: Request, confidence: float = DEFAULT_CONFIDENCE_THRESHOLD,
                    iou: float = DEFAULT_IOU_THRESHOLD):
        body = (await request.body()).decode("utf-8", errors="replace")
        try:
            ds = parse_detections(body)
        except ParseError as exc:
            return _api_error(400, exc.code, str(exc), exc.path or None)
        try:
            report = build_beam_spec(ds, InferenceOptions(confidence_threshold=confidence,
                                                          iou_threshold=iou))
        except InferenceError as exc:
            return _api_error(422, exc.code, str(exc))
        if report.fatal:
            return _api_error(422, "inference_failed", "; ".join(report.warnings))
        return JSONResponse(report_to_dict(report))

    @app.post("/api/solve")
    async def solve(request: Request, samples: int = 1000, ei: float | None = None):
        body = (await request.body()).decode("utf-8", errors="replace")
        try:
            spec = deserialize_beam(body)
        except ParseError as exc:
            return _api_error(400, exc.code, str(exc), exc.path or None)
        try:
            beam = validate_beam(spec)
        except BeamValidationError as exc:
            first = exc.issues[0]
            return _api_error(422, first.code, str(exc), first.path)
        try:
            solution = solve_beam(beam, ei=ei)
        except SolverError as exc:
            return _api_error(422, exc.code, str(exc))
        series = {kind: series_to_dict(sample_series(solution, kind, samples))
                  for kind in ("shear", "moment", "deflection")}
        return JSONResponse({"solution": solution_to_dict(solution), "series": series})

    @app.post("/api/llm/infer")
    async def llm_infer(request: Request):
        if llm_config is None:
            return _api_error(404, "llm_disabled", "no LLM session configured")
        image = await request.body()
        try:
            beam = request_structured_beam(build_request(image, llm_config), llm_config)
        except LlmError as exc:
            if exc.code == "empty_image":
                return _api_error(400, exc.code, str(exc))
            return _api_error(502, exc.code, str(exc))
        return JSONResponse({"spec": beam_to_dict(beam.spec), "warnings": [],
                             "needs_review": []})

    if ui_dir and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    else:
        @app.get("/")
        async def root():
            return _api_error(404, "no_ui", "UI bundle is not installed")

    return app
