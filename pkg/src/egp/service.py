"""Stateless HTTP frontend.

Every analysis request carries the graph source inline, so the
service holds no sessions and any instance can answer any request.
Responses are the same envelopes the command line emits under
``--json``, serialized by the same function, so the two channels are
byte-identical.

Error channels:

* 400 - the graph source does not parse; body is the structured
  parse error with its source span
* 404 - unknown corpus entry
* 413 - request body over the size cap (8 MiB)
* 422 - well-formed request the engine rejects (unknown node,
  overlapping sets, bad method); body carries the error code
"""

from __future__ import annotations

import os
from typing import Literal

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from . import __version__
from . import report as rpt
from .dsl import ParseError, parse_source
from .errors import EgpError, InvalidQuery
from .graph import CausalGraph
from .sem import Dataset

MAX_BODY_BYTES = 8 * 1024 * 1024


class BodyLimitMiddleware:
    """Reject oversized request bodies before they reach a handler."""

    def __init__(self, app, max_bytes: int = MAX_BODY_BYTES):
        self.app = app
        self.max_bytes = max_bytes

    async def __call__(self, scope, receive, send):
        if scope["type"] != "http":
            await self.app(scope, receive, send)
            return

        declared = self._content_length(scope)
        if declared is not None and declared > self.max_bytes:
            await self._reject(scope, receive, send)
            return

        received = 0

        async def guarded_receive():
            nonlocal received
            message = await receive()
            if message["type"] == "http.request":
                received += len(message.get("body", b""))
                if received > self.max_bytes:
                    raise _BodyTooLarge()
            return message

        try:
            await self.app(scope, guarded_receive, send)
        except BaseException as exc:  # noqa: BLE001 - filtered below
            if not _contains_body_too_large(exc):
                raise
            await self._reject(scope, receive, send)

    @staticmethod
    def _content_length(scope) -> int | None:
        for key, value in scope.get("headers", ()):
            if key == b"content-length":
                try:
                    return int(value)
                except ValueError:
                    return None
        return None

    async def _reject(self, scope, receive, send):
        response = Response(
            content='{"error": {"code": "too-large", '
            '"message": "request body exceeds 8 MiB"}}',
            status_code=413,
            media_type="application/json",
        )
        await response(scope, receive, send)


class _BodyTooLarge(Exception):
    pass


def _contains_body_too_large(exc: BaseException) -> bool:
    if isinstance(exc, _BodyTooLarge):
        return True
    nested = getattr(exc, "exceptions", None)
    if nested is not None:
        return any(_contains_body_too_large(e) for e in nested)
    return False


# -- request payloads ------------------------------------------------------


class GraphPayload(BaseModel):
    dag_source: str


class DsepPayload(GraphPayload):
    x: list[str]
    y: list[str]
    given: list[str] = []
    max_paths: int = Field(64, ge=1, le=10_000)


class PathsPayload(GraphPayload):
    x: str
    y: str
    given: list[str] = []
    max_paths: int = Field(64, ge=1, le=10_000)


class AdjustmentPayload(GraphPayload):
    z: list[str] | None = None  # present: test this set; absent: search
    exposure: str | None = None
    outcome: str | None = None
    max_size: int = Field(6, ge=0, le=8)
    max_count: int = Field(64, ge=1, le=512)


class IvPayload(GraphPayload):
    instrument: str
    given: list[str] = []
    exposure: str | None = None
    outcome: str | None = None


class ImplicationsPayload(GraphPayload):
    max_cond: int = Field(3, ge=0, le=5)


class FactorizePayload(GraphPayload):
    do: list[str] = []


class DoPayload(BaseModel):
    node: str
    value: float


class SimulatePayload(GraphPayload):
    n: int = Field(..., ge=1, le=100_000)
    seed: int = Field(0, ge=0)
    do: DoPayload | None = None
    coefficients: dict[str, float] | None = None


class EstimatePayload(GraphPayload):
    csv: str
    method: Literal["naive", "adjust", "iv"]
    adjust: list[str] = []
    instrument: str | None = None
    given: list[str] = []
    exposure: str | None = None
    outcome: str | None = None


class TestfitPayload(GraphPayload):
    csv: str
    max_cond: int = Field(3, ge=0, le=5)
    alpha: float = Field(0.01, gt=0.0, lt=1.0)
    correction: Literal["holm", "none"] = "holm"


class SensitivityPayload(GraphPayload):
    z: list[str] = []
    strengths: list[float] = Field(..., min_length=1, max_length=25)
    exposure: str | None = None
    outcome: str | None = None
    n: int = Field(20_000, ge=10, le=100_000)
    seed: int = Field(0, ge=0)
    coefficients: dict[str, float] | None = None


# -- helpers ---------------------------------------------------------------


def _graph(payload: GraphPayload) -> CausalGraph:
    return parse_source(payload.dag_source).graph


def _coefficients(spec: dict[str, float] | None) -> dict[tuple[str, str], float] | None:
    if spec is None:
        return None
    out: dict[tuple[str, str], float] = {}
    for key, value in spec.items():
        src, arrow, dst = key.partition("->")
        if not arrow or not src or not dst:
            raise InvalidQuery(f"coefficient key {key!r} is not of the form SRC->DST")
        out[(src, dst)] = float(value)
    return out


def _report_response(report: dict, status_code: int = 200) -> Response:
    return Response(
        content=rpt.encode_report(report),
        status_code=status_code,
        media_type="application/json",
    )


def create_app() -> FastAPI:
    app = FastAPI(
        title="egp",
        version=__version__,
        description="Stateless analysis service over the graph workbench.",
    )

    origin = os.environ.get("EGP_ALLOWED_ORIGIN", "*")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[origin],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ParseError)
    async def on_parse_error(request: Request, exc: ParseError):
        return Response(
            content=rpt.encode_report({"error": exc.to_dict()}),
            status_code=400,
            media_type="application/json",
        )

    @app.exception_handler(EgpError)
    async def on_engine_error(request: Request, exc: EgpError):
        return Response(
            content=rpt.encode_report(
                {"error": {"code": exc.code, "message": str(exc)}}
            ),
            status_code=422,
            media_type="application/json",
        )

    @app.get("/v1/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/v1/parse")
    def parse_endpoint(payload: GraphPayload):
        return _report_response(rpt.parse_report(payload.dag_source))

    @app.post("/v1/dsep")
    def dsep_endpoint(payload: DsepPayload):
        g = _graph(payload)
        return _report_response(
            rpt.dsep_report(g, payload.x, payload.y, payload.given, payload.max_paths)
        )

    @app.post("/v1/paths")
    def paths_endpoint(payload: PathsPayload):
        g = _graph(payload)
        return _report_response(
            rpt.paths_report(g, payload.x, payload.y, payload.given, payload.max_paths)
        )

    @app.post("/v1/adjustment-sets")
    def adjustment_endpoint(payload: AdjustmentPayload):
        g = _graph(payload)
        if payload.z is not None:
            report = rpt.backdoor_report(g, payload.z, payload.exposure, payload.outcome)
        else:
            report = rpt.adjustment_report(
                g,
                payload.exposure,
                payload.outcome,
                max_size=payload.max_size,
                max_count=payload.max_count,
            )
        return _report_response(report)

    @app.post("/v1/iv-check")
    def iv_endpoint(payload: IvPayload):
        g = _graph(payload)
        return _report_response(
            rpt.iv_report(
                g, payload.instrument, payload.given, payload.exposure, payload.outcome
            )
        )

    @app.post("/v1/implications")
    def implications_endpoint(payload: ImplicationsPayload):
        g = _graph(payload)
        return _report_response(rpt.implications_report(g, max_cond=payload.max_cond))

    @app.post("/v1/factorize")
    def factorize_endpoint(payload: FactorizePayload):
        g = _graph(payload)
        return _report_response(rpt.factorize_report(g, payload.do))

    @app.post("/v1/simulate")
    def simulate_endpoint(payload: SimulatePayload):
        g = _graph(payload)
        do = (payload.do.node, payload.do.value) if payload.do is not None else None
        return _report_response(
            rpt.simulate_report(
                g,
                payload.n,
                seed=payload.seed,
                do=do,
                coefficients=_coefficients(payload.coefficients),
            )
        )

    @app.post("/v1/estimate")
    def estimate_endpoint(payload: EstimatePayload):
        g = _graph(payload)
        data = Dataset.from_csv(payload.csv, source="request")
        return _report_response(
            rpt.estimate_report(
                g,
                data,
                payload.method,
                d=payload.exposure,
                y=payload.outcome,
                adjust_set=payload.adjust,
                instrument=payload.instrument,
                given=payload.given,
            )
        )

    @app.post("/v1/testfit")
    def testfit_endpoint(payload: TestfitPayload):
        g = _graph(payload)
        data = Dataset.from_csv(payload.csv, source="request")
        return _report_response(
            rpt.testfit_report(
                g,
                data,
                max_cond=payload.max_cond,
                alpha=payload.alpha,
                correction=payload.correction,
            )
        )

    @app.post("/v1/sensitivity")
    def sensitivity_endpoint(payload: SensitivityPayload):
        g = _graph(payload)
        return _report_response(
            rpt.sensitivity_report(
                g,
                z=payload.z,
                strengths=payload.strengths,
                d=payload.exposure,
                y=payload.outcome,
                n=payload.n,
                seed=payload.seed,
                coefficients=_coefficients(payload.coefficients),
            )
        )

    @app.get("/v1/corpus")
    def corpus_endpoint():
        return _report_response(rpt.corpus_report())

    @app.get("/v1/corpus/{entry_id}")
    def corpus_entry_endpoint(entry_id: str):
        from .corpus import list_ids

        if entry_id not in list_ids():
            return Response(
                content=rpt.encode_report(
                    {"error": {"code": "not-found", "message": f"no entry {entry_id!r}"}}
                ),
                status_code=404,
                media_type="application/json",
            )
        return _report_response(rpt.corpus_entry_report(entry_id))

    app.add_middleware(BodyLimitMiddleware)
    return app
