"""FastAPI application exposing the analysis pipeline.

One POST endpoint per pipeline command, all stateless: the kernel
travels inside the request, reports come back as JSON.  Malformed
inputs map to 422, numeric inconsistencies (empty Aubry set, missing
successors) to 409; check failures are not errors and come back as
reports with ``passed`` false.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import InconsistencyError, TropikamError
from . import pipeline
from .schemas import (
    AnalyzeReport,
    AnalyzeRequest,
    ErgodicReport,
    ErgodicRequest,
    HealthReport,
    IngestReport,
    IngestRequest,
    KamReport,
    KamRequest,
    MatherReport,
    MatherRequest,
    TransportReport,
    TransportRequest,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="tropikam",
        version=__version__,
        description=(
            "Critical values, Peierls barriers, Aubry sets, weak KAM pairs, "
            "optimal transport and minimizing measures for finite cost kernels."
        ),
    )

    @app.exception_handler(InconsistencyError)
    async def _inconsistency(request: Request, exc: InconsistencyError):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(TropikamError)
    async def _tropikam_error(request: Request, exc: TropikamError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/health", response_model=HealthReport)
    def health() -> HealthReport:
        return HealthReport(version=__version__)

    @app.post("/ingest", response_model=IngestReport)
    def ingest(request: IngestRequest) -> IngestReport:
        return pipeline.run_ingest(request)

    @app.post("/analyze", response_model=AnalyzeReport)
    def analyze(request: AnalyzeRequest) -> AnalyzeReport:
        return pipeline.run_analyze(request)

    @app.post("/kam", response_model=KamReport)
    def kam(request: KamRequest) -> KamReport:
        return pipeline.run_kam(request)

    @app.post("/transport", response_model=TransportReport)
    def transport(request: TransportRequest) -> TransportReport:
        return pipeline.run_transport(request)

    @app.post("/mather", response_model=MatherReport)
    def mather(request: MatherRequest) -> MatherReport:
        return pipeline.run_mather(request)

    @app.post("/ergodic", response_model=ErgodicReport)
    def ergodic(request: ErgodicRequest) -> ErgodicReport:
        return pipeline.run_ergodic(request)

    return app


app = create_app()
