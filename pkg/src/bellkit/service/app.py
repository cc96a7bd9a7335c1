"""FastAPI application exposing the experiment drivers.

Endpoints mirror the CLI subcommands and return the shared stats schema;
scatter returns its summary only (per-state pairs are a CLI/CSV concern).
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from ..errors import BellkitError
from .handlers import (
    handle_fid_pdf,
    handle_neighborhood,
    handle_scatter,
    handle_typicality,
    handle_verify,
)
from .models import (
    FidPdfRequest,
    NeighborhoodRequest,
    ScatterRequest,
    StatsResponse,
    TypicalityRequest,
    VerifyRequest,
    VerifyResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="bellkit",
        description="Random two-qubit states, CHSH maximization, and "
                    "fidelity-neighborhood statistics.",
    )

    @app.exception_handler(BellkitError)
    async def _domain_error(request, exc: BellkitError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/typicality", response_model=StatsResponse)
    def typicality(req: TypicalityRequest) -> StatsResponse:
        return handle_typicality(req)[1]

    @app.post("/neighborhood", response_model=StatsResponse)
    def neighborhood(req: NeighborhoodRequest) -> StatsResponse:
        return handle_neighborhood(req)[1]

    @app.post("/scatter", response_model=StatsResponse)
    def scatter(req: ScatterRequest) -> StatsResponse:
        return handle_scatter(req)[1]

    @app.post("/fid-pdf", response_model=StatsResponse)
    def fid_pdf(req: FidPdfRequest) -> StatsResponse:
        return handle_fid_pdf(req)[1]

    @app.post("/verify", response_model=VerifyResponse)
    def verify(req: VerifyRequest) -> VerifyResponse:
        return handle_verify(req)

    return app
