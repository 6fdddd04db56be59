"""FastAPI wiring around the handlers."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import DslError, FairSampleError, FormatError
from . import handlers
from .schemas import (
    BellRequest,
    BellResponse,
    CheckRequest,
    CheckResponse,
    DemoResponse,
    HealthResponse,
    IsLocalRequest,
    IsLocalResponse,
    SimulateRequest,
    SimulateResponse,
    SweepRequest,
    SweepResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="fairsample",
        description=(
            "Mechanical fair-sampling verdicts for postselected Bell scenarios, "
            "plus hidden-variable/postselection numerics"
        ),
    )

    @app.exception_handler(FairSampleError)
    async def _library_error(request: Request, exc: FairSampleError):
        status = 422 if isinstance(exc, (DslError, FormatError)) else 400
        return JSONResponse(status_code=status, content={"error": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return handlers.handle_health()

    @app.post("/check", response_model=CheckResponse)
    def check(request: CheckRequest) -> CheckResponse:
        return handlers.handle_check(request)

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate(request: SimulateRequest) -> SimulateResponse:
        return handlers.handle_simulate(request)

    @app.post("/is-local", response_model=IsLocalResponse)
    def is_local(request: IsLocalRequest) -> IsLocalResponse:
        return handlers.handle_is_local(request)

    @app.post("/bell", response_model=BellResponse)
    def bell(request: BellRequest) -> BellResponse:
        return handlers.handle_bell(request)

    @app.post("/demo/{name}", response_model=DemoResponse)
    def demo(name: str, seed: int = 0) -> DemoResponse:
        return handlers.handle_demo(name, seed)

    @app.post("/sweep", response_model=SweepResponse)
    def sweep(request: SweepRequest) -> SweepResponse:
        return handlers.handle_sweep(request)

    return app


app = create_app()
