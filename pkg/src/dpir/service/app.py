"""FastAPI app wrapping the toolkit.

Run locally with:  uvicorn dpir.service.app:app
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import DomainError
from . import handlers
from .models import (
    BoundRequest,
    Figure1Request,
    Prop5Request,
    ProtocolAuditRequest,
    ProtocolRunRequest,
    Report,
    SuffcondRequest,
)


def create_app() -> FastAPI:
    app = FastAPI(title="dpir", version=__version__)

    @app.exception_handler(DomainError)
    async def domain_error(_: Request, exc: DomainError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"error": {"type": type(exc).__name__, "message": str(exc)}},
        )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "tool_version": __version__}

    @app.post("/figure1", response_model=Report)
    def figure1(req: Figure1Request) -> Report:
        return handlers.handle_figure1(req)

    @app.post("/bound", response_model=Report)
    def bound(req: BoundRequest) -> Report:
        return handlers.handle_bound(req)

    @app.post("/suffcond", response_model=Report)
    def suffcond(req: SuffcondRequest) -> Report:
        return handlers.handle_suffcond(req)

    @app.post("/prop5", response_model=Report)
    def prop5(req: Prop5Request) -> Report:
        return handlers.handle_prop5(req)

    @app.post("/protocol/run", response_model=Report)
    def protocol_run(req: ProtocolRunRequest) -> Report:
        return handlers.handle_protocol_run(req)

    @app.post("/protocol/audit", response_model=Report)
    def protocol_audit(req: ProtocolAuditRequest) -> Report:
        return handlers.handle_protocol_audit(req)

    return app


app = create_app()
