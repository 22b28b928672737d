"""HTTP front end: one POST endpoint per computation, JSON in and out."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from . import handlers
from .models import (
    AnalyticRequest,
    AnalyticResponse,
    CriticalRequest,
    CriticalResponse,
    FiniteNRequest,
    FiniteNResponse,
    LandscapeRequest,
    LandscapeResponse,
    NoiseRequest,
    TrajectoryRequest,
    TrajectoryResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="geophase",
        description="Weak-measurement-induced geometric phase computations",
        version=__version__,
    )

    def run(handler, req):
        try:
            return handler(req)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc

    @app.get("/v1/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/v1/analytic", response_model=AnalyticResponse)
    def analytic(req: AnalyticRequest) -> AnalyticResponse:
        return run(handlers.handle_analytic, req)

    @app.post("/v1/critical", response_model=CriticalResponse)
    def critical(req: CriticalRequest) -> CriticalResponse:
        return run(handlers.handle_critical, req)

    @app.post("/v1/finite-n", response_model=FiniteNResponse)
    def finite_n(req: FiniteNRequest) -> FiniteNResponse:
        return run(handlers.handle_finite_n, req)

    @app.post("/v1/landscape", response_model=LandscapeResponse)
    def landscape(req: LandscapeRequest) -> LandscapeResponse:
        return run(handlers.handle_landscape, req)

    @app.post("/v1/noise", response_model=LandscapeResponse)
    def noise(req: NoiseRequest) -> LandscapeResponse:
        return run(handlers.handle_noise, req)

    @app.post("/v1/trajectory", response_model=TrajectoryResponse)
    def trajectory(req: TrajectoryRequest) -> TrajectoryResponse:
        return run(handlers.handle_trajectory, req)

    return app


app = create_app()
