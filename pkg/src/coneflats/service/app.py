"""FastAPI application exposing build/verify/export/info.

The service is stateless: build artifacts travel inline in responses (the
client owns the disk), and export either reuses artifacts sent back by the
client or deterministically rebuilds them.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..errors import ConeflatsError, ConfigError
from ..pipeline import pipeline_info, run_build, run_export, run_verify
from .schemas import (
    BuildRequest,
    BuildResponse,
    ExportRequest,
    ExportResponse,
    InfoResponse,
    RecordModel,
    VerifyRequest,
    VerifyResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="coneflats",
        version=__version__,
        description="Conformally flat immersions from loop-group dressing, "
                    "with numerical certification",
    )

    @app.exception_handler(ConeflatsError)
    async def _domain_error(_, exc: ConeflatsError):  # pragma: no cover - fastapi wiring
        raise HTTPException(status_code=422, detail=str(exc))

    @app.post("/build", response_model=BuildResponse)
    def build(request: BuildRequest) -> BuildResponse:
        try:
            files = run_build(request.config)
        except ConfigError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except ConeflatsError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        manifest = json.loads(files["manifest.json"])
        return BuildResponse(
            files=files,
            masked_points=manifest["masked_points"],
            grid_points=manifest["grid"]["points"],
        )

    @app.post("/verify", response_model=VerifyResponse)
    def verify(request: VerifyRequest) -> VerifyResponse:
        try:
            report = run_verify(request.config)
        except ConfigError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except ConeflatsError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        payload = report.to_dict()
        return VerifyResponse(
            records=[RecordModel(**r) for r in payload["records"]],
            summary=payload["summary"],
            exit_code=report.exit_code,
            report_json=report.to_json(),
            report_text=report.to_text(),
        )

    @app.post("/export", response_model=ExportResponse)
    def export(request: ExportRequest) -> ExportResponse:
        try:
            files = run_export(request.config, request.artifacts)
        except ConfigError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except ConeflatsError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return ExportResponse(files=files)

    @app.get("/info", response_model=InfoResponse)
    def info() -> InfoResponse:
        return InfoResponse(**pipeline_info())

    return app


app = create_app()
