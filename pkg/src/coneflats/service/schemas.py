"""Request/response models of the certification service.

Requests embed the same PipelineConfig the CLI reads from YAML, so one
config document validates identically on both transports.
"""

from __future__ import annotations

from pydantic import BaseModel, Field

from ..config import PipelineConfig


class BuildRequest(BaseModel):
    config: PipelineConfig = Field(default_factory=PipelineConfig)


class BuildResponse(BaseModel):
    files: dict[str, str]
    masked_points: int
    grid_points: int


class VerifyRequest(BaseModel):
    config: PipelineConfig = Field(default_factory=PipelineConfig)


class RecordModel(BaseModel):
    name: str
    identity: str
    residual: float | None
    gate: float | None
    passed: bool
    masked_points: int
    grid_points: int | None
    details: dict


class VerifyResponse(BaseModel):
    records: list[RecordModel]
    summary: dict
    exit_code: int
    report_json: str
    report_text: str


class ExportRequest(BaseModel):
    config: PipelineConfig = Field(default_factory=PipelineConfig)
    # artifacts of a previous build; the service rebuilds when omitted
    artifacts: dict[str, str] | None = None


class ExportResponse(BaseModel):
    files: dict[str, str]


class InfoResponse(BaseModel):
    version: str
    commands: list[str]
    variants: list[str]
    defaults: dict
    exit_codes: dict
