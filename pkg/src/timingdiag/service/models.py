"""Request/response schemas for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class RunRequest(BaseModel):
    scenario: str = Field(description="scenario file text")
    workers: int = Field(default=1, ge=1, le=64)


class RunResponse(BaseModel):
    records_csv: str
    report: dict


class AnalyzeRequest(BaseModel):
    scenario: str = Field(description="scenario file text")
    records_csv: str = Field(description="records CSV as produced by a run or by hardware")


class AnalyzeResponse(BaseModel):
    report: dict


class RenderRequest(BaseModel):
    report: dict
    kinds: list[str] | None = Field(default=None,
                                    description="artifact kinds; default renders all")


class RenderResponse(BaseModel):
    svgs: dict[str, str]
