"""HTTP service wrapping the simulation and analysis pipeline.

Mirrors the central analysis role of the architecture: distributed
measurement sources can post record CSVs for offline statistical processing,
or request full simulated campaigns. Every operation is stateless and
deterministic in the scenario seed.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..campaign import RecordStore
from ..errors import TimingDiagError
from ..pipeline import analyze, run_scenario
from ..scenario import SVG_ARTIFACTS, parse_scenario
from ..svgplot import render_report_artifacts
from .models import (AnalyzeRequest, AnalyzeResponse, HealthResponse,
                     RenderRequest, RenderResponse, RunRequest, RunResponse)


def create_app() -> FastAPI:
    app = FastAPI(title="timingdiag service", version=__version__,
                  description="Fabric timing simulation and degradation diagnosis")

    @app.get("/healthz", response_model=HealthResponse)
    def healthz() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/api/run", response_model=RunResponse)
    def run(req: RunRequest) -> RunResponse:
        try:
            sc = parse_scenario(req.scenario)
            result = run_scenario(sc, workers=req.workers)
            report = analyze(sc, result.store, result)
        except TimingDiagError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return RunResponse(records_csv=result.store.to_csv_text(), report=report)

    @app.post("/api/analyze", response_model=AnalyzeResponse)
    def analyze_records(req: AnalyzeRequest) -> AnalyzeResponse:
        try:
            sc = parse_scenario(req.scenario)
            store = RecordStore.from_csv_text(req.records_csv)
            report = analyze(sc, store)
        except TimingDiagError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return AnalyzeResponse(report=report)

    @app.post("/api/render", response_model=RenderResponse)
    def render(req: RenderRequest) -> RenderResponse:
        kinds = req.kinds or list(SVG_ARTIFACTS)
        unknown = [k for k in kinds if k not in SVG_ARTIFACTS]
        if unknown:
            raise HTTPException(status_code=400, detail=f"unknown artifact kinds {unknown}")
        try:
            svgs = render_report_artifacts(req.report, kinds)
        except (TimingDiagError, KeyError) as exc:
            raise HTTPException(status_code=400, detail=f"malformed report: {exc}") from exc
        return RenderResponse(svgs=svgs)

    return app
