"""HTTP/JSON service: POST /api/analyze and GET /api/model over an immutable
workbench snapshot, plus static hosting for the browser UI."""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .corpus import CorpusError
from .workbench import Workbench


class AnalyzeRequest(BaseModel):
    sentence: str
    k: int | None = None


def create_app(workbench: Workbench | None, ui_dir: str | Path | None = None) -> FastAPI:
    """Build the API app. `workbench` may be swapped atomically later via
    `app.state.workbench = ...`; requests read the attribute once."""
    app = FastAPI(title="statelens", docs_url=None, redoc_url=None)
    app.state.workbench = workbench

    def current() -> Workbench:
        wb = app.state.workbench
        if wb is None:
            raise HTTPException(status_code=503, detail="no model bundle is loaded")
        return wb

    @app.get("/api/model")
    def model_info() -> JSONResponse:
        return JSONResponse(current().model_info())

    @app.post("/api/analyze")
    def analyze(request: AnalyzeRequest) -> JSONResponse:
        wb = current()
        if not request.sentence.strip():
            raise HTTPException(status_code=400, detail="sentence must not be empty")
        if request.k is not None and request.k < 1:
            raise HTTPException(status_code=400, detail="k must be a positive integer")
        try:
            result = wb.analyze(request.sentence, k_bars=request.k)
        except CorpusError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return JSONResponse(wb.analysis_json(result))

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
