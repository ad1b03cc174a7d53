"""HTTP layer for interactive viewers.

Stateless by design: every /v1/label request runs one full pipeline
over an immutable uploaded dataset, so interactive pan/zoom exercises
the engine end to end instead of a cache.
"""

from __future__ import annotations

import hashlib
from contextlib import asynccontextmanager
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .io import FeatureParseError, emit_placements_json, parse_feature_xml
from .model import EngineOptions, Feature, LabelDims, Viewport
from .selector import ensure_warm, run_pipeline

MAX_UPLOAD_BYTES = 64 * 1024 * 1024


@dataclass
class LoadedDataset:
    features: List[Feature]
    warnings: List[str]


class ViewportIn(BaseModel):
    width: float
    height: float
    pan_x: float = 0.0
    pan_y: float = 0.0
    zoom: float = 1.0


class DimsIn(BaseModel):
    width: float
    height: float


class OptionsIn(BaseModel):
    priority_threshold: Optional[int] = None
    allowed_overlap_pct: float = 0.0
    prox_weight: float = 0.5
    preference_order: Tuple[int, int, int, int] = (3, 2, 1, 0)
    spread_values: bool = True


class LabelRequest(BaseModel):
    dataset_id: str
    viewport: ViewportIn
    label_dims: DimsIn
    options: OptionsIn = OptionsIn()


@asynccontextmanager
async def _lifespan(app: FastAPI):
    ensure_warm()  # compile the placement kernel before the first request
    yield


def create_app(max_upload_bytes: int = MAX_UPLOAD_BYTES) -> FastAPI:
    app = FastAPI(title="labelgrid", docs_url=None, redoc_url=None, lifespan=_lifespan)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    datasets: Dict[str, LoadedDataset] = {}

    @app.exception_handler(RequestValidationError)
    async def _validation_handler(request: Request, exc: RequestValidationError):
        details = [
            {"field": ".".join(str(p) for p in err["loc"]), "message": err["msg"]}
            for err in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"error": "invalid request", "details": details})

    @app.post("/v1/datasets")
    async def upload_dataset(request: Request):
        body = await request.body()
        if len(body) > max_upload_bytes:
            raise HTTPException(status_code=413, detail="dataset upload too large")
        try:
            ff = parse_feature_xml(body)
        except FeatureParseError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        dataset_id = hashlib.sha256(body).hexdigest()[:16]
        datasets[dataset_id] = LoadedDataset(features=ff.features, warnings=ff.warnings)
        return {"dataset_id": dataset_id, "n": len(ff.features), "warnings": ff.warnings}

    @app.get("/v1/datasets/{dataset_id}/meta")
    async def dataset_meta(dataset_id: str):
        ds = datasets.get(dataset_id)
        if ds is None:
            raise HTTPException(status_code=404, detail="unknown dataset")
        feats = ds.features
        if feats:
            bounds = {
                "min_x": min(f.world_x for f in feats),
                "min_y": min(f.world_y for f in feats),
                "max_x": max(f.world_x for f in feats),
                "max_y": max(f.world_y for f in feats),
            }
            rank_range = {
                "min": min(f.rank for f in feats),
                "max": max(f.rank for f in feats),
            }
        else:
            bounds = None
            rank_range = None
        return {"n": len(feats), "bounds": bounds, "rank_range": rank_range}

    @app.post("/v1/label")
    async def label(req: LabelRequest):
        ds = datasets.get(req.dataset_id)
        if ds is None:
            raise HTTPException(status_code=404, detail="unknown dataset")
        v = req.viewport
        d = req.label_dims
        if v.width <= 0 or v.height <= 0 or v.zoom <= 0:
            raise HTTPException(status_code=400, detail="viewport dimensions and zoom must be positive")
        if d.width <= 0 or d.height <= 0:
            raise HTTPException(status_code=400, detail="label dims must be positive")
        o = req.options
        try:
            options = EngineOptions(
                priority_threshold=o.priority_threshold,
                allowed_overlap_pct=o.allowed_overlap_pct,
                prox_weight=o.prox_weight,
                preference_order=tuple(o.preference_order),
                spread_values=o.spread_values,
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        result = run_pipeline(
            ds.features,
            Viewport(width_px=v.width, height_px=v.height, pan_x=v.pan_x, pan_y=v.pan_y, zoom=v.zoom),
            LabelDims(d.width, d.height),
            options,
        )
        return Response(content=emit_placements_json(result), media_type="application/json")

    return app
