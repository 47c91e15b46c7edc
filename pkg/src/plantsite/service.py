"""Read-mostly HTTP API over one scored landscape snapshot.

Every endpoint reads an immutable ScoredSnapshot; the only mutation anywhere
is replacing the whole snapshot behind an atomic reference swap, so in-flight
requests keep the snapshot they started with. The what-if endpoint re-fuses
cached (s, m) pairs; it never re-runs the rubric or the model, which keeps it
O(cells) in pure arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from .config import RunConfig
from .fusion import (
    ClassDistribution,
    SuitabilityRecord,
    classify,
    fuse,
    load_scores,
)
from .gridgen import DEFAULT_CELL_SIZE_M
from .landscape import load_landscape
from .landscape.types import GridCell, ValidationError
from .reporting import ClassDescriptives, class_descriptives
from .rubric import breakdown_payload, expert_score


@dataclass(frozen=True)
class ScoredSnapshot:
    """Immutable bundle the service reads: cells, their records, run config."""

    cells: tuple[GridCell, ...]
    records: tuple[SuitabilityRecord, ...]
    config: RunConfig
    built_at: str
    cell_size_m: float = DEFAULT_CELL_SIZE_M
    record_by_id: dict[int, SuitabilityRecord] = field(init=False, compare=False, repr=False)
    cell_by_id: dict[int, GridCell] = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        records = {r.grid_id: r for r in self.records}
        cells = {c.grid_id: c for c in self.cells}
        if set(records) != set(cells):
            raise ValidationError("snapshot cells and records must cover the same grid ids")
        object.__setattr__(self, "record_by_id", records)
        object.__setattr__(self, "cell_by_id", cells)


def build_snapshot(
    cells: Sequence[GridCell],
    records: Sequence[SuitabilityRecord],
    config: RunConfig,
    cell_size_m: float = DEFAULT_CELL_SIZE_M,
) -> ScoredSnapshot:
    return ScoredSnapshot(
        cells=tuple(cells),
        records=tuple(records),
        config=config,
        built_at=datetime.now(timezone.utc).isoformat(),
        cell_size_m=cell_size_m,
    )


def snapshot_from_files(
    scores_path: str | Path,
    grid_file: str | Path,
    compartment_file: str | Path,
    village_file: str | Path,
    config: RunConfig = RunConfig(),
) -> ScoredSnapshot:
    landscape = load_landscape(grid_file, compartment_file, village_file)
    records = load_scores(scores_path)
    return build_snapshot(landscape.cells, records, config)


class SnapshotHolder:
    """Atomic reference to the current snapshot; swap is a single assignment."""

    def __init__(self, snapshot: Optional[ScoredSnapshot] = None) -> None:
        self.current = snapshot

    def swap(self, snapshot: ScoredSnapshot) -> None:
        self.current = snapshot


# ---------------------------------------------------------------------------
# JSON shaping
# ---------------------------------------------------------------------------

def _distribution_payload(dist: ClassDistribution) -> dict:
    return {
        "largely_unsuitable_pct": dist.largely_unsuitable_pct,
        "low_pct": dist.low_pct,
        "medium_pct": dist.medium_pct,
        "high_pct": dist.high_pct,
    }


def _distribution_over(classes: Sequence[str]) -> dict:
    # all-zero shares for an empty landscape instead of an error
    total = len(classes)
    keys = ("largely_unsuitable", "low", "medium", "high")
    if total == 0:
        return {f"{k}_pct": 0.0 for k in keys}
    return {f"{k}_pct": 100.0 * sum(1 for c in classes if c == k) / total for k in keys}


def _descriptives_payload(desc: ClassDescriptives) -> list[dict]:
    return [
        {
            "class": row.suitability.value,
            "n_cells": row.n_cells,
            "mean_of_pct": row.mean_of_pct,
            "mean_mdf_pct": row.mean_mdf_pct,
            "mean_vdf_pct": row.mean_vdf_pct,
            "mean_nf_pct": row.mean_nf_pct,
            "mean_elevation_m": row.mean_elevation_m,
            "cells_with_village_within_1km": row.cells_with_village_within_1km,
        }
        for row in desc.rows
    ]


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def _parse_bbox(raw: Optional[str]) -> tuple[float, float, float, float]:
    if raw is None:
        raise ValidationError("missing bbox parameter; expected bbox=x0,y0,x1,y1")
    parts = raw.split(",")
    if len(parts) != 4:
        raise ValidationError(f"bbox must be 4 comma-separated numbers, got {raw!r}")
    try:
        x0, y0, x1, y1 = (float(p) for p in parts)
    except ValueError:
        raise ValidationError(f"bbox must be numeric, got {raw!r}") from None
    if not all(math.isfinite(v) for v in (x0, y0, x1, y1)):
        raise ValidationError("bbox coordinates must be finite")
    if x1 < x0 or y1 < y0:
        raise ValidationError("bbox must be ordered x0<=x1, y0<=y1")
    return x0, y0, x1, y1


# ---------------------------------------------------------------------------
# Application factory
# ---------------------------------------------------------------------------

def create_app(snapshot: Optional[ScoredSnapshot] = None) -> FastAPI:
    app = FastAPI(title="plantsite", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    holder = SnapshotHolder(snapshot)
    app.state.holder = holder

    @app.exception_handler(Exception)
    async def unhandled(request: Request, exc: Exception) -> JSONResponse:
        return _error(500, str(exc))

    @app.exception_handler(StarletteHTTPException)
    async def http_error(request: Request, exc: StarletteHTTPException) -> JSONResponse:
        return _error(exc.status_code, str(exc.detail))

    @app.exception_handler(RequestValidationError)
    async def invalid_request(request: Request, exc: RequestValidationError) -> JSONResponse:
        return _error(400, str(exc.errors()))

    def current() -> Optional[ScoredSnapshot]:
        return holder.current

    @app.get("/health")
    def health():
        snap = current()
        if snap is None:
            return _error(503, "no snapshot loaded")
        return {"status": "ok", "snapshot_timestamp": snap.built_at}

    @app.get("/grids")
    def grids(bbox: Optional[str] = None):
        snap = current()
        if snap is None:
            return _error(503, "no snapshot loaded")
        try:
            x0, y0, x1, y1 = _parse_bbox(bbox)
        except ValidationError as exc:
            return _error(400, str(exc))
        half = snap.cell_size_m / 2.0
        out = []
        for cell in snap.cells:
            cx, cy = cell.origin[0] + half, cell.origin[1] + half
            if x0 <= cx <= x1 and y0 <= cy <= y1:
                record = snap.record_by_id[cell.grid_id]
                out.append(
                    {
                        "grid_id": cell.grid_id,
                        "origin": [cell.origin[0], cell.origin[1]],
                        "x": record.x,
                        "class": record.suitability.value,
                    }
                )
        out.sort(key=lambda item: item["grid_id"])
        return out

    @app.get("/grids/{grid_id}/breakdown")
    def breakdown(grid_id: int):
        snap = current()
        if snap is None:
            return _error(503, "no snapshot loaded")
        record = snap.record_by_id.get(grid_id)
        if record is None:
            return _error(404, f"unknown grid_id {grid_id}")
        cell = snap.cell_by_id[grid_id]
        payload = breakdown_payload(grid_id, expert_score(cell))
        payload.update(
            {
                "m": record.m,
                "x": record.x,
                "class": record.suitability.value,
                "exclusion_reasons": list(record.exclusion.reasons),
            }
        )
        return payload

    @app.post("/whatif")
    async def whatif(request: Request):
        snap = current()
        if snap is None:
            return _error(503, "no snapshot loaded")
        try:
            body = await request.json()
        except Exception:
            return _error(400, "body must be JSON like {\"alpha\": 0.9}")
        if not isinstance(body, dict) or "alpha" not in body:
            return _error(400, "body must carry an alpha field")
        alpha = body["alpha"]
        if not isinstance(alpha, (int, float)) or isinstance(alpha, bool):
            return _error(400, f"alpha must be a number, got {alpha!r}")
        alpha = float(alpha)
        if not (0.0 <= alpha <= 1.0) or not math.isfinite(alpha):
            return _error(400, f"alpha {alpha} out of [0,1]")

        classes = []
        changes = []
        for record in snap.records:
            if record.exclusion.excluded:
                new_x = 0.0
            else:
                new_x = fuse(record.s, record.m, alpha)
            new_class = classify(new_x, record.exclusion.excluded)
            classes.append(new_class.value)
            if new_class is not record.suitability:
                changes.append(
                    {
                        "grid_id": record.grid_id,
                        "from_class": record.suitability.value,
                        "to_class": new_class.value,
                    }
                )
        return {
            "alpha": alpha,
            "distribution": _distribution_over(classes),
            "changed": len(changes),
            "changes": changes,
        }

    @app.get("/summary")
    def summary():
        snap = current()
        if snap is None:
            return _error(503, "no snapshot loaded")
        classes = [r.suitability.value for r in snap.records]
        payload = {"distribution": _distribution_over(classes)}
        if snap.records:
            payload["descriptives"] = _descriptives_payload(
                class_descriptives(snap.records, snap.cells)
            )
        else:
            payload["descriptives"] = []
        return payload

    return app


def serve(snapshot: ScoredSnapshot, host: str = "127.0.0.1", port: int = 8000) -> None:
    import uvicorn

    uvicorn.run(create_app(snapshot), host=host, port=port, log_level="warning")
