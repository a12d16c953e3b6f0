"""Stateless scoring service over exported nomogram documents.

Artifacts are loaded once at startup and never mutated; the fetch
endpoint returns the exact bytes that were exported, and scoring
delegates to the library so responses match offline computation. All
response numbers are serialized as decimals with 12 significant digits.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, HTTPException, Response
from pydantic import BaseModel, Field

from .errors import ChecksumMismatch
from .nomogram import (
    Nomogram,
    check_version,
    document_checksum,
    from_document,
    score,
)


class NomogramSummary(BaseModel):
    id: str
    task: str
    version: str
    checksum: str
    source: str
    calibrated: bool
    compatibility_note: str | None = None


class ScoreRequest(BaseModel):
    features: dict[str, float | str] = Field(
        description="categorical levels by name, continuous values by name"
    )


class PredictorPoints(BaseModel):
    name: str
    value: float
    level: str | None = None
    points: float


class ScoreResponse(BaseModel):
    nomogram_id: str
    nomogram_version: str
    nomogram_checksum: str
    total_points: float
    linear_predictor: float
    probability: float
    calibrated: bool
    band: str | None
    per_predictor_points: list[PredictorPoints]
    warnings: list[str]


class FieldError(BaseModel):
    field: str
    message: str


def _sig12(x: float) -> float:
    return float(f"{x:.12g}")


class LoadedNomogram:
    def __init__(self, doc: dict, raw: bytes, note: str | None):
        self.doc = doc
        self.raw = raw
        self.note = note
        self.nomogram: Nomogram = from_document(doc)

    @property
    def summary(self) -> NomogramSummary:
        return NomogramSummary(
            id=self.doc["id"],
            task=self.doc["task"],
            version=self.doc["version"],
            checksum=self.doc["checksum"],
            source=self.doc["source"],
            calibrated=self.doc["calibrated"],
            compatibility_note=self.note,
        )


def load_artifacts(artifact_dir: str | Path) -> dict[str, LoadedNomogram]:
    """Read every nomogram document in the directory, verifying checksums."""
    loaded: dict[str, LoadedNomogram] = {}
    for path in sorted(Path(artifact_dir).glob("*.json")):
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError:
            continue
        if not (isinstance(doc, dict) and "predictors" in doc and "checksum" in doc):
            continue  # other pipeline artifacts live alongside the nomograms
        note = check_version(str(doc.get("version", "")))
        if document_checksum(doc) != doc["checksum"]:
            raise ChecksumMismatch(f"{path}: artifact checksum mismatch")
        entry = LoadedNomogram(doc, path.read_bytes(), note)
        loaded[doc["id"]] = entry
    return loaded


def _encode_request(
    nomogram: Nomogram, features: dict[str, float | str]
) -> tuple[dict[str, float], dict[str, str | None], list[FieldError]]:
    values: dict[str, float] = {}
    levels: dict[str, str | None] = {}
    errors: list[FieldError] = []
    known = {a.name for a in nomogram.axes}
    for name in features:
        if name not in known:
            errors.append(FieldError(field=name, message="unknown predictor"))
    for axis in nomogram.axes:
        if axis.name not in features:
            errors.append(FieldError(field=axis.name, message="missing value"))
            continue
        raw = features[axis.name]
        if isinstance(raw, str):
            if axis.kind != "categorical" or axis.levels is None:
                errors.append(FieldError(
                    field=axis.name, message="level name given for a continuous predictor"
                ))
                continue
            if raw not in axis.levels:
                errors.append(FieldError(
                    field=axis.name,
                    message=f"unknown level {raw!r}; expected one of {list(axis.levels)}",
                ))
                continue
            values[axis.name] = axis.x_min + axis.levels.index(raw)
            levels[axis.name] = raw
        else:
            values[axis.name] = float(raw)
            if axis.kind == "categorical" and axis.levels is not None:
                code = int(round(float(raw)))
                in_range = axis.x_min <= code <= axis.x_max and code == float(raw)
                levels[axis.name] = axis.levels[code - 1] if in_range else None
            else:
                levels[axis.name] = None
    return values, levels, errors


def _band_for(doc: dict, probability: float) -> str | None:
    best = None
    for band in doc.get("bands", []):
        if probability >= band["min_probability"]:
            if best is None or band["min_probability"] >= best["min_probability"]:
                best = band
    return best["label"] if best else None


def create_app(artifact_dir: str | Path) -> FastAPI:
    app = FastAPI(title="lesionkit scoring service")
    registry = load_artifacts(artifact_dir)

    @app.get("/nomograms", response_model=list[NomogramSummary])
    def list_nomograms():
        return [entry.summary for key, entry in sorted(registry.items())]

    @app.get("/nomograms/{nomogram_id}")
    def get_nomogram(nomogram_id: str):
        entry = registry.get(nomogram_id)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"no nomogram {nomogram_id!r}")
        # exact exported payload, byte for byte
        return Response(content=entry.raw, media_type="application/json")

    @app.post("/nomograms/{nomogram_id}/score", response_model=ScoreResponse)
    def post_score(nomogram_id: str, request: ScoreRequest):
        entry = registry.get(nomogram_id)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"no nomogram {nomogram_id!r}")
        values, levels, errors = _encode_request(entry.nomogram, request.features)
        if errors:
            raise HTTPException(
                status_code=400,
                detail={"errors": [e.model_dump() for e in errors]},
            )
        result = score(entry.nomogram, values)
        return ScoreResponse(
            nomogram_id=nomogram_id,
            nomogram_version=entry.doc["version"],
            nomogram_checksum=entry.doc["checksum"],
            total_points=_sig12(result.total_points),
            linear_predictor=_sig12(result.linear_predictor),
            probability=_sig12(result.probability),
            calibrated=result.calibrated,
            band=_band_for(entry.doc, result.probability),
            per_predictor_points=[
                PredictorPoints(
                    name=axis.name,
                    value=_sig12(values[axis.name]),
                    level=levels.get(axis.name),
                    points=_sig12(result.breakdown[axis.name]),
                )
                for axis in entry.nomogram.axes
            ],
            warnings=list(result.warnings),
        )

    return app
