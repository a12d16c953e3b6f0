"""Point-scale rendering of a fitted logistic model, plus scoring.

Every predictor becomes a linear point axis: zero points at its
minimum-risk end, and the largest |slope x range| axis spans exactly
0..100 points. Total points map back to the linear predictor through an
affine map {beta0, scale}, so scoring through points reproduces the
model probability exactly (up to optional point quantization).

Nomograms built from published odds ratios carry no usable intercept:
they are flagged uncalibrated and score relative risk only.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

from .birads import LEXICON
from .errors import VersionMismatch, ZeroRange
from .logistic import LogisticModel

FORMAT_VERSION = "1.0"
DEFAULT_POINT_CAP = 100.0


@dataclass(frozen=True)
class NomogramAxis:
    name: str
    kind: str                      # "categorical" | "continuous"
    beta: float
    x_min: float
    x_max: float
    levels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("categorical", "continuous"):
            raise ValueError(f"unknown axis kind {self.kind!r}")
        if not self.x_max > self.x_min:
            raise ZeroRange(f"predictor {self.name} has no range")

    @property
    def min_risk_value(self) -> float:
        return self.x_min if self.beta >= 0 else self.x_max

    @property
    def max_points_scale(self) -> float:
        """|beta| * range, the axis span on the linear-predictor scale."""
        return abs(self.beta) * (self.x_max - self.x_min)


@dataclass(frozen=True)
class ScoreResult:
    total_points: float
    linear_predictor: float
    probability: float
    breakdown: dict[str, float]
    warnings: tuple[str, ...]
    calibrated: bool


@dataclass(frozen=True)
class Nomogram:
    task: str                       # "biopsy" | "malignancy"
    axes: tuple[NomogramAxis, ...]
    intercept: float
    source: str = "fitted"          # "fitted" | "paper-fixture"
    calibrated: bool = True
    point_cap: float = DEFAULT_POINT_CAP
    quantize: float | None = None   # optional point grid for display
    bands: tuple[dict, ...] = ()
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.task not in ("biopsy", "malignancy"):
            raise ValueError(f"unknown task {self.task!r}")
        if not self.axes:
            raise ValueError("nomogram needs at least one predictor axis")

    @property
    def point_scale(self) -> float:
        """Linear-predictor units per point."""
        return max(a.max_points_scale for a in self.axes) / self.point_cap

    @property
    def lp_offset(self) -> float:
        """Linear predictor at zero total points (all axes at minimum risk)."""
        return self.intercept + sum(a.beta * a.min_risk_value for a in self.axes)

    def axis(self, name: str) -> NomogramAxis:
        for a in self.axes:
            if a.name == name:
                return a
        raise KeyError(name)

    def axis_points(self, axis: NomogramAxis, x: float) -> float:
        pts = (axis.beta * x - axis.beta * axis.min_risk_value) / self.point_scale
        if self.quantize:
            pts = round(pts / self.quantize) * self.quantize
        return pts

    def axis_max_points(self, axis: NomogramAxis) -> float:
        return axis.max_points_scale / self.point_scale


def build_nomogram(
    model: LogisticModel,
    ranges: dict[str, tuple[float, float]],
    task: str,
    levels: dict[str, tuple[str, ...]] | None = None,
    source: str = "fitted",
    calibrated: bool = True,
    bands: tuple[dict, ...] = (),
    provenance: dict | None = None,
) -> Nomogram:
    """Point axes from a fitted model and the observed predictor ranges."""
    levels = levels or {}
    axes = []
    for name, beta in zip(model.predictors, model.coefficients):
        lo, hi = ranges[name]
        axes.append(NomogramAxis(
            name=name,
            kind="categorical" if name in levels else "continuous",
            beta=float(beta),
            x_min=float(lo),
            x_max=float(hi),
            levels=tuple(levels[name]) if name in levels else None,
        ))
    return Nomogram(
        task=task,
        axes=tuple(axes),
        intercept=float(model.intercept),
        source=source,
        calibrated=calibrated,
        bands=tuple(bands),
        provenance=provenance or {},
    )


# published multivariate odds ratios backing the fixture nomograms
FIXTURE_ODDS_RATIOS: dict[str, dict[str, float]] = {
    "biopsy": {
        "shape": 0.575,
        "orientation": 0.398,
        "margin": 2.024,
        "posterior": 2.142,
        "calcifications": 0.607,
    },
    "malignancy": {
        "orientation": 0.435,
        "margin": 1.454,
        "calcifications": 0.591,
    },
}


def paper_fixture_nomogram(task: str, intercept: float = 0.0) -> Nomogram:
    """Nomogram whose slopes are ln(OR) of the published multivariate fits.

    The publication provides no intercept or point tables, so the default
    fixture is uncalibrated: probabilities are relative-risk readings
    only.
    """
    if task not in FIXTURE_ODDS_RATIOS:
        raise ValueError(f"unknown task {task!r}")
    axes = []
    for name, or_value in FIXTURE_ODDS_RATIOS[task].items():
        levels = LEXICON[name]
        axes.append(NomogramAxis(
            name=name,
            kind="categorical",
            beta=math.log(or_value),
            x_min=1.0,
            x_max=float(len(levels)),
            levels=levels,
        ))
    return Nomogram(
        task=task,
        axes=tuple(axes),
        intercept=intercept,
        source="paper-fixture",
        calibrated=False,
        provenance={
            "coefficients": "published multivariate odds ratios, taken verbatim",
            "caveat": (
                "the source fits do not state their reference levels or "
                "category coding, so axis direction follows the ordinal "
                "lexicon codes; no intercept was published"
            ),
        },
    )


def score(nomogram: Nomogram, values: dict[str, float]) -> ScoreResult:
    """Total points, linear predictor, and probability for encoded inputs.

    Out-of-range inputs are clamped with a warning rather than rejected.
    """
    missing = [a.name for a in nomogram.axes if a.name not in values]
    if missing:
        raise KeyError(f"missing predictor values: {missing}")
    total = 0.0
    breakdown = {}
    warnings = []
    for axis in nomogram.axes:
        x = float(values[axis.name])
        if x < axis.x_min or x > axis.x_max:
            warnings.append(
                f"{axis.name}={x:g} clamped to [{axis.x_min:g}, {axis.x_max:g}]"
            )
            x = min(max(x, axis.x_min), axis.x_max)
        pts = nomogram.axis_points(axis, x)
        breakdown[axis.name] = pts
        total += pts
    lp = nomogram.lp_offset + nomogram.point_scale * total
    prob = 1.0 / (1.0 + math.exp(-lp))
    return ScoreResult(
        total_points=total,
        linear_predictor=lp,
        probability=prob,
        breakdown=breakdown,
        warnings=tuple(warnings),
        calibrated=nomogram.calibrated,
    )


# -- versioned document form -------------------------------------------------

def _canonical_payload(doc: dict) -> bytes:
    body = {k: v for k, v in doc.items() if k != "checksum"}
    return json.dumps(body, sort_keys=True, separators=(",", ":")).encode()


def document_checksum(doc: dict) -> str:
    return "sha256:" + hashlib.sha256(_canonical_payload(doc)).hexdigest()


def to_document(nomogram: Nomogram, nomogram_id: str) -> dict:
    predictors = []
    for axis in nomogram.axes:
        entry = {
            "name": axis.name,
            "kind": axis.kind,
            "beta": axis.beta,
            "range": [axis.x_min, axis.x_max],
            "max_points": nomogram.axis_max_points(axis),
        }
        if axis.kind == "categorical":
            entry["levels"] = list(axis.levels)
            entry["points_table"] = {
                level: nomogram.axis_points(axis, axis.x_min + i)
                for i, level in enumerate(axis.levels)
            }
        else:
            entry["points_table"] = [
                [axis.x_min, nomogram.axis_points(axis, axis.x_min)],
                [axis.x_max, nomogram.axis_points(axis, axis.x_max)],
            ]
        predictors.append(entry)
    doc = {
        "version": FORMAT_VERSION,
        "id": nomogram_id,
        "task": nomogram.task,
        "source": nomogram.source,
        "calibrated": nomogram.calibrated,
        "point_cap": nomogram.point_cap,
        "quantize": nomogram.quantize,
        "intercept": nomogram.intercept,
        "predictors": predictors,
        "total_points_to_probability": {
            "beta0": nomogram.lp_offset,
            "scale": nomogram.point_scale,
        },
        "bands": list(nomogram.bands),
        "provenance": nomogram.provenance,
    }
    doc["checksum"] = document_checksum(doc)
    return doc


def check_version(version: str, current: str = FORMAT_VERSION) -> str | None:
    """None when current; a compatibility note for accepted older minors."""
    try:
        major, minor = (int(part) for part in version.split("."))
    except ValueError as exc:
        raise VersionMismatch(f"unparseable document version {version!r}") from exc
    cur_major, cur_minor = (int(p) for p in current.split("."))
    if major != cur_major or minor > cur_minor:
        raise VersionMismatch(
            f"document version {version} incompatible with reader {current}"
        )
    if minor < cur_minor:
        return f"document minor version {version} older than reader {current}"
    return None


def from_document(doc: dict) -> Nomogram:
    check_version(str(doc.get("version", "")))
    axes = []
    for entry in doc["predictors"]:
        axes.append(NomogramAxis(
            name=entry["name"],
            kind=entry["kind"],
            beta=float(entry["beta"]),
            x_min=float(entry["range"][0]),
            x_max=float(entry["range"][1]),
            levels=tuple(entry["levels"]) if "levels" in entry else None,
        ))
    return Nomogram(
        task=doc["task"],
        axes=tuple(axes),
        intercept=float(doc["intercept"]),
        source=doc["source"],
        calibrated=bool(doc["calibrated"]),
        point_cap=float(doc["point_cap"]),
        quantize=doc.get("quantize"),
        bands=tuple(doc.get("bands", ())),
        provenance=dict(doc.get("provenance", {})),
    )
