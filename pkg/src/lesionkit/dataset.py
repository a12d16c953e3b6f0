"""Cohort ingestion and pipeline configuration.

Two input files: a comma-separated table of lexicon records (one row per
patient, one lesion each) and a line-delimited JSON file of contour
records {patient_id, rater_id, points}. Validation is strict: unknown
enum tokens, duplicate patients, and contours for unknown patients are
hard failures, each listed with its row and reason.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .birads import BiradsRecord
from .errors import (
    DegenerateRegion,
    InvalidContour,
    JoinError,
    ParseError,
    SchemaViolation,
    UnknownLevel,
)
from .geometry import LesionContour

CSV_COLUMNS = [
    "patient_id", "cohort",
    "tissue_composition", "shape", "orientation", "margin", "echo_pattern",
    "posterior", "calcifications", "architectural_distortion",
    "clustered_microcysts", "complicated_cyst",
    "birads_category", "pathology",
    "r1_biopsy", "r2_biopsy", "r3_biopsy",
    "r1_diagnosis", "r2_diagnosis", "r3_diagnosis",
]


@dataclass(frozen=True)
class PipelineConfig:
    icc_threshold: float = 0.85
    corr_threshold: float = 0.85
    alpha: float = 0.05
    cv_folds: int = 10
    lambda_rule: str = "min"
    seed: int = 0
    task: str = "biopsy"
    encoding: str = "ordinal"
    threshold_rule: str = "youden"
    fixed_threshold: float = 0.5

    def __post_init__(self):
        for name in ("icc_threshold", "corr_threshold", "alpha", "fixed_threshold"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise SchemaViolation(f"{name} must lie in (0, 1), got {value}")
        if self.cv_folds < 2:
            raise SchemaViolation("cv_folds must be at least 2")
        if self.lambda_rule not in ("min", "1se"):
            raise SchemaViolation(f"lambda_rule must be min or 1se, got {self.lambda_rule!r}")
        if self.task not in ("biopsy", "malignancy"):
            raise SchemaViolation(f"task must be biopsy or malignancy, got {self.task!r}")
        if self.encoding not in ("ordinal", "onehot"):
            raise SchemaViolation(f"encoding must be ordinal or onehot, got {self.encoding!r}")
        if self.threshold_rule not in ("youden", "fixed"):
            raise SchemaViolation(f"threshold_rule must be youden or fixed, got {self.threshold_rule!r}")

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        """Flat key = value text; '#' starts a comment."""
        kwargs = {}
        casts = {f.name: f.type for f in fields(cls)}
        for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"{path}:{lineno}: expected key = value, got {raw!r}")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in casts:
                raise SchemaViolation(f"{path}:{lineno}: unknown config key {key!r}")
            if casts[key] == "int":
                kwargs[key] = int(value)
            elif casts[key] == "float":
                kwargs[key] = float(value)
            else:
                kwargs[key] = value
        return cls(**kwargs)

    def to_text(self) -> str:
        lines = [f"{f.name} = {getattr(self, f.name)}" for f in fields(self)]
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]


@dataclass
class CohortDataset:
    records: list[BiradsRecord]
    contours: dict[tuple[str, str], LesionContour]   # (patient_id, rater_id)
    raters: list[str]
    validation_notes: list[str] = field(default_factory=list)

    def by_cohort(self, cohort: str) -> list[BiradsRecord]:
        return [r for r in self.records if r.cohort == cohort]

    @property
    def cohorts(self) -> list[str]:
        seen = []
        for r in self.records:
            if r.cohort not in seen:
                seen.append(r.cohort)
        return seen

    def raters_for(self, patient_id: str) -> list[str]:
        return sorted(r for (pid, r) in self.contours if pid == patient_id)

    def has_full_contours(self, patient_id: str) -> bool:
        return all((patient_id, r) in self.contours for r in self.raters)


def _load_birads_csv(path: Path) -> tuple[list[BiradsRecord], list[str]]:
    problems: list[str] = []
    records: list[BiradsRecord] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ParseError(f"{path}: empty file")
        missing = set(CSV_COLUMNS) - set(reader.fieldnames)
        if missing:
            raise SchemaViolation(f"{path}: missing columns {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                records.append(BiradsRecord(
                    patient_id=row["patient_id"],
                    cohort=row["cohort"],
                    tissue_composition=row["tissue_composition"],
                    shape=row["shape"],
                    orientation=row["orientation"],
                    margin=row["margin"],
                    echo_pattern=row["echo_pattern"],
                    posterior=row["posterior"],
                    calcifications=row["calcifications"],
                    architectural_distortion=row["architectural_distortion"],
                    clustered_microcysts=row["clustered_microcysts"],
                    complicated_cyst=row["complicated_cyst"],
                    birads_category=row["birads_category"],
                    pathology=row["pathology"],
                    votes_biopsy=(row["r1_biopsy"], row["r2_biopsy"], row["r3_biopsy"]),
                    votes_diagnosis=(row["r1_diagnosis"], row["r2_diagnosis"], row["r3_diagnosis"]),
                ))
            except UnknownLevel as exc:
                problems.append(f"{path}:{lineno}: {exc}")
    return records, problems


def _load_contours_jsonl(path: Path) -> tuple[dict[tuple[str, str], LesionContour], list[str]]:
    contours: dict[tuple[str, str], LesionContour] = {}
    problems: list[str] = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            entry = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}:{lineno}: invalid JSON ({exc})") from exc
        try:
            pid = str(entry["patient_id"])
            rid = str(entry["rater_id"])
            points = np.asarray(entry["points"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            problems.append(f"{path}:{lineno}: malformed contour record ({exc})")
            continue
        key = (pid, rid)
        if key in contours:
            problems.append(f"{path}:{lineno}: duplicate contour for patient {pid} rater {rid}")
            continue
        try:
            contours[key] = LesionContour(points)
        except (InvalidContour, DegenerateRegion) as exc:
            problems.append(f"{path}:{lineno}: bad contour for patient {pid}: {exc}")
    return contours, problems


def load_cohort(
    birads_path: str | Path,
    contours_path: str | Path,
    config: PipelineConfig | None = None,
) -> CohortDataset:
    """Parse, validate and join the two input files.

    Raises SchemaViolation / JoinError carrying the full list of rejected
    rows; records lacking contours stay in the dataset (usable by the
    lexicon-only model) and are only noted.
    """
    birads_path = Path(birads_path)
    contours_path = Path(contours_path)
    records, schema_problems = _load_birads_csv(birads_path)
    contours, contour_problems = _load_contours_jsonl(contours_path)
    if schema_problems or contour_problems:
        report = "\n".join(schema_problems + contour_problems)
        raise SchemaViolation(f"validation failed:\n{report}")

    join_problems = []
    seen: set[str] = set()
    for i, record in enumerate(records):
        if record.patient_id in seen:
            join_problems.append(
                f"{birads_path}: duplicate patient_id {record.patient_id!r} (one lesion per patient)"
            )
        seen.add(record.patient_id)
    for pid, rid in contours:
        if pid not in seen:
            join_problems.append(
                f"{contours_path}: contour for unknown patient {pid!r} (rater {rid})"
            )
    if join_problems:
        raise JoinError("join failed:\n" + "\n".join(join_problems))

    raters = sorted({rid for _, rid in contours})
    notes = []
    missing = [r.patient_id for r in records
               if not all((r.patient_id, rater) in contours for rater in raters)]
    if missing:
        notes.append(
            f"{len(missing)} record(s) without full contour coverage; "
            "excluded from morphometric and fused models"
        )
    return CohortDataset(
        records=records,
        contours=contours,
        raters=raters,
        validation_notes=notes,
    )
