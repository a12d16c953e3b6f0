"""Standardized ultrasound lexicon records and their numeric encoding.

Each categorical descriptor has a closed, ordered level list; ordinal
codes start at 1 and follow the reporting order of the descriptor
tables, so a multi-level descriptor contributes a single pooled slope
when modeled. One-hot encoding is available behind a switch for
sensitivity analysis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnknownLevel

# reporting order fixes the ordinal codes (first level = 1)
LEXICON: dict[str, tuple[str, ...]] = {
    "tissue_composition": ("fat", "fibroglandular", "heterogeneous"),
    "shape": ("irregular", "oval", "round"),
    "orientation": ("parallel", "not_parallel"),
    "margin": ("circumscribed", "angular", "indistinct", "microlobulated", "spiculated"),
    "echo_pattern": (
        "anechoic", "complex_cystic_solid", "heterogeneous",
        "hyperechoic", "hypoechoic", "isoechoic",
    ),
    "posterior": ("enhancement", "none", "shadowing"),
    "calcifications": ("in_mass", "outside_mass", "none"),
    "architectural_distortion": ("no", "yes"),
    "clustered_microcysts": ("no", "yes"),
    "complicated_cyst": ("no", "yes"),
}

IMAGING_FEATURES: tuple[str, ...] = tuple(LEXICON)

COHORTS = ("train", "internal", "external1", "external2")
BIRADS_CATEGORIES = ("2", "3", "4A", "4B", "4C", "5")
PATHOLOGY_LEVELS = ("benign", "malignant", "none")
BIOPSY_VOTES = ("candid", "not_candid")
DIAGNOSIS_VOTES = ("benign", "malignant", "na")


@dataclass(frozen=True)
class BiradsRecord:
    patient_id: str
    cohort: str
    tissue_composition: str
    shape: str
    orientation: str
    margin: str
    echo_pattern: str
    posterior: str
    calcifications: str
    architectural_distortion: str
    clustered_microcysts: str
    complicated_cyst: str
    birads_category: str
    pathology: str
    votes_biopsy: tuple[str, str, str]
    votes_diagnosis: tuple[str, str, str]

    def __post_init__(self):
        for name, levels in LEXICON.items():
            value = getattr(self, name)
            if value not in levels:
                raise UnknownLevel(f"{name}={value!r} not in {levels}")
        if self.cohort not in COHORTS:
            raise UnknownLevel(f"cohort={self.cohort!r} not in {COHORTS}")
        if self.birads_category not in BIRADS_CATEGORIES:
            raise UnknownLevel(f"birads_category={self.birads_category!r}")
        if self.pathology not in PATHOLOGY_LEVELS:
            raise UnknownLevel(f"pathology={self.pathology!r}")
        if len(self.votes_biopsy) != 3 or any(v not in BIOPSY_VOTES for v in self.votes_biopsy):
            raise UnknownLevel(f"votes_biopsy={self.votes_biopsy!r}")
        if len(self.votes_diagnosis) != 3 or any(v not in DIAGNOSIS_VOTES for v in self.votes_diagnosis):
            raise UnknownLevel(f"votes_diagnosis={self.votes_diagnosis!r}")


@dataclass(frozen=True)
class EncodingSpec:
    """Bijective level<->code tables for the imaging descriptors."""

    features: tuple[str, ...] = IMAGING_FEATURES
    one_hot: bool = False

    def levels(self, feature: str) -> tuple[str, ...]:
        return LEXICON[feature]

    def code(self, feature: str, level: str) -> int:
        levels = LEXICON[feature]
        if level not in levels:
            raise UnknownLevel(f"{feature}={level!r} not in {levels}")
        return levels.index(level) + 1

    def level_for(self, feature: str, code: int) -> str:
        levels = LEXICON[feature]
        if not 1 <= code <= len(levels):
            raise UnknownLevel(f"{feature} code {code} outside 1..{len(levels)}")
        return levels[code - 1]

    @property
    def column_names(self) -> list[str]:
        if not self.one_hot:
            return list(self.features)
        names = []
        for feat in self.features:
            # first level is the reference category
            names.extend(f"{feat}={lvl}" for lvl in LEXICON[feat][1:])
        return names


def encode(record: BiradsRecord, spec: EncodingSpec | None = None) -> np.ndarray:
    spec = spec or EncodingSpec()
    if not spec.one_hot:
        return np.array(
            [spec.code(f, getattr(record, f)) for f in spec.features], dtype=float
        )
    out = []
    for feat in spec.features:
        value = getattr(record, feat)
        spec.code(feat, value)  # validates
        out.extend(1.0 if value == lvl else 0.0 for lvl in LEXICON[feat][1:])
    return np.array(out, dtype=float)


def decode(vector: np.ndarray, spec: EncodingSpec | None = None) -> dict[str, str]:
    spec = spec or EncodingSpec()
    if spec.one_hot:
        raise ValueError("decode is defined for ordinal encoding only")
    if len(vector) != len(spec.features):
        raise UnknownLevel("encoded vector length does not match the spec")
    return {
        feat: spec.level_for(feat, int(round(code)))
        for feat, code in zip(spec.features, vector)
    }


def encode_records(records: list[BiradsRecord], spec: EncodingSpec | None = None) -> np.ndarray:
    spec = spec or EncodingSpec()
    return np.vstack([encode(r, spec) for r in records])
