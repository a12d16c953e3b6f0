"""The 26-feature morphometric vector of a lesion contour.

Feature roster (units in brackets, everything else dimensionless):

    area [mm^2], perimeter [mm]
    circularity1  = 4*pi*A / P^2
    circularity2  = A / (pi * R_circ^2)            (min enclosing circle)
    roundness     = 4*A / (pi * major^2)           (major = full axis length)
    compactness   = P^2 / (4*pi*A)
    convexity1    = P_hull / P
    convexity2    = A / A_hull                     (solidity)
    convexity3    = max defect depth / D_eq,  D_eq = sqrt(4*A/pi)
    convexity4    = (A_hull - A) / (P_hull * D_eq)
    concavity     = (A_hull - A) / A_hull
    aspect_ratio  = major / minor                  (moment-ellipse axes)
    elongation    = 1 - minor / major
    eccentricity  = sqrt(1 - (minor/major)^2)
    extent        = A / A_aabb
    orientation [rad, 0..pi)                       (moment-ellipse angle)
    rectangularity = A / A_minrect
    inscribed_circumscribed_ratio = r_in / R_circ
    ellipticity   = A / (pi * a * b)               (semi-axes a, b)
    humoment1..7  = signed-log invariant moments

All are pure functions of the contour; identical input gives identical
output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry
from .geometry import BoundingBox, LesionContour, OrientedRect
from .moments import MomentSet, moment_ellipse, region_moments

FEATURE_NAMES: tuple[str, ...] = (
    "area",
    "perimeter",
    "circularity1",
    "circularity2",
    "roundness",
    "compactness",
    "convexity1",
    "convexity2",
    "convexity3",
    "convexity4",
    "concavity",
    "aspect_ratio",
    "elongation",
    "eccentricity",
    "extent",
    "orientation",
    "rectangularity",
    "inscribed_circumscribed_ratio",
    "ellipticity",
    "humoment1",
    "humoment2",
    "humoment3",
    "humoment4",
    "humoment5",
    "humoment6",
    "humoment7",
)

# carry physical units; everything else must be scale-invariant
DIMENSIONAL_FEATURES = frozenset({"area", "perimeter"})


@dataclass(frozen=True)
class ShapeFeatureVector:
    """The canonical 26 named morphometric values for one lesion."""

    values: dict[str, float]

    def __post_init__(self):
        missing = set(FEATURE_NAMES) - set(self.values)
        extra = set(self.values) - set(FEATURE_NAMES)
        if missing or extra:
            raise ValueError(f"feature roster mismatch: missing={sorted(missing)} extra={sorted(extra)}")
        bad = [k for k, v in self.values.items() if not math.isfinite(v)]
        if bad:
            raise ValueError(f"non-finite features: {bad}")

    def __getitem__(self, name: str) -> float:
        return self.values[name]

    def as_array(self) -> np.ndarray:
        return np.array([self.values[k] for k in FEATURE_NAMES])


def basic_geometry(contour: LesionContour) -> tuple[float, float, tuple[float, float]]:
    """(area, perimeter, centroid) of the contour region."""
    return contour.area, contour.perimeter, contour.centroid


def enclosing_shapes(
    contour: LesionContour,
) -> tuple[BoundingBox, OrientedRect, float, float]:
    """Axis-aligned box, min-area rectangle, inscribed and circumscribed radii."""
    aabb = geometry.axis_aligned_bbox(contour)
    rect = geometry.min_area_rect(contour)
    _, _, r_in = geometry.max_inscribed_circle(contour)
    _, _, r_circ = geometry.min_enclosing_circle(contour.vertices)
    return aabb, rect, r_in, r_circ


def hu_moments(contour: LesionContour) -> MomentSet:
    return region_moments(contour)


def max_defect_depth(contour: LesionContour, hull: LesionContour) -> float:
    """Deepest excursion of the contour inside its convex hull."""
    d = geometry.distance_to_boundary(contour.vertices, hull.vertices)
    return float(d.max())


def extract_features(contour: LesionContour) -> ShapeFeatureVector:
    area = contour.area
    perim = contour.perimeter

    hull = geometry.convex_hull(contour)
    hull_area = hull.area
    hull_perim = hull.perimeter

    major, minor, theta = moment_ellipse(contour)
    aabb, rect, r_in, r_circ = enclosing_shapes(contour)
    moments = region_moments(contour)
    hu_log = moments.hu_log_signed()

    d_eq = math.sqrt(4.0 * area / math.pi)

    values = {
        "area": area,
        "perimeter": perim,
        "circularity1": 4.0 * math.pi * area / perim**2,
        "circularity2": area / (math.pi * r_circ**2),
        "roundness": 4.0 * area / (math.pi * (2.0 * major) ** 2),
        "compactness": perim**2 / (4.0 * math.pi * area),
        "convexity1": hull_perim / perim,
        "convexity2": area / hull_area,
        "convexity3": max_defect_depth(contour, hull) / d_eq,
        "convexity4": (hull_area - area) / (hull_perim * d_eq),
        "concavity": (hull_area - area) / hull_area,
        "aspect_ratio": major / minor,
        "elongation": 1.0 - minor / major,
        "eccentricity": math.sqrt(max(1.0 - (minor / major) ** 2, 0.0)),
        "extent": area / aabb.area,
        "orientation": theta,
        "rectangularity": area / rect.area,
        "inscribed_circumscribed_ratio": r_in / r_circ,
        "ellipticity": area / (math.pi * major * minor),
        "humoment1": hu_log[0],
        "humoment2": hu_log[1],
        "humoment3": hu_log[2],
        "humoment4": hu_log[3],
        "humoment5": hu_log[4],
        "humoment6": hu_log[5],
        "humoment7": hu_log[6],
    }
    return ShapeFeatureVector(values)
