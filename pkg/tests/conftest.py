import math

import numpy as np
import pytest

from lesionkit.geometry import LesionContour


def regular_polygon(n: int, radius: float = 1.0, center=(0.0, 0.0)) -> LesionContour:
    ang = 2.0 * math.pi * np.arange(n) / n
    pts = np.column_stack([
        center[0] + radius * np.cos(ang),
        center[1] + radius * np.sin(ang),
    ])
    return LesionContour(pts)


def unit_square() -> LesionContour:
    return LesionContour(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))


def star_polygon(n_tips: int = 5, r_outer: float = 2.0, r_inner: float = 0.8) -> LesionContour:
    ang = math.pi * np.arange(2 * n_tips) / n_tips
    radii = np.where(np.arange(2 * n_tips) % 2 == 0, r_outer, r_inner)
    pts = np.column_stack([radii * np.cos(ang), radii * np.sin(ang)])
    return LesionContour(pts)


def random_blob(rng: np.random.Generator, n_vertices: int = 180, center=(0.0, 0.0)) -> LesionContour:
    """Smooth star-shaped blob: radius modulated by a few low harmonics."""
    theta = 2.0 * math.pi * np.arange(n_vertices) / n_vertices
    r = np.ones_like(theta)
    for k in range(2, 7):
        amp = rng.uniform(0.0, 0.12)
        phase = rng.uniform(0.0, 2.0 * math.pi)
        r += amp * np.cos(k * theta + phase)
    scale = rng.uniform(0.6, 2.5)
    pts = np.column_stack([
        center[0] + scale * r * np.cos(theta),
        center[1] + scale * r * np.sin(theta),
    ])
    return LesionContour(pts)


def l_hexomino() -> LesionContour:
    return LesionContour(np.array(
        [[0.0, 0.0], [3.0, 0.0], [3.0, 1.0], [1.0, 1.0], [1.0, 4.0], [0.0, 4.0]]
    ))


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
