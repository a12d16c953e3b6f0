"""Region moments of a filled polygon by exact boundary integration.

Raw moments m_pq (p+q <= 3) come from closed-form Green's-theorem sums
over the polygon edges, so they are exact for the polygon itself rather
than approximations over sampled boundary points. Central, normalized
and the seven rotation/scale/translation-invariant combinations follow
the usual image-moment algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRegion
from .geometry import LesionContour

LOG_EPSILON = 1e-300


@dataclass(frozen=True)
class MomentSet:
    raw: dict[str, float]          # m00..m03 about the origin
    central: dict[str, float]      # mu20..mu03 about the centroid
    normalized: dict[str, float]   # eta_pq = mu_pq / m00^(1+(p+q)/2)
    hu: tuple[float, float, float, float, float, float, float]

    @property
    def centroid(self) -> tuple[float, float]:
        m = self.raw
        return m["m10"] / m["m00"], m["m01"] / m["m00"]

    def hu_log_signed(self) -> tuple[float, ...]:
        """Signed-log transform s_i = -sign(h_i) * log10(|h_i| + eps)."""
        out = []
        for h in self.hu:
            s = math.copysign(1.0, h) if h != 0 else 0.0
            out.append(-s * math.log10(abs(h) + LOG_EPSILON))
        return tuple(out)


def polygon_raw_moments(vertices: np.ndarray) -> dict[str, float]:
    """Raw region moments m_pq, p+q <= 3, for a CCW simple polygon."""
    x = vertices[:, 0]
    y = vertices[:, 1]
    xn = np.roll(x, -1)
    yn = np.roll(y, -1)
    c = x * yn - xn * y

    m00 = np.sum(c) / 2.0
    m10 = np.sum(c * (x + xn)) / 6.0
    m01 = np.sum(c * (y + yn)) / 6.0
    m20 = np.sum(c * (x * x + x * xn + xn * xn)) / 12.0
    m02 = np.sum(c * (y * y + y * yn + yn * yn)) / 12.0
    m11 = np.sum(c * (2.0 * x * y + x * yn + xn * y + 2.0 * xn * yn)) / 24.0
    m30 = np.sum(c * (x + xn) * (x * x + xn * xn)) / 20.0
    m03 = np.sum(c * (y + yn) * (y * y + yn * yn)) / 20.0
    m21 = np.sum(c * (3.0 * x * x * y + 2.0 * x * xn * y + xn * xn * y
                      + x * x * yn + 2.0 * x * xn * yn + 3.0 * xn * xn * yn)) / 60.0
    m12 = np.sum(c * (3.0 * y * y * x + 2.0 * y * yn * x + yn * yn * x
                      + y * y * xn + 2.0 * y * yn * xn + 3.0 * yn * yn * xn)) / 60.0
    return {
        "m00": float(m00), "m10": float(m10), "m01": float(m01),
        "m20": float(m20), "m11": float(m11), "m02": float(m02),
        "m30": float(m30), "m21": float(m21), "m12": float(m12), "m03": float(m03),
    }


def central_from_raw(m: dict[str, float]) -> dict[str, float]:
    m00 = m["m00"]
    cx = m["m10"] / m00
    cy = m["m01"] / m00
    mu20 = m["m20"] - cx * m["m10"]
    mu02 = m["m02"] - cy * m["m01"]
    mu11 = m["m11"] - cx * m["m01"]
    mu30 = m["m30"] - 3.0 * cx * m["m20"] + 2.0 * cx * cx * m["m10"]
    mu03 = m["m03"] - 3.0 * cy * m["m02"] + 2.0 * cy * cy * m["m01"]
    mu21 = m["m21"] - 2.0 * cx * m["m11"] - cy * m["m20"] + 2.0 * cx * cx * m["m01"]
    mu12 = m["m12"] - 2.0 * cy * m["m11"] - cx * m["m02"] + 2.0 * cy * cy * m["m10"]
    return {
        "mu20": mu20, "mu11": mu11, "mu02": mu02,
        "mu30": mu30, "mu21": mu21, "mu12": mu12, "mu03": mu03,
    }


def hu_invariants(eta: dict[str, float]) -> tuple[float, ...]:
    e20, e11, e02 = eta["eta20"], eta["eta11"], eta["eta02"]
    e30, e21, e12, e03 = eta["eta30"], eta["eta21"], eta["eta12"], eta["eta03"]
    h1 = e20 + e02
    h2 = (e20 - e02) ** 2 + 4.0 * e11 ** 2
    h3 = (e30 - 3.0 * e12) ** 2 + (3.0 * e21 - e03) ** 2
    h4 = (e30 + e12) ** 2 + (e21 + e03) ** 2
    h5 = (e30 - 3.0 * e12) * (e30 + e12) * ((e30 + e12) ** 2 - 3.0 * (e21 + e03) ** 2) \
        + (3.0 * e21 - e03) * (e21 + e03) * (3.0 * (e30 + e12) ** 2 - (e21 + e03) ** 2)
    h6 = (e20 - e02) * ((e30 + e12) ** 2 - (e21 + e03) ** 2) \
        + 4.0 * e11 * (e30 + e12) * (e21 + e03)
    h7 = (3.0 * e21 - e03) * (e30 + e12) * ((e30 + e12) ** 2 - 3.0 * (e21 + e03) ** 2) \
        - (e30 - 3.0 * e12) * (e21 + e03) * (3.0 * (e30 + e12) ** 2 - (e21 + e03) ** 2)
    return (h1, h2, h3, h4, h5, h6, h7)


def region_moments(contour: LesionContour) -> MomentSet:
    """Full moment set of the filled contour region."""
    raw = polygon_raw_moments(contour.vertices)
    m00 = raw["m00"]
    if m00 <= 0:
        raise DegenerateRegion("region area must be positive for moments")
    mu = central_from_raw(raw)
    eta = {}
    for key, val in mu.items():
        p, q = int(key[2]), int(key[3])
        eta["eta" + key[2:]] = val / m00 ** (1.0 + (p + q) / 2.0)
    eta["eta00"] = 1.0
    return MomentSet(raw=raw, central=mu, normalized=eta, hu=hu_invariants(eta))


def moment_ellipse(contour: LesionContour) -> tuple[float, float, float]:
    """Semi-axes (major, minor) and orientation of the equal-moments ellipse.

    The returned angle lies in [0, pi). Raises DegenerateRegion when the
    second-moment matrix is not positive definite (needle-like region).
    """
    ms = region_moments(contour)
    m00 = ms.raw["m00"]
    vxx = ms.central["mu20"] / m00
    vyy = ms.central["mu02"] / m00
    vxy = ms.central["mu11"] / m00
    common = math.sqrt(max((vxx - vyy) ** 2 / 4.0 + vxy ** 2, 0.0))
    lam1 = (vxx + vyy) / 2.0 + common
    lam2 = (vxx + vyy) / 2.0 - common
    if lam2 <= 0:
        raise DegenerateRegion("second-moment matrix is singular")
    major = 2.0 * math.sqrt(lam1)
    minor = 2.0 * math.sqrt(lam2)
    theta = 0.5 * math.atan2(2.0 * vxy, vxx - vyy)
    if theta < 0:
        theta += math.pi
    if theta >= math.pi:
        theta -= math.pi
    return major, minor, theta
