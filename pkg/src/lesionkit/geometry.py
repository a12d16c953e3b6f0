"""Planar polygon primitives for lesion contours.

Contours are closed simple polygons in physical units (millimetres),
normalized to counter-clockwise orientation. Masks are boolean rasters
with per-cell spacing; their traced boundary follows the pixel edges, so
a fully-foreground w x h mask yields a rectangle of area w*h*dx*dy.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage, optimize

from .errors import DegenerateRegion, EmptyMask, InvalidContour

AREA_TOLERANCE_MM2 = 1e-9


def signed_area(vertices: np.ndarray) -> float:
    """Shoelace signed area; positive for counter-clockwise order."""
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def perimeter(vertices: np.ndarray) -> float:
    d = np.roll(vertices, -1, axis=0) - vertices
    return float(np.sum(np.hypot(d[:, 0], d[:, 1])))


def polygon_centroid(vertices: np.ndarray) -> tuple[float, float]:
    """Area-weighted centroid of the filled polygon."""
    x, y = vertices[:, 0], vertices[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    a = 0.5 * float(np.sum(cross))
    cx = float(np.sum((x + xn) * cross)) / (6.0 * a)
    cy = float(np.sum((y + yn) * cross)) / (6.0 * a)
    return cx, cy


def _segments_cross(p1, p2, q1, q2) -> np.ndarray:
    """Vectorized proper-or-touching intersection test for segment batches."""
    def orient(a, b, c):
        return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (
            b[..., 1] - a[..., 1]
        ) * (c[..., 0] - a[..., 0])

    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    proper = ((d1 > 0) != (d2 > 0)) & ((d3 > 0) != (d4 > 0)) & (d1 != 0) & (d2 != 0) & (d3 != 0) & (d4 != 0)

    def on_seg(a, b, c, d):
        # collinear point c on segment (a, b)
        return (
            (d == 0)
            & (np.minimum(a[..., 0], b[..., 0]) <= c[..., 0])
            & (c[..., 0] <= np.maximum(a[..., 0], b[..., 0]))
            & (np.minimum(a[..., 1], b[..., 1]) <= c[..., 1])
            & (c[..., 1] <= np.maximum(a[..., 1], b[..., 1]))
        )

    touch = (
        on_seg(q1, q2, p1, d1)
        | on_seg(q1, q2, p2, d2)
        | on_seg(p1, p2, q1, d3)
        | on_seg(p1, p2, q2, d4)
    )
    return proper | touch


def _check_simple(vertices: np.ndarray) -> None:
    n = len(vertices)
    a = vertices
    b = np.roll(vertices, -1, axis=0)
    for i in range(n - 2):
        # skip adjacent edges (share an endpoint by construction)
        j0 = i + 2
        j1 = n - 1 if i == 0 else n
        if j0 >= j1:
            continue
        js = np.arange(j0, j1)
        hits = _segments_cross(a[i], b[i], a[js], b[js])
        if hits.any():
            j = int(js[np.argmax(hits)])
            raise InvalidContour(f"self-intersection between edges {i} and {j}")


@dataclass(frozen=True, eq=False)
class LesionContour:
    """Closed simple polygon (implicit closure last->first), CCW, in mm."""

    vertices: np.ndarray
    _validated: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise InvalidContour("contour needs at least 3 planar vertices")
        if not np.all(np.isfinite(v)):
            raise InvalidContour("contour has non-finite coordinates")
        # drop an explicitly repeated closing vertex
        if np.array_equal(v[0], v[-1]):
            v = v[:-1]
        if len(v) < 3:
            raise InvalidContour("contour needs at least 3 distinct vertices")
        if np.any(np.all(v == np.roll(v, -1, axis=0), axis=1)):
            raise InvalidContour("zero-length edge (repeated consecutive vertex)")
        a = signed_area(v)
        if abs(a) < AREA_TOLERANCE_MM2:
            raise DegenerateRegion(f"polygon area {abs(a):.3e} mm^2 below tolerance")
        if a < 0:
            v = v[::-1].copy()
        if not self._validated:
            _check_simple(v)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "_validated", True)

    @property
    def area(self) -> float:
        return signed_area(self.vertices)

    @property
    def perimeter(self) -> float:
        return perimeter(self.vertices)

    @property
    def centroid(self) -> tuple[float, float]:
        return polygon_centroid(self.vertices)

    def translated(self, dx: float, dy: float) -> "LesionContour":
        return LesionContour(self.vertices + np.array([dx, dy]), _validated=True)

    def rotated(self, angle: float) -> "LesionContour":
        c, s = math.cos(angle), math.sin(angle)
        rot = np.array([[c, -s], [s, c]])
        return LesionContour(self.vertices @ rot.T, _validated=True)

    def scaled(self, factor: float) -> "LesionContour":
        if factor <= 0:
            raise InvalidContour("scale factor must be positive")
        return LesionContour(self.vertices * factor, _validated=True)


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """Boolean raster with physical cell spacing (dx, dy) in mm."""

    grid: np.ndarray
    spacing: tuple[float, float] = (1.0, 1.0)

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=bool)
        if g.ndim != 2:
            raise EmptyMask("mask grid must be 2-D")
        if not g.any():
            raise EmptyMask("mask has no foreground cells")
        dx, dy = self.spacing
        if dx <= 0 or dy <= 0:
            raise EmptyMask("mask spacing must be positive")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "spacing", (float(dx), float(dy)))


@dataclass(frozen=True)
class BoundingBox:
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True, eq=False)
class OrientedRect:
    corners: np.ndarray
    width: float
    height: float
    angle: float

    @property
    def area(self) -> float:
        return self.width * self.height


def axis_aligned_bbox(contour: LesionContour) -> BoundingBox:
    v = contour.vertices
    return BoundingBox(
        float(v[:, 0].min()), float(v[:, 1].min()),
        float(v[:, 0].max()), float(v[:, 1].max()),
    )


def convex_hull(contour: LesionContour) -> LesionContour:
    """Convex hull by monotone chain; collinear boundary points dropped."""
    pts = np.unique(contour.vertices, axis=0)
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = [tuple(p) for p in pts[order]]

    def build(points):
        chain = []
        for p in points:
            while len(chain) >= 2:
                ox, oy = chain[-2]
                ax, ay = chain[-1]
                if (ax - ox) * (p[1] - oy) - (ay - oy) * (p[0] - ox) <= 0:
                    chain.pop()
                else:
                    break
            chain.append(p)
        return chain

    lower = build(pts)
    upper = build(pts[::-1])
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateRegion("hull is degenerate (collinear vertices)")
    return LesionContour(np.array(hull), _validated=True)


def min_area_rect(contour: LesionContour) -> OrientedRect:
    """Minimum-area enclosing rectangle via rotating calipers on hull edges."""
    hull = convex_hull(contour).vertices
    edges = np.roll(hull, -1, axis=0) - hull
    angles = np.arctan2(edges[:, 1], edges[:, 0])
    best = None
    for ang in angles:
        c, s = math.cos(ang), math.sin(ang)
        rot = np.array([[c, s], [-s, c]])  # rotate by -ang
        proj = hull @ rot.T
        lo = proj.min(axis=0)
        hi = proj.max(axis=0)
        w, h = float(hi[0] - lo[0]), float(hi[1] - lo[1])
        area = w * h
        if best is None or area < best[0]:
            best = (area, ang, lo, hi, rot)
    _, ang, lo, hi, rot = best
    local = np.array(
        [[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]]
    )
    corners = local @ rot  # inverse rotation (rot is orthonormal)
    return OrientedRect(
        corners=corners,
        width=float(hi[0] - lo[0]),
        height=float(hi[1] - lo[1]),
        angle=float(ang % math.pi),
    )


def _circle_two(p, q):
    cx, cy = (p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0
    r = math.hypot(p[0] - cx, p[1] - cy)
    return cx, cy, r


def _circle_three(p, q, r):
    ax, ay = p
    bx, by = q
    cx, cy = r
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if abs(d) < 1e-14 * max(abs(ax), abs(bx), abs(cx), 1.0) ** 2:
        # collinear: fall back to the widest pair
        pairs = [(p, q), (p, r), (q, r)]
        best = max(pairs, key=lambda t: (t[0][0] - t[1][0]) ** 2 + (t[0][1] - t[1][1]) ** 2)
        return _circle_two(*best)
    ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) + (cx * cx + cy * cy) * (ay - by)) / d
    uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) + (cx * cx + cy * cy) * (bx - ax)) / d
    return ux, uy, math.hypot(ax - ux, ay - uy)


def min_enclosing_circle(points: np.ndarray) -> tuple[float, float, float]:
    """Smallest circle covering all points (Welzl, deterministic shuffle)."""
    pts = [tuple(p) for p in np.asarray(points, dtype=float)]
    random.Random(0x5EED).shuffle(pts)
    scale = max(max(abs(x), abs(y)) for x, y in pts) or 1.0
    eps = 1e-12 * scale

    def covers(circle, p):
        cx, cy, r = circle
        return math.hypot(p[0] - cx, p[1] - cy) <= r + eps

    circle = (pts[0][0], pts[0][1], 0.0)
    for i, p in enumerate(pts):
        if covers(circle, p):
            continue
        circle = (p[0], p[1], 0.0)
        for j in range(i):
            q = pts[j]
            if covers(circle, q):
                continue
            circle = _circle_two(p, q)
            for k in range(j):
                s = pts[k]
                if not covers(circle, s):
                    circle = _circle_three(p, q, s)
    return circle


def points_in_polygon(points: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    """Crossing-number inside test for a batch of points."""
    px = points[:, 0][:, None]
    py = points[:, 1][:, None]
    x1, y1 = vertices[:, 0][None, :], vertices[:, 1][None, :]
    nxt = np.roll(vertices, -1, axis=0)
    x2, y2 = nxt[:, 0][None, :], nxt[:, 1][None, :]
    straddles = (y1 > py) != (y2 > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_at = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
    crossings = straddles & (px < x_at)
    return np.sum(crossings, axis=1) % 2 == 1


def distance_to_boundary(points: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    """Unsigned distance from each point to the polygon boundary."""
    a = vertices[None, :, :]
    b = np.roll(vertices, -1, axis=0)[None, :, :]
    p = points[:, None, :]
    ab = b - a
    denom = np.sum(ab * ab, axis=2)
    t = np.clip(np.sum((p - a) * ab, axis=2) / np.where(denom == 0, 1.0, denom), 0.0, 1.0)
    proj = a + t[..., None] * ab
    d = np.hypot(p[..., 0] - proj[..., 0], p[..., 1] - proj[..., 1])
    return d.min(axis=1)


def max_inscribed_circle(contour: LesionContour) -> tuple[float, float, float]:
    """Largest circle inside the polygon: coarse grid then simplex refinement.

    Grid step is min(bbox)/64; refinement tolerances are made proportional
    to the bbox diagonal so results scale exactly with the input.
    """
    v = contour.vertices
    bb = axis_aligned_bbox(contour)
    step = min(bb.width, bb.height) / 64.0
    xs = np.arange(bb.xmin + step / 2.0, bb.xmax, step)
    ys = np.arange(bb.ymin + step / 2.0, bb.ymax, step)
    gx, gy = np.meshgrid(xs, ys)
    grid = np.column_stack([gx.ravel(), gy.ravel()])
    inside = points_in_polygon(grid, v)
    if not inside.any():
        # extremely thin region: fall back to centroid neighbourhood
        cx, cy = contour.centroid
        grid = np.array([[cx, cy]])
        inside = np.array([True])
    cand = grid[inside]
    d = distance_to_boundary(cand, v)
    x0 = cand[int(np.argmax(d))]

    diag = math.hypot(bb.width, bb.height)

    # precomputed edge geometry for the many single-point refinement calls
    a = v
    ab = np.roll(v, -1, axis=0) - v
    denom = np.maximum(np.sum(ab * ab, axis=1), 1e-300)
    x1, y1 = v[:, 0], v[:, 1]
    nxt = np.roll(v, -1, axis=0)
    x2, y2 = nxt[:, 0], nxt[:, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = (x2 - x1) / np.where(y2 == y1, 1.0, y2 - y1)

    def neg_signed(p):
        px, py = p
        t = np.clip(((px - a[:, 0]) * ab[:, 0] + (py - a[:, 1]) * ab[:, 1]) / denom, 0.0, 1.0)
        dx = px - (a[:, 0] + t * ab[:, 0])
        dy = py - (a[:, 1] + t * ab[:, 1])
        dist = math.sqrt(float(np.min(dx * dx + dy * dy)))
        straddles = (y1 > py) != (y2 > py)
        crossings = int(np.sum(straddles & (px < x1 + (py - y1) * slope)))
        return -dist if crossings % 2 == 1 else dist

    h = step / 2.0
    simplex = np.array([x0, x0 + [h, 0.0], x0 + [0.0, h]])
    res = optimize.minimize(
        neg_signed,
        x0,
        method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "xatol": 1e-7 * diag,
            "fatol": 1e-9 * diag,
            "maxiter": 400,
        },
    )
    if -res.fun <= 0:
        return float(x0[0]), float(x0[1]), float(d.max())
    return float(res.x[0]), float(res.x[1]), float(-res.fun)


def _trace_crack_loops(comp: np.ndarray) -> list[np.ndarray]:
    """Directed pixel-edge loops around a foreground component.

    Edges keep foreground on the left (lattice coords x=col, y=row); at
    pinch corners the most-clockwise turn is taken so each loop stays
    simple. Outer boundaries come back with positive signed area.
    """
    rows, cols = comp.shape
    padded = np.zeros((rows + 2, cols + 2), dtype=bool)
    padded[1:-1, 1:-1] = comp
    fg = padded[1:-1, 1:-1]
    up = padded[:-2, 1:-1]
    down = padded[2:, 1:-1]
    left = padded[1:-1, :-2]
    right = padded[1:-1, 2:]

    edges: dict[tuple[int, int], list[tuple[int, int]]] = {}

    def add(a, b):
        edges.setdefault(a, []).append(b)

    rr, cc = np.nonzero(fg & ~up)
    for r, c in zip(rr.tolist(), cc.tolist()):
        add((c, r), (c + 1, r))
    rr, cc = np.nonzero(fg & ~down)
    for r, c in zip(rr.tolist(), cc.tolist()):
        add((c + 1, r + 1), (c, r + 1))
    rr, cc = np.nonzero(fg & ~left)
    for r, c in zip(rr.tolist(), cc.tolist()):
        add((c, r + 1), (c, r))
    rr, cc = np.nonzero(fg & ~right)
    for r, c in zip(rr.tolist(), cc.tolist()):
        add((c + 1, r), (c + 1, r + 1))

    def turn_key(din, dout):
        # left (counter-clockwise) turns hug the interior, keeping each
        # loop simple when two pixels touch only at a corner
        return din[0] * dout[1] - din[1] * dout[0]

    loops = []
    while edges:
        start = next(iter(edges))
        path = [start]
        prev_dir = None
        cur = start
        while True:
            outs = edges[cur]
            if len(outs) == 1 or prev_dir is None:
                nxt = outs[0]
            else:
                nxt = max(
                    outs,
                    key=lambda cand: turn_key(prev_dir, (cand[0] - cur[0], cand[1] - cur[1])),
                )
            outs.remove(nxt)
            if not outs:
                del edges[cur]
            prev_dir = (nxt[0] - cur[0], nxt[1] - cur[1])
            cur = nxt
            if cur == start:
                break
            path.append(cur)
        loops.append(np.array(path, dtype=float))
    return loops


def _simplify_collinear(vertices: np.ndarray) -> np.ndarray:
    d = np.roll(vertices, -1, axis=0) - vertices
    prev = np.roll(d, 1, axis=0)
    keep = prev[:, 0] * d[:, 1] - prev[:, 1] * d[:, 0] != 0
    return vertices[keep]


def contour_from_mask(mask: BinaryMask) -> LesionContour:
    """Boundary polygon of the largest 8-connected foreground component.

    Follows the outer pixel edges, so polygon area equals foreground cell
    count times cell area for hole-free components.
    """
    grid = mask.grid
    labels, n = ndimage.label(grid, structure=np.ones((3, 3), dtype=int))
    if n == 0:
        raise EmptyMask("mask has no foreground cells")
    sizes = ndimage.sum_labels(np.ones_like(grid, dtype=np.int64), labels, index=range(1, n + 1))
    comp = labels == (int(np.argmax(sizes)) + 1)

    dx, dy = mask.spacing
    loops = _trace_crack_loops(comp)
    scaled = [loop * np.array([dx, dy]) for loop in loops]
    areas = [signed_area(loop) for loop in scaled]
    best = scaled[int(np.argmax(areas))]
    if max(areas) < AREA_TOLERANCE_MM2:
        raise DegenerateRegion("traced component encloses no area")
    verts = _simplify_collinear(best)
    return LesionContour(verts, _validated=True)
