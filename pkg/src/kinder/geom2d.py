"""Exact 2D geometry: poses, convex shapes, collision, containment, MTV.

All shapes are convex primitives (circles and oriented rectangles) or
compounds, i.e. rigid unions of convex parts. Collision uses strict
penetration: touching shapes do not collide at tolerance zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.typing import NDArray

TWO_PI = 2.0 * math.pi

# Default erosion so that resting contact does not count as penetration.
DEFAULT_COLLISION_TOL = 1e-6


def wrap_angle(theta: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    r = math.remainder(theta, TWO_PI)
    if r <= -math.pi:
        r += TWO_PI
    return r


@dataclass(frozen=True)
class Pose2:
    """A planar rigid transform (x, y, theta) with theta in (-pi, pi]."""

    x: float
    y: float
    theta: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", wrap_angle(self.theta))

    @staticmethod
    def identity() -> Pose2:
        """The identity transform."""
        return Pose2(0.0, 0.0, 0.0)

    def compose(self, other: Pose2) -> Pose2:
        """Standard SE(2) composition self * other."""
        c, s = math.cos(self.theta), math.sin(self.theta)
        return Pose2(
            self.x + c * other.x - s * other.y,
            self.y + s * other.x + c * other.y,
            self.theta + other.theta,
        )

    def __mul__(self, other: Pose2) -> Pose2:
        return self.compose(other)

    def inverse(self) -> Pose2:
        """The inverse transform."""
        c, s = math.cos(self.theta), math.sin(self.theta)
        return Pose2(-c * self.x - s * self.y, s * self.x - c * self.y, -self.theta)

    def apply(self, px: float, py: float) -> tuple[float, float]:
        """Transform a point from the local frame to the parent frame."""
        c, s = math.cos(self.theta), math.sin(self.theta)
        return (self.x + c * px - s * py, self.y + s * px + c * py)


def transform(p: Pose2, q: Pose2) -> Pose2:
    """SE(2) composition with angle re-wrapping."""
    return p.compose(q)


@dataclass(frozen=True)
class Circle:
    """A circle of strictly positive radius, centered at its local origin."""

    radius: float


@dataclass(frozen=True)
class Rect:
    """An axis-aligned rectangle in its local frame, given by half extents."""

    half_w: float
    half_h: float


@dataclass(frozen=True)
class Compound:
    """A rigid union of convex parts, each with a local offset pose."""

    parts: tuple[tuple[Union[Circle, Rect], Pose2], ...]


Shape2 = Union[Circle, Rect, Compound]


@dataclass(frozen=True)
class PlacedShape:
    """A shape placed at a world-frame pose."""

    shape: Shape2
    pose: Pose2


ConvexPart = tuple[Union[Circle, Rect], Pose2]


def placed_parts(ps: PlacedShape) -> list[ConvexPart]:
    """Decompose a placed shape into convex parts with world poses."""
    if isinstance(ps.shape, Compound):
        return [(part, ps.pose.compose(local)) for part, local in ps.shape.parts]
    return [(ps.shape, ps.pose)]


def _rect_axes(pose: Pose2) -> tuple[tuple[float, float], tuple[float, float]]:
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    return (c, s), (-s, c)


def _circle_circle_overlap(
    c1: Circle, p1: Pose2, c2: Circle, p2: Pose2, erosion: float
) -> bool:
    r1 = c1.radius - erosion
    r2 = c2.radius - erosion
    if r1 <= 0.0 or r2 <= 0.0:
        return False
    dx, dy = p2.x - p1.x, p2.y - p1.y
    return dx * dx + dy * dy < (r1 + r2) ** 2


def _circle_rect_overlap(
    c: Circle, pc: Pose2, r: Rect, pr: Pose2, erosion: float
) -> bool:
    rad = c.radius - erosion
    hw = r.half_w - erosion
    hh = r.half_h - erosion
    if rad <= 0.0 or hw <= 0.0 or hh <= 0.0:
        return False
    # Circle center in the rect's local frame.
    lx, ly = pr.inverse().apply(pc.x, pc.y)
    qx = min(max(lx, -hw), hw)
    qy = min(max(ly, -hh), hh)
    dx, dy = lx - qx, ly - qy
    return dx * dx + dy * dy < rad * rad


def _rect_rect_overlap(
    r1: Rect, p1: Pose2, r2: Rect, p2: Pose2, erosion: float
) -> bool:
    hw1, hh1 = r1.half_w - erosion, r1.half_h - erosion
    hw2, hh2 = r2.half_w - erosion, r2.half_h - erosion
    if min(hw1, hh1, hw2, hh2) <= 0.0:
        return False
    ux1, uy1 = _rect_axes(p1)
    ux2, uy2 = _rect_axes(p2)
    dx, dy = p2.x - p1.x, p2.y - p1.y
    # Separating-axis test over both rects' axes; strict overlap required.
    for ax, ay in (ux1, uy1, ux2, uy2):
        proj1 = hw1 * abs(ux1[0] * ax + ux1[1] * ay) + hh1 * abs(
            uy1[0] * ax + uy1[1] * ay
        )
        proj2 = hw2 * abs(ux2[0] * ax + ux2[1] * ay) + hh2 * abs(
            uy2[0] * ax + uy2[1] * ay
        )
        if abs(dx * ax + dy * ay) >= proj1 + proj2:
            return False
    return True


def _parts_overlap(a: ConvexPart, b: ConvexPart, erosion: float) -> bool:
    sa, pa = a
    sb, pb = b
    if isinstance(sa, Circle):
        if isinstance(sb, Circle):
            return _circle_circle_overlap(sa, pa, sb, pb, erosion)
        return _circle_rect_overlap(sa, pa, sb, pb, erosion)
    if isinstance(sb, Circle):
        return _circle_rect_overlap(sb, pb, sa, pa, erosion)
    return _rect_rect_overlap(sa, pa, sb, pb, erosion)


def collides(a: PlacedShape, b: PlacedShape, tol: float = 0.0) -> bool:
    """Whether the tol-eroded shapes strictly overlap.

    Positive tol shrinks both shapes, so touching within tol is not a
    collision. Negative tol dilates instead, detecting near-contact.
    """
    parts_a = placed_parts(a)
    parts_b = placed_parts(b)
    for pa in parts_a:
        for pb in parts_b:
            if _parts_overlap(pa, pb, tol):
                return True
    return False


_CONTAIN_EPS = 1e-9


def _rect_corners(r: Rect, pose: Pose2) -> list[tuple[float, float]]:
    return [
        pose.apply(sx * r.half_w, sy * r.half_h)
        for sx, sy in ((1, 1), (1, -1), (-1, -1), (-1, 1))
    ]


def _part_in_circle(part: ConvexPart, c: Circle, pc: Pose2) -> bool:
    shape, pose = part
    if isinstance(shape, Circle):
        d = math.hypot(pose.x - pc.x, pose.y - pc.y)
        return d + shape.radius <= c.radius + _CONTAIN_EPS
    rad2 = (c.radius + _CONTAIN_EPS) ** 2
    for x, y in _rect_corners(shape, pose):
        if (x - pc.x) ** 2 + (y - pc.y) ** 2 > rad2:
            return False
    return True


def _part_in_rect(part: ConvexPart, r: Rect, pr: Pose2) -> bool:
    shape, pose = part
    inv = pr.inverse()
    if isinstance(shape, Circle):
        lx, ly = inv.apply(pose.x, pose.y)
        return (
            abs(lx) + shape.radius <= r.half_w + _CONTAIN_EPS
            and abs(ly) + shape.radius <= r.half_h + _CONTAIN_EPS
        )
    for x, y in _rect_corners(shape, pose):
        lx, ly = inv.apply(x, y)
        if abs(lx) > r.half_w + _CONTAIN_EPS or abs(ly) > r.half_h + _CONTAIN_EPS:
            return False
    return True


def _part_in_part(inner: ConvexPart, outer: ConvexPart) -> bool:
    shape, pose = outer
    if isinstance(shape, Circle):
        return _part_in_circle(inner, shape, pose)
    return _part_in_rect(inner, shape, pose)


def contains(outer: PlacedShape, inner: PlacedShape) -> bool:
    """Whether every point of inner lies within outer.

    For a compound outer, each inner part must fit inside a single outer
    part (conservative for unions).
    """
    outer_parts = placed_parts(outer)
    for ip in placed_parts(inner):
        if not any(_part_in_part(ip, op) for op in outer_parts):
            return False
    return True


def _circle_circle_mtv(
    c1: Circle, p1: Pose2, c2: Circle, p2: Pose2
) -> tuple[float, float]:
    dx, dy = p2.x - p1.x, p2.y - p1.y
    d = math.hypot(dx, dy)
    if d < 1e-12:
        return (c1.radius + c2.radius, 0.0)
    mag = c1.radius + c2.radius - d
    return (mag * dx / d, mag * dy / d)


def _circle_rect_mtv(
    c: Circle, pc: Pose2, r: Rect, pr: Pose2, move_rect: bool
) -> tuple[float, float]:
    """MTV moving the rect away from the circle (negated if move_rect is False)."""
    inv = pr.inverse()
    lx, ly = inv.apply(pc.x, pc.y)
    hw, hh = r.half_w, r.half_h
    if abs(lx) <= hw and abs(ly) <= hh:
        # Center inside: push out through the nearest face, plus the radius.
        depths = (
            (hw - lx + c.radius, (-1.0, 0.0)),
            (hw + lx + c.radius, (1.0, 0.0)),
            (hh - ly + c.radius, (0.0, -1.0)),
            (hh + ly + c.radius, (0.0, 1.0)),
        )
        depth, (nx, ny) = min(depths, key=lambda t: t[0])
    else:
        qx = min(max(lx, -hw), hw)
        qy = min(max(ly, -hh), hh)
        dx, dy = lx - qx, ly - qy
        d = math.hypot(dx, dy)
        depth = c.radius - d
        nx, ny = -dx / d, -dy / d
    c_, s_ = math.cos(pr.theta), math.sin(pr.theta)
    wx, wy = c_ * nx - s_ * ny, s_ * nx + c_ * ny
    if not move_rect:
        wx, wy = -wx, -wy
    return (depth * wx, depth * wy)


def _rect_rect_mtv(r1: Rect, p1: Pose2, r2: Rect, p2: Pose2) -> tuple[float, float]:
    ux1, uy1 = _rect_axes(p1)
    ux2, uy2 = _rect_axes(p2)
    dx, dy = p2.x - p1.x, p2.y - p1.y
    best: tuple[float, float, float] | None = None  # (depth, nx, ny)
    for ax, ay in (ux1, uy1, ux2, uy2):
        proj1 = r1.half_w * abs(ux1[0] * ax + ux1[1] * ay) + r1.half_h * abs(
            uy1[0] * ax + uy1[1] * ay
        )
        proj2 = r2.half_w * abs(ux2[0] * ax + ux2[1] * ay) + r2.half_h * abs(
            uy2[0] * ax + uy2[1] * ay
        )
        sep = dx * ax + dy * ay
        depth = proj1 + proj2 - abs(sep)
        nx, ny = (ax, ay) if sep >= 0.0 else (-ax, -ay)
        if best is None or depth < best[0]:
            best = (depth, nx, ny)
    assert best is not None
    depth, nx, ny = best
    return (depth * nx, depth * ny)


def _pair_mtv(a: ConvexPart, b: ConvexPart) -> tuple[float, float]:
    sa, pa = a
    sb, pb = b
    if isinstance(sa, Circle):
        if isinstance(sb, Circle):
            return _circle_circle_mtv(sa, pa, sb, pb)
        return _circle_rect_mtv(sa, pa, sb, pb, move_rect=True)
    if isinstance(sb, Circle):
        return _circle_rect_mtv(sb, pb, sa, pa, move_rect=False)
    return _rect_rect_mtv(sa, pa, sb, pb)


def _translated(ps: PlacedShape, tx: float, ty: float) -> PlacedShape:
    return PlacedShape(ps.shape, Pose2(ps.pose.x + tx, ps.pose.y + ty, ps.pose.theta))


def _mtv_key(vec: tuple[float, float]) -> tuple[float, float, float]:
    mag = math.hypot(vec[0], vec[1])
    ang = math.atan2(vec[1], vec[0])
    # Prefer small magnitude, then small angle to +x, then ccw over cw.
    return (mag, abs(ang), -ang)


def _directional_depth(
    a: PlacedShape, b: PlacedShape, dx: float, dy: float, hi: float
) -> float:
    """Smallest t such that translating b by t*(dx, dy) separates it from a."""
    if not collides(a, _translated(b, hi * dx, hi * dy), 0.0):
        # Find the last colliding sample to bracket the boundary, since the
        # colliding set along the ray need not be a single interval for
        # compounds.
        n = 64
        lo = 0.0
        for i in range(n, 0, -1):
            t = hi * i / n
            if collides(a, _translated(b, t * dx, t * dy), 0.0):
                lo = t
                break
        hi = lo + hi / n if lo > 0.0 else hi / n
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if collides(a, _translated(b, mid * dx, mid * dy), 0.0):
                lo = mid
            else:
                hi = mid
        return hi
    return math.inf


def min_translation(a: PlacedShape, b: PlacedShape) -> tuple[float, float] | None:
    """Minimum-norm translation of b that separates it from a.

    Returns None when the shapes are not colliding. Ties are broken by the
    smallest angle to the +x axis.
    """
    parts_a = placed_parts(a)
    parts_b = placed_parts(b)
    colliding = [
        (pa, pb)
        for pa in parts_a
        for pb in parts_b
        if _parts_overlap(pa, pb, 0.0)
    ]
    if not colliding:
        return None
    if len(parts_a) == 1 and len(parts_b) == 1:
        return _pair_mtv(parts_a[0], parts_b[0])
    # Compound: evaluate each colliding pair's MTV direction against the
    # whole shapes and keep the cheapest separating translation.
    pair_mtvs = [_pair_mtv(pa, pb) for pa, pb in colliding]
    ax0, ay0, ax1, ay1 = aabb(a)
    bx0, by0, bx1, by1 = aabb(b)
    # Any unit-direction translation of this size separates the AABBs.
    bound = math.sqrt(2.0) * (
        math.hypot(ax1 - ax0, ay1 - ay0) + math.hypot(bx1 - bx0, by1 - by0)
    )
    best: tuple[float, float] | None = None
    for vx, vy in pair_mtvs:
        norm = math.hypot(vx, vy)
        if norm < 1e-12:
            continue
        ux, uy = vx / norm, vy / norm
        t = _directional_depth(a, b, ux, uy, bound)
        if not math.isfinite(t):
            continue
        cand = (t * ux, t * uy)
        if best is None or _mtv_key(cand) < _mtv_key(best):
            best = cand
    return best


def aabb(ps: PlacedShape) -> tuple[float, float, float, float]:
    """World-frame axis-aligned bounding box (xmin, ymin, xmax, ymax)."""
    xmin = ymin = math.inf
    xmax = ymax = -math.inf
    for shape, pose in placed_parts(ps):
        if isinstance(shape, Circle):
            xs = (pose.x - shape.radius, pose.x + shape.radius)
            ys = (pose.y - shape.radius, pose.y + shape.radius)
        else:
            corners = _rect_corners(shape, pose)
            xs = tuple(c[0] for c in corners)
            ys = tuple(c[1] for c in corners)
        xmin, xmax = min(xmin, *xs), max(xmax, *xs)
        ymin, ymax = min(ymin, *ys), max(ymax, *ys)
    return (xmin, ymin, xmax, ymax)


def mask_points(
    ps: PlacedShape, xs: NDArray[np.float64], ys: NDArray[np.float64]
) -> NDArray[np.bool_]:
    """Vectorized closed membership test for arrays of world points."""
    mask = np.zeros(xs.shape, dtype=bool)
    for shape, pose in placed_parts(ps):
        c, s = math.cos(pose.theta), math.sin(pose.theta)
        dx = xs - pose.x
        dy = ys - pose.y
        lx = c * dx + s * dy
        ly = -s * dx + c * dy
        if isinstance(shape, Circle):
            mask |= lx * lx + ly * ly <= shape.radius**2
        else:
            mask |= (np.abs(lx) <= shape.half_w) & (np.abs(ly) <= shape.half_h)
    return mask


def perimeter_point(ps: PlacedShape, s: float) -> tuple[float, float, float, float]:
    """World point and outward normal at perimeter fraction s in [0, 1).

    Compound perimeters concatenate part perimeters weighted by length.
    Returns (x, y, nx, ny).
    """
    s = s - math.floor(s)
    parts = placed_parts(ps)
    lengths = []
    for shape, _ in parts:
        if isinstance(shape, Circle):
            lengths.append(TWO_PI * shape.radius)
        else:
            lengths.append(4.0 * (shape.half_w + shape.half_h))
    total = sum(lengths)
    target = s * total
    for (shape, pose), length in zip(parts, lengths):
        if target > length:
            target -= length
            continue
        if isinstance(shape, Circle):
            ang = target / shape.radius
            nx, ny = math.cos(ang), math.sin(ang)
            px, py = shape.radius * nx, shape.radius * ny
        else:
            px, py, nx, ny = _rect_perimeter(shape, target)
        wx, wy = pose.apply(px, py)
        c, s_ = math.cos(pose.theta), math.sin(pose.theta)
        return (wx, wy, c * nx - s_ * ny, s_ * nx + c * ny)
    # s == 1.0 boundary; start over at 0.
    return perimeter_point(ps, 0.0)


def _rect_perimeter(r: Rect, d: float) -> tuple[float, float, float, float]:
    w, h = 2.0 * r.half_w, 2.0 * r.half_h
    # Walk ccw from the bottom-right corner along +y.
    if d <= h:
        return (r.half_w, d - r.half_h, 1.0, 0.0)
    d -= h
    if d <= w:
        return (r.half_w - d, r.half_h, 0.0, 1.0)
    d -= w
    if d <= h:
        return (-r.half_w, r.half_h - d, -1.0, 0.0)
    d -= h
    return (-r.half_w + min(d, w), -r.half_h, 0.0, -1.0)
