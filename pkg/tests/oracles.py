"""Independent point-sampling oracles for the geometry tests.

These deliberately reimplement membership tests from scratch (no calls into
kinder.geom2d's collision internals) so they can serve as a second opinion.
"""

from __future__ import annotations

import math

import numpy as np

from kinder.geom2d import Circle, Compound, PlacedShape, Pose2, Rect


def _world_parts(ps: PlacedShape):
    if isinstance(ps.shape, Compound):
        return [(shape, ps.pose.compose(local)) for shape, local in ps.shape.parts]
    return [(ps.shape, ps.pose)]


def _point_in_part(shape, pose: Pose2, xs, ys, erosion: float):
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    dx = xs - pose.x
    dy = ys - pose.y
    lx = c * dx + s * dy
    ly = -s * dx + c * dy
    if isinstance(shape, Circle):
        r = shape.radius - erosion
        if r <= 0:
            return np.zeros_like(lx, dtype=bool)
        return lx * lx + ly * ly < r * r
    hw = shape.half_w - erosion
    hh = shape.half_h - erosion
    if hw <= 0 or hh <= 0:
        return np.zeros_like(lx, dtype=bool)
    return (np.abs(lx) < hw) & (np.abs(ly) < hh)


def points_in(ps: PlacedShape, xs, ys, erosion: float = 0.0):
    """Open membership of points in the erosion-shrunk shape."""
    mask = np.zeros_like(np.asarray(xs, dtype=float), dtype=bool)
    for shape, pose in _world_parts(ps):
        mask |= _point_in_part(shape, pose, xs, ys, erosion)
    return mask


def sample_aabb(ps: PlacedShape) -> tuple[float, float, float, float]:
    xmin = ymin = math.inf
    xmax = ymax = -math.inf
    for shape, pose in _world_parts(ps):
        if isinstance(shape, Circle):
            r = shape.radius
            cx, cy = pose.x, pose.y
            xmin, xmax = min(xmin, cx - r), max(xmax, cx + r)
            ymin, ymax = min(ymin, cy - r), max(ymax, cy + r)
        else:
            for sx, sy in ((1, 1), (1, -1), (-1, -1), (-1, 1)):
                px, py = pose.apply(sx * shape.half_w, sy * shape.half_h)
                xmin, xmax = min(xmin, px), max(xmax, px)
                ymin, ymax = min(ymin, py), max(ymax, py)
    return xmin, ymin, xmax, ymax


def grid_over(box: tuple[float, float, float, float], pitch: float):
    xmin, ymin, xmax, ymax = box
    nx = max(2, int(math.ceil((xmax - xmin) / pitch)) + 1)
    ny = max(2, int(math.ceil((ymax - ymin) / pitch)) + 1)
    xs = np.linspace(xmin, xmax, nx)
    ys = np.linspace(ymin, ymax, ny)
    gx, gy = np.meshgrid(xs, ys)
    return gx.ravel(), gy.ravel()


def collides_oracle(a: PlacedShape, b: PlacedShape, pitch: float, erosion: float = 0.0) -> bool:
    """Dense-grid overlap test of the erosion-shrunk shapes."""
    ax0, ay0, ax1, ay1 = sample_aabb(a)
    bx0, by0, bx1, by1 = sample_aabb(b)
    pad = max(0.0, -erosion)
    x0, x1 = max(ax0, bx0) - pad, min(ax1, bx1) + pad
    y0, y1 = max(ay0, by0) - pad, min(ay1, by1) + pad
    if x0 >= x1 or y0 >= y1:
        return False
    nx = max(2, int(math.ceil((x1 - x0) / pitch)) + 1)
    ny = max(2, int(math.ceil((y1 - y0) / pitch)) + 1)
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    # Row-chunked scan with early exit on the first common point.
    for start in range(0, ny, 64):
        gx, gy = np.meshgrid(xs, ys[start : start + 64])
        gx, gy = gx.ravel(), gy.ravel()
        if np.any(points_in(a, gx, gy, erosion) & points_in(b, gx, gy, erosion)):
            return True
    return False


def contains_oracle(outer: PlacedShape, inner: PlacedShape, pitch: float, slack: float = 0.0) -> bool:
    """Every sampled inner point must be inside the slack-dilated outer."""
    xs, ys = grid_over(sample_aabb(inner), pitch)
    inner_mask = points_in(inner, xs, ys, 0.0)
    if not np.any(inner_mask):
        return True
    outer_mask = points_in(outer, xs[inner_mask], ys[inner_mask], -slack)
    return bool(np.all(outer_mask))


def near_boundary_collides(a: PlacedShape, b: PlacedShape, pitch: float, band: float) -> bool:
    """Whether the collides answer flips within the +/-band erosion range."""
    return collides_oracle(a, b, pitch, -band) != collides_oracle(a, b, pitch, band)
