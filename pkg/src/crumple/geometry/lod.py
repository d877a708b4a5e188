"""Level-of-detail reduction of a convex hull to a control-point budget."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import DimensionalityError, InvalidTargetError
from .hull import convex_hull
from .mass import hull_edges

log = logging.getLogger(__name__)

MIN_POINTS = 4


@dataclass
class SimplifiedHull:
    points: np.ndarray
    triangles: np.ndarray
    requested: int
    source_indices: np.ndarray  # rows of the input points that survived

    @property
    def achieved(self):
        return len(self.points)

    @property
    def n_triangles(self):
        return len(self.triangles)


def _removal_costs(points, triangles):
    """Approximate hull volume lost by deleting each vertex.

    The cap removed with a vertex is estimated as the cone between its star
    and the centroid of its one-ring. Returns (costs, neighbour lists).
    """
    n = len(points)
    edges = hull_edges(triangles)
    both = np.vstack([edges, edges[:, ::-1]])
    degree = np.bincount(both[:, 0], minlength=n)
    ring_sum = np.zeros((n, 3))
    np.add.at(ring_sum, both[:, 0], points[both[:, 1]])
    ring_centroid = ring_sum / degree[:, None]

    costs = np.zeros(n)
    a, b, c = (points[triangles[:, k]] for k in range(3))
    for k in range(3):
        g = ring_centroid[triangles[:, k]]
        cone = np.einsum("ij,ij->i", a - g, np.cross(b - g, c - g)) / 6.0
        np.add.at(costs, triangles[:, k], cone)

    order = np.argsort(both[:, 0], kind="stable")
    splits = np.cumsum(degree)[:-1]
    ring = np.split(both[order, 1], splits)
    return costs, ring


def _rehull_without(points, drop, order):
    everything = np.arange(len(points))
    attempts = [drop] + [[v] for v in order]
    for removed in attempts:
        keep = np.setdiff1d(everything, removed)
        try:
            return convex_hull(points[keep]), keep
        except DimensionalityError:
            continue
    return None, None


def simplify_hull(points, triangles, target_point_count) -> SimplifiedHull:
    """Greedy vertex decimation of a convex hull down to ``target_point_count``.

    Each round removes an independent set (no two removed vertices share an
    edge) of the cheapest vertices, then re-hulls the survivors, so the
    result is always convex and closed. If coplanar survivors collapse the
    count below the target the achieved count is reported instead.
    """
    target = int(target_point_count)
    if target < MIN_POINTS:
        raise InvalidTargetError(f"target point count must be >= {MIN_POINTS}, got {target}")
    points = np.asarray(points, dtype=float)
    triangles = np.asarray(triangles, dtype=np.int64)
    if target > len(points):
        raise InvalidTargetError(f"target {target} exceeds hull vertex count {len(points)}")
    source = np.arange(len(points))

    while len(points) > target:
        costs, ring = _removal_costs(points, triangles)
        excess = len(points) - target
        budget = max(1, excess // 2) if excess > 8 else 1
        order = np.lexsort((np.arange(len(points)), costs))
        blocked = np.zeros(len(points), dtype=bool)
        drop = []
        for v in order:
            if blocked[v]:
                continue
            drop.append(v)
            blocked[v] = True
            blocked[ring[v]] = True
            if len(drop) == budget:
                break
        hull, keep = _rehull_without(points, drop, order)
        if hull is None:
            log.warning("no vertex can be removed without flattening the hull")
            break
        points, triangles = hull.compact()
        source = source[keep][hull.vertex_indices]
        if len(points) < target:
            log.warning("simplification reached %d points (target %d)", len(points), target)
            break

    return SimplifiedHull(points=points, triangles=triangles, requested=target, source_indices=source)
