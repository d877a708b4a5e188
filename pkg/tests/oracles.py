"""Independent reference computations used only by the tests."""

import itertools

import numpy as np


def brute_force_hull_vertices(points, tol=1e-9):
    """Indices of points lying on some supporting plane through three input points.

    Every triple spans a candidate plane; the triple is a hull facet when all
    points lie on one side. Exact for point sets in general position.
    """
    pts = np.asarray(points, dtype=float)
    scale = np.linalg.norm(pts.max(0) - pts.min(0))
    on_hull = set()
    for i, j, k in itertools.combinations(range(len(pts)), 3):
        n = np.cross(pts[j] - pts[i], pts[k] - pts[i])
        norm = np.linalg.norm(n)
        if norm < 1e-12 * scale * scale:
            continue
        side = (pts - pts[i]) @ (n / norm)
        if np.all(side <= tol * scale) or np.all(side >= -tol * scale):
            on_hull.update((i, j, k))
    return on_hull


def tetra_volume_sum(points, triangles, apex):
    """Sum of signed tet volumes (triangle + apex) by the scalar triple product."""
    total = 0.0
    for a, b, c in triangles:
        pa, pb, pc = points[a] - apex, points[b] - apex, points[c] - apex
        total += np.dot(pa, np.cross(pb, pc)) / 6.0
    return total


def random_rotation(rng):
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def idw_weights_reference(vertex, controls, alpha):
    """Textbook normalized 1/d^alpha for one vertex, no rescaling tricks."""
    d = np.linalg.norm(np.asarray(controls) - np.asarray(vertex), axis=1)
    raw = 1.0 / d**alpha
    return raw / raw.sum()
