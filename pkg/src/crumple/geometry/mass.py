"""Tetrahedral decomposition of a convex control hull and lumped node masses."""

from __future__ import annotations

import numpy as np

from ..errors import DegenerateSolidError
from .mesh import ControlMesh


def hull_edges(triangles):
    """Unique undirected edges of a triangle list, in first-seen order."""
    seen = {}
    for a, b, c in np.asarray(triangles, dtype=np.int64):
        for i, j in ((a, b), (b, c), (c, a)):
            key = (int(min(i, j)), int(max(i, j)))
            seen.setdefault(key, None)
    return np.array(list(seen), dtype=np.int64).reshape(-1, 2)


def tetrahedralize_and_mass(points, triangles, total_mass) -> ControlMesh:
    """Fan the hull into tetrahedra around its vertex centroid and lump mass.

    Each tetrahedron carries ``total_mass * vol / hull_vol``, split equally
    between its four nodes. The centroid node is appended after the hull
    points and is connected to every hull point by a spoke edge.
    """
    if not total_mass > 0:
        raise ValueError("total_mass must be positive")
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    tris = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
    n = len(pts)
    centroid = pts.mean(axis=0)
    ci = n

    a = pts[tris[:, 0]] - centroid
    b = pts[tris[:, 1]] - centroid
    c = pts[tris[:, 2]] - centroid
    vols = np.einsum("ij,ij->i", a, np.cross(b, c)) / 6.0
    volume = vols.sum()
    if not volume > 0 or not np.isfinite(volume):
        raise DegenerateSolidError(f"hull encloses no volume ({volume:g} m^3)")

    tet_mass = total_mass * vols / volume
    masses = np.zeros(n + 1)
    for k in range(3):
        np.add.at(masses, tris[:, k], tet_mass / 4.0)
    masses[ci] = tet_mass.sum() / 4.0
    # absorb rounding so the lumped masses add up to the configured total
    masses[ci] += total_mass - masses.sum()

    spokes = np.column_stack([np.arange(n), np.full(n, ci)])
    return ControlMesh(
        rest_points=np.vstack([pts, centroid]),
        edges=np.vstack([hull_edges(tris), spokes]),
        hull_triangles=tris.copy(),
        centroid_index=ci,
        tetrahedra=np.column_stack([tris, np.full(len(tris), ci)]),
        node_masses=masses,
        tet_volumes=vols,
    )
