"""3D convex hull (quickhull) and closed-surface volume."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from ..errors import DimensionalityError

RELATIVE_EPS = 1e-9


@dataclass
class Hull:
    """Convex hull of ``points``.

    ``vertex_indices`` index into ``points`` (sorted ascending) and
    ``triangles`` are outward-oriented triples of indices into ``points``.
    """

    points: np.ndarray
    vertex_indices: np.ndarray
    triangles: np.ndarray
    eps: float

    def compact(self):
        """Return (vertices, triangles) re-indexed onto the hull vertices only."""
        remap = np.full(len(self.points), -1, dtype=np.int64)
        remap[self.vertex_indices] = np.arange(len(self.vertex_indices))
        return self.points[self.vertex_indices].copy(), remap[self.triangles]

    @property
    def volume(self):
        return surface_volume(self.points, self.triangles)


def surface_volume(points, triangles):
    """Enclosed volume of a closed outward-oriented triangle surface."""
    p = np.asarray(points, dtype=float)
    t = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
    a, b, c = p[t[:, 0]], p[t[:, 1]], p[t[:, 2]]
    return float(np.einsum("ij,ij->i", a, np.cross(b, c)).sum() / 6.0)


def hull_epsilon(points):
    points = np.asarray(points, dtype=float)
    diag = float(np.linalg.norm(points.max(axis=0) - points.min(axis=0)))
    return RELATIVE_EPS * diag


class _Face:
    __slots__ = ("v", "normal", "offset", "outside", "alive")

    def __init__(self, a, b, c, coords):
        self.v = (a, b, c)
        ax, ay, az = coords[a]
        bx, by, bz = coords[b]
        cx, cy, cz = coords[c]
        ux, uy, uz = bx - ax, by - ay, bz - az
        vx, vy, vz = cx - ax, cy - ay, cz - az
        nx, ny, nz = uy * vz - uz * vy, uz * vx - ux * vz, ux * vy - uy * vx
        norm = math.sqrt(nx * nx + ny * ny + nz * nz)
        if norm > 0:
            nx, ny, nz = nx / norm, ny / norm, nz / norm
        self.normal = (nx, ny, nz)
        self.offset = nx * ax + ny * ay + nz * az
        self.outside = None
        self.alive = True

    def distance(self, p):
        n = self.normal
        return n[0] * p[0] + n[1] * p[1] + n[2] * p[2] - self.offset


def _initial_simplex(pts, eps):
    n = len(pts)
    ext = np.concatenate([pts.argmin(axis=0), pts.argmax(axis=0)])
    best = (-1.0, 0, 0)
    for i in ext:
        for j in ext:
            d = float(np.linalg.norm(pts[i] - pts[j]))
            if d > best[0]:
                best = (d, int(i), int(j))
    d01, i0, i1 = best
    if d01 <= eps:
        raise DimensionalityError("all points coincide")
    axis = (pts[i1] - pts[i0]) / d01
    rel = pts - pts[i0]
    off_line = np.linalg.norm(rel - np.outer(rel @ axis, axis), axis=1)
    i2 = int(off_line.argmax())
    if off_line[i2] <= eps:
        raise DimensionalityError("points are collinear")
    normal = np.cross(pts[i1] - pts[i0], pts[i2] - pts[i0])
    normal /= np.linalg.norm(normal)
    off_plane = rel @ normal
    i3 = int(np.abs(off_plane).argmax())
    if abs(off_plane[i3]) <= eps:
        raise DimensionalityError("points are coplanar")
    assert len({i0, i1, i2, i3}) == 4 and n >= 4
    return i0, i1, i2, i3


def convex_hull(points) -> Hull:
    """Quickhull with plane tests at 1e-9 x bounding-box diagonal.

    Points within that tolerance of a face count as inside, so coplanar
    points on a hull facet are not reported as vertices.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    if len(pts) < 4:
        raise DimensionalityError(f"need at least 4 points, got {len(pts)}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    eps = hull_epsilon(pts)
    i0, i1, i2, i3 = _initial_simplex(pts, eps)

    coords = pts.tolist()
    faces = []
    edge_face = {}

    def add_face(a, b, c):
        f = _Face(a, b, c, coords)
        fid = len(faces)
        faces.append(f)
        edge_face[(a, b)] = fid
        edge_face[(b, c)] = fid
        edge_face[(c, a)] = fid
        return fid

    # orient the simplex so i3 is behind the base
    if _Face(i0, i1, i2, coords).distance(coords[i3]) > 0:
        i1, i2 = i2, i1
    new_ids = [add_face(i0, i1, i2), add_face(i0, i3, i1), add_face(i1, i3, i2), add_face(i2, i3, i0)]

    candidates = np.setdiff1d(np.arange(len(pts)), [i0, i1, i2, i3])
    pending = deque()

    def assign(point_ids, face_ids):
        if len(point_ids) == 0:
            return
        normals = np.array([faces[f].normal for f in face_ids])
        offsets = np.array([faces[f].offset for f in face_ids])
        dist = pts[point_ids] @ normals.T - offsets
        best = dist.argmax(axis=1)
        bestd = dist[np.arange(len(point_ids)), best]
        keep = bestd > eps
        point_ids, best, bestd = point_ids[keep], best[keep], bestd[keep]
        for k, fid in enumerate(face_ids):
            sel = best == k
            if np.any(sel):
                faces[fid].outside = (point_ids[sel], bestd[sel])
                pending.append(fid)

    assign(candidates, new_ids)

    while pending:
        fid = pending.popleft()
        face = faces[fid]
        if not face.alive or face.outside is None:
            continue
        ids, dists = face.outside
        eye = int(ids[dists.argmax()])
        eye_p = coords[eye]

        visible = {fid}
        stack = [fid]
        horizon = []
        while stack:
            cur = faces[stack.pop()]
            a, b, c = cur.v
            for e0, e1 in ((a, b), (b, c), (c, a)):
                nb = edge_face[(e1, e0)]
                if nb in visible:
                    continue
                if faces[nb].distance(eye_p) > eps:
                    visible.add(nb)
                    stack.append(nb)
                else:
                    horizon.append((e0, e1))

        orphans = []
        for vid in visible:
            vf = faces[vid]
            vf.alive = False
            if vf.outside is not None:
                orphans.append(vf.outside[0])
                vf.outside = None
            a, b, c = vf.v
            for e in ((a, b), (b, c), (c, a)):
                if edge_face.get(e) == vid:
                    del edge_face[e]
        created = [add_face(e0, e1, eye) for e0, e1 in horizon]
        if orphans:
            rest = np.concatenate(orphans)
            rest = rest[rest != eye]
            assign(rest, created)

    tris = np.array([f.v for f in faces if f.alive], dtype=np.int64)
    verts = np.unique(tris)
    return Hull(points=pts, vertex_indices=verts, triangles=tris, eps=eps)
