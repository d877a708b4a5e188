"""Mesh containers and Wavefront OBJ input/output."""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field

import numpy as np

from ..errors import EmptyMeshError, ObjParseError


@dataclass
class SurfaceMesh:
    """High resolution render/collision surface.

    ``vertices`` is an (n, 3) float array in meters, ``triangles`` an (m, 3)
    int array of zero-based vertex indices.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    normals: np.ndarray | None = None

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        self.triangles = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        if self.normals is not None:
            self.normals = np.asarray(self.normals, dtype=float).reshape(-1, 3)
            if len(self.normals) != len(self.vertices):
                raise ValueError("normals must match vertex count")
        if len(self.triangles):
            if self.triangles.min() < 0 or self.triangles.max() >= len(self.vertices):
                raise ValueError("triangle index out of range")
            t = self.triangles
            if np.any((t[:, 0] == t[:, 1]) | (t[:, 1] == t[:, 2]) | (t[:, 0] == t[:, 2])):
                raise ValueError("degenerate triangle with repeated index")

    @property
    def n_vertices(self):
        return len(self.vertices)


@dataclass
class ControlMesh:
    """Coarse convex control hull with an interior centroid node.

    Hull points come first; the centroid is always the last point.
    """

    rest_points: np.ndarray
    edges: np.ndarray
    hull_triangles: np.ndarray
    centroid_index: int
    tetrahedra: np.ndarray
    node_masses: np.ndarray
    tet_volumes: np.ndarray = field(default=None, repr=False)

    @property
    def n_points(self):
        return len(self.rest_points)

    @property
    def n_hull_points(self):
        return len(self.rest_points) - 1

    @property
    def total_mass(self):
        return float(np.sum(self.node_masses))


def _open_text(source):
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            data = fh.read()
    elif isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    else:
        data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8", errors="replace")
    return io.StringIO(data)


def _face_index(token, n_vertices, lineno):
    head = token.split("/", 1)[0]
    try:
        idx = int(head)
    except ValueError:
        raise ObjParseError(f"bad face index {token!r}", lineno) from None
    if idx == 0:
        raise ObjParseError("face index 0 is invalid (OBJ is 1-based)", lineno)
    if idx < 0:
        idx = n_vertices + idx
    else:
        idx -= 1
    if not 0 <= idx < n_vertices:
        raise ObjParseError(f"face index {token!r} out of range", lineno)
    return idx


def load_obj(source) -> SurfaceMesh:
    """Read positions and faces from OBJ text (path, bytes or binary stream).

    Polygons are fan triangulated around their first corner, and triangles
    that collapse onto a repeated index are dropped.
    """
    vertices = []
    triangles = []
    for lineno, raw in enumerate(_open_text(source), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0]
        if key == "v":
            if len(parts) < 4:
                raise ObjParseError("vertex with fewer than 3 coordinates", lineno)
            try:
                vertices.append([float(p) for p in parts[1:4]])
            except ValueError:
                raise ObjParseError("non-numeric vertex coordinate", lineno) from None
        elif key == "f":
            if len(parts) < 4:
                raise ObjParseError("face with fewer than 3 indices", lineno)
            idx = [_face_index(tok, len(vertices), lineno) for tok in parts[1:]]
            for k in range(1, len(idx) - 1):
                tri = (idx[0], idx[k], idx[k + 1])
                if len(set(tri)) == 3:
                    triangles.append(tri)
        # vn, vt, groups, materials and smoothing records are ignored
    if not vertices:
        raise EmptyMeshError("OBJ contains no vertices")
    return SurfaceMesh(np.array(vertices, dtype=float), np.array(triangles, dtype=np.int64).reshape(-1, 3))


def write_obj(dest, vertices, triangles=(), normals=None, comment=None):
    """Write positions (and optionally normals) with 1-based triangle faces."""
    vertices = np.asarray(vertices, dtype=float).reshape(-1, 3)
    triangles = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.extend(f"v {x:.9g} {y:.9g} {z:.9g}" for x, y, z in vertices)
    if normals is not None:
        normals = np.asarray(normals, dtype=float).reshape(-1, 3)
        lines.extend(f"vn {x:.9g} {y:.9g} {z:.9g}" for x, y, z in normals)
        lines.extend(f"f {a}//{a} {b}//{b} {c}//{c}" for a, b, c in triangles + 1)
    else:
        lines.extend(f"f {a} {b} {c}" for a, b, c in triangles + 1)
    text = "\n".join(lines) + "\n"
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8") as fh:
            fh.write(text)
    elif isinstance(dest, io.TextIOBase):
        dest.write(text)
    else:
        dest.write(text.encode("utf-8"))


def write_control_mesh(dest, control: ControlMesh):
    """Export a control mesh for inspection; the centroid is the last vertex."""
    write_obj(
        dest,
        control.rest_points,
        control.hull_triangles,
        comment=f"control mesh: {control.n_hull_points} hull points + centroid (vertex {control.centroid_index + 1})",
    )
