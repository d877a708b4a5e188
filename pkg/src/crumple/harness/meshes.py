"""Procedural stand-in vehicle surfaces for scenarios, tests and benchmarks."""

import numpy as np

from ..geometry.mesh import SurfaceMesh


def _spow(base, exponent):
    return np.sign(base) * np.abs(base) ** exponent


def car_proxy(n_around=40, n_rings=26, length=4.4, height=1.4, width=1.8, roundness=0.4, ripple=0.0):
    """Boxy superellipsoid car body with its lowest point at y = 0.

    +x is forward and +y up. ``ripple`` (meters) dents the panels with a
    periodic inward pattern so most vertices fall strictly inside the
    convex hull, like the concave detail of a real body.
    """
    lat = np.linspace(0.0, np.pi, n_rings + 1)[1:-1]
    lon = np.linspace(0.0, 2.0 * np.pi, n_around, endpoint=False)
    v, u = np.meshgrid(lat, lon, indexing="ij")
    a, b, c = length / 2, height / 2, width / 2
    x = a * _spow(np.sin(v), roundness) * _spow(np.cos(u), roundness)
    y = b * _spow(np.cos(v), roundness)
    z = c * _spow(np.sin(v), roundness) * _spow(np.sin(u), roundness)
    ring = np.stack([x, y, z], axis=-1).reshape(-1, 3)
    if ripple:
        shrink = 1.0 - ripple * (0.5 + 0.5 * np.sin(7 * u) * np.sin(5 * v)).reshape(-1) / max(a, b, c)
        ring *= shrink[:, None]
    verts = np.vstack([[0.0, b, 0.0], ring, [0.0, -b, 0.0]])
    verts[:, 1] += b

    tris = []
    top, bottom = 0, len(verts) - 1
    for j in range(n_around):
        k = (j + 1) % n_around
        tris.append((top, 1 + k, 1 + j))
    for r in range(n_rings - 2):
        base = 1 + r * n_around
        nxt = base + n_around
        for j in range(n_around):
            k = (j + 1) % n_around
            tris.append((base + j, base + k, nxt + k))
            tris.append((base + j, nxt + k, nxt + j))
    last = 1 + (n_rings - 2) * n_around
    for j in range(n_around):
        k = (j + 1) % n_around
        tris.append((last + j, last + k, bottom))
    return SurfaceMesh(verts, np.array(tris))


def dense_proxy(n_vertices, shell=(40, 26), inset=0.9):
    """Car proxy with about ``n_vertices`` vertices, like a detailed production mesh.

    A ``shell`` resolution outer body carries the silhouette; the remaining
    budget goes to a finer inner layer shrunk by ``inset`` about the body
    centre, standing in for interior parts. The hull therefore stays about
    the size of the outer shell however dense the mesh gets.
    """
    outer = car_proxy(*shell)
    rest = max(0, int(n_vertices) - outer.n_vertices)
    if rest < 8:
        return outer
    rings = max(4, int(round(np.sqrt(rest / 2.0))))
    around = max(3, int(round((rest - 2) / (rings - 1))))
    inner = car_proxy(n_around=around, n_rings=rings)
    centre = np.array([0.0, inner.vertices[:, 1].max() / 2, 0.0])
    inner_verts = centre + inset * (inner.vertices - centre)
    verts = np.vstack([outer.vertices, inner_verts])
    tris = np.vstack([outer.triangles, inner.triangles + outer.n_vertices])
    return SurfaceMesh(verts, tris)
