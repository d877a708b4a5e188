"""Positional contact resolution of control nodes against static obstacles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# rounding after a projection must not register as a fresh contact
SLOP = 1e-12

def _unit(v, name):
    v = np.asarray(v, dtype=float).reshape(3)
    n = np.linalg.norm(v)
    if not n > 0:
        raise ValueError(f"{name} must be non-zero")
    return v / n


def quat_to_matrix(q):
    """Rotation matrix of a unit quaternion given as (w, x, y, z)."""
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


@dataclass
class HalfSpace:
    """Solid region behind a plane; ``normal`` points out of the solid."""

    point: np.ndarray
    normal: np.ndarray
    friction: float = 0.5

    def __post_init__(self):
        self.point = np.asarray(self.point, dtype=float).reshape(3)
        self.normal = _unit(self.normal, "normal")
        _check_friction(self.friction)

    def push_out(self, p):
        """Return (inside mask, projected points, outward normals, depth) per row."""
        depth = (self.point - p) @ self.normal
        inside = depth > SLOP
        out = p + np.outer(np.where(inside, depth, 0.0), self.normal)
        normals = np.broadcast_to(self.normal, p.shape)
        return inside, out, normals, depth


@dataclass
class Sphere:
    center: np.ndarray
    radius: float
    friction: float = 0.5

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float).reshape(3)
        if not self.radius > 0:
            raise ValueError("radius must be > 0")
        _check_friction(self.friction)

    def push_out(self, p):
        rel = p - self.center
        dist = np.linalg.norm(rel, axis=1)
        inside = self.radius - dist > SLOP
        normals = np.zeros_like(p)
        ok = dist > 0
        normals[ok] = rel[ok] / dist[ok, None]
        normals[~ok] = (1.0, 0.0, 0.0)  # centre hit: any direction is nearest
        out = np.where(inside[:, None], self.center + normals * self.radius, p)
        return inside, out, normals, self.radius - dist


@dataclass
class Box:
    """Oriented box; ``orientation`` is a unit quaternion (w, x, y, z)."""

    center: np.ndarray
    half_extents: np.ndarray
    orientation: np.ndarray = (1.0, 0.0, 0.0, 0.0)
    friction: float = 0.5

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float).reshape(3)
        self.half_extents = np.asarray(self.half_extents, dtype=float).reshape(3)
        if np.any(self.half_extents <= 0):
            raise ValueError("half_extents must be > 0")
        q = np.asarray(self.orientation, dtype=float).reshape(4)
        self.orientation = q / np.linalg.norm(q)
        self._rot = quat_to_matrix(self.orientation)
        _check_friction(self.friction)

    def push_out(self, p):
        local = (p - self.center) @ self._rot
        gap = self.half_extents - np.abs(local)
        inside = np.all(gap > SLOP, axis=1)
        # argmin returns the first minimum: ties resolve in x, y, z order
        axis = gap.argmin(axis=1)
        rows = np.arange(len(p))
        sign = np.where(local[rows, axis] >= 0, 1.0, -1.0)
        moved = local.copy()
        moved[rows, axis] = sign * self.half_extents[axis]
        n_local = np.zeros_like(p)
        n_local[rows, axis] = sign
        out = np.where(inside[:, None], self.center + moved @ self._rot.T, p)
        return inside, out, n_local @ self._rot.T, gap[rows, axis]


def _check_friction(f):
    if not 0 <= f <= 1:
        raise ValueError("friction must lie in [0, 1]")


@dataclass(frozen=True)
class Contact:
    node: int
    obstacle: int
    depth: float
    normal: tuple


def resolve_contacts(position, prev_position, obstacles, apply_friction=True):
    """Project nodes strictly inside any obstacle onto its nearest surface.

    ``position`` (and ``prev_position`` for friction) are modified in place.
    Friction scales each contacting node's tangential motion since the last
    step by ``1 - friction`` through its previous position.
    """
    contacts = []
    for oid, obs in enumerate(obstacles):
        inside, out, normals, depth = obs.push_out(position)
        if not np.any(inside):
            continue
        idx = np.flatnonzero(inside)
        position[idx] = out[idx]
        if apply_friction and obs.friction > 0:
            n = normals[idx]
            motion = position[idx] - prev_position[idx]
            tangential = motion - np.einsum("ij,ij->i", motion, n)[:, None] * n
            prev_position[idx] += obs.friction * tangential
        for i, d, n in zip(idx.tolist(), depth[idx].tolist(), normals[idx].tolist()):
            contacts.append(Contact(i, oid, d, tuple(n)))
    return contacts


def obstacle_collider(obstacles):
    """Adapter with the ``collide(nodes, friction)`` signature used by solve_step."""

    def collide(nodes, friction):
        if not obstacles:
            return []
        return resolve_contacts(nodes.position, nodes.prev_position, obstacles, friction)

    return collide
