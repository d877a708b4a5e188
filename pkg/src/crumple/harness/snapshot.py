"""Compact, shareable deformation state: per-node body-frame rest deltas."""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from ..collision import quat_to_matrix
from ..errors import SnapshotDecodeError

SNAPSHOT_MAGIC = b"CRSN"
SNAPSHOT_VERSION = 1

# magic, version, vehicle id, frame, clock, pose (px py pz qw qx qy qz), count
_HEADER = struct.Struct("<4sHIId7fI")


@dataclass(eq=False)
class DeformationSnapshot:
    vehicle_id: int
    frame: int
    clock: float
    pose: np.ndarray  # float32 (7,): position then quaternion (w, x, y, z)
    deltas: np.ndarray  # float32 (n, 3)

    def __post_init__(self):
        self.pose = np.asarray(self.pose, dtype=np.float32).reshape(7)
        self.deltas = np.asarray(self.deltas, dtype=np.float32).reshape(-1, 3)

    @property
    def count(self):
        return len(self.deltas)

    def __eq__(self, other):
        if not isinstance(other, DeformationSnapshot):
            return NotImplemented
        return encode_snapshot(self) == encode_snapshot(other)

    def describe(self):
        mag = np.linalg.norm(self.deltas.astype(float), axis=1)
        lines = [
            f"vehicle   {self.vehicle_id}",
            f"frame     {self.frame}",
            f"clock     {self.clock:.6f} s",
            "position  " + " ".join(f"{v:.6g}" for v in self.pose[:3]),
            "rotation  " + " ".join(f"{v:.6g}" for v in self.pose[3:]),
            f"nodes     {self.count}",
            f"deformed  {int(np.count_nonzero(mag))}",
            f"max delta {mag.max() if len(mag) else 0.0:.6g} m",
        ]
        for i, (d, m) in enumerate(zip(self.deltas, mag)):
            lines.append(f"  {i:4d}  {d[0]: .6g} {d[1]: .6g} {d[2]: .6g}  |{m:.6g}|")
        return "\n".join(lines)


def encode_snapshot(snap: DeformationSnapshot) -> bytes:
    head = _HEADER.pack(
        SNAPSHOT_MAGIC,
        SNAPSHOT_VERSION,
        snap.vehicle_id,
        snap.frame,
        snap.clock,
        *snap.pose.tolist(),
        snap.count,
    )
    return head + snap.deltas.astype("<f4").tobytes()


def decode_snapshot(data: bytes) -> DeformationSnapshot:
    data = bytes(data)
    if len(data) < _HEADER.size:
        raise SnapshotDecodeError(f"truncated header: {len(data)} of {_HEADER.size} bytes")
    magic, version, vid, frame, clock, *rest = _HEADER.unpack_from(data)
    pose, count = rest[:7], rest[7]
    if magic != SNAPSHOT_MAGIC:
        raise SnapshotDecodeError(f"bad magic {magic!r}")
    if version != SNAPSHOT_VERSION:
        raise SnapshotDecodeError(f"unsupported snapshot version {version}")
    expected = _HEADER.size + 12 * count
    if len(data) != expected:
        kind = "truncated" if len(data) < expected else "oversized"
        raise SnapshotDecodeError(f"{kind} payload: {len(data)} bytes, expected {expected} for {count} nodes")
    deltas = np.frombuffer(data, dtype="<f4", offset=_HEADER.size).reshape(count, 3).copy()
    # pack again through float32 so the pose is bit-identical to what was sent
    return DeformationSnapshot(vid, frame, clock, np.array(pose, dtype=np.float32), deltas)


def snapshot_from_world(world, vehicle_id=1) -> DeformationSnapshot:
    core = world.core
    pose = np.concatenate([core.position, core.orientation])
    return DeformationSnapshot(
        vehicle_id, world.frame, world.clock, pose, world.nodes.body_rest - world.nodes.body_rest_initial
    )


def surface_from_snapshot(world, snap: DeformationSnapshot):
    """Deformed surface implied by ``snap`` for a freshly assembled ``world``.

    Only the world's rest data (binding, rest surface, rest control points)
    is used; its current pose and node state are ignored.
    """
    if snap.count != len(world.nodes):
        raise SnapshotDecodeError(f"snapshot has {snap.count} nodes, vehicle has {len(world.nodes)}")
    pose = snap.pose.astype(float)
    q = pose[3:] / np.linalg.norm(pose[3:])
    R = quat_to_matrix(q)
    body = world.surface_body + world.binding.weights @ snap.deltas.astype(float)
    return pose[:3] + body @ R.T
