"""Position-based Verlet solver for the control-mesh point masses."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SimulationDiverged


@dataclass
class NodeState:
    """Struct-of-arrays state for ``n`` point masses.

    Velocity is implicit in ``position - prev_position``. ``body_rest`` is the
    node's rest location in the vehicle body frame and moves under
    plasticity; ``body_rest_initial`` never changes.
    """

    position: np.ndarray
    prev_position: np.ndarray
    inverse_mass: np.ndarray
    body_rest: np.ndarray
    body_rest_initial: np.ndarray

    def __post_init__(self):
        self.position = np.array(self.position, dtype=float).reshape(-1, 3)
        n = len(self.position)
        self.prev_position = np.array(self.prev_position, dtype=float).reshape(n, 3)
        self.inverse_mass = np.array(self.inverse_mass, dtype=float).reshape(n)
        self.body_rest = np.array(self.body_rest, dtype=float).reshape(n, 3)
        self.body_rest_initial = np.array(self.body_rest_initial, dtype=float).reshape(n, 3)
        if np.any(self.inverse_mass < 0):
            raise ValueError("inverse_mass must be >= 0")

    @classmethod
    def at_rest(cls, positions, inverse_mass, body_rest=None):
        positions = np.asarray(positions, dtype=float)
        body = positions if body_rest is None else body_rest
        return cls(positions, positions, inverse_mass, body, body)

    def __len__(self):
        return len(self.position)

    def copy(self):
        return NodeState(
            self.position.copy(),
            self.prev_position.copy(),
            self.inverse_mass.copy(),
            self.body_rest.copy(),
            self.body_rest_initial.copy(),
        )

    def deviation(self):
        return np.linalg.norm(self.body_rest - self.body_rest_initial, axis=1)


@dataclass
class DistanceConstraint:
    node_a: int
    node_b: int
    rest_length: float
    stiffness: float = 0.9
    yield_strain: float = 0.02
    break_strain: float = 0.2
    initial_rest_length: float = field(default=None)

    def __post_init__(self):
        if self.node_a == self.node_b:
            raise ValueError("constraint endpoints must differ")
        if not self.rest_length > 0:
            raise ValueError("rest_length must be > 0")
        if not 0 < self.stiffness <= 1:
            raise ValueError("stiffness must lie in (0, 1]")
        if not 0 < self.yield_strain < self.break_strain:
            raise ValueError("need 0 < yield_strain < break_strain")
        if self.initial_rest_length is None:
            self.initial_rest_length = self.rest_length

    def strain(self, current_length):
        return (current_length - self.rest_length) / self.rest_length


@dataclass(frozen=True)
class SolverParams:
    dt: float = 1.0 / 120.0
    iterations: int = 8
    max_deviation: float = 0.5
    damping: float = 0.02

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not self.max_deviation > 0:
            raise ValueError("max_deviation must be > 0")
        if not 0 <= self.damping < 1:
            raise ValueError("damping must lie in [0, 1)")


@dataclass
class Attachments:
    """Zero-length links from every node to ``origin + R @ body_rest``.

    The frame is kinematic during a solve; only the nodes move. When a
    node ends a step more than ``yield_distance`` from its target, its
    ``body_rest`` migrates so that exactly ``yield_distance`` remains.
    """

    rotation: np.ndarray
    origin: np.ndarray
    stiffness: float = 0.9
    yield_distance: float = 0.05

    def targets(self, body_rest):
        return self.origin + body_rest @ self.rotation.T

    def to_body(self, world):
        return (world - self.origin) @ self.rotation


@dataclass
class PlasticEvent:
    kind: str  # "edge" or "attachment"
    index: int
    before: float
    after: float


@dataclass
class StepResult:
    plastic_events: list
    would_break: list
    max_strain: float
    contacts: list
    degenerate: int = 0


def integrate_verlet(nodes: NodeState, accelerations, dt, damping=0.0):
    """Position Verlet with velocity damping; pinned nodes are left alone."""
    acc = np.broadcast_to(np.asarray(accelerations, dtype=float), nodes.position.shape)
    free = nodes.inverse_mass > 0
    pos = nodes.position
    new = pos + (1.0 - damping) * (pos - nodes.prev_position) + acc * (dt * dt)
    nodes.prev_position = np.where(free[:, None], pos, nodes.prev_position)
    nodes.position = np.where(free[:, None], new, pos)
    return nodes


def _project(pa, pb, wa, wb, rest, k):
    """In-place distance projection on two [x, y, z] lists. False if degenerate."""
    dx = pb[0] - pa[0]
    dy = pb[1] - pa[1]
    dz = pb[2] - pa[2]
    length = math.sqrt(dx * dx + dy * dy + dz * dz)
    wsum = wa + wb
    if length == 0.0:
        return False
    if wsum == 0.0:
        return True
    s = k * (length - rest) / (length * wsum)
    dx *= s
    dy *= s
    dz *= s
    if wa:
        pa[0] += wa * dx
        pa[1] += wa * dy
        pa[2] += wa * dz
    if wb:
        pb[0] -= wb * dx
        pb[1] -= wb * dy
        pb[2] -= wb * dz
    return True


def project_distance(pa, pb, wa, wb, rest_length, stiffness=1.0):
    """Move two points along their axis toward ``rest_length``.

    The correction is split by inverse mass and scaled by ``stiffness``.
    Returns the new pair, or ``None`` when the points coincide.
    """
    a = [float(v) for v in pa]
    b = [float(v) for v in pb]
    if not _project(a, b, float(wa), float(wb), float(rest_length), float(stiffness)):
        return None
    return np.array(a), np.array(b)


def apply_plasticity(constraint: DistanceConstraint, current_length):
    """Rewrite the rest length when strain leaves the elastic range.

    The new rest length keeps exactly ``yield_strain`` of residual strain.
    Returns ``(old, new)`` rest lengths on a plastic event, else ``None``.
    """
    rest = constraint.rest_length
    strain = (current_length - rest) / rest
    if abs(strain) <= constraint.yield_strain:
        return None
    sign = 1.0 if strain > 0 else -1.0
    constraint.rest_length = current_length / (1.0 + sign * constraint.yield_strain)
    return rest, constraint.rest_length


def clamp_deviation(body_rest, body_rest_initial, max_deviation):
    """Pull rest points back into the closed ball of radius ``max_deviation``."""
    body_rest = np.array(body_rest, dtype=float)
    initial = np.asarray(body_rest_initial, dtype=float)
    delta = body_rest - initial
    dist = np.linalg.norm(delta, axis=-1)
    over = dist > max_deviation
    if np.any(over):
        scale = max_deviation / dist[over]
        delta[over] *= scale[..., None]
        body_rest[over] = initial[over] + delta[over]
    return body_rest


def solve_step(
    nodes: NodeState,
    constraints,
    params: SolverParams,
    accelerations=0.0,
    attachments: Attachments | None = None,
    collide=None,
    step_index=0,
) -> StepResult:
    """Advance ``nodes`` by one step in place.

    Order: Verlet -> contacts -> ``params.iterations`` Gauss-Seidel rounds
    (edges, attachments, then contacts again) -> plasticity -> deviation clamp.
    ``collide(nodes, friction)`` resolves contacts in place and returns a
    list of contacts.
    """
    integrate_verlet(nodes, accelerations, params.dt, params.damping)
    contacts = []
    if collide is not None:
        contacts.extend(collide(nodes, True))

    pos = nodes.position.tolist()
    w = nodes.inverse_mass.tolist()
    targets = attachments.targets(nodes.body_rest).tolist() if attachments is not None else None
    degenerate = 0
    for _ in range(params.iterations):
        for c in constraints:
            if not _project(pos[c.node_a], pos[c.node_b], w[c.node_a], w[c.node_b], c.rest_length, c.stiffness):
                degenerate += 1
        if targets is not None:
            k = attachments.stiffness
            for p, t, wi in zip(pos, targets, w):
                if wi:
                    p[0] += k * (t[0] - p[0])
                    p[1] += k * (t[1] - p[1])
                    p[2] += k * (t[2] - p[2])
        if collide is not None:
            nodes.position = np.array(pos)
            contacts.extend(collide(nodes, False))
            pos = nodes.position.tolist()
    nodes.position = np.array(pos)

    finite = np.isfinite(nodes.position).all(axis=1)
    if not finite.all():
        raise SimulationDiverged(step_index, int(np.flatnonzero(~finite)[0]))

    events = []
    would_break = []
    max_strain = 0.0
    if constraints:
        ia = np.fromiter((c.node_a for c in constraints), dtype=np.int64, count=len(constraints))
        ib = np.fromiter((c.node_b for c in constraints), dtype=np.int64, count=len(constraints))
        lengths = np.linalg.norm(nodes.position[ia] - nodes.position[ib], axis=1).tolist()
        for idx, (c, length) in enumerate(zip(constraints, lengths)):
            strain = abs(c.strain(length))
            max_strain = max(max_strain, strain)
            if strain > c.break_strain:
                would_break.append(idx)
            changed = apply_plasticity(c, length)
            if changed is not None:
                events.append(PlasticEvent("edge", idx, *changed))

    before = nodes.body_rest.copy()
    if attachments is not None:
        local = attachments.to_body(nodes.position)
        dev = local - nodes.body_rest
        dist = np.linalg.norm(dev, axis=1)
        over = (dist > attachments.yield_distance) & (nodes.inverse_mass > 0)
        if np.any(over):
            nodes.body_rest[over] += dev[over] * (1.0 - attachments.yield_distance / dist[over])[:, None]
    nodes.body_rest = clamp_deviation(nodes.body_rest, nodes.body_rest_initial, params.max_deviation)
    if attachments is not None and np.any(over):
        # a node already pinned at the deviation limit does not count as new damage
        moved = over & np.any(nodes.body_rest != before, axis=1)
        for i, d in zip(np.flatnonzero(moved).tolist(), dist[moved].tolist()):
            events.append(PlasticEvent("attachment", i, d, attachments.yield_distance))
    return StepResult(events, would_break, max_strain, contacts, degenerate)
