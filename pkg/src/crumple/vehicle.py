"""Rigid core + deformable control shell + bound render surface."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .binding import BindingTable, apply_deformation
from .collision import obstacle_collider, quat_to_matrix
from .dynamics import Attachments, DistanceConstraint, NodeState, SolverParams, solve_step
from .errors import AssemblyError
from .geometry.mesh import ControlMesh, SurfaceMesh

GRAVITY = (0.0, -9.81, 0.0)
CONTACT_PASSES = 8


def quat_multiply(a, b):
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ]
    )


def matrix_to_quat(R):
    R = np.asarray(R, dtype=float)
    tr = np.trace(R)
    if tr > 0:
        s = 2.0 * np.sqrt(tr + 1.0)
        q = [0.25 * s, (R[2, 1] - R[1, 2]) / s, (R[0, 2] - R[2, 0]) / s, (R[1, 0] - R[0, 1]) / s]
    else:
        i = int(np.argmax(np.diag(R)))
        j, k = (i + 1) % 3, (i + 2) % 3
        s = 2.0 * np.sqrt(1.0 + R[i, i] - R[j, j] - R[k, k])
        q = np.zeros(4)
        q[0] = (R[k, j] - R[j, k]) / s
        q[1 + i] = 0.25 * s
        q[1 + j] = (R[j, i] + R[i, j]) / s
        q[1 + k] = (R[k, i] + R[i, k]) / s
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q)


@dataclass
class MaterialConfig:
    stiffness: float = 0.9
    yield_strain: float = 0.02
    break_strain: float = 0.2
    max_deviation: float = 0.5
    damping: float = 0.02
    iterations: int = 8
    attachment_stiffness: float = 0.9
    attachment_yield: float = 0.05


@dataclass
class CoreConfig:
    """Rigid core set-up. ``inertia=None`` derives it from the node masses.

    Wheel offsets are body-frame positions relative to the mesh origin, in
    the order front-left, front-right, rear-left, rear-right. The body frame
    has +x forward and +y up; the defaults assume the mesh origin sits on
    the ground under the middle of the car.
    """

    wheel_offsets: np.ndarray = field(
        default_factory=lambda: np.array([[1.4, 0.3, -0.8], [1.4, 0.3, 0.8], [-1.4, 0.3, -0.8], [-1.4, 0.3, 0.8]])
    )
    max_drive_force: float = 8000.0
    inertia: np.ndarray | None = None
    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    orientation: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0, 0.0]))
    linear_velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    angular_velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))


@dataclass
class RigidCore:
    position: np.ndarray
    orientation: np.ndarray
    linear_velocity: np.ndarray
    angular_velocity: np.ndarray
    mass: float
    inertia: np.ndarray
    wheel_offsets: np.ndarray

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("core mass must be > 0")
        self.orientation = np.asarray(self.orientation, dtype=float)
        self.orientation /= np.linalg.norm(self.orientation)

    def rotation(self):
        return quat_to_matrix(self.orientation)

    def inverse_inertia_world(self, R=None):
        R = self.rotation() if R is None else R
        return (R / self.inertia) @ R.T

    def integrate(self, force, torque, dt):
        """Semi-implicit Euler: velocities first, then pose."""
        R = self.rotation()
        inertia_world = (R * self.inertia) @ R.T
        w = self.angular_velocity
        self.linear_velocity = self.linear_velocity + force / self.mass * dt
        gyro = np.cross(w, inertia_world @ w)
        self.angular_velocity = w + self.inverse_inertia_world(R) @ (torque - gyro) * dt
        self.position = self.position + self.linear_velocity * dt
        spin = np.concatenate([[0.0], self.angular_velocity])
        q = self.orientation + 0.5 * dt * quat_multiply(spin, self.orientation)
        self.orientation = q / np.linalg.norm(q)

    def apply_impulse(self, impulse, offset, inv_inertia=None):
        inv_inertia = self.inverse_inertia_world() if inv_inertia is None else inv_inertia
        self.linear_velocity = self.linear_velocity + impulse / self.mass
        self.angular_velocity = self.angular_velocity + inv_inertia @ np.cross(offset, impulse)

    def advance_pose(self, dv, dw, dt):
        """Shift the pose as if ``dv``/``dw`` had been present during the last update."""
        self.position = self.position + dv * dt
        spin = np.concatenate([[0.0], dw])
        q = self.orientation + 0.5 * dt * quat_multiply(spin, self.orientation)
        self.orientation = q / np.linalg.norm(q)

    def point_velocity(self, offset):
        return self.linear_velocity + np.cross(self.angular_velocity, offset)


@dataclass(frozen=True)
class FrameReport:
    frame: int
    clock: float
    max_strain: float
    plastic_events: int
    contacts: int
    step_us: float
    would_break: int = 0

    def row(self):
        """Deterministic table row (wall time excluded)."""
        return f"{self.frame}\t{self.clock:.6f}\t{self.max_strain:.9e}\t{self.plastic_events}\t{self.contacts}"


@dataclass
class VehicleWorld:
    core: RigidCore
    nodes: NodeState
    constraints: list
    node_masses: np.ndarray
    binding: BindingTable
    surface: SurfaceMesh
    surface_body: np.ndarray
    origin_offset: np.ndarray  # mesh-space centre of mass
    obstacles: list
    params: SolverParams
    attachment_stiffness: float
    attachment_yield: float
    max_drive_force: float
    gravity: np.ndarray
    clock: float = 0.0
    frame: int = 0
    throttle: float = 0.0
    steer: float = 0.0
    sync_surface: bool = True
    plastic_total: int = 0
    deformed_vertices: np.ndarray | None = None

    # --- kinematics -----------------------------------------------------
    def targets(self, body_rest=None):
        body = self.nodes.body_rest if body_rest is None else body_rest
        return self.core.position + body @ self.core.rotation().T

    def rest_control_world(self):
        return self.targets(self.nodes.body_rest_initial)

    def rest_surface_world(self):
        return self.core.position + self.surface_body @ self.core.rotation().T

    def surface_vertices(self):
        """Render surface driven by the live node positions."""
        return apply_deformation(
            self.rest_surface_world(), self.binding, self.rest_control_world(), self.nodes.position
        )

    def shape_vertices(self):
        """Surface driven by the plastic rest shape (no transient elastic motion)."""
        return apply_deformation(self.rest_surface_world(), self.binding, self.rest_control_world(), self.targets())

    def constraint_strains(self):
        p = self.nodes.position
        return np.array(
            [abs(c.strain(np.linalg.norm(p[c.node_a] - p[c.node_b]))) for c in self.constraints]
        )

    def transport(self, rotation, translation):
        """Rigidly move the whole vehicle (core, nodes, velocities)."""
        R = np.asarray(rotation, dtype=float)
        t = np.asarray(translation, dtype=float)
        self.core.position = R @ self.core.position + t
        self.core.orientation = quat_multiply(matrix_to_quat(R), self.core.orientation)
        self.core.orientation /= np.linalg.norm(self.core.orientation)
        self.core.linear_velocity = R @ self.core.linear_velocity
        self.core.angular_velocity = R @ self.core.angular_velocity
        self.nodes.position = self.nodes.position @ R.T + t
        self.nodes.prev_position = self.nodes.prev_position @ R.T + t

    # --- drive ----------------------------------------------------------
    def drive(self, throttle, steer=0.0):
        if abs(throttle) > 1:
            raise ValueError("throttle must lie in [-1, 1]")
        self.throttle = float(throttle)
        self.steer = float(steer)
        return self

    def wheel_forces(self, R=None):
        """World-frame (force, lever arm) per wheel for the current throttle/steer."""
        R = self.core.rotation() if R is None else R
        per_wheel = self.throttle * self.max_drive_force / 4.0
        if per_wheel == 0.0:
            return []
        c, s = np.cos(self.steer), np.sin(self.steer)
        steered = np.array([c, 0.0, -s])  # +steer turns toward -z (left for +x forward, +y up)
        forward = np.array([1.0, 0.0, 0.0])
        offsets = self.core.wheel_offsets
        out = []
        for k, off in enumerate(offsets):
            direction = steered if k < 2 else forward
            out.append((R @ (per_wheel * direction), R @ off))
        return out

    # --- stepping -------------------------------------------------------
    def step(self):
        t0 = time.perf_counter()
        core = self.core
        dt = self.params.dt
        R = core.rotation()
        force = core.mass * self.gravity
        torque = np.zeros(3)
        for f, lever in self.wheel_forces(R):
            force = force + f
            torque = torque + np.cross(lever, f)
        core.integrate(force, torque, dt)

        R = core.rotation()
        attach = Attachments(R, core.position.copy(), self.attachment_stiffness, self.attachment_yield)
        collide = obstacle_collider(self.obstacles) if self.obstacles else None
        result = solve_step(
            self.nodes,
            self.constraints,
            self.params,
            accelerations=force / core.mass,
            attachments=attach,
            collide=collide,
            step_index=self.frame,
        )
        self._contact_feedback(result.contacts, R)

        self.clock += dt
        self.frame += 1
        self.plastic_total += len(result.plastic_events)
        if self.sync_surface:
            self.deformed_vertices = self.surface_vertices()
        pairs = {(c.node, c.obstacle) for c in result.contacts}
        return FrameReport(
            frame=self.frame,
            clock=self.clock,
            max_strain=result.max_strain,
            plastic_events=len(result.plastic_events),
            contacts=len(pairs),
            step_us=(time.perf_counter() - t0) * 1e6,
            would_break=len(result.would_break),
        )

    def _contact_feedback(self, contacts, R):
        """Turn node contacts into impulses on the core.

        A contacting node held off its attachment target by ``s`` along the
        contact normal was pulled toward it by roughly ``k * s`` in each of
        the solver iterations, so it can push on the core with at most
        ``iterations * k * m_i * s / dt``.
        Impulses are iterated with accumulated clamps so they only remove
        approach velocity (inelastic, never pushing the core away), with
        Coulomb friction on the same points. The resulting velocity change
        is also applied to this step's pose.
        """
        if not contacts:
            return
        last = {}
        for c in contacts:
            last[c.node] = c
        core = self.core
        dt = self.params.dt
        v0, w0 = core.linear_velocity.copy(), core.angular_velocity.copy()
        inv_inertia = core.inverse_inertia_world(R)
        body = self.nodes.body_rest

        inv_m = 1.0 / core.mass
        gain = self.params.iterations * self.attachment_stiffness
        I = inv_inertia.tolist()
        v = core.linear_velocity.tolist()
        w = core.angular_velocity.tolist()

        def angular_response(r, d):
            # inv_inertia @ (r x d)
            c = _cross(r, d)
            return [I[0][0] * c[0] + I[0][1] * c[1] + I[0][2] * c[2],
                    I[1][0] * c[0] + I[1][1] * c[1] + I[1][2] * c[2],
                    I[2][0] * c[0] + I[2][1] * c[1] + I[2][2] * c[2]]

        rows = []
        for i in sorted(last):
            c = last[i]
            n = list(c.normal)
            offset = (R @ body[i]).tolist()
            rel = self.nodes.position[i] - core.position
            gap = n[0] * rel[0] + n[1] * rel[1] + n[2] * rel[2] - _dot(n, offset)
            if gap <= 0:
                continue
            seed = (1.0, 0.0, 0.0) if abs(n[0]) < 0.9 else (0.0, 1.0, 0.0)
            t1 = _cross(n, seed)
            norm = _dot(t1, t1) ** 0.5
            t1 = [x / norm for x in t1]
            t2 = _cross(n, t1)
            dirs = []
            for d in (n, t1, t2):
                ang = angular_response(offset, d)
                k = inv_m + _dot(_cross(ang, offset), d)
                dirs.append((d, ang, 1.0 / k))
            rows.append([offset, dirs, gain * self.node_masses[i] * gap / dt, self.obstacles[c.obstacle].friction, 0.0, 0.0, 0.0])

        def kick(d, ang, j):
            for k in range(3):
                v[k] += d[k] * j * inv_m
                w[k] += ang[k] * j

        def point_speed(offset, d):
            wx = _cross(w, offset)
            return (v[0] + wx[0]) * d[0] + (v[1] + wx[1]) * d[1] + (v[2] + wx[2]) * d[2]

        for _ in range(CONTACT_PASSES):
            for r in rows:
                offset, dirs, limit, mu = r[0], r[1], r[2], r[3]
                d, ang, m_eff = dirs[0]
                acc = min(max(r[4] - m_eff * point_speed(offset, d), 0.0), limit)
                kick(d, ang, acc - r[4])
                r[4] = acc
                if mu > 0:
                    want = [r[5 + k] - dirs[1 + k][2] * point_speed(offset, dirs[1 + k][0]) for k in range(2)]
                    cap = mu * acc
                    norm = (want[0] ** 2 + want[1] ** 2) ** 0.5
                    if norm > cap:
                        want = [x * cap / norm for x in want]
                    for k in range(2):
                        kick(dirs[1 + k][0], dirs[1 + k][1], want[k] - r[5 + k])
                        r[5 + k] = want[k]
        core.linear_velocity = np.array(v)
        core.angular_velocity = np.array(w)
        # contact impulses act before the pose update of this step
        core.advance_pose(core.linear_velocity - v0, core.angular_velocity - w0, dt)


def _cross(a, b):
    return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _inertia_from_nodes(body_points, masses):
    x, y, z = body_points.T
    return np.array(
        [
            np.sum(masses * (y * y + z * z)),
            np.sum(masses * (x * x + z * z)),
            np.sum(masses * (x * x + y * y)),
        ]
    )


def assemble(
    surface: SurfaceMesh,
    control: ControlMesh,
    binding: BindingTable,
    core: CoreConfig | None = None,
    material: MaterialConfig | None = None,
    obstacles=(),
    gravity=GRAVITY,
    dt=1.0 / 120.0,
) -> VehicleWorld:
    """Build a world with the vehicle at rest in the pose given by ``core``.

    The core sits at the mass centre of the control nodes; ``core.position``
    is where the mesh origin is placed in the world.
    """
    core = core or CoreConfig()
    material = material or MaterialConfig()
    if binding.built_against != (surface.n_vertices, control.n_points):
        raise AssemblyError(
            f"binding built for {binding.built_against}, mesh has {surface.n_vertices} vertices "
            f"and control mesh {control.n_points} points"
        )
    if len(control.node_masses) != control.n_points:
        raise AssemblyError("node mass count does not match control points")

    masses = np.asarray(control.node_masses, dtype=float)
    com = masses @ control.rest_points / masses.sum()
    body0 = control.rest_points - com
    inertia = _inertia_from_nodes(body0, masses) if core.inertia is None else np.asarray(core.inertia, dtype=float)

    q = np.asarray(core.orientation, dtype=float)
    q = q / np.linalg.norm(q)
    R = quat_to_matrix(q)
    rigid = RigidCore(
        position=np.asarray(core.position, dtype=float) + R @ com,
        orientation=q,
        linear_velocity=np.asarray(core.linear_velocity, dtype=float).copy(),
        angular_velocity=np.asarray(core.angular_velocity, dtype=float).copy(),
        mass=float(masses.sum()),
        inertia=inertia,
        wheel_offsets=np.asarray(core.wheel_offsets, dtype=float).reshape(4, 3) - com,
    )
    world_pos = rigid.position + body0 @ R.T
    # seed prev positions with the core's velocity so the shell starts moving with it
    vel = rigid.linear_velocity + np.cross(rigid.angular_velocity, body0 @ R.T)
    nodes = NodeState(world_pos, world_pos - vel * dt, 1.0 / masses, body0, body0)

    constraints = [
        DistanceConstraint(
            int(a),
            int(b),
            float(np.linalg.norm(control.rest_points[a] - control.rest_points[b])),
            material.stiffness,
            material.yield_strain,
            material.break_strain,
        )
        for a, b in control.edges
    ]
    params = SolverParams(dt=dt, iterations=material.iterations, max_deviation=material.max_deviation, damping=material.damping)
    world = VehicleWorld(
        core=rigid,
        nodes=nodes,
        constraints=constraints,
        node_masses=masses,
        binding=binding,
        surface=surface,
        surface_body=surface.vertices - com,
        origin_offset=com,
        obstacles=list(obstacles),
        params=params,
        attachment_stiffness=material.attachment_stiffness,
        attachment_yield=material.attachment_yield,
        max_drive_force=core.max_drive_force,
        gravity=np.asarray(gravity, dtype=float),
    )
    world.deformed_vertices = world.surface_vertices()
    return world
