import numpy as np
import pytest

from conftest import unit_cube
from crumple.binding import compute_weights
from crumple.collision import HalfSpace
from crumple.errors import AssemblyError
from crumple.geometry import SurfaceMesh, build_control_mesh, convex_hull, tetrahedralize_and_mass
from crumple.vehicle import CoreConfig, MaterialConfig, assemble, matrix_to_quat, quat_multiply
from oracles import random_rotation

NO_GRAVITY = (0.0, 0.0, 0.0)


def _world(parts, **kw):
    surface, control, binding = parts
    return assemble(surface, control, binding, **kw)


def _octahedron_parts(mass=1200.0):
    """Mirror-symmetric body: every hull vertex sits in 4 triangles, so lumped masses are symmetric."""
    tips = np.array([[2.2, 0.7, 0], [-2.2, 0.7, 0], [0, 1.4, 0], [0, 0, 0], [0, 0.7, 0.9], [0, 0.7, -0.9]])
    inner = np.array([[0.5, 0.7, 0.2], [0.5, 0.7, -0.2], [-1.0, 0.9, 0.3], [-1.0, 0.9, -0.3]])
    pts = np.vstack([tips, inner])
    surface = SurfaceMesh(pts, np.zeros((0, 3), dtype=np.int64))
    control, _ = build_control_mesh(pts, 6, mass)
    return surface, control, compute_weights(pts, control.rest_points)


def test_cube_constraints_follow_edge_list():
    pts, tris = convex_hull(unit_cube()).compact()
    control = tetrahedralize_and_mass(pts, tris, 1000.0)
    surface = SurfaceMesh(unit_cube(), np.zeros((0, 3), dtype=np.int64))
    world = assemble(surface, control, compute_weights(surface.vertices, control.rest_points))
    assert len(world.constraints) == len(control.edges) == 26
    assert [(c.node_a, c.node_b) for c in world.constraints] == [tuple(e) for e in control.edges.tolist()]


def test_binding_for_other_control_count_rejected(car_parts):
    surface, control, _ = car_parts
    wrong = compute_weights(surface.vertices, control.rest_points[:-1])
    with pytest.raises(AssemblyError):
        assemble(surface, control, wrong)


def test_rest_stability_without_gravity(car_parts):
    world = _world(car_parts, gravity=NO_GRAVITY)
    before = world.surface_vertices()
    for _ in range(100):
        report = world.step()
        assert report.plastic_events == 0
    np.testing.assert_allclose(world.surface_vertices(), before, atol=1e-6)


def test_clock_and_orientation_invariants(car_parts):
    world = _world(car_parts, core=CoreConfig(angular_velocity=np.array([0.3, 1.0, -0.2])), gravity=NO_GRAVITY)
    for k in range(1, 61):
        report = world.step()
        assert report.frame == k
        assert world.clock == pytest.approx(k * world.params.dt, abs=1e-12)
        assert abs(np.linalg.norm(world.core.orientation) - 1) < 1e-9


def test_rigid_transport_leaves_shell_unstrained(car_parts):
    rng = np.random.default_rng(0)
    world = _world(car_parts, gravity=NO_GRAVITY)
    for _ in range(5):
        world.transport(random_rotation(rng), rng.normal(scale=10, size=3))
        assert world.constraint_strains().max() < 1e-9
        np.testing.assert_allclose(world.surface_vertices(), world.rest_surface_world(), atol=1e-6)
    world.step()
    assert world.constraint_strains().max() < 1e-9


def test_pose_places_mesh_origin(car_parts):
    R = random_rotation(np.random.default_rng(1))
    q = matrix_to_quat(R)
    world = _world(car_parts, core=CoreConfig(position=np.array([1.0, 2.0, 3.0]), orientation=q))
    np.testing.assert_allclose(world.rest_surface_world(), car_parts[0].vertices @ R.T + [1, 2, 3], atol=1e-12)


def test_quaternion_helpers():
    rng = np.random.default_rng(2)
    A, B = random_rotation(rng), random_rotation(rng)
    from crumple.collision import quat_to_matrix

    q = quat_multiply(matrix_to_quat(A), matrix_to_quat(B))
    np.testing.assert_allclose(quat_to_matrix(q), A @ B, atol=1e-12)


def test_sync_tracks_rigid_motion(car_parts):
    world = _world(car_parts, core=CoreConfig(linear_velocity=np.array([3.0, 0.5, -1.0])), gravity=NO_GRAVITY)
    for _ in range(30):
        world.step()
    np.testing.assert_allclose(world.deformed_vertices, world.rest_surface_world(), atol=1e-6)


def test_zero_throttle_has_no_wheel_force(car_parts):
    world = _world(car_parts).drive(0.0, 0.3)
    assert world.wheel_forces() == []
    with pytest.raises(ValueError):
        world.drive(1.5)


def test_wheel_forces_split_and_steer(car_parts):
    world = _world(car_parts).drive(0.5, 0.2)
    forces = world.wheel_forces()
    total = sum(f for f, _ in forces)
    assert len(forces) == 4
    assert np.linalg.norm(forces[2][0]) == pytest.approx(0.5 * 8000 / 4)
    np.testing.assert_allclose(forces[0][0] / 1000, [np.cos(0.2), 0, -np.sin(0.2)])
    assert total[2] < 0


def test_throttle_gives_impulse_speed(car_parts):
    ground = HalfSpace([0, 0, 0], [0, 1, 0], friction=0.0)
    world = _world(car_parts, obstacles=[ground])
    world.drive(1.0)
    t = 0.5
    for _ in range(int(round(t / world.params.dt))):
        world.step()
    expected = world.max_drive_force * t / world.core.mass
    assert world.core.linear_velocity[0] == pytest.approx(expected, rel=0.05)


def test_straight_drive_stays_in_plane():
    parts = _octahedron_parts()
    wheels = np.array([[1.0, 0.5, -0.4], [1.0, 0.5, 0.4], [-1.0, 0.5, -0.4], [-1.0, 0.5, 0.4]])
    ground = HalfSpace([0, 0, 0], [0, 1, 0], friction=0.0)
    world = _world(parts, core=CoreConfig(wheel_offsets=wheels), obstacles=[ground])
    world.drive(1.0, 0.0)
    for _ in range(120):
        world.step()
        assert abs(world.core.position[2]) < 1e-6
    assert world.core.linear_velocity[0] > 5


def test_steering_turns_left(car_parts):
    world = _world(car_parts, gravity=NO_GRAVITY).drive(1.0, 0.3)
    for _ in range(60):
        world.step()
    assert world.core.linear_velocity[2] < 0
    assert world.core.angular_velocity[1] > 0


def test_resting_on_ground_is_undamaged(car_parts):
    world = _world(car_parts, obstacles=[HalfSpace([0, 0, 0], [0, 1, 0], 0.3)])
    for _ in range(240):
        assert world.step().plastic_events == 0
    assert np.linalg.norm(world.core.linear_velocity) < 1e-3


@pytest.fixture(scope="module")
def crash(car_parts):
    obstacles = [HalfSpace([0, 0, 0], [0, 1, 0], 0.3), HalfSpace([3, 0, 0], [-1, 0, 0], 0.5)]
    world = _world(car_parts, core=CoreConfig(linear_velocity=np.array([20.0, 0, 0])), obstacles=obstacles)
    reports, max_dev = [], 0.0
    for _ in range(240):
        reports.append(world.step())
        max_dev = max(max_dev, world.nodes.deviation().max())
    return world, reports, max_dev


def test_crash_dents_front_rearward(crash):
    world, reports, _ = crash
    assert sum(r.plastic_events for r in reports) > 0
    delta = world.nodes.body_rest - world.nodes.body_rest_initial
    x = world.nodes.body_rest_initial[:, 0]
    third = (x.max() - x.min()) / 3
    front, rear = x >= x.max() - third, x <= x.min() + third
    assert delta[front, 0].mean() < 0
    assert np.linalg.norm(delta[front], axis=1).mean() > np.linalg.norm(delta[rear], axis=1).mean()


def test_crash_stops_the_car(crash):
    world, _, _ = crash
    assert np.linalg.norm(world.core.linear_velocity) < 0.1
    # the wall face is at x = 3; the core ends up behind it
    assert world.nodes.position[:, 0].max() <= 3.0 + 1e-9


def test_crash_respects_deviation_bound(crash):
    world, _, max_dev = crash
    assert max_dev <= world.params.max_deviation + 1e-12


def test_report_rows_are_deterministic(car_parts):
    def run():
        world = _world(car_parts, core=CoreConfig(linear_velocity=np.array([12.0, 0, 0])),
                       obstacles=[HalfSpace([2.6, 0, 0], [-1, 0, 0])])
        return [world.step().row() for _ in range(60)]

    assert run() == run()


def test_material_flows_into_constraints(car_parts):
    mat = MaterialConfig(stiffness=0.5, yield_strain=0.05, break_strain=0.3, iterations=3)
    world = _world(car_parts, material=mat)
    assert {(c.stiffness, c.yield_strain, c.break_strain) for c in world.constraints} == {(0.5, 0.05, 0.3)}
    assert world.params.iterations == 3


def _core(**kw):
    from crumple.vehicle import RigidCore

    base = dict(
        position=np.zeros(3),
        orientation=np.array([1.0, 0, 0, 0]),
        linear_velocity=np.zeros(3),
        angular_velocity=np.zeros(3),
        mass=2.0,
        inertia=np.array([1.0, 2.0, 4.0]),
        wheel_offsets=np.zeros((4, 3)),
    )
    base.update(kw)
    return RigidCore(**base)


def test_core_impulse_and_point_velocity():
    core = _core()
    core.apply_impulse(np.array([0.0, 0.0, 4.0]), np.array([1.0, 0.0, 0.0]))
    np.testing.assert_allclose(core.linear_velocity, [0, 0, 2])
    # r x J = (0, -4, 0), inertia 2 about y
    np.testing.assert_allclose(core.angular_velocity, [0, -2, 0])
    np.testing.assert_allclose(core.point_velocity(np.array([1.0, 0, 0])), [0, 0, 4])


def test_core_semi_implicit_step():
    core = _core()
    core.integrate(np.array([2.0, 0, 0]), np.array([0, 0, 4.0]), 0.5)
    # velocity updated first, then used for the pose
    np.testing.assert_allclose(core.linear_velocity, [0.5, 0, 0])
    np.testing.assert_allclose(core.position, [0.25, 0, 0])
    np.testing.assert_allclose(core.angular_velocity, [0, 0, 0.5])
    assert np.linalg.norm(core.orientation) == pytest.approx(1.0, abs=1e-15)


def test_core_rejects_non_positive_mass():
    with pytest.raises(ValueError):
        _core(mass=0.0)
