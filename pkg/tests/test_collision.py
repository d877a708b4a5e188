import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from crumple.collision import Box, HalfSpace, Sphere, quat_to_matrix, resolve_contacts

GROUND = HalfSpace([0, 0, 0], [0, 1, 0])


def _resolve(points, obstacles, prev=None, friction=True):
    pos = np.array(points, dtype=float).reshape(-1, 3)
    prev = pos.copy() if prev is None else np.array(prev, dtype=float).reshape(-1, 3)
    contacts = resolve_contacts(pos, prev, obstacles, friction)
    return pos, prev, contacts


def test_above_ground_untouched():
    pos, _, contacts = _resolve([[0.0, 0.5, 0.0]], [GROUND])
    np.testing.assert_array_equal(pos, [[0, 0.5, 0]])
    assert contacts == []


def test_below_ground_projected():
    pos, _, contacts = _resolve([[0.2, -0.1, 0.0]], [GROUND])
    np.testing.assert_allclose(pos, [[0.2, 0.0, 0.0]], atol=1e-15)
    assert len(contacts) == 1
    assert contacts[0].node == 0 and contacts[0].obstacle == 0
    assert contacts[0].depth == pytest.approx(0.1)
    assert contacts[0].normal == (0.0, 1.0, 0.0)


def test_sphere_radial_projection():
    pos, _, contacts = _resolve([[0.5, 0, 0]], [Sphere([0, 0, 0], 1.0)])
    np.testing.assert_allclose(pos, [[1, 0, 0]])
    assert contacts[0].depth == pytest.approx(0.5)


def test_sphere_centre_hit_has_a_direction():
    pos, _, _ = _resolve([[0, 0, 0]], [Sphere([0, 0, 0], 2.0)])
    assert np.linalg.norm(pos) == pytest.approx(2.0)


def test_box_nearest_face():
    box = Box([0, 0, 0], [1, 2, 3])
    pos, _, contacts = _resolve([[0.8, 0.1, 0.1]], [box])
    np.testing.assert_allclose(pos, [[1.0, 0.1, 0.1]])
    assert contacts[0].normal == pytest.approx((1.0, 0.0, 0.0))
    assert contacts[0].depth == pytest.approx(0.2)


def test_box_tie_prefers_x_then_y():
    cube = Box([0, 0, 0], [1, 1, 1])
    pos, _, _ = _resolve([[0.5, 0.5, 0.5], [0.2, -0.5, 0.5]], [cube])
    np.testing.assert_allclose(pos, [[1.0, 0.5, 0.5], [0.2, -1.0, 0.5]])


def test_rotated_box():
    q = [np.cos(np.pi / 8), 0, 0, np.sin(np.pi / 8)]  # 45 degrees about z
    box = Box([1, 0, 0], [1, 1, 1], q)
    p = np.array([1.0, 0.0, 0.9])
    pos, _, contacts = _resolve([p], [box])
    np.testing.assert_allclose(pos, [[1.0, 0.0, 1.0]], atol=1e-12)
    assert contacts[0].depth == pytest.approx(0.1)


def test_quaternion_matrix_is_rotation():
    rng = np.random.default_rng(0)
    q = rng.normal(size=4)
    R = quat_to_matrix(q / np.linalg.norm(q))
    np.testing.assert_allclose(R @ R.T, np.eye(3), atol=1e-12)
    assert np.linalg.det(R) == pytest.approx(1.0)


@pytest.mark.parametrize(
    "make",
    [
        lambda: HalfSpace([0, 0, 0], [0, 0, 0]),
        lambda: Sphere([0, 0, 0], 0.0),
        lambda: Box([0, 0, 0], [1, 0, 1]),
        lambda: HalfSpace([0, 0, 0], [0, 1, 0], friction=1.5),
    ],
)
def test_invalid_obstacles(make):
    with pytest.raises(ValueError):
        make()


def test_halfspace_normal_is_normalised():
    assert np.linalg.norm(HalfSpace([0, 0, 0], [0, 3, 4]).normal) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("friction, kept", [(1.0, 0.0), (0.0, 1.0), (0.25, 0.75)])
def test_friction_scales_tangential_motion(friction, kept):
    ground = HalfSpace([0, 0, 0], [0, 1, 0], friction)
    pos, prev, _ = _resolve([[1.0, -0.1, 0.5]], [ground], prev=[[0.0, 0.2, 0.0]])
    tangential = (pos - prev)[0, [0, 2]]
    np.testing.assert_allclose(tangential, kept * np.array([1.0, 0.5]), atol=1e-15)


def test_friction_skipped_when_disabled():
    ground = HalfSpace([0, 0, 0], [0, 1, 0], 1.0)
    _, prev, _ = _resolve([[1.0, -0.1, 0.0]], [ground], prev=[[0.0, 0.0, 0.0]], friction=False)
    np.testing.assert_array_equal(prev, [[0.0, 0.0, 0.0]])


obstacles = st.sampled_from(
    [
        [GROUND],
        [Sphere([0.2, 0.1, 0], 1.3)],
        [Box([0, 0.5, 0], [1.0, 0.5, 0.7], [0.9, 0.1, 0.3, 0.2])],
        [GROUND, Box([1, 0, 0], [0.5, 0.5, 0.5]), Sphere([-1, 0.5, 0], 0.6)],
    ]
)
points = arrays(np.float64, st.tuples(st.integers(1, 30), st.just(3)), elements=st.floats(-2, 2))


@given(points, obstacles)
def test_nothing_left_inside_and_idempotent(pts, obs):
    pos, prev, _ = _resolve(pts, obs)
    if len(obs) == 1:
        for o in obs:
            inside, _, _, depth = o.push_out(pos)
            assert not inside.any()
            assert np.all(depth < 1e-9)
        again, _, contacts = _resolve(pos, obs)
        assert contacts == []
        np.testing.assert_array_equal(again, pos)
