import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial import ConvexHull

from conftest import unit_cube
from crumple.errors import DegenerateSolidError
from crumple.geometry import ControlHull, build_control_mesh, convex_hull, hull_edges, tetrahedralize_and_mass
from oracles import tetra_volume_sum


def _cube_control(mass=1000.0):
    pts, tris = convex_hull(unit_cube()).compact()
    return tetrahedralize_and_mass(pts, tris, mass)


def test_unit_cube_mass_split():
    cm = _cube_control()
    assert len(cm.tetrahedra) == 12
    assert cm.tet_volumes.sum() == pytest.approx(1.0, rel=1e-12)
    assert cm.node_masses.sum() == pytest.approx(1000.0, rel=1e-12)
    # the centroid belongs to all 12 tets: sum(vol/V)/4 of the mass
    assert cm.node_masses[cm.centroid_index] == pytest.approx(250.0, rel=1e-12)
    np.testing.assert_allclose(cm.rest_points[cm.centroid_index], [0.5, 0.5, 0.5])


def test_unit_cube_edges():
    cm = _cube_control()
    # 18 hull-triangle edges (12 cube edges + 6 face diagonals) + 8 spokes
    assert len(cm.edges) == 26
    spokes = [e for e in cm.edges if cm.centroid_index in e]
    assert len(spokes) == 8
    assert len({tuple(sorted(e)) for e in cm.edges}) == 26


def test_regular_tetrahedron_symmetry():
    pts = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    hull = convex_hull(pts)
    cm = tetrahedralize_and_mass(*hull.compact(), 4.0)
    hull_masses = np.delete(cm.node_masses, cm.centroid_index)
    np.testing.assert_allclose(hull_masses, hull_masses[0], rtol=1e-12)
    assert cm.node_masses[cm.centroid_index] == pytest.approx(1.0, rel=1e-12)


def test_each_hull_triangle_forms_one_tet():
    cm = _cube_control()
    tets = {tuple(sorted(t)) for t in cm.tetrahedra.tolist()}
    for tri in cm.hull_triangles.tolist():
        assert tuple(sorted(tri + [cm.centroid_index])) in tets


def test_hull_edges_unique():
    tris = np.array([[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]])
    assert sorted(map(tuple, map(sorted, hull_edges(tris).tolist()))) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def test_flat_solid_rejected():
    pts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=float)
    with pytest.raises(DegenerateSolidError):
        tetrahedralize_and_mass(pts, np.array([[0, 1, 2], [0, 2, 1]]), 1.0)


@given(st.integers(5, 60), st.integers(4, 40), st.floats(1.0, 5000.0), st.integers(0, 2**32 - 1))
def test_mass_and_volume_conservation(n, budget, mass, seed):
    pts = np.random.default_rng(seed).normal(size=(n, 3)) * [2.0, 0.7, 1.0]
    cm, lod = build_control_mesh(pts, budget, mass)
    assert abs(cm.node_masses.sum() - mass) <= 1e-9 * mass
    ref = ConvexHull(lod.points).volume
    assert abs(cm.tet_volumes.sum() - ref) <= 1e-9 * ref
    apex = cm.rest_points[cm.centroid_index]
    assert tetra_volume_sum(cm.rest_points, cm.hull_triangles, apex) == pytest.approx(ref, rel=1e-9)
    assert np.all(cm.node_masses > 0)


def test_control_hull_estimator(car_mesh):
    est = ControlHull(n_points=16, total_mass=900.0)
    assert est.get_params() == {"n_points": 16, "total_mass": 900.0}
    est.fit(car_mesh.vertices)
    assert est.n_points_achieved_ == 16
    assert est.control_mesh_.n_points == 17
    assert not est.budget_clamped_
    assert est.transform().shape == (17, 3)


def test_budget_above_hull_count_is_clamped(caplog):
    est = ControlHull(n_points=50).fit(unit_cube())
    assert est.budget_clamped_
    assert est.n_points_achieved_ == 8
    assert "clamped" in caplog.text
