"""Surface-to-control-mesh pipeline as an estimator."""

from __future__ import annotations

import logging

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .._validation import check_points, check_positive
from .hull import convex_hull
from .lod import simplify_hull
from .mass import tetrahedralize_and_mass

log = logging.getLogger(__name__)


def build_control_mesh(vertices, n_points, total_mass):
    """Hull -> simplify -> tetrahedralize. Returns (ControlMesh, SimplifiedHull).

    A budget above the hull vertex count is clamped to the hull count.
    """
    hull = convex_hull(vertices)
    points, triangles = hull.compact()
    budget = min(int(n_points), len(points))
    if budget < int(n_points):
        log.warning("control budget %d clamped to hull vertex count %d", n_points, budget)
    lod = simplify_hull(points, triangles, budget)
    return tetrahedralize_and_mass(lod.points, lod.triangles, total_mass), lod


class ControlHull(BaseEstimator):
    """Fit a convex control mesh with ``n_points`` hull nodes to a point cloud.

    Parameters
    ----------
    n_points : int
        Hull control-point budget (the centroid node is extra).
    total_mass : float
        Vehicle mass in kg, lumped onto the control nodes.

    Attributes
    ----------
    control_mesh_ : ControlMesh
    n_points_achieved_ : int
    n_triangles_ : int
    budget_clamped_ : bool
    """

    def __init__(self, n_points=32, total_mass=1000.0):
        self.n_points = n_points
        self.total_mass = total_mass

    def fit(self, X, y=None):
        X = check_points(X, min_points=4)
        check_positive(self.total_mass, "total_mass")
        self.control_mesh_, lod = build_control_mesh(X, self.n_points, self.total_mass)
        self.n_points_achieved_ = lod.achieved
        self.n_triangles_ = lod.n_triangles
        self.budget_clamped_ = lod.requested < int(self.n_points)
        return self

    def transform(self, X=None):
        """Rest positions of the control nodes (hull points then centroid)."""
        check_is_fitted(self, "control_mesh_")
        return self.control_mesh_.rest_points.copy()
