from .control import ControlHull, build_control_mesh
from .hull import Hull, convex_hull, surface_volume
from .lod import SimplifiedHull, simplify_hull
from .mass import hull_edges, tetrahedralize_and_mass
from .mesh import ControlMesh, SurfaceMesh, load_obj, write_control_mesh, write_obj

__all__ = [
    "ControlHull",
    "ControlMesh",
    "Hull",
    "SimplifiedHull",
    "SurfaceMesh",
    "build_control_mesh",
    "convex_hull",
    "hull_edges",
    "load_obj",
    "simplify_hull",
    "surface_volume",
    "tetrahedralize_and_mass",
    "write_control_mesh",
    "write_obj",
]
