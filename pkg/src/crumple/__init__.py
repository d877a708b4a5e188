"""Real-time vehicle body deformation from a coarse convex control hull.

A few dozen control points on the simplified hull of a detailed body are
simulated as an elastic-plastic point-mass shell coupled to a rigid core;
the detailed surface follows them through normalized inverse-distance
weights.
"""

from .binding import (
    BindingTable,
    InverseDistanceBinding,
    apply_deformation,
    compute_weights,
    decode_binding,
    encode_binding,
    load_binding,
    save_binding,
)
from .collision import Box, Contact, HalfSpace, Sphere, resolve_contacts
from .dynamics import (
    Attachments,
    DistanceConstraint,
    NodeState,
    SolverParams,
    StepResult,
    apply_plasticity,
    integrate_verlet,
    project_distance,
    solve_step,
)
from .errors import (
    AssemblyError,
    BindingFormatError,
    ConfigurationError,
    CrumpleError,
    DegenerateSolidError,
    DimensionalityError,
    EmptyMeshError,
    InvalidTargetError,
    ObjParseError,
    ScenarioError,
    SimulationDiverged,
    SnapshotDecodeError,
    StaleBindingError,
)
from .geometry import (
    ControlHull,
    ControlMesh,
    SurfaceMesh,
    build_control_mesh,
    convex_hull,
    load_obj,
    simplify_hull,
    tetrahedralize_and_mass,
    write_obj,
)
from .vehicle import CoreConfig, FrameReport, MaterialConfig, VehicleWorld, assemble

__version__ = "0.1.0"
