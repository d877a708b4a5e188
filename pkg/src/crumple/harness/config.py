"""INI scenario files.

Layout (all lengths in metres, times in seconds)::

    [scenario]
    mesh = car.obj            ; relative to the config file
    duration = 3.0
    dt = 1/120                ; plain numbers or fractions
    cadence = 10              ; export an OBJ frame every k steps
    gravity = 0, -9.81, 0
    vehicle_id = 1

    [vehicle]
    mass = 1200
    control_points = 32
    alpha = 3.5
    max_drive_force = 8000
    ; optional: inertia = ixx, iyy, izz
    ; optional: wheel_offsets = x,y,z; x,y,z; x,y,z; x,y,z   (FL, FR, RL, RR)

    [material]                ; every key optional
    stiffness = 0.9
    yield_strain = 0.02
    break_strain = 0.2
    max_deviation = 0.5
    damping = 0.02
    iterations = 8
    attachment_stiffness = 0.9
    attachment_yield = 0.05

    [initial]
    position = 0, 0, 0        ; where the mesh origin is placed
    orientation = 1, 0, 0, 0  ; w, x, y, z
    velocity = 20, 0, 0
    angular_velocity = 0, 0, 0

    [obstacle.wall]           ; any number of obstacle.<name> sections
    type = halfspace          ; halfspace | sphere | box
    point = 3, 0, 0
    normal = -1, 0, 0
    friction = 0.5

    [drive]                   ; time = throttle, steer (held until the next entry)
    0.0 = 1.0, 0.0
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from ..binding import DEFAULT_ALPHA
from ..collision import Box, HalfSpace, Sphere
from ..errors import ScenarioError
from ..vehicle import GRAVITY, CoreConfig, MaterialConfig


@dataclass(frozen=True)
class DriveCommand:
    time: float
    throttle: float
    steer: float


@dataclass
class Scenario:
    mesh_path: Path
    mass: float = 1000.0
    control_points: int = 32
    alpha: float = DEFAULT_ALPHA
    material: MaterialConfig = field(default_factory=MaterialConfig)
    core: CoreConfig = field(default_factory=CoreConfig)
    obstacles: list = field(default_factory=list)
    drive: list = field(default_factory=list)
    duration: float = 1.0
    dt: float = 1.0 / 120.0
    cadence: int = 10
    gravity: tuple = GRAVITY
    vehicle_id: int = 1

    def __post_init__(self):
        if not self.duration > 0:
            raise ScenarioError("duration must be > 0")
        if not self.dt > 0:
            raise ScenarioError("dt must be > 0")
        if self.cadence < 1:
            raise ScenarioError("cadence must be >= 1")
        if not self.mass > 0:
            raise ScenarioError("mass must be > 0")
        if self.control_points < 4:
            raise ScenarioError("control_points must be >= 4")
        self.drive = sorted(self.drive, key=lambda d: d.time)

    @property
    def n_steps(self):
        return int(round(self.duration / self.dt))

    def command_at(self, clock):
        """Latest drive command issued at or before ``clock`` (None if none yet)."""
        current = None
        for cmd in self.drive:
            if cmd.time <= clock + 1e-12:
                current = cmd
            else:
                break
        return current


def _number(text, key):
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise ScenarioError(f"{key}: expected a number, got {text!r}") from None


def _vector(text, key, n=3):
    parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
    if len(parts) != n:
        raise ScenarioError(f"{key}: expected {n} comma-separated numbers, got {text!r}")
    return np.array([_number(p, key) for p in parts])


def _obstacle(name, sec):
    kind = sec.get("type", "").strip().lower()
    friction = _number(sec.get("friction", "0.5"), f"{name}.friction")
    try:
        if kind == "halfspace":
            return HalfSpace(_vector(sec["point"], f"{name}.point"), _vector(sec["normal"], f"{name}.normal"), friction)
        if kind == "sphere":
            return Sphere(_vector(sec["center"], f"{name}.center"), _number(sec["radius"], f"{name}.radius"), friction)
        if kind == "box":
            orient = _vector(sec.get("orientation", "1, 0, 0, 0"), f"{name}.orientation", 4)
            return Box(
                _vector(sec["center"], f"{name}.center"),
                _vector(sec["half_extents"], f"{name}.half_extents"),
                orient,
                friction,
            )
    except KeyError as exc:
        raise ScenarioError(f"[{name}] is missing key {exc.args[0]!r}") from None
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"[{name}]: {exc}") from None
    raise ScenarioError(f"[{name}]: unknown obstacle type {kind!r}")


_MATERIAL_INTS = {"iterations"}


def parse_scenario(text, base_dir=".") -> Scenario:
    """Parse scenario text; a relative mesh path resolves against ``base_dir``."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ScenarioError(f"malformed scenario file: {exc}") from None
    if not cp.has_section("scenario") or "mesh" not in cp["scenario"]:
        raise ScenarioError("[scenario] section with a 'mesh' key is required")
    sc = cp["scenario"]
    mesh = Path(sc["mesh"].strip())
    if not mesh.is_absolute():
        mesh = Path(base_dir) / mesh

    kwargs = {"mesh_path": mesh}
    for key in ("duration", "dt"):
        if key in sc:
            kwargs[key] = _number(sc[key], key)
    if "cadence" in sc:
        kwargs["cadence"] = int(_number(sc["cadence"], "cadence"))
    if "vehicle_id" in sc:
        kwargs["vehicle_id"] = int(_number(sc["vehicle_id"], "vehicle_id"))
    if "gravity" in sc:
        kwargs["gravity"] = tuple(_vector(sc["gravity"], "gravity"))

    core = CoreConfig()
    if cp.has_section("vehicle"):
        vs = cp["vehicle"]
        if "mass" in vs:
            kwargs["mass"] = _number(vs["mass"], "mass")
        if "control_points" in vs:
            kwargs["control_points"] = int(_number(vs["control_points"], "control_points"))
        if "alpha" in vs:
            kwargs["alpha"] = _number(vs["alpha"], "alpha")
        if "max_drive_force" in vs:
            core.max_drive_force = _number(vs["max_drive_force"], "max_drive_force")
        if "inertia" in vs:
            core.inertia = _vector(vs["inertia"], "inertia")
        if "wheel_offsets" in vs:
            core.wheel_offsets = _vector(vs["wheel_offsets"], "wheel_offsets", 12).reshape(4, 3)

    material = MaterialConfig()
    if cp.has_section("material"):
        for key, value in cp["material"].items():
            if not hasattr(material, key):
                raise ScenarioError(f"[material]: unknown key {key!r}")
            number = _number(value, key)
            setattr(material, key, int(number) if key in _MATERIAL_INTS else number)

    if cp.has_section("initial"):
        ini = cp["initial"]
        if "position" in ini:
            core.position = _vector(ini["position"], "position")
        if "orientation" in ini:
            core.orientation = _vector(ini["orientation"], "orientation", 4)
        if "velocity" in ini:
            core.linear_velocity = _vector(ini["velocity"], "velocity")
        if "angular_velocity" in ini:
            core.angular_velocity = _vector(ini["angular_velocity"], "angular_velocity")

    obstacles = [_obstacle(name, cp[name]) for name in cp.sections() if name.startswith("obstacle")]

    drive = []
    if cp.has_section("drive"):
        for key, value in cp["drive"].items():
            throttle, steer = _vector(value, f"drive at {key}", 2)
            if abs(throttle) > 1:
                raise ScenarioError(f"drive at {key}: throttle must lie in [-1, 1]")
            drive.append(DriveCommand(_number(key, "drive time"), float(throttle), float(steer)))

    return Scenario(material=material, core=core, obstacles=obstacles, drive=drive, **kwargs)


def load_scenario(path) -> Scenario:
    path = Path(path)
    return parse_scenario(path.read_text(), base_dir=path.parent)
