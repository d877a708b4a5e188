from .bench import BenchRow, bench_scaling, linear_fit
from .config import DriveCommand, Scenario, load_scenario, parse_scenario
from .meshes import car_proxy, dense_proxy
from .run import RunResult, build_world, front_rear_deformation, run_scenario
from .snapshot import (
    DeformationSnapshot,
    decode_snapshot,
    encode_snapshot,
    snapshot_from_world,
    surface_from_snapshot,
)

__all__ = [
    "BenchRow",
    "DeformationSnapshot",
    "DriveCommand",
    "RunResult",
    "Scenario",
    "bench_scaling",
    "build_world",
    "car_proxy",
    "decode_snapshot",
    "dense_proxy",
    "encode_snapshot",
    "front_rear_deformation",
    "linear_fit",
    "load_scenario",
    "parse_scenario",
    "run_scenario",
    "snapshot_from_world",
    "surface_from_snapshot",
]
