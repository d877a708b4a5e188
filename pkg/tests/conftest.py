import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from crumple.binding import compute_weights
from crumple.geometry import build_control_mesh
from crumple.harness.meshes import car_proxy

settings.register_profile("crumple", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("crumple")


@pytest.fixture(scope="session")
def car_mesh():
    return car_proxy()


@pytest.fixture(scope="session")
def car_parts(car_mesh):
    """(surface, control mesh, dense binding) for a 32-point, 1200 kg car."""
    control, _ = build_control_mesh(car_mesh.vertices, 32, 1200.0)
    return car_mesh, control, compute_weights(car_mesh.vertices, control.rest_points, 3.5)


def unit_cube():
    return np.array([[x, y, z] for x in (0.0, 1.0) for y in (0.0, 1.0) for z in (0.0, 1.0)])


# --- acceptance summary --------------------------------------------------
# tests marked @pytest.mark.criterion(n, title) get one PASS/FAIL line in the
# terminal summary; measured values come from record_property.

_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or not (rep.when == "call" or rep.failed):
        return
    number, title = marker.args
    detail = ", ".join(f"{k}={v}" for k, v in item.user_properties)
    _CRITERIA[number] = ("PASS" if rep.passed else "FAIL", title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA, key=lambda n: (float(str(n).rstrip("*")), str(n))):
        status, title, detail = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number!s:>3}  {status}  {title}" + (f"  [{detail}]" if detail else ""))
