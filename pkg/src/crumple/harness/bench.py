"""Cost of stepping and of surface sync as the control budget grows."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..binding import apply_deformation, compute_weights
from ..geometry import convex_hull, simplify_hull, tetrahedralize_and_mass
from ..vehicle import assemble

WARMUP_STEPS = 50


@dataclass(frozen=True)
class BenchRow:
    budget: int
    achieved: int
    mean_step_us: float
    mean_bind_us: float
    note: str = ""

    def row(self):
        return f"{self.budget}\t{self.achieved}\t{self.mean_step_us:.1f}\t{self.mean_bind_us:.1f}\t{self.note}"


BENCH_HEADER = "budget\tcontrol_points\tmean_step_us\tmean_bind_apply_us\tnote"


def bench_scaling(surface, budgets, steps=100, mass=1000.0, alpha=3.5, warmup=WARMUP_STEPS):
    """Time ``steps`` solver steps and surface syncs per control budget.

    The vehicle falls freely (no obstacles) so every step does the same work.
    Budgets above the hull vertex count are clamped, noted in the row.
    """
    budgets = [int(b) for b in budgets]
    if not budgets:
        raise ValueError("need at least one budget")
    if any(b < 4 for b in budgets):
        raise ValueError("budgets must be >= 4")
    if budgets != sorted(budgets):
        raise ValueError("budgets must be sorted ascending")
    if steps < 1:
        raise ValueError("steps must be >= 1")

    hull_points, hull_tris = convex_hull(surface.vertices).compact()
    rows = []
    for budget in budgets:
        achieved = min(budget, len(hull_points))
        note = f"clamped to hull count {achieved}" if achieved < budget else ""
        lod = simplify_hull(hull_points, hull_tris, achieved)
        control = tetrahedralize_and_mass(lod.points, lod.triangles, mass)
        binding = compute_weights(surface.vertices, control.rest_points, alpha)
        world = assemble(surface, control, binding)
        world.sync_surface = False

        step_t, bind_t = [], []
        for k in range(warmup + steps):
            t0 = time.perf_counter()
            world.step()
            t1 = time.perf_counter()
            apply_deformation(world.rest_surface_world(), binding, world.rest_control_world(), world.nodes.position)
            t2 = time.perf_counter()
            if k >= warmup:
                step_t.append(t1 - t0)
                bind_t.append(t2 - t1)
        rows.append(BenchRow(budget, lod.achieved, 1e6 * float(np.mean(step_t)), 1e6 * float(np.mean(bind_t)), note))
    return rows


def linear_fit(xs, ys):
    """Least-squares ``y = a x + b``; returns (a, b, r_squared)."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    a, b = np.polyfit(x, y, 1)
    resid = y - (a * x + b)
    total = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / total if total > 0 else 1.0
    return float(a), float(b), float(r2)
