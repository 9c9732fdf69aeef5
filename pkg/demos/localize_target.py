"""Localize a moving target from one noiseless FDOA snapshot.

Pipeline: simulate the measurement, scan a coarse grid for the best starting
point, then polish with damped Newton steps using the analytic Hessian.
"""

import numpy as np

from framefit import (
    GridSpec,
    NoiseModel,
    RadarGeometry,
    SolverConfig,
    TargetState,
    localize,
    radar_family,
    simulate_fdoa,
)

angles = 2.0 * np.pi * np.arange(4) / 4
tx = 100.0 * np.column_stack([np.cos(angles), np.sin(angles)])
rx = 100.0 * np.column_stack([np.cos(angles + 0.5), np.sin(angles + 0.5)])
geometry = RadarGeometry(tx, rx)
family = radar_family(geometry)

truth = TargetState([3.7, -5.2], [40.0, 25.0])
w = simulate_fdoa(geometry, truth, NoiseModel(sigma=0.0, seed=0))
print("measurement w =", np.round(w, 4))

grid = GridSpec([-10.0, -10.0], [10.0, 10.0], [21, 21])
result = localize(family, w, SolverConfig(grid=grid, max_iters=30))

print(f"\n{'k':>2}  {'x_1':>12}  {'x_2':>12}  {'E':>10}  {'|grad|':>10}")
for k, (x, E, gn) in enumerate(result.iterates):
    print(f"{k:>2}  {x[0]:12.8f}  {x[1]:12.8f}  {E:10.2e}  {gn:10.2e}")

err = np.linalg.norm(result.minimizer - truth.position)
print(f"\nstatus {result.status.value}, position error {err:.2e} m")

# with noise the estimate degrades gracefully
for sigma in (0.01, 0.1, 1.0):
    w_noisy = simulate_fdoa(geometry, truth, NoiseModel(sigma=sigma, seed=7))
    r = localize(family, w_noisy, SolverConfig(grid=grid, max_iters=30))
    e = np.linalg.norm(r.minimizer - truth.position)
    print(f"sigma {sigma:5.2f}  ->  position error {e:.3e} m")
