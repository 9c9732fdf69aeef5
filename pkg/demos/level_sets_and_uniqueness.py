"""Where can the target be, and is the minimizer unique?

Three diagnostics on the same noisy scene:
  1. the residual bound E(x0) <= |eps|^2, which always holds at the truth,
  2. the sublevel set {x : E(x) <= tau} with tau = |eps|^2, the region
     guaranteed to contain the truth,
  3. a sampled certificate that the augmented frame vectors span R^{M+P},
     ruling out curves of spurious zeros near the estimate.
"""

import numpy as np

from framefit import (
    GridSpec,
    NoiseModel,
    RadarGeometry,
    TargetState,
    level_set,
    radar_family,
    residual_bound_check,
    simulate_fdoa,
    uniqueness_certificate,
)

rng = np.random.default_rng(4)
angles = 2.0 * np.pi * np.arange(4) / 4
tx = 100.0 * np.column_stack([np.cos(angles), np.sin(angles)])
rx = 100.0 * np.column_stack([np.cos(angles + 0.5), np.sin(angles + 0.5)])
geometry = RadarGeometry(tx, rx)
family = radar_family(geometry)

truth = TargetState([2.0, 1.5], [30.0, -12.0])
w_clean = simulate_fdoa(geometry, truth, NoiseModel(0.0, 0))
eps = rng.normal(size=4) * 0.2
w = w_clean + eps
eps_norm = float(np.linalg.norm(eps))

E0, holds = residual_bound_check(family, truth.position, w, eps_norm)
print(f"E at truth {E0:.4e} vs |eps|^2 = {eps_norm**2:.4e}: bound holds = {holds}")

grid = GridSpec([-10.0, -10.0], [10.0, 10.0], [41, 41])
for scale in (1.0, 0.5, 0.1):
    tau = scale * eps_norm**2
    report = level_set(family, w, grid, tau)
    print(
        f"tau = {scale:4.1f} |eps|^2: {len(report.points):4d} of "
        f"{grid.num_points} grid points, fraction {report.fraction:.4f}"
    )

samples = [truth.position + rng.normal(size=2) * 0.5 for _ in range(25)]
cert = uniqueness_certificate(family, w, samples)
print(
    f"\naugmented-span certificate over 25 nearby samples: "
    f"{'PASS' if cert.passed else 'FAIL'} "
    f"(smallest singular value {min(cert.smallest_singular_values):.3e})"
)

# with only N = 2 pairs in the plane the certificate can never pass:
# 2 < M + P = 4 augmented directions cannot span R^4
small = radar_family(RadarGeometry(tx[:2], rx[:2]))
w2 = simulate_fdoa(RadarGeometry(tx[:2], rx[:2]), truth, NoiseModel(0.0, 0))
cert2 = uniqueness_certificate(small, w2, samples)
print(f"same test with 2 pairs: {'PASS' if cert2.passed else 'FAIL'} (as expected)")
