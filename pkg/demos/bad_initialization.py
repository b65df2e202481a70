"""A bad initialization that traps gradient EM.

Place two components far out at +/- c*sqrt(d) on the first axis and the
rest at the origin.  The gradient there shrinks exponentially with the
dimension, so in high dimension the far pair barely moves: the iteration
is stuck for on the order of e^d / (30 eta) steps.  Antithetic sampling
keeps the configuration exactly symmetric (mu_1 = -mu_2) along the way.
"""

import math

import numpy as np

from gradem import (
    RunConfig,
    SamplePlan,
    draw_standard_normal,
    estimate_gradient_transformed,
    run_population_gradient_em,
    trap_horizon,
)
from gradem.harness import bad_region_params

C, ETA, SAMPLES = 2.0, 0.15, 100_000

print("gradient norm at the trap point, by dimension:")
for d in range(2, 11):
    params = bad_region_params(d, 3, C)
    batch = draw_standard_normal(d, SamplePlan(SAMPLES, seed=d))
    grad = estimate_gradient_transformed(params, batch)
    print(f"  d={d:>2}  |grad| = {grad.frobenius_norm:.4e}"
          f"   horizon ~ {trap_horizon(d, ETA):,.0f} steps")

d = 8
params = bad_region_params(d, 3, C)
config = RunConfig(
    initial_params=params,
    step_size=ETA,
    max_steps=300,
    plan=SamplePlan(SAMPLES, seed=42),
    log_every=50,
    track_means=True,
)
log = run_population_gradient_em(config)

mu1_0 = math.sqrt(d) * C
print(f"\ntrajectory at d={d} (initial |mu_1| = {mu1_0:.2f}):")
for r in log.records:
    sym = np.linalg.norm(r.means[0] + r.means[1])
    print(f"  t={r.step:>4}  |mu_1| = {r.comp_norms[0]:.4f}"
          f"   |mu_1 + mu_2| = {sym:.1e}")
