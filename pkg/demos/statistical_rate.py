"""How close can gradient EM get with m samples?

On a finite dataset the stationary point sits a small distance away from
the true parameters; that distance shrinks slowly — roughly like
m^(-1/4) — as the dataset grows.  We run a few fits per dataset size and
report the mean final parametric distance sqrt(sum_i pi_i |mu_i|^2).
"""

import math

import numpy as np

from gradem import (
    MixtureParams,
    RunConfig,
    SampleBatch,
    SamplePlan,
    draw_standard_normal,
    run_sample_gradient_em,
)

D, N_COMPONENTS, ETA, RUNS = 5, 5, 0.7, 3
weights = np.full(N_COMPONENTS, 1.0 / N_COMPONENTS)

print(f"{'m':>8} {'mean distance':>14} {'stop step':>10}")
results = []
for size in (1_000, 4_000, 16_000, 64_000):
    distances, stops = [], []
    for run in range(RUNS):
        plan = SamplePlan(size, seed=1000 * run + size, antithetic=False)
        dataset = draw_standard_normal(D, plan)
        rng = np.random.default_rng(run)
        init = MixtureParams(weights, 0.5 * rng.standard_normal((N_COMPONENTS, D)))
        config = RunConfig(
            initial_params=init,
            step_size=ETA,
            max_steps=8_000,
            plan=plan,
            fresh_batch_per_step=False,
            log_every=8_000,
            plateau_window=200,
            plateau_rtol=5e-3,
        )
        log = run_sample_gradient_em(config, dataset)
        distances.append(math.sqrt(log.final_parametric_error))
        stops.append(log.plateau_step or log.converged_step or config.max_steps)
    mean = float(np.mean(distances))
    results.append((size, mean))
    print(f"{size:>8} {mean:>14.4f} {int(np.mean(stops)):>10}")

(s0, e0), (s1, e1) = results[0], results[-1]
slope = math.log(e1 / e0) / math.log(s1 / s0)
print(f"\nempirical exponent over the sweep: {slope:.2f}  (expect about -0.25)")
