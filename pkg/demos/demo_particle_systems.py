"""The four particle systems and the PushTASEP/TASEP coupling.

Simulates short trajectories of each marginal system and verifies the exact
distributional coupling between the Bernoulli q-PushTASEP and the
parameter-inverted Bernoulli q-TASEP.
"""

import random
from fractions import Fraction as F

from qrsk.particles import (
    bernoulli_qpush_step,
    bernoulli_qtasep_step,
    coupling_check,
    exact_trajectory_distribution,
    geometric_qpush_step,
    geometric_qtasep_step,
    step_config,
)

rng = random.Random(1)
a = [1.0, 0.9, 0.8, 0.7]

print("=== trajectories from the step initial configuration ===")
for name, stepper, par in [
    ("Bernoulli q-PushTASEP (left jumps) ", bernoulli_qpush_step, 0.4),
    ("Bernoulli q-TASEP     (right jumps)", bernoulli_qtasep_step, 0.4),
    ("geometric q-PushTASEP (left jumps) ", geometric_qpush_step, 0.3),
    ("geometric q-TASEP     (right jumps)", geometric_qtasep_step, 0.3),
]:
    cfg = step_config(4)
    for _ in range(5):
        cfg = stepper(cfg, par, a, 0.5, rng)
    print(f"{name}: x(5) = {cfg}")

print("\n=== exact coupling: {t + x_i(t)} vs inverted-parameter q-TASEP ===")
q, beta = F(1, 2), F(1, 3)
aa = [F(1), F(2, 3), F(1, 2)]
for n in (1, 2, 3):
    for t in (1, 2, 3):
        ok = coupling_check(n, t, beta, aa[:n], q)
        print(f"N={n} T={t}: exact equality {ok}")

print("\n=== the exact time-2 law of a 2-particle q-PushTASEP ===")
d = exact_trajectory_distribution("BernoulliPush", 2, 2, beta, aa[:2], q)
for cfg, p in sorted(d.items(), reverse=True):
    print(f"  x = {cfg}: probability {p}")
print(f"  total: {sum(d.values())}")
