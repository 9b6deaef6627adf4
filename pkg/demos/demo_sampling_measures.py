"""The randomized insertion dynamics sample the right measures.

Runs the Bernoulli row insertion from the zero array and compares the exact
trajectory distribution with the closed-form process weights, then shows the
q = 0 degeneration to classical RSK and a main-equation sweep.
"""

import random
from fractions import Fraction as F

from qrsk.dynamics import (
    ROW_BETA,
    DynamicsSpec,
    classical_rsk_step,
    exact_array_distribution,
    main_equation_sweep,
    sample_step,
)
from qrsk.gt import zero_array
from qrsk.whittaker import SpecParams, process_weight

q = F(1, 2)
a = (F(1), F(2, 3))
betas = [F(1, 3), F(1, 4)]

print("=== exact distribution of the Bernoulli row insertion (N=2, T=2) ===")
spec = DynamicsSpec(ROW_BETA, q, betas, a)
dist = exact_array_distribution(spec, 2, 2)
measure = SpecParams.betas(*betas)
print(f"{'array':<28} {'dynamics':<12} {'measure':<12}")
for arr, p in sorted(dist.items()):
    w = process_weight(arr, a, measure, q)
    mark = "ok" if p == w else "MISMATCH"
    print(f"{str(arr):<28} {str(p):<12} {str(w):<12} {mark}")
print(f"total mass: {sum(dist.values())}")

print("\n=== q = 0: the sampler is the classical row insertion ===")
rng = random.Random(0)
arr = zero_array(3)
spec0 = DynamicsSpec(ROW_BETA, 0.0, 0.5, (1.0, 1.0, 1.0))
for step in range(3):
    vs = tuple(rng.randint(0, 1) for _ in range(3))
    sampled = sample_step(spec0, arr, rng, inputs=vs)
    classical = classical_rsk_step(ROW_BETA, arr, vs)
    print(f"inputs {vs}: sampled == classical: {sampled == classical}")
    arr = sampled

print("\n=== structural equations, exact rational sweep (j = 3, parts <= 2) ===")
n = main_equation_sweep(ROW_BETA, 3, 2, F(1, 3), F(1), q)
print(f"all {n} admissible squares satisfy the equation exactly")
