"""Joint q-moments by nested-contour residues, against brute force.

The k-fold contour integral is expanded into residues at the poles the
contours enclose; every value is an exact rational and must agree with the
expectation computed from the exact trajectory distribution.
"""

import time
from fractions import Fraction as F

from qrsk.moments import MomentQuery, exact_qmoment, nested_moment_residues

q, beta = F(1, 2), F(1, 3)
a = (F(1), F(2, 3), F(1, 2))

print("=== Bernoulli q-PushTASEP moments ===")
print(f"{'k':<3}{'n':<10}{'t':<3}{'residues':<18}{'trajectories':<18}")
for k, ns in [(1, (1,)), (1, (3,)), (2, (2, 1)), (2, (3, 3))]:
    for t in (1, 2):
        qy = MomentQuery(k, ns, t, q, beta, a)
        t0 = time.time()
        r = nested_moment_residues(qy)
        e = exact_qmoment(qy)
        flag = "ok" if r == e else "MISMATCH"
        print(f"{k:<3}{str(ns):<10}{t:<3}{str(r):<18}{str(e):<18}{flag} ({time.time()-t0:.2f}s)")

print("\n=== two-part process (TASEP steps then PushTASEP steps, a = 1) ===")
for ns, tr, tl in [((2,), 2, 1), ((2, 1), 1, 1), ((2, 1), 2, 2)]:
    qy = MomentQuery(len(ns), ns, tr, q, beta, system="TwoPart", t_left=tl)
    r = nested_moment_residues(qy)
    e = exact_qmoment(qy)
    print(f"n={ns} tR={tr} tL={tl}: {r} == {e}: {r == e}")

print("\n=== geometric q-PushTASEP (finitely many moments exist) ===")
qg = MomentQuery(1, (2,), 1, q, F(1, 5), (F(1), F(2, 3)), system="GeometricPush")
r = nested_moment_residues(qg)
e = exact_qmoment(qg)
print(f"k=1 n=(2,) t=1: residues {float(r):.12f}, series {e:.12f}")

from qrsk.moments import MomentDivergenceError

try:
    exact_qmoment(MomentQuery(2, (1, 1), 1, q, F(4, 5), (F(1),), system="GeometricPush"))
except MomentDivergenceError as ex:
    print(f"k=2 at alpha=4/5: {ex}")
