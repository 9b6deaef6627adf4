"""Nested-contour q-moment formulas evaluated exactly by residue expansion.

The k-fold contour integral is expanded variable by variable, outermost
contour first: each integral is replaced by the sum of residues at the poles
inside its contour, which are the points 1/a_i together with q times each
deeper integration variable.  The excluded points (0 and the negative
parameter points) never enter.  Every leaf of this pole-assignment tree is a
rational-function evaluation, so the result is an exact rational number.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import sympy as sp

from .particles import exact_trajectory_distribution


class MomentDivergenceError(ArithmeticError):
    """The requested q-moment is a divergent series."""


@dataclass(frozen=True)
class MomentQuery:
    """A joint q-moment E prod_i q^(x_{n_i}(t) + n_i) of a particle system.

    system 'BernoulliPush' (parameters beta, a_1..a_N, q; a_i distinct),
    'TwoPart' (t_right TASEP steps then t_left PushTASEP steps, a = 1), or
    'GeometricPush' (parameter alpha; only finitely many moments exist).
    """

    k: int
    n: Tuple[int, ...]
    t: int
    q: Fraction
    beta: Fraction
    a: Tuple[Fraction, ...] = ()
    system: str = "BernoulliPush"
    t_left: int = 0

    def __post_init__(self):
        if self.k != len(self.n) or self.k < 1:
            raise ValueError("need k = len(n) >= 1")
        if any(self.n[i] < self.n[i + 1] for i in range(self.k - 1)):
            raise ValueError("n must be weakly decreasing")
        if min(self.n) < 1:
            raise ValueError("moment indices start at 1")
        if self.system == "BernoulliPush":
            if max(self.n) > len(self.a):
                raise ValueError("n_i must not exceed the particle count")
            if len(set(self.a)) != len(self.a):
                raise ValueError("residue expansion needs pairwise distinct a_i")


def _integrand(query: MomentQuery, z):
    q = sp.Rational(query.q)
    beta = sp.Rational(query.beta)
    k = query.k
    expr = sp.Integer(1)
    for A in range(k):
        for B in range(A + 1, k):
            expr *= (z[A] - z[B]) / (z[A] - q * z[B])
    for j in range(k):
        if query.system == "TwoPart":
            expr *= (
                1
                / (1 - z[j]) ** query.n[j]
                * ((1 + q * beta * z[j]) / (1 + beta * z[j])) ** query.t
                * ((1 + beta / (q * z[j])) / (1 + beta / z[j])) ** query.t_left
                / z[j]
            )
        elif query.system == "GeometricPush":
            for i in range(query.n[j]):
                expr *= 1 / (1 - sp.Rational(query.a[i]) * z[j])
            expr *= (1 / (1 - beta / (q * z[j]))) ** query.t / z[j]
        else:
            for i in range(query.n[j]):
                expr *= 1 / (1 - sp.Rational(query.a[i]) * z[j])
            expr *= ((1 + beta / (q * z[j])) / (1 + beta / z[j])) ** query.t / z[j]
    return expr


def _residue_at(expr, z, point):
    """Residue of a rational expression at a pole of any finite order.

    The pole order is read off by dividing (z - point) out of the denominator;
    the derivative formula then reduces everything to substitutions, which is
    far cheaper than generic series expansion.
    """
    num, den = sp.fraction(sp.cancel(sp.together(expr)))
    order = 0
    while sp.cancel(den.subs(z, point)) == 0:
        den = sp.cancel(den / (z - point))
        order += 1
    if order == 0:
        return sp.Integer(0)
    g = num / den
    if order > 1:
        g = sp.diff(g, z, order - 1)
    return sp.cancel(g.subs(z, point) / sp.factorial(order - 1))


def nested_moment_residues(query: MomentQuery) -> Fraction:
    """Evaluate the nested contour integral for the queried q-moment."""
    k = query.k
    q = sp.Rational(query.q)
    z = sp.symbols(f"z1:{k + 1}")
    expr = _integrand(query, z)
    if query.system == "TwoPart":
        inside = [sp.Integer(1)]
    else:
        inside = sorted({sp.Rational(1) / sp.Rational(ai) for ai in query.a[: max(query.n)]})
    for j in range(k):
        total = sp.Integer(0)
        for p in inside:
            total += _residue_at(expr, z[j], p)
        for B in range(j + 1, k):
            total += _residue_at(expr, z[j], q * z[B])
        expr = sp.cancel(sp.together(total))
    pref = sp.Integer(-1) ** k * q ** ((k * (k - 1)) // 2)
    value = sp.Rational(sp.cancel(pref * expr))
    return Fraction(value.p, value.q)


def exact_qmoment(query: MomentQuery) -> Fraction:
    """The same moment from the exact trajectory distribution (oracle side)."""
    q = query.q
    if query.system == "GeometricPush":
        return _geometric_qmoment_series(query)
    if query.system == "TwoPart":
        a = tuple(q * 0 + 1 for _ in range(max(query.n)))
        dist = exact_trajectory_distribution(
            "TwoPart", len(a), query.t, query.beta, a, q, t2=query.t_left
        )
    else:
        dist = exact_trajectory_distribution(
            "BernoulliPush", len(query.a), query.t, query.beta, query.a, q
        )
    total = q * 0
    for cfg, p in dist.items():
        w = p
        for ni in query.n:
            w *= q ** (cfg[ni - 1] + ni)
        total += w
    return total


def _geometric_qmoment_series(query: MomentQuery, rel_tol=1e-12) -> float:
    """Brute-force E prod q^(x+n) for the geometric q-PushTASEP, floating.

    Each extra unit of independent displacement contributes a factor of at
    most max(alpha a_i) q^{-k} to the moment series, so the series converges
    iff that ratio is < 1; otherwise MomentDivergenceError is raised.  The
    independent jumps are capped so the dropped tail is below rel_tol.
    """
    import math

    from .qnum import INF, PhiParams, phi_weight, q_geometric_pmf

    q = float(query.q)
    alpha = float(query.beta)
    a = [float(x) for x in query.a]
    n_parts = len(a)
    ratio = max(alpha * ai for ai in a) * q ** (-query.k)
    if ratio >= 1:
        raise MomentDivergenceError(
            f"series ratio {ratio:.3f} >= 1: the requested q-moment diverges"
        )
    vcap = max(4, int(math.log(rel_tol * (1 - ratio)) / math.log(ratio)) + 2)

    def transitions(cfg):
        def rec(j, x, prob):
            if j == n_parts:
                yield tuple(x), prob
                return
            pushes = [(0, 1.0)]
            if j > 0:
                gap = cfg[j - 1] - cfg[j] - 1
                c = cfg[j - 1] - x[j - 1]
                if c > 0:
                    params = PhiParams.inverse(q, gap, INF, c)
                    pushes = [
                        (w, float(phi_weight(params, w)))
                        for w in range(max(0, c - gap), c + 1)
                    ]
            for v in range(vcap + 1):
                pv = q_geometric_pmf(alpha * a[j], q, v)
                for w, pw in pushes:
                    if pw == 0.0:
                        continue
                    x[j] = cfg[j] - v - w
                    yield from rec(j + 1, x, prob * pv * pw)
            x[j] = cfg[j]

        yield from rec(0, list(cfg), 1.0)

    from .particles import step_config

    dist = {step_config(n_parts): 1.0}
    for _ in range(query.t):
        new = {}
        for cfg, p in dist.items():
            for ncfg, tp in transitions(cfg):
                new[ncfg] = new.get(ncfg, 0.0) + p * tp
        dist = new
    total = 0.0
    for cfg, p in dist.items():
        w = p
        for ni in query.n:
            w *= q ** (cfg[ni - 1] + ni)
        total += w
    return total
