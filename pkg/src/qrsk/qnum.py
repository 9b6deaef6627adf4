"""q-series primitives and the q-deformed Beta-binomial distribution.

All formulas are generic over the scalar type: pass `fractions.Fraction`
values for exact rational arithmetic, or `float` values for fast numerics.
The only operations restricted to floats are the ones that genuinely need
an infinite product, and those raise `ExactModeError` on exact scalars.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

Scalar = Union[Fraction, float, int]

INF = math.inf

# Truncation policy for infinite q-Pochhammer products: stop once the running
# term |a q^i| drops below 2^-60, which keeps the relative error of the
# product under ~2^-50 for |q| < 1.
_POCHHAMMER_TAIL = 2.0 ** -60


class ExactModeError(TypeError):
    """An operation that requires floating arithmetic got exact scalars."""


def is_exact(x: Scalar) -> bool:
    return isinstance(x, (Fraction, int)) and not isinstance(x, bool)


def qpow(q: Scalar, e) -> Scalar:
    """q**e with the conventions q**inf = 0 and 0**0 = 1."""
    if e is None or e == INF:
        return q * 0
    if e < 0 and q == 0:
        raise ZeroDivisionError("0 ** negative exponent")
    if q == 0:
        return q ** 0 if e == 0 else q * 0
    return q ** e


def q_pochhammer(a: Scalar, q: Scalar, m: int) -> Scalar:
    """(a;q)_m with the three-branch definition (m > 0, m = 0, m < 0)."""
    if m == INF:
        return q_pochhammer_inf(a, q)
    one = a * 0 + 1
    if m == 0:
        return one
    if m > 0:
        p = one
        x = a
        for _ in range(m):
            p *= 1 - x
            x *= q
        return p
    # m < 0: reciprocal product over factors 1 - a q^{-i}, i = 1..-m
    p = one
    x = a
    for _ in range(-m):
        x /= q
        f = 1 - x
        if f == 0:
            raise ZeroDivisionError("vanishing factor in (a;q)_m with m < 0")
        p /= f
    return p


def q_pochhammer_inf(a: Scalar, q: Scalar) -> float:
    """(a;q)_inf, truncated at |a q^i| < 2^-60.  Floating realization only."""
    if a == 0:
        return 1.0
    if is_exact(a) or is_exact(q):
        raise ExactModeError(
            "(a;q)_inf is not available on exact scalars; "
            "use a normalized (product-free) formula instead"
        )
    if not abs(q) < 1:
        raise ValueError("(a;q)_inf needs |q| < 1")
    p = 1.0
    x = float(a)
    while abs(x) >= _POCHHAMMER_TAIL:
        p *= 1.0 - x
        x *= q
    return p


def log_q_pochhammer_inf(a: float, q: float) -> float:
    """log (a;q)_inf for 0 <= a < 1, 0 <= q < 1; safe when the product underflows."""
    if a == 0:
        return 0.0
    if not (0 <= a < 1 and 0 <= q < 1):
        raise ValueError("log (a;q)_inf needs 0 <= a < 1, 0 <= q < 1")
    s = 0.0
    x = float(a)
    while x >= _POCHHAMMER_TAIL:
        s += math.log1p(-x)
        x *= q
    return s


def q_binomial(n, k: int, q: Scalar) -> Scalar:
    """Gaussian binomial coefficient; n = inf is allowed in floating mode only."""
    if k < 0 or (n != INF and k > n):
        raise ValueError(f"q_binomial needs 0 <= k <= n, got n={n}, k={k}")
    if n == INF:
        if is_exact(q):
            raise ExactModeError("q_binomial with n = inf needs floating scalars")
        return 1.0 / q_pochhammer(q, q, k)
    # prod_{i=1}^{k} (1 - q^{n-k+i}) / (1 - q^i); exact-friendly
    num = q * 0 + 1
    den = num
    for i in range(1, k + 1):
        num *= 1 - qpow(q, n - k + i)
        den *= 1 - qpow(q, i)
    return num / den


def q_multinomial(n: int, m: int, k: int, q: Scalar) -> Scalar:
    """(q;q)_n / ((q;q)_k (q;q)_m (q;q)_{n-m-k})."""
    return q_binomial(n, m, q) * q_binomial(n - m, k, q)


def q_geometric_pmf(alpha: Scalar, q: Scalar, n: int) -> float:
    """pmf (alpha;q)_inf alpha^n / (q;q)_n of the q-geometric distribution."""
    return q_pochhammer_inf(alpha, q) * alpha ** n / q_pochhammer(q, q, n)


# ---------------------------------------------------------------------------
# q-deformed Beta-binomial distribution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhiParams:
    """Parameters of the q-deformed Beta-binomial weight.

    Two accepted regimes:

    * direct:  0 <= q < 1 and 0 <= eta <= xi < 1, any count y (may be INF);
    * inverse: base q^{-1} with xi = q^a, eta = q^b for integer exponents
      0 <= a <= b and y <= b.  Pass b = INF for eta = 0.  Exponents are kept
      as integers (never pre-exponentiated) so that b = INF stays exact.
    """

    q: Scalar
    y: Union[int, float]
    xi: Optional[Scalar] = None
    eta: Optional[Scalar] = None
    a: Optional[int] = None
    b: Union[int, float, None] = None

    @staticmethod
    def direct(q: Scalar, xi: Scalar, eta: Scalar, y) -> "PhiParams":
        if not (0 <= q < 1 and 0 <= eta <= xi < 1):
            raise ValueError("direct regime needs 0 <= q < 1, 0 <= eta <= xi < 1")
        return PhiParams(q=q, y=y, xi=xi, eta=eta)

    @staticmethod
    def inverse(q: Scalar, a: int, b, y: int) -> "PhiParams":
        if b is None:
            b = INF
        if not (0 <= q < 1):
            raise ValueError("inverse regime needs 0 <= q < 1")
        if a < 0 or a > b or y > b:
            raise ValueError("inverse regime needs 0 <= a <= b and y <= b")
        return PhiParams(q=q, y=y, a=a, b=b)

    @property
    def is_inverse(self) -> bool:
        return self.a is not None


def phi_support(p: PhiParams) -> range:
    """The integer support of the weight as a (possibly empty) range."""
    if p.is_inverse:
        lo = max(0, p.y - p.a)
        hi = p.y if p.b == INF else min(p.y, p.b - p.a)
        return range(lo, hi + 1)
    if p.y == INF:
        raise ValueError("support of the y = inf direct weight is unbounded")
    return range(0, p.y + 1)


def phi_weight(p: PhiParams, s: int) -> Scalar:
    """The q-deformed Beta-binomial weight of s."""
    if s < 0 or s > p.y:
        raise ValueError(f"s = {s} outside 0..y = {p.y}")
    if p.is_inverse:
        return _phi_inverse_weight(p.q, p.a, p.b, p.y, s)
    return _phi_direct_weight(p.q, p.xi, p.eta, p.y, s)


def phi_pmf(p: PhiParams):
    """List of (s, weight) over the support; finite y / inverse regime only."""
    return [(s, phi_weight(p, s)) for s in phi_support(p)]


def _phi_direct_weight(q, xi, eta, y, s):
    one = q * 0 + 1
    if xi == 0:
        # eta <= xi forces eta = 0 and the weight degenerates to delta_0
        return one if s == 0 else one * 0
    head = one if s == 0 else xi ** s * q_pochhammer(eta / xi, q, s)
    if y == INF:
        ratio = 1.0 if eta == 0 else q_pochhammer_inf(eta, q)
        return head / q_pochhammer(q, q, s) * q_pochhammer_inf(xi, q) / ratio
    return (
        head
        * q_pochhammer(xi, q, y - s)
        / q_pochhammer(eta, q, y)
        * q_binomial(y, s, q)
    )


def _phi_inverse_weight(q, a, b, c, s):
    """phi_{q^{-1}, q^a, q^b}(s | c) in a manifestly positive product form.

    Zero outside the support s in [max(0, c-a), min(c, b-a)]; inside it the
    weight is phi(s0) times a product of positive ratios, where s0 is the left
    support edge.  At q = 0 the distribution is the point mass at max(c-a, 0).
    """
    zero = q * 0
    one = zero + 1
    if s < 0 or s > c:
        return zero
    if s > (b - a if b != INF else c) or c - s > a:
        return zero
    if q == 0:
        return one if s == max(c - a, 0) else zero
    s0 = max(0, c - a)
    w = _phi_inverse_left_edge(q, a, b, c)
    for r in range(s0, s):
        w *= _phi_inverse_ratio(q, a, b, c, r)
    return w


def _phi_inverse_left_edge(q, a, b, c):
    """phi_{q^{-1},q^a,q^b}(s0 | c) at the left support edge s0 = max(0, c-a)."""
    one = q * 0 + 1
    if c <= a:
        # s0 = 0: (q^a;q^{-1})_c / (q^b;q^{-1})_c, positive factor by factor
        w = one
        for i in range(c):
            w *= 1 - qpow(q, a - i)
            w /= 1 - qpow(q, b - i) if b != INF else one
        return w
    # s0 = c-a: q^{a(c-a)} (q^{b-a};q^{-1})_{c-a} (q^a;q^{-1})_a binom(c,c-a)_{q^{-1}}
    #           / (q^b;q^{-1})_c, rewritten so every factor is positive.
    w = q_binomial(c, a, q)
    for i in range(c - a):
        w *= one if b == INF else 1 - qpow(q, b - a - i)
    for i in range(a):
        w *= 1 - qpow(q, a - i)
    if b != INF:
        for i in range(c):
            w /= 1 - qpow(q, b - i)
    return w


def _phi_inverse_ratio(q, a, b, c, r):
    """phi(r+1)/phi(r) for the inverse-regime weight, positive on the support."""
    one = q * 0 + 1
    num = one if b == INF else 1 - qpow(q, b - a - r)
    num = num * (1 - qpow(q, c - r))
    den = (1 - qpow(q, a - c + r + 1)) * (1 - qpow(q, r + 1))
    return qpow(q, a + 2 * r + 1 - c) * num / den


def phi_sample(p: PhiParams, rng) -> int:
    """Inverse-CDF draw from the weight; floating realization.

    Costs O(support start) plus O(1) per visited support point, so draws stay
    cheap even when the count y is large (as in the scaling experiments).
    """
    u = rng.random()
    if p.is_inverse:
        sup = phi_support(p)
        if len(sup) == 0:
            raise ValueError("empty support")
        s = sup[0]
        if p.q == 0:
            return s
        w = float(_phi_inverse_weight(p.q, p.a, p.b, p.y, s))
        acc = w
        while u > acc and s + 1 in sup:
            w *= float(_phi_inverse_ratio(p.q, p.a, p.b, p.y, s))
            s += 1
            acc += w
            if w == 0.0:
                break
        return s
    q = float(p.q)
    xi = float(p.xi)
    eta = float(p.eta)
    if xi == 0:
        return 0
    if p.y == INF:
        w = q_pochhammer_inf(xi, q) / (1.0 if eta == 0 else q_pochhammer_inf(eta, q))
        s = 0
        acc = w
        qs = q
        while u > acc:
            # ratio phi(s+1)/phi(s) = xi (1 - (eta/xi) q^s) / (1 - q^{s+1})
            w *= (xi - eta * (qs / q)) / (1.0 - qs)
            s += 1
            qs *= q
            acc += w
            if w == 0.0:
                break
        return s
    y = p.y
    w = float(q_pochhammer(xi, q, y) / q_pochhammer(eta, q, y))
    s = 0
    acc = w
    while u > acc and s < y:
        # phi(s+1)/phi(s) = xi (1-(eta/xi)q^s)(1-q^{y-s}) / ((1-xi q^{y-s-1})(1-q^{s+1}))
        num = (xi - eta * q ** s) * (1.0 - q ** (y - s))
        den = (1.0 - xi * q ** (y - s - 1)) * (1.0 - q ** (s + 1))
        w *= num / den
        s += 1
        acc += w
        if w == 0.0:
            break
    return s


def sample_q_geometric(alpha: float, q: float, rng, log_norm: Optional[float] = None) -> int:
    """Draw from pmf (alpha;q)_inf alpha^n/(q;q)_n by an inverse-CDF walk.

    `log_norm` may carry a precomputed log (alpha;q)_inf; the walk itself uses
    only O(1) updates per step, so the draw costs O(sampled value).
    """
    if not (0 <= alpha < 1 and 0 <= q < 1):
        raise ValueError("q-geometric needs 0 <= alpha < 1, 0 <= q < 1")
    if log_norm is None:
        log_norm = log_q_pochhammer_inf(alpha, q)
    u = rng.random()
    w = math.exp(log_norm)
    acc = w
    n = 0
    qn = q
    while u > acc:
        w *= alpha / (1.0 - qn)
        n += 1
        qn *= q
        acc += w
        if w == 0.0:
            break
    return n
