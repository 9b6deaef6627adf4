"""One-dimensional marginal particle systems and their exact distributions.

Conventions follow the array marginals they come from: the two PushTASEPs
jump left (coordinates x_i = -(rightmost array particle at level i) - i), the
two TASEPs jump right.  `flip(cfg)` maps between the conventions.  The step
initial configuration is x_i(0) = -i.
"""

from __future__ import annotations

from typing import Dict, Sequence, Tuple

from .qnum import INF, PhiParams, phi_sample, qpow, sample_q_geometric

ParticleConfig = Tuple[int, ...]


def step_config(n: int) -> ParticleConfig:
    return tuple(-i for i in range(1, n + 1))


def flip(cfg: Sequence[int]) -> ParticleConfig:
    """Mirror a configuration, exchanging the left/right jump conventions."""
    return tuple(-x for x in cfg)


def _check_ordered(x: Sequence[int]) -> None:
    if any(x[i] <= x[i + 1] for i in range(len(x) - 1)):
        raise ValueError("particles must be strictly decreasing")


def bernoulli_qpush_step(cfg, beta, a, q, rng) -> ParticleConfig:
    """One step of the Bernoulli q-PushTASEP (left jumps)."""
    _check_ordered(cfg)
    x = list(cfg)
    prev_jumped = False
    for j in range(len(x)):
        bj = float(beta * a[j])
        if prev_jumped:
            gap = cfg[j - 1] - cfg[j] - 1
            p = (bj + float(qpow(float(q), gap))) / (1 + bj)
        else:
            p = bj / (1 + bj)
        jumped = rng.random() < p
        if jumped:
            x[j] -= 1
        prev_jumped = jumped
    return tuple(x)


def bernoulli_qtasep_step(cfg, beta, a, q, rng) -> ParticleConfig:
    """One step of the Bernoulli q-TASEP (right jumps)."""
    _check_ordered(cfg)
    x = list(cfg)
    prev_jumped = True  # the first particle is never blocked
    for j in range(len(x)):
        bj = float(beta * a[j])
        if j == 0:
            p = bj / (1 + bj)
        elif prev_jumped:
            p = bj / (1 + bj)
        else:
            gap = cfg[j - 1] - cfg[j] - 1
            p = bj * (1 - float(qpow(float(q), gap))) / (1 + bj)
        jumped = rng.random() < p
        if jumped:
            x[j] += 1
        prev_jumped = jumped
    return tuple(x)


def geometric_qpush_step(cfg, alpha, a, q, rng) -> ParticleConfig:
    """One step of the geometric q-PushTASEP (left jumps).

    x_j jumps by an independent q-geometric amount plus a push split off the
    move of its right neighbor.
    """
    _check_ordered(cfg)
    x = list(cfg)
    for j in range(len(x)):
        v = sample_q_geometric(float(alpha * a[j]), float(q), rng)
        w = 0
        if j > 0:
            gap = cfg[j - 1] - cfg[j] - 1
            c = cfg[j - 1] - x[j - 1]  # left displacement of the neighbor
            if c > 0:
                w = phi_sample(PhiParams.inverse(q, gap, INF, c), rng)
        x[j] -= v + w
    return tuple(x)


def geometric_qtasep_step(cfg, alpha, a, q, rng) -> ParticleConfig:
    """One step of the geometric q-TASEP (right jumps)."""
    _check_ordered(cfg)
    x = list(cfg)
    for j in range(len(x)):
        gap = INF if j == 0 else cfg[j - 1] - cfg[j] - 1
        if gap == INF:
            w = sample_q_geometric(float(alpha * a[j]), float(q), rng)
        elif gap == 0:
            w = 0
        else:
            w = phi_sample(PhiParams.direct(q, alpha * a[j], q * 0, gap), rng)
        x[j] += w
    return tuple(x)


# ---------------------------------------------------------------------------
# exact trajectory distributions (Bernoulli systems: finite branching)
# ---------------------------------------------------------------------------

def _bernoulli_push_transitions(cfg, beta, a, q):
    one = q * 0 + 1

    def rec(j, x, prob, prev_jumped):
        if j == len(x):
            yield tuple(x), prob
            return
        bj = beta * a[j]
        if prev_jumped:
            gap = cfg[j - 1] - cfg[j] - 1
            p = (bj + qpow(q, gap)) / (1 + bj)
        else:
            p = bj / (1 + bj)
        for jumped in (False, True):
            pr = (one - p) if not jumped else p
            if pr == 0:
                continue
            x[j] -= 1 if jumped else 0
            yield from rec(j + 1, x, prob * pr, jumped)
            x[j] += 1 if jumped else 0

    yield from rec(0, list(cfg), one, False)


def _bernoulli_tasep_transitions(cfg, beta, a, q):
    one = q * 0 + 1

    def rec(j, x, prob, prev_jumped):
        if j == len(x):
            yield tuple(x), prob
            return
        bj = beta * a[j]
        if j == 0 or prev_jumped:
            p = bj / (1 + bj)
        else:
            gap = cfg[j - 1] - cfg[j] - 1
            p = bj * (1 - qpow(q, gap)) / (1 + bj)
        for jumped in (False, True):
            pr = (one - p) if not jumped else p
            if pr == 0:
                continue
            x[j] += 1 if jumped else 0
            yield from rec(j + 1, x, prob * pr, jumped)
            x[j] -= 1 if jumped else 0

    yield from rec(0, list(cfg), one, True)


_TRANSITIONS = {
    "BernoulliPush": _bernoulli_push_transitions,
    "BernoulliTasep": _bernoulli_tasep_transitions,
}


def evolve_distribution(dist, system: str, steps: int, beta, a, q):
    """Push an exact configuration distribution through `steps` updates."""
    trans = _TRANSITIONS[system]
    for _ in range(steps):
        new: Dict[ParticleConfig, object] = {}
        for cfg, p in dist.items():
            for ncfg, tp in trans(cfg, beta, a, q):
                new[ncfg] = new.get(ncfg, q * 0) + p * tp
        dist = new
    return dist


def exact_trajectory_distribution(system: str, n: int, t: int, beta, a, q, t2: int = 0):
    """Exact time-t distribution from the step initial configuration.

    system 'BernoulliPush' | 'BernoulliTasep' | 'TwoPart'; for 'TwoPart',
    `t` right-jumping TASEP steps are followed by `t2` left-jumping PushTASEP
    steps (both with the same parameters).
    """
    dist = {step_config(n): q * 0 + 1}
    if system == "TwoPart":
        dist = evolve_distribution(dist, "BernoulliTasep", t, beta, a, q)
        return evolve_distribution(dist, "BernoulliPush", t2, beta, a, q)
    return evolve_distribution(dist, system, t, beta, a, q)


def coupling_check(n: int, t: int, beta, a, q) -> bool:
    """Exact distributional identity between the two Bernoulli systems.

    The shifted PushTASEP {t + x_i(t)} with parameters (beta, a) must equal
    the q-TASEP with inverted parameters (1/beta, 1/a).
    """
    push = exact_trajectory_distribution("BernoulliPush", n, t, beta, a, q)
    shifted = {tuple(x + t for x in cfg): p for cfg, p in push.items()}
    inv_a = [1 / ai for ai in a]
    tasep = exact_trajectory_distribution("BernoulliTasep", n, t, 1 / beta, inv_a, q)
    return shifted == tasep
