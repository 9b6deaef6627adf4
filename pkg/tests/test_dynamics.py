import math
import random
from fractions import Fraction as F

import pytest

import qrsk.dynamics as dyn
from qrsk.dynamics import (
    BETA_KINDS,
    COL_ALPHA,
    COL_BETA,
    PUSH_BLOCK_ALPHA,
    PUSH_BLOCK_BETA,
    ROW_ALPHA,
    ROW_BETA,
    RSK_KINDS,
    DynamicsSpec,
    LevelUpdateContext,
    classical_level_update,
    classical_rsk_step,
    col_alpha_prob,
    col_beta_prob,
    exact_array_distribution,
    level_candidates,
    main_equation_residual,
    main_equation_sweep,
    push_block_prob,
    row_alpha_prob,
    row_alpha_v,
    row_beta_prob,
    sample_step,
)
from qrsk.gt import (
    complement,
    enumerate_arrays_with_top,
    enumerate_signatures,
    interlaces_h,
    weight,
    zero_array,
)
from qrsk.qnum import INF, PhiParams, phi_weight, q_pochhammer
from qrsk.whittaker import SpecParams, process_weight

Q = F(1, 2)
BETA = F(1, 3)
A6 = F(1)


def test_row_beta_figure_captions():
    # two islands at level 5 -> 6; displayed transitions from the worked figure
    lam_bar, nu_bar = (6, 5, 5, 3, 2), (7, 6, 5, 4, 3)
    ctx_up = LevelUpdateContext(lam_bar, nu_bar, (7, 5, 5, 3, 3, 2))
    p_up = row_beta_prob(ctx_up, (8, 6, 6, 4, 3, 3), BETA, A6, Q)
    assert p_up == (BETA * A6 / (1 + BETA * A6)) * (1 - Q)
    ctx_low = LevelUpdateContext(lam_bar, nu_bar, (8, 6, 5, 5, 3, 2))
    p_low = row_beta_prob(ctx_low, (9, 7, 5, 5, 4, 3), BETA, A6, Q)
    assert p_low == (1 / (1 + BETA * A6)) * Q ** 3


def test_row_beta_no_lower_movement():
    lam_bar = nu_bar = (2,)
    lam = (3, 1)
    ctx = LevelUpdateContext(lam_bar, nu_bar, lam)
    assert row_beta_prob(ctx, lam, BETA, A6, Q) == 1 / (1 + BETA * A6)
    assert row_beta_prob(ctx, (4, 1), BETA, A6, Q) == BETA * A6 / (1 + BETA * A6)
    assert row_beta_prob(ctx, (3, 2), BETA, A6, Q) == 0  # nothing may push lam_2


def test_col_beta_figure_captions():
    lam_bar, nu_bar = (7, 6, 3, 3, 2), (8, 6, 4, 4, 2)
    ctx_up = LevelUpdateContext(lam_bar, nu_bar, (7, 7, 5, 3, 3, 0))
    p_up = col_beta_prob(ctx_up, (8, 8, 5, 4, 3, 0), BETA, A6, Q)
    assert p_up == (1 / (1 + BETA * A6)) * (Q + Q ** 2) / (1 + Q + Q ** 2)
    ctx_low = LevelUpdateContext(lam_bar, nu_bar, (7, 7, 6, 3, 3, 0))
    p_low = col_beta_prob(ctx_low, (8, 8, 6, 4, 4, 0), BETA, A6, Q)
    assert p_low == (BETA * A6 / (1 + BETA * A6)) * Q ** 2


def test_row_alpha_figure_caption():
    lam_bar, nu_bar = (29, 19, 12, 8, 2), (33, 24, 16, 8, 5)
    lam = (35, 25, 15, 9, 6, 0)
    nu = (39, 30, 20, 11, 7, 2)  # splits (1,2,2,-,1) and an independent jump of 3
    v = row_alpha_v(LevelUpdateContext(lam_bar, nu_bar, lam), nu, Q)
    expected = (
        phi_weight(PhiParams.inverse(Q, 4, 6, 3), 1)
        * phi_weight(PhiParams.inverse(Q, 3, 7, 4), 2)
        * phi_weight(PhiParams.inverse(Q, 6, 10, 5), 2)
        * phi_weight(PhiParams.inverse(Q, 6, INF, 4), 1)
        / q_pochhammer(Q, Q, 3)
    )
    assert v == expected
    # the conditional probability adds the q-geometric jump factors
    alpha, aj, qf = 0.3, 0.9, 0.5
    pf = row_alpha_prob(LevelUpdateContext(lam_bar, nu_bar, lam), nu, alpha, aj, qf)
    from qrsk.qnum import q_pochhammer_inf

    assert abs(pf - float(row_alpha_v(LevelUpdateContext(lam_bar, nu_bar, lam), nu, qf))
               * (alpha * aj) ** 3 * q_pochhammer_inf(alpha * aj, qf)) < 1e-15


def test_row_alpha_pure_independent_jump():
    # no movement below: probability is the q-geometric law of the jump
    lam_bar = nu_bar = (2, 1)
    lam = (3, 2, 0)
    ctx = LevelUpdateContext(lam_bar, nu_bar, lam)
    alpha, aj, qf = 0.25, 0.8, 0.5
    from qrsk.qnum import q_geometric_pmf

    for n in range(4):
        nu = (3 + n, 2, 0)
        assert abs(row_alpha_prob(ctx, nu, alpha, aj, qf) - q_geometric_pmf(alpha * aj, qf, n)) < 1e-14
    assert row_alpha_prob(ctx, (3, 2, 1), alpha, aj, qf) == 0


def test_col_alpha_level_one_equivalences():
    # j = 1 has no conditioning; at j = 2 with no movement below, the total
    # voluntary displacement is q-geometric
    qf, alpha, aj = 0.5, 0.3, 0.9
    lam_bar = nu_bar = (3,)
    lam = (4, 1)
    ctx = LevelUpdateContext(lam_bar, nu_bar, lam)
    from qrsk.qnum import q_geometric_pmf

    for total in range(4):
        mass = 0.0
        for x2 in range(total + 1):  # x2 goes to the leftmost particle
            nu = (4 + total - x2, 1 + x2)
            if nu[1] > nu[0]:
                continue
            mass += col_alpha_prob(ctx, nu, alpha, aj, qf)
        assert abs(mass - q_geometric_pmf(alpha * aj, qf, total)) < 1e-12, total


def test_col_alpha_complementary_cases():
    # all c_i = 0: the only nonzero transitions add the voluntary jumps
    qf = F(1, 2)
    lam_bar = nu_bar = (2, 1)
    lam = (2, 2, 0)
    ctx = LevelUpdateContext(lam_bar, nu_bar, lam)
    # leftmost blocked by lam_bar_2 = 1: single impulse donates to position 2?
    # position 3 has gap = lam_bar_2 - lam_3 = 1, so it can absorb one unit
    p = dyn.col_alpha_v(ctx, (2, 2, 1), F(1, 3), F(1), qf)
    assert p > 0
    assert dyn.col_alpha_v(ctx, (2, 2, 0), F(1, 3), F(1), qf) > 0


def test_main_equation_hand_example():
    assert main_equation_residual(ROW_BETA, (1, 0), (2, 1), (1,), F(1, 3), F(1), F(1, 2)) == 0


def test_main_equation_out_of_support():
    # nu_bar not below nu: both sides vanish
    r = main_equation_residual(ROW_BETA, (1, 0), (1, 1), (2,), F(1, 3), F(1), F(1, 2))
    assert r == 0


@pytest.mark.parametrize("kind", [ROW_BETA, COL_BETA, PUSH_BLOCK_BETA, ROW_ALPHA, COL_ALPHA])
def test_main_equation_mini_sweep(kind):
    q, par, aj = F(1, 2), F(1, 3), F(2, 3)
    for j in (2, 3):
        checked = main_equation_sweep(kind, j, 2, par, aj, q)
        assert checked > 0


def test_main_equation_push_block_alpha_float():
    checked = main_equation_sweep(PUSH_BLOCK_ALPHA, 2, 2, 0.3, 0.9, 0.5)
    assert checked > 0


def test_rsk_type_property():
    # transition probability vanishes unless all lower movement propagates
    rnd = random.Random(3)
    q = F(1, 2)
    for kind in RSK_KINDS:
        for _ in range(200):
            j = rnd.choice((2, 3))
            lam = tuple(sorted((rnd.randint(0, 3) for _ in range(j)), reverse=True))
            lam_bar = tuple(sorted((rnd.randint(0, 3) for _ in range(j - 1)), reverse=True))
            if not interlaces_h(lam_bar, lam):
                continue
            if kind in BETA_KINDS:
                nu_bar = tuple(lam_bar[i] + rnd.randint(0, 1) for i in range(j - 1))
            else:
                nu_bar = tuple(lam_bar[i] + rnd.randint(0, 2) for i in range(j - 1))
            if not all(nu_bar[i] >= nu_bar[i + 1] for i in range(j - 2)):
                continue
            if not interlaces_h(lam_bar, nu_bar):
                continue
            nu = tuple(lam[i] + rnd.randint(0, 1) for i in range(j))
            if not all(nu[i] >= nu[i + 1] for i in range(j - 1)):
                continue
            if weight(nu) - weight(lam) < weight(nu_bar) - weight(lam_bar):
                ctx = LevelUpdateContext(lam_bar, nu_bar, lam)
                if kind == ROW_BETA:
                    p = row_beta_prob(ctx, nu, F(1, 3), F(1), q)
                elif kind == COL_BETA:
                    p = col_beta_prob(ctx, nu, F(1, 3), F(1), q)
                elif kind == ROW_ALPHA:
                    p = row_alpha_v(ctx, nu, q)
                else:
                    p = dyn.col_alpha_v(ctx, nu, F(1, 3), F(1), q)
                assert p == 0, (kind, lam, nu, lam_bar, nu_bar)


def test_beta_evaluators_are_stochastic():
    rnd = random.Random(5)
    q, beta, aj = F(1, 2), F(1, 3), F(2, 3)
    for kind in (ROW_BETA, COL_BETA, PUSH_BLOCK_BETA):
        done = 0
        while done < 25:
            j = rnd.choice((2, 3, 4))
            lam = tuple(sorted((rnd.randint(0, 3) for _ in range(j)), reverse=True))
            lam_bar = tuple(sorted((rnd.randint(0, 3) for _ in range(j - 1)), reverse=True))
            if not interlaces_h(lam_bar, lam):
                continue
            nu_bar = tuple(lam_bar[i] + rnd.randint(0, 1) for i in range(j - 1))
            if not all(nu_bar[i] >= nu_bar[i + 1] for i in range(j - 2)):
                continue
            done += 1
            total = F(0)
            for nu in level_candidates(kind, lam, nu_bar, 1):
                if kind == ROW_BETA:
                    total += row_beta_prob(LevelUpdateContext(lam_bar, nu_bar, lam), nu, beta, aj, q)
                elif kind == COL_BETA:
                    total += col_beta_prob(LevelUpdateContext(lam_bar, nu_bar, lam), nu, beta, aj, q)
                else:
                    total += push_block_prob(kind, lam, nu_bar, nu, beta, aj, q)
            assert total == 1


def test_complementation_identity_small():
    # column insertion probabilities are the rectangle-complement transform of
    # the row insertion ones
    q, beta, aj = F(1, 2), F(1, 3), F(2, 3)
    S = 5
    j = 3
    for lam in enumerate_signatures(2, j):
        for lam_bar in enumerate_signatures(2, j - 1):
            if not interlaces_h(lam_bar, lam):
                continue
            for nu_bar in dyn._v_strips_above(lam_bar):
                ctx = LevelUpdateContext(lam_bar, nu_bar, lam)
                cctx = LevelUpdateContext(
                    complement(lam_bar, S, j - 1),
                    complement(tuple(x - 1 for x in nu_bar), S, j - 1),
                    complement(lam, S, j),
                )
                for nu in dyn._v_strips_above(lam):
                    lhs = col_beta_prob(ctx, nu, beta, aj, q)
                    expo = -2 * ((weight(lam) - weight(nu)) - (weight(lam_bar) - weight(nu_bar))) - 1
                    rhs = (aj * beta) ** expo * row_beta_prob(
                        cctx, complement(tuple(x - 1 for x in nu), S, j), beta, aj, q
                    )
                    assert lhs == rhs


def test_classical_pull_push_operations():
    # pulling: the moved particle pulls its upper-left neighbor, or pushes the
    # upper-right one when blocked
    lam = [7, 2, 1]
    dyn._pull(lam, [4, 2], 2)
    assert lam == [7, 3, 1]
    lam = [7, 3, 1]
    dyn._pull(lam, [4, 2], 2)
    assert lam == [7, 3, 2]
    # pushing: the first unblocked particle to the right moves
    lam = [7, 6, 4, 1, 0]
    dyn._push(lam, [6, 4, 2, 1], 3)
    assert lam == [8, 6, 4, 1, 0]


def test_classical_row_alpha_figure():
    # worked propagation example at levels 4 -> 5
    lam_bar = (7, 6, 6, 3)
    nu_bar = (10, 7, 6, 5)
    lam = (9, 6, 6, 4, 1)
    for v in (0, 2):
        nu = classical_level_update(ROW_ALPHA, lam_bar, nu_bar, lam, v)
        assert nu == (10 + v, 9, 6, 5, 2)


def test_classical_rsk_repeated_first_row():
    arr = zero_array(4)
    out = classical_rsk_step(ROW_ALPHA, arr, (3, 0, 0, 0))
    assert all(level[0] == 3 for level in out)
    assert all(all(x == 0 for x in level[1:]) for level in out)


def test_classical_beta_weight_growth():
    rnd = random.Random(7)
    for kind in (ROW_BETA, COL_BETA):
        for _ in range(50):
            n = rnd.choice((2, 3))
            top = tuple(sorted((rnd.randint(0, 4) for _ in range(n)), reverse=True))
            arr = rnd.choice(list(enumerate_arrays_with_top(top)))
            vs = tuple(rnd.randint(0, 1) for _ in range(n))
            out = classical_rsk_step(kind, arr, vs)
            assert weight(out[-1]) == weight(arr[-1]) + sum(vs)


def test_classical_rejects_bad_inputs():
    with pytest.raises(ValueError):
        classical_rsk_step(ROW_BETA, zero_array(2), (2, 0))


def test_sampler_equals_classical_at_q0():
    rnd = random.Random(11)
    for kind in RSK_KINDS:
        for _ in range(250):
            n = rnd.choice((2, 3, 4))
            top = tuple(sorted((rnd.randint(0, 5) for _ in range(n)), reverse=True))
            arr = rnd.choice(list(enumerate_arrays_with_top(top)))
            if kind in BETA_KINDS:
                vs = tuple(rnd.randint(0, 1) for _ in range(n))
            else:
                vs = tuple(rnd.randint(0, 3) for _ in range(n))
            spec = DynamicsSpec(kind, 0.0, 0.4, (0.9,) * n)
            assert sample_step(spec, arr, rnd, inputs=vs) == classical_rsk_step(kind, arr, vs)


def test_sample_step_interlaces_and_weight_law():
    rnd = random.Random(13)
    spec = DynamicsSpec(ROW_BETA, 0.5, 0.4, (1.0, 0.9))
    arr = zero_array(2)
    inc = []
    for _ in range(4000):
        new = sample_step(spec, arr, rnd)
        inc.append(weight(new[-1]) - weight(new[0]) - (weight(arr[-1]) - weight(arr[0])))
        arr = new
    # |lam^(2)| - |lam^(1)| grows by Bernoulli(beta a_2) increments
    p = 0.4 * 0.9 / (1 + 0.4 * 0.9)
    mean = sum(inc) / len(inc)
    assert abs(mean - p) < 4 * math.sqrt(p * (1 - p) / len(inc))


def test_exact_array_distribution_matches_process_weight():
    # the Bernoulli row insertion run from the zero array samples the process
    q = F(1, 2)
    a = (F(1), F(2, 3))
    betas = [F(1, 3), F(1, 4)]
    spec = DynamicsSpec(ROW_BETA, q, betas, a)
    dist = exact_array_distribution(spec, 2, 2)
    assert sum(dist.values()) == 1
    measure = SpecParams.betas(*betas)
    for arr, p in dist.items():
        assert p == process_weight(arr, a, measure, q), arr


def test_push_block_beta_q0_is_bernoulli_with_blocking():
    # independent Bernoulli jumps with blocking/pushing at q = 0, generic spacing
    q, beta, aj = F(0), F(1, 3), F(1)
    lam, nu_bar = (5, 2), (4,)
    x = beta * aj
    # far from constraints: both particles jump independently
    p = push_block_prob(PUSH_BLOCK_BETA, lam, nu_bar, (6, 3), x / aj, aj, q)
    assert p == (x / (1 + x)) ** 2
    # forced short-range push: nu_bar_1 = lam_1 + 1 forces the first coordinate
    assert push_block_prob(PUSH_BLOCK_BETA, (5, 3), (6,), (6, 3), beta, aj, q) == 1 / (1 + x)
    assert push_block_prob(PUSH_BLOCK_BETA, (5, 3), (6,), (6, 4), beta, aj, q) == x / (1 + x)
    assert push_block_prob(PUSH_BLOCK_BETA, (5, 3), (6,), (5, 3), beta, aj, q) == 0


def test_push_block_sampler_consistency():
    rnd = random.Random(17)
    q, beta, aj = 0.5, 0.4, 1.0
    lam, nu_bar = (3, 1), (2,)
    probs = {}
    for nu in level_candidates(PUSH_BLOCK_BETA, lam, nu_bar, 1):
        p = push_block_prob(PUSH_BLOCK_BETA, lam, nu_bar, nu, beta, aj, q)
        if p > 0:
            probs[nu] = float(p)
    counts = {nu: 0 for nu in probs}
    n = 20000
    for _ in range(n):
        nu = dyn._sample_push_block_level(PUSH_BLOCK_BETA, lam, nu_bar, beta, aj, q, rnd)
        counts[nu] += 1
    for nu, pr in probs.items():
        sd = math.sqrt(pr * (1 - pr) * n)
        assert abs(counts[nu] - pr * n) <= 4 * sd


def test_push_block_alpha_sampler_runs():
    rnd = random.Random(19)
    spec = DynamicsSpec(PUSH_BLOCK_ALPHA, 0.5, 0.3, (0.9, 0.8))
    arr = zero_array(2)
    for _ in range(200):
        arr = sample_step(spec, arr, rnd)
    assert interlaces_h(arr[0], arr[1])


def test_sampled_arrays_chi_square_against_measure():
    # full-array frequencies from the sampler against the process weights
    q = F(1, 2)
    a = (F(1), F(2, 3))
    beta = F(1, 3)
    spec = DynamicsSpec(ROW_BETA, 0.5, float(beta), (1.0, 2 / 3))
    measure = SpecParams.betas(beta, beta)
    rnd = random.Random(101)
    reps = 20000
    counts = {}
    for _ in range(reps):
        arr = zero_array(2)
        for _ in range(2):
            arr = sample_step(spec, arr, rnd)
        counts[arr] = counts.get(arr, 0) + 1
    chi2 = 0.0
    dof = -1
    for arr, expect in (
        (arr, float(process_weight(arr, a, measure, q)) * reps)
        for arr in counts
    ):
        chi2 += (counts[arr] - expect) ** 2 / expect
        dof += 1
    from scipy import stats as _st

    assert _st.chi2.sf(chi2, dof) > 0.001, (chi2, dof)


def test_alpha_evaluators_are_stochastic_float():
    # the nu-sum is capped; the dropped tail is q-geometric and below 1e-10
    rnd = random.Random(23)
    qf, alpha, aj = 0.5, 0.3, 0.8
    for kind in (ROW_ALPHA, COL_ALPHA):
        done = 0
        while done < 12:
            j = rnd.choice((2, 3))
            lam = tuple(sorted((rnd.randint(0, 3) for _ in range(j)), reverse=True))
            lam_bar = tuple(sorted((rnd.randint(0, 3) for _ in range(j - 1)), reverse=True))
            if not interlaces_h(lam_bar, lam):
                continue
            nu_bar = tuple(lam_bar[i] + rnd.randint(0, 2) for i in range(j - 1))
            if not all(nu_bar[i] >= nu_bar[i + 1] for i in range(j - 2)):
                continue
            if not interlaces_h(lam_bar, nu_bar):
                continue
            done += 1
            ctx = LevelUpdateContext(lam_bar, nu_bar, lam)
            total = 0.0
            for nu in level_candidates(kind, lam, nu_bar, 60):
                if kind == ROW_ALPHA:
                    total += row_alpha_prob(ctx, nu, alpha, aj, qf)
                else:
                    total += col_alpha_prob(ctx, nu, alpha, aj, qf)
            assert abs(total - 1) < 1e-10, (kind, lam, lam_bar, nu_bar, total)
