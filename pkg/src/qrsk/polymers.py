"""Geometric RSK insertions, lattice polymer partition functions, and the
q -> 1 scaling-limit experiments.

Real triangular arrays are stored as lists of words; word k holds the
entries with level indices k..n.  Row arrays have all-positive or empty
words; column arrays carry a positive prefix ending in a 1 followed by
zeros (the empty word (1, 0, ..., 0) is the length-1 prefix case).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .qnum import INF, PhiParams, log_q_pochhammer_inf, phi_sample

RealWord = List[float]
RealArray = List[RealWord]


def empty_word(length: int) -> RealWord:
    return [1.0] + [0.0] * (length - 1)


def is_empty_word(w: Sequence[float]) -> bool:
    return w[0] == 1.0 and all(x == 0.0 for x in w[1:])


def empty_array(n: int) -> RealArray:
    return [empty_word(n - k + 1) for k in range(1, n + 1)]


def _insert_row(lam: RealWord, a: RealWord) -> Tuple[RealWord, Optional[RealWord]]:
    """Row insertion of word a into word lam; returns (nu, b) with b possibly None."""
    m = len(a)
    if is_empty_word(lam):
        nu = []
        p = 1.0
        for x in a:
            p *= x
            nu.append(p)
        return nu, None
    nu = [lam[0] * a[0]]
    for j in range(1, m):
        nu.append((lam[j] + nu[j - 1]) * a[j])
    if m == 1:
        return nu, None
    b = [a[j] * lam[j] * nu[j - 1] / (lam[j - 1] * nu[j]) for j in range(1, m)]
    return nu, b


def grsk_row_insert(array: RealArray, a: Sequence[float]) -> RealArray:
    """Geometric RSK row insertion of the word a into the array (new array)."""
    arr = [list(w) for w in array]
    cur: Optional[RealWord] = list(a)
    for k in range(len(arr)):
        if cur is None:
            break
        arr[k], cur = _insert_row(arr[k], cur)
    return arr


def _insert_col(lam: RealWord, a: RealWord) -> Tuple[RealWord, Optional[RealWord]]:
    """Column insertion of word a into word lam (three-branch output word)."""
    m = len(a)
    nu = [a[0] * lam[0]]
    for j in range(1, m):
        nu.append(lam[j] * a[j] + lam[j - 1])
    if m == 1:
        return nu, None
    b = []
    for j in range(1, m):
        if lam[j] > 0:
            b.append(a[j] * lam[j] * nu[j - 1] / (lam[j - 1] * nu[j]))
        elif lam[j - 1] > 0:
            b.append(a[j] * nu[j - 1])
        else:
            b.append(a[j])
    return nu, b


def grsk_col_insert(array: RealArray, a: Sequence[float]) -> RealArray:
    """Geometric RSK column insertion of the word a into the array."""
    arr = [list(w) for w in array]
    cur: Optional[RealWord] = list(a)
    for k in range(len(arr)):
        if cur is None:
            break
        arr[k], cur = _insert_col(arr[k], cur)
    return arr


# ---------------------------------------------------------------------------
# lattice polymer partition functions
# ---------------------------------------------------------------------------

@dataclass
class PolymerEnv:
    """Deterministic or sampled weights for one of the two lattice polymers.

    mode 'LogGamma': weights[t-1][j-1] is the vertex weight at (t, j).
    mode 'StrictWeak': weights[t-1][j-1] is the weight of the horizontal edge
    (t-1, j) -> (t, j).
    """

    mode: str
    weights: List[List[float]]

    @property
    def t_max(self) -> int:
        return len(self.weights)

    @property
    def n(self) -> int:
        return len(self.weights[0])

    def w(self, t: int, j: int) -> float:
        return self.weights[t - 1][j - 1]


def _loggamma_tuples(env: PolymerEnv, j: int, k: int, t: int):
    """Nonintersecting up/right path k-tuples from (1, i) to (t, j-k+i).

    A path is encoded by the heights h_1 <= ... <= h_t at which it leaves
    each column; its vertex run in column s is [h_{s-1}, h_s] (h_0 = start).
    Vertex-disjointness of consecutive tuples means the run of path m in
    column s ends strictly below where the run of path m+1 starts, i.e.
    h^m_s < h^{m+1}_{s-1}; paths are enumerated bottom-up so the previous
    path's heights act as strict floors.
    """
    def tuples(m, below_heights, acc):
        if m == k:
            yield acc
            return
        start, target = m + 1, j - k + m + 1

        def rec(s, prev, heights, w):
            # entering column s+1 at height prev: must clear the lower path's
            # exit height in that column
            if below_heights is not None and s < t and prev <= below_heights[s]:
                return
            if s == t:
                if prev == target:
                    yield from tuples(m + 1, list(heights), acc * w)
                return
            for h in range(prev, target + 1):
                ww = w
                for i in range(prev, h + 1):
                    ww *= env.w(s + 1, i)
                heights.append(h)
                yield from rec(s + 1, h, heights, ww)
                heights.pop()

        yield from rec(0, start, [], 1.0)

    yield from tuples(0, None, 1.0)


def _strictweak_tuples(env: PolymerEnv, j: int, k: int, t: int):
    """Nonintersecting strict-weak path k-tuples from (0, i) to (t, j-k+i).

    Paths take horizontal (weighted) or diagonal-up (unweighted) steps; the
    m-th path must stay strictly below the (m+1)-st at every time.
    """
    def tuples(m, below_heights, acc):
        if m == k:
            yield acc
            return
        start, target = m + 1, j - k + m + 1

        def rec(s, h, heights, w):
            if s == t:
                if h == target:
                    yield from tuples(m + 1, list(heights), acc * w)
                return
            for step in (0, 1):
                nh = h + step
                if nh > target or target - nh > t - s - 1:
                    continue
                if below_heights is not None and nh <= below_heights[s + 1]:
                    continue
                ww = w * (env.w(s + 1, h) if step == 0 else 1.0)
                heights.append(nh)
                yield from rec(s + 1, nh, heights, ww)
                heights.pop()

        if below_heights is not None and start <= below_heights[0]:
            return
        yield from rec(0, start, [start], 1.0)

    yield from tuples(0, None, 1.0)


def _single_path_sums_loggamma(env: PolymerEnv, t: int, jmax: int) -> np.ndarray:
    """E[p, r] = weighted sum over single up/right paths (1, p) -> (t, r)."""
    n = jmax
    E = np.zeros((n + 1, n + 1))
    for p in range(1, n + 1):
        dp = np.zeros((t + 1, n + 1))
        dp[1][p] = env.w(1, p)
        for i in range(p + 1, n + 1):
            dp[1][i] = dp[1][i - 1] * env.w(1, i)
        for s in range(2, t + 1):
            for i in range(p, n + 1):
                dp[s][i] = (dp[s - 1][i] + (dp[s][i - 1] if i > p else 0.0)) * env.w(s, i)
        for r in range(1, n + 1):
            E[p, r] = dp[t][r]
    return E


def _h_product_strictweak(env: PolymerEnv, t: int) -> np.ndarray:
    """H(a_1) ... H(a_t) for the strict-weak weights (bidiagonal transfers)."""
    n = env.n
    M = np.eye(n)
    for s in range(1, t + 1):
        H = np.zeros((n, n))
        for i in range(n):
            H[i, i] = env.w(s, i + 1)
            if i + 1 < n:
                H[i, i + 1] = 1.0
        M = M @ H
    return M


def lgv_partition(env: PolymerEnv, j: int, k: int, t: int, method: str = "enumerate") -> float:
    """Partition function over nonintersecting path k-tuples.

    method 'enumerate' sums tuples directly; 'determinant' uses the
    nonintersecting-path determinant of single-path sums as an independent
    second route.
    """
    if env.mode == "LogGamma":
        if t < k:
            raise ValueError("LogGamma needs t >= k")
        if method == "enumerate":
            return float(sum(_loggamma_tuples(env, j, k, t)))
        E = _single_path_sums_loggamma(env, t, max(j, k))
        M = np.array([[E[p, j - k + r] for r in range(1, k + 1)] for p in range(1, k + 1)])
        return float(np.linalg.det(M))
    if env.mode == "StrictWeak":
        if t < j - k:
            raise ValueError("StrictWeak needs t >= j - k")
        if method == "enumerate":
            return float(sum(_strictweak_tuples(env, j, k, t)))
        M = _h_product_strictweak(env, t)
        minor = M[np.ix_(range(0, k), range(j - k, j))]
        return float(np.linalg.det(minor))
    raise ValueError(f"unknown polymer mode {env.mode!r}")


# ---------------------------------------------------------------------------
# transfer matrices for the column insertion
# ---------------------------------------------------------------------------

def h_matrix(a: Sequence[float], n: int, k: int = 1) -> np.ndarray:
    """H_k(a): identity on the first k-1 coordinates, bidiagonal (a; ones) after."""
    m = np.eye(n)
    for idx, val in enumerate(a):
        i = k - 1 + idx
        m[i, i] = val
        if i + 1 < n:
            m[i, i + 1] = 1.0
    return m


def g_matrix(word: Sequence[float], n: int, k: int = 1) -> np.ndarray:
    """G(word) built from a column word with the positive-prefix convention."""
    j = k - 1
    for idx, v in enumerate(word):
        if v > 0:
            j = k + idx
        else:
            break
    m = np.eye(n)
    prefix = [1.0] + [word[i] for i in range(j - k + 1)]
    for p in range(1, j - k + 2):
        for r in range(p, j - k + 2):
            m[k - 2 + p, k - 2 + r] = prefix[r] / prefix[p - 1]
    return m


def transfer_matrix_check(lam: Sequence[float], a: Sequence[float], k: int = 1,
                          n: Optional[int] = None, rel_tol: float = 1e-12) -> bool:
    """G(lam) H_k(a) = H_{k+1}(b) G(nu) for one column insertion step."""
    if n is None:
        n = k - 1 + len(lam)
    nu, b = _insert_col(list(lam), list(a))
    lhs = g_matrix(lam, n, k) @ h_matrix(a, n, k)
    rhs = g_matrix(nu, n, k)
    if b is not None:
        rhs = h_matrix(b, n, k + 1) @ rhs
    return bool(np.allclose(lhs, rhs, rtol=rel_tol, atol=1e-300))


def transfer_product_check(words: Sequence[Sequence[float]], rel_tol: float = 1e-10) -> bool:
    """G(y_n(t)) ... G(y_1(t)) = H(a_1) ... H(a_t) after t column insertions."""
    n = len(words[0])
    arr = empty_array(n)
    for a in words:
        arr = grsk_col_insert(arr, a)
    lhs = np.eye(n)
    for kk in range(n, 0, -1):
        lhs = lhs @ g_matrix(arr[kk - 1], n, kk)
    rhs = np.eye(n)
    for a in words:
        rhs = rhs @ h_matrix(a, n, 1)
    return bool(np.allclose(lhs, rhs, rtol=rel_tol, atol=1e-300))


# ---------------------------------------------------------------------------
# Gamma sampling and the scaling-limit experiments
# ---------------------------------------------------------------------------

def sample_gamma(theta: float, rng) -> float:
    """Gamma(theta), scale 1."""
    return rng.gammavariate(theta, 1.0)


def sample_inverse_gamma(theta: float, rng) -> float:
    return 1.0 / rng.gammavariate(theta, 1.0)


class _QGeomCache:
    """q-geometric samplers with cached log-normalizations per parameter."""

    def __init__(self, q: float):
        self.q = q
        self._norms: Dict[float, float] = {}

    def sample(self, alpha: float, rng) -> int:
        from .qnum import sample_q_geometric

        norm = self._norms.get(alpha)
        if norm is None:
            norm = log_q_pochhammer_inf(alpha, self.q)
            self._norms[alpha] = norm
        return sample_q_geometric(alpha, self.q, rng, log_norm=norm)


def scaled_row_arrays(n, t, thetas, theta_hats, eps, replicas, rng):
    """Replicas of log R-hat ratios from the scaled row insertion dynamics.

    Returns a dict (j, k) -> list of log(R-hat^j_k(t, eps)) over replicas,
    for 1 <= k <= min(t, j) <= n.
    """
    from .gt import zero_array

    q = math.exp(-eps)
    a = [math.exp(-thetas[j] * eps) for j in range(n)]
    alphas = [math.exp(-theta_hats[s] * eps) for s in range(t)]
    cache = _QGeomCache(q)
    out = {(j, k): [] for j in range(1, n + 1) for k in range(1, min(t, j) + 1)}
    log_inv_eps = math.log(1.0 / eps)
    for _ in range(replicas):
        arr = [list(level) for level in zero_array(n)]
        for s in range(t):
            arr = _scaled_row_step(arr, alphas[s], a, q, cache, rng)
        for (j, k), acc in out.items():
            acc.append(eps * arr[j - 1][k - 1] - (t + j - 2 * k + 1) * log_inv_eps)
    return out


def _scaled_row_step(arr, alpha, a, q, cache, rng):
    n = len(arr)
    out = [[arr[0][0] + cache.sample(alpha * a[0], rng)]]
    for j in range(2, n + 1):
        lam_bar, nu_bar, lam = arr[j - 2], out[j - 2], arr[j - 1]
        nu = list(lam)
        nu[0] += cache.sample(alpha * a[j - 1], rng)
        for i in range(1, j):
            c = nu_bar[i - 1] - lam_bar[i - 1]
            if c == 0:
                continue
            a_exp = lam[i - 1] - lam_bar[i - 1]
            b_exp = INF if i == 1 else lam_bar[i - 2] - lam_bar[i - 1]
            w = phi_sample(PhiParams.inverse(q, a_exp, b_exp, c), rng)
            nu[i - 1] += w
            nu[i] += c - w
        out.append(nu)
    return out


def scaled_col_arrays(n, t, thetas, theta_hats, eps, replicas, rng):
    """Replicas of log L-hat ratios from the scaled column insertion dynamics.

    Returns (j, k) -> list of log(L-hat^j_k(t, eps)), 1 <= k <= j <= min(n, k+t-1).
    """
    from .gt import zero_array

    q = math.exp(-eps)
    a = [math.exp(-thetas[j] * eps) for j in range(n)]
    alphas = [math.exp(-theta_hats[s] * eps) for s in range(t)]
    cache = _QGeomCache(q)
    out = {
        (j, k): []
        for j in range(1, n + 1)
        for k in range(1, j + 1)
        if j <= min(n, k + t - 1)
    }
    log_inv_eps = math.log(1.0 / eps)
    for _ in range(replicas):
        arr = [list(level) for level in zero_array(n)]
        for s in range(t):
            arr = _scaled_col_step(arr, alphas[s], a, q, cache, rng)
        for (j, k), acc in out.items():
            ell = arr[j - 1][j - k]          # k-th particle from the left
            acc.append((t - j + 2 * k - 1) * log_inv_eps - eps * ell)
    return out


def _scaled_col_step(arr, alpha, a, q, cache, rng):
    from .dynamics import _sample_col_alpha_level

    n = len(arr)
    out = [[arr[0][0] + cache.sample(alpha * a[0], rng)]]
    for j in range(2, n + 1):
        vj = cache.sample(alpha * a[j - 1], rng)
        new = _sample_col_alpha_level(
            tuple(arr[j - 2]), tuple(out[j - 2]), tuple(arr[j - 1]), vj, q, rng
        )
        out.append(list(new))
    return out


def polymer_log_ratios(mode, n, t, thetas, theta_hats, replicas, rng, targets):
    """Replicas of log(Z^j_k / Z^j_{k-1}) for the random-weight polymer."""
    out = {key: [] for key in targets}
    for _ in range(replicas):
        weights = []
        for s in range(1, t + 1):
            row = []
            for j in range(1, n + 1):
                th = thetas[j - 1] + theta_hats[s - 1]
                row.append(
                    sample_inverse_gamma(th, rng) if mode == "LogGamma" else sample_gamma(th, rng)
                )
            weights.append(row)
        env = PolymerEnv(mode, weights)
        for (j, k) in targets:
            zk = lgv_partition(env, j, k, t, method="determinant")
            zk1 = lgv_partition(env, j, k - 1, t, method="determinant") if k > 1 else 1.0
            out[(j, k)].append(math.log(zk / zk1))
    return out


def ks_statistic(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Two-sample Kolmogorov-Smirnov statistic."""
    from scipy import stats

    return float(stats.ks_2samp(xs, ys).statistic)


def scaling_limit_experiment(
    kind: str,
    n: int,
    t: int,
    thetas: Sequence[float],
    theta_hats: Sequence[float],
    eps_list: Sequence[float],
    replicas: int,
    rng,
    targets: Optional[Sequence[Tuple[int, int]]] = None,
    raw_samples: Optional[list] = None,
) -> dict:
    """Compare scaled-dynamics marginals with polymer partition ratios.

    kind 'RowAlpha' (log-Gamma side) or 'ColAlpha' (strict-weak side).  For
    each epsilon the report records per-(j, k) means, quartiles and the
    two-sample KS statistic between eps * (scaled positions) and the polymer
    log-ratios.  Convergence shows up as KS decreasing in epsilon.
    """
    if kind not in ("RowAlpha", "ColAlpha"):
        raise ValueError(kind)
    mode = "LogGamma" if kind == "RowAlpha" else "StrictWeak"
    if targets is None:
        if kind == "RowAlpha":
            targets = [(j, k) for j in range(1, n + 1) for k in range(1, min(t, j) + 1)]
        else:
            targets = [
                (j, k)
                for j in range(1, n + 1)
                for k in range(1, j + 1)
                if j <= min(n, k + t - 1)
            ]
    poly = polymer_log_ratios(mode, n, t, thetas, theta_hats, replicas, rng, targets)
    report = {
        "kind": kind,
        "n": n,
        "t": t,
        "thetas": list(thetas),
        "theta_hats": list(theta_hats),
        "replicas": replicas,
        "results": [],
    }
    if raw_samples is not None:
        for (j, k), vals in poly.items():
            raw_samples.extend(("", j, k, t, "polymer", v) for v in vals)
    for eps in eps_list:
        if eps > 0.2:
            report.setdefault("warnings", []).append(
                f"eps = {eps} is outside the asymptotic regime"
            )
        if kind == "RowAlpha":
            dyn = scaled_row_arrays(n, t, thetas, theta_hats, eps, replicas, rng)
        else:
            dyn = scaled_col_arrays(n, t, thetas, theta_hats, eps, replicas, rng)
        if raw_samples is not None:
            for (j, k) in targets:
                raw_samples.extend((eps, j, k, t, "dynamics", v) for v in dyn[(j, k)])
        for (j, k) in targets:
            xs, ys = dyn[(j, k)], poly[(j, k)]
            entry = {
                "eps": eps,
                "j": j,
                "k": k,
                "t": t,
                "dynamics_mean": float(np.mean(xs)),
                "polymer_mean": float(np.mean(ys)),
                "dynamics_quartiles": [float(v) for v in np.percentile(xs, [25, 50, 75])],
                "polymer_quartiles": [float(v) for v in np.percentile(ys, [25, 50, 75])],
                "ks_stat": ks_statistic(xs, ys),
            }
            report["results"].append(entry)
    return report
