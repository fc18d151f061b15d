"""Covariance transfer from the base process to the renewal-sampled one.

sigma_Y(h) = E[sigma_X(T_h)] is estimated by averaging the exact FARIMA
autocovariance over renewal draws (Rao-Blackwellized over innovations), never
from Y paths.  The same oracle drives the conditional variance
Var(sum Y_k | T) = sum_{k,k'} sigma_X(|T_k - T_k'|), evaluated either by an
occupancy-FFT quadratic form (small spans) or the compiled pair kernel.
"""

from __future__ import annotations

import math

import numpy as np

from .. import kernels, longmem, renewal, rng, specfun

__all__ = [
    "AcovOracle",
    "conditional_variance",
    "sigma_y_mc",
    "sigma_y_mc_table",
    "sigma_y_asymptotic",
    "discrete_pareto_sigma_y_closed_form",
    "variance_sum_y",
    "positivity_window",
]


class AcovOracle:
    """Vectorized sigma_X(h) evaluation.

    exact=True: untruncated FARIMA autocovariance -- ratio-recursion table up
    to table_size, the asymptotic power law beyond (the 1/h Stirling term
    vanishes because (h+d, h+1-d) sum to 2h+1, so the switch error is O(h^-2),
    ~1e-8 at the default cutoff).

    exact=False: the covariance of the truncated moving average actually
    simulated (cutoff m_c), which is identically zero beyond m_c.
    """

    def __init__(self, spec, exact=True, m_c=None, table_size=1 << 13):
        self.spec = spec
        self.exact = exact
        if exact:
            self.table = longmem.acov_table(spec, table_size)
            consts = spec.constants()
            self.coef = specfun.tilde_c_d(consts)
            self.w = 2.0 * spec.d - 1.0
        else:
            if m_c is None:
                raise ValueError("truncated oracle needs the MA cutoff m_c")
            self.table = longmem.truncated_acov_table(spec, m_c)
            self.coef = 0.0
            self.w = 2.0 * spec.d - 1.0
        self.m_c = m_c

    @property
    def gamma0(self):
        return float(self.table[0])

    def gamma(self, h):
        """sigma_X at (array of) lags h >= 0; real-valued lags are permitted
        beyond the table, where the power form applies."""
        h = np.asarray(h, dtype=np.float64)
        out = np.empty(h.shape)
        near = h < self.table.size
        out[near] = self.table[(h[near] + 0.5).astype(np.int64)]
        far = ~near
        if np.any(far):
            if self.coef != 0.0:
                out[far] = self.coef * h[far] ** self.w
            else:
                out[far] = 0.0
        return out

    def kernel_args(self):
        return np.ascontiguousarray(self.table), self.coef, self.w


def conditional_variance(epochs, oracle, fft_span_limit=1 << 21):
    """Var(sum_{k<=n} Y_k | T) = n gamma(0) + 2 sum_{i<j} gamma(T_j - T_i).

    Integer-valued epoch arrays with a small span go through an occupancy
    autocorrelation (FFT quadratic form); everything else through the pair
    kernel.  Both paths are deterministic for any thread count.
    """
    t = np.ascontiguousarray(epochs, dtype=np.float64)
    n = t.size
    span = int(t[-1] - t[0])
    integral = float(t[-1]).is_integer() and float(t[0]).is_integer()
    # occupancy FFT costs ~ span log span, the kernel ~ n^2/2 pair evals
    fft_cheaper = span * max(math.log2(span + 2), 1.0) < 0.5 * float(n) * n
    if integral and span + 1 <= fft_span_limit and fft_cheaper:
        return _conditional_variance_fft(t, oracle, span)
    pair_sum = kernels.pairwise_acov_sum(t, *oracle.kernel_args())
    return n * oracle.gamma0 + 2.0 * pair_sum


def _conditional_variance_fft(t, oracle, span):
    idx = (t - t[0] + 0.5).astype(np.int64)
    occ = np.zeros(span + 1)
    occ[idx] = 1.0
    nfft = 1
    while nfft < 2 * (span + 1):
        nfft <<= 1
    f = np.fft.rfft(occ, nfft)
    counts = np.fft.irfft(f * np.conj(f), nfft)[: span + 1]
    lags = np.arange(span + 1, dtype=np.float64)
    gam = oracle.gamma(lags)
    n = t.size
    # counts[0] = n up to fft rounding; use the exact diagonal
    return n * oracle.gamma0 + 2.0 * float(np.dot(np.rint(counts[1:]), gam[1:]))


def sigma_y_mc(law, spec, lags, n_reps=2000, seed=0, oracle=None,
               stream=("sigma_y",)):
    """MC estimate of sigma_Y at the given lags: mean over renewal draws of
    sigma_X(T_h).  Returns (means, standard errors)."""
    lags = np.asarray(lags, dtype=np.int64)
    if np.any(lags < 0):
        raise ValueError("lags must be >= 0")
    if oracle is None:
        oracle = AcovOracle(spec, exact=True)
    max_lag = int(lags.max())
    acc = np.zeros(lags.size)
    acc2 = np.zeros(lags.size)
    for rep in range(n_reps):
        path = renewal.sample_path(law, max(max_lag, 1), seed, stream=stream + (rep,))
        t_h = np.where(lags > 0, path.epochs[np.maximum(lags - 1, 0)], 0.0)
        g = oracle.gamma(t_h)
        acc += g
        acc2 += g * g
    mean = acc / n_reps
    var = np.maximum(acc2 / n_reps - mean ** 2, 0.0)
    se = np.sqrt(var / n_reps)
    return mean, se


def sigma_y_mc_table(law, spec, n, n_reps=2000, seed=0, oracle=None,
                     stream=("sigma_y",)):
    """sigma_Y(0..n-1) plus the per-replicate aggregate needed by
    variance_sum_y; one pass over n_reps renewal paths of length n-1.

    Returns (table_mean, table_se, var_sum_mean, var_sum_se)."""
    n = int(n)
    if oracle is None:
        oracle = AcovOracle(spec, exact=True)
    g0 = oracle.gamma0
    if n == 1:
        return np.array([g0]), np.array([0.0]), g0, 0.0
    weights = 2.0 * (n - np.arange(1, n, dtype=np.float64))
    acc = np.zeros(n - 1)
    acc2 = np.zeros(n - 1)
    vacc = 0.0
    vacc2 = 0.0
    for rep in range(n_reps):
        path = renewal.sample_path(law, n - 1, seed, stream=stream + (rep,))
        g = oracle.gamma(path.epochs)
        acc += g
        acc2 += g * g
        v = n * g0 + float(np.dot(weights, g))
        vacc += v
        vacc2 += v * v
    mean = acc / n_reps
    se = np.sqrt(np.maximum(acc2 / n_reps - mean ** 2, 0.0) / n_reps)
    table_mean = np.concatenate(([g0], mean))
    table_se = np.concatenate(([0.0], se))
    var_mean = vacc / n_reps
    var_se = math.sqrt(max(vacc2 / n_reps - var_mean ** 2, 0.0) / n_reps)
    return table_mean, table_se, var_mean, var_se


def sigma_y_asymptotic(law, consts, h, kappa=1.0):
    """Asymptotic sigma_Y(h) for infinite-mean heavy gap laws:

        alpha < 1:  C~_d E(L_1^{2d-1}) b_h^{2d-1}, E over the kappa-scaled
                    subordinator (kappa = 1 is the bare-limit convention;
                    the FCLT scale probe selects the empirical one);
        alpha = 1:  C~_d (b_h ell*(b_h)/ell(b_h))^{2d-1}.
    """
    if law.finite_mean or law.alpha is None:
        raise ValueError("sigma_y_asymptotic applies to infinite-mean heavy laws")
    alpha = law.alpha
    d = consts.d
    c_tilde = specfun.tilde_c_d(consts)
    b_h = law.quantile_b(h)
    if alpha < 1.0:
        e_inv = specfun.inverse_stable_moment(1.0 - 2.0 * d, alpha)
        scale = kappa ** ((2.0 * d - 1.0) / alpha)
        return c_tilde * e_inv * scale * b_h ** (2.0 * d - 1.0)
    ratio = law.ell_star(b_h) / float(law.ell(b_h))
    return c_tilde * (b_h * ratio) ** (2.0 * d - 1.0)


def discrete_pareto_sigma_y_closed_form(law, consts, h):
    """Closed h-power form of sigma_Y under the discrete Pareto law,
    i.e. the asymptotic branch with b_h = (h / (alpha zeta(1+alpha)))^{1/alpha}:

        alpha < 1: C~_d (Gamma(r/alpha)/(alpha Gamma(r)))
                        (alpha zeta(1+alpha))^{r/alpha} h^{-r/alpha},  r = 1-2d
        alpha = 1: C~_d (6/pi^2)^{2d-1} h^{2d-1} (log h)^{2d-1}
    """
    alpha = law.alpha
    d = consts.d
    r = 1.0 - 2.0 * d
    c_tilde = specfun.tilde_c_d(consts)
    az = alpha * specfun.zeta(1.0 + alpha)
    if alpha < 1.0:
        e_inv = specfun.inverse_stable_moment(r, alpha)
        return c_tilde * e_inv * az ** (r / alpha) * float(h) ** (-r / alpha)
    return c_tilde * (1.0 / az) ** r * float(h) ** -r * (math.log(float(h))) ** -r


def variance_sum_y(law, spec, n, n_reps=2000, seed=0, oracle=None):
    """Var(sum_{k<=n} Y_k) = n sigma_X(0) + 2 sum_{h<n} (n-h) sigma_Y(h),
    with sigma_Y(h) = E sigma_X(T_h) averaged over n_reps renewal draws.
    Returns (mean, standard error); exact for the deterministic law."""
    _, _, var_mean, var_se = sigma_y_mc_table(
        law, spec, n, n_reps=n_reps, seed=seed, oracle=oracle
    )
    return var_mean, var_se


def positivity_window(sigma_table):
    """Smallest m >= 1 with sigma_Y(0) + 2 sum_{j<=m} sigma_Y(j) > 0, plus the
    first lag beyond which the table stays positive.

    Returns (m, first_positive_lag); m is None if no window within the table
    closes the inequality (table too short)."""
    table = np.asarray(sigma_table, dtype=np.float64)
    if table.size < 2:
        raise ValueError("need sigma_Y at lags 0..H with H >= 1")
    partial = table[0] + 2.0 * np.cumsum(table[1:])
    hits = np.nonzero(partial > 0.0)[0]
    m = int(hits[0]) + 1 if hits.size else None
    negative = np.nonzero(table < 0.0)[0]
    first_positive = int(negative.max()) + 1 if negative.size else 0
    return m, first_positive
