"""Self-normalized statistics and the Normal / NVM regime machinery.

S_n = [Var(sum Y_k)]^{-1/2} sum Y_k is sampled two ways:

- "conditional" (Gaussian innovations only): sum Y_k | T ~ N(0, sigma_eps^2
  d_n(T)^2) exactly, with the conditional variance evaluated through the
  exact FARIMA autocovariance; no X buffer, no truncation, no span cap, so
  the heavy-tail regime carries no conditioning bias.
- "direct": honest X generation along the path (any innovation law), with
  the truncated-model variance used consistently in the normalizer.

R_n = Var(sum Y_k | T) / Var(sum Y_k) is the randomized-variance statistic
whose limit separates the regimes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import renewal, rng
from . import covariance, sampling

__all__ = [
    "RegimeLabel",
    "classify_regime",
    "CltBatch",
    "clt_batch",
    "r_n_batch",
    "s_n_statistic",
    "excess_kurtosis",
]


@dataclass(frozen=True)
class RegimeLabel:
    """Limiting law of S_n plus the clause of the theorem that applies."""

    label: str  # "normal" | "nvm"
    rationale: str  # "finite-mean" | "alpha<=1-2d" | "alpha=1" | "1-2d<alpha<1"


def classify_regime(law, d):
    """Regime of the self-normalized sum for the given gap law and memory d.

    Finite-mean laws, very heavy tails (alpha <= 1-2d, boundary inclusive)
    and alpha = 1 give a standard normal limit; the intermediate window
    1-2d < alpha < 1 gives the normal variance mixture sqrt(Z) N.
    """
    if not 0.0 < d < 0.5:
        raise ValueError(f"d must lie in (0, 1/2), got {d}")
    if law.finite_mean:
        return RegimeLabel("normal", "finite-mean")
    alpha = law.alpha
    if alpha is None:
        raise ValueError(f"law {law.name} exposes neither finite mean nor tail index")
    if alpha == 1.0:
        return RegimeLabel("normal", "alpha=1")
    if alpha <= 1.0 - 2.0 * d:
        return RegimeLabel("normal", "alpha<=1-2d")
    return RegimeLabel("nvm", "1-2d<alpha<1")


@dataclass
class CltBatch:
    """Replicate-level output of a regime experiment."""

    s_n: np.ndarray
    r_n: np.ndarray
    sums: np.ndarray
    variance: float
    variance_se: float
    route: str
    n: int
    identity_max_rel_error: float = field(default=float("nan"))
    rejections: int = 0


def s_n_statistic(sums, variance):
    """One S_n per replicate sum, normalized by the unconditional variance."""
    if variance <= 0.0:
        raise ValueError(f"variance must be positive, got {variance}")
    return np.asarray(sums, dtype=np.float64) / math.sqrt(variance)


def clt_batch(law, spec, n, n_reps, seed, route="auto", var_reps=None,
              check_identity=False, x_cap=None):
    """Sample n_reps replicates of (S_n, R_n) for the given configuration.

    route="auto" picks "conditional" for Gaussian innovations and "direct"
    otherwise.  check_identity evaluates the scatter-vs-Toeplitz conditional
    variance identity on every replicate (direct route) and records the worst
    relative error.
    """
    if route == "auto":
        route = "conditional" if spec.innovation_law == "gaussian" else "direct"
    if route == "conditional" and spec.innovation_law != "gaussian":
        raise ValueError("the conditional route is exact only for Gaussian innovations")
    if var_reps is None:
        var_reps = max(n_reps, 1000)
    oracle = covariance.AcovOracle(spec, exact=(route == "conditional"),
                                   m_c=None if route == "conditional" else spec.cutoff(n))
    variance, variance_se = covariance.variance_sum_y(
        law, spec, n, n_reps=var_reps, seed=seed, oracle=oracle
    )
    sums = np.empty(n_reps)
    r_n = np.empty(n_reps)
    ident = 0.0
    rejections = 0
    if route == "conditional":
        for rep in range(n_reps):
            path = renewal.sample_path(law, n, seed, stream=("clt", rep))
            sd2 = covariance.conditional_variance(path.epochs, oracle)
            z = rng.innovations_at(seed, ("clt-normal", rep), 0, 1)[0]
            sums[rep] = math.sqrt(sd2) * z
            r_n[rep] = sd2 / variance
    else:
        kwargs = {} if x_cap is None else {"x_cap": x_cap}
        for rep in range(n_reps):
            series = sampling.sample_y(
                spec, law, n, seed,
                gap_stream=("clt", rep), innov_stream=("innov", rep), **kwargs,
            )
            rejections += series.rejections
            sums[rep] = float(np.sum(series.values))
            epochs = np.rint(series.path.epochs).astype(np.int64)
            if check_identity:
                profile = sampling.coefficient_profile(
                    epochs, spec, m_c=series.truncation, check_identity=True
                )
                ident = max(ident, profile.identity_rel_error)
                sd2 = spec.sigma_eps2 * profile.d2_sum
            else:
                sd2 = covariance.conditional_variance(epochs, oracle)
            r_n[rep] = sd2 / variance
    return CltBatch(
        s_n=s_n_statistic(sums, variance),
        r_n=r_n,
        sums=sums,
        variance=variance,
        variance_se=variance_se,
        route=route,
        n=int(n),
        identity_max_rel_error=ident if check_identity else float("nan"),
        rejections=rejections,
    )


def r_n_batch(law, spec, n, n_draws, seed, oracle=None, var_reps=None):
    """R_n over independent renewal draws (no innovations involved)."""
    if oracle is None:
        oracle = covariance.AcovOracle(spec, exact=True)
    if var_reps is None:
        var_reps = max(n_draws, 1000)
    variance, variance_se = covariance.variance_sum_y(
        law, spec, n, n_reps=var_reps, seed=seed, oracle=oracle
    )
    out = np.empty(n_draws)
    for rep in range(n_draws):
        path = renewal.sample_path(law, n, seed, stream=("rn", rep))
        out[rep] = covariance.conditional_variance(path.epochs, oracle) / variance
    return out, variance, variance_se


def excess_kurtosis(x):
    """Sample excess kurtosis m4/m2^2 - 3 (biased moments; NVM targets are
    compared through bootstrap errors, not small-sample corrections)."""
    x = np.asarray(x, dtype=np.float64)
    c = x - x.mean()
    m2 = float(np.mean(c ** 2))
    m4 = float(np.mean(c ** 4))
    return m4 / m2 ** 2 - 3.0
