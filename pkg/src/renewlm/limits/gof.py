"""Goodness-of-fit machinery: Kolmogorov-Smirnov distances against the
standard normal and against the estimated normal-variance-mixture.

The mixture CDF F(v) = E[Phi(v / sqrt(Z))] is itself a Monte Carlo object, so
the one-sample NVM p-value comes from a parametric bootstrap (resampling
sqrt(Z) N from the Z sample) instead of an anti-conservative plug-in series.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import ndtr

from .. import rng

__all__ = [
    "kolmogorov_sf",
    "ks_one_sample_normal",
    "ks_two_sample",
    "nvm_cdf",
    "nvm_sample",
    "ks_against_nvm",
    "bootstrap_se",
]


def kolmogorov_sf(lam):
    """Kolmogorov survival function 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lam^2)."""
    if lam < 1e-8:
        return 1.0
    total = 0.0
    sign = 1.0
    for k in range(1, 200):
        term = math.exp(-2.0 * (k * lam) ** 2)
        total += sign * term
        if term < 1e-18:
            break
        sign = -sign
    return min(max(2.0 * total, 0.0), 1.0)


def ks_one_sample_normal(values):
    """Sup distance of the empirical CDF to Phi with its asymptotic p-value.

    Requires at least 20 values (the asymptotic series is meaningless below
    that).  Returns (statistic, p_value).
    """
    x = np.sort(np.asarray(values, dtype=np.float64))
    n = x.size
    if n < 20:
        raise ValueError(f"need >= 20 values for the KS test, got {n}")
    cdf = ndtr(x)
    i = np.arange(1, n + 1, dtype=np.float64)
    d_plus = float(np.max(i / n - cdf))
    d_minus = float(np.max(cdf - (i - 1.0) / n))
    stat = max(d_plus, d_minus)
    return stat, kolmogorov_sf(math.sqrt(n) * stat)


def ks_two_sample(x, y):
    """Two-sample KS distance with the asymptotic p-value."""
    x = np.sort(np.asarray(x, dtype=np.float64))
    y = np.sort(np.asarray(y, dtype=np.float64))
    n1, n2 = x.size, y.size
    if n1 < 1 or n2 < 1:
        raise ValueError("both samples must be nonempty")
    grid = np.concatenate((x, y))
    cdf1 = np.searchsorted(x, grid, side="right") / n1
    cdf2 = np.searchsorted(y, grid, side="right") / n2
    stat = float(np.max(np.abs(cdf1 - cdf2)))
    en = math.sqrt(n1 * n2 / (n1 + n2))
    return stat, kolmogorov_sf(en * stat)


def nvm_cdf(v, z_samples):
    """Mixture CDF estimate F(v) = mean over z of Phi(v / sqrt(z))."""
    z = np.asarray(z_samples, dtype=np.float64)
    if z.size < 1000:
        raise ValueError(f"need >= 1000 Z samples, got {z.size}")
    if np.any(z <= 0.0):
        raise ValueError("Z samples must be positive")
    v = np.asarray(v, dtype=np.float64)
    scale = 1.0 / np.sqrt(z)
    out = ndtr(np.multiply.outer(v, scale)).mean(axis=-1)
    return float(out) if out.ndim == 0 else out


def nvm_sample(z_samples, count, seed, stream=("nvm",)):
    """count draws of sqrt(Z) N, resampling Z and drawing N from the
    counter-based stream (parametric bootstrap generator)."""
    z = np.asarray(z_samples, dtype=np.float64)
    u = rng.uniform_at(seed, stream, 0, 2 * count)
    idx = np.minimum((u[0::2] * z.size).astype(np.int64), z.size - 1)
    from scipy.special import ndtri

    return np.sqrt(z[idx]) * ndtri(u[1::2])


def ks_against_nvm(values, z_samples, n_boot=400, seed=0):
    """One-sample KS distance of the values to the estimated mixture CDF,
    with a parametric-bootstrap p-value (the mixture CDF is estimated, so
    plug-in asymptotics would be anti-conservative).

    Returns (statistic, p_value).
    """
    x = np.sort(np.asarray(values, dtype=np.float64))
    n = x.size
    if n < 20:
        raise ValueError(f"need >= 20 values, got {n}")

    def sup_dist(sample):
        s = np.sort(sample)
        cdf = nvm_cdf(s, z_samples)
        i = np.arange(1, s.size + 1, dtype=np.float64)
        return max(float(np.max(i / s.size - cdf)),
                   float(np.max(cdf - (i - 1.0) / s.size)))

    stat = sup_dist(x)
    exceed = 0
    for b in range(n_boot):
        synth = nvm_sample(z_samples, n, seed, stream=("ksnvm", b))
        if sup_dist(synth) >= stat:
            exceed += 1
    return stat, (1.0 + exceed) / (n_boot + 1.0)


def bootstrap_se(stat_fn, x, n_boot=500, seed=0, stream=("bootse",)):
    """Nonparametric bootstrap standard error of a statistic."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    u = rng.uniform_at(seed, stream, 0, n_boot * n).reshape(n_boot, n)
    idx = np.minimum((u * n).astype(np.int64), n - 1)
    vals = np.array([stat_fn(x[row]) for row in idx])
    return float(np.std(vals, ddof=1))
