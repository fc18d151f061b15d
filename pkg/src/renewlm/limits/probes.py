"""Numeric probes of the uniform-integrability lemma, the harmonic-mean
limit, and the FCLT normalization convention.

These are evidence-producing Monte Carlo checks (boundedness is probed by the
slope of log-estimate against log n over a dyadic grid), not proofs.
"""

from __future__ import annotations

import math

import numpy as np

from .. import renewal, rng, specfun

__all__ = [
    "ui_probe",
    "ui_probe_grid",
    "grid_slope",
    "harmonic_mean_probe",
    "fclt_scale_probe",
]

_PROBES = ("max", "double", "max_l1", "double_l1")


def _double_weights(n):
    # |[nx]-[ny]| for independent uniforms: P(g=0) = 1/n, P(g) = 2(n-g)/n^2
    g = np.arange(1, n, dtype=np.float64)
    return 2.0 * (n - g) / float(n) ** 2


def ui_probe(law, n, r, n_reps=2000, seed=0, probe="max", chunk=256):
    """One grid point of a Lemma-style uniform-integrability probe.

    probe="max":     E[((M_n+1)/b_n)^{-r}], any r > 0
    probe="double":  int int E[((T_{|[nx]-[ny]|}+1)/b_n)^{-r}] dx dy, r < alpha
    probe="max_l1" / "double_l1": the alpha = 1 variants carrying the extra
    ell(b_n)/ell*(b_n) factor (exponent 2 fixed for max_l1).

    Returns (estimate, standard error).
    """
    if probe not in _PROBES:
        raise ValueError(f"probe must be one of {_PROBES}")
    if law.alpha is None:
        raise ValueError("uniform-integrability probes need a heavy-tailed law")
    n = int(n)
    b_n = law.quantile_b(n)
    factor = 1.0
    if probe.endswith("_l1"):
        if law.alpha != 1.0:
            raise ValueError(f"{probe} is the alpha = 1 probe")
        factor = float(law.ell(b_n)) / law.ell_star(b_n)
    if probe == "max_l1":
        r = 2.0
    if probe.startswith("double") and not 0.0 < r < (law.alpha if probe == "double" else 1.0):
        raise ValueError(f"double probes need 0 < r < alpha, got r={r}")
    if r <= 0.0:
        raise ValueError(f"r must be positive, got {r}")

    w = _double_weights(n) if probe.startswith("double") else None
    acc = 0.0
    acc2 = 0.0
    done = 0
    while done < n_reps:
        c = min(chunk, n_reps - done)
        u = np.vstack([
            rng.uniform_at(seed, ("ui", probe, done + i), 0, n) for i in range(c)
        ])
        gaps = law.sample_from_uniform(u)
        if probe == "max":
            vals = ((np.max(gaps, axis=1) + 1.0) / b_n) ** -r
        elif probe == "max_l1":
            t_n = np.sum(gaps, axis=1)
            vals = ((t_n + 1.0) / b_n * factor) ** -r
        else:
            t = np.cumsum(gaps, axis=1)
            x = ((t[:, : n - 1] + 1.0) / b_n * factor) ** -r
            vals = x @ w + (b_n / factor) ** r / n  # g = 0 term: T_0 = 0
        acc += float(np.sum(vals))
        acc2 += float(np.sum(vals ** 2))
        done += c
    mean = acc / n_reps
    var = max(acc2 / n_reps - mean * mean, 0.0)
    return mean, math.sqrt(var / n_reps)


def ui_probe_grid(law, r, n_grid, n_reps=2000, seed=0, probe="max"):
    """The probe across a dyadic n grid; rows of (n, estimate, se)."""
    rows = []
    for n in n_grid:
        est, se = ui_probe(law, n, r, n_reps=n_reps, seed=seed, probe=probe)
        rows.append({"n": int(n), "estimate": est, "se": se})
    return rows


def grid_slope(rows):
    """Least-squares slope of log(estimate) against log(n); the boundedness
    evidence is |slope| ~ 0 across the grid."""
    x = np.log([row["n"] for row in rows])
    y = np.log([row["estimate"] for row in rows])
    x = x - x.mean()
    return float(np.dot(x, y) / np.dot(x, x))


def harmonic_mean_probe(n, n_reps=10_000, seed=0, via="direct"):
    """(ln n) E[n / (1/U_1 + ... + 1/U_n)] -> 1.

    via="direct" draws the uniforms; via="renewal" routes the identical
    quantity through the reciprocal-uniform renewal law and the b_n / ell*
    normalization (a consistency check of that machinery).
    Returns (estimate, standard error) of the (ln n)-scaled mean.
    """
    n = int(n)
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    acc = 0.0
    acc2 = 0.0
    if via == "direct":
        for rep in range(n_reps):
            u = rng.uniform_at(seed, ("harmonic", rep), 0, n)
            v = n / float(np.sum(1.0 / u))
            acc += v
            acc2 += v * v
    elif via == "renewal":
        law = renewal.ReciprocalUniform()
        b_n = law.quantile_b(n)  # = n
        for rep in range(n_reps):
            path = renewal.sample_path(law, n, seed, stream=("harmonic", rep))
            v = b_n / float(path.epochs[-1])  # (T_n / b_n)^{-1} / n * n
            acc += v
            acc2 += v * v
    else:
        raise ValueError(f"via must be 'direct' or 'renewal', got {via!r}")
    scale = math.log(n)
    mean = acc / n_reps
    var = max(acc2 / n_reps - mean * mean, 0.0)
    return scale * mean, scale * math.sqrt(var / n_reps)


def fclt_scale_probe(law, n, n_reps=2000, seed=0, r=None, chunk=256):
    """Empirical Laplace-scale kappa of the T_n/b_n limit.

    Matches the Monte Carlo E[(T_n/b_n)^{-r}] (default r = alpha/2) to
    kappa^{-r/alpha} E(L_1^{-r}) of the standard subordinator; reports the
    fit, its delta-method standard error, a consistency fit at r/2, and the
    distances to the candidate conventions kappa = 1 (bare limit) and
    kappa = Gamma(1-alpha) (classical normalization).
    """
    alpha = law.alpha
    if alpha is None or alpha >= 1.0 or law.finite_mean:
        raise ValueError("scale probe needs a heavy law with alpha < 1")
    n = int(n)
    if r is None:
        r = 0.5 * alpha
    b_n = law.quantile_b(n)
    moments = {r: [0.0, 0.0], r / 2.0: [0.0, 0.0]}
    done = 0
    while done < n_reps:
        c = min(chunk, n_reps - done)
        u = np.vstack([
            rng.uniform_at(seed, ("fclt", done + i), 0, n) for i in range(c)
        ])
        t_n = np.sum(law.sample_from_uniform(u), axis=1)
        ratio = t_n / b_n
        for rr, acc in moments.items():
            vals = ratio ** -rr
            acc[0] += float(np.sum(vals))
            acc[1] += float(np.sum(vals ** 2))
        done += c

    def fit(rr):
        acc, acc2 = moments[rr]
        mean = acc / n_reps
        se = math.sqrt(max(acc2 / n_reps - mean * mean, 0.0) / n_reps)
        target = specfun.inverse_stable_moment(rr, alpha)
        kappa = (target / mean) ** (alpha / rr)
        kappa_se = kappa * (alpha / rr) * se / mean
        return kappa, kappa_se

    kappa, kappa_se = fit(r)
    kappa_half, kappa_half_se = fit(r / 2.0)
    candidates = {"1": 1.0, "gamma(1-alpha)": specfun.gamma_fn(1.0 - alpha)}
    selected = min(candidates, key=lambda k: abs(candidates[k] - kappa))
    return {
        "alpha": alpha,
        "n": n,
        "r": r,
        "kappa_hat": kappa,
        "kappa_se": kappa_se,
        "kappa_hat_half_r": kappa_half,
        "kappa_half_se": kappa_half_se,
        "candidates": candidates,
        "selected": selected,
        "selected_kappa": candidates[selected],
    }
