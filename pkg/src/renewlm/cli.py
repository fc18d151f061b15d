"""Batch experiment runner.

Every verification in the library is exposed as a subcommand taking a JSON
config; outputs are a JSON summary (config + hash embedded), a CSV detail
file, and SVG diagnostics where a plot makes sense.  Replicates are pure
jobs keyed by (seed, replicate index): per-replicate results are identical
for any worker count, and CSV output is byte-identical across pools.

Exit codes: 0 success, 2 config schema violation, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from multiprocessing import get_context

import numpy as np

from . import __version__, config as cfgmod, kernels, longmem, specfun, stable, svgout
from .limits import covariance, gof, probes, sampling, statistics
from .longmem import ResourceLimitError
from .specfun import inverse_stable_moment, nvm_constant

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOURCE = 3

_WORKER_ENV = "RENEWLM_WORKERS"

# per-process memo of heavyweight objects, keyed by canonical config
_PROC_CACHE = {}


def _cached_setup(canon):
    state = _PROC_CACHE.get(canon)
    if state is None:
        cfg = json.loads(canon)
        law = cfgmod.build_law(cfg) if "law" in cfg else None
        spec = cfgmod.build_process_spec(cfg) if "process" in cfg else None
        state = {"cfg": cfg, "law": law, "spec": spec}
        _PROC_CACHE[canon] = state
    return state


def _pool_init():
    # kernels are deterministic for any thread count; single-threaded OMP in
    # children simply avoids oversubscription
    os.environ["OMP_NUM_THREADS"] = "1"


def _run_pool(workers, job, payloads):
    if workers <= 1:
        return [job(p) for p in payloads]
    ctx = get_context("fork")
    chunk = max(1, len(payloads) // (8 * workers))
    with ctx.Pool(workers, initializer=_pool_init) as pool:
        return pool.map(job, payloads, chunksize=chunk)


# ----------------------------------------------------------------- output --

def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_csv(path, columns, rows):
    with open(path, "w") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_summary(path, cfg, summary, wallclock, workers):
    doc = {
        "experiment": cfg["experiment"],
        "config": cfg,
        "config_hash": cfgmod.config_hash(cfg),
        "library_version": __version__,
        "kernel_backend": kernels.BACKEND,
        "workers": workers,
        "wallclock_s": round(wallclock, 3),
        "summary": summary,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ------------------------------------------------------------ clt runner --

def _clt_job(payload):
    canon, variance, rep = payload
    state = _cached_setup(canon)
    cfg, law, spec = state["cfg"], state["law"], state["spec"]
    n = int(cfg["n"])
    seed = int(cfg["seed"])
    route = cfg.get("route", "auto")
    if route == "auto":
        route = "conditional" if spec.innovation_law == "gaussian" else "direct"
    check_identity = bool(cfg.get("check_identity", False))
    if route == "conditional":
        oracle = state.setdefault(
            "oracle", covariance.AcovOracle(spec, exact=True)
        )
        from . import renewal as _renewal
        from . import rng as _rng

        path = _renewal.sample_path(law, n, seed, stream=("clt", rep))
        sd2 = covariance.conditional_variance(path.epochs, oracle)
        z = _rng.innovations_at(seed, ("clt-normal", rep), 0, 1)[0]
        return rep, math.sqrt(sd2) * z, sd2 / variance, 0.0, 0
    series = sampling.sample_y(
        spec, law, n, seed, gap_stream=("clt", rep), innov_stream=("innov", rep)
    )
    epochs = np.rint(series.path.epochs).astype(np.int64)
    if check_identity:
        profile = sampling.coefficient_profile(
            epochs, spec, m_c=series.truncation, check_identity=True
        )
        sd2 = spec.sigma_eps2 * profile.d2_sum
        ident = profile.identity_rel_error
    else:
        oracle = state.setdefault(
            "oracle", covariance.AcovOracle(spec, exact=False, m_c=series.truncation)
        )
        sd2 = covariance.conditional_variance(epochs, oracle)
        ident = 0.0
    return rep, float(np.sum(series.values)), sd2 / variance, ident, series.rejections


def run_clt(cfg, out_dir, workers, fmt):
    law = cfgmod.build_law(cfg)
    spec = cfgmod.build_process_spec(cfg)
    n = int(cfg["n"])
    seed = int(cfg["seed"])
    n_reps = int(cfg["replicates"])
    route = cfg.get("route", "auto")
    if route == "auto":
        route = "conditional" if spec.innovation_law == "gaussian" else "direct"
    regime = statistics.classify_regime(law, spec.d)

    oracle = covariance.AcovOracle(spec, exact=True) if route == "conditional" \
        else covariance.AcovOracle(spec, exact=False, m_c=spec.cutoff(n))
    var_reps = int(cfg.get("variance_replicates", max(n_reps, 1000)))
    variance, variance_se = covariance.variance_sum_y(
        law, spec, n, n_reps=var_reps, seed=seed, oracle=oracle
    )

    canon = cfgmod.canonical_json(cfg)
    results = _run_pool(workers, _clt_job, [(canon, variance, r) for r in range(n_reps)])
    results.sort(key=lambda t: t[0])
    sums = np.array([r[1] for r in results])
    r_n = np.array([r[2] for r in results])
    ident = max((r[3] for r in results), default=0.0)
    rejections = sum(r[4] for r in results)
    s_n = statistics.s_n_statistic(sums, variance)

    ks_norm, p_norm = gof.ks_one_sample_normal(s_n)
    summary = {
        "regime": regime.label,
        "regime_rationale": regime.rationale,
        "route": route,
        "variance": variance,
        "variance_se": variance_se,
        "ks_normal": ks_norm,
        "ks_normal_p": p_norm,
        "s_n_mean": float(np.mean(s_n)),
        "s_n_var": float(np.var(s_n)),
        "excess_kurtosis": statistics.excess_kurtosis(s_n),
        "identity_max_rel_error": ident,
        "rejections": rejections,
        "seed": seed,
    }

    mixture_cdf = None
    if regime.label == "nvm":
        z_paths = int(cfg.get("z_paths", 10_000))
        grid_m = int(cfg.get("grid_m", 1 << 12))
        z, zdiag = stable.sample_Z(law.alpha, spec.d, grid_m, z_paths, seed + 1)
        mix = gof.nvm_sample(z, z_paths, seed + 2)
        ks_mix, p_mix = gof.ks_two_sample(s_n, mix)
        kurt_target = 3.0 * (float(np.mean(z ** 2)) - 1.0)
        summary.update({
            "z_mean": float(np.mean(z)),
            "z_var": float(np.var(z)),
            "ks_mixture": ks_mix,
            "ks_mixture_p": p_mix,
            "kurtosis_target": kurt_target,
            "z_grid_m": grid_m,
            "z_paths": z_paths,
            "diagonal_correction": zdiag["diagonal_correction"],
        })
        mixture_cdf = lambda v: gof.nvm_cdf(v, z)  # noqa: E731

    if fmt in ("csv", "both"):
        _write_csv(
            os.path.join(out_dir, "replicates.csv"),
            ["replicate", "s_n", "r_n", "y_sum"],
            [(i, s_n[i], r_n[i], sums[i]) for i in range(n_reps)],
        )
    from scipy.special import ndtr

    svgout.svg_histogram(
        s_n, os.path.join(out_dir, "s_n_hist.svg"),
        title=f"S_n: {regime.label} regime (n={n})",
        overlay_cdf=mixture_cdf or (lambda v: ndtr(v)),
    )
    return summary


# ----------------------------------------------------------- cov runner --

def run_cov_verify(cfg, out_dir, workers, fmt):
    law = cfgmod.build_law(cfg)
    spec = cfgmod.build_process_spec(cfg)
    seed = int(cfg["seed"])
    n_reps = int(cfg["replicates"])
    lags = 2 ** np.arange(int(cfg["lag_log2_min"]), int(cfg["lag_log2_max"]) + 1)
    consts = spec.constants(alpha=law.alpha)

    kappa = 1.0
    scale_info = None
    if law.alpha is not None and law.alpha < 1.0:
        scale_info = probes.fclt_scale_probe(
            law, int(cfg.get("probe_n", 1 << 14)),
            n_reps=int(cfg.get("probe_replicates", n_reps)), seed=seed + 1,
        )
        kappa = scale_info["selected_kappa"]

    mc, se = covariance.sigma_y_mc(law, spec, lags, n_reps=n_reps, seed=seed)
    asym = np.array([
        covariance.sigma_y_asymptotic(law, consts, int(h), kappa=kappa) for h in lags
    ])
    bare = np.array([
        covariance.sigma_y_asymptotic(law, consts, int(h), kappa=1.0) for h in lags
    ])

    lx = np.log(lags.astype(np.float64))
    ly = np.log(mc)
    lxc = lx - lx.mean()
    slope = float(np.dot(lxc, ly) / np.dot(lxc, lxc))
    intercept10 = float((ly.mean() - slope * lx.mean()) / math.log(10.0))
    slope_target = (2.0 * spec.d - 1.0) / law.alpha if law.alpha < 1.0 else 2.0 * spec.d - 1.0

    summary = {
        "slope": slope,
        "slope_target": slope_target,
        "kappa": kappa,
        "scale_probe": scale_info,
        "ratio_at_max_lag": float(mc[-1] / asym[-1]),
        "max_lag": int(lags[-1]),
        "seed": seed,
    }
    if fmt in ("csv", "both"):
        _write_csv(
            os.path.join(out_dir, "covariance.csv"),
            ["lag", "sigma_y_mc", "se", "sigma_y_asymptotic", "sigma_y_asymptotic_kappa1"],
            [(int(lags[i]), mc[i], se[i], asym[i], bare[i]) for i in range(lags.size)],
        )
    svgout.svg_loglog(
        list(zip(lags.tolist(), mc.tolist())),
        os.path.join(out_dir, "covariance_loglog.svg"),
        title=f"sigma_Y decay: {law.name}, d={spec.d}",
        slope=slope / math.log(10.0) * math.log(10.0),
        intercept=intercept10,
        xlabel="lag", ylabel="sigma_Y",
    )
    return summary


# -------------------------------------------------------- sample-z runner --

def run_sample_z(cfg, out_dir, workers, fmt):
    alpha = float(cfg["alpha"])
    d = float(cfg["d"])
    grid_m = int(cfg["grid_m"])
    n_paths = int(cfg["paths"])
    seed = int(cfg["seed"])
    z, diag = stable.sample_Z(alpha, d, grid_m, n_paths, seed)
    mean = float(np.mean(z))
    se = float(np.std(z, ddof=1) / math.sqrt(n_paths))
    double_paths = int(cfg.get("doubling_paths", max(n_paths // 20, 200)))
    z2, _ = stable.sample_Z(alpha, d, 2 * grid_m, double_paths, seed + 1)
    mean2 = float(np.mean(z2))
    se2 = float(np.std(z2, ddof=1) / math.sqrt(double_paths))
    summary = {
        "mean": mean,
        "se": se,
        "var": float(np.var(z, ddof=1)),
        "doubling_mean": mean2,
        "doubling_se": se2,
        "doubling_gap_over_se": abs(mean - mean2) / math.hypot(se, se2),
        "nvm_constant": diag["nvm_constant"],
        "diagonal_correction": diag["diagonal_correction"],
        "grid_m": grid_m,
        "paths": n_paths,
        "seed": seed,
    }
    if fmt in ("csv", "both"):
        _write_csv(
            os.path.join(out_dir, "z_samples.csv"),
            ["value", "alpha", "d", "grid_m", "seed"],
            [(v, alpha, d, grid_m, seed) for v in z],
        )
    svgout.svg_histogram(
        z, os.path.join(out_dir, "z_hist.svg"),
        title=f"Z(alpha={alpha}, d={d}), M={grid_m}",
    )
    return summary


# --------------------------------------------------------- moments runner --

def run_moments(cfg, out_dir, workers, fmt):
    alpha = float(cfg["alpha"])
    d = float(cfg["d"])
    draws = int(cfg["draws"])
    seed = int(cfg["seed"])
    k_max = int(cfg.get("k_max", 3))
    r = 1.0 - 2.0 * d
    spec = stable.StableSpec(alpha)
    x = stable.sample_standard_stable(spec, draws, seed)
    rows = []
    for a in cfg.get("moment_orders", (0.3, 0.65)):
        vals = x ** -a
        mc = float(np.mean(vals))
        se = float(np.std(vals, ddof=1) / math.sqrt(draws))
        exact = inverse_stable_moment(a, alpha)
        rows.append(("inverse_moment", a, mc, se, exact, abs(mc - exact) / se))
    lap_rows = []
    for s in cfg.get("laplace_points", (0.5, 1.0, 2.0)):
        vals = np.exp(-s * x)
        mc = float(np.mean(vals))
        se = float(np.std(vals, ddof=1) / math.sqrt(draws))
        exact = math.exp(-s ** alpha)
        lap_rows.append(("laplace", s, mc, se, exact, abs(mc - exact) / se))
    nu_rows = []
    paths = int(cfg.get("nu_paths", 4000))
    grid_m = int(cfg.get("grid_m", 1 << 11))
    for k in range(1, k_max + 1):
        est, se_k = stable.nu_k_estimate(alpha, d, k, grid_m, paths, seed + k)
        stated = (1.0 / (d * (2.0 * d + 1.0))) ** k * inverse_stable_moment(k * r, alpha)
        q = r / alpha
        corrected = (2.0 / ((1.0 - q) * (2.0 - q))) ** k * inverse_stable_moment(k * r, alpha)
        nu_rows.append((k, est, se_k, stated, corrected))
    summary = {
        "alpha": alpha,
        "d": d,
        "inverse_moments": [
            {"a": a, "mc": mc, "se": se, "exact": ex, "dev_se": dv}
            for _, a, mc, se, ex, dv in rows
        ],
        "laplace": [
            {"s": s, "mc": mc, "se": se, "exact": ex, "dev_se": dv}
            for _, s, mc, se, ex, dv in lap_rows
        ],
        "nu_k": [
            {"k": k, "estimate": est, "se": se_k, "stated_bound": st,
             "corrected_bound": co, "within_stated": est <= st + 3 * se_k,
             "within_corrected": est <= co + 3 * se_k}
            for k, est, se_k, st, co in nu_rows
        ],
        "seed": seed,
    }
    if fmt in ("csv", "both"):
        _write_csv(
            os.path.join(out_dir, "moments.csv"),
            ["check", "parameter", "mc", "se", "exact", "dev_in_se"],
            rows + lap_rows,
        )
    return summary


# ---------------------------------------------------------- probes runner --

def run_probes(cfg, out_dir, workers, fmt):
    law = cfgmod.build_law(cfg)
    seed = int(cfg["seed"])
    n_reps = int(cfg["replicates"])
    grid = [2 ** k for k in range(int(cfg["n_log2_min"]), int(cfg["n_log2_max"]) + 1)]
    alpha = law.alpha
    plan = [("max", 1.0)]
    if alpha is not None:
        plan.append(("double", 0.5 * alpha))
    if alpha == 1.0:
        plan += [("max_l1", 2.0), ("double_l1", 0.5)]
    probe_results = {}
    csv_rows = []
    for name, r in plan:
        rows = probes.ui_probe_grid(law, r, grid, n_reps=n_reps, seed=seed, probe=name)
        probe_results[name] = {
            "r": r,
            "rows": rows,
            "slope": probes.grid_slope(rows),
            "max_estimate": max(row["estimate"] for row in rows),
        }
        csv_rows += [(name, row["n"], row["estimate"], row["se"]) for row in rows]
    summary = {"probes": probe_results, "seed": seed}
    if alpha is not None and alpha < 1.0:
        summary["fclt_scale"] = probes.fclt_scale_probe(
            law, grid[-1], n_reps=n_reps, seed=seed + 1
        )
    if "harmonic_n" in cfg:
        hn = int(cfg["harmonic_n"])
        hreps = int(cfg.get("harmonic_replicates", 2000))
        direct, direct_se = probes.harmonic_mean_probe(hn, hreps, seed + 2, via="direct")
        renew, renew_se = probes.harmonic_mean_probe(hn, hreps, seed + 2, via="renewal")
        summary["harmonic"] = {
            "n": hn, "replicates": hreps,
            "direct": direct, "direct_se": direct_se,
            "renewal": renew, "renewal_se": renew_se,
        }
    if fmt in ("csv", "both"):
        _write_csv(
            os.path.join(out_dir, "probes.csv"),
            ["probe", "n", "estimate", "se"], csv_rows,
        )
    return summary


# ------------------------------------------------------- lindeberg runner --

def _lindeberg_job(payload):
    canon, n, draw = payload
    state = _cached_setup(canon)
    cfg, law, spec = state["cfg"], state["law"], state["spec"]
    from . import renewal as _renewal

    path = _renewal.sample_path(law, n, int(cfg["seed"]), stream=("lind", n, draw))
    profile = sampling.coefficient_profile(path, spec, check_identity=True)
    return n, draw, profile.lindeberg_ratio, profile.d2_sum, profile.identity_rel_error


def run_lindeberg(cfg, out_dir, workers, fmt):
    grid = [2 ** k for k in range(int(cfg["n_log2_min"]), int(cfg["n_log2_max"]) + 1, 2)]
    if not grid:
        raise cfgmod.ConfigError(["n_log2_min: empty grid"])
    draws = int(cfg["draws"])
    canon = cfgmod.canonical_json(cfg)
    payloads = [(canon, n, k) for n in grid for k in range(draws)]
    results = _run_pool(workers, _lindeberg_job, payloads)
    results.sort(key=lambda t: (t[0], t[1]))
    medians = {}
    worst_identity = 0.0
    for n in grid:
        ratios = [r for (nn, _, r, _, _) in results if nn == n]
        medians[n] = float(np.median(ratios))
    worst_identity = max(r[4] for r in results)
    med_list = [medians[n] for n in grid]
    summary = {
        "grid": grid,
        "median_ratios": medians,
        "strictly_decreasing": all(a > b for a, b in zip(med_list, med_list[1:])),
        "final_median": med_list[-1],
        "identity_max_rel_error": worst_identity,
        "seed": int(cfg["seed"]),
    }
    if fmt in ("csv", "both"):
        _write_csv(
            os.path.join(out_dir, "lindeberg.csv"),
            ["n", "draw", "lindeberg_ratio", "d2_sum", "identity_rel_error"],
            results,
        )
    return summary


# ---------------------------------------------------------- regime runner --

def run_regime(cfg, out_dir, workers, fmt):
    from . import renewal as _renewal

    d_grid = cfg.get("d_grid", (0.1, 0.25, 0.4))
    alpha_grid = cfg.get("alpha_grid", (0.2, 0.6, 1.0))
    rows = []
    labels = []
    for d in d_grid:
        for alpha in alpha_grid:
            law = _renewal.DiscretePareto(alpha) if alpha < 1.0 else _renewal.ReciprocalUniform()
            lab = statistics.classify_regime(law, d)
            rows.append((d, alpha, lab.label, lab.rationale))
            labels.append((d, alpha, lab.label))
    for d in d_grid:
        lab = statistics.classify_regime(_renewal.Geometric(0.5), d)
        rows.append((d, float("inf"), lab.label, lab.rationale))
    summary = {
        "table": [
            {"d": r[0], "alpha": r[1] if math.isfinite(r[1]) else "finite-mean",
             "label": r[2], "rationale": r[3]}
            for r in rows
        ],
    }
    if fmt in ("csv", "both"):
        _write_csv(
            os.path.join(out_dir, "regime.csv"),
            ["d", "alpha", "label", "rationale"],
            [(r[0], r[1], r[2], r[3]) for r in rows],
        )
    svgout.svg_regime_map(labels, os.path.join(out_dir, "regime_map.svg"))
    return summary


_RUNNERS = {
    "cov-verify": run_cov_verify,
    "clt": run_clt,
    "sample-z": run_sample_z,
    "moments": run_moments,
    "probes": run_probes,
    "lindeberg": run_lindeberg,
    "regime": run_regime,
}


def _parser():
    p = argparse.ArgumentParser(
        prog="renewlm",
        description="Long-memory renewal-sampling experiments",
    )
    sub = p.add_subparsers(dest="experiment", required=True)
    for name in cfgmod.EXPERIMENTS:
        sp = sub.add_parser(name, help=f"run the {name} experiment")
        sp.add_argument("--config", required=True, help="JSON config path")
        sp.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
        sp.add_argument("--workers", type=int, default=None,
                        help=f"worker count (default ${_WORKER_ENV} or 1)")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--format", choices=("json", "csv", "both"),
                        default="both", help="which outputs to write")
    return p


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config: cannot read {args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not isinstance(cfg, dict):
        print("config: expected a JSON object", file=sys.stderr)
        return EXIT_CONFIG
    cfg.setdefault("experiment", args.experiment)
    if cfg["experiment"] != args.experiment:
        print(
            f"experiment: config file says {cfg['experiment']!r} but the "
            f"subcommand is {args.experiment!r}",
            file=sys.stderr,
        )
        return EXIT_CONFIG
    if args.seed is not None:
        cfg["seed"] = args.seed
    try:
        cfgmod.validate_config(cfg)
    except cfgmod.ConfigError as exc:
        for line in exc.errors:
            print(f"config error: {line}", file=sys.stderr)
        return EXIT_CONFIG

    workers = args.workers
    if workers is None:
        workers = int(cfg.get("workers", os.environ.get(_WORKER_ENV, "1")))
    out_dir = args.out or os.path.join(
        "out", f"{args.experiment}-{cfgmod.config_hash(cfg)}"
    )
    os.makedirs(out_dir, exist_ok=True)

    started = time.monotonic()
    try:
        summary = _RUNNERS[args.experiment](cfg, out_dir, workers, args.format)
    except ResourceLimitError as exc:
        print(f"resource cap exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    wallclock = time.monotonic() - started
    if args.format in ("json", "both"):
        _write_summary(
            os.path.join(out_dir, "summary.json"), cfg, summary, wallclock, workers
        )
    print(f"{args.experiment}: wrote {out_dir} ({wallclock:.1f}s)")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
