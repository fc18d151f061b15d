"""Experiment engine: sampled series, covariance verification, regime
statistics, uniform-integrability probes, and goodness-of-fit tests."""

from . import covariance, gof, probes, sampling, statistics
from .covariance import (
    AcovOracle,
    conditional_variance,
    discrete_pareto_sigma_y_closed_form,
    positivity_window,
    sigma_y_asymptotic,
    sigma_y_mc,
    sigma_y_mc_table,
    variance_sum_y,
)
from .gof import (
    bootstrap_se,
    kolmogorov_sf,
    ks_against_nvm,
    ks_one_sample_normal,
    ks_two_sample,
    nvm_cdf,
    nvm_sample,
)
from .probes import (
    fclt_scale_probe,
    grid_slope,
    harmonic_mean_probe,
    ui_probe,
    ui_probe_grid,
)
from .sampling import (
    CoefficientProfile,
    SampledSeries,
    coefficient_profile,
    conditional_s_prime,
    linear_form_sums,
    sample_y,
)
from .statistics import (
    CltBatch,
    RegimeLabel,
    classify_regime,
    clt_batch,
    excess_kurtosis,
    r_n_batch,
    s_n_statistic,
)

__all__ = [
    "covariance",
    "gof",
    "probes",
    "sampling",
    "statistics",
    "AcovOracle",
    "conditional_variance",
    "discrete_pareto_sigma_y_closed_form",
    "positivity_window",
    "sigma_y_asymptotic",
    "sigma_y_mc",
    "sigma_y_mc_table",
    "variance_sum_y",
    "bootstrap_se",
    "kolmogorov_sf",
    "ks_against_nvm",
    "ks_one_sample_normal",
    "ks_two_sample",
    "nvm_cdf",
    "nvm_sample",
    "fclt_scale_probe",
    "grid_slope",
    "harmonic_mean_probe",
    "ui_probe",
    "ui_probe_grid",
    "CoefficientProfile",
    "SampledSeries",
    "coefficient_profile",
    "conditional_s_prime",
    "linear_form_sums",
    "sample_y",
    "CltBatch",
    "RegimeLabel",
    "classify_regime",
    "clt_batch",
    "excess_kurtosis",
    "r_n_batch",
    "s_n_statistic",
]
