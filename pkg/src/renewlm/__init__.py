"""renewlm: long-memory linear processes sampled at renewal times.

Simulation library and experiment CLI for the covariance asymptotics of a
long-memory process observed along a heavy-tailed renewal sequence, the
Normal / Normal-Variance-Mixture regime map of its self-normalized sums, and
the stable-subordinator variance functional behind the mixture.
"""

__version__ = "0.1.0"

from . import kernels, limits, longmem, renewal, rng, specfun, stable

__all__ = [
    "kernels",
    "limits",
    "longmem",
    "renewal",
    "rng",
    "specfun",
    "stable",
    "__version__",
]
