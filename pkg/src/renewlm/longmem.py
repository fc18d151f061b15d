"""Long-memory linear process: coefficients, generation, covariance oracles.

The process is X_t = sum_{i=0}^{M_c} a_i eps_{t-i} with a_i ~ C_d i^{d-1}.
Two coefficient families are provided: the fractional-difference recursion
("farima", C_d = 1/Gamma(d)) and a pure power law.  Generation is FFT
overlap-add convolution of counter-addressed innovations, so a path is a pure
function of (spec, n, seed) regardless of scheduling.
"""

from __future__ import annotations

import hashlib
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.signal import oaconvolve

from . import rng, specfun
from .specfun import ModelConstants

__all__ = [
    "LinearProcessSpec",
    "SeriesPath",
    "ResourceLimitError",
    "coefficients",
    "generate",
    "exact_acov",
    "acov_table",
    "truncated_acov_table",
    "asymptotic_acov",
    "u_ratio",
]

FAMILIES = ("farima", "powerlaw")

# default hard cap on generated array lengths (values, not bytes)
DEFAULT_BUFFER_CAP = 2 ** 28


class ResourceLimitError(RuntimeError):
    """Requested simulation exceeds the configured memory budget."""


@dataclass(frozen=True)
class LinearProcessSpec:
    """Long-memory moving-average specification.

    truncation is the MA cutoff M_c; None means the 4n default at generation
    time (truncation bias in the covariance is O(M_c^{2d-1}) and is recorded
    in path metadata).  c_d is only meaningful for the powerlaw family; the
    farima family has C_d = 1/Gamma(d) built in.
    """

    d: float
    sigma_eps2: float = 1.0
    family: str = "farima"
    c_d: float = 1.0
    truncation: int | None = None
    innovation_law: str = "gaussian"

    def __post_init__(self):
        if not 0.0 < self.d < 0.5:
            raise ValueError(f"d must lie in (0, 1/2), got {self.d}")
        if self.sigma_eps2 <= 0.0:
            raise ValueError(f"sigma_eps2 must be positive, got {self.sigma_eps2}")
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.c_d <= 0.0:
            raise ValueError(f"c_d must be positive, got {self.c_d}")
        if self.truncation is not None and self.truncation < 1:
            raise ValueError(f"truncation must be >= 1, got {self.truncation}")
        if self.innovation_law not in rng.INNOVATION_LAWS:
            raise ValueError(f"unknown innovation law {self.innovation_law!r}")

    @property
    def sigma_eps(self):
        return math.sqrt(self.sigma_eps2)

    def coefficient_scale(self):
        """C_d in a_i ~ C_d i^{d-1}."""
        if self.family == "farima":
            return 1.0 / specfun.gamma_fn(self.d)
        return self.c_d

    def constants(self, alpha=1.0):
        return ModelConstants(
            d=self.d, alpha=alpha, sigma_eps2=self.sigma_eps2,
            c_d=self.coefficient_scale(),
        )

    def cutoff(self, n):
        """Effective MA cutoff for a length-n request."""
        return self.truncation if self.truncation is not None else 4 * int(n)

    def spec_hash(self):
        payload = json.dumps(
            {
                "d": self.d,
                "sigma_eps2": self.sigma_eps2,
                "family": self.family,
                "c_d": self.c_d,
                "truncation": self.truncation,
                "innovation_law": self.innovation_law,
            },
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass
class SeriesPath:
    """Realized X_1..X_n plus provenance."""

    values: np.ndarray
    spec_hash: str
    seed: int
    truncation: int
    truncation_bias_bound: float = field(default=0.0)

    def __len__(self):
        return self.values.size

    def to_csv(self, path_or_buf):
        buf = io.StringIO()
        buf.write(f"# spec_hash={self.spec_hash} seed={self.seed} "
                  f"truncation={self.truncation}\n")
        buf.write("x\n")
        for v in self.values:
            buf.write(f"{v!r}\n")
        data = buf.getvalue()
        if hasattr(path_or_buf, "write"):
            path_or_buf.write(data)
        else:
            with open(path_or_buf, "w") as fh:
                fh.write(data)


def coefficients(spec, count):
    """a_0 .. a_{count-1} of the moving average.

    farima: a_0 = 1, a_i = a_{i-1} (i-1+d)/i (fractional difference weights);
    powerlaw: a_0 = 1, a_i = C_d i^{d-1}.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    d = spec.d
    if spec.family == "farima":
        a = np.empty(count)
        a[0] = 1.0
        if count > 1:
            i = np.arange(1, count, dtype=np.float64)
            a[1:] = np.cumprod((i - 1.0 + d) / i)
        return a
    a = np.empty(count)
    a[0] = 1.0
    if count > 1:
        i = np.arange(1, count, dtype=np.float64)
        a[1:] = spec.c_d * i ** (d - 1.0)
    return a


def innovations(spec, seed, start, count, stream=("innov",)):
    """Innovations at absolute indices; index t maps to stream position
    t + M_c_offset handled by callers.  Exposed for the sampling module."""
    return rng.innovations_at(
        seed, stream, start, count, law=spec.innovation_law, sigma=spec.sigma_eps
    )


def generate(spec, n, seed, buffer_cap=DEFAULT_BUFFER_CAP):
    """X_1..X_n by overlap-add FFT convolution of M_c + n innovations.

    Deterministic in (spec, n, seed).  Innovation eps_t sits at stream
    position t + M_c - 1 (t ranges over 1-M_c .. n), the convention shared
    with the renewal-sampled generator.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    m_c = spec.cutoff(n)
    total = n + m_c
    if total > buffer_cap:
        raise ResourceLimitError(
            f"n + M_c = {total} exceeds the buffer cap {buffer_cap}"
        )
    a = coefficients(spec, m_c + 1)
    eps = innovations(spec, seed, 0, total)
    x = oaconvolve(eps, a, mode="valid")
    # absolute bound on the variance left in the discarded MA tail
    c_d = spec.coefficient_scale()
    bias = spec.sigma_eps2 * c_d ** 2 * m_c ** (2.0 * spec.d - 1.0) / (1.0 - 2.0 * spec.d)
    return SeriesPath(
        values=x, spec_hash=spec.spec_hash(), seed=int(seed),
        truncation=m_c, truncation_bias_bound=bias,
    )


def _farima_log_acov0(d, sigma2):
    return math.log(sigma2) + specfun.log_gamma(1.0 - 2.0 * d) - 2.0 * specfun.log_gamma(1.0 - d)


def exact_acov(h, spec):
    """Autocovariance of the untruncated process at lag h >= 0.

    farima: sigma^2 Gamma(1-2d) Gamma(h+d) / (Gamma(d) Gamma(1-d) Gamma(h+1-d)),
    evaluated in log space (valid for real h as well, which the renewal-sampled
    covariance E[sigma_X(T_h)] relies on for continuous gap laws).
    powerlaw: sigma^2 sum_i a_i a_{i+h}, direct sum plus an Euler-Maclaurin
    tail, relative tolerance 1e-10.
    """
    harr = np.asarray(h, dtype=np.float64)
    if np.any(harr < 0):
        raise ValueError(f"lag must be >= 0, got {h}")
    d = spec.d
    if spec.family == "farima":
        lg = specfun.log_gamma
        val = np.exp(
            _farima_log_acov0(d, spec.sigma_eps2)
            + lg(harr + d) - lg(d) - lg(harr + 1.0 - d) + lg(1.0 - d)
        )
        return float(val) if np.isscalar(h) or harr.ndim == 0 else val
    if harr.ndim != 0:
        return np.array([_powerlaw_acov(float(v), spec) for v in harr])
    return _powerlaw_acov(float(harr), spec)


def _powerlaw_acov(h, spec, n_direct=1 << 14):
    # a_0 = 1, a_i = c_d i^{d-1}:  gamma(h) = s2 (a_0 a_h + c^2 sum f(i))
    d, c, s2 = spec.d, spec.c_d, spec.sigma_eps2
    if not float(h).is_integer():
        raise ValueError("powerlaw exact_acov requires integer lags")
    if h == 0:
        return s2 * (1.0 + c * c * specfun.zeta(2.0 - 2.0 * d))

    def f(x):
        return x ** (d - 1.0) * (x + h) ** (d - 1.0)

    i = np.arange(1.0, n_direct)
    direct = float(np.sum(f(i)))
    # Euler-Maclaurin tail from i = n_direct on
    nd = float(n_direct)
    tail = quad(f, nd, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)[0]
    fp = (d - 1.0) * (nd ** (d - 2.0) * (nd + h) ** (d - 1.0)
                      + nd ** (d - 1.0) * (nd + h) ** (d - 2.0))
    tail += 0.5 * f(nd) - fp / 12.0
    return s2 * (c * h ** (d - 1.0) + c * c * (direct + tail))


def acov_table(spec, max_lag):
    """gamma(0..max_lag) of the untruncated farima process via the ratio
    recursion gamma(h) = gamma(h-1) (h-1+d)/(h-d)."""
    if spec.family != "farima":
        raise ValueError("acov_table is defined for the farima family")
    d = spec.d
    g0 = math.exp(_farima_log_acov0(d, spec.sigma_eps2))
    out = np.empty(int(max_lag) + 1)
    out[0] = g0
    if max_lag >= 1:
        h = np.arange(1, int(max_lag) + 1, dtype=np.float64)
        out[1:] = g0 * np.cumprod((h - 1.0 + d) / (h - d))
    return out


def truncated_acov_table(spec, m_c, max_lag=None):
    """gamma_trunc(h) = sigma^2 sum_{i=0}^{M_c-h} a_i a_{i+h} of the process
    actually generated with cutoff M_c, computed by FFT autocorrelation."""
    a = coefficients(spec, int(m_c) + 1)
    nfft = 1
    while nfft < 2 * a.size:
        nfft <<= 1
    fa = np.fft.rfft(a, nfft)
    corr = np.fft.irfft(fa * np.conj(fa), nfft)[: a.size]
    if max_lag is not None:
        corr = corr[: int(max_lag) + 1]
    return spec.sigma_eps2 * corr


def asymptotic_acov(h, consts):
    """Leading-order covariance C~_d h^{2d-1} (asymptotic; h >= 1)."""
    harr = np.asarray(h, dtype=np.float64)
    if np.any(harr < 1):
        raise ValueError("asymptotic_acov requires h >= 1")
    val = specfun.tilde_c_d(consts) * harr ** (2.0 * consts.d - 1.0)
    return float(val) if np.isscalar(h) else val


def u_ratio(h, spec):
    """u(h) = sigma_X(h-1) / h^{2d-1}: the bounded slowly-converging factor in
    sigma_X(h) = u(h+1)(h+1)^{2d-1}; tends to C~_d."""
    harr = np.asarray(h, dtype=np.float64)
    if np.any(harr < 1):
        raise ValueError("u_ratio requires h >= 1")
    gam = exact_acov(harr - 1.0, spec)
    val = gam / harr ** (2.0 * spec.d - 1.0)
    return float(val) if np.isscalar(h) else val
