"""Renewal-sampled series and the coefficient profile d_{n,j}.

Y_k = X_{T_k} is generated by evaluating the truncated moving average on the
union of windows [T_k - M_c, T_k]; widely separated clusters become separate
convolution runs, so memory scales with occupied span instead of T_n.  The
innovation at time t lives at counter position t + M_c - 1 of the innovation
substream, matching longmem.generate, so deterministic(1) sampling reproduces
the plain generator bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import oaconvolve

from .. import kernels, longmem, renewal, rng
from ..longmem import ResourceLimitError
from . import covariance

__all__ = [
    "SampledSeries",
    "CoefficientProfile",
    "sample_y",
    "coefficient_profile",
    "linear_form_sums",
]


@dataclass
class SampledSeries:
    """Y_1..Y_n with the renewal path and provenance that produced it."""

    values: np.ndarray
    path: renewal.RenewalPath
    spec_hash: str
    seed: int
    truncation: int
    rejections: int = 0

    @property
    def n(self):
        return self.values.size


@dataclass
class CoefficientProfile:
    """d_{n,j} = sum_k a_{T_k - j}, stored as dense nonzero segments.

    segments: list of (j_start, values) covering the support; d2_sum is
    d_n^2 = sum_j d_{n,j}^2 and lindeberg_ratio = max_j d_{n,j}^2 / d_n^2.
    """

    segments: list
    d2_sum: float
    lindeberg_ratio: float
    n: int
    m_c: int
    toeplitz_variance: float = field(default=float("nan"))
    identity_rel_error: float = field(default=float("nan"))


def _integer_epochs(path):
    epochs = np.asarray(path.epochs)
    as_int = np.rint(epochs).astype(np.int64)
    if not np.all(np.abs(epochs - as_int) < 1e-9):
        raise ValueError(
            "sampling the discrete-time process requires an integer-valued gap law"
        )
    return as_int


def _runs(epochs, gap_limit):
    """Split sorted integer epochs into runs with inter-epoch jumps
    <= gap_limit, so each run's MA windows form one contiguous block."""
    breaks = np.nonzero(np.diff(epochs) > gap_limit)[0] + 1
    return np.split(epochs, breaks)


def sample_y(spec, law, n, seed, x_cap=longmem.DEFAULT_BUFFER_CAP,
             max_redraws=64, gap_stream=("gaps",), innov_stream=("innov",)):
    """Draw a renewal path, evaluate X along it, return the sampled series.

    Paths whose realized T_n + M_c exceeds x_cap are rejected and redrawn
    (count reported in the result; the induced conditioning is the caller's
    to weigh).  Raises ResourceLimitError when max_redraws rejections pile up,
    reporting the last realized T_n.
    """
    n = int(n)
    m_c = spec.cutoff(n)
    attempt = 0
    while True:
        stream = gap_stream if attempt == 0 else gap_stream + ("redraw", attempt)
        path = renewal.sample_path(law, n, seed, stream=stream)
        t_n = float(path.epochs[-1])
        if t_n + m_c <= x_cap:
            break
        attempt += 1
        if attempt >= max_redraws:
            raise ResourceLimitError(
                f"renewal span keeps exceeding the buffer cap: last T_n = {t_n:.3e}, "
                f"cap = {x_cap}"
            )
    epochs = _integer_epochs(path)
    a = longmem.coefficients(spec, m_c + 1)
    values = np.empty(n)
    pos = 0
    for run in _runs(epochs, m_c):
        lo = int(run[0]) - m_c  # earliest innovation time needed
        hi = int(run[-1])
        # eps_t at counter t + m_c - 1
        eps = rng.innovations_at(
            seed, innov_stream, lo + m_c - 1, hi - lo + 1,
            law=spec.innovation_law, sigma=spec.sigma_eps,
        )
        x_run = oaconvolve(eps, a, mode="valid")  # X_t, t = run[0] .. run[-1]
        values[pos:pos + run.size] = x_run[run - run[0]]
        pos += run.size
    return SampledSeries(
        values=values, path=path, spec_hash=spec.spec_hash(), seed=int(seed),
        truncation=m_c, rejections=attempt,
    )


def coefficient_profile(path_or_epochs, spec, m_c=None, check_identity=True,
                        support_cap=longmem.DEFAULT_BUFFER_CAP):
    """All nonzero d_{n,j} for a realized renewal path, by scatter-adding the
    reversed coefficient array at every epoch.

    Also verifies the conditional-variance identity
    sigma_eps^2 d_n^2 = sum_{k,k'} gamma_trunc(|T_k - T_k'|) against the
    occupancy/pair-kernel Toeplitz route (independent of the scatter route).
    """
    if isinstance(path_or_epochs, renewal.RenewalPath):
        epochs = _integer_epochs(path_or_epochs)
    else:
        epochs = np.asarray(path_or_epochs, dtype=np.int64)
    n = epochs.size
    if m_c is None:
        m_c = spec.cutoff(n)
    a = longmem.coefficients(spec, m_c + 1)
    a_rev = np.ascontiguousarray(a[::-1])
    segments = []
    d2 = 0.0
    max_d2 = 0.0
    support = 0
    for run in _runs(epochs, m_c):
        base = int(run[0]) - m_c
        length = int(run[-1]) - base + 1
        support += length
        if support > support_cap:
            raise ResourceLimitError(
                f"profile support {support} exceeds cap {support_cap}"
            )
        seg = np.zeros(length)
        kernels.scatter_add_reversed(seg, np.ascontiguousarray(run), a_rev, base)
        segments.append((base, seg))
        d2 += float(np.dot(seg, seg))
        max_d2 = max(max_d2, float(np.max(seg * seg)))
    profile = CoefficientProfile(
        segments=segments, d2_sum=d2, lindeberg_ratio=max_d2 / d2,
        n=n, m_c=m_c,
    )
    if check_identity:
        oracle = covariance.AcovOracle(spec, exact=False, m_c=m_c)
        toeplitz = covariance.conditional_variance(epochs, oracle)
        scatter = spec.sigma_eps2 * d2
        profile.toeplitz_variance = toeplitz
        profile.identity_rel_error = abs(scatter - toeplitz) / abs(toeplitz)
    return profile


def linear_form_sums(profile, spec, n_reps, seed, stream_tag="innov"):
    """sum_j d_{n,j} eps_j for n_reps independent innovation draws on a fixed
    profile; the exact representation of sum_k Y_k given T.

    Innovation replicate r reads stream (seed, stream_tag, r) at the same
    absolute positions the sampler would use, so replicate r equals the
    Y-sum of sample_y(..., innov_stream=(stream_tag, r)) on the same path.
    """
    sums = np.empty(n_reps)
    offsets = [(base + profile.m_c - 1, seg) for base, seg in profile.segments]
    for r in range(n_reps):
        acc = 0.0
        for start, seg in offsets:
            eps = rng.innovations_at(
                seed, (stream_tag, r), start, seg.size,
                law=spec.innovation_law, sigma=spec.sigma_eps,
            )
            acc += float(np.dot(seg, eps))
        sums[r] = acc
    return sums


def conditional_s_prime(profile, spec, n_reps, seed):
    """S'_n over innovation replicates for one fixed renewal path: the linear
    form normalized by its exact conditional standard deviation, so the
    sample is variance-one by construction."""
    norm = spec.sigma_eps * math.sqrt(profile.d2_sum)
    return linear_form_sums(profile, spec, n_reps, seed) / norm
