"""NumPy fallback for the compiled pair kernels.

Same contracts and the same row-ordered summation as ``_core`` (row partial
sums reduced in index order), so results are reproducible here too; only
throughput differs.  Selected automatically when the extension is missing or
``RENEWLM_FORCE_PY=1``.
"""

from __future__ import annotations

import numpy as np


def pairwise_pow_sum(x, w, min_sep=1):
    x = np.ascontiguousarray(x, dtype=np.float64)
    n = x.size
    if n - min_sep <= 0:
        return 0.0
    total = 0.0
    for i in range(n - min_sep):
        total += float(np.sum((x[i + min_sep:] - x[i]) ** w))
    return total


def pairwise_acov_sum(t, table, coef, w):
    t = np.ascontiguousarray(t, dtype=np.float64)
    table = np.ascontiguousarray(table, dtype=np.float64)
    n = t.size
    tlen = table.size
    if n < 2:
        return 0.0
    total = 0.0
    for i in range(n - 1):
        lags = t[i + 1:] - t[i]
        split = np.searchsorted(lags, float(tlen), side="left")
        acc = float(np.sum(table[(lags[:split] + 0.5).astype(np.int64)]))
        if coef != 0.0 and split < lags.size:
            acc += coef * float(np.sum(lags[split:] ** w))
        total += acc
    return total


def scatter_add_reversed(out, pos, a_rev, base):
    la = a_rev.size
    if pos.size == 0 or la == 0:
        return
    lo = int(pos[0]) - base - (la - 1)
    hi = int(pos[-1]) - base
    if lo < 0 or hi >= out.size:
        raise ValueError("scatter_add_reversed: slice out of range")
    for p in pos:
        start = int(p) - base - (la - 1)
        out[start:start + la] += a_rev


def fastpow(x, w):
    return float(x) ** float(w)
