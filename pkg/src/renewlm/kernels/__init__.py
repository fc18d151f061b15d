"""Hot-kernel backend selection.

The compiled extension (``renewlm.kernels._core``, Cython + OpenMP) is used
when importable; otherwise the NumPy reference implementation takes over.
``RENEWLM_FORCE_PY=1`` forces the fallback (used by the benchmark and the
equivalence tests).  Both backends implement:

- ``pairwise_pow_sum(x, w, min_sep)``   -- sum of (x[j]-x[i])**w, j-i >= min_sep
- ``pairwise_acov_sum(t, table, coef, w)`` -- sum of gamma(t[j]-t[i]) over i<j,
  table lookup below len(table), coef*h**w beyond (coef=0: zero beyond)
- ``scatter_add_reversed(out, pos, a_rev, base)`` -- coefficient-profile update
"""

from __future__ import annotations

import importlib
import os

from . import reference

_compiled = None
if os.environ.get("RENEWLM_FORCE_PY", "0") != "1":
    try:
        _compiled = importlib.import_module(__name__ + "._core")
    except ImportError:
        _compiled = None

_impl = _compiled if _compiled is not None else reference

BACKEND = "compiled" if _compiled is not None else "numpy"

pairwise_pow_sum = _impl.pairwise_pow_sum
pairwise_acov_sum = _impl.pairwise_acov_sum
scatter_add_reversed = _impl.scatter_add_reversed
fastpow = _impl.fastpow


def using_compiled():
    return BACKEND == "compiled"
