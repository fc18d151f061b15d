"""Counter-based random streams.

Every stochastic object in the package draws from a Philox stream keyed by
(seed, stream path).  Philox is counter-based: a stream can be entered at an
arbitrary offset, so an innovation or a gap at absolute index ``i`` is a pure
function of ``(seed, path, i)`` and results do not depend on how work is
scheduled across workers.

Philox4x64 emits 4 raw 64-bit words per counter block and numpy's
``advance(delta)`` moves the counter by ``delta`` blocks, i.e. ``4*delta`` raw
words.  ``uniform_at`` hides this bookkeeping.
"""

from __future__ import annotations

import zlib

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

__all__ = [
    "substream",
    "uniform_at",
    "uniforms",
    "innovations_at",
    "INNOVATION_LAWS",
]

_INV_2_53 = 2.0 ** -53


def _component(p):
    # spawn keys are integers; string tags map through crc32 (stable across
    # runs and platforms, unlike hash())
    if isinstance(p, (int, np.integer)):
        return int(p)
    return zlib.crc32(str(p).encode())


def _key(seed, path):
    return SeedSequence(entropy=int(seed), spawn_key=tuple(_component(p) for p in path))


def substream(seed, *path):
    """A numpy Generator on the Philox stream keyed by (seed, *path)."""
    return Generator(Philox(seed=_key(seed, path)))


def uniform_at(seed, path, start, count):
    """``count`` uniforms in the open interval (0,1) at absolute positions
    ``start .. start+count-1`` of the (seed, path) stream.

    Uses one raw 64-bit word per uniform; ``u = (word>>11 + 0.5) * 2**-53``
    never returns 0.0 or 1.0.
    """
    start = int(start)
    if start < 0:
        raise ValueError(f"stream position must be >= 0, got {start}")
    bg = Philox(seed=_key(seed, path))
    block, rem = divmod(start, 4)
    if block:
        bg.advance(block)
    raw = bg.random_raw(rem + int(count))[rem:]
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _INV_2_53


def uniforms(seed, path, count):
    """Open-interval uniforms from the start of the (seed, path) stream."""
    return uniform_at(seed, path, 0, count)


def _gaussian(u, sigma):
    from scipy.special import ndtri

    return sigma * ndtri(u)


def _rademacher(u, sigma):
    return sigma * np.where(u < 0.5, -1.0, 1.0)


def _centered_exponential(u, sigma):
    # unit exponential minus its mean, scaled to variance sigma^2
    return sigma * (-np.log1p(-u) - 1.0)


INNOVATION_LAWS = {
    "gaussian": _gaussian,
    "rademacher": _rademacher,
    "exponential": _centered_exponential,
}


def innovations_at(seed, path, start, count, law="gaussian", sigma=1.0):
    """Mean-zero variance-``sigma**2`` innovations at absolute stream positions.

    One uniform per innovation (inverse-CDF transforms throughout), so the
    value at position ``i`` does not depend on which block it was drawn in.
    """
    try:
        transform = INNOVATION_LAWS[law]
    except KeyError:
        raise ValueError(f"unknown innovation law {law!r}") from None
    return transform(uniform_at(seed, path, start, count), float(sigma))
