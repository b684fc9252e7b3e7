"""Deterministic time-indexed uniform variates.

Backward construction draws uniforms at arbitrary integer times, moving
further into the past on demand, and a finished run must be bit-for-bit
reproducible from its seed.  A sequential generator cannot do that
cheaply, so `U_i` is a pure function of `(seed, i)`: a 64-bit mix of the
counter, in the style of splitmix64.  Re-asking for any index at any
later moment returns the identical value, and extending the stream
backward is O(1).
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_SUBSTREAM_SALT = 0xD2B74407B1CE6E93


def _mix(z: int) -> int:
    # splitmix64 finalizer; full-period bijection on 64-bit words
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK
    return z ^ (z >> 31)


class UniformStream:
    """Seeded counter-based source of i.i.d.-quality uniforms in [0, 1).

    `u(i)` is defined for every integer `i`, positive or negative, and
    depends only on `(seed, i)`.  Doubles keep 53 mantissa bits, so
    `u(i) < 1` always holds and every value is reachable again.
    """

    __slots__ = ("seed", "_base")

    def __init__(self, seed: int):
        self.seed = seed & _MASK
        self._base = _mix(self.seed ^ 0x9E3779B97F4A7C15)

    def u(self, i: int) -> float:
        z = (self._base + (i & _MASK) * _GOLDEN) & _MASK
        return (_mix(z) >> 11) * 2.0**-53

    def block(self, lo: int, hi: int) -> np.ndarray:
        """Uniforms for indices lo..hi inclusive, identical to scalar u()."""
        idx = np.arange(lo, hi + 1, dtype=np.int64).astype(np.uint64)
        z = self._base + idx * np.uint64(_GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
        return (z >> np.uint64(11)) * 2.0**-53

    def substream(self, r: int) -> "UniformStream":
        """Independent stream for replica r; pure function of (seed, r)."""
        return UniformStream(_mix(self._base ^ ((r + 1) * _SUBSTREAM_SALT & _MASK)))

    def __repr__(self) -> str:
        return f"UniformStream(seed={self.seed})"


class PinnedStream:
    """A stream with hand-picked values at chosen indices.

    Used to drive constructions through known trajectories (worked
    examples, splice tests); everything not pinned falls through to the
    base stream.
    """

    __slots__ = ("pinned", "base")

    def __init__(self, pinned: Mapping[int, float], base: UniformStream | None = None):
        for i, v in pinned.items():
            if not 0.0 <= v < 1.0:
                raise ValueError(f"pinned value at index {i} outside [0, 1): {v}")
        self.pinned = dict(pinned)
        self.base = base if base is not None else UniformStream(0)

    def u(self, i: int) -> float:
        got = self.pinned.get(i)
        return got if got is not None else self.base.u(i)

    def block(self, lo: int, hi: int) -> np.ndarray:
        return np.array([self.u(i) for i in range(lo, hi + 1)])

    def substream(self, r: int) -> UniformStream:
        return self.base.substream(r)
