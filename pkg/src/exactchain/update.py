"""The update function: from one uniform and a known past to a symbol.

This is the only bridge between randomness and symbols.  A uniform u
first selects a mixture depth through the global threshold partition
(`mixture_depth`); depth -1 yields a spontaneous symbol read off the
base intervals, depth l >= 0 consults the glued interval layout of the
known suffix, provided the suffix actually determines the depth-l
context (marker found, and l extra symbols known beyond it).  Otherwise
the update reports STAR: not an error, the signal that construction
must reach deeper into the past.

Pure in (u, known suffix): more knowledge can turn STAR into a symbol
but never changes a symbol already determined.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field

from .decomposition import DEFAULT_K_MAX, ThresholdSequence, build_thresholds
from .errors import KMaxExceededError
from .kernels import Kernel, SpontaneousSet, spontaneous_set
from .strings import INF, EventualPast, SuffixTuple, dist_to_last_occurrence

#: returned when the known past does not determine the present symbol
STAR = type("_Star", (), {"__repr__": lambda self: "STAR", "__bool__": lambda self: False})()

#: slack absorbing accumulated rounding at glued-layout edges; full
#: precision is ~1e-16 per addition, so anything beyond this is a bug
_EDGE_TOL = 1e-9


@dataclass
class SamplerContext:
    """Everything the update function needs, built once per (kernel, w).

    Immutable in spirit; the lower-bound cache only memoizes pure
    function values and is safe to share between replicas.
    """

    kernel: Kernel
    w: SuffixTuple
    thresholds: ThresholdSequence
    spontaneous: SpontaneousSet
    _lb_cache: dict = field(default_factory=dict, repr=False)

    @property
    def k_max(self) -> int:
        return self.thresholds.k_max

    @property
    def base_cut(self) -> float:
        """Right edge of the spontaneous region [0, alpha_{-1})."""
        return self.thresholds.alpha(-1)

    def lb(self, v: SuffixTuple) -> tuple:
        key = self.kernel.suffix_key(v)
        got = self._lb_cache.get(key)
        if got is None:
            got = self.kernel.lower_bounds(v)
            self._lb_cache[key] = got
        return got


def build_context(kernel: Kernel, w, k_max: int = DEFAULT_K_MAX) -> SamplerContext:
    w = tuple(w)
    return SamplerContext(kernel, w, build_thresholds(kernel, w, k_max),
                          spontaneous_set(kernel, w))


def mixture_depth(ctx: SamplerContext, u: float) -> int:
    """The unique k >= -1 with alpha_{k-1} <= u < alpha_k."""
    values = ctx.thresholds.values  # values[i] = alpha_{i-1}
    if u < values[0]:
        return -1
    if u >= values[-1]:
        if ctx.thresholds.saturated_at is not None:
            # saturated sequences end in exactly 1.0 and u < 1 always
            raise AssertionError("uniform at or above 1.0")
        raise KMaxExceededError(
            f"u={u} beyond the last resolved threshold {values[-1]} "
            f"(k_max={ctx.thresholds.k_max})")
    return bisect_right(values, u) - 1


def spontaneous_symbol(ctx: SamplerContext, u: float) -> int:
    """The symbol whose base interval contains u (requires u < alpha_{-1})."""
    alphas = ctx.lb(())
    left = 0.0
    last = None
    for a, width in enumerate(alphas):
        if width > 0.0:
            if u < left + width:
                return a
            left += width
            last = a
    if u - left < _EDGE_TOL and last is not None:
        return last
    raise AssertionError(f"u={u} outside the spontaneous region [0, {left})")


def update(ctx: SamplerContext, u: float, known) -> int:
    """Update function: symbol determined by (u, known suffix), or STAR.

    `known` is any sequence of symbols, most recent last (negative
    indexing), e.g. a tuple or a construction-window view.
    """
    return resolve(ctx, u, known)[0]


def resolve(ctx: SamplerContext, u: float, known) -> tuple:
    """update() plus the reach: how much past the decision consumed.

    Returns (symbol, reach) where reach is 0 for a spontaneous symbol
    and the consulted context length otherwise, or (STAR, None).
    """
    depth = mixture_depth(ctx, u)
    if depth == -1:
        return spontaneous_symbol(ctx, u), 0
    m = dist_to_last_occurrence(ctx.w, known)
    if m is INF:
        return STAR, None
    need = int(m) + len(ctx.w) + depth
    if len(known) < need:
        return STAR, None
    # walk the glued layout level by level; the depth cell
    # [alpha_{depth-1}, alpha_depth) is covered by levels <= depth
    n = ctx.kernel.alphabet.size
    window = tuple(known[j] for j in range(-need, 0))
    base = need - depth  # m + |w|
    prev = ctx.lb(())
    left = sum(prev)
    if u < left:  # depth >= 0 means u >= alpha_{-1} = sum of base widths
        raise AssertionError("depth cell below the base block")
    last = None
    for level in range(0, depth + 1):
        cur = ctx.lb(window[need - (base + level):])
        for a in range(n):
            width = cur[a] - prev[a]
            if width > 0.0:
                if u < left + width:
                    return a, need
                left += width
                last = a
        prev = cur
    if u - left < _EDGE_TOL and last is not None:
        # u fell in the sliver between the accumulated layout edge and
        # the threshold, an artifact of float accumulation order
        return last, need
    raise AssertionError(
        f"u={u} not covered by levels <= {depth} (layout edge {left})")


def update_law(ctx: SamplerContext, past: EventualPast) -> tuple[tuple, float]:
    """Law of update(U, past) under a uniform U, for a full past.

    Returns the per-symbol measure resolved up to the truncation depth
    and the unresolved tail; the exact conditional law of the kernel
    lies within tail of the resolved vector.
    """
    m = past.dist_to_last_occurrence(ctx.w)
    if m is INF:
        raise ValueError("past contains no marker occurrence")
    k_top = ctx.thresholds.resolved_depth
    vec = ctx.lb(past.window(int(m) + len(ctx.w) + k_top))
    return vec, 1.0 - sum(vec)
