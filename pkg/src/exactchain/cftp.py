"""Coupling from the past on the mixture decomposition.

A window [m, n] is attempted forward first; whenever the next site
cannot be determined from what is already built, time steps backward,
drawing fresh uniforms, until one falls in the spontaneous region and
seeds a new forward sweep.  The loop ends when every site of the window
(and of the backward excursion) is built, at the regeneration time: the
most recent instant from which the whole stretch up to n is a function
of the uniforms in between only.  The output is then an exact draw from
the unique stationary law restricted to the window — no burn-in, no
approximation beyond double precision.

Per-site *lookbacks* (how much past each decision consumed) are kept:
they are what later splits a long realization into independent blocks.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .errors import StepBudgetError
from .update import STAR, SamplerContext, resolve, spontaneous_symbol

DEFAULT_STEP_BUDGET = 10**7


class _Span:
    """Negative-index view over the contiguous built block [lo, hi]."""

    __slots__ = ("buf", "lo", "hi")

    def __init__(self, buf, lo, hi):
        self.buf = buf
        self.lo = lo
        self.hi = hi

    def __len__(self):
        return self.hi - self.lo + 1

    def __getitem__(self, j):
        # j is a negative depth: -1 is the most recent symbol
        t = self.hi + 1 + j
        if t < self.lo or t > self.hi:
            raise IndexError(j)
        return self.buf[t]


@dataclass(frozen=True)
class CftpRun:
    """A completed construction of the window [m, n].

    `symbols` and `lookbacks` cover theta..n; `lookbacks[t]` is the
    context length consumed when site t was decided (0 = spontaneous).
    Identical (context, stream, window) inputs reproduce a run exactly.
    """

    m: int
    n: int
    theta: int
    symbols: tuple
    lookbacks: tuple
    uniforms_drawn: int

    def symbol(self, t: int) -> int:
        return self.symbols[t - self.theta]

    def lookback(self, t: int) -> int:
        return self.lookbacks[t - self.theta]

    @property
    def window_symbols(self) -> tuple:
        return self.symbols[self.m - self.theta:]


def simulate_window(ctx: SamplerContext, stream, m: int, n: int, *,
                    step_budget: int = DEFAULT_STEP_BUDGET,
                    conservative: bool = False) -> CftpRun:
    """Run the construction for the window [m, n] and return it.

    `conservative` restricts the backward stopping rule to the classical
    smaller spontaneous region |E| * min alpha instead of the exact one
    [0, alpha_-1); both are correct, the exact region minimizes backward
    steps and makes the reported theta the true regeneration time.
    """
    if m > n:
        raise ValueError("empty window")
    cut = ctx.spontaneous.conservative_threshold if conservative else ctx.base_cut
    u = {}

    def draw(i):
        u[i] = stream.u(i)

    buf = {}
    look = {}
    todo = set()
    heap = []

    for i in range(m, n + 1):
        draw(i)

    # forward pass from the left edge
    stalled = None
    for i in range(m, n + 1):
        sym, reach = resolve(ctx, u[i], _Span(buf, m, i - 1))
        if sym is STAR:
            stalled = i
            break
        buf[i] = sym
        look[i] = reach
    if stalled is None:
        return _finish(m, n, m, buf, look, len(u))
    for t in range(stalled, n + 1):
        todo.add(t)
        heapq.heappush(heap, t)

    # backward loop: each failed sweep steps one site further into the past
    i = m
    steps = 0
    while todo:
        i -= 1
        steps += 1
        draw(i)
        while u[i] >= cut:
            todo.add(i)
            heapq.heappush(heap, i)
            i -= 1
            steps += 1
            if steps > step_budget:
                raise StepBudgetError(
                    f"no regeneration within {step_budget} backward steps")
            draw(i)
        if steps > step_budget:
            raise StepBudgetError(
                f"no regeneration within {step_budget} backward steps")
        buf[i] = spontaneous_symbol(ctx, u[i])
        look[i] = 0
        todo.discard(i)
        # sweep forward as far as the fresh knowledge carries
        while todo:
            while heap and heap[0] not in todo:
                heapq.heappop(heap)
            t = heap[0]
            sym, reach = resolve(ctx, u[t], _Span(buf, i, t - 1))
            if sym is STAR:
                break
            buf[t] = sym
            look[t] = reach
            todo.remove(t)
    return _finish(m, n, i, buf, look, len(u))


def _finish(m, n, theta, buf, look, drawn) -> CftpRun:
    symbols = tuple(buf[t] for t in range(theta, n + 1))
    lookbacks = tuple(look[t] for t in range(theta, n + 1))
    return CftpRun(m, n, theta, symbols, lookbacks, drawn)


def regeneration_time(ctx: SamplerContext, stream, m: int, n: int | None = None,
                      **kw) -> int:
    """theta[m, n]; theta[m] when n is omitted."""
    return simulate_window(ctx, stream, m, m if n is None else n, **kw).theta


def sample_stationary(ctx: SamplerContext, stream, length: int, **kw) -> CftpRun:
    """Exact stationary sample of the given length, at times 1..length."""
    if length < 1:
        raise ValueError("length must be >= 1")
    return simulate_window(ctx, stream, 1, length, **kw)


# ---------------------------------------------------------------------------
# Regeneration split
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegenerationSplit:
    """Cut times and the blocks they delimit.

    A time t is a cut when no decision at or after t reached back past
    t; the stretch from one cut to the next is then a function of the
    uniforms inside it alone.  `blocks[i]` spans [times[i], times[i+1]);
    `trailing` is the unfinished stretch from the last cut to the window
    edge.  Blocks away from the boundary are independent and
    identically distributed.
    """

    times: tuple
    blocks: tuple
    trailing: tuple

    @property
    def interior_blocks(self) -> tuple:
        """Blocks free of boundary effects (drops the first block)."""
        return self.blocks[1:]


def regeneration_split(run: CftpRun) -> RegenerationSplit:
    """Split a completed run along its cut times."""
    cuts = []
    reach_min = run.n + 1
    pending = []
    for t in range(run.n, run.theta - 1, -1):
        reach_min = min(reach_min, t - run.lookback(t))
        if reach_min >= t:
            pending.append(t)
    cuts = pending[::-1]
    blocks = tuple(tuple(run.symbol(x) for x in range(a, b))
                   for a, b in zip(cuts, cuts[1:]))
    trailing = tuple(run.symbol(x) for x in range(cuts[-1], run.n + 1))
    return RegenerationSplit(tuple(cuts), blocks, trailing)
