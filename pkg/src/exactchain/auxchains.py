"""Stream-only diagnostics: spontaneous traces, arrow bounds, dominating chains.

Everything here is computable from the uniforms alone, without building
the chain: which sites come for free (their uniform falls in a base
interval), how far back each stalled site must reach assuming only
spontaneous marker occurrences help it, and the integer dominating
chains whose returns to zero bound the probability that regeneration
has not happened yet.  These quantities sandwich the true regeneration
time from below and make its tail estimable by cheap replica
simulation.

Backward windows grow lazily: a site's distance to the last spontaneous
marker may be unresolved inside a finite window, in which case it is
reported as INF and the trace extends deeper on demand.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cftp import simulate_window
from .errors import KMaxExceededError, StepBudgetError
from .strings import INF
from .update import SamplerContext

_DEFAULT_BUDGET = 10**7


def _ceil_div(x: int, p: int) -> int:
    return -((-x) // p)


def _scan_sites(ctx: SamplerContext, stream, lo: int, hi: int):
    """Vectorized per-site (symbol-or-None, depth) over time indexes lo..hi.

    Bit-identical to spontaneous_symbol / mixture_depth: the cumulative
    edges are the same left-to-right float sums, and searchsorted uses
    the same half-open side.
    """
    u = stream.block(lo, hi)
    values = np.asarray(ctx.thresholds.values)
    if ctx.thresholds.saturated_at is None and np.any(u >= values[-1]):
        raise KMaxExceededError("uniform beyond the last resolved threshold")
    depth = np.searchsorted(values, u, side="right") - 1
    edges = np.cumsum(np.asarray(ctx.lb(())))
    sym = np.searchsorted(edges, u, side="right")
    spont = u < ctx.base_cut
    return sym, spont, depth


# ---------------------------------------------------------------------------
# Site-level trace
# ---------------------------------------------------------------------------


@dataclass
class SpontaneousTrace:
    """Per-site spontaneous symbols and reach demands over [lo, hi].

    * ``z[i]`` is the symbol produced by the uniform alone, None when the
      uniform is past the spontaneous region.
    * ``depth[i]`` is the mixture depth drawn by the uniform.
    * ``m[i]`` is the distance to the last spontaneous occurrence of the
      marker strictly before i (INF while unresolved in this window).
    * ``reach[i]`` is 0 for a spontaneous site, else m[i] + |w| + depth[i]:
      the length of past the site would demand if only spontaneous
      marker occurrences were available.
    """

    ctx: SamplerContext
    stream: object
    lo: int
    hi: int
    z: list
    depth: list
    m: list
    reach: list

    def index(self, i: int) -> int:
        if i < self.lo or i > self.hi:
            raise IndexError(i)
        return i - self.lo

    def z_at(self, i: int):
        return self.z[self.index(i)]

    def reach_at(self, i: int):
        return self.reach[self.index(i)]

    def extend_backward(self, new_lo: int) -> None:
        if new_lo >= self.lo:
            return
        sym, spont, depth = _scan_sites(self.ctx, self.stream, new_lo, self.lo - 1)
        z_new = [int(s) if ok else None for s, ok in zip(sym, spont)]
        self.z = z_new + self.z
        self.depth = [int(d) for d in depth] + self.depth
        self.lo = new_lo
        self._rescan()

    def _rescan(self) -> None:
        """Recompute m and reach across the whole window."""
        ctx = self.ctx
        w = ctx.w
        p = len(w)
        last_end = None  # most recent index where a spontaneous marker ends
        m_list, reach = [], []
        for pos, i in enumerate(range(self.lo, self.hi + 1)):
            mi = INF if last_end is None else i - last_end - 1
            m_list.append(mi)
            if self.z[pos] is not None:
                reach.append(0)
            elif mi is INF:
                reach.append(INF)
            else:
                reach.append(mi + p + self.depth[pos])
            if pos + 1 >= p and all(self.z[pos - j] == w[-1 - j] for j in range(p)):
                last_end = i
        self.m = m_list
        self.reach = reach


def spontaneous_trace(ctx: SamplerContext, stream, lo: int, hi: int) -> SpontaneousTrace:
    tr = SpontaneousTrace(ctx, stream, hi + 1, hi, [], [], [], [])
    tr.extend_backward(lo)
    return tr


def arrow_bound(ctx: SamplerContext, stream, m: int, n: int, *,
                step_budget: int = _DEFAULT_BUDGET,
                trace: SpontaneousTrace | None = None) -> int:
    """Largest k <= m such that no reach arrow from [k, n] crosses k.

    A lower bound for the regeneration time of [m, n] on the same
    stream: if every site's demand is satisfied inside [k, n], the
    stretch is constructible from its own uniforms.
    """
    if trace is None:
        trace = spontaneous_trace(ctx, stream, m - 8, n)
    while True:
        if trace.lo > m:
            trace.extend_backward(m - 8)
        suffmin = INF
        unresolved = False
        k = None
        for i in range(n, trace.lo - 1, -1):
            r = trace.reach_at(i)
            if r is INF:
                unresolved = True
                break
            suffmin = min(suffmin, i - r)
            if i <= m and suffmin >= i:
                k = i
                break
        if k is not None and not unresolved:
            return k
        span = trace.hi - trace.lo + 1
        if span > step_budget:
            raise StepBudgetError(
                f"no arrow bound within {step_budget} backward sites")
        trace.extend_backward(trace.lo - max(8, span))


# ---------------------------------------------------------------------------
# Block-rescaled trace
# ---------------------------------------------------------------------------


@dataclass
class BlockTrace:
    """Marker-aligned rescaling: block j covers times (j-1)|w|+1 .. j|w|.

    ``one[j]`` says the |w| uniforms of block j spell the marker
    spontaneously, each in its own base interval.  Depths rescale as
    ceil(max depth in block / |w|), distances count blocks, and the
    reach demand becomes mbar + 1 + rescaled depth.  Only marker blocks
    count as renewals here, which is what makes the bound one-sided.
    """

    ctx: SamplerContext
    stream: object
    lo: int
    hi: int
    one: list
    depth: list
    m: list
    reach: list

    def index(self, j: int) -> int:
        if j < self.lo or j > self.hi:
            raise IndexError(j)
        return j - self.lo

    def one_at(self, j: int) -> bool:
        return self.one[self.index(j)]

    def reach_at(self, j: int):
        return self.reach[self.index(j)]

    def extend_backward(self, new_lo: int) -> None:
        if new_lo >= self.lo:
            return
        ctx = self.ctx
        w = ctx.w
        p = len(w)
        # sites (new_lo-1)*p+1 .. (lo-1)*p, grouped into blocks of p
        sym, spont, depth = _scan_sites(ctx, self.stream,
                                        (new_lo - 1) * p + 1, (self.lo - 1) * p)
        nblk = self.lo - new_lo
        sym = sym.reshape(nblk, p)
        spont = spont.reshape(nblk, p)
        depth = depth.reshape(nblk, p)
        pattern = np.asarray(w)  # block spells the marker in time order
        one_new = list(np.all(spont & (sym == pattern), axis=1))
        d_new = [_ceil_div(int(d), p) for d in depth.max(axis=1)]
        self.one = [bool(x) for x in one_new] + self.one
        self.depth = d_new + self.depth
        self.lo = new_lo
        self._rescan()

    def _rescan(self) -> None:
        last_one = None
        m_list, reach = [], []
        for pos, j in enumerate(range(self.lo, self.hi + 1)):
            mj = INF if last_one is None else j - last_one - 1
            m_list.append(mj)
            if self.one[pos]:
                reach.append(0)
            elif mj is INF:
                reach.append(INF)
            else:
                reach.append(mj + 1 + self.depth[pos])
            if self.one[pos]:
                last_one = j
        self.m = m_list
        self.reach = reach


def block_trace(ctx: SamplerContext, stream, lo: int, hi: int) -> BlockTrace:
    tr = BlockTrace(ctx, stream, hi + 1, hi, [], [], [], [])
    tr.extend_backward(lo)
    return tr


def block_bound(ctx: SamplerContext, stream, n_blocks: int, *,
                step_budget: int = _DEFAULT_BUDGET,
                trace: BlockTrace | None = None) -> int:
    """Largest block index k <= 0 with no block-reach arrow crossing k.

    Relates to the site-level quantities by
    (block_bound - 1) * |w| + 1 <= arrow_bound[0, n_blocks * |w|].
    """
    if trace is None:
        trace = block_trace(ctx, stream, -8, n_blocks)
    while True:
        suffmin = INF
        unresolved = False
        k = None
        for j in range(n_blocks, trace.lo - 1, -1):
            r = trace.reach_at(j)
            if r is INF:
                unresolved = True
                break
            suffmin = min(suffmin, j - r)
            if j <= 0 and suffmin >= j:
                k = j
                break
        if k is not None and not unresolved:
            return k
        span = trace.hi - trace.lo + 1
        if span > step_budget:
            raise StepBudgetError(
                f"no block bound within {step_budget} backward blocks")
        trace.extend_backward(trace.lo - max(8, span))


# ---------------------------------------------------------------------------
# Dominating chains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DominatingChain:
    """The record chain D and its plateau companion E from one stream.

    D restarts at the origin: D_i = 0 up to the origin, and further on
    D_i = max(i - last_zero - reach_i, 0); a return to zero means a
    block demanded more past than the time since the last return.  E
    copies D exactly at zeros and at fresh records (D_i = i -
    last_zero), and holds its previous value in between; the two share
    their zero set, which is asserted during construction.
    """

    origin: int
    horizon: int
    d: tuple
    e: tuple

    def d_at(self, i: int) -> int:
        return self.d[i - self.origin]

    def e_at(self, i: int) -> int:
        return self.e[i - self.origin]

    def zeros(self) -> tuple:
        """Indicator per index origin..horizon of a return to zero."""
        return tuple(x == 0 for x in self.d)

    def first_return(self) -> int | None:
        """Steps until the first return to zero after the origin."""
        for i in range(1, len(self.d)):
            if self.d[i] == 0:
                return i
        return None


def dominating_chain(ctx: SamplerContext, stream, origin: int, horizon: int, *,
                     step_budget: int = _DEFAULT_BUDGET,
                     trace: BlockTrace | None = None) -> DominatingChain:
    """Simulate D and E over block indices origin..horizon."""
    if trace is None:
        trace = block_trace(ctx, stream, origin - 8, horizon)
    if trace.hi < horizon:
        raise ValueError("trace does not cover the horizon")
    d = [0]
    e = [0]
    last_zero = origin
    for j in range(origin + 1, horizon + 1):
        r = trace.reach_at(j)
        while r is INF:
            span = trace.hi - trace.lo + 1
            if span > step_budget:
                raise StepBudgetError(
                    f"unresolved block reach within {step_budget} blocks")
            trace.extend_backward(trace.lo - max(8, span))
            r = trace.reach_at(j)
        dj = j - last_zero - r
        if dj < 0:
            dj = 0
        if dj == 0 or dj == j - last_zero:
            e.append(dj)
        else:
            e.append(e[-1])
        d.append(dj)
        if dj == 0:
            last_zero = j
    chain = DominatingChain(origin, horizon, tuple(d), tuple(e))
    assert all((x == 0) == (y == 0) for x, y in zip(chain.d, chain.e)), \
        "plateau chain must share the record chain's zero set"
    return chain


# ---------------------------------------------------------------------------
# Tail bound report
# ---------------------------------------------------------------------------

_Z99 = 2.5758293035489004  # two-sided 99% normal quantile


@dataclass(frozen=True)
class TailBoundRow:
    l: int
    theta_tail: float
    theta_tail_ci: float
    bound: float
    bound_ci: float

    @property
    def consistent(self) -> bool:
        """Tail estimate below the bound, within overlapping 99% CIs."""
        return self.theta_tail - self.theta_tail_ci <= self.bound + self.bound_ci


@dataclass(frozen=True)
class TailBoundReport:
    """Replica estimates of the regeneration tail and its chain bound.

    For each lag l: the fraction of windows [0, n] whose regeneration
    time fell below -l, against the summed return probabilities of the
    dominating chain over the matching block range.  Also carries the
    exact tail-sum identity: summed tail counts equal the summed depth
    of regeneration, as integers.
    """

    n: int
    replicas: int
    rows: tuple
    identity_lhs: int
    identity_rhs: int
    thetas: tuple

    @property
    def consistent(self) -> bool:
        return all(r.consistent for r in self.rows)


def tail_bound_report(ctx: SamplerContext, stream, l_max: int, n: int,
                      replicas: int, *, step_budget: int = _DEFAULT_BUDGET) -> TailBoundReport:
    p = len(ctx.w)
    k_lo = [l // p for l in range(1, l_max + 1)]
    span = _ceil_div(n, p)
    horizon = k_lo[-1] + span
    thetas = []
    for rep in range(replicas):
        run = simulate_window(ctx, stream.substream(2 * rep), 0, n,
                              step_budget=step_budget)
        thetas.append(run.theta)
    sums = [0.0] * l_max
    sq = [0.0] * l_max
    for rep in range(replicas):
        chain = dominating_chain(ctx, stream.substream(2 * rep + 1), 0, horizon,
                                 step_budget=step_budget)
        zeros = chain.zeros()
        for idx in range(l_max):
            s = sum(zeros[k] for k in range(k_lo[idx], k_lo[idx] + span + 1))
            sums[idx] += s
            sq[idx] += s * s
    rows = []
    for idx, l in enumerate(range(1, l_max + 1)):
        count = sum(1 for t in thetas if t < -l)
        lhs = count / replicas
        lhs_ci = _Z99 * (lhs * (1.0 - lhs) / replicas) ** 0.5
        rhs = sums[idx] / replicas
        var = max(sq[idx] / replicas - rhs * rhs, 0.0)
        rhs_ci = _Z99 * (var / replicas) ** 0.5
        rows.append(TailBoundRow(l, lhs, lhs_ci, rhs, rhs_ci))
    deepest = max(-t for t in thetas)
    identity_lhs = sum(sum(1 for t in thetas if t < -l) for l in range(0, deepest + 1))
    identity_rhs = sum(-t for t in thetas)
    return TailBoundReport(n, replicas, tuple(rows), identity_lhs, identity_rhs,
                           tuple(thetas))
