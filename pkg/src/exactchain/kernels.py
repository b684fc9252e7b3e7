"""Transition kernels with computable worst-case envelopes.

A kernel here is more than a conditional law: alongside the exact
probability given a fully described past, each family must provide
``lower_bounds(v)``, the per-symbol infimum of the next-symbol law over
every infinite completion of the finite suffix ``v``.  The whole
construction stands on those bounds being *true* lower bounds: an
under-estimate only slows the sampler down, an over-estimate silently
breaks exactness.  Finite-order families compute them by exhaustive
minimization; the built-in unbounded-memory family carries analytic
bounds derived from its structure.

Families
--------
* :class:`MarkovKernel` — finite order k, table driven; the oracle
  workhorse for tests (order 0 is the i.i.d. kernel).
* :class:`RenewalKernel` — alphabet {1, 2}; after the last occurrence of
  "2" at distance m the probability of "2" is ``r_m + delta_m * x``
  where x in [0, 1] reads the symbols beyond that occurrence as binary
  digits.  Depends on the unbounded past and, when ``lim r_m != q``
  (q being the no-"2"-ever probability), the all-"1" past is a genuine
  discontinuity point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Hashable, Sequence

import numpy as np

from .errors import MalformedTableError, NotSpontaneousError
from .strings import INF, Alphabet, EventualPast, SuffixTuple, dist_to_last_occurrence

ROW_TOL = 1e-12


# ---------------------------------------------------------------------------
# Parameter sequences for the renewal family
# ---------------------------------------------------------------------------


class SequenceRule:
    """A closed-form sequence m -> value with exact tail extrema.

    ``inf_from(n)`` / ``sup_from(n)`` are the exact infimum / supremum of
    the values at indices >= n; they are what makes analytic envelope
    bounds possible when the index is only known to exceed n.
    """

    def value(self, m: int) -> float:
        raise NotImplementedError

    def inf_from(self, n: int) -> float:
        raise NotImplementedError

    def sup_from(self, n: int) -> float:
        raise NotImplementedError

    def index_key(self, m: int) -> Hashable:
        """Collapse indices that provably share value and tail behaviour."""
        return m

    def settle_horizon(self) -> int:
        """Index beyond which inf_from/sup_from no longer change."""
        return 0


@dataclass(frozen=True)
class ConstantRule(SequenceRule):
    c: float

    def value(self, m: int) -> float:
        return self.c

    def inf_from(self, n: int) -> float:
        return self.c

    def sup_from(self, n: int) -> float:
        return self.c

    def index_key(self, m: int) -> Hashable:
        return 0


@dataclass(frozen=True)
class PeriodicRule(SequenceRule):
    values: tuple

    def __post_init__(self):
        if not self.values:
            raise ValueError("periodic rule needs at least one value")

    def value(self, m: int) -> float:
        return self.values[m % len(self.values)]

    def inf_from(self, n: int) -> float:
        # every residue occurs infinitely often past any n
        return min(self.values)

    def sup_from(self, n: int) -> float:
        return max(self.values)

    def index_key(self, m: int) -> Hashable:
        return m % len(self.values)


@dataclass(frozen=True)
class TableRule(SequenceRule):
    values: tuple
    tail: float

    def value(self, m: int) -> float:
        return self.values[m] if m < len(self.values) else self.tail

    def inf_from(self, n: int) -> float:
        return min(list(self.values[n:]) + [self.tail])

    def sup_from(self, n: int) -> float:
        return max(list(self.values[n:]) + [self.tail])

    def index_key(self, m: int) -> Hashable:
        return min(m, len(self.values))

    def settle_horizon(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class GeometricRule(SequenceRule):
    """value(m) = limit + (start - limit) * ratio**m, monotone toward limit."""

    start: float
    ratio: float
    limit: float

    def __post_init__(self):
        if not 0.0 < self.ratio < 1.0:
            raise ValueError("ratio must be in (0, 1)")

    def value(self, m: int) -> float:
        return self.limit + (self.start - self.limit) * self.ratio**m

    def inf_from(self, n: int) -> float:
        return min(self.value(n), self.limit)

    def sup_from(self, n: int) -> float:
        return max(self.value(n), self.limit)

    def index_key(self, m: int) -> Hashable:
        # once the float value has converged to the limit it stays there
        return min(m, self._settle())

    def _settle(self) -> int:
        m = 0
        while m < 8192 and self.value(m) != self.limit:
            m += 1
        return m

    def settle_horizon(self) -> int:
        return self._settle()


def tail_sum_sup(a: SequenceRule, b: SequenceRule, n: int) -> float:
    """Upper bound on sup_{m >= n} (a_m + b_m).

    Exact for pre-period + periodic tails (scanned pointwise); for other
    combinations falls back to sup a + sup b.  Over-estimating here makes
    the envelope's complementary bound smaller, which is the safe
    direction: bounds stay true lower bounds.
    """
    ha, hb = a.settle_horizon(), b.settle_horizon()
    pa = len(a.values) if isinstance(a, PeriodicRule) else 1
    pb = len(b.values) if isinstance(b, PeriodicRule) else 1
    horizon = max(ha, hb) + math.lcm(pa, pb)
    best = max((a.value(m) + b.value(m) for m in range(n, n + horizon + 1)), default=-INF)
    if isinstance(a, GeometricRule) or isinstance(b, GeometricRule):
        tail = a.sup_from(n + horizon + 1) + b.sup_from(n + horizon + 1)
    else:
        tail = best  # scan already covered a full period past the pre-period
    return max(best, tail)


def make_rule(spec) -> SequenceRule:
    """Build a rule from a number or a {kind: ...} mapping (config files)."""
    if isinstance(spec, (int, float)):
        return ConstantRule(float(spec))
    kind = spec.get("kind")
    if kind == "constant":
        return ConstantRule(float(spec["value"]))
    if kind == "periodic":
        return PeriodicRule(tuple(float(x) for x in spec["values"]))
    if kind == "table":
        return TableRule(tuple(float(x) for x in spec["values"]), float(spec["tail"]))
    if kind == "geometric":
        return GeometricRule(float(spec["start"]), float(spec["ratio"]), float(spec["limit"]))
    raise ValueError(f"unknown sequence rule kind {kind!r}")


# ---------------------------------------------------------------------------
# Kernel base
# ---------------------------------------------------------------------------


class Kernel:
    """Conditional next-symbol law plus a sound envelope of lower bounds."""

    alphabet: Alphabet

    #: finite Markov order when the kernel has one, else None
    order: int | None = None

    def prob_vector(self, state) -> tuple:
        """Exact next-symbol law given a sufficient state."""
        raise NotImplementedError

    def exact_prob(self, a: int, state) -> float:
        return self.prob_vector(state)[a]

    def lower_bounds(self, v: SuffixTuple) -> tuple:
        """Per-symbol infimum over all infinite completions of suffix v."""
        raise NotImplementedError

    def lower_bound(self, a: int, v: SuffixTuple) -> float:
        return self.lower_bounds(v)[a]

    def upper_bound(self, a: int, v: SuffixTuple) -> float:
        lb = self.lower_bounds(v)
        return 1.0 - sum(lb) + lb[a]

    def state_of(self, past: EventualPast):
        """Sufficient state of a fully described past."""
        raise NotImplementedError

    def prob_given_past(self, a: int, past: EventualPast) -> float:
        return self.exact_prob(a, self.state_of(past))

    def suffix_key(self, v: SuffixTuple) -> Hashable:
        """Cache key under which lower_bounds(v) is constant.

        Families may collapse suffixes sharing a sufficient statistic;
        the default is the suffix itself.
        """
        return v

    def anchored_threshold(self, w: SuffixTuple, k: int) -> float | None:
        """Closed-form anchored threshold at depth k, if the family has one.

        Returning None sends the caller to exhaustive enumeration (only
        possible for finite-order kernels).
        """
        return None

    def threshold_tail_sum(self, w: SuffixTuple, k_from: int) -> float | None:
        """Certified value of sum_{k >= k_from} (1 - threshold_k), if known."""
        return None


# ---------------------------------------------------------------------------
# Finite-order kernels
# ---------------------------------------------------------------------------

_PRECOMPUTE_CAP = 200_000


class MarkovKernel(Kernel):
    """Order-k kernel backed by a dense table, rows indexed by the last k symbols.

    Lower bounds are exact minima over all completions of a short suffix
    to length k, precomputed for every suffix length when the state
    space is small enough.
    """

    def __init__(self, alphabet: Alphabet, order: int, table):
        self.alphabet = alphabet
        self.order = int(order)
        n = alphabet.size
        arr = np.asarray(table, dtype=float).reshape((n,) * self.order + (n,))
        if np.any(arr < 0):
            raise MalformedTableError("negative entry in transition table")
        sums = arr.sum(axis=-1)
        bad = np.argwhere(np.abs(sums - 1.0) > ROW_TOL)
        if bad.size:
            row = tuple(int(x) for x in bad[0])
            raise MalformedTableError(f"row {row} sums to {float(sums[tuple(bad[0])])!r}")
        self.table = arr
        if n ** max(self.order, 1) > _PRECOMPUTE_CAP:
            raise ValueError("state space too large for exhaustive envelopes")
        # mins[j][suffix of length j] = per-symbol min over completions
        self._rows: dict[tuple, tuple] = {}
        self._mins: dict[tuple, tuple] = {}
        for j in range(self.order + 1):
            reduced = arr.min(axis=tuple(range(self.order - j))) if j < self.order else arr
            for key in product(range(n), repeat=j):
                self._mins[key] = tuple(reduced[key].tolist())
        for key in product(range(n), repeat=self.order):
            self._rows[key] = tuple(arr[key].tolist())

    def prob_vector(self, state) -> tuple:
        return self._rows[tuple(state)]

    def lower_bounds(self, v: SuffixTuple) -> tuple:
        j = min(len(v), self.order)
        return self._mins[tuple(v[len(v) - j :])]

    def state_of(self, past: EventualPast) -> tuple:
        return past.window(self.order)

    def suffix_key(self, v: SuffixTuple) -> Hashable:
        j = min(len(v), self.order)
        return v[len(v) - j :]


def make_markov_kernel(alphabet: Alphabet, order: int, table) -> MarkovKernel:
    return MarkovKernel(alphabet, order, table)


def make_constant_kernel(probs: Sequence[float]) -> MarkovKernel:
    """Memoryless kernel drawing every symbol from the same law."""
    alphabet = Alphabet.of_size(len(probs))
    return MarkovKernel(alphabet, 0, list(probs))


def random_markov_kernel(rng: np.random.Generator, n_symbols: int, order: int,
                         min_entry: float = 0.05) -> MarkovKernel:
    """Random table with every entry bounded away from zero."""
    n = n_symbols
    raw = rng.random(size=(n,) * order + (n,))
    probs = min_entry + (1.0 - n * min_entry) * raw / raw.sum(axis=-1, keepdims=True)
    # renormalize exactly; entries stay >= min_entry up to rounding
    probs /= probs.sum(axis=-1, keepdims=True)
    return MarkovKernel(Alphabet.of_size(n), order, probs)


# ---------------------------------------------------------------------------
# Renewal family with a discontinuity on the marker-free branch
# ---------------------------------------------------------------------------


class RenewalKernel(Kernel):
    """Unbounded-memory kernel on {1, 2} driven by the distance to the last "2".

    With the last "2" at distance m and binary digits x read from the
    symbols beyond it, P("2" | past) = r_m + delta_m * x; if no "2" ever
    occurred, P("2" | past) = q.  Knowing k digits past the last "2"
    pins x inside an interval of width 2**-k, which yields the analytic
    envelope: the per-symbol bounds lose exactly delta_m * 2**-k in
    total mass.
    """

    ONE, TWO = 0, 1

    def __init__(self, r: SequenceRule, delta: SequenceRule, q: float):
        self.alphabet = Alphabet.of_size(2)
        self.r = r
        self.delta = delta
        self.q = float(q)
        self._validate()

    def _validate(self):
        if not 0.0 < self.q < 1.0:
            raise ValueError(f"q out of range (0, 1): {self.q}")
        horizon = self.r.settle_horizon() + self.delta.settle_horizon() + 64
        for m in range(horizon + 1):
            rm, dm = self.r.value(m), self.delta.value(m)
            if not rm > 0.0:
                raise ValueError(f"r[{m}] = {rm} not positive")
            if dm < 0.0:
                raise ValueError(f"delta[{m}] = {dm} negative")
            if not rm + dm < 1.0:
                raise ValueError(f"r[{m}] + delta[{m}] = {rm + dm} not below 1")
        if not self.r.inf_from(horizon) > 0.0:
            raise ValueError("r has a vanishing tail")
        if not tail_sum_sup(self.r, self.delta, horizon) < 1.0:
            raise ValueError("r + delta reaches 1 in the tail")

    # -- exact law ---------------------------------------------------------

    FREE = ("free",)  # state of a past that never produced a "2"

    def prob_vector(self, state) -> tuple:
        if state == self.FREE:
            p2 = self.q
        else:
            m, x = state
            p2 = self.r.value(m) + self.delta.value(m) * x
        return (1.0 - p2, p2)

    def state_of(self, past: EventualPast):
        d = past.dist_to_last_occurrence((self.TWO,))
        if d is INF:
            return self.FREE
        d = int(d)
        n = len(past.suffix)
        x = 0.0
        j = 1
        while d + 1 + j <= n:
            if past.suffix[-(d + 1 + j)] == self.TWO:
                x += 2.0**-j
            j += 1
        if past.tail == self.TWO:
            x += 2.0 ** -(j - 1)  # all remaining digits are ones
        return (d, x)

    # -- envelope ----------------------------------------------------------

    def lower_bounds(self, v: SuffixTuple) -> tuple:
        d = dist_to_last_occurrence((self.TWO,), v)
        if d is not INF:
            d = int(d)
            nbits = len(v) - d - 1
            x_lo = 0.0
            for j in range(1, nbits + 1):
                if v[-(d + 1 + j)] == self.TWO:
                    x_lo += 2.0**-j
            rm, dm = self.r.value(d), self.delta.value(d)
            p2_lo = rm + dm * x_lo
            p2_hi = rm + dm * (x_lo + 2.0**-nbits)
            return (1.0 - p2_hi, p2_lo)
        n = len(v)
        p2_lo = min(self.q, self.r.inf_from(n))
        p2_hi = max(self.q, tail_sum_sup(self.r, self.delta, n))
        return (1.0 - p2_hi, p2_lo)

    def suffix_key(self, v: SuffixTuple) -> Hashable:
        d = dist_to_last_occurrence((self.TWO,), v)
        if d is INF:
            horizon = self.r.settle_horizon() + self.delta.settle_horizon() + 64
            return ("no2", min(len(v), horizon))
        d = int(d)
        bits = v[: len(v) - d - 1]
        return (self.r.index_key(d), self.delta.index_key(d), bits)

    # -- closed-form thresholds --------------------------------------------

    def anchored_threshold(self, w: SuffixTuple, k: int) -> float | None:
        if any(a != self.TWO for a in w):
            return None
        # worst case over admissible pasts: the gap since the marker is
        # marker-free, leaving k + |w| - 1 known digits past the last "2"
        return 1.0 - self.delta.sup_from(0) * 2.0 ** -(k + len(w) - 1)

    def threshold_tail_sum(self, w: SuffixTuple, k_from: int) -> float | None:
        if any(a != self.TWO for a in w):
            return None
        return self.delta.sup_from(0) * 2.0 ** -(k_from + len(w) - 2)


def make_renewal_kernel(r, delta, q: float) -> RenewalKernel:
    """Build the renewal family from rules or plain numbers."""
    return RenewalKernel(make_rule(r), make_rule(delta), q)


# ---------------------------------------------------------------------------
# Spontaneous symbols
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpontaneousSet:
    """Symbols with positive worst-case probability, and the marker's slack.

    `epsilon` is the smallest worst-case probability among the marker's
    own symbols; backward construction is refused when it vanishes.
    `conservative_threshold` is the classical, smaller spontaneous region
    |members| * min over members — always inside the exact region.
    """

    members: frozenset
    epsilon: float
    marker_spontaneous: bool
    conservative_threshold: float


def spontaneous_set(kernel: Kernel, w: SuffixTuple) -> SpontaneousSet:
    alphas = kernel.lower_bounds(())
    members = frozenset(a for a in range(kernel.alphabet.size) if alphas[a] > 0.0)
    if len(w) == 0:
        raise ValueError("marker string must be nonempty")
    if not members:
        raise NotSpontaneousError("no symbol has positive worst-case probability")
    epsilon = min(alphas[a] for a in set(w))
    if epsilon <= 0.0:
        bad = [kernel.alphabet.labels[a] for a in set(w) if alphas[a] <= 0.0]
        raise NotSpontaneousError(
            f"marker symbols {bad} have zero worst-case probability")
    conservative = len(members) * min(alphas[a] for a in members)
    return SpontaneousSet(members, epsilon, True, conservative)
