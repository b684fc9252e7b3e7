"""Context-tree mixture decomposition of an envelope kernel.

Given a kernel and a marker string w made of spontaneous symbols, the
next-symbol law can be written as a convex mixture: with probability
``lambda_-1`` draw from a fixed base law, and with probability
``lambda_k`` consult a context of length ``m + |w| + k`` where m is the
distance to the most recent occurrence of w.  The weights come from the
anchored threshold sequence

    alpha_k = worst case, over every past whose k symbols beyond the
              last w are also known, of the total envelope mass,

which is nondecreasing in k; lambda_k is its increment.  Two half-open
partitions of [0, 1) make the mixture operational: per past, the glued
per-symbol intervals (base intervals of length alpha(a), then one layer
per extra known symbol); and globally, the cells [alpha_{k-1}, alpha_k)
that select the mixture depth.  All interval arithmetic is plain double
precision with half-open membership; comparisons elsewhere use a 1e-12
tolerance.

Everything here is exact bookkeeping on top of ``Kernel.lower_bounds``;
whether the mixture converges (alpha_k -> 1) is a property of the
kernel/marker pair and is reported, not assumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

from .errors import DepthExceededError
from .kernels import Kernel, spontaneous_set
from .strings import (INF, EventualPast, SuffixTuple, avoids,
                      dist_to_last_occurrence, gap_strings)

#: comparison tolerance for interval/threshold assertions
TOL = 1e-12

#: largest exhaustive enumeration allowed for uniform-memory scans
ENUM_CAP = 1 << 21

DEFAULT_K_MAX = 64


def envelope_mass(kernel: Kernel, v: SuffixTuple) -> float:
    """Total envelope mass of a suffix: sum of per-symbol lower bounds.

    Always accumulated with builtin sum over the bounds tuple; threshold
    scans and interval gluing must share this accumulation so that float
    orderings between thresholds and glued layouts stay consistent.
    """
    return sum(kernel.lower_bounds(v))


# ---------------------------------------------------------------------------
# Anchored thresholds (the second partition)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThresholdSequence:
    """alpha_k for k = -1, 0, 1, ... with saturation and tail accounting.

    ``values[0]`` is alpha_{-1} (the spontaneous mass); by convention
    alpha_{-2} = 0.  ``saturated_at`` is the first k whose value reached
    exactly 1.0 (every later value is 1), or None within k_max.
    ``tail_sum`` is a certified value of sum_{k > k_max} (1 - alpha_k)
    when the family provides one (0 when saturated), else None.
    """

    w: SuffixTuple
    values: tuple
    k_max: int
    saturated_at: int | None
    tail_sum: float | None

    def alpha(self, k: int) -> float:
        if k < -2:
            raise ValueError("threshold index starts at -2")
        if k == -2:
            return 0.0
        if self.saturated_at is not None and k >= self.saturated_at:
            return 1.0
        if k > self.k_max:
            raise ValueError(f"threshold depth {k} beyond k_max={self.k_max}")
        return self.values[k + 1]

    def weight(self, k: int) -> float:
        """Mixture weight lambda_k = alpha_k - alpha_{k-1} (k >= -1)."""
        return self.alpha(k) - self.alpha(k - 1)

    @property
    def resolved_depth(self) -> int:
        """Largest k with alpha(k) stored (or saturation reached)."""
        return self.k_max if self.saturated_at is None else max(self.saturated_at, 0)

    def unresolved_mass(self) -> float:
        """Mass beyond the deepest resolved threshold: 1 - alpha(k_max)."""
        return 1.0 - self.alpha(self.k_max)

    def summable(self) -> bool:
        """Whether sum_k (1 - alpha_k) is certified finite."""
        return self.saturated_at is not None or self.tail_sum is not None


def _enumerated_threshold(kernel: Kernel, w: SuffixTuple, k: int) -> float:
    """Exhaustive anchored threshold for a finite-order kernel.

    Conditioning windows are gap + marker + k extra symbols; once the
    window length reaches the kernel order the law is pinned and the
    envelope mass is 1, so gaps are only scanned while the window is
    shorter than the order.
    """
    order = kernel.order
    n = kernel.alphabet.size
    best = 1.0
    i = 0
    while i + len(w) + k < order:
        for b in gap_strings(n, w, i):
            for c in product(range(n), repeat=k):
                mass = envelope_mass(kernel, tuple(c) + tuple(w) + b)
                if mass < best:
                    best = mass
        i += 1
    return best


def build_thresholds(kernel: Kernel, w: SuffixTuple, k_max: int = DEFAULT_K_MAX) -> ThresholdSequence:
    """Compute alpha_{-1..k_max}, stopping early at exact saturation."""
    spontaneous_set(kernel, w)  # refuse markers that cannot regenerate
    values = [envelope_mass(kernel, ())]
    saturated_at = None
    for k in range(k_max + 1):
        a = kernel.anchored_threshold(w, k)
        if a is None:
            if kernel.order is None:
                raise DepthExceededError(
                    "kernel has neither a closed-form threshold nor a finite order")
            a = _enumerated_threshold(kernel, w, k)
        values.append(a)
        if a == 1.0:
            saturated_at = k
            break
    if saturated_at is not None:
        tail = 0.0
    else:
        tail = kernel.threshold_tail_sum(w, k_max + 1)
    seq = ThresholdSequence(tuple(w), tuple(values), k_max, saturated_at, tail)
    for k in range(0, seq.resolved_depth + 1):
        if seq.weight(k) < -TOL:
            raise AssertionError(f"threshold sequence decreases at k={k}")
    return seq


# ---------------------------------------------------------------------------
# Uniform-memory diagnostics (thresholds without an anchor, oscillation)
# ---------------------------------------------------------------------------


def _check_enum(n: int, k: int):
    if n**k > ENUM_CAP:
        raise DepthExceededError(f"{n}**{k} suffixes exceed the enumeration cap")


def uniform_threshold(kernel: Kernel, k: int) -> float:
    """Worst-case envelope mass when exactly the last k symbols are known."""
    n = kernel.alphabet.size
    _check_enum(n, k)
    return min(envelope_mass(kernel, v) for v in product(range(n), repeat=k))


def uniform_threshold_containing(kernel: Kernel, w: SuffixTuple, k: int) -> float:
    """Same inf restricted to suffixes in which the marker occurs.

    For k < |w| no suffix qualifies; the inf over an empty family is
    reported as 1.0 (no constraint).
    """
    n = kernel.alphabet.size
    _check_enum(n, k)
    vals = [envelope_mass(kernel, v)
            for v in product(range(n), repeat=k) if not avoids(w, v)]
    return min(vals) if vals else 1.0


def uniform_threshold_avoiding(kernel: Kernel, w: SuffixTuple, k: int) -> float:
    """Same inf restricted to marker-free suffixes (the discontinuity branch)."""
    n = kernel.alphabet.size
    _check_enum(n, k)
    vals = [envelope_mass(kernel, v)
            for v in product(range(n), repeat=k) if avoids(w, v)]
    return min(vals) if vals else 1.0


def envelope_oscillation(kernel: Kernel, k: int) -> float:
    """Upper estimate of the continuity modulus at depth k.

    For each length-k suffix the envelope pins every symbol probability
    inside [lower, upper]; the largest such width bounds the worst-case
    oscillation of the kernel over pasts sharing k recent symbols.
    Exact (zero) beyond the order of a finite-order kernel.
    """
    n = kernel.alphabet.size
    _check_enum(n, k)
    worst = 0.0
    for v in product(range(n), repeat=k):
        lb = kernel.lower_bounds(v)
        slack = 1.0 - sum(lb)  # upper(a) - lower(a) is the same for all a
        if slack > worst:
            worst = slack
    return worst


# ---------------------------------------------------------------------------
# The mixture itself
# ---------------------------------------------------------------------------


@dataclass
class MixtureDecomposition:
    """Weights, base law and per-depth context laws of the mixture.

    The depth-k law conditions on the suffix of length m + |w| + k; its
    value is the normalized overlap between the glued per-symbol
    intervals of that suffix and the depth cell [alpha_{k-1}, alpha_k).
    """

    kernel: Kernel
    w: SuffixTuple
    thresholds: ThresholdSequence
    _lb_cache: dict = field(default_factory=dict, repr=False)

    @property
    def base_weight(self) -> float:
        return self.thresholds.alpha(-1)

    @property
    def base_law(self) -> tuple:
        alphas = self.kernel.lower_bounds(())
        a_m1 = self.base_weight
        return tuple(x / a_m1 for x in alphas)

    def weight(self, k: int) -> float:
        return self.thresholds.weight(k)

    def context_length(self, past_or_suffix, k: int) -> int | float:
        """Length of the depth-k context for this past (INF if unanchored)."""
        if isinstance(past_or_suffix, EventualPast):
            m = past_or_suffix.dist_to_last_occurrence(self.w)
        else:
            m = dist_to_last_occurrence(self.w, past_or_suffix)
        return INF if m is INF else int(m) + len(self.w) + k

    def _lb(self, v: SuffixTuple) -> tuple:
        key = self.kernel.suffix_key(v)
        got = self._lb_cache.get(key)
        if got is None:
            got = self.kernel.lower_bounds(v)
            self._lb_cache[key] = got
        return got

    def depth_law(self, k: int, window: SuffixTuple) -> tuple:
        """Conditional law at depth k given its full context window.

        `window` must have length m + |w| + k for the past it describes.
        Requires weight(k) > 0.
        """
        lam = self.weight(k)
        if lam <= 0.0:
            raise ValueError(f"depth {k} has zero mixture weight")
        lo = self.thresholds.alpha(k - 1)
        hi = self.thresholds.alpha(k)
        n = self.kernel.alphabet.size
        base = len(window) - k  # length m + |w|
        out = [0.0] * n
        left = 0.0
        prev = (0.0,) * n
        for level in range(-1, k + 1):
            cur = self.kernel.lower_bounds(()) if level < 0 else self._lb(window[len(window) - (base + level):])
            for a in range(n):
                width = cur[a] - prev[a]
                if width > 0.0:
                    right = left + width
                    ov = min(right, hi) - max(left, lo)
                    if ov > 0.0:
                        out[a] += ov
                    left = right
            prev = cur
        return tuple(x / lam for x in out)

    def mixture_vector(self, past: EventualPast) -> tuple[tuple, float]:
        """Evaluate the mixture law at a fully described past.

        Returns (per-symbol mass resolved up to the deepest threshold,
        unresolved tail mass).  The exact law lies within tail of the
        resolved vector, component-wise.
        """
        th = self.thresholds
        n = self.kernel.alphabet.size
        base_w = self.base_weight
        base = self.base_law
        out = [base_w * base[a] for a in range(n)]
        m = past.dist_to_last_occurrence(self.w)
        k_top = th.resolved_depth
        if m is INF:
            # every depth falls on the marker-free branch, whose law is
            # defined through the kernel itself
            denom = 1.0 - base_w
            weight_sum = th.alpha(k_top) - th.alpha(-1)
            if weight_sum > 0.0 and denom > 0.0:
                exact = self.kernel.prob_vector(self.kernel.state_of(past))
                for a in range(n):
                    out[a] += weight_sum * (exact[a] - base_w * base[a]) / denom
            return tuple(out), 1.0 - th.alpha(k_top)
        m = int(m)
        p = len(self.w)
        for k in range(0, k_top + 1):
            lam = th.weight(k)
            if lam <= 0.0:
                continue
            law = self.depth_law(k, past.window(m + p + k))
            for a in range(n):
                out[a] += lam * law[a]
        return tuple(out), 1.0 - th.alpha(k_top)

    def mixture_prob(self, a: int, past: EventualPast) -> tuple[float, float]:
        """Mixture mass for one symbol, with the unresolved tail width."""
        vec, tail = self.mixture_vector(past)
        return vec[a], tail


def build_mixture(kernel: Kernel, w: SuffixTuple, k_max: int = DEFAULT_K_MAX) -> MixtureDecomposition:
    return MixtureDecomposition(kernel, tuple(w), build_thresholds(kernel, w, k_max))


# ---------------------------------------------------------------------------
# Threshold comparison report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThresholdComparison:
    """Side-by-side view of uniform vs anchored thresholds.

    Exhibits why anchoring matters: the uniform sequence can stall below
    1 (a genuine discontinuity on the marker-free branch) while the
    anchored sequence still converges to 1.
    """

    w: SuffixTuple
    rows: tuple  # (k, uniform, containing, avoiding, anchored)
    violations: tuple

    @property
    def passed(self) -> bool:
        return not self.violations


def compare_thresholds(kernel: Kernel, w: SuffixTuple, k_top: int,
                       k_max: int = DEFAULT_K_MAX) -> ThresholdComparison:
    """Tabulate the threshold sequences for k = 0..k_top and check order.

    Checks, with tolerance, that the uniform threshold never exceeds its
    marker-containing restriction, and that each sequence is
    nondecreasing in k.
    """
    if k_top > k_max:
        raise ValueError("k_top beyond the threshold truncation depth")
    th = build_thresholds(kernel, w, k_max)
    rows = []
    for k in range(0, k_top + 1):
        uni = uniform_threshold(kernel, k)
        cont = uniform_threshold_containing(kernel, w, k)
        avoid = uniform_threshold_avoiding(kernel, w, k)
        rows.append((k, uni, cont, avoid, th.alpha(k)))
    violations = []
    for k, uni, cont, avoid, anch in rows:
        if uni > cont + TOL:
            violations.append(f"k={k}: uniform threshold {uni} above containing {cont}")
    for name, idx in (("uniform", 1), ("containing", 2), ("anchored", 4)):
        for prev, cur in zip(rows, rows[1:]):
            if cur[idx] < prev[idx] - TOL:
                violations.append(
                    f"{name} threshold decreases between k={prev[0]} and k={cur[0]}")
    return ThresholdComparison(tuple(w), tuple(rows), tuple(violations))


def decomposition_table(kernel: Kernel, w: SuffixTuple, k_top: int,
                        k_max: int = DEFAULT_K_MAX) -> list:
    """Rows (k, uniform_threshold, anchored_threshold, weight, oscillation).

    The k = -1 row carries the spontaneous mass and its weight; the
    uniform/oscillation columns are blank there.
    """
    if k_top > k_max:
        raise ValueError("k_top beyond the threshold truncation depth")
    th = build_thresholds(kernel, w, k_max)
    rows = [(-1, None, th.alpha(-1), th.weight(-1), None)]
    for k in range(0, k_top + 1):
        rows.append((k, uniform_threshold(kernel, k), th.alpha(k), th.weight(k),
                     envelope_oscillation(kernel, k)))
    return rows
