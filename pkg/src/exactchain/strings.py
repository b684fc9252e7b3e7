"""Symbols, past strings and occurrence scans.

Conventions used package-wide:

* Symbols are dense integer indices ``0 .. |A|-1``; human-readable labels
  live in the :class:`Alphabet` only.  Inner loops compare ints.
* A finite past string is a plain tuple in time order, oldest first, so
  ``v[-1]`` is the most recent symbol and ``v[-k]`` the symbol k steps
  back.  The empty tuple is the empty past.
* A conditioning written "b then w then c then tail" places b in the
  most recent ``len(b)`` slots, w behind it, c behind w; as a tuple that
  is simply ``c + w + b``.

Distances count symbols strictly between a position and the present:
the most recent occurrence of a pattern `w` in `v` is at distance k when
``v[-k-|w| : -k or None] == w``, i.e. k = 0 means `v` ends with `w`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Sequence

INF = math.inf

SuffixTuple = tuple  # tuple of symbol indices, oldest first

MAX_ALPHABET = 64


@dataclass(frozen=True)
class Alphabet:
    """Finite symbol set with label table; indices are 0..size-1."""

    labels: tuple

    def __post_init__(self):
        if len(self.labels) < 2:
            raise ValueError("alphabet needs at least two symbols")
        if len(self.labels) > MAX_ALPHABET:
            raise ValueError(f"alphabet larger than {MAX_ALPHABET} symbols")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate labels in alphabet")

    @classmethod
    def of_size(cls, n: int) -> "Alphabet":
        """Alphabet {1, 2, ..., n} with the customary numeric labels."""
        return cls(tuple(str(i + 1) for i in range(n)))

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise ValueError(f"unknown symbol label {label!r}") from None

    def string(self, labels) -> SuffixTuple:
        """Parse a sequence of labels (oldest first) into a symbol tuple."""
        return tuple(self.index(x) for x in labels)

    def format(self, symbols: Sequence[int]) -> str:
        return "".join(self.labels[a] for a in symbols)


def dist_to_last_occurrence(pattern: Sequence[int], past) -> int | float:
    """Distance to the most recent occurrence of `pattern` in `past`.

    Returns the smallest k >= 0 such that the pattern occupies positions
    -k-|pattern| .. -k-1 of `past`, or INF when no occurrence fits.
    `past` may be any object with len() and negative integer indexing.
    """
    p = len(pattern)
    n = len(past)
    if p == 0:
        raise ValueError("empty pattern")
    for k in range(n - p + 1):
        hit = True
        for i in range(p):
            if past[-(k + i + 1)] != pattern[-(i + 1)]:
                hit = False
                break
        if hit:
            return k
    return INF


def count_occurrences(pattern: Sequence[int], s: Sequence[int]) -> int:
    """Number of (possibly overlapping) occurrences of `pattern` in `s`."""
    p, n = len(pattern), len(s)
    if p == 0:
        raise ValueError("empty pattern")
    pattern = tuple(pattern)
    s = tuple(s)
    return sum(1 for k in range(n - p + 1) if s[k : k + p] == pattern)


def avoids(pattern: Sequence[int], s: Sequence[int]) -> bool:
    """True iff `pattern` is not a substring of `s`."""
    return count_occurrences(pattern, s) == 0


def is_single_occurrence_gap(pattern: Sequence[int], gap: Sequence[int]) -> bool:
    """True iff appending `gap` after `pattern` creates no new occurrence.

    These are exactly the admissible "since the marker" strings: pasts
    whose most recent occurrence of the pattern sits right behind a gap
    of this content.  Equivalent to the concatenation pattern+gap
    containing the pattern exactly once.
    """
    return count_occurrences(pattern, tuple(pattern) + tuple(gap)) == 1


def gap_strings(n_symbols: int, pattern: Sequence[int], length: int) -> Iterator[SuffixTuple]:
    """All strings g of the given length with is_single_occurrence_gap(pattern, g)."""
    for g in product(range(n_symbols), repeat=length):
        if is_single_occurrence_gap(pattern, g):
            yield g


def avoiding_strings(n_symbols: int, pattern: Sequence[int], length: int) -> Iterator[SuffixTuple]:
    """All strings of the given length in which `pattern` does not occur."""
    for s in product(range(n_symbols), repeat=length):
        if avoids(pattern, s):
            yield s


@dataclass(frozen=True)
class EventualPast:
    """An infinite past: a finite suffix extended by a constant tail.

    `suffix` holds the most recent symbols (oldest first) and every
    deeper position is `tail`.  This is the finite description used
    wherever an operation needs a complete past (exact laws, mixture
    reconstruction) while staying computable.
    """

    suffix: SuffixTuple
    tail: int

    def symbol_at(self, depth: int) -> int:
        """Symbol `depth` steps back (depth >= 1)."""
        if depth < 1:
            raise ValueError("depth must be >= 1")
        if depth <= len(self.suffix):
            return self.suffix[-depth]
        return self.tail

    def window(self, length: int) -> SuffixTuple:
        """The most recent `length` symbols as a tuple (oldest first)."""
        n = len(self.suffix)
        if length <= n:
            return self.suffix[n - length :]
        return (self.tail,) * (length - n) + self.suffix

    def dist_to_last_occurrence(self, pattern: Sequence[int]) -> int | float:
        """Distance to the most recent occurrence over the whole past."""
        p = len(pattern)
        # any occurrence reaching deeper than the suffix lies inside the
        # constant tail or straddles it; the window of length |suffix|+p
        # covers every candidate start, and beyond it nothing changes
        probe = self.window(len(self.suffix) + p)
        return dist_to_last_occurrence(pattern, probe)
