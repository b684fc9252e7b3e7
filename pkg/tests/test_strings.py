import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exactchain.strings import (INF, Alphabet, EventualPast, avoids,
                                count_occurrences, dist_to_last_occurrence,
                                gap_strings, is_single_occurrence_gap)

from .helpers import naive_dist_to_last, naive_occurrences

sym = st.integers(min_value=0, max_value=2)
short = st.lists(sym, min_size=0, max_size=12).map(tuple)
pattern = st.lists(sym, min_size=1, max_size=3).map(tuple)


def test_alphabet_basics():
    a = Alphabet.of_size(2)
    assert a.labels == ("1", "2")
    assert a.index("2") == 1
    assert a.string(["2", "1"]) == (1, 0)
    assert a.format((1, 0)) == "21"
    with pytest.raises(ValueError):
        Alphabet(("x",))
    with pytest.raises(ValueError):
        Alphabet(("a", "a"))
    with pytest.raises(ValueError):
        a.index("3")


def test_dist_examples():
    a = Alphabet.of_size(2)
    two = a.string(["2"])
    assert dist_to_last_occurrence(two, a.string(["2"])) == 0
    assert dist_to_last_occurrence(two, a.string(["2", "1", "1"])) == 2
    assert dist_to_last_occurrence(a.string(["1", "2"]), a.string(["1", "2", "1"])) == 1
    assert dist_to_last_occurrence(two, a.string(["1", "1", "1"])) is INF
    assert dist_to_last_occurrence(two, ()) is INF


def test_gap_membership_examples():
    a = Alphabet.of_size(2)
    two = a.string(["2"])
    assert is_single_occurrence_gap(two, a.string(["1", "1"]))
    assert not is_single_occurrence_gap(two, a.string(["1", "2"]))
    # expected value frozen from the exhaustive occurrence scan
    w, v = a.string(["1", "2"]), a.string(["2", "1"])
    assert len(naive_occurrences(w, w + v)) == 1
    assert is_single_occurrence_gap(w, v)


def test_avoids_examples():
    a = Alphabet.of_size(2)
    assert avoids(a.string(["2"]), a.string(["1", "1", "1"]))
    assert not avoids(a.string(["2"]), a.string(["1", "2", "1"]))
    assert avoids(a.string(["1", "2"]), a.string(["2", "2", "1"]))


def test_gap_strings_enumeration():
    two = (1,)
    assert list(gap_strings(2, two, 0)) == [()]
    # gaps for a single-symbol marker are exactly the marker-free strings
    for L in range(0, 6):
        gaps = set(gap_strings(2, two, L))
        assert gaps == {g for g in gaps if avoids(two, g)}
        assert len(gaps) == 1  # only the all-"1" string stays marker-free


@given(pattern, short)
def test_dist_matches_naive(w, v):
    assert dist_to_last_occurrence(w, v) == naive_dist_to_last(w, v)


@given(pattern, short)
def test_avoiding_implies_no_occurrence_distance(w, v):
    if avoids(w, v):
        assert dist_to_last_occurrence(w, v) is INF


@given(pattern, short, short)
@settings(max_examples=200)
def test_left_extension_monotone(w, v, ext):
    """Extending the past leftward never moves an already-found occurrence."""
    d = dist_to_last_occurrence(w, v)
    d2 = dist_to_last_occurrence(w, ext + v)
    if d is not INF:
        assert d2 == d
    else:
        assert d2 is INF or d2 >= len(v) - len(w) + 1


@given(pattern, short)
def test_finite_distance_pins_window(w, v):
    d = dist_to_last_occurrence(w, v)
    if d is not INF:
        k = int(d)
        window = v[len(v) - k - len(w): len(v) - k]
        assert window == tuple(w)
        # nothing more recent
        assert all(naive_dist_to_last(w, v) == k for _ in [0])


def test_eventual_past_window_and_symbols():
    p = EventualPast((1, 0), tail=1)  # ...,2,2,2,2,1 with suffix "2 1"
    assert p.symbol_at(1) == 0
    assert p.symbol_at(2) == 1
    assert p.symbol_at(7) == 1
    assert p.window(4) == (1, 1, 1, 0)
    with pytest.raises(ValueError):
        p.symbol_at(0)


def test_eventual_past_occurrences_reach_the_tail():
    # marker only occurs inside the constant tail
    p = EventualPast((0, 0), tail=1)
    assert p.dist_to_last_occurrence((1,)) == 2
    assert p.dist_to_last_occurrence((1, 1)) == 2
    assert p.dist_to_last_occurrence((0, 1)) == 1  # straddles tail and suffix
    q = EventualPast((), tail=0)
    assert q.dist_to_last_occurrence((1,)) is INF


@given(pattern, short, st.integers(min_value=0, max_value=1), st.integers(min_value=0, max_value=20))
@settings(max_examples=200)
def test_eventual_past_dist_matches_materialized(w, suffix, tail, extra):
    """The lazy scan agrees with materializing a long window."""
    p = EventualPast(suffix, tail)
    lazy = p.dist_to_last_occurrence(w)
    deep = naive_dist_to_last(w, p.window(len(suffix) + len(w) + extra))
    if lazy is INF:
        assert deep is INF
    else:
        assert deep == lazy
