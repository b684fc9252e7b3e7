import numpy as np
import pytest
from scipy import stats

from exactchain.streams import PinnedStream, UniformStream


def test_pure_function_of_seed_and_index():
    s1 = UniformStream(123)
    s2 = UniformStream(123)
    for i in (-1000, -1, 0, 1, 57, 10**12, -(10**12)):
        assert s1.u(i) == s2.u(i)
        assert s1.u(i) == s1.u(i)
    assert UniformStream(124).u(0) != s1.u(0)


def test_values_in_unit_interval():
    s = UniformStream(9)
    vals = [s.u(i) for i in range(-500, 500)]
    assert all(0.0 <= v < 1.0 for v in vals)


def test_block_matches_scalar():
    s = UniformStream(31337)
    blk = s.block(-20, 20)
    assert blk.shape == (41,)
    for off, i in enumerate(range(-20, 21)):
        assert blk[off] == s.u(i)


def test_substreams_reproducible_and_distinct():
    s = UniformStream(5)
    a = s.substream(3)
    b = UniformStream(5).substream(3)
    assert [a.u(i) for i in range(5)] == [b.u(i) for i in range(5)]
    c = s.substream(4)
    assert [a.u(i) for i in range(10)] != [c.u(i) for i in range(10)]


def test_uniformity_chi_square():
    s = UniformStream(2718281828)
    vals = s.block(0, 99_999)
    counts, _ = np.histogram(vals, bins=50, range=(0.0, 1.0))
    _, p = stats.chisquare(counts)
    assert p > 1e-4


def test_lag_pairs_uncorrelated():
    s = UniformStream(160)
    vals = s.block(-50_000, 49_999)
    for lag in (1, 2, 7):
        r = np.corrcoef(vals[:-lag], vals[lag:])[0, 1]
        assert abs(r) < 0.02


def test_pinned_stream_overrides_and_falls_through():
    base = UniformStream(0)
    p = PinnedStream({0: 0.25, -3: 0.75}, base)
    assert p.u(0) == 0.25
    assert p.u(-3) == 0.75
    assert p.u(5) == base.u(5)
    assert list(p.block(-1, 1)) == [p.u(-1), p.u(0), p.u(1)]
    with pytest.raises(ValueError):
        PinnedStream({0: 1.0})
