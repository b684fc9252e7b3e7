"""Independent oracles used across the test modules.

These deliberately avoid the production code paths they check: the
regeneration oracle replays the definition (try every start, construct
in order), and the occurrence scanner is the naive quadratic loop.
"""

from exactchain.strings import INF
from exactchain.update import STAR, update


def naive_occurrences(pattern, s):
    pattern = tuple(pattern)
    s = tuple(s)
    hits = []
    for k in range(len(s) - len(pattern) + 1):
        if s[k:k + len(pattern)] == pattern:
            hits.append(k)
    return hits


def naive_dist_to_last(pattern, past):
    """Distance to the most recent occurrence, by scanning all of them."""
    hits = naive_occurrences(pattern, tuple(past))
    if not hits:
        return INF
    return len(past) - (max(hits) + len(pattern))


def theta_by_definition(ctx, stream, m, n, floor):
    """Regeneration time straight from its definition.

    For k = m, m-1, ... try to build [k, n] in order from the uniforms
    alone; the first k that completes is the regeneration time.  Returns
    (k, symbols).  Fails the test if nothing works above `floor`.
    """
    for k in range(m, floor - 1, -1):
        syms = []
        ok = True
        for i in range(k, n + 1):
            sym = update(ctx, stream.u(i), tuple(syms))
            if sym is STAR:
                ok = False
                break
            syms.append(sym)
        if ok:
            return k, tuple(syms)
    raise AssertionError(f"no construction start found above {floor}")
