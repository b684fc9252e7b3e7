"""Independent oracles and statistical acceptance checks.

The sampler's promise is exactness, so the tests compare against
independently computed ground truth wherever one exists: stationary
laws of finite-order kernels come from a linear solve on the lifted
state chain, never from the sampler itself; conditional laws are
checked against the kernel's envelope on observed contexts; block
independence is tested on the regeneration split.  Statistical checks
run at fixed significance with seed-majority voting, since an exact
sampler fails them only through bugs or finite-sample noise.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy import stats
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .cftp import RegenerationSplit
from .errors import NotIrreducibleError, TooFewBlocksError
from .kernels import Kernel, MarkovKernel
from .strings import avoids

_ORACLE_CAP = 10**4


# ---------------------------------------------------------------------------
# Exact stationary law of a finite-order kernel
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StationaryOracle:
    """Stationary law of the lifted state chain of a finite-order kernel."""

    kernel: MarkovKernel
    states: tuple
    pi: np.ndarray
    index: dict

    def state_index(self, state) -> int:
        return self.index[tuple(state)]

    def block_distribution(self, length: int) -> dict:
        """Exact law of `length` consecutive symbols under stationarity."""
        kernel = self.kernel
        n = kernel.alphabet.size
        order = kernel.order
        dists = {(): np.asarray(self.pi)}
        for _ in range(length):
            new = {}
            for prefix, vec in dists.items():
                for a in range(n):
                    out = np.zeros_like(vec)
                    for si, s in enumerate(self.states):
                        p = kernel.table[s + (a,)]
                        if p > 0.0 and vec[si] > 0.0:
                            t = self.state_index((s + (a,))[-order:] if order else ())
                            out[t] += vec[si] * p
                    new[prefix + (a,)] = out
            dists = new
        return {prefix: float(vec.sum()) for prefix, vec in dists.items()}


def exact_stationary(kernel: MarkovKernel) -> StationaryOracle:
    """Solve pi = pi P on the lifted chain over states of length `order`."""
    n = kernel.alphabet.size
    order = kernel.order
    if n**order > _ORACLE_CAP:
        raise ValueError("lifted state space too large for the oracle")
    states = tuple(product(range(n), repeat=order))
    N = len(states)
    index = {s: i for i, s in enumerate(states)}
    if N == 1:
        return StationaryOracle(kernel, states, np.array([1.0]), index)
    T = np.zeros((N, N))
    for si, s in enumerate(states):
        row = kernel.table[s]
        for a in range(n):
            T[si, index[(s + (a,))[-order:]]] += row[a]
    ncomp, _ = connected_components(csr_matrix(T > 0), connection="strong")
    if ncomp != 1:
        raise NotIrreducibleError(f"lifted chain splits into {ncomp} classes")
    A = T.T - np.eye(N)
    A[-1, :] = 1.0
    b = np.zeros(N)
    b[-1] = 1.0
    pi = np.linalg.solve(A, b)
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    resid = float(np.max(np.abs(pi @ T - pi)))
    if resid > 1e-10:
        raise AssertionError(f"stationary solve residual {resid}")
    return StationaryOracle(kernel, states, pi, index)


# ---------------------------------------------------------------------------
# Goodness of fit against the oracle
# ---------------------------------------------------------------------------


def block_chi_square(symbols, oracle: StationaryOracle, block: int = 2) -> tuple[float, float]:
    """Chi-square of disjoint length-`block` windows against the exact law.

    Windows are taken disjoint, not sliding, so counts are close to
    multinomial; residual chain dependence between windows is mild for
    mixing kernels and the acceptance protocol absorbs it with majority
    voting.
    """
    dist = oracle.block_distribution(block)
    counts = defaultdict(int)
    total = 0
    for t in range(0, len(symbols) - block + 1, block):
        counts[tuple(symbols[t : t + block])] += 1
        total += 1
    keys = sorted(dist)
    f_exp = np.array([dist[k] * total for k in keys])
    f_obs = np.array([counts.get(k, 0) for k in keys], dtype=float)
    keep = f_exp > 1e-9
    stat, p = stats.chisquare(f_obs[keep], f_exp[keep] * (f_obs[keep].sum() / f_exp[keep].sum()))
    return float(stat), float(p)


def seed_majority(outcomes) -> bool:
    """Majority vote over per-seed boolean outcomes."""
    outcomes = list(outcomes)
    return sum(bool(x) for x in outcomes) * 2 > len(outcomes)


# ---------------------------------------------------------------------------
# Conditional compatibility on observed contexts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CompatibilityCell:
    context: tuple
    symbol: int
    count: int
    total: int
    lower: float
    upper: float
    z: float


@dataclass(frozen=True)
class CompatibilityReport:
    """Observed conditional frequencies against the kernel envelope.

    Every context window of the requested depth in which the marker
    occurs pins the conditional law inside [lower, upper]; an empirical
    frequency is flagged when it leaves that band by more than 4 sigma.
    For windows at least as deep as a finite order the band has zero
    width and the check is an exact conditional test.
    """

    depth: int
    sample_size: int
    cells: tuple
    flagged: tuple

    @property
    def passed(self) -> bool:
        return not self.flagged


def compatibility_test(symbols, kernel: Kernel, w, depth: int,
                       flag_sigma: float = 4.0) -> CompatibilityReport:
    w = tuple(w)
    n = kernel.alphabet.size
    counts = defaultdict(lambda: np.zeros(n, dtype=np.int64))
    seq = tuple(symbols)
    for t in range(depth, len(seq)):
        window = seq[t - depth : t]
        counts[window][seq[t]] += 1
    cells = []
    flagged = []
    for window, vec in counts.items():
        if avoids(w, window):
            continue  # conditional law not pinned by the window alone
        total = int(vec.sum())
        lb = kernel.lower_bounds(window)
        slack = 1.0 - sum(lb)
        for a in range(n):
            lower, upper = lb[a], lb[a] + slack
            p_hat = vec[a] / total
            if p_hat < lower:
                edge = max(lower, 1e-12)
                z = (lower - p_hat) / max((edge * (1 - edge) / total) ** 0.5, 1e-12)
            elif p_hat > upper:
                edge = min(upper, 1 - 1e-12)
                z = (p_hat - upper) / max((edge * (1 - edge) / total) ** 0.5, 1e-12)
            else:
                z = 0.0
            cell = CompatibilityCell(window, a, int(vec[a]), total, lower, upper, float(z))
            cells.append(cell)
            if z > flag_sigma:
                flagged.append(cell)
    return CompatibilityReport(depth, len(seq), tuple(cells), tuple(flagged))


# ---------------------------------------------------------------------------
# Independence of regeneration blocks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlockIndependenceReport:
    n_blocks: int
    mean_length: float
    mean_length_ci: float
    length_p: float | None   # independence of consecutive block lengths
    junction_p: float | None  # independence across block junctions
    halves_p: float | None   # first-half vs second-half length laws

    def passed(self, alpha: float = 0.01) -> bool:
        ps = [p for p in (self.length_p, self.junction_p, self.halves_p) if p is not None]
        return all(p > alpha for p in ps)


def _contingency_p(table: np.ndarray) -> float | None:
    table = table[table.sum(axis=1) > 0][:, table.sum(axis=0) > 0]
    if table.shape[0] < 2 or table.shape[1] < 2:
        return None  # degenerate: no variation to test
    return float(stats.chi2_contingency(table).pvalue)


def block_iid_test(split: RegenerationSplit, min_blocks: int = 200) -> BlockIndependenceReport:
    blocks = split.interior_blocks
    if len(blocks) < min_blocks:
        raise TooFewBlocksError(f"{len(blocks)} interior blocks, need {min_blocks}")
    lengths = np.array([len(b) for b in blocks])
    mean = float(lengths.mean())
    ci = 1.96 * float(lengths.std(ddof=1)) / len(lengths) ** 0.5

    length_p = None
    med = np.median(lengths)
    cls = (lengths > med).astype(int)
    if 0 < cls.sum() < len(cls):
        tab = np.zeros((2, 2))
        for x, y in zip(cls, cls[1:]):
            tab[x, y] += 1
        length_p = _contingency_p(tab)

    n_sym = max(max(b) for b in blocks) + 1
    tab = np.zeros((n_sym, n_sym))
    for b1, b2 in zip(blocks, blocks[1:]):
        tab[b1[-1], b2[0]] += 1
    junction_p = _contingency_p(tab)

    half = len(lengths) // 2
    edges = np.unique(np.quantile(lengths, [0.25, 0.5, 0.75]))
    binned = np.digitize(lengths, edges)
    tab = np.zeros((2, int(binned.max()) + 1))
    for i, c in enumerate(binned):
        tab[0 if i < half else 1, c] += 1
    halves_p = _contingency_p(tab)

    return BlockIndependenceReport(len(blocks), mean, ci, length_p, junction_p, halves_p)


def stride_split(symbols, stride: int) -> RegenerationSplit:
    """Non-regenerative fixed-stride cuts; a control for block_iid_test.

    Cutting a dependent chain at a fixed stride yields blocks whose
    junctions are adjacent symbols of the chain, so the junction test
    must reject — this is the 'test of the test'.
    """
    seq = tuple(symbols)
    times = tuple(range(0, len(seq) - stride, stride))
    blocks = tuple(seq[t : t + stride] for t in times)
    return RegenerationSplit(times, blocks, seq[times[-1] + stride :])
