"""Sequential random-graph generators.

Two families of samplers live here:

* independent-edge sampling of G(n, W), both directly and via the
  Poissonized sequential procedure (seq_approx_p);
* degree-sequence sampling of G(n, d) by sequential edge insertion
  (seq_sample_d), either with exact conditional probabilities from the
  enumeration oracle or with the asymptotic closed-form weights.

The insertion kernels are shared with the coupling engine.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .graphs import (
    DegenerateSequenceError,
    DegreeSequence,
    Edge,
    NonGraphicalError,
    SimpleGraph,
    SymmetricProbMatrix,
    is_graphical,
    tri_index,
    tri_pairs,
    tri_size,
)
from .oracle import enumerate_graphs, graph_of_mask
from .randomness import AliasTable, RandomSource, sample_poisson

__all__ = [
    "SeqSampleMode",
    "SamplerDiagnostics",
    "sample_poisson",
    "sample_weighted_edge",
    "sample_gnw",
    "seq_approx_p",
    "seq_sample_d",
]


class SeqSampleMode(Enum):
    EXACT_ORACLE = "exact"
    ASYMPTOTIC = "asymptotic"


@dataclass
class SamplerDiagnostics:
    """Counters a caller may pass in to observe sampler internals."""

    restarts: int = 0


def _require_two_positive(d: DegreeSequence) -> None:
    if sum(1 for x in d.degrees if x > 0) < 2:
        raise DegenerateSequenceError("need at least two positive degrees")


def sample_weighted_edge(
    d: DegreeSequence | Sequence[int],
    rng: RandomSource,
    table: AliasTable | None = None,
) -> Edge:
    """Unordered pair {j,k} drawn with probability proportional to d_j d_k.

    Two endpoints are drawn independently proportional to degree and equal
    pairs are rejected; the induced law on unordered pairs is exactly the
    normalized product-weight distribution.
    """
    d = DegreeSequence.of(d)
    _require_two_positive(d)
    if table is None:
        table = AliasTable(d.degrees)
    while True:
        j = table.sample(rng)
        k = table.sample(rng)
        if j != k:
            return (j, k) if j < k else (k, j)


def sample_gnw(w: SymmetricProbMatrix, rng: RandomSource) -> SimpleGraph:
    """Include each pair (j,k) independently with probability W_{jk}."""
    u = rng.uniforms(tri_size(w.n))
    hits = np.nonzero(u < w.tri)[0]
    pairs = tri_pairs(w.n)
    return SimpleGraph(w.n, frozenset(pairs[i] for i in hits.tolist()))


def seq_approx_p(
    d: DegreeSequence | Sequence[int],
    lam: float,
    big_lambda: SymmetricProbMatrix,
    rng: RandomSource,
) -> SimpleGraph:
    """Poissonized sequential sampler.

    Draws a Poisson(lam) number of candidate pairs, each proportional to
    d_j d_k, and keeps pair jk with probability Lambda_jk.  The output is an
    independent-edge graph whose marginal for jk equals
    1 - exp(-lam * Lambda_jk * Q_jk).
    """
    d = DegreeSequence.of(d)
    if lam < 0:
        raise ValueError("lam must be >= 0")
    if big_lambda.n != d.n:
        raise ValueError("Lambda dimension does not match degree sequence")
    _require_two_positive(d)
    steps = sample_poisson(lam, rng)
    table = AliasTable(d.degrees)
    n = d.n
    ltri = big_lambda.tri
    edges: set[Edge] = set()
    for _ in range(steps):
        while True:
            j = table.sample(rng)
            k = table.sample(rng)
            if j != k:
                break
        if j > k:
            j, k = k, j
        if rng.uniform() < ltri[j * n - j * (j + 1) // 2 + (k - j - 1)]:
            edges.add((j, k))
    return SimpleGraph(n, frozenset(edges))


# ---------------------------------------------------------------------------
# Insertion kernels (shared with the coupling engine)
# ---------------------------------------------------------------------------


class StubList:
    """Multiset of vertex stubs: O(1) draw proportional to t, O(deg) removal."""

    __slots__ = ("stubs", "slots")

    def __init__(self, t: Sequence[int]):
        self.stubs: list[int] = []
        self.slots: list[list[int]] = [[] for _ in range(len(t))]
        for h, th in enumerate(t):
            for _ in range(th):
                self.slots[h].append(len(self.stubs))
                self.stubs.append(h)

    def __len__(self) -> int:
        return len(self.stubs)

    def draw(self, rng: RandomSource) -> int:
        return self.stubs[int(rng.uniform() * len(self.stubs))]

    def remove_one(self, h: int) -> None:
        idx = self.slots[h].pop()
        last = len(self.stubs) - 1
        g = self.stubs[last]
        if idx != last:
            self.stubs[idx] = g
            sl = self.slots[g]
            sl.remove(last)
            sl.append(idx)
        self.stubs.pop()


class AsymptoticKernel:
    """Sequential insertion with closed-form remaining-degree weights.

    Each step samples a non-edge jk (t_j, t_k >= 1) with probability
    proportional to t_j t_k / (||t||_1 + t_j t_k): proposals come from the
    stub list (product-weight law) and are thinned with the acceptance
    (||t||_1 + 1) / (||t||_1 + t_j t_k), which is a constant-numerator
    renormalization of the target-to-proposal ratio, so proportionality is
    exact.  Acceptance stays above 1/2 whenever t_j t_k <= ||t||_1.
    """

    __slots__ = ("d", "t", "tsum", "edges", "stubs", "dmax")

    def __init__(self, d: Sequence[int], edges: set[Edge], t: list[int]):
        self.d = d
        self.t = t
        self.tsum = sum(t)
        self.edges = edges
        self.stubs = StubList(t)
        self.dmax = max(d)

    def eligible_pair_exists(self) -> bool:
        pos = [h for h, v in enumerate(self.t) if v > 0]
        if len(pos) < 2:
            return False
        # any vertex with t_h >= 1 has at most d_h - 1 < dmax neighbours,
        # so a large positive set always contains a non-adjacent pair
        if len(pos) > self.dmax:
            return True
        for a in range(len(pos)):
            for b in range(a + 1, len(pos)):
                e = (pos[a], pos[b])
                if e not in self.edges:
                    return True
        return False

    def insert_step(self, rng: RandomSource, attempt_cap: int = 512) -> Edge | None:
        """One accepted insertion, or None when no eligible pair remains."""
        if self.tsum < 2:
            return None
        attempts = 0
        while True:
            attempts += 1
            if attempts > attempt_cap:
                if not self.eligible_pair_exists():
                    return None
                attempts = 0
            j = self.stubs.draw(rng)
            k = self.stubs.draw(rng)
            if j == k:
                continue
            e = (j, k) if j < k else (k, j)
            if e in self.edges:
                continue
            prod = self.t[j] * self.t[k]
            if rng.uniform() * (self.tsum + prod) < self.tsum + 1:
                self.edges.add(e)
                self.t[j] -= 1
                self.t[k] -= 1
                self.tsum -= 2
                self.stubs.remove_one(j)
                self.stubs.remove_one(k)
                return e


class OracleKernel:
    """Sequential insertion with exact conditional probabilities.

    Keeps the sub-family of enumerated graphs containing the current state;
    the weight of candidate edge jk is the number of those graphs that also
    contain jk.
    """

    __slots__ = ("n", "pairs", "sub", "gmask")

    def __init__(self, n: int, masks: Sequence[int], gmask: int = 0):
        self.n = n
        self.pairs = tri_pairs(n)
        self.gmask = gmask
        self.sub = [m for m in masks if m & gmask == gmask]

    def candidate_counts(self) -> dict[int, int]:
        """bit -> number of compatible members containing that missing edge."""
        counts: dict[int, int] = {}
        g = self.gmask
        for mem in self.sub:
            rem = mem ^ g
            while rem:
                low = rem & -rem
                counts[low] = counts.get(low, 0) + 1
                rem ^= low
        return counts

    def conditional(self, bit: int) -> float:
        if not self.sub:
            raise ValueError("conditioning event is empty")
        hit = sum(1 for mem in self.sub if mem & bit)
        return hit / len(self.sub)

    def insert_step(self, rng: RandomSource) -> Edge:
        counts = self.candidate_counts()
        if not counts:
            raise RuntimeError("no insertable edge; state is already saturated")
        total = sum(counts.values())
        r = rng.uniform() * total
        acc = 0.0
        chosen = -1
        for bit in sorted(counts):
            acc += counts[bit]
            if r < acc:
                chosen = bit
                break
        if chosen < 0:
            chosen = max(counts)
        self.apply(chosen)
        return self.pairs[chosen.bit_length() - 1]

    def apply(self, bit: int) -> None:
        self.gmask |= bit
        g = self.gmask
        self.sub = [m for m in self.sub if m & bit]
        assert all(m & g == g for m in self.sub)


def seq_sample_d(
    d: DegreeSequence | Sequence[int],
    mode: SeqSampleMode,
    rng: RandomSource,
    checkpoints: Sequence[int] = (),
    diagnostics: SamplerDiagnostics | None = None,
    cap: int | None = None,
) -> tuple[SimpleGraph, list[SimpleGraph]]:
    """Build a graph with degree sequence d by sequential edge insertion.

    Returns the final graph plus a deep snapshot of the state after m
    insertions for each requested checkpoint m (in caller order).

    In EXACT_ORACLE mode every step uses the exact conditional edge
    probabilities, so the final graph is an exact uniform draw and each
    checkpoint is an exact uniform m-edge partial graph.  In ASYMPTOTIC mode
    steps use the closed-form remaining-degree weights; the final law is only
    approximately uniform, and a run that paints itself into a corner (no
    weight-positive pair left, degrees unsaturated) restarts from scratch,
    counted in `diagnostics.restarts`.
    """
    d = DegreeSequence.of(d)
    if not is_graphical(d):
        raise NonGraphicalError(f"{d.degrees} is not graphical")
    m_total = d.total // 2
    want = [int(m) for m in checkpoints]
    for m in want:
        if not 0 <= m <= m_total:
            raise ValueError(f"checkpoint {m} outside [0, {m_total}]")
    want_set = set(want)

    if mode is SeqSampleMode.EXACT_ORACLE:
        fam = enumerate_graphs(d, cap=cap)
        if not fam.masks:
            raise NonGraphicalError(f"{d.degrees} is not graphical")
        kernel = OracleKernel(d.n, fam.masks)
        snaps: dict[int, SimpleGraph] = {}
        if 0 in want_set:
            snaps[0] = SimpleGraph.empty(d.n)
        for step in range(1, m_total + 1):
            kernel.insert_step(rng)
            if step in want_set:
                snaps[step] = graph_of_mask(d.n, kernel.gmask, kernel.pairs)
        final = graph_of_mask(d.n, kernel.gmask, kernel.pairs)
        return final, [snaps[m] for m in want]

    if mode is not SeqSampleMode.ASYMPTOTIC:
        raise ValueError(f"unknown mode {mode!r}")

    while True:
        edges: set[Edge] = set()
        kernel2 = AsymptoticKernel(d.degrees, edges, list(d.degrees))
        snaps = {}
        if 0 in want_set:
            snaps[0] = SimpleGraph.empty(d.n)
        stuck = False
        for step in range(1, m_total + 1):
            if kernel2.insert_step(rng) is None:
                stuck = True
                break
            if step in want_set:
                snaps[step] = SimpleGraph(d.n, frozenset(edges))
        if not stuck:
            final = SimpleGraph(d.n, frozenset(edges))
            return final, [snaps[m] for m in want]
        if diagnostics is not None:
            diagnostics.restarts += 1
