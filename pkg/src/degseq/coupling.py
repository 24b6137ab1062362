"""Coupled construction of an independent-edge graph inside a degree-constrained one.

`run_coupling` drives a Poissonized stream of degree-weighted candidate pairs
through a three-way accept table so that, marginally, the lower graph is an
independent-edge graph with entries 1 - exp(-lam * Lambda_jk * Q_jk), the
upper graph is (in exact mode) a uniform graph with the target degree
sequence, and on runs that never hit the escape branch the lower graph is a
subgraph of the upper one.  The escape branch (`ind_sample`) redraws the two
graphs independently, preserving both marginal laws at the cost of
containment.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum
from math import log, sqrt
from typing import Sequence

import numpy as np

from .graphs import (
    DegreeSequence,
    Edge,
    NonGraphicalError,
    SimpleGraph,
    SymmetricProbMatrix,
    degree_stats,
    is_graphical,
    normalize_edge,
    q_matrix,
    f_c_transform,
    hadamard,
    remaining_degrees,
    tri_index,
    tri_pairs,
)
from .oracle import (
    enumerate_graphs,
    exact_conditional_edge_prob,
    exact_uniform_sample,
    oracle_cap,
)
from .randomness import AliasTable, RandomSource, sample_poisson
from .samplers import (
    AsymptoticKernel,
    OracleKernel,
    SeqSampleMode,
    sample_gnw,
    seq_sample_d,
)

__all__ = [
    "EtaDenominatorMode",
    "CouplingParams",
    "CouplingTrace",
    "default_params",
    "lambda_matrix",
    "rho",
    "eta_denominator",
    "run_coupling",
    "ind_sample",
]


class EtaDenominatorMode(Enum):
    EXACT_MAX = "exact-max"
    CERTIFIED_BOUND = "certified-bound"


@dataclass(frozen=True)
class CouplingParams:
    """Schedule parameters: three vanishing slacks, the Poisson budget, and
    the per-pair lower-graph acceptance matrix."""

    xi: float
    zeta: float
    zeta_prime: float
    lam: float
    big_lambda: SymmetricProbMatrix
    regime_warning: bool = False


def lambda_matrix(d: DegreeSequence | Sequence[int], zeta: float) -> SymmetricProbMatrix:
    """Acceptance matrix with entries (1 - zeta) * ||d||_1 / (||d||_1 + d_j d_k)."""
    d = DegreeSequence.of(d)
    if not 0.0 <= zeta <= 1.0:
        raise ValueError("zeta must lie in [0, 1]")
    vec = np.asarray(d.degrees, dtype=float)
    total = vec.sum()
    iu = np.triu_indices(d.n, k=1)
    prod = vec[iu[0]] * vec[iu[1]]
    if total <= 0:
        tri = np.zeros_like(prod)
    else:
        tri = (1.0 - zeta) * total / (total + prod)
    return SymmetricProbMatrix(d.n, tri)


def default_params(
    d: DegreeSequence | Sequence[int],
    *,
    xi: float | None = None,
    zeta: float | None = None,
    zeta_prime: float | None = None,
    c_mult: float = 3.0,
) -> CouplingParams:
    """Concrete finite-n schedule.

    zeta' = max(||d||_1^(-1/4), sqrt(top_sum/||d||_1)); xi = (log n /
    (zeta' * min_degree))^(1/3) clamped to (0, 1/2]; zeta = min(1/2,
    c_mult * (top_sum/(zeta' ||d||_1) + xi)); then lam and Lambda follow the
    two defining identities.  Keyword overrides replace individual knobs
    before the dependent quantities are derived.  `regime_warning` is set
    when the sequence sits outside the regime the schedule is designed for
    (top_sum >= ||d||_1) or when any knob hit its clamp.
    """
    d = DegreeSequence.of(d)
    if d.n < 2:
        raise ValueError("need n >= 2")
    stats = degree_stats(d)
    if stats.min == 0:
        raise ValueError("schedule undefined for zero minimum degree")
    total, _, dmin, top_sum = stats
    warning = top_sum >= total

    if zeta_prime is None:
        zeta_prime = max(total ** -0.25, sqrt(top_sum / total))
    if not 0.0 <= zeta_prime < 1.0:
        raise ValueError(f"zeta_prime={zeta_prime} outside [0, 1)")
    warning = warning or zeta_prime > 0.5

    if xi is None:
        if zeta_prime == 0.0:
            raise ValueError("xi override required when zeta_prime is 0")
        xi_raw = (log(d.n) / (zeta_prime * dmin)) ** (1.0 / 3.0)
        xi = min(0.5, xi_raw)
        warning = warning or xi_raw > 0.5
    if not 0.0 < xi <= 0.5:
        raise ValueError(f"xi={xi} outside (0, 1/2]")

    if zeta is None:
        if zeta_prime == 0.0:
            raise ValueError("zeta override required when zeta_prime is 0")
        zeta_raw = c_mult * (top_sum / (zeta_prime * total) + xi)
        zeta = min(0.5, zeta_raw)
        warning = warning or zeta_raw > 0.5
    if not 0.0 <= zeta < 1.0:
        raise ValueError(f"zeta={zeta} outside [0, 1)")

    lam = (1.0 - zeta_prime) * total / 2.0
    return CouplingParams(
        xi=xi,
        zeta=zeta,
        zeta_prime=zeta_prime,
        lam=lam,
        big_lambda=lambda_matrix(d, zeta),
        regime_warning=warning,
    )


def rho(
    d: DegreeSequence | Sequence[int],
    state: SimpleGraph,
    jk: tuple[int, int],
    mode: SeqSampleMode,
    cap: int | None = None,
) -> float:
    """Per-candidate acceptance weight: P(jk joins | state) / (d_j d_k)."""
    d = DegreeSequence.of(d)
    j, k = normalize_edge(*jk)
    if state.has_edge(j, k):
        raise ValueError(f"({j},{k}) already present in the state")
    dj, dk = d[j], d[k]
    if dj < 1 or dk < 1:
        raise ValueError("weight undefined for zero-degree endpoints")
    if mode is SeqSampleMode.EXACT_ORACLE:
        p = exact_conditional_edge_prob(d, state, (j, k), cap=cap)
    else:
        t, _ = remaining_degrees(d, state)
        prod = t[j] * t[k]
        p = prod / (sum(t.degrees) + prod) if prod > 0 else 0.0
    return p / (dj * dk)


def eta_denominator(
    d: DegreeSequence | Sequence[int],
    state: SimpleGraph,
    denom_mode: EtaDenominatorMode,
    prob_mode: SeqSampleMode,
    cap: int | None = None,
) -> float:
    """Normalizer for the per-step acceptance ratio.

    EXACT_MAX scans every non-edge and returns the true maximum weight.
    CERTIFIED_BOUND returns B = (max_h t_h/d_h)^2 / ||t||_1, valid only for
    the asymptotic weights, where B >= rho for every non-edge because
    rho = t_h t_l / (d_h d_l (||t||_1 + t_h t_l)) <= (t_h/d_h)(t_l/d_l)/||t||_1.
    """
    d = DegreeSequence.of(d)
    if denom_mode is EtaDenominatorMode.CERTIFIED_BOUND:
        if prob_mode is not SeqSampleMode.ASYMPTOTIC:
            raise ValueError(
                "certified bound is only valid for asymptotic probabilities"
            )
        t, _ = remaining_degrees(d, state)
        tsum = sum(t.degrees)
        rmax = 0.0
        for h in range(d.n):
            if d[h] >= 1:
                rmax = max(rmax, t[h] / d[h])
        if tsum <= 0 or rmax <= 0.0:
            raise ValueError("no eligible pair")
        return rmax * rmax / tsum

    best = 0.0
    for h, l in tri_pairs(d.n):
        if d[h] < 1 or d[l] < 1 or state.has_edge(h, l):
            continue
        best = max(best, rho(d, state, (h, l), prob_mode, cap=cap))
    if best <= 0.0:
        raise ValueError("no eligible pair")
    return best


@dataclass
class CouplingTrace:
    """Per-run record of the coupled construction.

    The step loop partitions its iterations exactly as
    duplicate_hits + insertions_both + rejections_l_only + rejections_g
    = steps_total, and the upper graph's edge count when the loop ended is
    insertions_both + rejections_l_only.
    """

    poisson_steps: int = 0
    fallback: bool = False
    fallback_step: int | None = None
    steps_total: int = 0
    eta_min: float = 1.0
    rejections_g: int = 0
    rejections_l_only: int = 0
    duplicate_hits: int = 0
    insertions_both: int = 0
    edges_at_step_end: int = 0
    completion_insertions: int = 0
    completion_restarts: int = 0
    approx_g: bool = False
    p_m_checkpoints: list[tuple[int, float]] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "poisson_steps": self.poisson_steps,
            "fallback": self.fallback,
            "fallback_step": self.fallback_step,
            "steps_total": self.steps_total,
            "eta_min": self.eta_min,
            "rejections_g": self.rejections_g,
            "rejections_l_only": self.rejections_l_only,
            "duplicate_hits": self.duplicate_hits,
            "insertions_both": self.insertions_both,
            "edges_at_step_end": self.edges_at_step_end,
            "completion_insertions": self.completion_insertions,
            "completion_restarts": self.completion_restarts,
            "approx_g": self.approx_g,
            "p_m_checkpoints": [[s, p] for s, p in self.p_m_checkpoints],
        }


def ind_sample(
    d: DegreeSequence | Sequence[int],
    params: CouplingParams,
    rng: RandomSource,
    cap: int | None = None,
) -> tuple[SimpleGraph, SimpleGraph]:
    """Independent pair (G_L, G): the escape branch of the coupling.

    G is drawn first (exactly, via the enumeration oracle, when n is within
    the cap; otherwise by the asymptotic sequential sampler), then G_L from
    its closed-form independent-edge law.  No containment relation holds.
    """
    d = DegreeSequence.of(d)
    limit = oracle_cap() if cap is None else cap
    if d.n <= limit:
        g = exact_uniform_sample(d, rng, cap=cap)
    else:
        g, _ = seq_sample_d(d, SeqSampleMode.ASYMPTOTIC, rng)
    w = f_c_transform(hadamard(params.big_lambda, q_matrix(d)), params.lam)
    g_l = sample_gnw(w, rng)
    return g_l, g


def _auto_checkpoints(steps: int) -> list[int]:
    if steps <= 0:
        return []
    return sorted({max(1, round(steps * i / 10)) for i in range(1, 11)})


def run_coupling(
    d: DegreeSequence | Sequence[int],
    params: CouplingParams,
    prob_mode: SeqSampleMode,
    denom_mode: EtaDenominatorMode,
    rng: RandomSource,
    p_m_checkpoint_steps: Sequence[int] | None = None,
    cap: int | None = None,
) -> tuple[SimpleGraph, SimpleGraph, CouplingTrace]:
    """Coupled sequential construction of (G_L, G).

    Runs a Poisson(lam) number of candidate steps.  A candidate pair already
    in G flips only the lower graph's acceptance coin.  A fresh pair is
    scored by eta = rho / denominator; a single uniform then decides between
    adding to both graphs (Lambda_jk), adding to G alone (eta - Lambda_jk),
    or rejecting (1 - eta).  One uniform per branch point keeps a fixed
    stream's fallback indicator monotone in zeta.  After the step loop, G is
    completed to its full degree sequence with the matching
    sequential-insertion kernel.

    When eta < Lambda_jk the coupled construction escapes (recorded in the
    trace, not an error): the lower graph finishes its candidate stream with
    acceptance coins alone, so that over the whole run every step applied
    the same add-with-probability-Lambda update and its independent-edge law
    holds exactly, unconditionally; the upper graph is redrawn independently
    from its own law as in `ind_sample`.  A fresh redraw of the lower graph
    would instead bias the overall mixture, because the escape event is
    correlated with the acceptance coins already spent.
    """
    d = DegreeSequence.of(d)
    n = d.n
    if params.big_lambda.n != n:
        raise ValueError("params built for a different n")
    if not is_graphical(d):
        raise NonGraphicalError(f"{d.degrees} is not graphical")
    if denom_mode is EtaDenominatorMode.CERTIFIED_BOUND and (
        prob_mode is not SeqSampleMode.ASYMPTOTIC
    ):
        raise ValueError("certified bound is only valid for asymptotic probabilities")

    trace = CouplingTrace()
    total = d.total
    if total == 0:
        return SimpleGraph.empty(n), SimpleGraph.empty(n), trace

    steps = sample_poisson(params.lam, rng)
    trace.poisson_steps = steps
    checkpoint_at = (
        set(_auto_checkpoints(steps))
        if p_m_checkpoint_steps is None
        else {int(s) for s in p_m_checkpoint_steps}
    )

    degs = d.degrees
    table = AliasTable(degs)
    ltri = params.big_lambda.tri
    g_edges: set[Edge] = set()
    l_edges: set[Edge] = set()
    t = list(degs)
    tsum = total

    oracle_sub: list[int] | None = None
    gmask = 0
    if prob_mode is SeqSampleMode.EXACT_ORACLE:
        fam = enumerate_graphs(d, cap=cap)
        if not fam.masks:
            raise NonGraphicalError(f"{d.degrees} is not graphical")
        oracle_sub = list(fam.masks)

    # lazy max-heap over t_h/d_h for the certified bound; entries carry the
    # t value they were pushed with so stale ones can be discarded
    ratio_heap: list[tuple[float, int, int]] = [
        (-1.0, h, degs[h]) for h in range(n) if degs[h] >= 1
    ]
    heapq.heapify(ratio_heap)

    def max_ratio() -> float:
        while ratio_heap and ratio_heap[0][2] != t[ratio_heap[0][1]]:
            heapq.heappop(ratio_heap)
        return -ratio_heap[0][0] if ratio_heap else 0.0

    def insert_edge(j: int, k: int) -> None:
        g_edges.add((j, k))
        t[j] -= 1
        t[k] -= 1
        tsum_ref[0] -= 2
        if degs[j] >= 1:
            heapq.heappush(ratio_heap, (-t[j] / degs[j], j, t[j]))
        if degs[k] >= 1:
            heapq.heappush(ratio_heap, (-t[k] / degs[k], k, t[k]))

    tsum_ref = [tsum]
    fallback_now = False
    step = 0
    while step < steps:
        step += 1
        while True:
            j = table.sample(rng)
            k = table.sample(rng)
            if j != k:
                break
        if j > k:
            j, k = k, j
        e = (j, k)
        lam_jk = ltri[j * n - j * (j + 1) // 2 + (k - j - 1)]

        if e in g_edges:
            trace.duplicate_hits += 1
            if rng.uniform() < lam_jk:
                l_edges.add(e)
        else:
            bit = 0
            counts: dict[int, int] | None = None
            if oracle_sub is not None:
                bit = 1 << tri_index(n, j, k)
                counts = _missing_edge_counts(oracle_sub, gmask)
                r = counts.get(bit, 0) / len(oracle_sub) / (degs[j] * degs[k])
            else:
                prod = t[j] * t[k]
                cur_tsum = tsum_ref[0]
                r = (
                    prod / (cur_tsum + prod) / (degs[j] * degs[k])
                    if prod > 0
                    else 0.0
                )
            if r <= 0.0:
                # candidate can never join G; eta = 0 also covers the
                # saturated state where the true maximum itself vanishes
                eta = 0.0
            else:
                if denom_mode is EtaDenominatorMode.CERTIFIED_BOUND:
                    rm = max_ratio()
                    denom = rm * rm / tsum_ref[0]
                elif oracle_sub is not None:
                    denom = max(
                        c / len(oracle_sub) / _pair_degree_product(n, degs, b)
                        for b, c in counts.items()
                    )
                else:
                    denom = _exact_max_asymptotic(
                        n, degs, t, tsum_ref[0], g_edges
                    )
                eta = r / denom
                assert eta <= 1.0 + 1e-9, "denominator must dominate rho"
            if eta < trace.eta_min:
                trace.eta_min = eta
            if eta < lam_jk:
                fallback_now = True
            else:
                u = rng.uniform()
                if u < lam_jk:
                    insert_edge(j, k)
                    assert e in g_edges
                    l_edges.add(e)
                    trace.insertions_both += 1
                    if oracle_sub is not None:
                        gmask |= bit
                        oracle_sub = [m for m in oracle_sub if m & bit]
                elif u < eta:
                    insert_edge(j, k)
                    trace.rejections_l_only += 1
                    if oracle_sub is not None:
                        gmask |= bit
                        oracle_sub = [m for m in oracle_sub if m & bit]
                else:
                    trace.rejections_g += 1
        if fallback_now:
            trace.fallback = True
            trace.fallback_step = step
            trace.steps_total = step
            trace.edges_at_step_end = len(g_edges)
            break
        if step in checkpoint_at:
            trace.p_m_checkpoints.append((step, tsum_ref[0] / total))

    if trace.fallback:
        # finish the lower graph's candidate stream: the escape step's pair
        # still gets its acceptance coin, then the remaining Poisson steps
        # run with coins alone, so the lower law holds exactly
        if rng.uniform() < lam_jk:
            l_edges.add(e)
        for _ in range(steps - step):
            while True:
                j = table.sample(rng)
                k = table.sample(rng)
                if j != k:
                    break
            if j > k:
                j, k = k, j
            if rng.uniform() < ltri[j * n - j * (j + 1) // 2 + (k - j - 1)]:
                l_edges.add((j, k))
        limit = oracle_cap() if cap is None else cap
        if n <= limit:
            g = exact_uniform_sample(d, rng, cap=cap)
        else:
            trace.approx_g = True
            g, _ = seq_sample_d(d, SeqSampleMode.ASYMPTOTIC, rng)
        return SimpleGraph(n, frozenset(l_edges)), g, trace

    trace.steps_total = steps
    trace.edges_at_step_end = len(g_edges)

    # completion: extend G to its full degree sequence with the same kernel
    # the standalone sequential sampler uses
    target_edges = total // 2
    if oracle_sub is not None:
        kernel = OracleKernel(n, oracle_sub, gmask)
        while len(g_edges) < target_edges:
            e = kernel.insert_step(rng)
            g_edges.add(e)
            trace.completion_insertions += 1
    else:
        base_edges = frozenset(g_edges)
        base_t = list(t)
        while len(g_edges) < target_edges:
            kernel2 = AsymptoticKernel(degs, g_edges, t)
            stuck = False
            while len(g_edges) < target_edges:
                if kernel2.insert_step(rng) is None:
                    stuck = True
                    break
                trace.completion_insertions += 1
            if stuck:
                # dead end: restart the completion from the step-loop state
                trace.completion_restarts += 1
                trace.completion_insertions -= len(g_edges) - len(base_edges)
                g_edges.clear()
                g_edges.update(base_edges)
                t = list(base_t)

    g = SimpleGraph(n, frozenset(g_edges))
    g_l = SimpleGraph(n, frozenset(l_edges))
    assert l_edges <= g_edges
    return g_l, g, trace


def _missing_edge_counts(sub: list[int], gmask: int) -> dict[int, int]:
    counts: dict[int, int] = {}
    for mem in sub:
        rem = mem ^ gmask
        while rem:
            low = rem & -rem
            counts[low] = counts.get(low, 0) + 1
            rem ^= low
    return counts


def _pair_degree_product(n: int, degs: Sequence[int], bit: int) -> int:
    j, k = tri_pairs(n)[bit.bit_length() - 1]
    return degs[j] * degs[k]


def _exact_max_asymptotic(
    n: int, degs: Sequence[int], t: Sequence[int], tsum: int, g_edges: set[Edge]
) -> float:
    best = 0.0
    for j in range(n):
        tj = t[j]
        if tj <= 0:
            continue
        for k in range(j + 1, n):
            tk = t[k]
            if tk <= 0 or (j, k) in g_edges:
                continue
            prod = tj * tk
            val = prod / (tsum + prod) / (degs[j] * degs[k])
            if val > best:
                best = val
    if best <= 0.0:
        raise ValueError("no eligible pair")
    return best
