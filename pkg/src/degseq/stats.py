"""Statistical verification engine for the samplers and the coupling.

Every threshold used by the verification suites lives in `THRESHOLDS` so the
false-alarm budget is auditable in one place.  All checks are deterministic
given fixed seeds upstream; nothing here draws randomness.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.special import gammaincc

from .coupling import CouplingParams
from .graphs import (
    DegreeSequence,
    Edge,
    SimpleGraph,
    SymmetricProbMatrix,
    degree_stats,
    p_matrix,
    q_matrix,
    tri_index,
    tri_pairs,
    tri_size,
)


@dataclass(frozen=True)
class VerifyThresholds:
    """Shared acceptance thresholds.

    p_min: goodness-of-fit tests must exceed this p-value; per-test false
        alarm rate is exactly p_min (1%) for a correct sampler.
    z_max: per-edge marginal z-scores must stay below this; a single
        two-sided Gaussian tail at 4.5 is ~6.8e-6, so even a union over a
        few hundred edges stays below 1e-3.
    sigma: covariance and moment bands use mean +- sigma * sd; at 3 sigma the
        per-quantity false-alarm rate is ~2.7e-3.
    Suites run with fixed seeds, so a pass/fail outcome is reproducible.
    """

    p_min: float = 0.01
    z_max: float = 4.5
    sigma: float = 3.0


THRESHOLDS = VerifyThresholds()


def indicator_matrix(samples: Sequence[SimpleGraph]) -> np.ndarray:
    """(n_runs, n_pairs) 0/1 matrix of edge indicators."""
    if not samples:
        raise ValueError("no samples")
    n = samples[0].n
    out = np.zeros((len(samples), tri_size(n)), dtype=np.float64)
    for i, g in enumerate(samples):
        if g.n != n:
            raise ValueError("samples mix different vertex counts")
        for j, k in g.edges:
            out[i, j * n - j * (j + 1) // 2 + (k - j - 1)] = 1.0
    return out


# ---------------------------------------------------------------------------
# Marginals
# ---------------------------------------------------------------------------


@dataclass
class MarginalRow:
    edge: Edge
    frequency: float
    reference: float
    z: float | None


@dataclass
class MarginalReport:
    rows: list[MarginalRow]
    worst_abs_z: float
    n_runs: int
    exact_violations: list[Edge]

    def passed(self, thresholds: VerifyThresholds = THRESHOLDS) -> bool:
        return not self.exact_violations and self.worst_abs_z < thresholds.z_max

    def to_json_dict(self) -> dict:
        return {
            "n_runs": self.n_runs,
            "worst_abs_z": self.worst_abs_z,
            "exact_violations": [list(e) for e in self.exact_violations],
            "rows": [
                {
                    "edge": list(r.edge),
                    "frequency": r.frequency,
                    "reference": r.reference,
                    "z": r.z,
                }
                for r in self.rows
            ],
        }


def empirical_marginals(
    samples: Sequence[SimpleGraph], reference: SymmetricProbMatrix
) -> MarginalReport:
    """Per-edge frequencies with z-scores against a reference law.

    Edges whose reference probability is exactly 0 or 1 are checked for
    exact agreement instead of a z-score.
    """
    if len(samples) < 100:
        raise ValueError("need at least 100 runs for marginal z-scores")
    if samples[0].n != reference.n:
        raise ValueError("reference dimension does not match samples")
    x = indicator_matrix(samples)
    freq = x.mean(axis=0)
    n_runs = len(samples)
    pairs = tri_pairs(reference.n)
    rows: list[MarginalRow] = []
    worst = 0.0
    violations: list[Edge] = []
    for i, e in enumerate(pairs):
        ref = float(reference.tri[i])
        f = float(freq[i])
        if ref <= 0.0 or ref >= 1.0:
            rows.append(MarginalRow(e, f, ref, None))
            if f != ref:
                violations.append(e)
            continue
        z = (f - ref) / sqrt(ref * (1.0 - ref) / n_runs)
        rows.append(MarginalRow(e, f, ref, z))
        worst = max(worst, abs(z))
    return MarginalReport(rows, worst, n_runs, violations)


# ---------------------------------------------------------------------------
# Goodness of fit
# ---------------------------------------------------------------------------


@dataclass
class GofReport:
    categories: int
    statistic: float
    p_value: float
    n_runs: int

    def passed(self, thresholds: VerifyThresholds = THRESHOLDS) -> bool:
        return self.p_value > thresholds.p_min

    def to_json_dict(self) -> dict:
        return {
            "categories": self.categories,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "n_runs": self.n_runs,
        }


def pearson_chi_square(
    observed: Sequence[int], probabilities: Sequence[float], min_expected: float = 5.0
) -> GofReport:
    """Pearson test of observed counts against category probabilities.

    Categories whose expected count falls below `min_expected` are merged,
    smallest first, to keep the chi-square approximation valid.  The p-value
    comes from the regularized incomplete gamma function.
    """
    obs = [int(c) for c in observed]
    probs = [float(p) for p in probabilities]
    if len(obs) != len(probs):
        raise ValueError("length mismatch")
    if any(p <= 0 for p in probs):
        raise ValueError("category probabilities must be positive")
    total_p = sum(probs)
    if abs(total_p - 1.0) > 1e-9:
        raise ValueError("probabilities must sum to 1")
    n = sum(obs)
    if len(obs) == 1:
        # point-mass law: anything in support fits perfectly
        return GofReport(1, 0.0, 1.0, n)
    cells = sorted(zip(probs, obs))
    while len(cells) > 2 and cells[0][0] * n < min_expected:
        p0, o0 = cells.pop(0)
        p1, o1 = cells.pop(0)
        cells.append((p0 + p1, o0 + o1))
        cells.sort()
    stat = 0.0
    for p, o in cells:
        exp = p * n
        stat += (o - exp) ** 2 / exp
    dof = len(cells) - 1
    p_value = float(gammaincc(dof / 2.0, stat / 2.0))
    return GofReport(len(cells), stat, p_value, n)


def chi_square_gof(
    samples: Sequence[SimpleGraph], law: Mapping[SimpleGraph, float]
) -> GofReport:
    """Test sampled graphs against an exact reference law.

    A sample outside the support of the law is an error: it is itself a
    correctness failure of the sampler under test.
    """
    keys = sorted(law, key=lambda g: tuple(sorted(g.edges)))
    index = {g: i for i, g in enumerate(keys)}
    counts = [0] * len(keys)
    for g in samples:
        i = index.get(g)
        if i is None or law[keys[i]] <= 0.0:
            raise ValueError(
                f"sample with edges {sorted(g.edges)} lies outside the reference support"
            )
        counts[i] += 1
    return pearson_chi_square(counts, [law[g] for g in keys])


# ---------------------------------------------------------------------------
# Pairwise covariance (independence surrogate)
# ---------------------------------------------------------------------------


@dataclass
class CovarianceReport:
    edges: list[Edge]
    covariance: np.ndarray
    band: np.ndarray
    violations: list[tuple[Edge, Edge, float, float]]
    n_runs: int

    def passed(self) -> bool:
        return not self.violations


def pairwise_covariance(
    samples: Sequence[SimpleGraph], thresholds: VerifyThresholds = THRESHOLDS
) -> CovarianceReport:
    """Empirical covariance of edge indicators for every pair of distinct edges.

    Bands are sigma * sqrt(p_e p_f (1-p_e)(1-p_f) / n): the null standard
    deviation of the empirical covariance under independent indicators.
    """
    if len(samples) < 10_000:
        raise ValueError("need at least 1e4 runs for covariance bands")
    x = indicator_matrix(samples)
    n_runs, n_pairs = x.shape
    p = x.mean(axis=0)
    cov = (x.T @ x) / n_runs - np.outer(p, p)
    var = p * (1.0 - p)
    band = thresholds.sigma * np.sqrt(np.outer(var, var) / n_runs)
    pairs = tri_pairs(samples[0].n)
    violations = []
    for a in range(n_pairs):
        for b in range(a + 1, n_pairs):
            if abs(cov[a, b]) > band[a, b]:
                violations.append((pairs[a], pairs[b], float(cov[a, b]), float(band[a, b])))
    return CovarianceReport(list(pairs), cov, band, violations, n_runs)


# ---------------------------------------------------------------------------
# Containment and concentration
# ---------------------------------------------------------------------------


def subgraph_check(
    pairs: Iterable[tuple[SimpleGraph, SimpleGraph]]
) -> tuple[int, list[tuple[int, Edge]]]:
    """Count pairs with first contained in second; list violations with a witness."""
    contained = 0
    violations: list[tuple[int, Edge]] = []
    for i, (lo, hi) in enumerate(pairs):
        if lo.n != hi.n:
            raise ValueError(f"pair {i}: vertex counts differ")
        extra = lo.edges - hi.edges
        if extra:
            violations.append((i, min(extra)))
        else:
            contained += 1
    return contained, violations


@dataclass
class CheckpointBand:
    m: int
    p_m: float
    violating_fraction: float
    worst_rel_dev: float


@dataclass
class ConcentrationReport:
    xi: float
    bands: list[CheckpointBand]

    @property
    def worst_fraction(self) -> float:
        return max((b.violating_fraction for b in self.bands), default=0.0)

    def to_json_dict(self) -> dict:
        return {
            "xi": self.xi,
            "bands": [
                {
                    "m": b.m,
                    "p_m": b.p_m,
                    "violating_fraction": b.violating_fraction,
                    "worst_rel_dev": b.worst_rel_dev,
                }
                for b in self.bands
            ],
        }


def degree_concentration_check(
    d: DegreeSequence | Sequence[int],
    checkpoints: Sequence[tuple[int, SimpleGraph]],
    xi: float,
) -> ConcentrationReport:
    """How often remaining degrees leave the band |t_j - p_m d_j| <= xi p_m d_j.

    A soft diagnostic: the underlying concentration statement carries
    unspecified constants, so callers choose their own tolerance on the
    violating fraction.
    """
    d = DegreeSequence.of(d)
    total = d.total
    bands = []
    for m, g in checkpoints:
        if g.n != d.n:
            raise ValueError("checkpoint graph size mismatch")
        p_m = (total - 2 * m) / total if total else 0.0
        deg = g.degree_vector()
        violations = 0
        worst = 0.0
        for j in range(d.n):
            tj = d[j] - deg[j]
            center = p_m * d[j]
            dev = abs(tj - center)
            if dev > xi * center:
                violations += 1
            if center > 0:
                worst = max(worst, dev / center)
        bands.append(CheckpointBand(m, p_m, violations / d.n, worst))
    return ConcentrationReport(xi, bands)


# ---------------------------------------------------------------------------
# Closed-form law comparison
# ---------------------------------------------------------------------------


@dataclass
class WComparisonReport:
    max_rel_error: float
    mean_rel_error: float
    driver: float

    def to_json_dict(self) -> dict:
        return {
            "max_rel_error": self.max_rel_error,
            "mean_rel_error": self.mean_rel_error,
            "driver": self.driver,
        }


def compare_w_to_fcp(
    d: DegreeSequence | Sequence[int], params: CouplingParams
) -> WComparisonReport:
    """Entrywise relative gap between the coupled lower law and 1 - exp(-P).

    Compares 1 - exp(-lam * Lambda_jk * Q_jk) against 1 - exp(-P_jk) over
    pairs with positive degree product, and reports the first-order driver
    zeta + zeta' + max_degree/||d||_1 alongside.
    """
    d = DegreeSequence.of(d)
    q = q_matrix(d)
    p = p_matrix(d)
    lhs = -np.expm1(-params.lam * params.big_lambda.tri * q.tri)
    rhs = -np.expm1(-p.tri)
    mask = rhs > 0
    if not mask.any():
        raise ValueError("degenerate sequence: no positive-probability pair")
    rel = np.abs(lhs[mask] - rhs[mask]) / rhs[mask]
    stats = degree_stats(d)
    driver = params.zeta + params.zeta_prime + stats.max / stats.total
    return WComparisonReport(float(rel.max()), float(rel.mean()), float(driver))
