from math import expm1, sqrt

import pytest

from degseq import (
    DegenerateSequenceError,
    NonGraphicalError,
    OracleCapError,
    RandomSource,
    SamplerDiagnostics,
    SeqSampleMode,
    SimpleGraph,
    f_c_transform,
    hadamard,
    q_matrix,
    sample_gnw,
    sample_weighted_edge,
    seq_approx_p,
    seq_sample_d,
)
from degseq.graphs import SymmetricProbMatrix
from degseq.stats import empirical_marginals, indicator_matrix, pairwise_covariance

Z_BAND = 4.5


class TestSampleWeightedEdge:
    def test_single_pair(self):
        rng = RandomSource(1)
        assert all(sample_weighted_edge((1, 1), rng) == (0, 1) for _ in range(20))

    def test_degenerate_raises(self):
        with pytest.raises(DegenerateSequenceError):
            sample_weighted_edge((2, 0, 0), RandomSource(1))

    def test_frequencies_match_pair_weights(self):
        # weights (2,1,1): pair probabilities 2/5, 2/5, 1/5
        rng = RandomSource(555)
        n_draws = 100_000
        counts = {(0, 1): 0, (0, 2): 0, (1, 2): 0}
        for _ in range(n_draws):
            counts[sample_weighted_edge((2, 1, 1), rng)] += 1
        for pair, prob in [((0, 1), 0.4), ((0, 2), 0.4), ((1, 2), 0.2)]:
            band = 3.0 * sqrt(prob * (1 - prob) / n_draws)
            assert abs(counts[pair] / n_draws - prob) < band

    def test_symmetric_case(self):
        rng = RandomSource(556)
        n_draws = 30_000
        counts = {}
        for _ in range(n_draws):
            e = sample_weighted_edge((2, 2, 2), rng)
            counts[e] = counts.get(e, 0) + 1
        for c in counts.values():
            assert abs(c / n_draws - 1 / 3) < 3.0 * sqrt((1 / 3) * (2 / 3) / n_draws)

    def test_zero_degree_vertex_never_drawn(self):
        rng = RandomSource(557)
        for _ in range(2000):
            e = sample_weighted_edge((2, 2, 2, 0), rng)
            assert 3 not in e


class TestSampleGnw:
    def test_all_zero(self):
        g = sample_gnw(SymmetricProbMatrix.zeros(5), RandomSource(2))
        assert g.num_edges == 0

    def test_all_one(self):
        g = sample_gnw(SymmetricProbMatrix.full(5, 1.0), RandomSource(2))
        assert g.num_edges == 10

    def test_edge_count_moments(self):
        # constant 0.3 on 20 vertices: expected count 57 over 190 pairs
        w = SymmetricProbMatrix.full(20, 0.3)
        rng = RandomSource(558)
        n_runs = 10_000
        total = sum(sample_gnw(w, rng).num_edges for _ in range(n_runs))
        band = 3.0 * sqrt(190 * 0.3 * 0.7 / n_runs)
        assert abs(total / n_runs - 57.0) < band

    def test_deterministic(self):
        w = SymmetricProbMatrix.full(6, 0.5)
        assert sample_gnw(w, RandomSource(9, 4)) == sample_gnw(w, RandomSource(9, 4))


class TestSeqApproxP:
    def test_zero_lambda(self):
        lam_m = SymmetricProbMatrix.full(3, 0.9)
        g = seq_approx_p((2, 2, 2), 0.0, lam_m, RandomSource(3))
        assert g.num_edges == 0

    def test_zero_acceptance(self):
        g = seq_approx_p((2, 2, 2), 5.0, SymmetricProbMatrix.zeros(3), RandomSource(3))
        assert g.num_edges == 0

    def test_degenerate_raises(self):
        with pytest.raises(DegenerateSequenceError):
            seq_approx_p((1, 0, 0), 1.0, SymmetricProbMatrix.zeros(3), RandomSource(3))

    def test_marginals_match_closed_form(self, approx_p_samples):
        # per-edge law 1 - exp(-lam * Lambda * Q) with lam=2.4, Lambda=0.54, Q=1/3
        w_ref = f_c_transform(
            hadamard(SymmetricProbMatrix.full(3, 0.54), q_matrix((2, 2, 2))), 2.4
        )
        assert w_ref[(0, 1)] == pytest.approx(-expm1(-0.432))
        report = empirical_marginals(approx_p_samples, w_ref)
        assert report.worst_abs_z < Z_BAND
        assert not report.exact_violations

    def test_pairwise_covariances_vanish(self, approx_p_samples):
        report = pairwise_covariance(approx_p_samples)
        assert not report.violations

    def test_matches_direct_gnw_sampler(self, approx_p_samples):
        # same closed-form law sampled directly; two-sample marginal bands
        w_ref = f_c_transform(
            hadamard(SymmetricProbMatrix.full(3, 0.54), q_matrix((2, 2, 2))), 2.4
        )
        rng = RandomSource(90211)
        n_direct = 100_000
        direct = [sample_gnw(w_ref, rng) for _ in range(n_direct)]
        f_direct = indicator_matrix(direct).mean(axis=0)
        f_seq = indicator_matrix(approx_p_samples).mean(axis=0)
        n_seq = len(approx_p_samples)
        for idx in range(3):
            p = w_ref.tri[idx]
            band = 3.0 * sqrt(p * (1 - p) * (1 / n_direct + 1 / n_seq))
            assert abs(f_direct[idx] - f_seq[idx]) < band

    def test_deterministic(self):
        lam_m = SymmetricProbMatrix.full(4, 0.5)
        a = seq_approx_p((2, 2, 2, 2), 3.0, lam_m, RandomSource(10, 2))
        b = seq_approx_p((2, 2, 2, 2), 3.0, lam_m, RandomSource(10, 2))
        assert a == b


class TestSeqSampleD:
    def test_single_edge_both_modes(self):
        for mode in SeqSampleMode:
            g, _ = seq_sample_d((1, 1), mode, RandomSource(4))
            assert g.edges == frozenset({(0, 1)})

    def test_non_graphical_raises(self):
        with pytest.raises(NonGraphicalError):
            seq_sample_d((3, 3, 1, 1), SeqSampleMode.ASYMPTOTIC, RandomSource(4))

    def test_oracle_cap(self):
        with pytest.raises(OracleCapError):
            seq_sample_d((1,) * 12, SeqSampleMode.EXACT_ORACLE, RandomSource(4))

    def test_exact_degrees_every_run(self):
        d = (3, 2, 2, 2, 1)
        for s in range(50):
            g, _ = seq_sample_d(d, SeqSampleMode.EXACT_ORACLE, RandomSource(11, s))
            assert g.degree_vector() == d

    def test_asymptotic_degrees_every_run_medium_n(self):
        d = (4,) * 30
        for s in range(10):
            g, _ = seq_sample_d(d, SeqSampleMode.ASYMPTOTIC, RandomSource(12, s))
            assert g.degree_vector() == d

    def test_checkpoints_are_nested_prefixes(self):
        g, snaps = seq_sample_d(
            (2, 2, 2, 2, 2),
            SeqSampleMode.EXACT_ORACLE,
            RandomSource(13),
            checkpoints=(0, 1, 3, 5),
        )
        assert [s.num_edges for s in snaps] == [0, 1, 3, 5]
        for a, b in zip(snaps, snaps[1:]):
            assert a.is_subgraph_of(b)
        assert snaps[-1] == g

    def test_checkpoint_snapshots_are_frozen(self):
        _, snaps = seq_sample_d(
            (2, 2, 2, 2), SeqSampleMode.ASYMPTOTIC, RandomSource(14), checkpoints=(1,)
        )
        assert isinstance(snaps[0], SimpleGraph)
        assert snaps[0].num_edges == 1

    def test_asymptotic_restart_on_dead_end(self):
        # (1,1,2): proposing the (0,1) edge first strands vertex 2, which
        # must be detected and restarted, never returned
        d = (1, 1, 2)
        diag = SamplerDiagnostics()
        for s in range(200):
            g, _ = seq_sample_d(d, SeqSampleMode.ASYMPTOTIC, RandomSource(15, s), diagnostics=diag)
            assert g.degree_vector() == d
        assert diag.restarts > 0

    def test_deterministic(self):
        a, _ = seq_sample_d((2, 2, 2, 2), SeqSampleMode.ASYMPTOTIC, RandomSource(16, 8))
        b, _ = seq_sample_d((2, 2, 2, 2), SeqSampleMode.ASYMPTOTIC, RandomSource(16, 8))
        assert a == b

    def test_bad_checkpoint_rejected(self):
        with pytest.raises(ValueError):
            seq_sample_d((1, 1), SeqSampleMode.ASYMPTOTIC, RandomSource(4), checkpoints=(2,))
