from itertools import combinations
from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from degseq import (
    DegenerateSequenceError,
    DegreeSequence,
    SimpleGraph,
    chung_lu_matrix,
    degree_stats,
    f_c_transform,
    hadamard,
    is_graphical,
    p_matrix,
    q_matrix,
    remaining_degrees,
)
from degseq.graphs import SymmetricProbMatrix, tri_index, tri_pairs


def brute_force_realizable(degrees):
    """Independent oracle: scan every graph on n vertices for a realization."""
    n = len(degrees)
    pairs = list(combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        deg = [0] * n
        for i, (j, k) in enumerate(pairs):
            if mask >> i & 1:
                deg[j] += 1
                deg[k] += 1
        if deg == list(degrees):
            return True
    return False


class TestDegreeSequence:
    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            DegreeSequence((1, -1))

    def test_rejects_degree_at_least_n(self):
        with pytest.raises(ValueError):
            DegreeSequence((2, 2))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            DegreeSequence(())


class TestDegreeStats:
    def test_regular_triangle(self):
        assert degree_stats((2, 2, 2)) == (6, 2, 2, 4)

    def test_all_zero(self):
        assert degree_stats((0, 0, 0)) == (0, 0, 0, 0)

    def test_unsorted_input(self):
        # sorted copy is (3,2,2,2,1); top_sum adds the largest 3 entries
        assert degree_stats((3, 2, 2, 2, 1)) == (10, 3, 1, 7)
        assert degree_stats((1, 2, 3, 2, 2)) == (10, 3, 1, 7)

    @given(st.lists(st.integers(0, 4), min_size=1, max_size=5))
    def test_matches_direct_formula(self, raw):
        n = len(raw)
        raw = [min(x, n - 1) for x in raw]
        total, dmax, dmin, top = degree_stats(raw)
        ordered = sorted(raw, reverse=True)
        assert total == sum(raw)
        assert dmax == ordered[0]
        assert dmin == ordered[-1]
        assert top == sum(ordered[: ordered[0]])


class TestIsGraphical:
    def test_star(self):
        assert is_graphical((3, 1, 1, 1))

    def test_triangle(self):
        assert is_graphical((2, 2, 2))

    def test_inequality_failure(self):
        # largest two degrees need 6 slots; the other side offers only 4
        assert not is_graphical((3, 3, 1, 1))
        assert not brute_force_realizable((3, 3, 1, 1))

    def test_odd_sum(self):
        assert not is_graphical((1, 0, 0))

    @given(st.lists(st.integers(0, 4), min_size=1, max_size=5))
    def test_agrees_with_exhaustive_search(self, raw):
        n = len(raw)
        d = [min(x, n - 1) for x in raw]
        assert is_graphical(d) == brute_force_realizable(d)


class TestPMatrix:
    def test_regular_triangle(self):
        m = p_matrix((2, 2, 2))
        for j, k in tri_pairs(3):
            assert m[(j, k)] == pytest.approx(0.4)

    def test_single_pair(self):
        assert p_matrix((1, 1))[(0, 1)] == pytest.approx(1 / 3)

    def test_formula_only_no_graphicality_needed(self):
        m = p_matrix((3, 3, 1, 1))
        assert m[(0, 1)] == pytest.approx(9 / (8 + 9))

    def test_monotone_in_degree_product(self):
        # same degree sum, increasing products: entries must increase
        m = p_matrix((3, 2, 2, 1))
        assert m[(2, 3)] < m[(1, 2)] < m[(0, 1)]

    def test_zero_degree_row_is_zero(self):
        m = p_matrix((2, 2, 2, 0))
        assert m[(0, 3)] == 0.0 and m[(2, 3)] == 0.0


class TestQMatrix:
    def test_regular_triangle(self):
        m = q_matrix((2, 2, 2))
        for j, k in tri_pairs(3):
            assert m[(j, k)] == pytest.approx(1 / 3)

    def test_single_pair(self):
        assert q_matrix((1, 1))[(0, 1)] == 1.0

    def test_asymmetric(self):
        m = q_matrix((2, 1, 1))
        assert m[(0, 1)] == pytest.approx(2 / 5)
        assert m[(0, 2)] == pytest.approx(2 / 5)
        assert m[(1, 2)] == pytest.approx(1 / 5)

    def test_degenerate_raises(self):
        with pytest.raises(DegenerateSequenceError):
            q_matrix((2, 0, 0))

    def test_monotone_in_degree_product(self):
        m = q_matrix((3, 2, 2, 1))
        assert m[(2, 3)] < m[(1, 2)] < m[(0, 1)]

    @given(st.lists(st.integers(0, 5), min_size=2, max_size=6))
    def test_sums_to_one(self, raw):
        n = len(raw)
        d = [min(x, n - 1) for x in raw]
        if sum(1 for x in d if x > 0) < 2:
            return
        m = q_matrix(d)
        assert abs(m.tri.sum() - 1.0) < 1e-12


class TestChungLu:
    def test_regular(self):
        m = chung_lu_matrix((2, 2, 2))
        assert m[(0, 1)] == pytest.approx(4 / 6)

    def test_clamped(self):
        assert chung_lu_matrix((10.0, 10.0))[(0, 1)] == 1.0

    def test_quarter(self):
        m = chung_lu_matrix((1, 1, 1, 1))
        assert m[(2, 3)] == pytest.approx(0.25)

    def test_all_zero_raises(self):
        with pytest.raises(ValueError):
            chung_lu_matrix((0.0, 0.0))


class TestFcTransform:
    def test_zero_matrix_fixed(self):
        m = f_c_transform(SymmetricProbMatrix.zeros(4), 3.7)
        assert m.max_entry() == 0.0

    def test_zero_scale(self):
        m = f_c_transform(SymmetricProbMatrix.full(4, 0.9), 0.0)
        assert m.max_entry() == 0.0

    def test_numeric_value_high_precision(self):
        mpmath = pytest.importorskip("mpmath")
        m = f_c_transform(SymmetricProbMatrix.full(3, 0.18), 2.4)
        expected = float(1 - mpmath.exp(mpmath.mpf("-0.432")))
        assert m[(0, 1)] == pytest.approx(expected, abs=1e-12)
        assert m[(0, 1)] == pytest.approx(0.3507906233, abs=1e-9)

    @given(st.floats(0.0, 1.0), st.floats(0.0, 50.0))
    def test_range_and_monotonicity_in_scale(self, entry, scale):
        m = SymmetricProbMatrix.full(3, entry)
        lo = f_c_transform(m, scale)
        hi = f_c_transform(m, scale + 1.0)
        # mathematically the value stays below 1 for finite scale, but once
        # exp(-scale*entry) drops under one ulp the double saturates at 1.0
        assert 0.0 <= lo[(0, 1)] <= 1.0
        if scale * entry <= 30.0:
            assert lo[(0, 1)] < 1.0
        assert lo[(0, 1)] <= hi[(0, 1)]

    def test_negative_scale_raises(self):
        with pytest.raises(ValueError):
            f_c_transform(SymmetricProbMatrix.zeros(3), -0.1)


class TestHadamard:
    def test_identity(self):
        a = q_matrix((2, 1, 1))
        ones = SymmetricProbMatrix.full(3, 1.0)
        assert np.allclose(hadamard(a, ones).tri, a.tri)

    def test_annihilator(self):
        a = q_matrix((2, 1, 1))
        assert hadamard(a, SymmetricProbMatrix.zeros(3)).max_entry() == 0.0

    def test_scalar_product(self):
        a = SymmetricProbMatrix.full(3, 0.4)
        b = SymmetricProbMatrix.full(3, 1 / 3)
        assert hadamard(a, b)[(0, 1)] == pytest.approx(2 / 15)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            hadamard(SymmetricProbMatrix.zeros(3), SymmetricProbMatrix.zeros(4))


class TestRemainingDegrees:
    def test_single_edge(self):
        h = SimpleGraph.from_edges(4, [(0, 1)])
        t, p_m = remaining_degrees((1, 1, 1, 1), h)
        assert t.degrees == (0, 0, 1, 1)
        assert p_m == pytest.approx(0.5)

    def test_empty_graph(self):
        t, p_m = remaining_degrees((2, 2, 2), SimpleGraph.empty(3))
        assert t.degrees == (2, 2, 2)
        assert p_m == 1.0

    def test_saturated(self):
        triangle = SimpleGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
        t, p_m = remaining_degrees((2, 2, 2), triangle)
        assert t.degrees == (0, 0, 0)
        assert p_m == 0.0

    def test_oversaturated_raises(self):
        h = SimpleGraph.from_edges(3, [(0, 1), (0, 2)])
        with pytest.raises(ValueError):
            remaining_degrees((1, 1, 1), h)

    @given(st.integers(2, 6), st.sets(st.tuples(st.integers(0, 5), st.integers(0, 5))))
    def test_roundtrip(self, n, raw_edges):
        edges = {(min(j, k), max(j, k)) for j, k in raw_edges if j != k and j < n and k < n}
        h = SimpleGraph.from_edges(n, edges)
        hdeg = h.degree_vector()
        d = tuple(min(hdeg[i] + i % 2, n - 1) for i in range(n))
        if any(d[i] < hdeg[i] for i in range(n)):
            return
        t, _ = remaining_degrees(d, h)
        assert tuple(a + b for a, b in zip(t.degrees, hdeg)) == d


class TestSimpleGraph:
    def test_no_self_loops(self):
        with pytest.raises(ValueError):
            SimpleGraph.from_edges(3, [(1, 1)])

    def test_edge_normalization(self):
        g = SimpleGraph.from_edges(3, [(2, 0)])
        assert g.has_edge(0, 2) and g.has_edge(2, 0)

    def test_degree_vector(self):
        g = SimpleGraph.from_edges(4, [(0, 1), (1, 2)])
        assert g.degree_vector() == (1, 2, 1, 0)

    def test_tri_index_bijection(self):
        n = 7
        seen = set()
        for j, k in tri_pairs(n):
            idx = tri_index(n, j, k)
            assert idx not in seen
            seen.add(idx)
        assert seen == set(range(comb(n, 2)))
