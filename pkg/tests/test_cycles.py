import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphzeta.cycles import (
    brute_counts,
    closed_paths,
    cycle_classes,
    euler_product,
    path_stats,
    primitive_cycle_classes,
)
from graphzeta.errors import BudgetExceeded, DomainError
from graphzeta.zeta import log_zeta_series, zeta_eval


def test_closed_paths_examples(graphs):
    c4, k4 = graphs["C4"], graphs["K4"]
    assert sorted(p.vertices for p in closed_paths(c4, 0, 2)) == [(0, 1, 0), (0, 3, 0)]
    assert closed_paths(c4, 0, 3) == []
    assert len(closed_paths(k4, 0, 3)) == 6


def test_closed_paths_budget(graphs):
    with pytest.raises(BudgetExceeded):
        closed_paths(graphs["petersen"], 0, 10, budget=100)


def test_path_count_matches_matrix_power(graphs):
    for g in graphs.values():
        A = g.adjacency_matrix(dtype=np.int64, sparse=False)
        for m in range(1, 7):
            Am = np.linalg.matrix_power(A, m)
            for x in range(g.vertex_count):
                assert len(closed_paths(g, x, m)) == Am[x, x]


def test_path_stats_examples():
    s = path_stats((0, 1, 0))
    assert (s.bc, s.cbc) == (1, 2)
    s = path_stats((0, 1, 2, 3, 0))
    assert (s.bc, s.cbc, s.primitive, s.has_tail) == (0, 0, True, False)
    s = path_stats((0, 1, 0, 1, 0))
    assert not s.primitive and s.ell == 2


def test_tail_flag():
    # first step retraced by the last one
    assert path_stats((0, 1, 2, 3, 1, 0)).has_tail
    assert not path_stats((0, 1, 2, 0)).has_tail


def test_brute_counts_examples(graphs):
    N, _ = brute_counts(graphs["C4"], 4, 0)
    assert N == pytest.approx(2)
    for u in (0.3, 0.5 + 0.1j):
        _, t2 = brute_counts(graphs["K4"], 2, u)
        assert t2 == pytest.approx(3 * u)
    for g in graphs.values():
        assert brute_counts(g, 1, 0.7)[1] == 0


def test_class_examples(graphs):
    k4, c4 = graphs["K4"], graphs["C4"]
    triangles = [c for c in primitive_cycle_classes(k4, 3) if c.length == 3]
    assert len(triangles) == 8
    four = [c for c in primitive_cycle_classes(c4, 4) if c.length == 4 and c.cbc == 0]
    assert len(four) == 2 and all(c.mu == 0.25 for c in four)
    assert primitive_cycle_classes(k4, 1) == []


def test_canonical_representative_is_least_rotation(graphs):
    for c in cycle_classes(graphs["petersen"], 5):
        rots = [c.vertices[k:] + c.vertices[:k] for k in range(len(c.vertices))]
        assert c.vertices == min(rots)
        assert c.length % c.ell == 0


def test_class_sum_equals_brute_counts(graphs):
    for g in graphs.values():
        for m in range(1, 9):
            for u in (0.0, 0.4, 0.2 + 0.3j):
                N, _ = brute_counts(g, m, u)
                s = sum(c.mu * c.ell * complex(u) ** c.cbc for c in cycle_classes(g, m))
                assert abs(N - s) <= 1e-12 * max(1.0, abs(N))


def test_euler_product_examples(graphs, contexts):
    assert euler_product(graphs["C4"], 8, 0, 0) == 1
    z = 0.3
    assert euler_product(graphs["C4"], 12, z, 0) == pytest.approx((1 - z ** 4) ** -0.5, abs=1e-6)
    series = zeta_eval(log_zeta_series(contexts["K4"], 0, 30), 0.1).value
    assert euler_product(graphs["K4"], 10, 0.1, 0) == pytest.approx(series, abs=1e-6)
    with pytest.raises(DomainError):
        euler_product(graphs["K4"], 6, 0.5, 0)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["C4", "C5", "K4", "petersen"]), st.integers(1, 8))
def test_cbc_minus_bc_is_tail_indicator(graphs, name, m):
    g = graphs[name]
    for x in range(min(g.vertex_count, 3)):
        for p in closed_paths(g, x, m):
            s = path_stats(p)
            # the only extra cyclic bump is the seam one, i.e. the tail
            assert s.cbc - s.bc == int(s.has_tail)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["C4", "K4", "petersen"]), st.integers(2, 8))
def test_tail_removal_shortens_by_two(graphs, name, m):
    g = graphs[name]
    for p in closed_paths(g, 0, m):
        v = p.vertices
        if not path_stats(p).has_tail:
            continue
        # strip one tail pair: the new base is v_1
        reduced = v[1:-1]
        assert reduced[0] == reduced[-1] and len(reduced) - 1 == m - 2


def test_bound_on_tails(contexts):
    from graphzeta.operators import alpha_bound, tn_sequence
    for ctx in contexts.values():
        for u in (0, 0.5, 1, 0.3 + 0.2j):
            a = alpha_bound(ctx.d, u).alpha
            t = tn_sequence(ctx, u, 12).t
            for m in range(1, 13):
                assert abs(t[m]) <= 4 * m * a ** m
    assert math.isfinite(a)
