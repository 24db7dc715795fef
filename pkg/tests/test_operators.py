import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from graphzeta.builders import LATTICES, gasket_exhaustion, periodic_lattice
from graphzeta.cycles import brute_counts
from graphzeta.errors import WindowTooSmall
from graphzeta.operators import (
    OperatorWindow,
    a_sequence,
    alpha_bound,
    b_sequence,
    richardson_limit,
    self_similar_estimate,
    tn_sequence,
    trace,
)

complexes = st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)


def test_alpha_examples():
    b = alpha_bound(3, 0)
    assert b.M == 1 and b.alpha == pytest.approx((3 + math.sqrt(21)) / 2)
    assert alpha_bound(2, 1).alpha == pytest.approx((2 + math.sqrt(12)) / 2)
    assert alpha_bound(5, 0.5).M == 1


@settings(max_examples=50)
@given(st.integers(1, 8), complexes)
def test_alpha_invariants(d, u):
    b = alpha_bound(d, u)
    assert b.M == max(abs(u), abs(1 - u), 1)
    assert b.alpha > d


def test_trace_examples(contexts, z_lattice):
    k4 = contexts["K4"]
    eye = OperatorWindow(sp.identity(4, format="csr"), 0)
    assert trace(k4, eye) == 1
    qmi = OperatorWindow(sp.diags(k4.degrees - 2.0, format="csr"), 0)
    assert trace(k4, qmi) == 1
    A2 = OperatorWindow((z_lattice.adjacency() @ z_lattice.adjacency()).tocsr(), 2)
    assert trace(z_lattice, A2) == 2


def test_window_too_small():
    ctx = periodic_lattice(LATTICES["Z"], 3)
    with pytest.raises(WindowTooSmall):
        a_sequence(ctx, 0, 5)


def test_a2_diagonal(contexts, z_lattice):
    for ctx in [*contexts.values(), z_lattice]:
        for u in (0.0, 0.3, 1 + 1j):
            A2 = a_sequence(ctx, u, 2)[2].diagonal()
            assert np.allclose(A2[ctx.diag_index], ctx.degrees[ctx.diag_index] * u)


def test_u_one_gives_powers_exactly(graphs, contexts):
    for name, ctx in contexts.items():
        A = graphs[name].adjacency_matrix(dtype=np.int64, sparse=False)
        seq = a_sequence(ctx, 1, 12)
        for m, w in enumerate(seq):
            assert w.matrix.dtype.kind == "i"
            assert np.array_equal(w.toarray(), np.linalg.matrix_power(A, m))


def test_c4_nonbacktracking(contexts):
    assert np.all(a_sequence(contexts["C4"], 0, 4)[4].diagonal() == 2)
    seq = tn_sequence(contexts["C4"], 0, 4)
    assert np.allclose(seq.N[1:], [0, 0, 0, 2])


def test_tn_examples(contexts, z_lattice):
    for u in (0.2, 0.7 - 0.1j):
        seq = tn_sequence(contexts["K4"], u, 4)
        assert seq.t[1] == 0 and seq.t[3] == 0
        assert seq.t[2] == pytest.approx(3 * u)
        assert seq.N[2] == pytest.approx(3 * u * u)
        assert tn_sequence(z_lattice, u, 4).N[2] == pytest.approx(2 * u * u)


def test_tn_matches_brute_force(graphs, contexts):
    for name in ("C5", "K4"):
        for u in (0.0, 0.6, 0.1 + 0.4j):
            seq = tn_sequence(contexts[name], u, 8)
            for m in range(1, 9):
                N, t = brute_counts(graphs[name], m, u)
                assert seq.N[m] == pytest.approx(N, abs=1e-10)
                assert seq.t[m] == pytest.approx(t, abs=1e-10)


def test_b_sequence_examples(contexts):
    k4 = contexts["K4"]
    B = b_sequence(k4, 0, 3)
    assert np.array_equal(B[1].toarray(), k4.adjacency().toarray())
    assert trace(k4, B[3]) == pytest.approx(6)
    assert trace(k4, B[2]) == pytest.approx(-1)
    b_sequence(contexts["petersen"], 1, 8)  # defining sum, no division by 1 - u


def test_pencil_identity(contexts):
    for ctx in contexts.values():
        for u in (0.0, 0.5, 0.2 + 0.3j):
            M = 10
            A = [w.toarray().astype(complex) for w in a_sequence(ctx, u, M)]
            adj = ctx.adjacency().toarray()
            n = adj.shape[0]
            c2 = (1 - u) * (np.diag(ctx.q_diag()) + u * np.eye(n))
            for k in range(M + 1):
                prod = A[k].copy()
                if k >= 1:
                    prod -= A[k - 1] @ adj
                if k >= 2:
                    prod += A[k - 2] @ c2
                expected = {0: np.eye(n), 2: -(1 - u) ** 2 * np.eye(n)}.get(k, 0 * prod)
                assert np.allclose(prod, expected, atol=1e-9)


def test_norm_bound(contexts):
    for ctx in contexts.values():
        for u in (0, 0.5, 1, 0.3 + 0.2j, -1):
            a = alpha_bound(ctx.d, u).alpha
            for m, w in enumerate(a_sequence(ctx, u, 12)):
                assert np.linalg.norm(w.toarray(), 2) <= a ** m * (1 + 1e-12)


def test_window_independence():
    small = periodic_lattice(LATTICES["ladder"], 7)
    big = periodic_lattice(LATTICES["ladder"], 10)
    for u in (0.0, 0.4 + 0.1j):
        a = tn_sequence(small, u, 6).N
        b = tn_sequence(big, u, 6).N
        assert np.allclose(a, b, atol=1e-12)


def test_self_similar_cauchy():
    for u in (0, 0.5):
        for m in range(2, 7):
            diffs = []
            for n in range(2, 7):
                _, delta = self_similar_estimate(
                    gasket_exhaustion(n + 1), lambda c: trace(c, a_sequence(c, u, m)[m]))
                diffs.append(abs(delta))
            # identically zero differences (e.g. u = 0, m = 2) count as decreasing
            assert all(b < a or a == b == 0 for a, b in zip(diffs, diffs[1:]))


def test_richardson_exact_on_geometric_errors():
    vals = [5 + 2 * 3.0 ** -n + 7 * 9.0 ** -n for n in range(4, 7)]
    assert richardson_limit(vals, 3, 2) == pytest.approx(5, abs=1e-12)
