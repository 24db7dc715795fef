import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphzeta.builders import LATTICES, gasket_exhaustion, periodic_lattice
from graphzeta.cycles import euler_product
from graphzeta.errors import ConvexHullViolation, DomainError, SingularPencil
from graphzeta.graph import build_graph
from graphzeta.operators import FiniteContext, alpha_bound, b_sequence, trace
from graphzeta.zeta import (
    bartholdi_pencil,
    det_tau,
    euler_characteristic,
    log_det_tau,
    log_zeta_from_determinant,
    log_zeta_series,
    nearest_pencil_zero,
    taylor_coefficients,
    verify_det_formula,
    zeta_eval,
)


@pytest.fixture(scope="module")
def edge():
    return FiniteContext(build_graph([(0, 1)]))


def test_series_examples(contexts):
    c = log_zeta_series(contexts["C4"], 0, 8).coeffs
    assert np.allclose(c, [0, 0, 0, 0, 0.5, 0, 0, 0, 0.25])
    z = periodic_lattice(LATTICES["Z"], 9)
    assert np.allclose(log_zeta_series(z, 0, 8).coeffs, 0)
    assert log_zeta_series(contexts["K4"], 0.5, 10).coeffs[2] == pytest.approx(0.375)


def test_zeta_eval_examples(graphs, contexts):
    s = log_zeta_series(contexts["C4"], 0, 60)
    assert zeta_eval(s, 0).value == 1
    v = zeta_eval(s, 0.3)
    assert v.value == pytest.approx((1 - 0.3 ** 4) ** -0.5, abs=1e-6)
    assert v.error_bound < 1e-6
    s = log_zeta_series(contexts["K4"], 0, 40)
    assert zeta_eval(s, 0.1).value == pytest.approx(euler_product(graphs["K4"], 10, 0.1, 0), abs=1e-6)
    with pytest.raises(DomainError):
        zeta_eval(s, 1 / s.alpha)


def test_det_examples(edge):
    assert det_tau(edge, np.eye(2)) == pytest.approx(1)
    assert det_tau(edge, np.diag([1.0, 4.0])) == pytest.approx(2)
    for c in (3.0, 0.5 + 0.5j):
        assert det_tau(edge, c * np.eye(2)) == pytest.approx(c)
    with pytest.raises(ConvexHullViolation):
        det_tau(edge, np.diag([1.0, -1.0]))
    # a path around the origin is fine and fixes the branch
    path = lambda t: np.diag([1.0, cmath.exp(1j * np.pi * t)])
    assert det_tau(edge, path) == pytest.approx(1j)


def test_singular_pencil(contexts):
    # z = 1/2 is a zero of I - Az + 2 z^2 on K_4 at u = 0
    with pytest.raises(SingularPencil):
        det_tau(contexts["K4"], bartholdi_pencil(0), 0.5)


def test_euler_examples(contexts, z_lattice):
    e = euler_characteristic(contexts["K4"])
    assert e.value == pytest.approx(-0.5) and e.direct == pytest.approx(-0.5)
    assert euler_characteristic(z_lattice).value == 0
    g = euler_characteristic(gasket_exhaustion(6))
    assert abs(g.value + 1) < 0.01 and g.kind == "average"


def test_verify_examples(contexts):
    assert verify_det_formula(contexts["K4"], 0, 0) < 1e-15
    assert verify_det_formula(contexts["K4"], 0, 0.1, 30) <= 1e-8
    assert verify_det_formula(contexts["petersen"], 0.3 + 0.2j, 0.05, 30) <= 1e-8
    with pytest.raises(DomainError):
        verify_det_formula(contexts["K4"], 0, 0.2)


def test_periodic_det_formula(z_lattice):
    for u in (0.0, 0.5, 0.2 + 0.1j):
        z = 0.9 / (2 * alpha_bound(2, u).alpha)
        assert verify_det_formula(periodic_lattice(LATTICES["Z"], 31), u, z, 30) < 1e-8
    ladder = periodic_lattice(LATTICES["ladder"], 31)
    assert verify_det_formula(ladder, 0.3, 0.08, 30) < 1e-8


def test_branch_consistency(contexts):
    rng = np.random.default_rng(7)
    for ctx in contexts.values():
        for _ in range(4):
            u = complex(*rng.uniform(-0.5, 0.5, 2))
            z = 0.2 * complex(*rng.uniform(-1, 1, 2))
            a = log_det_tau(ctx, bartholdi_pencil(u), z).log
            b = log_det_tau(ctx, bartholdi_pencil(u), z, method="integral").log
            assert abs(a - b) <= 1e-9


def test_trace_log_series_identity(contexts):
    M = 10
    for ctx in contexts.values():
        for u in (0.0, 0.5, 0.2 + 0.3j):
            pencil = bartholdi_pencil(u)
            r = 0.6 * min(nearest_pencil_zero(ctx, pencil), 1.0)
            coef = taylor_coefficients(lambda z: log_det_tau(ctx, pencil, z).log, M, r, 128)
            B = b_sequence(ctx, u, M, check=False)
            for m in range(1, M + 1):
                tb = trace(ctx, B[m])
                assert abs(tb + m * coef[m]) <= 1e-7 * max(1.0, abs(tb))


def test_determinant_coefficients_match_series(contexts):
    for ctx in contexts.values():
        c = log_zeta_from_determinant(ctx, 0.5, 10)
        s = log_zeta_series(ctx, 0.5, 10).coeffs
        assert np.allclose(c[1:], s[1:], atol=1e-7)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0.1, 10), min_size=3, max_size=3), st.floats(0.2, 5))
def test_fuglede_kadison_and_scaling(eigs, c):
    ctx = FiniteContext(build_graph([(0, 1), (1, 2)]))
    rng = np.random.default_rng(len(eigs))
    Qm, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    T = Qm @ np.diag(eigs) @ Qm.T
    assert det_tau(ctx, T) == pytest.approx(np.exp(np.mean(np.log(eigs))), rel=1e-9)
    assert det_tau(ctx, c * T) == pytest.approx(c * det_tau(ctx, T), rel=1e-9)
