import math

import numpy as np
import pytest

from hurwitz.gauge import a_field_closed
from hurwitz.opcalc import DiffStrategy, apply_euler_op
from hurwitz.separation import (
    axis_solution,
    build_h,
    coefficients,
    consistency_residual,
    det_bisection_roots,
    effective_terms,
    g_eval,
    ladder_apply,
    potential_columns,
    resolve_branch,
    separation_roots,
    wigner,
    wigner_d,
    wigner_d_prime,
)
from hurwitz.transform import CASE_A, CASE_B, EulerAngles

rng = np.random.default_rng(17)
D = DiffStrategy()
D3 = DiffStrategy(step=1e-3)


def random_angles(margin=0.3):
    return EulerAngles(
        rng.uniform(0, 2 * math.pi),
        rng.uniform(0, 2 * math.pi),
        rng.uniform(margin, math.pi - margin),
    )


def random_column():
    a = rng.uniform(-1.2, 1.2, 3)
    return (float(a[0]), 0.5 * (a[1] - 1j * a[2]), 0.5 * (a[1] + 1j * a[2]))


def random_x(case=CASE_A, floor=0.15, rmin=0.8, rmax=2.0):
    while True:
        v = rng.standard_normal(5)
        x = v / np.linalg.norm(v) * rng.uniform(rmin, rmax)
        r = np.linalg.norm(x)
        if r + case.axis_sign * x[4] > floor * r:
            return x


# --- angular basis ---------------------------------------------------------------

def test_spin_zero_is_constant():
    for _ in range(5):
        assert wigner(0, 0, 0, random_angles()) == pytest.approx(1.0)


def test_small_d_against_spin_one_table():
    b = 0.9
    table = {
        (1, 1): (1 + math.cos(b)) / 2,
        (1, 0): -math.sin(b) / math.sqrt(2),
        (1, -1): (1 - math.cos(b)) / 2,
        (0, 1): math.sin(b) / math.sqrt(2),
        (0, 0): math.cos(b),
        (0, -1): -math.sin(b) / math.sqrt(2),
        (-1, 1): (1 - math.cos(b)) / 2,
        (-1, 0): math.sin(b) / math.sqrt(2),
        (-1, -1): (1 + math.cos(b)) / 2,
    }
    for (q, p), val in table.items():
        assert wigner_d(1, q, p, b) == pytest.approx(val, abs=1e-14)


def test_small_d_derivative_matches_differencing():
    for J in (1, 2, 3):
        for _ in range(5):
            q = int(rng.integers(-J, J + 1))
            p = int(rng.integers(-J, J + 1))
            b = rng.uniform(0.2, math.pi - 0.2)
            fd = (wigner_d(J, q, p, b + 1e-6) - wigner_d(J, q, p, b - 1e-6)) / 2e-6
            assert wigner_d_prime(J, q, p, b) == pytest.approx(fd, abs=1e-8)


def test_eigenrelations_by_differencing():
    for J in (1, 2):
        for q in range(-J, J + 1):
            for p in range(-J, J + 1):
                f = lambda ph: wigner(J, q, p, ph)
                phi = random_angles()
                v = f(phi)
                assert abs(apply_euler_op("Q1", f, phi, D3) - q * v) < 1e-6
                assert abs(apply_euler_op("T1", f, phi, D3) - p * v) < 1e-6


def test_ladder_relations_analytic():
    worst = 0.0
    for J in (0, 1, 2):
        for q in range(-J, J + 1):
            for p in range(-J, J + 1):
                for sign in (1, -1):
                    phi = random_angles(margin=0.15)
                    lhs = ladder_apply(sign, J, q, p, phi)
                    if abs(q + sign) <= J:
                        coef = math.sqrt((J - sign * q) * (J + sign * q + 1))
                        rhs = coef * wigner(J, q + sign, p, phi)
                    else:
                        rhs = 0.0
                    worst = max(worst, abs(lhs - rhs))
    assert worst < 1e-12


def test_ladder_annihilates_extremes():
    for J in (1, 2):
        phi = random_angles()
        assert abs(ladder_apply(1, J, J, 0, phi)) < 1e-12
        assert abs(ladder_apply(-1, J, -J, 1 if J > 0 else 0, phi)) < 1e-12


# --- tridiagonal coupling matrix ---------------------------------------------------

def test_potential_column_split():
    A = np.zeros((5, 3))
    A[0] = [0.3, 0.4, -0.5]
    a1, ap, am = potential_columns(A)[0]
    assert a1 == pytest.approx(0.3)
    assert ap == pytest.approx(0.2 + 0.25j)
    assert am == pytest.approx(0.2 - 0.25j)


def test_spin_one_matrix_layout():
    a1, ap, am = 0.7, 0.2 - 0.1j, 0.2 + 0.1j
    h = build_h(1, (a1, ap, am), 0.3)
    s2 = math.sqrt(2.0)
    want = np.array(
        [
            [-0.3 - a1, s2 * am, 0],
            [s2 * ap, -0.3, s2 * am],
            [0, s2 * ap, -0.3 + a1],
        ]
    )
    assert np.abs(h - want).max() < 1e-15


def test_spin_zero_matrix():
    h = build_h(0, (0.4, 0.1 + 0.2j, 0.1 - 0.2j), 0.9)
    assert h.shape == (1, 1)
    assert h[0, 0] == pytest.approx(-0.9)


def test_diagonal_collapse_without_ladder_terms():
    h = build_h(2, (0.5, 0.0, 0.0), 0.1)
    off = h - np.diag(np.diag(h))
    assert np.abs(off).max() == 0.0
    assert np.allclose(np.diag(h), [-0.1 + m * 0.5 for m in (-2, -1, 0, 1, 2)])


def test_spin_one_root_factorization():
    for _ in range(20):
        col = random_column()
        s = math.sqrt(
            col[0] ** 2
            + (col[1] + col[2]).real ** 2
            + (1j * (col[1] - col[2])).real ** 2
        )
        roots = separation_roots(1, col)
        assert np.abs(roots - np.array([-s, 0.0, s])).max() < 1e-12


def test_roots_are_ladder_multiples_and_symmetric():
    for J in range(4):
        col = random_column()
        s = math.sqrt(
            col[0] ** 2
            + (col[1] + col[2]).real ** 2
            + (1j * (col[1] - col[2])).real ** 2
        )
        roots = separation_roots(J, col)
        assert np.abs(roots - s * np.arange(-J, J + 1)).max() < 1e-10
        assert np.abs(roots + roots[::-1]).max() < 1e-10


@pytest.mark.parametrize("J", [2, 3])
def test_bisection_oracle_agrees_with_eigensolver(J):
    for _ in range(5):
        col = random_column()
        eig = separation_roots(J, col)
        bis = det_bisection_roots(J, col)
        assert len(bis) == 2 * J + 1
        assert np.abs(eig - bis).max() < 1e-10


def test_null_vector_diagonal_case():
    g = coefficients(1, (0.5, 0.0, 0.0), 0.5)
    # root +A1 pins the top ladder component (last in ascending order)
    assert np.allclose(g, [0, 0, 1])
    g = coefficients(1, (0.5, 0.0, 0.0), -0.5)
    assert np.allclose(g, [1, 0, 0])


def test_null_vector_residuals():
    for _ in range(50):
        J = int(rng.integers(0, 4))
        col = random_column()
        roots = separation_roots(J, col)
        root = float(roots[int(rng.integers(0, 2 * J + 1))])
        g = coefficients(J, col, root)
        if g.ndim == 2:
            g = g[:, 0]
        assert np.linalg.norm(build_h(J, col, root) @ g) < 1e-10
        assert np.linalg.norm(g) == pytest.approx(1.0)


def test_spin_zero_coefficients():
    assert np.allclose(coefficients(0, (0.3, 0.1, 0.1), -0.0), [1.0])


def test_degenerate_root_returns_basis():
    basis = coefficients(1, (0.0, 0.0, 0.0), 0.0)
    assert basis.shape == (3, 3)
    assert np.abs(basis.conj().T @ basis - np.eye(3)).max() < 1e-12


def test_not_a_root_raises():
    with pytest.raises(ValueError):
        coefficients(1, (0.5, 0.0, 0.0), 0.123)


# --- per-axis solutions on the closed potential --------------------------------------

def test_angular_factor_eigenrelations():
    x = random_x()
    A = a_field_closed(x, CASE_A).A
    for J in (1, 2):
        for lam in (0, 2, 4):
            sol = axis_solution(J, A, lam, "m=1")
            G = lambda ph: g_eval(sol, 0, ph)
            for _ in range(2):
                phi = random_angles()
                gv = G(phi)
                coupled = sum(
                    A[lam, k] * apply_euler_op(f"Q{k + 1}", G, phi, D3)
                    for k in range(3)
                )
                assert abs(coupled - sol.root * gv) < 1e-4
                qsq = sum(
                    apply_euler_op(
                        f"Q{k}",
                        lambda pp: apply_euler_op(f"Q{k}", G, pp, D3),
                        phi,
                        D3,
                    )
                    for k in (1, 2, 3)
                )
                assert abs(qsq - J * (J + 1) * gv) < 1e-4


def test_plane_wave_index_preserved():
    x = random_x()
    A = a_field_closed(x, CASE_A).A
    sol = axis_solution(1, A, 1, "alternating")
    for p in (-1, 0, 1):
        phi = random_angles()
        G = lambda ph: g_eval(sol, p, ph)
        assert abs(apply_euler_op("T1", G, phi, D3) - p * G(phi)) < 1e-6


def test_spin_zero_angular_factor_constant():
    x = random_x()
    A = a_field_closed(x, CASE_A).A
    sol = axis_solution(0, A, 0, "alternating")
    vals = [g_eval(sol, 0, random_angles()) for _ in range(4)]
    assert np.abs(np.diff(vals)).max() < 1e-14


# --- effective per-axis terms -----------------------------------------------------

def test_effective_terms_at_pole():
    a, cent = effective_terms(1, np.array([0, 0, 0, 0, 1.5]), CASE_A, "alternating")
    assert np.abs(a).max() == 0.0
    assert cent == pytest.approx(1.0 / 1.5**2)


def test_effective_terms_alternating_pattern():
    x = random_x()
    r = np.linalg.norm(x)
    a, cent = effective_terms(1, x, CASE_A, "alternating")
    denom = r * (r + x[4])
    assert a[1] == pytest.approx(
        math.sqrt(x[0] ** 2 + x[2] ** 2 + x[3] ** 2) / denom, rel=1e-12
    )
    assert a[0] == pytest.approx(
        -math.sqrt(x[1] ** 2 + x[2] ** 2 + x[3] ** 2) / denom, rel=1e-12
    )
    assert a[4] == 0.0
    signs = np.sign(a[:4])
    assert list(signs) == [-1, 1, -1, 1]


def test_effective_terms_spin_zero():
    x = random_x()
    a, cent = effective_terms(0, x, CASE_A, "alternating")
    assert np.abs(a).max() == 0.0
    assert cent == 0.0


def test_branch_selectors():
    sel = resolve_branch("alternating")
    assert [sel(2, lam) for lam in range(5)] == [-2, 2, -2, 2, 0]
    sel = resolve_branch("m=-1")
    assert sel(3, 0) == -1
    with pytest.raises(ValueError):
        resolve_branch("nope")


# --- operator-level separation consistency ------------------------------------------

def test_consistency_spin_zero():
    psi = lambda y: math.exp(-float(np.linalg.norm(y)))
    for case in (CASE_A, CASE_B):
        x = random_x(case)
        res = consistency_residual(0, 0, psi, x, case, "alternating", D)
        assert res < 1e-4


def test_consistency_spin_one():
    psi = lambda y: math.exp(-float(np.linalg.norm(y)))
    for case in (CASE_A, CASE_B):
        for _ in range(2):
            x = random_x(case)
            res = consistency_residual(1, 0, psi, x, case, "alternating", D)
            assert res < 1e-3


def test_consistency_zero_field():
    x = random_x()
    res = consistency_residual(1, 0, lambda y: 0.0, x, CASE_A, "alternating", D)
    assert res == 0.0


def test_consistency_shrinks_under_refinement():
    psi = lambda y: math.exp(-float(np.linalg.norm(y)))
    x = np.array([0.5, -0.6, 0.3, 0.4, 0.35])
    res = [
        consistency_residual(
            1, 0, psi, x, CASE_A, "alternating",
            DiffStrategy(step=h, step2=h), n_angles=2,
        )
        for h in (0.04, 0.02)
    ]
    assert res[1] < 0.5 * res[0]
