import math

import numpy as np
import pytest

from hurwitz.errors import PolarSingularity
from hurwitz.opcalc import (
    DiffStrategy,
    OscillatorParams,
    apply_euler_op,
    apply_T,
    casimir_residual,
    commutator_residual,
    identity_residual,
    oscillator_apply,
    radial_duality_residual,
    xi_laplacian,
)
from hurwitz.separation import wigner
from hurwitz.transform import CASE_A, CASE_B, EulerAngles

rng = np.random.default_rng(11)
D = DiffStrategy()
D3 = DiffStrategy(step=1e-3)


def random_xi(case=CASE_A, floor=0.15):
    while True:
        xi = (rng.standard_normal(4) + 1j * rng.standard_normal(4)) / 2.0
        ia, ib = case.pair
        if min(abs(xi[ia]), abs(xi[ib])) > floor * np.linalg.norm(xi):
            return xi


def random_angles(margin=0.3):
    return EulerAngles(
        rng.uniform(0, 2 * math.pi),
        rng.uniform(0, 2 * math.pi),
        rng.uniform(margin, math.pi - margin),
    )


def trig_field():
    c = rng.uniform(0.2, 0.5, 3)
    n = rng.integers(-2, 3, (3, 3))
    delta = rng.uniform(0, 2 * math.pi, 3)

    def g(phi):
        v = phi.as_array()
        return 1.0 + sum(c[j] * math.cos(float(n[j] @ v) + delta[j]) for j in range(3))

    return g


# --- complex-space generator -------------------------------------------------

def test_phase_euler_op_on_monomial():
    xi = random_xi()
    got = apply_T(1, lambda z: z[0], xi, D)
    assert abs(got - 0.5 * xi[0]) < 1e-9


def test_phase_euler_op_kills_norm_and_constants():
    xi = random_xi()
    assert abs(apply_T(1, lambda z: np.real(z @ z.conj()), xi, D)) < 1e-9
    assert abs(apply_T(1, lambda z: 3.7 + 0j, xi, D)) < 1e-12


def test_second_and_third_generators_kill_base_functions():
    # every Hermitian-form coordinate is annihilated by all three
    from hurwitz.transform import forward

    xi = random_xi()
    for k in (1, 2, 3):
        for lam in range(5):
            val = apply_T(k, lambda z, _l=lam: forward(z).x[_l], xi, D)
            assert abs(val) < 1e-8


# --- angle-chart generators ---------------------------------------------------

def test_plane_wave_eigenfunctions():
    phi = random_angles()
    g1 = lambda p: np.exp(3j * p.phi1)
    assert abs(apply_euler_op("T1", g1, phi, D) - 3 * g1(phi)) < 1e-9
    g2 = lambda p: np.exp(-2j * p.phi2)
    assert abs(apply_euler_op("Q1", g2, phi, D) + 2 * g2(phi)) < 1e-9


def test_polar_singularity_raised_for_every_operator():
    phi = EulerAngles(0.3, 0.8, 0.0)
    for which in ("T1", "T2", "T3", "Q1", "Q2", "Q3"):
        with pytest.raises(PolarSingularity):
            apply_euler_op(which, lambda p: 1.0, phi, D)


@pytest.mark.parametrize(
    "a,b,c", [("T1", "T2", "T3"), ("T2", "T3", "T1"), ("T3", "T1", "T2")]
)
def test_left_triple_closure(a, b, c):
    worst = 0.0
    for _ in range(10):
        worst = max(
            worst,
            commutator_residual(a, b, (1j, c), trig_field(), random_angles(), D3),
        )
    assert worst < 1e-5


@pytest.mark.parametrize(
    "a,b,c", [("Q1", "Q2", "Q3"), ("Q2", "Q3", "Q1"), ("Q3", "Q1", "Q2")]
)
def test_right_triple_closure(a, b, c):
    worst = 0.0
    for _ in range(10):
        worst = max(
            worst,
            commutator_residual(a, b, (1j, c), trig_field(), random_angles(), D3),
        )
    assert worst < 1e-5


def test_left_and_right_triples_commute():
    f = trig_field()
    phi = random_angles()
    for ti in ("T1", "T2", "T3"):
        for qj in ("Q1", "Q2", "Q3"):
            assert commutator_residual(ti, qj, (0.0, None), f, phi, D3) < 1e-5


def test_shared_casimir_on_basis_elements():
    for J, q, p in ((1, 1, 0), (2, -1, 2), (1, 0, -1)):
        f = lambda ph: wigner(J, q, p, ph)
        assert casimir_residual(f, random_angles(), D3) < 1e-4


# --- cross-picture identities ---------------------------------------------------

@pytest.mark.parametrize("case", [CASE_A, CASE_B], ids=["A", "B"])
def test_phase_constraint(case):
    worst = 0.0
    for _ in range(10):
        worst = max(
            worst,
            identity_residual("phase_constraint", case, random_xi(case), None, D),
        )
    assert worst < 1e-6


def test_phase_constraint_insensitive_to_offsets():
    offsets = (
        lambda m: 0.4 * math.sin(m[0, 0].real - m[1, 1].real),
        lambda m: 0.3 * math.cos(m[2, 2].real),
        lambda m: 0.2 * math.sin(m[0, 1].real),
    )
    case = CASE_A.with_offsets(offsets)
    worst = 0.0
    for _ in range(10):
        worst = max(
            worst,
            identity_residual("phase_constraint", case, random_xi(CASE_A), None, D),
        )
    assert worst < 1e-6


def field_gaussian(x, phi):
    return (
        math.exp(-0.35 * float(x @ x))
        * (1 + 0.2 * x[0] - 0.1 * x[3])
        * (1 + 0.4 * math.cos(phi.phi1 + phi.phi2) + 0.3 * math.sin(phi.phi2 - phi.phi3))
    )


def field_poly(x, phi):
    return (1 + 0.3 * x[1] - 0.2 * x[4] + 0.1 * x[0] * x[2]) * (
        1 + 0.5 * math.cos(phi.phi1) + 0.2 * math.sin(2 * phi.phi2 + phi.phi3)
    )


@pytest.mark.parametrize("case", [CASE_A, CASE_B], ids=["A", "B"])
@pytest.mark.parametrize(
    "which", ["derivative_split", "momentum_equivalence", "laplacian_split"]
)
def test_cross_picture_identities(case, which):
    worst = 0.0
    for f in (field_gaussian, field_poly):
        for _ in range(3):
            worst = max(
                worst, identity_residual(which, case, random_xi(case), f, D)
            )
    assert worst < 1e-4


def test_derivative_split_constant_field():
    res = identity_residual(
        "derivative_split", CASE_A, random_xi(), lambda x, p: 2.5, D
    )
    assert res < 1e-11


def test_laplacian_split_on_radial_gaussian():
    # the pullback of exp(-|xi|^2) is the angle-independent field exp(-r)
    radial = lambda x, p: math.exp(-float(np.linalg.norm(x)))
    worst = 0.0
    for case in (CASE_A, CASE_B):
        for _ in range(3):
            worst = max(
                worst,
                identity_residual("laplacian_split", case, random_xi(case), radial, D),
            )
    assert worst < 1e-4


def test_identity_residuals_shrink_at_fourth_order():
    xi = np.array([0.8 + 0.2j, 0.6 - 0.4j, 0.3 + 0.5j, -0.4 + 0.3j])
    ratios = []
    for which, h in (
        ("phase_constraint", 0.05),
        ("derivative_split", 0.04),
        ("laplacian_split", 0.08),
    ):
        big = identity_residual(
            which, CASE_A, xi, field_gaussian, DiffStrategy(step=h, step2=h)
        )
        small = identity_residual(
            which, CASE_A, xi, field_gaussian, DiffStrategy(step=h / 2, step2=h / 2)
        )
        ratios.append(big / small)
    assert min(ratios) >= 8.0


# --- oscillator ----------------------------------------------------------------

def test_gaussian_eigenfunction_all_frequencies():
    for omega in (0.5, 1.0, 2.0):
        p = OscillatorParams.from_omega(omega)
        f = lambda z: np.exp(-omega * np.real(z @ z.conj()))
        for _ in range(5):
            xi = random_xi(floor=0.0)
            got = oscillator_apply(p, f, xi, D)
            assert abs(got - p.Z * f(xi)) / abs(f(xi)) < 1e-6


def test_wirtinger_convention_matches_analytic_gaussian():
    # independent oracle for the mixed second derivative: the Gaussian obeys
    # sum_s d^2 f / dxi dxi* = (-4 w + w^2 |xi|^2) f
    omega = 1.3
    f = lambda z: np.exp(-omega * np.real(z @ z.conj()))
    xi = random_xi(floor=0.0)
    lap = xi_laplacian(f, xi, D)
    r = float(np.real(xi @ xi.conj()))
    assert abs(lap - (-4 * omega + omega**2 * r) * f(xi)) < 1e-6


def test_constant_field_sees_potential_only():
    p = OscillatorParams.from_omega(1.5)
    xi = random_xi(floor=0.0)
    r = float(np.real(xi @ xi.conj()))
    got = oscillator_apply(p, lambda z: 1.0, xi, D)
    assert abs(got - 0.5 * p.omega**2 * r) < 1e-7


def test_radial_duality_with_independent_laplacian_oracle():
    from hurwitz.opcalc import second_derivative

    for omega in (0.5, 1.0, 2.0):
        p = OscillatorParams.from_omega(omega)
        x = rng.standard_normal(5)
        x *= rng.uniform(0.9, 1.8) / np.linalg.norm(x)
        r = float(np.linalg.norm(x))
        # oracle: the radial form of the 5-axis Laplacian on exp(-w r)
        lap5 = 0.0
        psi = lambda y: math.exp(-omega * float(np.linalg.norm(y)))
        for lam in range(5):
            e = np.zeros(5)
            e[lam] = 1.0
            lap5 += second_derivative(lambda t: psi(x + t * e), 1e-4, 4)
        analytic = (omega**2 - 4 * omega / r) * psi(x)
        assert abs(lap5 - analytic) / abs(analytic) < 1e-6
        assert radial_duality_residual(p, x, D) < 1e-6


def test_energy_frequency_relation():
    p = OscillatorParams.from_omega(2.0)
    assert p.E == -2.0
    assert p.Z == 4.0
    with pytest.raises(ValueError):
        OscillatorParams.from_omega(-1.0)
