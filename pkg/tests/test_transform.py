import math

import numpy as np
import pytest

from hurwitz.errors import DegenerateFiber, SectionFailed, SingularFiber
from hurwitz.transform import (
    CASE_A,
    CASE_B,
    EulerAngles,
    extra_angles,
    fiber_section,
    forward,
    forward_octet,
    resolve_convention,
)

rng = np.random.default_rng(7)


def random_xi(case=CASE_A, floor=0.15):
    while True:
        xi = (rng.standard_normal(4) + 1j * rng.standard_normal(4)) / 2.0
        ia, ib = case.pair
        if min(abs(xi[ia]), abs(xi[ib])) > floor * np.linalg.norm(xi):
            return xi


def test_forward_unit_first_axis():
    pt = forward([1, 0, 0, 0])
    assert np.allclose(pt.x, [0, 0, 0, 0, 1], atol=0)
    assert pt.r == 1.0


def test_norm_identity_random():
    for _ in range(200):
        xi = (rng.standard_normal(4) + 1j * rng.standard_normal(4)) / 2.0
        pt = forward(xi)
        nrm = float(np.real(xi @ xi.conj()))
        assert abs(pt.r - nrm) < 1e-12 * max(nrm, 1e-3)


def test_quadratic_homogeneity():
    xi = random_xi()
    for c in (0.5, 2.0, -1.3):
        assert np.abs(forward(c * xi).x - c * c * forward(xi).x).max() < 1e-12


def test_octet_basis_vector_and_origin():
    assert np.allclose(forward_octet([1, 0, 0, 0, 0, 0, 0, 0]).x, [1, 0, 0, 0, 0])
    assert np.allclose(forward_octet(np.zeros(8)).x, np.zeros(5))


def test_octet_norm_preservation():
    for _ in range(200):
        u = rng.standard_normal(8)
        pt = forward_octet(u)
        assert abs(pt.r - u @ u) < 1e-12 * (u @ u)


def test_octet_third_axis_variant_breaks_norm():
    # swapping the u2 u5 term for u7 u5 (the nearest alternative reading of
    # the historical display) destroys the norm identity; this pins down
    # the coefficient choice used in forward_octet
    def variant(u):
        u1, u2, u3, u4, u5, u6, u7, u8 = u
        x = forward_octet(u).x.copy()
        x[2] = 2.0 * (u1 * u6 - u7 * u5 + u3 * u8 - u4 * u7)
        return x

    bad = 0.0
    for _ in range(50):
        u = rng.standard_normal(8)
        x = variant(u)
        bad = max(bad, abs(np.linalg.norm(x) - u @ u) / (u @ u))
    assert bad > 1e-3


def test_convention_witness():
    conv = resolve_convention()
    u = rng.standard_normal((1000, 8))
    assert conv.residual(u) < 1e-12
    assert sorted(conv.axis_perm) == [0, 1, 2, 3, 4]
    assert set(conv.axis_sign) <= {-1, 1}
    # pairs cover all eight coordinates exactly once
    assert sorted(conv.re_idx + conv.im_idx) == list(range(8))


def test_convention_deterministic():
    a = resolve_convention()
    b = resolve_convention()
    assert a == b


def test_extra_angles_equal_moduli_zero_phases():
    for c in (1.0, 0.3, 2.7):
        phi = extra_angles(np.array([c, c, 0, 0], dtype=complex), CASE_A)
        assert phi.phi1 == pytest.approx(0.0, abs=1e-15)
        assert phi.phi2 == pytest.approx(0.0, abs=1e-15)
        assert phi.phi3 == pytest.approx(math.pi / 2, abs=1e-15)


def test_extra_angles_pure_phases():
    for alpha, beta in ((0.4, 1.9), (5.0, 2.2), (3.3, 4.4)):
        xi = np.array([np.exp(1j * alpha), np.exp(1j * beta), 0.2, 0.1])
        phi = extra_angles(xi, CASE_A)
        assert phi.phi1 == pytest.approx((alpha + beta) % (2 * math.pi), abs=1e-12)
        assert phi.phi2 == pytest.approx((alpha - beta) % (2 * math.pi), abs=1e-12)


def test_extra_angles_degenerate_component():
    with pytest.raises(DegenerateFiber):
        extra_angles(np.array([1.0, 0.0, 1.0, 1.0], dtype=complex), CASE_A)
    with pytest.raises(DegenerateFiber):
        extra_angles(np.array([1.0, 1.0, 0.0, 1.0], dtype=complex), CASE_B)


def test_case_b_uses_second_pair():
    xi = np.array([0.2, 0.1, np.exp(0.7j), np.exp(0.2j)])
    phi = extra_angles(xi, CASE_B)
    assert phi.phi1 == pytest.approx(0.9, abs=1e-12)
    assert phi.phi2 == pytest.approx(0.5, abs=1e-12)


def test_offsets_shift_angles():
    xi = random_xi()
    base = extra_angles(xi, CASE_A)
    shifted = extra_angles(
        xi, CASE_A.with_offsets((lambda m: 0.3, lambda m: -0.2, lambda m: 0.1))
    )
    assert shifted.phi1 == pytest.approx((base.phi1 + 0.3) % (2 * math.pi), abs=1e-12)
    assert shifted.phi2 == pytest.approx((base.phi2 - 0.2) % (2 * math.pi), abs=1e-12)
    assert shifted.phi3 == pytest.approx(base.phi3 + 0.1, abs=1e-12)


def test_unit_phases_act_on_angles_only():
    # multiplying the angle pair by unit phases shifts phi1/phi2 by the
    # sum/difference, keeps phi3, and leaves the radius and the diagonal
    # axis untouched; the transverse components rotate within their plane
    xi = random_xi()
    base_pt = forward(xi)
    base_phi = extra_angles(xi, CASE_A)
    for alpha, beta in ((0.7, 1.3), (2.9, 5.1)):
        rotated = xi.copy()
        rotated[0] *= np.exp(1j * alpha)
        rotated[1] *= np.exp(1j * beta)
        pt = forward(rotated)
        phi = extra_angles(rotated, CASE_A)
        assert phi.phi1 == pytest.approx(
            (base_phi.phi1 + alpha + beta) % (2 * math.pi), abs=1e-12
        )
        assert phi.phi2 == pytest.approx(
            (base_phi.phi2 + alpha - beta) % (2 * math.pi), abs=1e-12
        )
        assert phi.phi3 == pytest.approx(base_phi.phi3, abs=1e-12)
        assert pt.r == pytest.approx(base_pt.r, abs=1e-12)
        assert pt.x[4] == pytest.approx(base_pt.x[4], abs=1e-12)
        # consistency closed via the section rather than a symmetry claim
        xi2 = fiber_section(pt, phi, CASE_A)
        assert np.abs(forward(xi2).x - pt.x).max() < 1e-10


@pytest.mark.parametrize("case", [CASE_A, CASE_B], ids=["A", "B"])
def test_section_round_trip(case):
    for _ in range(30):
        xi = random_xi(case)
        pt = forward(xi)
        phi = extra_angles(xi, case)
        xi2 = fiber_section(pt, phi, case)
        assert np.abs(forward(xi2).x - pt.x).max() < 1e-10 * pt.r
        phi2 = extra_angles(xi2, case)
        for a, b in ((phi.phi1, phi2.phi1), (phi.phi2, phi2.phi2)):
            d = abs(a - b) % (2 * math.pi)
            assert min(d, 2 * math.pi - d) < 1e-10
        assert abs(phi.phi3 - phi2.phi3) < 1e-10


def test_section_singular_half_axis():
    with pytest.raises(SingularFiber):
        fiber_section(np.array([0, 0, 0, 0, -1.0]), EulerAngles(0.1, 0.2, 1.0), CASE_A)
    with pytest.raises(SingularFiber):
        fiber_section(np.array([0, 0, 0, 0, 1.0]), EulerAngles(0.1, 0.2, 1.0), CASE_B)


def test_section_reproduces_fiber_of_known_point():
    xi = np.array([1.0, 1.0, 1.0, 1.0], dtype=complex)
    pt = forward(xi)
    phi = extra_angles(xi, CASE_A)
    xi2 = fiber_section(pt, phi, CASE_A)
    assert np.abs(forward(xi2).x - pt.x).max() < 1e-12


def test_section_rejects_offset_cases():
    case = CASE_A.with_offsets((lambda m: 0.1, lambda m: 0.0, lambda m: 0.0))
    with pytest.raises(SectionFailed):
        fiber_section(np.array([0, 0, 0, 0, 1.0]), EulerAngles(0, 0, 1.0), case)


def test_section_from_arbitrary_base_and_angles():
    for _ in range(20):
        v = rng.standard_normal(5)
        x = v / np.linalg.norm(v) * rng.uniform(0.5, 2.0)
        if np.linalg.norm(x) + x[4] < 0.2 * np.linalg.norm(x):
            continue
        phi = EulerAngles(
            rng.uniform(0, 2 * math.pi),
            rng.uniform(0, 2 * math.pi),
            rng.uniform(0.2, math.pi - 0.2),
        )
        xi = fiber_section(x, phi, CASE_A)
        assert np.abs(forward(xi).x - x).max() < 1e-10 * np.linalg.norm(x)
