"""Numerical differential-operator engine.

Evaluates the two su(2) rotor triples (left and right generators on the
fiber angles), the momentum operator, and the oscillator Hamiltonian on
sample scalar fields, entirely through central finite differences, and
measures residuals of the operator identities tying the complex-space and
base-space pictures together.

Derivatives with respect to a complex coordinate use the Wirtinger
convention throughout:

    d/dxi  = (d/dRe - i d/dIm) / 2,      d/dxi* = (d/dRe + i d/dIm) / 2.

Fields over the angle chart are treated as functions on R^3 (finite
differences displace angles without folding), so angle-periodic test
fields are expected.  Phase-type fiber functions are differentiated via
their unit-modulus exponentials, which keeps every stencil away from
branch cuts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import PolarSingularity
from .transform import (
    GAMMA,
    AngleCase,
    EulerAngles,
    RPoint,
    extra_angles,
    forward,
    invariant_products,
)

__all__ = [
    "DiffStrategy",
    "OscillatorParams",
    "first_derivative",
    "second_derivative",
    "wirtinger_gradients",
    "xi_laplacian",
    "fiber_phase_gradients",
    "apply_T",
    "apply_euler_op",
    "commutator_residual",
    "casimir_residual",
    "identity_residual",
    "oscillator_apply",
    "radial_duality_residual",
    "pullback",
    "EULER_OPS",
]


@dataclass(frozen=True)
class DiffStrategy:
    """Finite-difference controls.

    ``step`` drives first derivatives, ``step2`` second derivatives and
    nested applications (where the larger step keeps the roundoff noise of
    the inner evaluation from being amplified by the outer stencil).
    """

    step: float = 1e-5
    order: int = 4
    step2: float = 1e-4

    def __post_init__(self):
        if self.step <= 0.0 or self.step2 <= 0.0:
            raise ValueError("finite-difference steps must be positive")
        if self.order not in (2, 4):
            raise ValueError("order must be 2 or 4")

    def nested(self) -> "DiffStrategy":
        return replace(self, step=self.step2)


@dataclass(frozen=True)
class OscillatorParams:
    """Frequency, coupling strength and energy of the oscillator side."""

    omega: float
    Z: float
    E: float

    @classmethod
    def from_omega(cls, omega: float) -> "OscillatorParams":
        if omega <= 0.0:
            raise ValueError("omega must be positive")
        return cls(omega=omega, Z=2.0 * omega, E=-0.5 * omega * omega)


def first_derivative(f: Callable[[float], complex], h: float, order: int) -> complex:
    # symmetric grouping keeps the stencil exact on constants
    if order == 4:
        return ((f(-2 * h) - f(2 * h)) + 8.0 * (f(h) - f(-h))) / (12.0 * h)
    return (f(h) - f(-h)) / (2.0 * h)


def second_derivative(f: Callable[[float], complex], h: float, order: int) -> complex:
    if order == 4:
        return (
            -(f(-2 * h) + f(2 * h)) + 16.0 * (f(-h) + f(h)) - 30.0 * f(0.0)
        ) / (12.0 * h * h)
    return ((f(-h) + f(h)) - 2.0 * f(0.0)) / (h * h)


def wirtinger_gradients(
    field: Callable[[np.ndarray], complex], xi: np.ndarray, d: DiffStrategy
) -> tuple[np.ndarray, np.ndarray]:
    """Holomorphic and antiholomorphic gradients of a complex-space field."""
    xi = np.asarray(xi, dtype=complex)
    dholo = np.zeros(4, dtype=complex)
    danti = np.zeros(4, dtype=complex)
    for s in range(4):
        e = np.zeros(4, dtype=complex)
        e[s] = 1.0
        g_re = first_derivative(lambda t: field(xi + t * e), d.step, d.order)
        g_im = first_derivative(lambda t: field(xi + 1j * t * e), d.step, d.order)
        dholo[s] = 0.5 * (g_re - 1j * g_im)
        danti[s] = 0.5 * (g_re + 1j * g_im)
    return dholo, danti


def xi_laplacian(
    field: Callable[[np.ndarray], complex], xi: np.ndarray, d: DiffStrategy
) -> complex:
    """sum_s d^2 f / dxi_s dxi_s* via the 8 real second derivatives."""
    xi = np.asarray(xi, dtype=complex)
    total = 0.0 + 0.0j
    for s in range(4):
        e = np.zeros(4, dtype=complex)
        e[s] = 1.0
        total += second_derivative(lambda t: field(xi + t * e), d.step2, d.order)
        total += second_derivative(lambda t: field(xi + 1j * t * e), d.step2, d.order)
    return 0.25 * total


def fiber_phase_gradients(
    xi: np.ndarray, case: AngleCase, d: DiffStrategy
) -> tuple[np.ndarray, np.ndarray]:
    """Wirtinger gradients of the three angle functions at a point.

    Each angle f_k is differentiated through its unit-modulus exponential
    g_k = exp(i f_k), which is smooth wherever the fiber is non-degenerate:
    grad f_k = -i (grad g_k) / g_k.  Returns (D, Dbar) of shape (3, 4) with
    D[k, s] = df_k/dxi_s and Dbar[k, s] = df_k/dxi_s*.
    """
    xi = np.asarray(xi, dtype=complex)
    ia, ib = case.pair
    offsets = case.offsets

    def g_k(k: int) -> Callable[[np.ndarray], complex]:
        def g(z: np.ndarray) -> complex:
            a, b = z[ia], z[ib]
            if k == 0:
                val = (a / abs(a)) * (b / abs(b))
            elif k == 1:
                val = (a / abs(a)) * (np.conj(b) / abs(b))
            else:
                u, v = abs(a) ** 2, abs(b) ** 2
                val = ((u - v) + 2j * math.sqrt(u * v)) / (u + v)
            if offsets is not None:
                val *= np.exp(1j * float(offsets[k](invariant_products(z))))
            return val

        return g

    D = np.zeros((3, 4), dtype=complex)
    Dbar = np.zeros((3, 4), dtype=complex)
    for k in range(3):
        g = g_k(k)
        g0 = g(xi)
        dh, da = wirtinger_gradients(g, xi, d)
        D[k] = -1j * dh / g0
        Dbar[k] = -1j * da / g0
    return D, Dbar


# --- rotor generators -------------------------------------------------------

def apply_T(
    k: int, field: Callable[[np.ndarray], complex], xi: np.ndarray, d: DiffStrategy
) -> complex:
    """Apply the complex-space realization of the k-th left generator.

    T1 is the phase Euler operator (xi.d - xi*.d*)/2; T2 and T3 contract
    the gradients with the antisymmetric companion matrix.
    """
    xi = np.asarray(xi, dtype=complex)
    dh, da = wirtinger_gradients(field, xi, d)
    if k == 1:
        return 0.5 * (xi @ dh - xi.conj() @ da)
    w = GAMMA.gamma_tilde @ xi
    wc = np.conj(w)
    if k == 2:
        return 0.5j * (w @ da + wc @ dh)
    if k == 3:
        return 0.5 * (w @ da - wc @ dh)
    raise ValueError("k must be 1, 2 or 3")


def _t1(phi):
    return (-1j, 0.0, 0.0)


def _t2(phi):
    c1, s3 = math.cos(phi.phi1), math.sin(phi.phi3)
    return (-1j * c1 * math.cos(phi.phi3) / s3, 1j * c1 / s3, -1j * math.sin(phi.phi1))


def _t3(phi):
    s1, s3 = math.sin(phi.phi1), math.sin(phi.phi3)
    return (-1j * s1 * math.cos(phi.phi3) / s3, 1j * s1 / s3, 1j * math.cos(phi.phi1))


def _q1(phi):
    return (0.0, -1j, 0.0)


def _q2(phi):
    c2, s3 = math.cos(phi.phi2), math.sin(phi.phi3)
    return (-1j * c2 / s3, 1j * c2 * math.cos(phi.phi3) / s3, 1j * math.sin(phi.phi2))


def _q3(phi):
    s2, s3 = math.sin(phi.phi2), math.sin(phi.phi3)
    return (-1j * s2 / s3, 1j * s2 * math.cos(phi.phi3) / s3, -1j * math.cos(phi.phi2))


# Closed-form first-order coefficients of the six generators in the angle
# chart.  The left triple (T*) is the image of the right triple (Q*) under
# the involution phi1 <-> phi2, phi3 -> -phi3; both triples close with
# structure constants +i eps and commute with each other (suite-verified).
EULER_OPS = {"T1": _t1, "T2": _t2, "T3": _t3, "Q1": _q1, "Q2": _q2, "Q3": _q3}


def apply_euler_op(
    which: str,
    field: Callable[[EulerAngles], complex],
    phi: EulerAngles,
    d: DiffStrategy,
    pole_eps: float = 1e-8,
) -> complex:
    """Apply one generator to a field over the angle chart at a point."""
    if abs(math.sin(phi.phi3)) < pole_eps:
        raise PolarSingularity(f"sin(phi3) below {pole_eps:g}")
    coeffs = EULER_OPS[which](phi)
    out = 0.0 + 0.0j
    for k, c in enumerate(coeffs):
        if c == 0.0:
            continue
        der = first_derivative(
            lambda t: field(phi.shifted(k, t)), d.step, d.order
        )
        out += c * der
    return out


def commutator_residual(
    a: str,
    b: str,
    expected: tuple[complex, str | None],
    field: Callable[[EulerAngles], complex],
    phi: EulerAngles,
    d: DiffStrategy,
) -> float:
    """|([a, b] - coef*op) field| at a point, using nested applications.

    ``expected`` is (coef, op_name); op_name None means the commutator
    itself should vanish.  The nested level reuses ``step2``.
    """
    dn = d.nested()

    def ab(x: EulerAngles) -> complex:
        return apply_euler_op(a, lambda p: apply_euler_op(b, field, p, dn), x, dn)

    def ba(x: EulerAngles) -> complex:
        return apply_euler_op(b, lambda p: apply_euler_op(a, field, p, dn), x, dn)

    val = ab(phi) - ba(phi)
    coef, name = expected
    if name is not None:
        val -= coef * apply_euler_op(name, field, phi, dn)
    return abs(val)


def casimir_residual(
    field: Callable[[EulerAngles], complex], phi: EulerAngles, d: DiffStrategy
) -> float:
    """|(sum_k T_k T_k - sum_k Q_k Q_k) field| at a point."""
    dn = d.nested()

    def sq(which: str) -> complex:
        return apply_euler_op(
            which, lambda p: apply_euler_op(which, field, p, dn), phi, dn
        )

    t2 = sum(sq(f"T{k}") for k in (1, 2, 3))
    q2 = sum(sq(f"Q{k}") for k in (1, 2, 3))
    return abs(t2 - q2)


# --- identities linking the two pictures ------------------------------------

def pullback(
    field_xphi: Callable[[np.ndarray, EulerAngles], complex], case: AngleCase
) -> Callable[[np.ndarray], complex]:
    """Compose a base-space field with the map: xi -> f(x(xi), phi(xi)).

    The composition is smooth only for fields 2pi-periodic in phi1/phi2
    (the angle chart wraps); all built-in test fields satisfy this.
    """

    def g(xi: np.ndarray) -> complex:
        pt = forward(xi)
        return field_xphi(pt.x, extra_angles(xi, case))

    return g


def _x_gradient(field, x, phi, lam, d: DiffStrategy) -> complex:
    e = np.zeros(5)
    e[lam] = 1.0
    return first_derivative(lambda t: field(x + t * e, phi), d.step, d.order)


def _phi_gradient(field, x, phi, k, d: DiffStrategy) -> complex:
    return first_derivative(lambda t: field(x, phi.shifted(k, t)), d.step, d.order)


def _big_d(xi, dh, da):
    """The five contractions (gamma_l xi).Dholo + conj(gamma_l xi).Danti."""
    v = np.einsum("lst,t->ls", GAMMA.gamma, xi)
    return v @ dh + np.conj(v) @ da


def identity_residual(
    which: str,
    case: AngleCase,
    xi: np.ndarray,
    field,
    d: DiffStrategy,
) -> float:
    """Residual of one cross-picture operator identity at a point.

    which:
      "phase_constraint"     max_k |(xi.grad - xi*.grad*) f_k + 2i d_1k|
                             (field argument unused);
      "derivative_split"     both sides of the first-order split of the
                             complex derivative into base + fiber parts,
                             with the fiber coefficients from the numeric
                             pipeline; relative, max over the five axes;
      "momentum_equivalence" the momentum operator written with the
                             closed-form potential and right generators
                             against its complex-space form; relative;
      "laplacian_split"      the second-order split: r p^2 + Casimir/r
                             against minus the complex Laplacian; relative.

    ``field`` is a field over (x, angles) for the last three identities.
    """
    from .gauge import a_field_closed, a_tilde  # deferred: gauge imports opcalc

    xi = np.asarray(xi, dtype=complex)
    if which == "phase_constraint":
        D, Dbar = fiber_phase_gradients(xi, case, d)
        lhs = xi @ D.T - xi.conj() @ Dbar.T
        target = np.array([-2j, 0.0, 0.0])
        return float(np.abs(lhs - target).max())

    pt = forward(xi)
    phi = extra_angles(xi, case)
    g = pullback(field, case)

    if which == "derivative_split":
        dh, da = wirtinger_gradients(g, xi, d)
        lhs = 0.5 * _big_d(xi, dh, da)
        at = a_tilde(xi, case, d)
        xgrad = np.array([_x_gradient(field, pt.x, phi, lam, d) for lam in range(5)])
        pgrad = np.array([_phi_gradient(field, pt.x, phi, k, d) for k in range(3)])
        rhs = pt.r * (xgrad + at @ pgrad)
        return _rel_max(lhs, rhs)

    if which == "momentum_equivalence":
        A = a_field_closed(pt, case).A
        qf = np.array(
            [
                apply_euler_op(f"Q{k + 1}", lambda p: field(pt.x, p), phi, d)
                for k in range(3)
            ]
        )
        xgrad = np.array([_x_gradient(field, pt.x, phi, lam, d) for lam in range(5)])
        lhs = -1j * xgrad + A @ qf
        dh, da = wirtinger_gradients(g, xi, d)
        rhs = (-1j / (2.0 * pt.r)) * _big_d(xi, dh, da)
        return _rel_max(lhs, rhs)

    if which == "laplacian_split":
        dn = d.nested()
        A = a_field_closed(pt, case).A

        def p_apply(lam: int, fld, x, ph) -> complex:
            e = np.zeros(5)
            e[lam] = 1.0
            der = first_derivative(lambda t: fld(x + t * e, ph), dn.step, dn.order)
            Ax = a_field_closed(RPoint(x, float(np.linalg.norm(x))), case).A
            q = sum(
                Ax[lam, k]
                * apply_euler_op(f"Q{k + 1}", lambda p: fld(x, p), ph, dn)
                for k in range(3)
            )
            return -1j * der + q

        p_sq = sum(
            p_apply(lam, lambda x, ph, _l=lam: p_apply(_l, field, x, ph), pt.x, phi)
            for lam in range(5)
        )

        def q_sq(fld, x, ph) -> complex:
            return sum(
                apply_euler_op(
                    f"Q{k}",
                    lambda p: apply_euler_op(
                        f"Q{k}", lambda pp: fld(x, pp), p, dn
                    ),
                    ph,
                    dn,
                )
                for k in (1, 2, 3)
            )

        lhs = pt.r * p_sq + q_sq(field, pt.x, phi) / pt.r
        rhs = -xi_laplacian(g, xi, d)
        return _rel_max(lhs, rhs)

    raise ValueError(f"unknown identity {which!r}")


def _rel_max(lhs, rhs) -> float:
    lhs = np.atleast_1d(np.asarray(lhs))
    rhs = np.atleast_1d(np.asarray(rhs))
    scale = max(1.0, float(np.abs(lhs).max()), float(np.abs(rhs).max()))
    return float(np.abs(lhs - rhs).max()) / scale


def oscillator_apply(
    p: OscillatorParams,
    field: Callable[[np.ndarray], complex],
    xi: np.ndarray,
    d: DiffStrategy,
) -> complex:
    """Apply the oscillator Hamiltonian -laplacian/2 + omega^2 |xi|^2 / 2."""
    xi = np.asarray(xi, dtype=complex)
    r = float(np.real(xi @ xi.conj()))
    return -0.5 * xi_laplacian(field, xi, d) + 0.5 * p.omega**2 * r * field(xi)


def radial_duality_residual(
    p: OscillatorParams, x: np.ndarray, d: DiffStrategy
) -> float:
    """Residual of the base-space eigenrelation for psi = exp(-omega r).

    For angle-independent fields the transformed equation reduces to
    -laplacian_5/2 - Z/r acting on psi with eigenvalue E; the 5-axis
    Laplacian is evaluated by finite differences.  Relative to |psi|.
    """
    x = np.asarray(x, dtype=float)

    def psi(y: np.ndarray) -> float:
        return math.exp(-p.omega * float(np.linalg.norm(y)))

    lap = 0.0
    for lam in range(5):
        e = np.zeros(5)
        e[lam] = 1.0
        lap += second_derivative(lambda t: psi(x + t * e), d.step2, d.order)
    r = float(np.linalg.norm(x))
    val = -0.5 * lap - (p.Z / r) * psi(x)
    return abs(val - p.E * psi(x)) / psi(x)
