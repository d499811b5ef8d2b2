"""Monopole-type gauge potentials of the fibered map.

Two routes produce the 5x3 potential coupling base-space momentum to the
right rotor generators:

* the numeric pipeline differentiates the angle functions to get the frame
  functions B_k+- and the intermediate coupling (``b_functions``,
  ``a_tilde``) and converts through a 3x3 linear solve in the swapped-angle
  frame (``a_field_numeric``);
* the closed forms (``a_field_closed``) evaluate the known expressions,
  singular on one half of the x5 axis (negative half for case A, positive
  for case B).

The two routes are compared against each other by the suite; the closed
case-B form is the image of the case-A form under the reflection
P = diag(-1,-1,-1,+1,-1):  A_B(x) = P . A_A(P x) componentwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFiber, IllConditionedFrame, SingularAxis
from .opcalc import DiffStrategy, fiber_phase_gradients
from .transform import (
    GAMMA,
    AngleCase,
    EulerAngles,
    RPoint,
    extra_angles,
    fiber_section,
    forward,
)

__all__ = [
    "BFunctions",
    "GaugeField",
    "CASE_B_REFLECTION",
    "b_functions",
    "a_tilde",
    "a_field_numeric",
    "a_field_closed",
]

# Reflection conjugating case B into case A (applies to points and to the
# base index of the potential alike).
CASE_B_REFLECTION = np.array([-1.0, -1.0, -1.0, 1.0, -1.0])

# Parity of each frame function under phi3 -> -phi3; realizes the formal
# argument swap (phi1 <-> phi2, phi3 -> -phi3) from values at a reachable
# fiber point.
_FRAME_PARITY = np.array([-1.0, -1.0, 1.0])


@dataclass(frozen=True)
class BFunctions:
    """Values of the six frame functions B_k+ / B_k- at a point."""

    bplus: np.ndarray
    bminus: np.ndarray


@dataclass(frozen=True)
class GaugeField:
    """The 5x3 potential at a point, with its case and a singularity flag."""

    A: np.ndarray
    case: AngleCase
    singular: bool = False


def b_functions(
    xi,
    case: AngleCase,
    d: DiffStrategy,
    check_x_independence: bool = True,
    check_tol: float = 1e-4,
) -> BFunctions:
    """Evaluate the frame functions from derivatives of the angle maps.

    B_k+ = -Re z_k and B_k- = -Im z_k with
    z_k = (tilde xi) . conj(grad f_k); both are real by construction and
    depend on the point only through its angles.  When
    ``check_x_independence`` is set, the values are recomputed at a second
    fiber point with the same angles (built by the closed-form section at a
    companion base point) and a disagreement above ``check_tol`` raises
    ``ValueError`` -- that would mean the angle definitions are broken.
    """
    xi = np.asarray(xi, dtype=complex)
    bp, bm = _b_values(xi, case, d)
    if check_x_independence:
        phi = extra_angles(xi, case)
        xi2 = fiber_section(_companion_point(forward(xi), case), phi, case)
        bp2, bm2 = _b_values(xi2, case, d)
        worst = max(np.abs(bp - bp2).max(), np.abs(bm - bm2).max())
        if worst > check_tol:
            raise ValueError(
                f"frame functions vary along the fiber base (delta {worst:.3e})"
            )
    return BFunctions(bp, bm)


def _b_values(xi, case, d):
    D, Dbar = fiber_phase_gradients(xi, case, d)
    w = GAMMA.gamma_tilde @ xi
    wc = np.conj(w)
    z = np.array([w @ Dbar[k] + wc @ D[k] for k in range(3)])
    half = -0.5 * z
    bp = half.real.copy()
    # The minus component carries the antisymmetric half of the same
    # contraction: (i/2)(w.Dbar - wc.D).
    zm = np.array([w @ Dbar[k] - wc @ D[k] for k in range(3)])
    bm = (0.5j * zm).real.copy()
    return bp, bm


def _companion_point(pt: RPoint, case: AngleCase) -> RPoint:
    """A deterministic second base point well off the singular half-axis."""
    mix = np.array([0.37, -0.22, 0.53, 0.11, 0.41 * case.axis_sign])
    x2 = 0.6 * pt.x + pt.r * mix
    r2 = float(np.linalg.norm(x2))
    if r2 + case.axis_sign * x2[4] < 1e-3 * r2:
        x2 = x2.copy()
        x2[4] = case.axis_sign * 0.5 * r2
        r2 = float(np.linalg.norm(x2))
    return RPoint(x2, r2)


def a_tilde(xi, case: AngleCase, d: DiffStrategy) -> np.ndarray:
    """The 5x3 intermediate coupling from first derivatives of the angles.

    Component (l, k) is Re[(gamma_l xi).grad f_k] / r up to the
    antiholomorphic partner; the imaginary part is asserted below 1e-10.
    Scales as 1/|xi|^2 under xi -> c xi.
    """
    xi = np.asarray(xi, dtype=complex)
    D, Dbar = fiber_phase_gradients(xi, case, d)
    v = np.einsum("lst,t->ls", GAMMA.gamma, xi)
    vals = 0.5 * (v @ D.T + np.conj(v) @ Dbar.T) / float(np.real(xi @ xi.conj()))
    # realness holds up to truncation, which grows like step^order
    imag_tol = max(1e-10, 100.0 * d.step**d.order)
    if np.abs(vals.imag).max() > imag_tol:
        raise FloatingPointError(
            f"coupling matrix has imaginary residue {np.abs(vals.imag).max():.3e}"
        )
    return vals.real.copy()


def a_field_numeric(
    xi,
    case: AngleCase,
    d: DiffStrategy,
    check_phi_independence: bool = False,
    check_tol: float = 1e-4,
    frame_det_eps: float = 1e-8,
) -> GaugeField:
    """Convert the intermediate coupling into the potential numerically.

    The conversion runs in the swapped-angle frame: the frame functions are
    evaluated (by finite differences) at a fiber point whose angles are
    (phi2, phi1, phi3) and carried to (phi2, phi1, -phi3) by their phi3
    parity; the three potential components per axis then solve

        At_1 = A_2 b2+ + A_3 b2-,
        At_2 = A_1 + A_2 b1+ + A_3 b1-,
        At_3 = -A_2 b3+ - A_3 b3-.

    Raises :class:`IllConditionedFrame` when the 2x2 determinant
    b3+ b2- - b2+ b3- falls below ``frame_det_eps``, and propagates
    :class:`DegenerateFiber` from the angle evaluation.
    """
    xi = np.asarray(xi, dtype=complex)
    pt = forward(xi)
    phi = extra_angles(xi, case)
    at = a_tilde(xi, case, d)
    A = _convert(at, pt, phi, case, d, frame_det_eps)
    if check_phi_independence:
        phi2 = EulerAngles(
            (phi.phi1 + 0.9) % (2 * np.pi),
            (phi.phi2 + 1.3) % (2 * np.pi),
            0.25 * np.pi + 0.5 * phi.phi3,
        )
        xi2 = fiber_section(pt, phi2, case)
        at2 = a_tilde(xi2, case, d)
        A2 = _convert(at2, pt, phi2, case, d, frame_det_eps)
        worst = float(np.abs(A - A2).max())
        if worst > check_tol:
            raise ValueError(
                f"potential varies along the fiber (delta {worst:.3e})"
            )
    return GaugeField(A, case)


def _convert(at, pt, phi, case, d, frame_det_eps):
    swapped = EulerAngles(phi.phi2, phi.phi1, phi.phi3)
    xi_aux = fiber_section(pt, swapped, case)
    if min(abs(xi_aux[case.pair[0]]), abs(xi_aux[case.pair[1]])) < 1e-12:
        raise DegenerateFiber("swapped-angle frame point is degenerate")
    baux = b_functions(xi_aux, case, d, check_x_independence=False)
    bp = _FRAME_PARITY * baux.bplus
    bm = _FRAME_PARITY * baux.bminus
    det = bp[2] * bm[1] - bp[1] * bm[2]
    if abs(det) < frame_det_eps:
        raise IllConditionedFrame(f"frame determinant {det:.3e}")
    A = np.zeros((5, 3))
    A[:, 1] = -(bm[2] * at[:, 0] + bm[1] * at[:, 2]) / det
    A[:, 2] = (bp[2] * at[:, 0] + bp[1] * at[:, 2]) / det
    A[:, 0] = at[:, 1] - A[:, 1] * bp[0] - A[:, 2] * bm[0]
    return A


_CLOSED_A = {
    # numerator component patterns per generator index k, case A
    0: ((1, 1.0), (0, -1.0), (3, -1.0), (2, 1.0)),
    1: ((3, -1.0), (2, 1.0), (1, -1.0), (0, 1.0)),
    2: ((2, 1.0), (3, 1.0), (0, -1.0), (1, -1.0)),
}


def a_field_closed(x, case: AngleCase) -> GaugeField:
    """Closed-form potential, singular on one half of the x5 axis.

    Case A divides by r(r + x5); case B is its image under the reflection
    ``CASE_B_REFLECTION`` and divides by r(r - x5).  Satisfies
    x . A_k = 0 and A_k . A_j = (r - s x5) / (r^2 (r + s x5)) delta_kj
    with s = +1 (case A) / -1 (case B).
    """
    xv = np.asarray(x.x if isinstance(x, RPoint) else x, dtype=float)
    r = float(np.linalg.norm(xv))
    if r <= 0.0:
        raise SingularAxis("potential undefined at the origin")
    denom = r + case.axis_sign * xv[4]
    if denom <= 1e-9 * r:
        half = "negative" if case.tag == "A" else "positive"
        raise SingularAxis(
            f"case {case.tag} potential diverges on the {half} x5 half-axis"
        )
    pv = xv if case.tag == "A" else CASE_B_REFLECTION * xv
    A = np.zeros((5, 3))
    for k, pattern in _CLOSED_A.items():
        for lam, (src, sgn) in enumerate(pattern):
            A[lam, k] = sgn * pv[src]
    if case.tag == "B":
        A = CASE_B_REFLECTION[:, None] * A
    return GaugeField(A / (r * denom), case)
