"""Spin-J angle separation.

The angular basis is the standard rotation-matrix element family

    phi^J_{q,p}(angles) = e^{i q phi2} d^J_{q,p}(phi3) e^{i p phi1},

simultaneous eigenfunctions of the Casimir (J(J+1)), of Q1 (q) and of T1
(p); the ladder combinations Q2 +- i Q3 raise/lower q with the usual
square-root coefficients.  Coupling one base axis to the right generators
through a potential column (A1, A2, A3) produces, on this basis, a
tridiagonal (2J+1) x (2J+1) matrix whose vanishing determinant selects the
per-axis eigenvalues a = m * |A| (m = -J .. J); the null vector supplies
the mixing coefficients g_q.

Roots are computed as eigenvalues of the a-independent tridiagonal part
(dense Hermitian solve at size <= 7), with a determinant-bisection scan
kept as an independent oracle.  J is capped at 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import SingularAxis
from .gauge import a_field_closed
from .opcalc import (
    DiffStrategy,
    OscillatorParams,
    apply_euler_op,
    first_derivative,
)
from .transform import AngleCase, EulerAngles, RPoint

__all__ = [
    "J_CAP",
    "SeparationSolution",
    "wigner_d",
    "wigner_d_prime",
    "wigner",
    "ladder_apply",
    "potential_columns",
    "build_h",
    "separation_roots",
    "det_bisection_roots",
    "coefficients",
    "axis_solution",
    "assemble_G",
    "resolve_branch",
    "effective_terms",
    "consistency_residual",
]

J_CAP = 3


def _check_spin(J: int, *qs: int) -> None:
    if not (0 <= J <= J_CAP):
        raise ValueError(f"J must lie in 0..{J_CAP}")
    for q in qs:
        if abs(q) > J:
            raise ValueError(f"index {q} out of range for J={J}")


def wigner_d(J: int, q: int, p: int, beta: float) -> float:
    """Small rotation-matrix element d^J_{q,p}(beta) (real convention)."""
    _check_spin(J, q, p)
    pref = math.sqrt(
        math.factorial(J + q)
        * math.factorial(J - q)
        * math.factorial(J + p)
        * math.factorial(J - p)
    )
    c, s = math.cos(beta / 2.0), math.sin(beta / 2.0)
    total = 0.0
    for k in range(max(0, p - q), min(J + p, J - q) + 1):
        denom = (
            math.factorial(J + p - k)
            * math.factorial(k)
            * math.factorial(q - p + k)
            * math.factorial(J - q - k)
        )
        total += ((-1.0) ** (q - p + k) / denom) * c ** (
            2 * J + p - q - 2 * k
        ) * s ** (q - p + 2 * k)
    return pref * total


def wigner_d_prime(J: int, q: int, p: int, beta: float) -> float:
    """Analytic d/dbeta of the small rotation-matrix element."""
    _check_spin(J, q, p)
    pref = math.sqrt(
        math.factorial(J + q)
        * math.factorial(J - q)
        * math.factorial(J + p)
        * math.factorial(J - p)
    )
    c, s = math.cos(beta / 2.0), math.sin(beta / 2.0)
    total = 0.0
    for k in range(max(0, p - q), min(J + p, J - q) + 1):
        denom = (
            math.factorial(J + p - k)
            * math.factorial(k)
            * math.factorial(q - p + k)
            * math.factorial(J - q - k)
        )
        a = 2 * J + p - q - 2 * k
        b = q - p + 2 * k
        term = 0.0
        if a > 0:
            term -= 0.5 * a * c ** (a - 1) * s ** (b + 1)
        if b > 0:
            term += 0.5 * b * c ** (a + 1) * s ** (b - 1)
        total += ((-1.0) ** (q - p + k) / denom) * term
    return pref * total


def wigner(J: int, q: int, p: int, phi: EulerAngles) -> complex:
    """Angular basis element phi^J_{q,p} at the given angles."""
    return (
        np.exp(1j * q * phi.phi2)
        * wigner_d(J, q, p, phi.phi3)
        * np.exp(1j * p * phi.phi1)
    )


def ladder_apply(sign: int, J: int, q: int, p: int, phi: EulerAngles) -> complex:
    """Analytic (Q2 +- i Q3) applied to a basis element (no differencing).

    Returns e^{i(q+-1)phi2} e^{ip phi1} [+-d' - (q cos(phi3) - p)/sin(phi3) d];
    with the conventions above this equals
    sqrt((J -+ q)(J +- q + 1)) * phi^J_{q+-1,p}.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    _check_spin(J, q, p)
    s3 = math.sin(phi.phi3)
    d = wigner_d(J, q, p, phi.phi3)
    dp = wigner_d_prime(J, q, p, phi.phi3)
    radial = sign * dp - (q * math.cos(phi.phi3) - p) / s3 * d
    return (
        np.exp(1j * (q + sign) * phi.phi2) * np.exp(1j * p * phi.phi1) * radial
    )


def potential_columns(A: np.ndarray) -> list[tuple[float, complex, complex]]:
    """(A1, A+, A-) per base axis, with A+- = (A2 -+ i A3)/2."""
    A = np.asarray(A, dtype=float)
    out = []
    for lam in range(A.shape[0]):
        a1, a2, a3 = A[lam]
        out.append((float(a1), 0.5 * (a2 - 1j * a3), 0.5 * (a2 + 1j * a3)))
    return out


def build_h(
    J: int, col: tuple[float, complex, complex], a: float
) -> np.ndarray:
    """The tridiagonal coupling matrix at spectral parameter a.

    Rows/columns are ordered q = -J .. J.  Only three diagonals are
    nonzero: for row k = 1 .. 2J+1 (1-based),

        (h)_{k,k-1} = sqrt((2J+2-k)(k-1)) A+,
        (h)_{k,k}   = -a - (J+1-k) A1,
        (h)_{k,k+1} = sqrt(k(2J+1-k)) A-.
    """
    _check_spin(J)
    a1, ap, am = col
    n = 2 * J + 1
    h = np.zeros((n, n), dtype=complex)
    for k in range(1, n + 1):
        h[k - 1, k - 1] = -a - (J + 1 - k) * a1
        if k >= 2:
            h[k - 1, k - 2] = math.sqrt((2 * J + 2 - k) * (k - 1)) * ap
        if k <= n - 1:
            h[k - 1, k] = math.sqrt(k * (2 * J + 1 - k)) * am
    return h


def separation_roots(J: int, col) -> np.ndarray:
    """All real a with det h(a) = 0, ascending.

    h(a) = h(0) - a I with h(0) Hermitian, so the roots are the (real)
    eigenvalues of h(0); they form the ladder {m |A| : m = -J .. J}.
    """
    h0 = build_h(J, col, 0.0)
    return np.sort(np.linalg.eigvalsh(h0))


def det_bisection_roots(
    J: int, col, grid: int = 4001, tol: float = 1e-13
) -> np.ndarray:
    """Independent root oracle: scan det h(a) on a grid and bisect.

    Stays clear of the eigenvalue route entirely (the determinant is
    evaluated by LU through numpy.linalg.det on each probe).  Intended for
    columns with distinct roots; multiple roots collapse to one
    sign-change each.
    """
    a1, ap, am = col
    s = math.sqrt(a1 * a1 + abs(ap + am) ** 2 + abs(1j * (ap - am)) ** 2)
    span = max(1.0, (J + 1.0) * s)
    grid_a = np.linspace(-span, span, grid)
    dets = np.array(
        [np.linalg.det(build_h(J, col, a)).real for a in grid_a]
    )
    roots = []
    for i in range(grid - 1):
        d0, d1 = dets[i], dets[i + 1]
        if d0 == 0.0:
            roots.append(grid_a[i])
            continue
        if d0 * d1 < 0.0:
            lo, hi, flo = grid_a[i], grid_a[i + 1], d0
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                fm = np.linalg.det(build_h(J, col, mid)).real
                if fm == 0.0:
                    lo = hi = mid
                    break
                if flo * fm < 0.0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            roots.append(0.5 * (lo + hi))
    if dets[-1] == 0.0:
        roots.append(grid_a[-1])
    return np.array(sorted(roots))


def coefficients(
    J: int, col, a_root: float, degeneracy_tol: float = 1e-8
) -> np.ndarray:
    """Unit null vector of h(a_root), ordered q = -J .. J.

    For a simple root the vector is unique up to phase; the phase is fixed
    by making the first component above 1e-8 of the max real positive.
    If the numerical nullity exceeds one, an orthonormal basis of the null
    space is returned instead (shape (2J+1, nullity)); the realistic
    trigger is a vanishing potential column, where every vector is null.
    """
    h0 = build_h(J, col, 0.0)
    evals, evecs = np.linalg.eigh(h0)
    close = np.abs(evals - a_root) <= degeneracy_tol
    if not close.any():
        raise ValueError(
            f"{a_root!r} is not a root within {degeneracy_tol:g} "
            f"(spectrum {np.sort(evals)})"
        )
    if close.sum() > 1:
        return evecs[:, close].copy()
    g = evecs[:, int(np.argmax(close))].copy()
    return _fix_phase(g)


def _fix_phase(g: np.ndarray) -> np.ndarray:
    idx = int(np.argmax(np.abs(g) > 1e-8 * np.abs(g).max()))
    ph = g[idx] / abs(g[idx])
    g = g / ph
    return g / np.linalg.norm(g)


@dataclass(frozen=True)
class SeparationSolution:
    """Per-(J, axis) separation data: the root ladder and one null vector."""

    J: int
    lam: int
    roots: np.ndarray
    root: float
    g: np.ndarray

    @property
    def degenerate(self) -> bool:
        return self.g.ndim == 2


def resolve_branch(branch) -> Callable[[int, int], int]:
    """Turn a branch spec into a per-axis ladder index m(J, lam).

    Strings: "alternating" is (-J, +J, -J, +J, 0) across the five axes
    (the sign pattern of the closed case-A eigenvalue display); "m=<k>"
    picks the constant ladder index k (clipped into -J..J).  A callable is
    passed through.
    """
    if callable(branch):
        return branch
    if branch == "alternating":
        return lambda J, lam: [-J, J, -J, J, 0][lam]
    if isinstance(branch, str) and branch.startswith("m="):
        k = int(branch[2:])
        return lambda J, lam: max(-J, min(J, k))
    raise ValueError(f"unknown branch selector {branch!r}")


def axis_solution(
    J: int, A: np.ndarray, lam: int, branch="alternating"
) -> SeparationSolution:
    """Roots and the branch null vector for one base axis."""
    col = potential_columns(A)[lam]
    roots = separation_roots(J, col)
    m = resolve_branch(branch)(J, lam)
    root = m * float(np.linalg.norm(np.asarray(A, dtype=float)[lam]))
    g = coefficients(J, col, root)
    if g.ndim == 2:
        g = _fix_phase(g[:, 0].copy())
    return SeparationSolution(J, lam, roots, root, g)


def assemble_G(
    J: int,
    p: int,
    A: np.ndarray,
    lam: int,
    branch,
    phi: EulerAngles,
) -> complex:
    """The angular factor sum_q g_q phi^J_{q,p} for one axis and branch."""
    sol = axis_solution(J, A, lam, branch)
    return g_eval(sol, p, phi)


def g_eval(sol: SeparationSolution, p: int, phi: EulerAngles) -> complex:
    g = sol.g if sol.g.ndim == 1 else sol.g[:, 0]
    return sum(
        g[J_plus_q] * wigner(sol.J, J_plus_q - sol.J, p, phi)
        for J_plus_q in range(2 * sol.J + 1)
    )


def effective_terms(
    J: int, x, case: AngleCase, branch="alternating"
) -> tuple[np.ndarray, float]:
    """Selected per-axis eigenvalue vector and the centrifugal scalar.

    The eigenvalue for axis lam is m(J, lam) * |A_lam.|, evaluated on the
    closed-form potential; the scalar is J(J+1)/(2 r^2).  Raises
    :class:`SingularAxis` through the closed form on the singular
    half-axis.
    """
    _check_spin(J)
    fld = a_field_closed(x, case)
    xv = np.asarray(x.x if isinstance(x, RPoint) else x, dtype=float)
    r = float(np.linalg.norm(xv))
    sel = resolve_branch(branch)
    a = np.zeros(5)
    for lam in range(5):
        s = float(np.linalg.norm(fld.A[lam]))
        a[lam] = sel(J, lam) * s
    return a, J * (J + 1) / (2.0 * r * r)


def consistency_residual(
    J: int,
    p: int,
    test_psi: Callable[[np.ndarray], complex],
    x,
    case: AngleCase,
    branch,
    d: DiffStrategy,
    params=None,
    n_angles: int = 4,
    angle_seed: int = 7,
) -> float:
    """Operator-level check that the angle separation succeeded.

    Applies the transformed-equation operator (momentum square, Casimir
    over 2r^2, Coulomb term) to Psi(x) * G(angles) and subtracts
    G * (reduced radial operator applied to Psi), where the reduced
    operator carries the per-axis eigenvalue with the sign of the printed
    reduced equation, (-i d_lam - a_lam)^2.  The angular factor for each
    axis is the null vector for the root -a_lam, which makes every term
    vanish identically; the returned max over axes and sampled angles is
    pure finite-difference error and shrinks under step refinement.
    """
    _check_spin(J, p)
    if params is None:
        params = OscillatorParams.from_omega(1.0)
    xv = np.asarray(x.x if isinstance(x, RPoint) else x, dtype=float)
    r0 = float(np.linalg.norm(xv))
    a_vec, centrifugal = effective_terms(J, xv, case, branch)
    A0 = a_field_closed(xv, case).A
    sel = resolve_branch(branch)
    dn = d.nested()
    rng = np.random.default_rng(angle_seed)
    angles = [
        EulerAngles(
            rng.uniform(0, 2 * math.pi),
            rng.uniform(0, 2 * math.pi),
            rng.uniform(0.5, math.pi - 0.5),
        )
        for _ in range(n_angles)
    ]
    psi0 = test_psi(xv)
    coulomb = params.Z / r0 + params.E

    worst = 0.0
    for lam in range(5):
        e = np.zeros(5)
        e[lam] = 1.0
        col = potential_columns(A0)[lam]
        g = coefficients(J, col, -a_vec[lam])
        if g.ndim == 2:
            g = _fix_phase(g[:, 0].copy())

        def G(ph: EulerAngles) -> complex:
            return sum(g[i] * wigner(J, i - J, p, ph) for i in range(2 * J + 1))

        def a_at(y: np.ndarray) -> float:
            # the branch eigenvalue re-evaluated at a displaced base point
            return sel(J, lam) * float(
                np.linalg.norm(a_field_closed(y, case).A[lam])
            )

        def inner(y: np.ndarray, ph: EulerAngles) -> complex:
            dpsi = first_derivative(
                lambda t: test_psi(y + t * e), dn.step, dn.order
            )
            Ay = a_field_closed(y, case).A
            q = sum(
                Ay[lam, k] * apply_euler_op(f"Q{k + 1}", G, ph, dn)
                for k in range(3)
            )
            return -1j * dpsi * G(ph) + test_psi(y) * q

        def chi(y: np.ndarray) -> complex:
            dpsi = first_derivative(
                lambda t: test_psi(y + t * e), dn.step, dn.order
            )
            return -1j * dpsi - a_at(y) * test_psi(y)

        dchi = first_derivative(lambda t: chi(xv + t * e), dn.step, dn.order)
        reduced = -1j * dchi - a_at(xv) * chi(xv)

        for ph in angles:
            outer_d = first_derivative(
                lambda t: inner(xv + t * e, ph), dn.step, dn.order
            )
            outer = -1j * outer_d + sum(
                A0[lam, k]
                * apply_euler_op(f"Q{k + 1}", lambda pp: inner(xv, pp), ph, dn)
                for k in range(3)
            )
            qsq = sum(
                apply_euler_op(
                    f"Q{k}",
                    lambda pr: apply_euler_op(f"Q{k}", G, pr, dn),
                    ph,
                    dn,
                )
                for k in (1, 2, 3)
            )
            g0 = G(ph)
            # one fifth of the shared (Casimir/centrifugal + Coulomb + energy)
            # terms rides along with each axis; summed over the five axes this
            # is exactly "transformed operator minus reduced operator"
            lhs = 0.5 * outer + (qsq / (2.0 * r0 * r0) - coulomb * g0) * psi0 / 5.0
            rhs = g0 * (0.5 * reduced + (centrifugal - coulomb) * psi0 / 5.0)
            worst = max(worst, abs(lhs - rhs))
    return worst
