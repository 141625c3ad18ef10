"""Closed-form reference solutions used to validate the ODE solver.

Two independent routes: the scalar Cauchy-integral solution for diagonal
(lifted scalar) jumps, and the commutative-class factorization for Khrapkov
coefficients. Both share the mesh and trapezoid quadrature of the main
solver but never touch the Riccati march or the ordered exponential.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ZeroArgument
from .jumps import KhrapkovCoefficient
from .linalg import mat_inv, unwrap_log
from .mesh import ContourMesh, cauchy_quadrature

_I_4PI = 1j / (4.0 * np.pi)
# Below this |sqrt(f)| the even/odd limit series replaces cosh/sinh ratios.
_SMALL_SQF = 1e-4


def scalar_cauchy_solve(m, mesh: ContourMesh, z: complex) -> complex:
    """Scalar factorization u(z) for a jump u+ = u- m on the cut.

    log u(z) = 1/(2 pi i) * integral of log m(tau)/(z - tau) d tau along the
    mesh, with the log branch tracked continuously from the truncation point
    (where m is near 1) down to the base. m may be a callable or an array of
    node samples.
    """
    samples = m(mesh.nodes) if callable(m) else np.asarray(m, dtype=np.complex128)
    samples = np.asarray(samples, dtype=np.complex128)
    if samples.shape != mesh.nodes.shape:
        raise ValueError(f"got {samples.shape} samples for {mesh.n} nodes")
    logm = unwrap_log(samples, anchor=0.0)
    cq = cauchy_quadrature(logm, mesh, complex(z))
    return complex(np.exp(cq / (2j * np.pi)))


@dataclass
class KhrapkovSolution:
    """Per-node closed-form data for a commutative-class coefficient.

    sqf is the branch-continued sqrt(f) along the mesh shared by every
    quantity derived from this solution; xi and eta are the exponent
    densities whose Cauchy integrals build the factor.
    """

    coef: KhrapkovCoefficient
    mesh: ContourMesh
    xi: np.ndarray
    eta: np.ndarray
    sqf: np.ndarray


def _tracked_sqrt(values: np.ndarray) -> np.ndarray:
    """Principal square root continued along the sample sequence."""
    s = np.sqrt(values.astype(np.complex128))
    flip = np.ones(s.size)
    if s.size > 1:
        # A sign flip is needed wherever the principal branch jumps; track
        # the cumulative parity so the result is continuous.
        disagree = np.abs(s[1:] - s[:-1]) > np.abs(s[1:] + s[:-1])
        flip[1:] = np.cumprod(np.where(disagree, -1.0, 1.0))
    return s * flip


def khrapkov_xi_eta(coef: KhrapkovCoefficient, mesh: ContourMesh) -> KhrapkovSolution:
    """Exponent densities of the closed-form factorization at the mesh nodes.

    xi = (i/4pi) log(c^2 - f p^2), eta = (i/(4pi sqrt(f))) log of the
    eigenvalue ratio (c + p sqrt(f))/(c - p sqrt(f)); both logs are branch
    continuous along the mesh, anchored near zero at the truncation point.
    Nodes with |sqrt(f)| below 1e-4 switch to the even series in f.
    """
    nodes = mesh.nodes
    c = np.asarray(coef.c_at(nodes), dtype=np.complex128)
    p = np.asarray(coef.p_at(nodes), dtype=np.complex128)
    f = np.asarray(coef.f_at(nodes), dtype=np.complex128)
    sqf = _tracked_sqrt(f)
    det_part = c * c - f * p * p
    xi = _I_4PI * unwrap_log(det_part, anchor=0.0)
    ps = p * sqf
    lo = c - ps
    hi = c + ps
    scale = np.maximum(np.abs(c), np.abs(ps))
    bad = np.abs(lo) <= 1e-14 * np.maximum(scale, 1.0)
    if np.any(bad):
        k = int(np.argmax(bad))
        raise ZeroArgument(
            f"eigenvalue c - p sqrt(f) vanishes at node {k} (tau = {nodes[k]})",
            index=k,
        )
    eta = np.empty_like(xi)
    small = np.abs(sqf) < _SMALL_SQF
    regular = ~small
    if np.any(regular):
        ratio = np.where(regular, hi / np.where(regular, lo, 1.0), 1.0)
        logr = unwrap_log(ratio, anchor=0.0)
        eta[regular] = _I_4PI * logr[regular] / sqf[regular]
    if np.any(small):
        # log((1+x)/(1-x))/s = 2 (p/c) (1 + x^2/3 + x^4/5 + ...), x = p s / c
        x2 = (ps[small] / c[small]) ** 2
        eta[small] = _I_4PI * 2.0 * (p[small] / c[small]) * (
            1.0 + x2 / 3.0 + x2 * x2 / 5.0
        )
    return KhrapkovSolution(coef=coef, mesh=mesh, xi=xi, eta=eta, sqf=sqf)


def _cosh_pair(fz: complex, ebar: complex) -> tuple[complex, complex]:
    """cosh(sqrt(f) ebar) and sinh(sqrt(f) ebar)/sqrt(f), branch-free.

    Both are even in sqrt(f); the principal root works everywhere except
    near f = 0 where the power series in f ebar^2 takes over.
    """
    s = np.sqrt(complex(fz))
    if abs(s) < _SMALL_SQF:
        a = fz * ebar * ebar
        ch = 1.0 + a / 2.0 + a * a / 24.0
        sc = ebar * (1.0 + a / 6.0 + a * a / 120.0)
        return complex(ch), complex(sc)
    w = s * ebar
    return complex(np.cosh(w)), complex(np.sinh(w) / s)


def khrapkov_solve(sol: KhrapkovSolution, z: complex) -> np.ndarray:
    """Closed-form factor U_kh(z) = exp(xibar) (cosh(sqrt(f) etabar) I +
    sinh(sqrt(f) etabar) L(z)/sqrt(f)), with xibar/etabar the negative Cauchy
    integrals of xi/eta over the mesh.

    Solves the same jump but tends to a nonidentity limit at infinity
    whenever deg f = 2; see khrapkov_canonical_correction.
    """
    z = complex(z)
    xibar = -cauchy_quadrature(sol.xi, sol.mesh, z)
    etabar = -cauchy_quadrature(sol.eta, sol.mesh, z)
    fz = complex(sol.coef.f_at(z))
    ch, sc = _cosh_pair(fz, etabar)
    lz = sol.coef.L_at(z)
    u = sc * lz
    u[0, 0] += ch
    u[1, 1] += ch
    return np.exp(xibar) * u


def khrapkov_canonical_correction(
    sol: KhrapkovSolution, far_point: complex
) -> np.ndarray:
    """Limit factor U_inf estimated by evaluating U_kh far from the cut.

    The canonical (identity at infinity) solution is U_inf^-1 U_kh(z). Pick
    the far point on the evaluation line with a real part around 1e3 times
    the cut scale; push it out and the estimate moves by O(1/|z|).
    """
    return khrapkov_solve(sol, complex(far_point))


def khrapkov_canonical_many(
    sol: KhrapkovSolution, zs, far_point: complex
) -> np.ndarray:
    """Corrected closed-form factor at many points: U_inf^-1 U_kh(z_k)."""
    u_inf_inv = mat_inv(khrapkov_canonical_correction(sol, far_point))
    zs = np.asarray(zs, dtype=np.complex128).ravel()
    out = np.empty((zs.size, 2, 2), dtype=np.complex128)
    for k, z in enumerate(zs):
        out[k] = u_inf_inv @ khrapkov_solve(sol, complex(z))
    return out
