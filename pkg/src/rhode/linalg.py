"""2x2 complex linear algebra and branch-continuous logarithms.

Matrices are plain (2, 2) complex128 numpy arrays, row-major. All tolerances
are relative to the max-abs entry norm returned by mat_norm.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import (
    BranchJumpTooLarge,
    DegenerateSpectrum,
    ParametrizationBreakdown,
    SingularMatrix,
    ZeroArgument,
)

_EPS_DET = 1e-12
_EPS_PARAM = 1e-12
_EPS_SPEC = 1e-12

_TWO_PI = 2.0 * np.pi


class EigenPair(NamedTuple):
    """Eigenvalues of a 2x2 matrix and the slopes of (1, t) eigenvectors."""

    lam1: complex
    lam2: complex
    t1: complex
    t2: complex


def as_mat2(a) -> np.ndarray:
    """Coerce to a finite (2, 2) complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def mat_norm(a) -> float:
    """Max-abs entry norm, the norm used for every residual in this package."""
    return float(np.max(np.abs(np.asarray(a))))


def mat_mul(a, b) -> np.ndarray:
    """Product of two 2x2 complex matrices."""
    return as_mat2(a) @ as_mat2(b)


def mat_inv(a) -> np.ndarray:
    """Inverse by the adjugate formula.

    Raises SingularMatrix when |det| <= 1e-12 * mat_norm(a)**2 (determinant
    scales like the squared entry norm).
    """
    m = as_mat2(a)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    scale = mat_norm(m) ** 2
    if abs(det) <= _EPS_DET * max(scale, 1e-300):
        raise SingularMatrix(f"determinant {det} negligible against norm scale {scale}")
    out = np.empty((2, 2), dtype=np.complex128)
    out[0, 0] = m[1, 1]
    out[0, 1] = -m[0, 1]
    out[1, 0] = -m[1, 0]
    out[1, 1] = m[0, 0]
    out /= det
    return out


def _stable_quadratic_roots(tr: complex, det: complex) -> tuple[complex, complex]:
    # Roots of x^2 - tr*x + det without subtractive cancellation: the root
    # of larger magnitude comes from the non-cancelling sign, the other from
    # Vieta's product.
    disc = np.sqrt(complex(tr * tr - 4.0 * det))
    if (tr.conjugate() * disc).real < 0.0:
        disc = -disc
    big = 0.5 * (tr + disc)
    if big == 0.0:
        return 0.0 + 0.0j, 0.0 + 0.0j
    return big, det / big


def eig2(m, eps_param: float = _EPS_PARAM, eps_spec: float = _EPS_SPEC) -> EigenPair:
    """Eigendecomposition of a 2x2 matrix in (1, t) eigenvector form.

    Returns EigenPair(lam1, lam2, t1, t2) with t_i = (lam_i - m[0,0]) / m[0,1],
    ordered so that |lam1 - 1| >= |lam2 - 1| (ties broken by larger real part,
    then larger imaginary part).

    Raises ParametrizationBreakdown when |m12| is negligible and
    DegenerateSpectrum when the eigenvalues coincide to working precision.
    """
    a = as_mat2(m)
    scale = max(mat_norm(a), 1e-300)
    if abs(a[0, 1]) <= eps_param * scale:
        raise ParametrizationBreakdown(
            f"|m12| = {abs(a[0, 1]):.3e} too small against norm {scale:.3e}"
        )
    tr = complex(a[0, 0] + a[1, 1])
    det = complex(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])
    x, y = _stable_quadratic_roots(tr, det)
    if abs(x - y) <= eps_spec * scale:
        raise DegenerateSpectrum(f"eigenvalues {x} and {y} coincide to precision")
    # Deterministic order: distance from 1 first (the jump matrices handled
    # here tend to the identity, so this pins the labelling).
    ka = (abs(x - 1.0), x.real, x.imag)
    kb = (abs(y - 1.0), y.real, y.imag)
    if kb > ka:
        x, y = y, x
    t1 = (x - a[0, 0]) / a[0, 1]
    t2 = (y - a[0, 0]) / a[0, 1]
    return EigenPair(x, y, t1, t2)


def unwrap_log(values, anchor: complex = 0.0) -> np.ndarray:
    """Branch-continuous logarithm of a sequence of nonzero complex values.

    The first entry takes the branch whose imaginary part is nearest
    Im(anchor); consecutive entries differ in imaginary part by less than pi.
    exp(unwrap_log(v)[k]) recovers v[k] to roundoff.

    Raises ZeroArgument on a zero value and BranchJumpTooLarge when a
    consecutive pair is separated by a phase step of essentially pi.
    """
    v = np.asarray(values, dtype=np.complex128)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("expected a nonempty 1-d sequence")
    mag = np.abs(v)
    if np.any(mag == 0.0) or not np.all(np.isfinite(v)):
        k = int(np.argmin(mag))
        raise ZeroArgument(f"value at index {k} is zero or non-finite", index=k)
    theta = np.angle(v)
    dtheta = np.diff(theta)
    # Integer winding corrections keep each phase an exact 2*pi multiple away
    # from the principal value.
    turns = np.zeros(v.size, dtype=np.int64)
    if v.size > 1:
        steps = np.where(dtheta > np.pi, -1, 0) + np.where(dtheta < -np.pi, 1, 0)
        turns[1:] = np.cumsum(steps)
        corrected = dtheta + _TWO_PI * np.diff(turns).astype(np.float64)
        bad = np.abs(corrected) >= np.pi * (1.0 - 1e-12)
        if np.any(bad):
            k = int(np.argmax(bad))
            raise BranchJumpTooLarge(
                f"phase step {corrected[k]:+.6f} between indices {k} and {k + 1}",
                index=k,
            )
    phase = theta + _TWO_PI * turns.astype(np.float64)
    shift = np.round((complex(anchor).imag - phase[0]) / _TWO_PI)
    phase += _TWO_PI * shift
    return np.log(mag) + 1j * phase
