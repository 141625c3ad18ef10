"""Two-stage solver for half-line 2x2 matrix Riemann-Hilbert problems.

Stage 1 reconstructs the residue field r(tau) on the cut: the eigenvalue
exponents zeta come directly from branch-continuous logs of the jump
eigenvalues, while the frame slopes h are marched node by node through a
scalar Riccati flow (classical RK4 over the known prefix of the mesh plus a
single explicit Euler step onto each new node, which needs no data there).

Stage 2 evaluates the factor U(z) as the ordered exponential of
r(tau)/(z - tau) along the cut, walking the mesh top-down.
"""

from __future__ import annotations

import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from os import cpu_count

import numpy as np

from .errors import (
    CacheMismatch,
    DegenerateFrame,
    DegenerateSpectrum,
    EvaluationFailure,
    ParametrizationBreakdown,
    PoleHit,
    PoleTooClose,
    RiccatiBlowup,
)
from .jumps import JumpCoefficient
from .linalg import eig2, mat_norm, unwrap_log
from .mesh import ContourMesh, cauchy_quadrature

_I_OVER_2PI = 1j / (2.0 * np.pi)
_MINUS_2PI_I = -2j * np.pi


class TruncationWarning(UserWarning):
    """The jump is still visibly far from I at the truncation point."""


@dataclass
class Tolerances:
    """Relative thresholds and caps used across the solve."""

    eps_param: float = 1e-12
    eps_spec: float = 1e-12
    identity_tol: float = 1e-13
    diagonal_tol: float = 1e-13
    frame_gap_tol: float = 1e-12
    blowup_cap: float = 1e8
    truncation_warn: float = 1e-3


@dataclass
class EigenFrame:
    """Per-node eigendata of the sampled jump and the marched frame slopes.

    lam/t come from the jump's eigendecomposition with branch continuity
    along the mesh; zeta_i = (i/2pi) log lam_i anchored near zero at the top;
    h1/h2 are NaN until the Riccati march assigns them.
    """

    mesh: ContourMesh
    lam1: np.ndarray
    lam2: np.ndarray
    t1: np.ndarray
    t2: np.ndarray
    zeta1: np.ndarray
    zeta2: np.ndarray
    h1: np.ndarray = field(repr=False, default=None)
    h2: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        n = self.mesh.n
        if self.h1 is None:
            self.h1 = np.full(n, np.nan, dtype=np.complex128)
        if self.h2 is None:
            self.h2 = np.full(n, np.nan, dtype=np.complex128)


@dataclass
class ReconstructedCoefficient:
    """Stage-1 output: the residue field r at the mesh nodes.

    kind is "general" (marched), "diagonal" (direct logs), "identity"
    (r = 0), or "cached" (loaded from disk, frame unavailable).
    """

    mesh: ContourMesh
    r_values: np.ndarray
    kind: str
    frame: EigenFrame | None = None
    coef: JumpCoefficient | None = None
    cache_header: dict | None = None
    stage1_seconds: float = 0.0

    @property
    def trace_r(self) -> np.ndarray:
        return self.r_values[:, 0, 0] + self.r_values[:, 1, 1]


def _sample_jump(coef: JumpCoefficient, mesh: ContourMesh) -> np.ndarray:
    if hasattr(coef, "validate_on_mesh"):
        coef.validate_on_mesh(mesh)
    m = coef.eval_many(mesh.nodes)
    finite = np.isfinite(m).all(axis=(1, 2))
    if not finite.all():
        k = int(np.argmin(finite))
        raise EvaluationFailure(
            f"jump coefficient not finite at node {k} (tau = {mesh.nodes[k]})",
            node=k,
            point=complex(mesh.nodes[k]),
        )
    return m


def build_frame(
    coef: JumpCoefficient, mesh: ContourMesh, tol: Tolerances | None = None
) -> EigenFrame:
    """Eigen-parametrize the jump at every node with branch continuity.

    Eigenvalue tracks swap at a node whenever that reduces the total
    eigenvalue movement from the previous node (slopes follow their
    eigenvalues); exponents are unwrapped logs anchored at zero.

    Raises ParametrizationBreakdown or DegenerateSpectrum naming the node.
    """
    tol = tol or Tolerances()
    m = _sample_jump(coef, mesh)
    n = mesh.n
    lam1 = np.empty(n, dtype=np.complex128)
    lam2 = np.empty(n, dtype=np.complex128)
    t1 = np.empty(n, dtype=np.complex128)
    t2 = np.empty(n, dtype=np.complex128)
    for j in range(n):
        try:
            pair = eig2(m[j], eps_param=tol.eps_param, eps_spec=tol.eps_spec)
        except (ParametrizationBreakdown, DegenerateSpectrum) as exc:
            exc.node = j
            exc.args = (f"node {j} (tau = {mesh.nodes[j]}): {exc.args[0]}",)
            raise
        a1, a2, s1, s2 = pair
        if j > 0:
            keep = abs(a1 - lam1[j - 1]) + abs(a2 - lam2[j - 1])
            swap = abs(a2 - lam1[j - 1]) + abs(a1 - lam2[j - 1])
            if swap < keep:
                a1, a2, s1, s2 = a2, a1, s2, s1
        lam1[j], lam2[j], t1[j], t2[j] = a1, a2, s1, s2
    zeta1 = _I_OVER_2PI * unwrap_log(lam1, anchor=0.0)
    zeta2 = _I_OVER_2PI * unwrap_log(lam2, anchor=0.0)
    return EigenFrame(mesh, lam1, lam2, t1, t2, zeta1, zeta2)


# ----------------------------------------------------------------------
# Riccati flow for the frame slopes.


def _rhs(q, z, beta, zeta1b, zeta2b, h1b, h2b):
    # Flow of a frame slope toward the cut: singular at beta = z, regular on
    # the marched prefix where z is always at least one step below beta.
    return (
        -(zeta1b - zeta2b)
        * (q - h1b)
        * (q - h2b)
        / ((z - beta) * (h1b - h2b))
    )


def _rk4_interval(q, z, beta0, db, d0, dm, d1):
    k1 = _rhs(q, z, beta0, *d0)
    k2 = _rhs(q + (0.5 * db) * k1, z, beta0 + 0.5 * db, *dm)
    k3 = _rhs(q + (0.5 * db) * k2, z, beta0 + 0.5 * db, *dm)
    k4 = _rhs(q + db * k3, z, beta0 + db, *d1)
    return q + (db / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _node_data(fr: EigenFrame, k: int):
    return (fr.zeta1[k], fr.zeta2[k], fr.h1[k], fr.h2[k])


def _mid_data(fr: EigenFrame, k: int):
    return (
        0.5 * (fr.zeta1[k] + fr.zeta1[k + 1]),
        0.5 * (fr.zeta2[k] + fr.zeta2[k + 1]),
        0.5 * (fr.h1[k] + fr.h1[k + 1]),
        0.5 * (fr.h2[k] + fr.h2[k + 1]),
    )


def _check_gap(h1v, h2v, tol: Tolerances, node, what="node"):
    scale = max(abs(h1v), abs(h2v), 1.0)
    if not (np.isfinite(h1v) and np.isfinite(h2v)) or abs(h1v - h2v) <= (
        tol.frame_gap_tol * scale
    ):
        raise DegenerateFrame(
            f"frame slopes collide at {what} {node}: h1 = {h1v}, h2 = {h2v}",
            node=node,
        )


def riccati_rhs(q, frame: EigenFrame, position, z: complex):
    """Public right-hand side of the slope flow at a mesh position.

    position may be integral (a node) or half-integral (an interval
    midpoint, where frame data is linearly interpolated). Raises PoleHit at
    beta = z and DegenerateFrame on colliding slopes.
    """
    if abs(position - round(position)) < 1e-9:
        k = int(round(position))
        if not 0 <= k < frame.mesh.n:
            raise IndexError(f"position {position} outside the mesh")
        data = _node_data(frame, k)
        beta = frame.mesh.nodes[k]
    elif abs(position - math.floor(position) - 0.5) < 1e-9:
        k = int(math.floor(position))
        if not 0 <= k < frame.mesh.n - 1:
            raise IndexError(f"position {position} outside the mesh")
        data = _mid_data(frame, k)
        beta = 0.5 * (frame.mesh.nodes[k] + frame.mesh.nodes[k + 1])
    else:
        raise ValueError(f"position must be integral or half-integral, got {position}")
    _check_gap(data[2], data[3], Tolerances(), position, what="position")
    if z == beta:
        raise PoleHit(f"flow evaluated at its pole beta = z = {z}")
    return _rhs(np.asarray(q, dtype=np.complex128), complex(z), beta, *data)


def _blowup_scan(block, offset, cap, position):
    bad = ~(np.abs(block) <= cap)
    if bad.any():
        branch, col = np.unravel_index(int(np.argmax(bad)), bad.shape)
        raise RiccatiBlowup(
            f"|q| exceeded cap {cap:g} for trajectory of node {offset + col} "
            f"(branch {branch + 1}) while passing node {position}",
            node=int(offset + col),
            branch=int(branch + 1),
        )


def _march(frame: EigenFrame, tol: Tolerances, final_step: str = "euler") -> None:
    """Fill frame.h1/h2 by the prefix-marching scheme.

    Each target node n gets its own trajectory: initial value t(tau_n) at the
    top node, RK4 across the already-framed prefix, one explicit Euler step
    (or a Heun predictor-corrector when final_step = "heun") onto tau_n. The
    loop order is interchanged so all in-flight trajectories advance one
    interval per sweep iteration; the arithmetic per trajectory is identical
    to marching them one at a time.
    """
    mesh = frame.mesh
    tau = mesh.nodes
    n = mesh.n
    frame.h1[0] = frame.t1[0]
    frame.h2[0] = frame.t2[0]
    q = np.stack([frame.t1.copy(), frame.t2.copy()])
    cap = tol.blowup_cap
    for k in range(n - 1):
        db = tau[k + 1] - tau[k]
        _check_gap(frame.h1[k], frame.h2[k], tol, k)
        d0 = _node_data(frame, k)
        # Finish trajectory k+1 with the explicit step that needs no data at
        # its endpoint, then expose the new slopes to everyone else.
        e1 = _rhs(q[0, k + 1], tau[k + 1], tau[k], *d0)
        e2 = _rhs(q[1, k + 1], tau[k + 1], tau[k], *d0)
        h1_new = q[0, k + 1] + db * e1
        h2_new = q[1, k + 1] + db * e2
        if final_step == "heun":
            # The flow is singular exactly at the target node, so a classical
            # endpoint trapezoid is unusable; the corrector slope is taken at
            # the interval midpoint with the Euler-predicted endpoint data.
            _check_gap(h1_new, h2_new, tol, k + 1)
            dmid = (
                0.5 * (frame.zeta1[k] + frame.zeta1[k + 1]),
                0.5 * (frame.zeta2[k] + frame.zeta2[k + 1]),
                0.5 * (frame.h1[k] + h1_new),
                0.5 * (frame.h2[k] + h2_new),
            )
            beta_mid = tau[k] + 0.5 * db
            f1 = _rhs(q[0, k + 1] + 0.5 * db * e1, tau[k + 1], beta_mid, *dmid)
            f2 = _rhs(q[1, k + 1] + 0.5 * db * e2, tau[k + 1], beta_mid, *dmid)
            h1_new = q[0, k + 1] + db * f1
            h2_new = q[1, k + 1] + db * f2
        frame.h1[k + 1] = h1_new
        frame.h2[k + 1] = h2_new
        if not (abs(h1_new) <= cap and abs(h2_new) <= cap):
            branch = 1 if not abs(h1_new) <= cap else 2
            raise RiccatiBlowup(
                f"assigned slope exceeded cap {cap:g} at node {k + 1} "
                f"(branch {branch})",
                node=k + 1,
                branch=branch,
            )
        if k + 2 < n:
            _check_gap(frame.h1[k + 1], frame.h2[k + 1], tol, k + 1)
            dm = _mid_data(frame, k)
            d1 = _node_data(frame, k + 1)
            active = q[:, k + 2 :]
            active[...] = _rk4_interval(active, tau[k + 2 :], tau[k], db, d0, dm, d1)
            _blowup_scan(active, k + 2, cap, k + 1)


def replay_trajectory(frame: EigenFrame, target: int, final_step: str = "euler"):
    """Re-run the single trajectory for one target node.

    Uses the already-marched slopes; returns (q1, q2) at the target, which
    reproduce frame.h1/h2[target] bitwise (same arithmetic, same order).
    """
    mesh = frame.mesh
    tau = mesh.nodes
    if not 1 <= target < mesh.n:
        raise IndexError(f"target {target} outside 1..{mesh.n - 1}")
    q = np.array([frame.t1[target], frame.t2[target]])
    z = tau[target]
    for k in range(target - 1):
        db = tau[k + 1] - tau[k]
        q = _rk4_interval(
            q, z, tau[k], db, _node_data(frame, k), _mid_data(frame, k),
            _node_data(frame, k + 1),
        )
    k = target - 1
    db = tau[k + 1] - tau[k]
    d0 = _node_data(frame, k)
    e1 = _rhs(q[0], tau[k + 1], tau[k], *d0)
    e2 = _rhs(q[1], tau[k + 1], tau[k], *d0)
    out1 = q[0] + db * e1
    out2 = q[1] + db * e2
    if final_step == "heun":
        dmid = (
            0.5 * (frame.zeta1[k] + frame.zeta1[k + 1]),
            0.5 * (frame.zeta2[k] + frame.zeta2[k + 1]),
            0.5 * (frame.h1[k] + out1),
            0.5 * (frame.h2[k] + out2),
        )
        beta_mid = tau[k] + 0.5 * db
        f1 = _rhs(q[0] + 0.5 * db * e1, tau[k + 1], beta_mid, *dmid)
        f2 = _rhs(q[1] + 0.5 * db * e2, tau[k + 1], beta_mid, *dmid)
        out1 = q[0] + db * f1
        out2 = q[1] + db * f2
    return out1, out2


def _assemble_r(frame: EigenFrame) -> np.ndarray:
    z1, z2, h1, h2 = frame.zeta1, frame.zeta2, frame.h1, frame.h2
    gap = h2 - h1
    r = np.empty((frame.mesh.n, 2, 2), dtype=np.complex128)
    r[:, 0, 0] = (z1 * h2 - z2 * h1) / gap
    r[:, 0, 1] = (z2 - z1) / gap
    r[:, 1, 0] = h1 * h2 * (z1 - z2) / gap
    r[:, 1, 1] = (h2 * z2 - h1 * z1) / gap
    return r


def reconstruct(
    coef: JumpCoefficient,
    mesh: ContourMesh,
    tol: Tolerances | None = None,
    final_step: str = "euler",
) -> ReconstructedCoefficient:
    """Stage 1: reconstruct the residue field r(tau) at the mesh nodes.

    Fast paths: a jump that is the identity on every node yields r = 0 (so
    U = I exactly); a diagonal jump yields r = diag(log m / (-2 pi i), ...)
    directly. Otherwise the slopes are marched; see _march.
    """
    if final_step not in ("euler", "heun"):
        raise ValueError(f"final_step must be 'euler' or 'heun', got {final_step!r}")
    tol = tol or Tolerances()
    t0 = time.perf_counter()
    m = _sample_jump(coef, mesh)
    n = mesh.n
    dev = np.abs(m - np.eye(2))
    if coef.decays and mat_norm(m[0] - np.eye(2)) > tol.truncation_warn:
        warnings.warn(
            f"jump still {mat_norm(m[0] - np.eye(2)):.2e} from I at the truncation "
            "point; consider raising truncation_height",
            TruncationWarning,
            stacklevel=2,
        )
    if dev.max() <= tol.identity_tol:
        rc = ReconstructedCoefficient(
            mesh=mesh,
            r_values=np.zeros((n, 2, 2), dtype=np.complex128),
            kind="identity",
            coef=coef,
        )
        rc.stage1_seconds = time.perf_counter() - t0
        return rc
    scale = np.abs(m).max()
    if max(np.abs(m[:, 0, 1]).max(), np.abs(m[:, 1, 0]).max()) <= (
        tol.diagonal_tol * scale
    ):
        lam1 = m[:, 0, 0].copy()
        lam2 = m[:, 1, 1].copy()
        zeta1 = _I_OVER_2PI * unwrap_log(lam1, anchor=0.0)
        zeta2 = _I_OVER_2PI * unwrap_log(lam2, anchor=0.0)
        frame = EigenFrame(mesh, lam1, lam2, np.full(n, np.nan, np.complex128),
                           np.full(n, np.nan, np.complex128), zeta1, zeta2)
        r = np.zeros((n, 2, 2), dtype=np.complex128)
        r[:, 0, 0] = zeta1
        r[:, 1, 1] = zeta2
        rc = ReconstructedCoefficient(
            mesh=mesh, r_values=r, kind="diagonal", frame=frame, coef=coef
        )
        rc.stage1_seconds = time.perf_counter() - t0
        return rc
    frame = build_frame(coef, mesh, tol)
    _march(frame, tol, final_step=final_step)
    rc = ReconstructedCoefficient(
        mesh=mesh, r_values=_assemble_r(frame), kind="general", frame=frame,
        coef=coef,
    )
    rc.stage1_seconds = time.perf_counter() - t0
    return rc


# ----------------------------------------------------------------------
# Stage 2: ordered-exponential transport to the evaluation points.


def _guard_points(mesh: ContourMesh, zs: np.ndarray) -> None:
    for z in zs:
        d = mesh.distance_to_segment(complex(z))
        if d <= 0.5 * mesh.step:
            raise PoleTooClose(
                f"evaluation point {z} within step/2 of the contour "
                f"(distance {d:.3e})",
                point=complex(z),
            )


def _transport(rc: ReconstructedCoefficient, zs: np.ndarray) -> np.ndarray:
    """RK4 ordered exponential of r/(z - tau) down the mesh, batched over z.

    Matches CauchyKernelField sampling: r averaged onto midpoints, the
    kernel factor exact at every stage abscissa.
    """
    nodes = rc.mesh.nodes
    r = rc.r_values
    k_points = zs.shape[0]
    y = np.empty((k_points, 2, 2), dtype=np.complex128)
    y[:] = np.eye(2)
    zc = zs[:, None, None]
    for k in range(rc.mesh.n - 1):
        dt = nodes[k + 1] - nodes[k]
        rmid = 0.5 * (r[k] + r[k + 1])
        b0 = r[k] / (zc - nodes[k])
        bm = rmid / (zc - (nodes[k] + 0.5 * dt))
        b1 = r[k + 1] / (zc - nodes[k + 1])
        k1 = b0 @ y
        k2 = bm @ (y + (0.5 * dt) * k1)
        k3 = bm @ (y + (0.5 * dt) * k2)
        k4 = b1 @ (y + dt * k3)
        y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


def evaluate_U(rc: ReconstructedCoefficient, z: complex) -> np.ndarray:
    """The canonical factor U at one point off the cut.

    U is the ordered exponential of r(tau)/(z - tau) along the cut walked
    from the truncation point down to the base, so U -> I far from the cut.
    """
    zs = np.array([complex(z)], dtype=np.complex128)
    _guard_points(rc.mesh, zs)
    return _transport(rc, zs)[0]


def evaluate_U_many(
    rc: ReconstructedCoefficient, zs, workers: int | None = None
) -> np.ndarray:
    """Batched evaluate_U; rows follow the input order.

    workers > 1 splits the points across a thread pool in contiguous chunks
    (each chunk is vectorized); the result is identical to workers = 1.
    """
    pts = np.asarray(zs, dtype=np.complex128).ravel()
    _guard_points(rc.mesh, pts)
    if pts.size == 0:
        return np.empty((0, 2, 2), dtype=np.complex128)
    w = workers if workers and workers > 0 else (cpu_count() or 1)
    w = min(w, pts.size)
    if w == 1:
        return _transport(rc, pts)
    chunks = np.array_split(np.arange(pts.size), w)
    out = np.empty((pts.size, 2, 2), dtype=np.complex128)
    with ThreadPoolExecutor(max_workers=w) as pool:
        futs = [(idx, pool.submit(_transport, rc, pts[idx])) for idx in chunks]
        for idx, fut in futs:
            out[idx] = fut.result()
    return out


# ----------------------------------------------------------------------
# Residual diagnostics.


def jump_residual(
    rc: ReconstructedCoefficient,
    z_on_cut: complex,
    offset: float | None = None,
    coef: JumpCoefficient | None = None,
) -> float:
    """Relative defect of U(z+d) = U(z-d) M(z) straddling the cut at z.

    offset d defaults to 10 * step. The point must lie strictly between the
    cut base and the truncation point.
    """
    from .jumps import eval_jump

    coef = coef or rc.coef
    if coef is None:
        raise ValueError("no coefficient attached; pass coef= explicitly")
    z = complex(z_on_cut)
    mesh = rc.mesh
    if abs(z.real - mesh.base.real) > 1e-9 * (1.0 + abs(z.real)) or not (
        mesh.base.imag < z.imag < mesh.top.imag
    ):
        raise ValueError(f"{z} does not lie on the open cut segment")
    d = 10.0 * mesh.step if offset is None else float(offset)
    if d <= 0.5 * mesh.step:
        raise PoleTooClose(
            f"offset {d} does not clear the contour guard band", point=z
        )
    m = eval_jump(coef, z)
    u_plus = evaluate_U(rc, z + d)
    u_minus = evaluate_U(rc, z - d)
    return mat_norm(u_plus - u_minus @ m) / mat_norm(m)


def det_identity_residual(rc: ReconstructedCoefficient, z: complex,
                          u: np.ndarray | None = None) -> float:
    """Relative defect of det U(z) against exp(-integral of trace r/(z-tau)).

    The determinant of the transported factor must match the scalar solution
    driven by the trace of r; both sides are second order in step. Pass a
    precomputed U(z) to skip the transport.
    """
    expected = np.exp(-cauchy_quadrature(rc.trace_r, rc.mesh, complex(z)))
    if u is None:
        u = evaluate_U(rc, complex(z))
    actual = u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0]
    return abs(actual - expected) / abs(expected)


def loop_identity_residual(frame: EigenFrame, m_values: np.ndarray) -> float:
    """Max relative defect of T exp(-2 pi i diag(zeta)) T^-1 = M over nodes.

    Exact up to roundoff by construction; a failure means the eigenvalue /
    slope pairing or the log branches went wrong. Frames built from a
    diagonal jump carry no slope representation (t1/t2 are NaN); there the
    frame matrix is the identity and the check reduces to
    exp(-2 pi i zeta_i) = m_ii per node.
    """
    lam1 = np.exp(_MINUS_2PI_I * frame.zeta1)
    lam2 = np.exp(_MINUS_2PI_I * frame.zeta2)
    t1, t2 = frame.t1, frame.t2
    den = np.abs(m_values).max(axis=(1, 2))
    if not (np.isfinite(t1).all() and np.isfinite(t2).all()):
        num = np.maximum(
            np.abs(lam1 - m_values[:, 0, 0]),
            np.abs(lam2 - m_values[:, 1, 1]),
        )
        num = np.maximum(num, np.abs(m_values[:, 0, 1]))
        num = np.maximum(num, np.abs(m_values[:, 1, 0]))
        return float((num / den).max())
    gap = t2 - t1
    rec = np.empty_like(m_values)
    rec[:, 0, 0] = (lam1 * t2 - lam2 * t1) / gap
    rec[:, 0, 1] = (lam2 - lam1) / gap
    rec[:, 1, 0] = t1 * t2 * (lam1 - lam2) / gap
    rec[:, 1, 1] = (t2 * lam2 - t1 * lam1) / gap
    num = np.abs(rec - m_values).max(axis=(1, 2))
    return float((num / den).max())


# ----------------------------------------------------------------------
# Stage-1 cache: line-oriented text, one node per line.


def save_stage1(rc: ReconstructedCoefficient, path) -> None:
    """Write the reconstructed field: a header with the cut base, truncation
    point, step and coefficient hash, then per node the node height and the
    eight real components of r. 17 significant digits round-trip exactly.
    """
    mesh = rc.mesh
    chash = rc.coef.cache_hash() if rc.coef is not None else (
        (rc.cache_header or {}).get("hash", "unknown")
    )
    g = "{:.17g}"
    lines = [
        " ".join(
            [
                g.format(mesh.base.real),
                g.format(mesh.base.imag),
                g.format(mesh.top.real),
                g.format(mesh.top.imag),
                g.format(mesh.step),
                chash,
            ]
        )
    ]
    for j in range(mesh.n):
        row = [g.format(mesh.nodes[j].imag)]
        for i in range(2):
            for l in range(2):
                v = rc.r_values[j, i, l]
                row.append(g.format(v.real))
                row.append(g.format(v.imag))
        lines.append(" ".join(row))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_stage1(path, coef: JumpCoefficient | None = None) -> ReconstructedCoefficient:
    """Read a stage-1 cache back into a ReconstructedCoefficient.

    When a coefficient is supplied its hash must match the header; the mesh
    geometry is rebuilt from the stored node heights.
    """
    from .mesh import HalfLineCut

    with open(path, "r", encoding="ascii") as fh:
        raw = [ln for ln in (line.strip() for line in fh) if ln]
    if len(raw) < 4:
        raise CacheMismatch(f"cache {path} too short to hold a 3-node mesh")
    head = raw[0].split()
    if len(head) != 6:
        raise CacheMismatch(f"cache header has {len(head)} fields, expected 6")
    b = complex(float(head[0]), float(head[1]))
    top = complex(float(head[2]), float(head[3]))
    step = float(head[4])
    chash = head[5]
    if coef is not None and coef.cache_hash() != chash:
        raise CacheMismatch(
            f"cache was built for coefficient {chash}, got {coef.cache_hash()}"
        )
    n = len(raw) - 1
    nodes = np.empty(n, dtype=np.complex128)
    r = np.empty((n, 2, 2), dtype=np.complex128)
    for j, line in enumerate(raw[1:]):
        parts = line.split()
        if len(parts) != 9:
            raise CacheMismatch(f"node line {j} has {len(parts)} fields, expected 9")
        vals = [float(p) for p in parts]
        nodes[j] = complex(b.real, vals[0])
        r[j, 0, 0] = complex(vals[1], vals[2])
        r[j, 0, 1] = complex(vals[3], vals[4])
        r[j, 1, 0] = complex(vals[5], vals[6])
        r[j, 1, 1] = complex(vals[7], vals[8])
    if nodes[0] != top or nodes[-1] != b:
        raise CacheMismatch("node heights disagree with the cache header")
    if not np.all(np.diff(nodes.imag) < 0.0):
        raise CacheMismatch("cache nodes are not strictly descending")
    mesh = ContourMesh(cut=HalfLineCut(b), step=step, nodes=nodes)
    return ReconstructedCoefficient(
        mesh=mesh,
        r_values=r,
        kind="cached",
        coef=coef,
        cache_header={
            "base": b,
            "top": top,
            "step": step,
            "hash": chash,
        },
    )
