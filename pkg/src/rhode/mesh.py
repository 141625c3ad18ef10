"""Vertical half-line cut, its truncated mesh, and Cauchy-kernel quadrature.

The cut runs from a base point b straight up. A mesh truncates it at height
Im(B) and lists nodes top-down: nodes[0] = B, nodes[-1] = b. All marching and
transport in this package walks these nodes in storage order (downward).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadMeshSpec, PoleTooClose

# Relative slack when deciding whether step divides the mesh span evenly.
_DIVISIBILITY_RTOL = 1e-6


@dataclass(frozen=True)
class HalfLineCut:
    """Cut (b, b + i*inf): base point plus the fixed upward direction."""

    base: complex

    def __post_init__(self):
        b = complex(self.base)
        if not (np.isfinite(b.real) and np.isfinite(b.imag)):
            raise BadMeshSpec("cut base must be finite")
        object.__setattr__(self, "base", b)


@dataclass(frozen=True)
class ContourMesh:
    """Nodes of a truncated cut, strictly descending in imaginary part.

    nodes[j] = top - j*step*1j for all interior nodes; the final node is the
    cut base exactly, so the last interval may be shorter than step when the
    span is not an integer multiple of step.
    """

    cut: HalfLineCut
    step: float
    nodes: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return int(self.nodes.size)

    @property
    def base(self) -> complex:
        return complex(self.nodes[-1])

    @property
    def top(self) -> complex:
        return complex(self.nodes[0])

    def intervals(self) -> np.ndarray:
        """Signed steps tau[j+1] - tau[j]; negative imaginary (downward)."""
        return np.diff(self.nodes)

    def distance_to_segment(self, z: complex) -> float:
        """Distance from z to the closed segment [base, top]."""
        z = complex(z)
        b, t = self.base, self.top
        dy = min(max(z.imag, b.imag), t.imag) - z.imag
        return float(np.hypot(z.real - b.real, dy))


def build_mesh(cut: HalfLineCut, truncation_height: float, step: float) -> ContourMesh:
    """Mesh the cut from its base up to Re(b) + i*truncation_height.

    step must be positive and the height must clear the base by at least two
    steps (a mesh needs three nodes). When step does not divide the span to
    one part in 1e6 the node count rounds up and the last interval shrinks.
    """
    b = complex(cut.base)
    h = float(truncation_height)
    s = float(step)
    if not np.isfinite(s) or s <= 0.0:
        raise BadMeshSpec(f"step must be positive and finite, got {step!r}")
    if not np.isfinite(h) or h <= b.imag:
        raise BadMeshSpec(
            f"truncation height {truncation_height!r} must exceed Im(base) = {b.imag}"
        )
    span = h - b.imag
    ratio = span / s
    n_intervals = int(round(ratio))
    if abs(ratio - n_intervals) > _DIVISIBILITY_RTOL * max(1, n_intervals):
        n_intervals = int(np.ceil(ratio))
    if n_intervals < 2:
        raise BadMeshSpec(
            f"span {span} over step {s} yields {n_intervals + 1} nodes; need >= 3"
        )
    im = h - s * np.arange(n_intervals + 1, dtype=np.float64)
    im[-1] = b.imag
    if not np.all(np.diff(im) < 0.0):
        raise BadMeshSpec("nodes failed to come out strictly descending")
    nodes = im * 1j + b.real
    return ContourMesh(cut=cut, step=s, nodes=nodes)


def _guard_pole(mesh: ContourMesh, z: complex) -> None:
    d = mesh.distance_to_segment(z)
    if d <= 0.5 * mesh.step:
        raise PoleTooClose(
            f"point {z} lies within step/2 = {0.5 * mesh.step} of the contour "
            f"(distance {d:.3e})",
            point=z,
        )


def cauchy_quadrature(samples, mesh: ContourMesh, z: complex) -> complex:
    """Trapezoid approximation of the integral of f(tau)/(z - tau) over the
    mesh, oriented from the cut base up to the truncation point.

    samples holds f at the mesh nodes (storage order, top-down). Second order
    accurate in step. Raises PoleTooClose when z is within step/2 of the
    contour segment.
    """
    f = np.asarray(samples, dtype=np.complex128)
    if f.shape != mesh.nodes.shape:
        raise ValueError(f"got {f.shape} samples for {mesh.n} nodes")
    z = complex(z)
    _guard_pole(mesh, z)
    g = f / (z - mesh.nodes)
    # Upward orientation: each interval contributes (tau[j] - tau[j+1]).
    up = -mesh.intervals()
    return complex(np.sum(0.5 * (g[:-1] + g[1:]) * up))
