"""Ordered exponential of a sampled 2x2 matrix field along the mesh.

Solves dY/dtau = B(tau) Y node-to-node with one classical RK4 step per mesh
interval. Midpoint samples come from averaging the two node values; a field
backed by a Cauchy kernel r(tau)/(z - tau) instead evaluates the kernel
factor exactly at the midpoint abscissa and only averages r.
"""

from __future__ import annotations

import numpy as np

from .errors import PoleTooClose
from .linalg import mat_norm
from .mesh import ContourMesh, _guard_pole


class SampledField:
    """Field known through its (n, 2, 2) node samples."""

    def __init__(self, mesh: ContourMesh, values):
        v = np.asarray(values, dtype=np.complex128)
        if v.shape != (mesh.n, 2, 2):
            raise ValueError(f"expected {(mesh.n, 2, 2)} samples, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field samples must be finite")
        self.mesh = mesh
        self.values = v

    def at_node(self, j: int) -> np.ndarray:
        return self.values[j]

    def at_midpoint(self, j: int) -> np.ndarray:
        """Field between nodes j and j+1 (plain average)."""
        return 0.5 * (self.values[j] + self.values[j + 1])


class CauchyKernelField(SampledField):
    """B(tau) = r(tau)/(z - tau) with r sampled at the nodes.

    The 1/(z - tau) factor is exact at node and midpoint abscissae; only r is
    interpolated. z must keep clear of the contour by more than step/2.
    """

    def __init__(self, mesh: ContourMesh, r_values, z: complex):
        super().__init__(mesh, r_values)
        self.z = complex(z)
        _guard_pole(mesh, self.z)

    def at_node(self, j: int) -> np.ndarray:
        return self.values[j] / (self.z - self.mesh.nodes[j])

    def at_midpoint(self, j: int) -> np.ndarray:
        mid = 0.5 * (self.mesh.nodes[j] + self.mesh.nodes[j + 1])
        return 0.5 * (self.values[j] + self.values[j + 1]) / (self.z - mid)


def ordered_exp(field: SampledField, from_index: int, to_index: int) -> np.ndarray:
    """Ordered exponential OE[B] from one mesh node to another.

    Integrates dY/dtau = B(tau) Y with Y = I at nodes[from_index], one RK4
    step per interval, walking node order in either direction. Returns Y at
    nodes[to_index].
    """
    n = field.mesh.n
    i, j = int(from_index), int(to_index)
    for idx in (i, j):
        if not 0 <= idx < n:
            raise IndexError(f"node index {idx} outside 0..{n - 1}")
    nodes = field.mesh.nodes
    y = np.eye(2, dtype=np.complex128)
    if i == j:
        return y
    direction = 1 if j > i else -1
    k = i
    while k != j:
        nxt = k + direction
        dt = nodes[nxt] - nodes[k]
        b0 = field.at_node(k)
        bm = field.at_midpoint(min(k, nxt))
        b1 = field.at_node(nxt)
        k1 = b0 @ y
        k2 = bm @ (y + (0.5 * dt) * k1)
        k3 = bm @ (y + (0.5 * dt) * k2)
        k4 = b1 @ (y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        k = nxt
    return y


def oe_concat_check(field: SampledField, i: int, j: int, k: int) -> float:
    """Residual of OE(i->k) = OE(j->k) OE(i->j) in max-norm.

    Zero to roundoff when j lies between i and k: the discrete steps then
    compose exactly and only the extra matrix product rounds.
    """
    whole = ordered_exp(field, i, k)
    first = ordered_exp(field, i, j)
    second = ordered_exp(field, j, k)
    return mat_norm(whole - second @ first)


def oe_inverse_check(field: SampledField, i: int, j: int) -> float:
    """Residual of OE(i->j) OE(j->i) = I in max-norm; O(step^4) small."""
    fwd = ordered_exp(field, i, j)
    back = ordered_exp(field, j, i)
    return mat_norm(fwd @ back - np.eye(2))
