"""Shared fixtures: the reference problem solved once per session."""

import time
import warnings

import numpy as np
import pytest

from rhode import (
    HalfLineCut,
    build_mesh,
    demo_coefficient,
    evaluate_U_many,
    khrapkov_canonical_many,
    khrapkov_xi_eta,
    reconstruct,
)

REFERENCE_STEP = 0.02
REFERENCE_HEIGHT = 80.0
LINE_IM = 1.8
FAR_POINT = 2000.0 + 1.8j


@pytest.fixture(scope="session")
def demo_coef():
    return demo_coefficient()


@pytest.fixture(scope="session")
def demo_mesh(demo_coef):
    return build_mesh(HalfLineCut(demo_coef.base), REFERENCE_HEIGHT,
                      REFERENCE_STEP)


@pytest.fixture(scope="session")
def demo_rc(demo_coef, demo_mesh):
    """Full-resolution residue-field reconstruction of the reference problem.

    The slow decay of the reference coefficient makes the truncation warning
    fire by design; it is asserted separately.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return reconstruct(demo_coef, demo_mesh)


@pytest.fixture(scope="session")
def line_points():
    return np.linspace(-10.0, 10.0, 100) + 1j * LINE_IM


@pytest.fixture(scope="session")
def demo_u(demo_rc, line_points):
    """Transported factor on the evaluation line, with wall time."""
    t0 = time.perf_counter()
    u = evaluate_U_many(demo_rc, line_points)
    return u, time.perf_counter() - t0


@pytest.fixture(scope="session")
def demo_oracle(demo_coef, demo_mesh, line_points):
    """Corrected closed-form factor on the evaluation line."""
    sol = khrapkov_xi_eta(demo_coef, demo_mesh)
    return khrapkov_canonical_many(sol, line_points, FAR_POINT)
