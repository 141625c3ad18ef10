"""Half-line 2x2 matrix jump factorization by ordered-exponential transport.

Stage 1 reconstructs the residue field of the canonical factor along the
cut by marching a scalar Riccati equation for the eigenvector slope.
Stage 2 evaluates the factor anywhere off the cut by fourth-order transport
of the ordered exponential with a Cauchy-kernel coefficient.
"""

from .config import RunConfig, parse_config
from .errors import (
    BadMeshSpec,
    BranchJumpTooLarge,
    CacheMismatch,
    ConfigError,
    DegenerateFrame,
    DegenerateSpectrum,
    EvaluationFailure,
    ParametrizationBreakdown,
    PoleHit,
    PoleTooClose,
    RhodeError,
    RiccatiBlowup,
    SingularMatrix,
    UnsupportedFamily,
    ZeroArgument,
)
from .jumps import (
    ConstantCoefficient,
    JumpCoefficient,
    KhrapkovCoefficient,
    RationalCoefficient,
    RationalFn,
    ScalarCoefficient,
    demo_coefficient,
    khrapkov_f,
    lift_scalar,
)
from .linalg import EigenPair, eig2, mat_inv, mat_norm, unwrap_log
from .mesh import ContourMesh, HalfLineCut, build_mesh, cauchy_quadrature
from .modes import (
    SolveReport,
    run_converge,
    run_mode,
    run_oracle_compare,
    run_solve,
    run_validate,
)
from .oracles import (
    KhrapkovSolution,
    khrapkov_canonical_correction,
    khrapkov_canonical_many,
    khrapkov_solve,
    khrapkov_xi_eta,
    scalar_cauchy_solve,
)
from .ordexp import CauchyKernelField, SampledField, ordered_exp
from .solver import (
    EigenFrame,
    ReconstructedCoefficient,
    Tolerances,
    TruncationWarning,
    build_frame,
    det_identity_residual,
    evaluate_U,
    evaluate_U_many,
    jump_residual,
    load_stage1,
    loop_identity_residual,
    reconstruct,
    replay_trajectory,
    riccati_rhs,
    save_stage1,
)

__version__ = "0.1.0"

__all__ = [
    "BadMeshSpec",
    "BranchJumpTooLarge",
    "CacheMismatch",
    "CauchyKernelField",
    "ConfigError",
    "ConstantCoefficient",
    "ContourMesh",
    "DegenerateFrame",
    "DegenerateSpectrum",
    "EigenFrame",
    "EigenPair",
    "EvaluationFailure",
    "HalfLineCut",
    "JumpCoefficient",
    "KhrapkovCoefficient",
    "KhrapkovSolution",
    "ParametrizationBreakdown",
    "PoleHit",
    "PoleTooClose",
    "RationalCoefficient",
    "RationalFn",
    "ReconstructedCoefficient",
    "RhodeError",
    "RiccatiBlowup",
    "RunConfig",
    "SampledField",
    "ScalarCoefficient",
    "SingularMatrix",
    "SolveReport",
    "Tolerances",
    "TruncationWarning",
    "UnsupportedFamily",
    "ZeroArgument",
    "build_frame",
    "build_mesh",
    "cauchy_quadrature",
    "demo_coefficient",
    "det_identity_residual",
    "eig2",
    "evaluate_U",
    "evaluate_U_many",
    "jump_residual",
    "khrapkov_canonical_correction",
    "khrapkov_canonical_many",
    "khrapkov_f",
    "khrapkov_solve",
    "khrapkov_xi_eta",
    "lift_scalar",
    "load_stage1",
    "loop_identity_residual",
    "mat_inv",
    "mat_norm",
    "parse_config",
    "reconstruct",
    "replay_trajectory",
    "riccati_rhs",
    "run_converge",
    "run_mode",
    "run_oracle_compare",
    "run_solve",
    "run_validate",
    "save_stage1",
    "scalar_cauchy_solve",
    "unwrap_log",
]
