"""Exception types raised by the rhode solver stack.

Every failure that names a mesh node or evaluation point carries it as an
attribute so callers (and the CLI) can report locations without parsing
message strings.
"""


class RhodeError(Exception):
    """Base class for all rhode errors."""


class SingularMatrix(RhodeError):
    """2x2 inverse requested for a matrix with negligible determinant."""


class ParametrizationBreakdown(RhodeError):
    """Eigenvector slope t = (lambda - m11)/m12 undefined: |m12| ~ 0.

    Carries .node when raised while framing a sampled coefficient.
    """

    def __init__(self, msg, node=None):
        super().__init__(msg)
        self.node = node


class DegenerateSpectrum(RhodeError):
    """Eigenvalues coincide to working precision."""

    def __init__(self, msg, node=None):
        super().__init__(msg)
        self.node = node


class BranchJumpTooLarge(RhodeError):
    """Consecutive samples jump by a phase >= pi; log branch is ambiguous."""

    def __init__(self, msg, index=None):
        super().__init__(msg)
        self.index = index


class BadMeshSpec(RhodeError):
    """Mesh parameters are unusable (bad step, height, or node count)."""


class PoleTooClose(RhodeError):
    """Evaluation point sits within half a step of the contour."""

    def __init__(self, msg, point=None):
        super().__init__(msg)
        self.point = point


class EvaluationFailure(RhodeError):
    """A coefficient entry could not be evaluated (vanishing denominator)."""

    def __init__(self, msg, point=None, node=None):
        super().__init__(msg)
        self.point = point
        self.node = node


class RiccatiBlowup(RhodeError):
    """Marched Riccati variable exceeded the blowup cap.

    .node is the target node of the offending trajectory, .branch is 1 or 2.
    """

    def __init__(self, msg, node=None, branch=None):
        super().__init__(msg)
        self.node = node
        self.branch = branch


class DegenerateFrame(RhodeError):
    """Frame slopes h1, h2 collide; the conjugation frame is singular."""

    def __init__(self, msg, node=None):
        super().__init__(msg)
        self.node = node


class PoleHit(RhodeError):
    """Riccati right-hand side evaluated exactly at beta = z."""


class LogBranchFailure(RhodeError):
    """A branch-tracked logarithm could not be continued."""

    def __init__(self, msg, index=None):
        super().__init__(msg)
        self.index = index


class ZeroArgument(RhodeError):
    """Logarithm (or branch track) hit a zero argument."""

    def __init__(self, msg, index=None):
        super().__init__(msg)
        self.index = index


class UnsupportedFamily(RhodeError):
    """Requested operation is not defined for this coefficient family."""


class ConfigError(RhodeError):
    """Run configuration file is malformed or inconsistent."""


class CacheMismatch(RhodeError):
    """Stage-1 cache header disagrees with the requested run."""
