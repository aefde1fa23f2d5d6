"""Exception types shared across the package."""


class JunctionFlowError(Exception):
    """Base class for all package errors."""


class NonFiniteInput(JunctionFlowError):
    """An angle or coordinate was NaN or infinite."""


class DegenerateParametrization(JunctionFlowError):
    """|p_x| fell below the configured floor delta_min somewhere on a curve."""


class IndexOutOfRange(JunctionFlowError):
    """Sample index outside the valid interior range."""


class EmptyInput(JunctionFlowError):
    """An operation received fewer samples than it needs."""


class KinkPoint(JunctionFlowError):
    """sigma' was requested at a corner of the even/periodic extension.

    Callers must clamp or halt; silently picking a one-sided slope would
    corrupt the rotation ODE.
    """


class SigmaNonpositive(JunctionFlowError):
    """A surface tension value dropped to <= 0 during evolution."""


class AnchorSingularity(JunctionFlowError):
    """The junction position coincides with an anchor (distance terms blow up)."""


class GeometricCompatibilityRequired(JunctionFlowError):
    """reparametrize_to_compatible needs geometrically compatible input."""


class NonMonotoneReparametrization(JunctionFlowError):
    """The quintic reparametrization overshot and is not a diffeomorphism."""


class DegenerateFrozenCoefficient(JunctionFlowError):
    """A frozen diffusion coefficient of the linearized system is <= 0."""


class InputGridMismatch(JunctionFlowError):
    """Space-time input fields do not match the problem grid."""


class ConstructionFailed(JunctionFlowError):
    """A scenario builder could not meet its stated geometric properties."""


class ConfigError(JunctionFlowError):
    """A scenario configuration failed validation."""
