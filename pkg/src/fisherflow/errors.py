"""Exception hierarchy shared across the library."""


class GeometryError(Exception):
    """Base class for all fisherflow errors."""


class DimensionMismatch(GeometryError):
    """Operands live on state spaces of incompatible sizes."""


class NonPositiveEntry(GeometryError):
    """A probability vector contains an entry at or below the zero guard."""


class SingularPoint(GeometryError):
    """A model Jacobian or Fisher block is numerically rank-deficient.

    Attributes:
        singular_value: the offending singular value, when known.
        node: index of the offending Bayes-net node, for block solves.
    """

    def __init__(self, message, singular_value=None, node=None):
        super().__init__(message)
        self.singular_value = singular_value
        self.node = node


class RangeMismatch(GeometryError):
    """The pushforward of a joint model tangent space does not match the
    tangent space of the supplied visible model."""


class MissingRecognition(GeometryError):
    """An operation needing a fixed recognition distribution q was called
    on a context without one."""


class StepTooLarge(GeometryError):
    """A probe or descent step left the strictly positive simplex."""


class ConfigError(GeometryError):
    """Malformed experiment configuration or CLI usage (exit code 2)."""


class NearSingularFisherWarning(UserWarning):
    """Fisher solve fell back to the eigenvalue-clipped pseudo-inverse."""
