"""Exception types shared across the package."""


class UpoblabError(Exception):
    """Base class for all package errors."""


class ShapeError(UpoblabError):
    """Operands have incompatible or invalid shapes."""


class SizeError(UpoblabError):
    """A result would exceed the configured dimension cap."""


class EmptyInputError(UpoblabError):
    """An operation received an empty collection where members are required."""


class SingularError(UpoblabError):
    """A numerically singular matrix where an invertible one is required."""


class ConfigError(UpoblabError):
    """Invalid parameter or configuration value."""


class NoWitnessError(UpoblabError):
    """A witness was requested for a partition with a full local span."""


class InvalidBaseError(UpoblabError):
    """The base operator set fails the orthonormality precondition."""


class InvalidWitnessError(UpoblabError):
    """Witness construction parameters violate their structural constraints."""


class InvalidEffectError(UpoblabError):
    """A measurement effect is not positive semidefinite below the identity."""


class EmbeddingError(UpoblabError):
    """A state lies outside the support required by an embedding."""
