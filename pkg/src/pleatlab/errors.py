"""Exception hierarchy shared by every pleatlab module."""


class PleatlabError(Exception):
    """Base class for all errors raised by pleatlab."""


class GeometryError(PleatlabError, ValueError):
    """Input does not describe a valid geometric object (off-sheet point,
    non-orthogonal tangent, walls not in general position, ...)."""


class DomainError(PleatlabError, ValueError):
    """Argument outside the domain of a closed-form function."""


class ConfigurationError(PleatlabError, ValueError):
    """Unsupported dimension, step size, height, wall count, etc."""


class BracketError(PleatlabError, RuntimeError):
    """A monotone root search could not bracket its target."""


class IntegrationError(PleatlabError, RuntimeError):
    """The curve integrator drifted off its constraint manifold."""


class InconclusiveError(PleatlabError, RuntimeError):
    """A numeric test landed inside its safety margin and cannot decide."""
