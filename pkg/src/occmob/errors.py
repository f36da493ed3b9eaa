"""Exception hierarchy shared across the package."""


class MobilityError(Exception):
    """Base class for all package-specific failures."""


class InvalidPrimitivesError(MobilityError):
    """Deep-parameter vector violates its constraints (e.g. zero denominator)."""


class InvalidParamsError(MobilityError):
    """Model parameters violate a well-definedness inequality.

    Carries the violated inequalities as a list of strings in ``violations``.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid parameters: " + "; ".join(self.violations))


class DegenerateSupportError(MobilityError):
    """An endowment support has zero or negative width."""


class NonIdentifiableError(MobilityError):
    """The true-mobility matrix cannot be inverted to parameters."""


class NotStochasticError(MobilityError):
    """A matrix or share vector is too far from row-stochastic to ingest."""


class UndefinedIndexError(MobilityError):
    """A mobility index is undefined for this input (e.g. zero true mobility)."""


class DecompositionError(MobilityError):
    """The amendment procedure failed (singular matrix or non-convergence)."""


class EmptyClassError(MobilityError):
    """An occupational class has no usable observations."""


class DataError(MobilityError):
    """Input data cannot be parsed or fails a fatal sanity check."""
