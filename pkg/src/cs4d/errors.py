"""Exception types shared across the engine."""


class CS4DError(Exception):
    """Base class for engine errors."""


class DimensionError(CS4DError):
    """Invalid matrix or chart dimension."""


class ShapeError(CS4DError):
    """Mismatched shapes or incompatible operands."""


class NumericError(CS4DError):
    """Non-finite input or numerically meaningless request."""


class SingularJetError(CS4DError):
    """Jet inversion requested for a singular value matrix."""


class DegreeOverflowError(CS4DError):
    """Form degree would exceed the number of chart variables."""


class DomainMismatchError(CS4DError):
    """Fields or forms attached to incompatible domains."""


class SewError(CS4DError):
    """Hemisphere fields disagree on the equator."""

    def __init__(self, message, discrepancy):
        super().__init__(f"{message} (max discrepancy {discrepancy:.3e})")
        self.discrepancy = discrepancy


class NotFlatError(CS4DError):
    """A connection required to be flat has a curvature residual above tolerance."""


class SolverError(CS4DError):
    """Linear solver failed to converge or operator is near singular."""


class UnknownCochainError(CS4DError):
    """Requested cochain index is outside the descent table."""


class UnsupportedFieldError(CS4DError):
    """Operation not defined for this field expression."""


class ConfigError(CS4DError):
    """Invalid suite configuration."""
