"""Exception hierarchy.

Every error a user can trigger through bad input derives from
:class:`ValidationError`, which the CLI maps to exit code 2.
"""


class ValidationError(ValueError):
    """Input violates a documented precondition."""

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": str(self)}


# channel_model
class NegativeEntry(ValidationError):
    pass


class RowSumMismatch(ValidationError):
    def __init__(self, message: str, triple: tuple[int, ...]):
        super().__init__(message)
        self.triple = triple

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["triple"] = list(self.triple)
        return d


class LengthMismatch(ValidationError):
    pass


# info_measures
class UnknownVariable(ValidationError):
    pass


class OverlappingSets(ValidationError):
    pass


class NumericIntegrityError(ArithmeticError):
    """A conditional mutual information came out clearly negative."""


class JointTooLarge(ValidationError):
    pass


# aux_distributions
class SignatureMismatch(ValidationError):
    pass


class CardinalityMismatch(ValidationError):
    pass


class UnknownScheme(ValidationError):
    pass


# region_engine
class ModeSchemeMismatch(ValidationError):
    pass


class UndeclaredVariableInDef(ValidationError):
    pass


# bounds_capacity / corollary_regions
class NotDegraded(ValidationError):
    pass


class SchemeMismatch(ValidationError):
    pass


class IncompatibleChannel(ValidationError):
    pass


class UnboundedRegion(ValidationError):
    pass


# coding_simulator
class IndexSpaceTooLarge(ValidationError):
    pass
