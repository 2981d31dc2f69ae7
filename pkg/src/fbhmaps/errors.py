"""Exception hierarchy shared by all modules."""


class FBHError(Exception):
    """Base class; ``reason`` is the machine-readable tag used by the CLI."""

    reason = "FBHError"


class DimensionMismatch(FBHError, ValueError):
    reason = "DimensionMismatch"


class NotOrthonormal(FBHError, ValueError):
    reason = "NotOrthonormal"


class AmbiguousFit(FBHError):
    reason = "AmbiguousFit"


class NotOnBoundary(FBHError, ValueError):
    reason = "NotOnBoundary"


class InvalidTransform(FBHError):
    reason = "InvalidTransform"


class NotBallAut(FBHError):
    reason = "NotBallAut"


class NotFixingQ(FBHError):
    reason = "NotFixingQ"


class BranchCut(FBHError, ValueError):
    reason = "BranchCut"


class ZeroW(FBHError, ValueError):
    reason = "ZeroW"


class PoleAtMinusI(FBHError, ValueError):
    reason = "PoleAtMinusI"


class PoleAtMinusOne(FBHError, ValueError):
    reason = "PoleAtMinusOne"


class SchemaError(FBHError, ValueError):
    reason = "SchemaError"


class NotProper(FBHError):
    reason = "NotProper"


class NotClassifiedForm(FBHError):
    reason = "NotClassifiedForm"


class HypothesisViolated(FBHError):
    reason = "HypothesisViolated"


class FitFailed(FBHError):
    reason = "FitFailed"


class ConstraintResidualLarge(FBHError):
    reason = "ConstraintResidualLarge"


class NonGenericTarget(FBHError, ValueError):
    reason = "NonGenericTarget"
