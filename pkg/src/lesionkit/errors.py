"""Exception hierarchy shared across the toolkit.

Validation-class errors (bad inputs, malformed files) derive from
ValidationFailure so the CLI can map them to exit code 1; everything else
is a runtime error (exit code 2).
"""


class LesionKitError(Exception):
    """Base class for all toolkit errors."""


class ValidationFailure(LesionKitError):
    """Input data failed validation (bad file, bad schema, bad value)."""


# -- geometry / morphometry ------------------------------------------------

class EmptyMask(ValidationFailure):
    pass


class DegenerateRegion(ValidationFailure):
    pass


class InvalidContour(ValidationFailure):
    pass


# -- selection / statistics ------------------------------------------------

class ShapeMismatch(ValidationFailure):
    pass


class ZeroVariance(LesionKitError):
    pass


class SingleClass(ValidationFailure):
    pass


class Separation(LesionKitError):
    """Perfect separation: the MLE diverges, no finite fit exists."""


class RankDeficient(LesionKitError):
    pass


class NonConvergence(LesionKitError):
    pass


# -- encoding / nomogram ---------------------------------------------------

class UnknownLevel(ValidationFailure):
    pass


class ZeroRange(ValidationFailure):
    pass


# -- io / artifacts ---------------------------------------------------------

class ParseError(ValidationFailure):
    pass


class SchemaViolation(ValidationFailure):
    pass


class JoinError(ValidationFailure):
    pass


class VersionMismatch(ValidationFailure):
    pass


class ChecksumMismatch(ValidationFailure):
    pass
