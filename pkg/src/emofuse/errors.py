"""Exception hierarchy shared by all emofuse modules.

Domain errors map to CLI exit code 1, schema/IO errors to exit code 2.
"""


class EmofuseError(Exception):
    """Base class for every error raised by this package."""


class DomainError(EmofuseError):
    """A value or request violated a domain rule (CLI exit 1)."""


class SchemaError(EmofuseError):
    """A document did not match the expected schema (CLI exit 2)."""


class IoError(EmofuseError):
    """Reading or writing a file failed (CLI exit 2)."""


# --- probability vectors ---

class AllZero(DomainError):
    """Every component of a raw mass vector is zero."""


class NegativeMass(DomainError):
    """A mass component is negative."""


class ZeroConfidence(DomainError):
    """A prediction confidence of zero reached a weighting rule."""


# --- filename grammars ---

class MalformedName(DomainError):
    """A filename does not have the expected field count or shape."""


class UnknownEmotionCode(DomainError):
    """An emotion code outside the dataset's vocabulary."""


class UnknownIntensity(DomainError):
    """An intensity code outside the dataset's vocabulary."""


class FieldOutOfRange(DomainError):
    """A numeric filename field is outside its documented range."""


class NeutralStrongForbidden(DomainError):
    """Neutral emotion combined with strong intensity (not a valid name)."""


class InsufficientFiles(DomainError):
    """Not enough eligible files to build the requested holdout."""


# --- fusion ---

class NonPositiveWeight(DomainError):
    """A fusion weight is zero or negative."""


class MissingModality(DomainError):
    """A clip lacks a modality required by the requested fusion method."""


class InvalidParams(DomainError):
    """A parameter value is outside its documented range."""


# --- evaluation ---

class ValidationError(DomainError):
    """A manifest record failed semantic validation."""


class NoEligibleClips(DomainError):
    """No clip in the manifest qualifies for a requested method row."""


class LengthMismatch(DomainError):
    """Prediction and truth lists differ in length."""


class EmptyInput(DomainError):
    """An operation received an empty list where items are required."""


class UnsupportedFormat(DomainError):
    """An unknown report output format was requested."""
