# ---
# jupyter:
#   jupytext:
#     text_representation:
#       extension: .py
#       format_name: light
#       format_version: '1.5'
#       jupytext_version: 1.16.4
#   kernelspec:
#     display_name: Python (fixsplit-venv)
#     language: python
#     name: fixsplit-venv
# ---

class SplittingError(Exception):
    def __init__(self, message: str, context: str = "fixsplit"):
        """
        General-purpose error for the splitting library.

        Args:
            message (str): The error message describing what went wrong.
            context (str): The component where the error occurred.
        """
        self.context = context
        self.message = message
        super().__init__(f"[{context}] {message}")


# ---- numeric ----

class DivByZero(SplittingError):
    """Division of a scalar by the zero element."""
    def __init__(self, message: str = "division by zero", context: str = "numeric"):
        super().__init__(message, context)


class FieldMismatch(SplittingError):
    """Arithmetic between scalars of different fields or modes."""
    def __init__(self, message: str, context: str = "numeric"):
        super().__init__(message, context)


class InvalidField(SplittingError):
    """A number field description that is not monic, irreducible or correctly isolated."""
    def __init__(self, message: str, context: str = "numeric"):
        super().__init__(message, context)


# ---- planar ----

class DegenerateLattice(SplittingError):
    """Basis vectors are linearly dependent."""
    def __init__(self, message: str, context: str = "planar"):
        super().__init__(message, context)


class NotInLattice(SplittingError):
    """A vector expected to be a lattice element is not one."""
    def __init__(self, message: str, context: str = "planar"):
        super().__init__(message, context)


class ObtuseOrZero(SplittingError):
    """Angle measure requested outside the acute sector."""
    def __init__(self, message: str, context: str = "planar"):
        super().__init__(message, context)


class RationalDirection(SplittingError):
    """The direction is parallel to a lattice vector."""
    def __init__(self, message: str, context: str = "planar"):
        super().__init__(message, context)


class ZeroVector(SplittingError):
    """A nonzero vector was required."""
    def __init__(self, message: str, context: str = "planar"):
        super().__init__(message, context)


class ZeroDirection(ZeroVector):
    """A direction of length zero."""
    def __init__(self, message: str, context: str = "planar"):
        super().__init__(message, context)


# ---- splitting ----

class InvalidSplitting(SplittingError):
    """Exception raised when an operation needs a valid splitting and gets an invalid one."""
    def __init__(self, message: str, report=None, context: str = "splitting"):
        self.report = report
        super().__init__(message, context)


# ---- twist ----

class InvalidPartners(SplittingError):
    """A partner triple fails membership, primitivity, orientation or embedding conditions."""
    def __init__(self, message: str, context: str = "twist"):
        super().__init__(message, context)


class SameSideViolated(SplittingError):
    """Twist vector not on the same side of all partners."""
    def __init__(self, message: str, context: str = "twist"):
        super().__init__(message, context)


class ResultInvalid(SplittingError):
    """A twist produced a splitting that fails validation or area conservation."""
    def __init__(self, message: str, failures=None, context: str = "twist"):
        self.failures = list(failures or [])
        super().__init__(message, context)


class GuaranteeViolated(SplittingError):
    """
    A guaranteed outcome did not happen. This is an implementation fault and is never
    handled inside the library.
    """
    def __init__(self, message: str, context: str = "twist"):
        super().__init__(message, context)


# ---- partners ----

class BudgetExhausted(SplittingError):
    """The search ran out of budget; retry with a larger one."""
    def __init__(self, message: str, context: str = "partners", hint: str = None):
        self.hint = hint or "retry with more convergents, a larger shift cap or a wider combination span"
        super().__init__(message, context)


# ---- tree ----

class LeafNotInTree(SplittingError):
    """The node does not belong to the tree."""
    def __init__(self, message: str, context: str = "tree"):
        super().__init__(message, context)


class IncompleteTree(SplittingError):
    """The tree is not complete to the requested depth."""
    def __init__(self, message: str, context: str = "tree"):
        super().__init__(message, context)


class DuplicateDirections(SplittingError):
    """Two leaves share a direction."""
    def __init__(self, message: str, context: str = "tree"):
        super().__init__(message, context)


# ---- surface ----

class SlitWrapsThroughVertex(SplittingError):
    """The slit runs along an edge of the fundamental domain."""
    def __init__(self, message: str, context: str = "surface"):
        super().__init__(message, context)


class NumericalStall(SplittingError):
    """Tracing made no progress above the resolution."""
    def __init__(self, message: str, context: str = "surface"):
        super().__init__(message, context)


class NotRealizable(SplittingError):
    """A saddle check was requested for a plan that violates the same side criterion."""
    def __init__(self, message: str, context: str = "surface"):
        super().__init__(message, context)


# ---- cli ----

class UnknownPreset(SplittingError):
    """No preset registered under that name."""
    def __init__(self, message: str, context: str = "presets"):
        super().__init__(message, context)


class NotShipped(SplittingError):
    """A preset slot exists but carries no data yet."""
    def __init__(self, message: str, context: str = "presets"):
        super().__init__(message, context)


class ConfigurationError(SplittingError):
    """Exception raised when there is a fatal configuration error"""
    def __init__(self, message: str, context: str = "config"):
        super().__init__(message, context)
