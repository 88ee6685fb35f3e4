"""Exception hierarchy shared by the mimophase modules."""


class PhaseError(Exception):
    """Base class for all mimophase errors."""


class ClassificationError(PhaseError):
    """A matrix or system does not belong to the class an operation needs.

    ``field_angle`` carries the offending field angle when one is known and
    ``location`` the frequency / contour point at which the failure happened.
    """

    def __init__(self, msg, field_angle=None, location=None):
        super().__init__(msg)
        self.field_angle = field_angle
        self.location = location


class ConvergenceError(PhaseError):
    """An iterative procedure (regularization, refinement) did not settle."""

    def __init__(self, msg, iterates=None):
        super().__init__(msg)
        self.iterates = iterates


class SingularityError(PhaseError):
    """Evaluation requested at (or numerically at) a pole."""

    def __init__(self, msg, distance=None):
        super().__init__(msg)
        self.distance = distance


class RankChangeError(ClassificationError):
    """Numeric rank changes along the contour: not frequency-wise semi-sectorial."""


class NegativeDCError(ClassificationError):
    """The phase center at the start of the contour is pi; analyse -G instead."""


class ContourError(PhaseError):
    """Detours overlap or the contour cannot be constructed."""


class NotApplicableError(PhaseError):
    """The requested computation does not apply (e.g. phase spread >= pi)."""


class HypothesisError(PhaseError):
    """Hypotheses of a stability theorem are not met.

    ``theorem`` names the result whose hypotheses failed.
    """

    def __init__(self, msg, theorem=None):
        super().__init__(msg)
        self.theorem = theorem


class UnsupportedBranchError(PhaseError):
    """A construction branch that is deliberately not implemented."""


class SolverError(PhaseError):
    """The SDP backend failed or returned an indeterminate status."""

    def __init__(self, msg, status=None):
        super().__init__(msg)
        self.status = status


class ModelParseError(PhaseError):
    """A model or matrix file could not be parsed."""

    def __init__(self, msg, line=None, column=None):
        super().__init__(msg)
        self.line = line
        self.column = column
