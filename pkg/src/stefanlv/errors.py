"""Exception hierarchy shared by the solver, analysis and CLI layers."""


class StefanLVError(Exception):
    """Base class for all package errors."""


# semi-wave shooting
class NoBracket(StefanLVError):
    pass


class Nonconvergence(StefanLVError):
    pass


# time stepping
class BadInitialData(StefanLVError, ValueError):
    pass


class SolverError(StefanLVError):
    """Raised when a time step fails. ``t`` is the time of the failing step."""

    def __init__(self, message, t=None):
        super().__init__(message if t is None else f"{message} (t={t:.6g})")
        self.t = t
        self.trajectory = None


class NumericalBlowup(SolverError):
    pass


class NegativityBreach(SolverError):
    pass


class FrontCollapse(SolverError):
    pass


# analysis
class UndefinedRegion(StefanLVError, ValueError):
    pass


class DegenerateCompetition(StefanLVError, ValueError):
    pass


class InsufficientData(StefanLVError, ValueError):
    pass


class GapTooSmall(StefanLVError, ValueError):
    pass


class ImaginaryRoot(StefanLVError, ValueError):
    pass


class InfeasibleBarrier(StefanLVError, ValueError):
    pass


class NotApplicable(StefanLVError):
    pass


# configuration
class SchemaError(StefanLVError, KeyError):
    """Missing or mistyped configuration entry; ``path`` is the dotted key."""

    def __init__(self, path):
        super().__init__(path)
        self.path = path

    def __str__(self):
        return self.path
