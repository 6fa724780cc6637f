"""Exception types raised by the library."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class ProfileError(ValueError):
    """A warping profile violates the pole or positivity invariants."""


class SolverError(RuntimeError):
    """A numerical solve failed. ``diagnostics`` carries the solver state."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class BracketError(SolverError):
    """No eigenvalue bracket could be established."""


class StiffnessError(SolverError):
    """The integrator step size underflowed."""


class ConvergenceError(SolverError):
    """An iteration hit its cap before meeting its stopping rule."""


class VacuousBoundError(DomainError):
    """A bound's hypothesis leaves nothing to check (nonpositive right-hand side)."""
