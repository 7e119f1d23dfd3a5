"""Exception types shared across the package."""


class SwitchgapError(Exception):
    """Base class for all package errors."""


class ValidationError(SwitchgapError):
    """Invalid parameter set or operation preconditions not met."""


class NoConvergence(SwitchgapError):
    """An iterative solver failed to converge."""


class DegenerateRoots(SwitchgapError):
    """Two distinct roots could not be separated at the working tolerance."""


class SingularDiffusion(SwitchgapError):
    """Diffusion tensor (nearly) singular at the requested point."""


class BranchPoint(SwitchgapError):
    """Potential evaluated at (or too close to) a logarithmic branch point."""


class NotBistable(SwitchgapError):
    """Operation requires a bistable fixed-point set."""


class IterativeNoConvergence(NoConvergence):
    """Sparse eigensolver did not converge; carries the achieved residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegenerateZeroModes(SwitchgapError):
    """More than one candidate zero mode found in the Lindbladian spectrum."""


class DimensionOverflow(SwitchgapError):
    """Requested superoperator dimension exceeds the configured cap."""


class StepSizeUnderflow(SwitchgapError):
    """ODE integrator step size underflow (trajectory escaping); carries last state."""

    def __init__(self, message, last_state=None, last_time=None):
        super().__init__(message)
        self.last_state = last_state
        self.last_time = last_time


class DensityDriftExceeded(SwitchgapError):
    """Conserved Lindbladian density drifted beyond the abort threshold."""


class NoCandidate(SwitchgapError):
    """No shot trajectory reached the acceptance radius; carries the best score."""

    def __init__(self, message, best_score=None, best_theta=None):
        super().__init__(message)
        self.best_score = best_score
        self.best_theta = best_theta


class NotAFixedPoint(SwitchgapError):
    """State passed as a fixed point has a too-large flow residual."""
