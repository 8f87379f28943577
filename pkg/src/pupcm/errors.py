"""Exception types raised across the package."""


class PupcmError(Exception):
    """Base class for all package errors."""


class PackingInfeasible(PupcmError):
    def __init__(self, n_spheres, placed, attempts, message=None):
        self.n_spheres = n_spheres
        self.placed = placed
        self.attempts = attempts
        super().__init__(
            message
            or f"placed {placed} of {n_spheres} spheres after {attempts} trial "
            f"placements; target_volume_fraction is too high for random "
            f"sequential addition (or max_attempts too low)"
        )


class NonPositiveInput(PupcmError, ValueError):
    pass


class MissingPhaseEntry(PupcmError, KeyError):
    pass


class NonConvergence(PupcmError):
    def __init__(self, iterations, residual):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"iterative solve did not converge in {iterations} iterations "
            f"(relative residual {residual:.3e})"
        )


class DegenerateGradient(PupcmError):
    pass


class EmptySamples(PupcmError, ValueError):
    pass


class ZeroWeightSum(PupcmError, ValueError):
    pass


class NegativeWeight(PupcmError, ValueError):
    pass


class NonFiniteState(PupcmError):
    def __init__(self, time_s):
        self.time_s = time_s
        super().__init__(f"state became non-finite at t = {time_s:.1f} s")


class MalformedWeather(PupcmError, ValueError):
    pass


class ConfigError(PupcmError, ValueError):
    """Invalid configuration detected before any computation starts."""
