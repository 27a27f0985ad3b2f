"""Exception types shared across the package."""


class ConfigError(Exception):
    """Invalid configuration: syntax errors or violated parameter hypotheses."""

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class SolvabilityError(ValueError):
    """Right-hand side incompatible with the operator (e.g. nonzero mean)."""


class SolverFailure(RuntimeError):
    """An iterative solve did not reach its residual target."""


class InvariantViolation(RuntimeError):
    """A monitored structural property (mass, positivity, bounds) was broken."""
