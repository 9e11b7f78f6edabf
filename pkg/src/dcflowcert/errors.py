"""Exception types shared across the package."""


class SchemaError(ValueError):
    """Grid file is not valid JSON or violates the documented schema."""


class TopologyError(ValueError):
    """Grid graph is structurally invalid (disconnected, duplicate branch, ...)."""


class DimensionError(ValueError):
    """A vector argument does not match the network's PQ bus count."""


class NoConvergence(RuntimeError):
    """Newton iteration could not reach the requested residual tolerance."""

    def __init__(self, message: str, iterations: int = 0, residual_norm: float = float("nan")):
        super().__init__(message)
        self.iterations = iterations
        self.residual_norm = residual_norm
