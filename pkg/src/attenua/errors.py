"""Exception types shared across the package."""


class AttenuaError(Exception):
    """Base class for all package-specific errors."""


class ObstacleTouchesBox(AttenuaError):
    """An obstacle disk violates the margin to the outer truncation box."""


class EmptyFluid(AttenuaError):
    """The node classification produced no fluid node."""


class NonzeroOnBoundary(AttenuaError):
    """Initial data does not vanish on Dirichlet-tagged nodes."""


class NumericBlowup(AttenuaError):
    """The field amplitude exploded; CFL violation or mask corruption."""


class BadWeightConstant(AttenuaError):
    """The weighting constant B violates B * inf|x| >= 2."""


class NonPositiveValues(AttenuaError):
    """A log-log fit window contains non-positive samples."""


class DegenerateWindow(AttenuaError):
    """Observability denominator vanished while the windowed energy did not."""


class ConfigError(AttenuaError):
    """Scenario configuration is malformed or violates an invariant."""
