"""Exception types shared across the package."""


class BoundaryError(ValueError):
    """A point sits on or outside the domain boundary where a map is singular."""


class DegenerateError(ValueError):
    """An input set is degenerate (e.g. no samples survive, zero spread)."""


class DimensionError(ValueError):
    """Two sample sets disagree on dimensionality."""


class ConfigError(ValueError):
    """A configuration combination is invalid or unsupported."""
