"""Exception hierarchy shared across the package."""


class ChainCatchError(Exception):
    """Base class for all domain errors."""


class ConfigError(ChainCatchError):
    """An invariant of a configuration value was violated."""


class GameOverError(ChainCatchError):
    """An operation that needs a live game was invoked after game over."""


class PlacementError(ChainCatchError):
    """Random placement could not satisfy the spacing constraints."""


class DegenerateAngleError(ChainCatchError):
    """Rotation target undefined: escapee and chaser share a cell."""


class TraceFormatError(ChainCatchError):
    """A trace file failed to parse; message names the offending line."""
