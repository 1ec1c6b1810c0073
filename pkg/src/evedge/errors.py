"""Exception types shared across the package."""


class EvEdgeError(Exception):
    """Base class for all evedge errors."""


class NonPositiveDepth(EvEdgeError):
    """Point lies on or behind the camera plane."""


class EventAfterEvalTime(EvEdgeError):
    """An event timestamp exceeds the requested evaluation time."""


class TauNonPositive(EvEdgeError):
    """Decay constant must be strictly positive."""


class OutOfBounds(EvEdgeError):
    """Sample location lies outside the image domain."""


class EmptyMask(EvEdgeError):
    """Edge mask contains no edge pixels."""


class NoValidDepth(EvEdgeError):
    """Depth frame contains no valid depth measurement."""


class DegenerateRay(EvEdgeError):
    """Ray is (numerically) parallel to the support plane."""


class ParseError(EvEdgeError):
    """Malformed input file.

    Carries the 1-based line number of the offending line (0 when the
    problem is not attributable to a single line, e.g. an empty file).
    """

    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


class AllPointsOutOfView(EvEdgeError):
    """No registered point reprojects inside the image."""


class TooFewPoints(EvEdgeError):
    """Not enough usable points for a well-conditioned pose solve."""


class NonDecreasingCost(EvEdgeError):
    """Damped Gauss-Newton could not reduce the cost; frame rejected."""


class NoOverlap(EvEdgeError):
    """Trajectories share fewer than two associated timestamps."""


class SceneNotVisible(EvEdgeError):
    """The synthetic scene left the camera's field of view."""


class ConfigError(EvEdgeError):
    """Invalid run configuration; message names the offending field."""
