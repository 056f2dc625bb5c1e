"""Exception types shared across the package.

Every error carries a stable ``code`` string; the CLI prints it on stderr so
scripts can match on it without parsing messages.
"""


class TcRobotsError(Exception):
    code = "Error"


class IllegalCoordinate(TcRobotsError, ValueError):
    code = "IllegalCoordinate"


class IllegalMove(TcRobotsError, ValueError):
    code = "IllegalMove"


class DegenerateQuery(TcRobotsError, ValueError):
    code = "DegenerateQuery"


class NotOnSkeleton(TcRobotsError, ValueError):
    code = "NotOnSkeleton"


class RegionMismatch(TcRobotsError, ValueError):
    code = "RegionMismatch"


class FlowStall(TcRobotsError, RuntimeError):
    code = "FlowStall"


class SwapImpossible(TcRobotsError):
    """Start and goal lie in different components of the configuration space."""

    code = "SwapImpossible"


class UnsupportedQuery(TcRobotsError, ValueError):
    code = "UnsupportedQuery"
