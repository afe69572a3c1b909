"""Exception types raised across the package."""


class SubgraphTestError(Exception):
    """Base class for every error raised by this package."""


class GraphError(SubgraphTestError, ValueError):
    pass


class NodeOutOfRange(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class ParseError(GraphError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GraphTooSmall(SubgraphTestError, ValueError):
    """Raised when a census needs at least three nodes."""


class DegenerateGraph(SubgraphTestError, ValueError):
    """Raised when the edge frequency is 0 or 1 and the statistic is undefined."""


class BadSampleSize(SubgraphTestError, ValueError):
    pass


class ModelError(SubgraphTestError, ValueError):
    pass


class BadProbability(ModelError):
    pass


class BadPartition(ModelError):
    pass


class BadTheta(ModelError):
    pass


class BadParameter(ModelError):
    pass


class BadFeatureFunction(ModelError):
    pass


class EmptyVector(ModelError):
    pass


class ConfigError(SubgraphTestError, ValueError):
    """Invalid experiment configuration or model/plan JSON."""
