"""Exception hierarchy shared by every curveflow module."""


class CurveFlowError(Exception):
    """Base class for all library errors."""


class InvalidArgumentError(CurveFlowError, ValueError):
    pass


class DegenerateCurvatureError(CurveFlowError):
    """Raised when ``S_thth + S`` falls below the strict-convexity floor."""

    def __init__(self, min_margin, index, theta):
        self.min_margin = float(min_margin)
        self.index = int(index)
        self.theta = float(theta)
        super().__init__(
            f"curve is not strictly convex: min(S_thth + S) = {self.min_margin:.6g} "
            f"at index {self.index} (theta = {self.theta:.6g})"
        )


class NonConvexInputError(CurveFlowError, ValueError):
    pass


class ForcingSyntaxError(CurveFlowError, ValueError):
    def __init__(self, message, offset):
        self.offset = int(offset)
        super().__init__(f"{message} at offset {self.offset}")


class UnknownIdentifierError(ForcingSyntaxError):
    def __init__(self, name, offset):
        self.name = name
        super().__init__(f"unknown identifier {name!r}", offset)


class InvalidContextError(CurveFlowError):
    pass


class ForcingEvaluationError(CurveFlowError):
    def __init__(self, message, index=None, theta=None):
        self.index = index
        self.theta = theta
        if index is not None:
            message = f"{message} at index {index} (theta = {theta:.6g})"
        super().__init__(message)


class UnsupportedDerivativeError(CurveFlowError):
    pass


class BlowupError(CurveFlowError):
    pass


class ConfigError(CurveFlowError):
    def __init__(self, message, key=None):
        self.key = key
        super().__init__(message if key is None else f"{key}: {message}")
