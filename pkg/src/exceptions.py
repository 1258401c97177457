"""
Custom exception classes for fracperim.

Provides fine-grained error handling across the geometry, quadrature,
curvature, threshold and minimizer layers.
"""


class FracPerimException(Exception):
    """Base exception for all fracperim errors."""

    def __init__(self, message: str, context: dict = None):
        """Initialize the exception.

        Args:
            message: Error message
            context: Additional context as dict (for logging/debugging)
        """
        super().__init__(message)
        self.message = message
        self.context = context or {}


# ========== Geometry Exceptions ==========

class GeometryException(FracPerimException):
    """Base exception for set and domain errors."""
    pass


class DimensionMismatch(GeometryException):
    """Raised when a point does not live in the dimension of the set."""

    def __init__(self, expected: int, got: int):
        super().__init__(
            f"Dimension mismatch: expected {expected}, got {got}",
            {"expected": expected, "got": got}
        )


class InvalidParameter(GeometryException):
    """Raised when a set family or domain receives out-of-range parameters."""

    def __init__(self, name: str, value, reason: str):
        super().__init__(
            f"Invalid parameter '{name}'={value!r}: {reason}",
            {"name": name, "value": value, "reason": reason}
        )


class ThresholdExceeded(GeometryException):
    """Raised when an erosion/dilation leaves the validity band of the domain."""

    def __init__(self, delta: float, limit: float):
        super().__init__(
            f"|delta|={abs(delta)} is outside the validity band (< {limit})",
            {"delta": delta, "limit": limit}
        )


class UnknownSetFamily(GeometryException):
    """Raised when a canonical set name is not known."""

    def __init__(self, name: str):
        super().__init__(
            f"Unknown set family '{name}'",
            {"name": name}
        )


# ========== Quadrature Exceptions ==========

class QuadratureException(FracPerimException):
    """Base exception for singular-integral evaluation errors."""
    pass


class NonConvergence(QuadratureException):
    """Recorded on a result (not raised) when an evaluation does not settle."""

    def __init__(self, what: str, detail: str):
        super().__init__(
            f"No convergence in {what}: {detail}",
            {"what": what, "detail": detail}
        )


class UnclassifiedSet(QuadratureException):
    """Raised when an unbounded set has no usable far-field description."""

    def __init__(self, reason: str):
        super().__init__(
            f"Cannot integrate the far field: {reason}",
            {"reason": reason}
        )


class PointOffBoundary(QuadratureException):
    """Raised when a point asserted on the boundary is visibly off it."""

    def __init__(self, distance: float):
        super().__init__(
            f"Point is not on the boundary (level value {distance:.3e})",
            {"distance": distance}
        )


# ========== Curvature Exceptions ==========

class CurvatureException(FracPerimException):
    """Base exception for curvature evaluation errors."""
    pass


class FormulaNotApplicable(CurvatureException):
    """Raised when the graph formula is used outside s < holder exponent."""

    def __init__(self, s: float, holder: float):
        super().__init__(
            f"Graph formula needs s < {holder}, got s={s}",
            {"s": s, "holder": holder}
        )


class GraphLeavesCylinder(CurvatureException):
    """Raised when no cylinder contains the graph around the point."""

    def __init__(self, r: float, h: float):
        super().__init__(
            f"Graph leaves the cylinder Q(r={r:.4g}, h={h:.4g})",
            {"r": r, "h": h}
        )


# ========== Threshold Exceptions ==========

class ThresholdException(FracPerimException):
    """Base exception for threshold and root-finding errors."""
    pass


class UndefinedRegime(ThresholdException):
    """Raised when alpha_bar >= omega_n / 2 so beta is not positive."""

    def __init__(self, alpha_bar: float, half_omega: float):
        super().__init__(
            f"alpha_bar={alpha_bar} is not below omega_n/2={half_omega}",
            {"alpha_bar": alpha_bar, "half_omega": half_omega}
        )


class SameSignBracket(ThresholdException):
    """Raised when the curvature has the same sign at both bracket ends."""

    def __init__(self, lo: float, hi: float, f_lo: float, f_hi: float):
        super().__init__(
            f"Bracket ({lo}, {hi}) does not change sign: "
            f"I({lo})={f_lo:.6g}, I({hi})={f_hi:.6g}",
            {"lo": lo, "hi": hi, "f_lo": f_lo, "f_hi": f_hi}
        )


class InvalidWitness(ThresholdException):
    """Raised when the exterior tangent ball is not exterior."""

    def __init__(self, reason: str):
        super().__init__(
            f"Invalid tangent-ball witness: {reason}",
            {"reason": reason}
        )


# ========== Minimizer Exceptions ==========

class MinimizerException(FracPerimException):
    """Base exception for discrete perimeter minimization errors."""
    pass


class ProblemTooLarge(MinimizerException):
    """Raised when a grid exceeds a solver's size limit."""

    def __init__(self, cells: int, limit: int):
        super().__init__(
            f"Problem has {cells} cells, limit is {limit}",
            {"cells": cells, "limit": limit}
        )


class HypothesisViolated(MinimizerException):
    """Raised when exterior data does not satisfy a checker's hypothesis."""

    def __init__(self, reason: str):
        super().__init__(
            f"Hypothesis violated: {reason}",
            {"reason": reason}
        )


class LowConfidence(MinimizerException):
    """Raised (or recorded) when annealing restarts disagree."""

    def __init__(self, agreeing: int, restarts: int):
        super().__init__(
            f"Only {agreeing} of {restarts} restarts reached the best energy",
            {"agreeing": agreeing, "restarts": restarts}
        )


class ResolutionTooCoarse(MinimizerException):
    """Raised when a radius is below the raster resolution."""

    def __init__(self, delta: float, cell: float):
        super().__init__(
            f"delta={delta} is not larger than the cell size {cell}",
            {"delta": delta, "cell": cell}
        )


# ========== Persistence Exceptions ==========

class PersistenceException(FracPerimException):
    """Base exception for artifact read/write errors."""
    pass


class SaveFailed(PersistenceException):
    """Raised when an artifact cannot be written."""

    def __init__(self, reason: str):
        super().__init__(
            f"Save failed: {reason}",
            {"reason": reason}
        )


class LoadFailed(PersistenceException):
    """Raised when an input file cannot be read."""

    def __init__(self, reason: str):
        super().__init__(
            f"Load failed: {reason}",
            {"reason": reason}
        )


class CorruptedFile(PersistenceException):
    """Raised when an input file is not valid JSON."""

    def __init__(self, path: str, reason: str):
        super().__init__(
            f"File '{path}' corrupted: {reason}",
            {"path": path, "reason": reason}
        )


# ========== Data/Configuration Exceptions ==========

class DataException(FracPerimException):
    """Base exception for data-related errors."""
    pass


class ConfigError(DataException):
    """Raised when configuration is invalid."""

    def __init__(self, key: str, reason: str):
        super().__init__(
            f"Configuration error '{key}': {reason}",
            {"key": key, "reason": reason}
        )


class InvalidData(DataException):
    """Raised when data format is invalid."""

    def __init__(self, data_type: str, reason: str):
        super().__init__(
            f"Invalid {data_type}: {reason}",
            {"data_type": data_type, "reason": reason}
        )


# ========== Utility Function ==========

def is_fracperim_exception(exception: Exception) -> bool:
    """Check if exception belongs to the fracperim hierarchy.

    Args:
        exception: Exception to check

    Returns:
        True if exception is a FracPerimException subclass
    """
    return isinstance(exception, FracPerimException)
