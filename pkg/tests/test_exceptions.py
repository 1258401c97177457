"""
Tests for custom exception classes.

Validates that exceptions are properly raised and contain correct context.
"""

import pytest
from src.exceptions import (
    FracPerimException,
    GeometryException,
    DimensionMismatch,
    InvalidParameter,
    UnknownSetFamily,
    QuadratureException,
    NonConvergence,
    PointOffBoundary,
    FormulaNotApplicable,
    GraphLeavesCylinder,
    UndefinedRegime,
    SameSignBracket,
    InvalidWitness,
    MinimizerException,
    ProblemTooLarge,
    LowConfidence,
    ResolutionTooCoarse,
    SaveFailed,
    LoadFailed,
    CorruptedFile,
    ConfigError,
    InvalidData,
    is_fracperim_exception,
)


class TestFracPerimException:
    """Test base FracPerimException."""

    def test_creation(self):
        exc = FracPerimException("Test error")
        assert exc.message == "Test error"
        assert exc.context == {}

    def test_with_context(self):
        context = {"s": 0.5, "point": [1.0, 0.0]}
        exc = FracPerimException("Test error", context)
        assert exc.message == "Test error"
        assert exc.context == context
        assert str(exc) == "Test error"


class TestGeometryExceptions:
    """Test geometry-related exceptions."""

    def test_dimension_mismatch(self):
        exc = DimensionMismatch(2, 3)
        assert exc.context == {"expected": 2, "got": 3}
        assert "expected 2" in exc.message

    def test_invalid_parameter(self):
        exc = InvalidParameter("radius", -1.0, "must be positive")
        assert exc.context["name"] == "radius"
        assert exc.context["value"] == -1.0
        assert "must be positive" in exc.message

    def test_unknown_set_family(self):
        exc = UnknownSetFamily("dodecahedron")
        assert "dodecahedron" in exc.message
        assert isinstance(exc, GeometryException)


class TestNumericalExceptions:
    """Quadrature, curvature and threshold failures."""

    def test_non_convergence(self):
        exc = NonConvergence("pv", "schedule exhausted")
        assert isinstance(exc, QuadratureException)
        assert exc.context["what"] == "pv"

    def test_point_off_boundary(self):
        exc = PointOffBoundary(0.25)
        assert exc.context["distance"] == 0.25

    def test_formula_not_applicable(self):
        exc = FormulaNotApplicable(0.9, 0.5)
        assert "0.5" in exc.message

    def test_graph_leaves_cylinder(self):
        exc = GraphLeavesCylinder(0.5, 0.25)
        assert exc.context == {"r": 0.5, "h": 0.25}

    def test_undefined_regime(self):
        exc = UndefinedRegime(3.5, 3.14)
        assert exc.context["alpha_bar"] == 3.5

    def test_same_sign_bracket(self):
        exc = SameSignBracket(0.1, 0.2, 1.0, 2.0)
        assert exc.context["f_lo"] == 1.0
        assert "(0.1, 0.2)" in exc.message

    def test_invalid_witness(self):
        assert "tangent" in InvalidWitness("not tangent").message


class TestMinimizerExceptions:
    """Test minimizer exceptions."""

    def test_problem_too_large(self):
        exc = ProblemTooLarge(400, 20)
        assert isinstance(exc, MinimizerException)
        assert "400" in exc.message and "20" in exc.message

    def test_low_confidence(self):
        exc = LowConfidence(1, 8)
        assert exc.context == {"agreeing": 1, "restarts": 8}

    def test_resolution_too_coarse(self):
        exc = ResolutionTooCoarse(0.01, 0.125)
        assert exc.context["cell"] == 0.125


class TestPersistenceAndData:
    """Test persistence and data exceptions."""

    def test_save_failed(self):
        assert "disk full" in SaveFailed("disk full").message

    def test_load_failed(self):
        assert LoadFailed("missing").context["reason"] == "missing"

    def test_corrupted_file(self):
        exc = CorruptedFile("run.json", "Invalid JSON")
        assert exc.context["path"] == "run.json"

    def test_config_error(self):
        exc = ConfigError("grid.unknown", "unknown key")
        assert "grid.unknown" in exc.message

    def test_invalid_data(self):
        exc = InvalidData("set-spec", "missing type")
        assert exc.message == "Invalid set-spec: missing type"


class TestHierarchy:
    """Every exception belongs to the fracperim family."""

    @pytest.mark.parametrize("exc", [
        DimensionMismatch(1, 2),
        NonConvergence("alpha", "x"),
        UndefinedRegime(1.0, 0.5),
        ProblemTooLarge(1, 0),
        CorruptedFile("p", "r"),
        InvalidData("t", "r"),
    ])
    def test_is_fracperim_exception(self, exc):
        assert is_fracperim_exception(exc)
        assert isinstance(exc, FracPerimException)

    def test_foreign_exception(self):
        assert not is_fracperim_exception(ValueError("nope"))

    def test_can_be_raised_and_caught_by_base(self):
        with pytest.raises(FracPerimException):
            raise InvalidParameter("s", 2.0, "must lie in (0, 1)")
