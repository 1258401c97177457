"""
Common test fixtures and configuration.
"""

import numpy as np
import pytest

from src.config.settings import FracPerimConfig
from src.geometry.catalog import canonical_set
from src.geometry.domain import Domain
from src.geometry.sets import Ball, EmptySet, HalfSpace


@pytest.fixture
def cfg():
    """Fresh default configuration (tests may mutate it freely)."""
    return FracPerimConfig()


@pytest.fixture
def fast_cfg():
    """Configuration with a short annealing schedule for small grids."""
    config = FracPerimConfig()
    config.anneal.sweeps = 60
    config.anneal.restarts = 4
    return config


@pytest.fixture
def unit_disc():
    """Unit ball domain in R^2."""
    return Domain.ball((0.0, 0.0), 1.0)


@pytest.fixture
def unit_box():
    """The box [-1, 1]^2."""
    return Domain.box((-1.0, -1.0), (1.0, 1.0))


@pytest.fixture
def quadrant():
    """First quadrant cone in R^2."""
    return canonical_set("quadrant", n=2)


@pytest.fixture
def unit_ball():
    """B_1 in R^2."""
    return Ball((0.0, 0.0), 1.0)


@pytest.fixture
def upper_half_plane():
    """{x_2 > 0}."""
    return HalfSpace((0.0, 1.0), 0.0)


@pytest.fixture
def oracle_exteriors(unit_box):
    """Exterior data of the 4x4 suite: half-plane, empty and quadrant outside the box."""
    inside = unit_box.as_set()
    return {
        "halfplane": HalfSpace((0.0, -1.0), 0.0) - inside,
        "empty": EmptySet(2),
        "quadrant": canonical_set("quadrant", n=2) - inside,
    }


@pytest.fixture
def rng():
    """Seeded generator."""
    return np.random.default_rng(7)
