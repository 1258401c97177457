"""
Closed-form constants: omega_n, beta and delta_s.

    beta    = (omega_n - 2 alpha_bar) / 4
    delta_s = ((omega_n + beta) / (omega_n + 2 beta))^{1/s}
"""

from dataclasses import dataclass

import numpy as np

from src.exceptions import InvalidParameter, UndefinedRegime
from src.geometry.sets import sphere_measure


def omega(n: int) -> float:
    """H^{n-1} of the unit sphere of R^n; omega(0) = 0."""
    if int(n) != n or n < 0:
        raise InvalidParameter("n", n, "dimension must be a nonnegative integer")
    return sphere_measure(int(n))


def beta(alpha_bar: float, n: int) -> float:
    return (omega(n) - 2.0 * alpha_bar) / 4.0


@dataclass(frozen=True)
class ThresholdSet:
    n: int
    alpha_bar: float

    def __post_init__(self):
        if not 0.0 <= self.alpha_bar < self.omega_n + 1e-12:
            raise InvalidParameter("alpha_bar", self.alpha_bar, f"must lie in [0, {self.omega_n:.6g})")

    @property
    def omega_n(self) -> float:
        return omega(self.n)

    @property
    def beta(self) -> float:
        return beta(self.alpha_bar, self.n)

    @property
    def in_regime(self) -> bool:
        return self.beta > 0.0

    def delta_of_s(self, s: float) -> float:
        """Exterior tangent-ball radius threshold delta_s.

        Raises:
            UndefinedRegime: If alpha_bar >= omega_n / 2
            InvalidParameter: If s is outside (0, 1)
        """
        if not 0.0 < s < 1.0:
            raise InvalidParameter("s", s, "must lie in (0, 1)")
        if not self.in_regime:
            raise UndefinedRegime(self.alpha_bar, 0.5 * self.omega_n)
        w, b = self.omega_n, self.beta
        return float(np.exp(-np.log((w + 2.0 * b) / (w + b)) / s))

    def to_dict(self):
        return {"n": self.n, "omega_n": self.omega_n, "alpha_bar": self.alpha_bar, "beta": self.beta}


def delta_s(s: float, alpha_bar: float, n: int) -> float:
    """((omega_n + beta) / (omega_n + 2 beta))^{1/s}; see ThresholdSet.delta_of_s."""
    return ThresholdSet(n, alpha_bar).delta_of_s(s)
