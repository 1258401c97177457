"""
The one-dimensional kernels of the graph curvature formula.

    g_s(t) = (1 + t^2)^{-(n+s)/2}
    G_s(t) = int_0^t g_s(tau) dtau

G_s has a closed form through the regularized incomplete beta function:
with b = (n + s - 1)/2 and x = t^2/(1 + t^2),

    G_s(t) = sign(t) * B(1/2, b)/2 * I_x(1/2, b).
"""

from functools import lru_cache

import numpy as np
from scipy import integrate, special

from src.exceptions import InvalidParameter


def _check(n: int, s: float, allow_one: bool = False) -> None:
    if n < 1:
        raise InvalidParameter("n", n, "must be >= 1")
    upper_ok = s <= 1.0 if allow_one else s < 1.0
    if not (s > 0.0 and upper_ok):
        raise InvalidParameter("s", s, "must lie in (0, 1)" if not allow_one else "must lie in (0, 1]")


def g_kernel(n: int, s: float, t):
    """(1 + t^2)^{-(n+s)/2}, vectorized in t."""
    _check(n, s)
    t = np.asarray(t, dtype=float)
    out = np.power(1.0 + t * t, -0.5 * (n + s))
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=256)
def G_infinity(n: int, s: float) -> float:
    """G_s(+inf) = B(1/2, (n+s-1)/2) / 2."""
    _check(n, s, allow_one=True)
    return 0.5 * float(special.beta(0.5, 0.5 * (n + s - 1.0)))


def G_kernel(n: int, s: float, t):
    """int_0^t g_s, odd and increasing in t, bounded by G_infinity."""
    _check(n, s, allow_one=True)
    t = np.asarray(t, dtype=float)
    b = 0.5 * (n + s - 1.0)
    x = np.where(np.isinf(t), 1.0, t * t / (1.0 + t * t))
    out = np.sign(t) * G_infinity(n, s) * special.betainc(0.5, b, x)
    return float(out) if out.ndim == 0 else out


def G_kernel_quad(n: int, s: float, t: float) -> float:
    """Adaptive-quadrature evaluation of G_s(t), used to cross-check the closed form."""
    _check(n, s, allow_one=True)
    if t == 0.0:
        return 0.0
    sgn = 1.0 if t > 0 else -1.0
    upper = abs(t)
    f = lambda tau: (1.0 + tau * tau) ** (-0.5 * (n + s))
    if np.isinf(upper):
        value, _ = integrate.quad(f, 0.0, np.inf, limit=200)
    else:
        value, _ = integrate.quad(f, 0.0, upper, limit=200)
    return sgn * value
