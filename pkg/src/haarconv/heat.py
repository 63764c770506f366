"""Heat semigroup on SO(3) via its character series.

The heat kernel relative to Haar measure is the class function

    k_t(theta) = sum_l (2l+1) exp(-l(l+1) t) U_{2l}(cos(theta/2))

where ``U_{2l}(cos(a)) = sin((2l+1)a)/sin(a)`` is a Chebyshev polynomial of
the second kind, so the series is evaluated by recurrence with no 0/0 at the
identity. The rotation angle of a heat-distributed rotation has density
``k_t(theta) (1 - cos theta) / pi`` on [0, pi].
"""

from __future__ import annotations

import math

import numpy as np

from . import so3
from .energy import rng_for
from .exceptions import UnsupportedError
from .measures import EmpiricalMeasure
from .so3 import SO3

T_MIN = 0.05
L_MAX = 30
CDF_NODES = 2048


def _check(t, l_max):
    if t < T_MIN:
        raise UnsupportedError(f"heat series truncation is only validated for t >= {T_MIN}, got {t}")
    if l_max < 10:
        raise UnsupportedError("l_max must be at least 10")


def heat_density(theta, t: float, l_max: int = L_MAX):
    """Truncated heat kernel ``k_t`` at rotation angle(s) ``theta``."""
    _check(t, l_max)
    return _series(theta, t, l_max)


def _series(theta, t, l_max):
    x = np.cos(np.asarray(theta, dtype=float) / 2.0)
    u_prev = np.ones_like(x)  # U_0
    u_cur = 2.0 * x  # U_1
    total = np.ones_like(x)
    for l in range(1, l_max + 1):
        # advance two steps: U_{2l-1} -> U_{2l}
        u_prev, u_cur = u_cur, 2.0 * x * u_cur - u_prev
        total = total + (2 * l + 1) * math.exp(-l * (l + 1) * t) * u_cur
        u_prev, u_cur = u_cur, 2.0 * x * u_cur - u_prev
    return total


def heat_truncation_bound(t: float, l_max: int = L_MAX) -> float:
    """``sum_{l > l_max} (2l+1)^2 exp(-l(l+1)t)``, a bound on the sup truncation error."""
    total = 0.0
    for l in range(l_max + 1, l_max + 10_000):
        term = (2 * l + 1) ** 2 * math.exp(-l * (l + 1) * t)
        total += term
        if term < 1e-300 or (l > l_max + 5 and term < 1e-18 * max(total, 1e-300)):
            break
    return total


def heat_angle_density(theta, t: float, l_max: int = L_MAX):
    """Density of the rotation angle on [0, pi]."""
    theta = np.asarray(theta, dtype=float)
    return heat_density(theta, t, l_max) * (1.0 - np.cos(theta)) / np.pi


def heat_angle_cdf(theta, t: float, l_max: int = L_MAX):
    """Closed-form CDF of the rotation angle, integrating the series term by term.

    Each term ``(2l+1) e^{-l(l+1)t} U_{2l}(cos(theta/2)) (1 - cos theta)/pi``
    equals ``(2l+1) e^{-l(l+1)t} (cos(l theta) - cos((l+1) theta))/pi``.
    """
    _check(t, l_max)
    return _cdf_series(theta, t, l_max)


def _cdf_series(theta, t, l_max):
    theta = np.asarray(theta, dtype=float)
    total = theta - np.sin(theta)
    for l in range(1, l_max + 1):
        total = total + (2 * l + 1) * math.exp(-l * (l + 1) * t) * (
            np.sin(l * theta) / l - np.sin((l + 1) * theta) / (l + 1))
    return total / np.pi


def required_l_max(t: float, l_max: int = L_MAX, tol: float = 1e-13) -> int:
    """Smallest truncation order >= ``l_max`` whose tail bound is below ``tol``."""
    while heat_truncation_bound(t, l_max) > tol:
        l_max += 10
    return l_max


def _inverse_cdf_table(t: float, l_max: int, nodes: int):
    grid = np.linspace(0.0, np.pi, nodes)
    cdf = np.maximum.accumulate(np.clip(_cdf_series(grid, t, l_max), 0.0, 1.0))
    cdf[0], cdf[-1] = 0.0, 1.0
    return grid, cdf


def heat_sample_quaternions(t: float, n: int, rng: np.random.Generator, l_max: int = L_MAX,
                            nodes: int = CDF_NODES) -> np.ndarray:
    if t == 0:
        return np.tile([1.0, 0.0, 0.0, 0.0], (n, 1))
    if t < T_MIN:
        # short times: same series, truncated late enough that the tail is negligible
        l_max = required_l_max(t, l_max)
    grid, cdf = _inverse_cdf_table(t, l_max, nodes)
    angles = np.interp(rng.random(n), cdf, grid)
    axes = so3.normalize(rng.standard_normal((n, 3)))
    return so3.from_axis_angle(axes, angles)


def heat_sample(t: float, n: int, seed=None, l_max: int = L_MAX, nodes: int = CDF_NODES) -> EmpiricalMeasure:
    """``n`` i.i.d. rotations from the heat distribution at time ``t``.

    The axis is uniform on S^2 and the angle comes from inverting the angle
    CDF tabulated on ``nodes`` points. Below t = 0.05 the truncation order
    is raised until the series tail is below 1e-13.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if t < 0:
        raise ValueError("t must be nonnegative")
    q = heat_sample_quaternions(t, n, rng_for(seed, 0x48), l_max, nodes)
    return EmpiricalMeasure(SO3, q, seed=seed)


class HeatSemigroupSO3:
    """The heat convolution semigroup on SO(3), sampled by :func:`heat_sample`.

    The kernel is a class function, hence conjugation invariant under every
    subgroup.
    """

    carrier = SO3
    conjugate_invariant = True

    def __init__(self, l_max: int = L_MAX):
        self.l_max = l_max

    def sample(self, t: float, n: int, seed=None) -> EmpiricalMeasure:
        return heat_sample(t, n, seed, self.l_max)

    def density(self, theta, t: float):
        return heat_density(theta, t, self.l_max)

    def __repr__(self):
        return f"HeatSemigroupSO3(l_max={self.l_max})"
