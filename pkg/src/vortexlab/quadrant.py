"""A single vortex in the quadrant x > 0, y > 0."""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainViolation


def _check(x, y):
    if not (x > 0 and y > 0):
        raise DomainViolation(f"({x}, {y}) is outside the open quadrant")


def hamiltonian_quadrant(gamma: float, x: float, y: float) -> float:
    """(G^2 / 2pi) log(2xy / r)."""
    _check(x, y)
    return gamma * gamma / (2.0 * np.pi) * math.log(2.0 * x * y / math.hypot(x, y))


def velocity_quadrant(gamma: float, x: float, y: float) -> tuple[float, float]:
    # G xdot = dH/dy and G ydot = -dH/dx; H carries G^2, so one power of G survives.
    _check(x, y)
    r2 = x * x + y * y
    c = gamma / (2.0 * np.pi)
    return c * (1.0 / y - y / r2), -c * (1.0 / x - x / r2)


def trajectory_constant(x: float, y: float) -> float:
    """Positive C with 4x^2y^2/(x^2+y^2) = C^2."""
    _check(x, y)
    return 2.0 * x * y / math.hypot(x, y)


def polar_radius(C: float, theta: float) -> float:
    """Radius of the trajectory with constant C at polar angle theta in (0, pi/2)."""
    if not 0.0 < theta < 0.5 * np.pi:
        raise DomainViolation("theta must lie strictly inside (0, pi/2)")
    return C / math.sin(2.0 * theta)


class QuadrantModel:
    name = "quadrant"
    labels = ("x", "y")
    conserved = ("H", "C")

    def __init__(self, gamma: float, x: float, y: float):
        _check(x, y)
        if gamma == 0:
            raise ValueError("strength must be nonzero")
        self.gamma = float(gamma)
        self.x0 = float(x)
        self.y0 = float(y)
        self._c = self.gamma / (2.0 * np.pi)

    def initial(self):
        return np.array([self.x0, self.y0])

    def to_state(self, y):
        return float(y[0]), float(y[1])

    def rhs(self, t, y):
        x, yy = y[0], y[1]
        r2 = x * x + yy * yy
        c = self._c
        return np.array([c * (1.0 / yy - yy / r2), -c * (1.0 / x - x / r2)])

    def invariants(self, y):
        x, yy = float(y[0]), float(y[1])
        return {"H": hamiltonian_quadrant(self.gamma, x, yy), "C": trajectory_constant(x, yy)}

    def invariant_scales(self, y):
        return {"H": self.gamma ** 2 / (2.0 * np.pi), "C": 0.0}

    def pair_positions(self, y):
        return None

    def boundary_distances(self, y):
        return np.array([y[0], y[1]])

    def domain_margin(self, y):
        return float(min(y[0], y[1]))
