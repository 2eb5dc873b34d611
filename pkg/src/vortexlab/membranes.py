"""Sphere-product membranes S^m(a) x S^l(b) under the binormal flow.

The radii obey  a' = -l/b,  b' = m/a.  Then (ab)' = m - l, so the product
changes linearly and the flow has closed forms. ln(a^m b^l) is conserved.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BeyondCollapse, InvalidState

NEVER = "never"
COLLAPSE_FRACTION = 1e-8


@dataclass(frozen=True)
class SphereProductState:
    a: float
    b: float
    m: int
    l: int

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise InvalidState("radii must be finite")
        if self.a <= 0 or self.b <= 0:
            raise InvalidState("radii must be positive")
        for name in ("m", "l"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise InvalidState(f"{name} must be a positive integer")
            object.__setattr__(self, name, int(v))


def membrane_rhs(st: SphereProductState) -> tuple[float, float]:
    return -st.l / st.b, st.m / st.a


def collapse_time(a0: float, b0: float, m: int, l: int):
    """t* = a0 b0 / (l - m) when m < l, otherwise ``"never"``."""
    SphereProductState(a0, b0, m, l)
    if m < l:
        return a0 * b0 / (l - m)
    return NEVER


def membrane_closed_form(a0: float, b0: float, m: int, l: int, t: float) -> tuple[float, float]:
    st = SphereProductState(a0, b0, m, l)
    p0 = st.a * st.b
    if st.m == st.l:
        return st.a * math.exp(-st.l * t / p0), st.b * math.exp(st.m * t / p0)
    tc = collapse_time(a0, b0, m, l)
    if tc != NEVER and t >= tc:
        raise BeyondCollapse(f"t={t} is at or past the collapse time {tc}")
    ratio = 1.0 + (st.m - st.l) * t / p0
    if ratio <= 0:
        # only reachable for t < 0 when m > l
        raise BeyondCollapse(f"no solution at t={t}")
    return (st.a * ratio ** (st.l / (st.l - st.m)),
            st.b * ratio ** (st.m / (st.m - st.l)))


def membrane_volume_invariant(st: SphereProductState) -> float:
    return st.m * math.log(st.a) + st.l * math.log(st.b)


class MembraneModel:
    """Integrator adapter; state is (a, b)."""

    name = "membrane"
    labels = ("a", "b")
    conserved = ("Hvol",)

    def __init__(self, state: SphereProductState, collapse_radius: float | None = None):
        self.state = state
        self.m = state.m
        self.l = state.l
        self.collapse_radius = (COLLAPSE_FRACTION * state.a if collapse_radius is None
                                else float(collapse_radius))

    def initial(self):
        return np.array([self.state.a, self.state.b])

    def to_state(self, y) -> SphereProductState:
        return SphereProductState(float(y[0]), float(y[1]), self.m, self.l)

    def rhs(self, t, y):
        return np.array([-self.l / y[1], self.m / y[0]])

    def invariants(self, y):
        return {"Hvol": self.m * math.log(y[0]) + self.l * math.log(y[1])}

    def invariant_scales(self, y):
        return {"Hvol": self.m * abs(math.log(y[0])) + self.l * abs(math.log(y[1])) + 1.0}

    def pair_positions(self, y):
        return None

    def boundary_distances(self, y):
        return np.empty(0)

    def domain_margin(self, y):
        return None

    def extra_events(self, settings):
        radius = getattr(settings, "collapse_radius", None) or self.collapse_radius

        def collapse(t, y):
            return y[0] - radius

        def finish(t, y):
            # ab is linear in t, so the remaining time to a = 0 is exact
            detail = {"crossing_time": t, "a": float(y[0]), "b": float(y[1])}
            if self.l > self.m:
                return t + y[0] * y[1] / (self.l - self.m), detail
            return t, detail

        return [("Collapse", collapse, True, finish)]
