"""Point vortices in the upper half-plane y > 0.

The Hamiltonian follows the printed half-plane formula, whose overall scale is
twice the one obtained from the generic domain Green-function recipe. Pass
``normalization="green"`` to use the halved Hamiltonian; it only rescales time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .core import Domain, VortexSystem, validate_system
from .errors import (
    DomainViolation,
    NonPositiveBase,
    PassiveTracerRequiresSpecialPath,
    SingularDenominator,
    SingularPoint,
    WrongArity,
    ZeroNu,
)

NORMALIZATIONS = {"verbatim": 1.0, "green": 0.5}


def _scale(normalization: str) -> float:
    try:
        return NORMALIZATIONS[normalization]
    except KeyError:
        raise ValueError(
            f"normalization must be one of {sorted(NORMALIZATIONS)}, got {normalization!r}"
        ) from None


def _require_halfplane(s: VortexSystem) -> None:
    if s.domain is not Domain.HALFPLANE:
        raise DomainViolation(f"expected a half-plane system, got {s.domain.value}")
    validate_system(s)


def _pair_terms(pos):
    x, y = pos[:, 0], pos[:, 1]
    dx = x[:, None] - x[None, :]
    ys = y[:, None] + y[None, :]
    yd = y[:, None] - y[None, :]
    return dx, ys, yd, dx * dx + ys * ys, dx * dx + yd * yd


def hamiltonian_halfplane(s: VortexSystem, normalization: str = "verbatim") -> float:
    _require_halfplane(s)
    return _hamiltonian(s.strengths, s.positions, _scale(normalization))


def _hamiltonian(gam, pos, scale) -> float:
    n = gam.shape[0]
    _, _, _, A, B = _pair_terms(pos)
    iu = np.triu_indices(n, 1)
    inter = np.sum(gam[iu[0]] * gam[iu[1]] * np.log(A[iu] / B[iu])) / (2.0 * np.pi)
    self_ = np.sum(gam * gam * np.log(2.0 * pos[:, 1])) / (2.0 * np.pi)
    return float(scale * (inter + self_))


def hamiltonian_halfplane_gradient(s: VortexSystem, normalization: str = "verbatim") -> np.ndarray:
    """Analytic (dH/dx_i, dH/dy_i), shape (N, 2)."""
    _require_halfplane(s)
    gam, pos = s.strengths, s.positions
    dx, ys, yd, A, B = _pair_terms(pos)
    np.fill_diagonal(A, np.inf)
    np.fill_diagonal(B, np.inf)
    gg = gam[:, None] * gam[None, :]
    grad = np.empty_like(pos)
    grad[:, 0] = np.sum(gg * dx * (1.0 / A - 1.0 / B), axis=1) / np.pi
    grad[:, 1] = np.sum(gg * (ys / A - yd / B), axis=1) / np.pi + gam * gam / (2.0 * np.pi * pos[:, 1])
    return _scale(normalization) * grad


def velocity_halfplane(s: VortexSystem, normalization: str = "verbatim") -> np.ndarray:
    """Velocities of all vortices; G_i xdot_i = dH/dy_i, G_i ydot_i = -dH/dx_i.

    Zero-strength tracers must go through :func:`tracer_velocity_halfplane`.
    """
    _require_halfplane(s)
    if np.any(s.strengths == 0.0):
        i = int(np.flatnonzero(s.strengths == 0.0)[0])
        raise PassiveTracerRequiresSpecialPath(
            f"vortex {i} has zero strength; use tracer_velocity_halfplane"
        )
    return kernels.halfplane_velocity(
        s.strengths, np.ascontiguousarray(s.positions), s.tracers, _scale(normalization)
    )


def tracer_velocity_halfplane(s: VortexSystem, points, normalization: str = "verbatim") -> np.ndarray:
    """Velocity of passive tracers at ``points`` advected by the vortices of ``s``.

    This is the zero-strength limit of the vortex velocity: interaction terms
    only, no wall self-term.
    """
    _require_halfplane(s)
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if np.any(pts[:, 1] <= 0):
        raise DomainViolation("tracer points must have y > 0")
    gam = np.concatenate([s.strengths, np.zeros(len(pts))])
    pos = np.ascontiguousarray(np.vstack([s.positions, pts]))
    tracer = np.concatenate([s.tracers, np.ones(len(pts), dtype=bool)])
    v = kernels.halfplane_velocity(gam, pos, tracer, _scale(normalization))
    return v[len(s):]


def conserved_height(s: VortexSystem) -> float:
    """Center-of-vorticity height for a generic pair, y1 - y2 for a dipole."""
    if len(s) != 2:
        raise WrongArity("conserved_height is defined for two vortices")
    g1, g2 = s.strengths
    y1, y2 = s.y
    if g1 + g2 == 0.0:
        return float(y1 - y2)
    return float((g1 * y1 + g2 * y2) / (g1 + g2))


def single_vortex_halfplane_solution(gamma: float, x0: float, y0: float, t: float,
                                     normalization: str = "verbatim") -> tuple[float, float]:
    """Exact motion of one vortex: uniform translation parallel to the wall."""
    if y0 <= 0:
        raise DomainViolation("y0 must be positive")
    v = _scale(normalization) * gamma / (2.0 * np.pi * y0)
    return x0 + v * t, y0


# ---------------------------------------------------------------------------
# Reduced two-vortex orbits


@dataclass(frozen=True)
class ReducedGenericOrbitParams:
    """Conserved data (mu, E) of a pair with G1 + G2 != 0.

    ``E`` is the energy of the reduced Hamiltonian written in center/relative
    coordinates; it equals the half-plane H minus (G1^2 + G2^2) log(2) / 2pi,
    because the reduced form drops the factor 2 inside log(2 y_i).
    """

    mu: float
    E: float
    strengths: tuple[float, float]

    def __post_init__(self):
        g1, g2 = self.strengths
        if g1 + g2 == 0.0:
            raise ValueError("generic orbit parameters need G1 + G2 != 0")

    @classmethod
    def from_state(cls, s: VortexSystem) -> "ReducedGenericOrbitParams":
        _require_halfplane(s)
        if len(s) != 2:
            raise WrongArity("the reduced orbit needs exactly two vortices")
        g1, g2 = (float(g) for g in s.strengths)
        mu = conserved_height(s)
        x_r = s.x[0] - s.x[1]
        y_r = s.y[0] - s.y[1]
        p = cls(mu, 0.0, (g1, g2))
        return cls(mu, _log_lhs_generic(x_r, y_r, p) / (2.0 * np.pi), (g1, g2))


def _generic_bases(y_r, p):
    g1, g2 = p.strengths
    tot = g1 + g2
    b1 = p.mu + g2 / tot * y_r
    b2 = p.mu - g1 / tot * y_r
    return b1, b2, 2.0 * p.mu + (g2 - g1) / tot * y_r


def _log_lhs_generic(x_r, y_r, p) -> float:
    g1, g2 = p.strengths
    b1, b2, ysum = _generic_bases(y_r, p)
    if b1 <= 0 or b2 <= 0:
        raise NonPositiveBase(f"implied vortex heights ({b1:g}, {b2:g}) must be positive")
    den = x_r * x_r + y_r * y_r
    if den == 0.0:
        raise SingularDenominator("x_r = y_r = 0 is a collision")
    ratio = (x_r * x_r + ysum * ysum) / den
    return g1 * g1 * math.log(b1) + g2 * g2 * math.log(b2) + g1 * g2 * math.log(ratio)


def orbit_residual_generic(x_r: float, y_r: float, p: ReducedGenericOrbitParams) -> float:
    """Left side of the reduced orbit equation minus exp(2 pi E)."""
    return math.exp(_log_lhs_generic(x_r, y_r, p)) - math.exp(2.0 * np.pi * p.E)


@dataclass(frozen=True)
class ReducedDipoleOrbitParams:
    """Conserved data of a (1, -1) dipole: nu = y1 - y2 and the energy E."""

    nu: float
    E: float

    @property
    def C(self) -> float:
        return math.exp(-2.0 * np.pi * self.E)

    @classmethod
    def from_C(cls, nu: float, C: float) -> "ReducedDipoleOrbitParams":
        if C <= 0:
            raise ValueError("C must be positive")
        return cls(nu, -math.log(C) / (2.0 * np.pi))

    @classmethod
    def from_state(cls, s: VortexSystem) -> "ReducedDipoleOrbitParams":
        _require_halfplane(s)
        if len(s) != 2:
            raise WrongArity("the reduced orbit needs exactly two vortices")
        if tuple(s.strengths) != (1.0, -1.0):
            raise ValueError("dipole orbit parameters require strengths exactly (1, -1)")
        return cls(float(s.y[0] - s.y[1]), _hamiltonian(s.strengths, s.positions, 1.0))


def orbit_residual_dipole(x_r: float, y0: float, p: ReducedDipoleOrbitParams) -> float:
    """1/(nu^2 + x_r^2) + 1/(4 y0^2 - nu^2) - C."""
    nu2 = p.nu * p.nu
    den = 4.0 * y0 * y0 - nu2
    if den == 0.0 or nu2 + x_r * x_r == 0.0:
        raise SingularDenominator("4 y0^2 = nu^2: a vortex sits on the wall")
    return 1.0 / (nu2 + x_r * x_r) + 1.0 / den - p.C


class Reachability(NamedTuple):
    reachable: bool
    four_y0_sq: float | None


def reachability_x_r_zero(p: ReducedDipoleOrbitParams) -> Reachability:
    """Whether the dipole orbit crosses x_r = 0, and 4 y0^2 there if it does."""
    if p.nu == 0.0:
        raise ZeroNu("nu = 0 reduces to a single vortex in the quadrant")
    inv = 1.0 / (p.nu * p.nu)
    C = p.C
    if C > inv:
        return Reachability(True, C * p.nu * p.nu / (C - inv))
    return Reachability(False, None)


# ---------------------------------------------------------------------------
# Restricted three-vortex system in the co-rotating frame

DEFAULT_OMEGA0 = 1.0 / (4.0 * np.pi)


@dataclass(frozen=True)
class Restricted3State:
    """Passive vortex at (x, y) near two co-rotating unit vortices at (0, +-1)."""

    x: float
    y: float
    epsilon: float = 0.0
    omega0: float = DEFAULT_OMEGA0

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ValueError("omega0 must be positive")
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be non-negative")
        _check_singular(self.x, self.y)

    def moved(self, x: float, y: float) -> "Restricted3State":
        return Restricted3State(x, y, self.epsilon, self.omega0)


def _check_singular(x, y):
    if x == 0.0 and abs(y) == 1.0:
        raise SingularPoint(f"({x}, {y}) is a vortex location")


def restricted3_h0(x: float, y: float, omega0: float = DEFAULT_OMEGA0) -> float:
    _check_singular(x, y)
    p1 = x * x + (y - 1.0) ** 2
    p2 = x * x + (y + 1.0) ** 2
    return math.log(p1 * p2) / (2.0 * np.pi) + 0.5 * omega0 * (x * x + y * y)


def restricted3_hamiltonian(st: Restricted3State, t: float) -> float:
    """H0 + eps H1 with H1 = -(5/4pi)(x sin(w t) + y cos(w t))."""
    h0 = restricted3_h0(st.x, st.y, st.omega0)
    wt = st.omega0 * t
    h1 = -1.25 / np.pi * (st.x * math.sin(wt) + st.y * math.cos(wt))
    return h0 + st.epsilon * h1


def restricted3_gradient(st: Restricted3State, t: float) -> tuple[float, float]:
    """(dH/dx, dH/dy) of the time-dependent Hamiltonian."""
    xdot, ydot = restricted3_velocity(st, t)
    return -ydot, xdot


def restricted3_velocity(st: Restricted3State, t: float) -> tuple[float, float]:
    """Canonical flow xdot = dH/dy, ydot = -dH/dx."""
    _check_singular(st.x, st.y)
    return kernels.restricted3_rhs(st.x, st.y, t, st.epsilon, st.omega0)


# ---------------------------------------------------------------------------
# Integration adapters


class HalfPlaneModel:
    name = "halfplane"

    def __init__(self, system: VortexSystem, normalization: str = "verbatim"):
        _require_halfplane(system)
        self.system = system
        self.normalization = normalization
        self.scale = _scale(normalization)
        self.strengths = np.ascontiguousarray(system.strengths)
        self.tracers = np.ascontiguousarray(system.tracers, dtype=np.uint8)
        self.labels = tuple(f"{c}{i + 1}" for i in range(len(system)) for c in "xy")
        self._pair = len(system) == 2 and not system.tracers.any()
        self.conserved = ("H", "P", "height") if self._pair else ("H", "P")

    def initial(self):
        return self.system.vector

    def to_state(self, y) -> VortexSystem:
        return self.system.with_positions(y)

    def rhs(self, t, y):
        return kernels.halfplane_velocity(
            self.strengths, y.reshape(-1, 2), self.tracers, self.scale
        ).reshape(-1)

    def invariants(self, y):
        pos = y.reshape(-1, 2)
        out = {
            "H": _hamiltonian(self.strengths, pos, self.scale),
            "P": float(np.dot(self.strengths, pos[:, 1])),
        }
        if self._pair:
            out["height"] = conserved_height(self.to_state(y))
        return out

    def invariant_scales(self, y):
        pos = y.reshape(-1, 2)
        g = np.abs(self.strengths)
        iu = np.triu_indices(g.shape[0], 1)
        scales = {
            "H": self.scale * (float(np.sum(g[iu[0]] * g[iu[1]])) + float(np.sum(g * g))) / (2.0 * np.pi),
            "P": float(np.dot(g, np.abs(pos[:, 1]))),
        }
        if self._pair:
            scales["height"] = float(np.max(pos[:, 1]))
        return scales

    def pair_positions(self, y):
        return y.reshape(-1, 2)

    def boundary_distances(self, y):
        return y.reshape(-1, 2)[:, 1]

    def domain_margin(self, y):
        return float(np.min(y[1::2]))


class Restricted3Model:
    """Passive vortex in the perturbed co-rotating frame."""

    name = "restricted3"
    labels = ("x", "y")

    def __init__(self, st: Restricted3State, escape_radius: float = 10.0,
                 singular_radius: float = 1e-3):
        self.state = st
        self.epsilon = float(st.epsilon)
        self.omega0 = float(st.omega0)
        self.escape_radius = escape_radius
        self.singular_radius = singular_radius
        self.conserved = ("H0",) if self.epsilon == 0.0 else ()

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.omega0

    def initial(self):
        return np.array([self.state.x, self.state.y])

    def to_state(self, y) -> Restricted3State:
        return self.state.moved(float(y[0]), float(y[1]))

    def rhs(self, t, y):
        return np.array(kernels.restricted3_rhs(y[0], y[1], t, self.epsilon, self.omega0))

    def invariants(self, y):
        return {"H0": restricted3_h0(float(y[0]), float(y[1]), self.omega0)}

    def invariant_scales(self, y):
        return {"H0": 1.0 / (2.0 * np.pi)}

    def pair_positions(self, y):
        return None

    def boundary_distances(self, y):
        return np.empty(0)

    def domain_margin(self, y):
        return None

    def extra_events(self, settings):
        def escape(t, y):
            return self.escape_radius - math.hypot(y[0], y[1])

        def singular(t, y):
            d1 = math.hypot(y[0], y[1] - 1.0)
            d2 = math.hypot(y[0], y[1] + 1.0)
            return min(d1, d2) - self.singular_radius

        return [("Escape", escape, True), ("SingularApproach", singular, True)]
