"""N point vortices in the whole plane."""
from __future__ import annotations

import numpy as np

from . import kernels
from .core import Domain, VortexSystem, pairwise_distances, plane_invariants, validate_system
from .errors import DomainViolation, InvalidState


def _require_plane(s: VortexSystem) -> None:
    validate_system(s)
    if s.domain is not Domain.PLANE:
        raise DomainViolation(f"expected a plane system, got {s.domain.value}")


def velocity_plane(s: VortexSystem) -> np.ndarray:
    """Induced velocity (xdot, ydot) of every vortex, shape (N, 2)."""
    _require_plane(s)
    return kernels.plane_velocity(s.strengths, np.ascontiguousarray(s.positions))


def hamiltonian_plane(s: VortexSystem) -> float:
    """H = -(1/4pi) sum_{i != j} G_i G_j log l_ij."""
    _require_plane(s)
    if len(s) < 2:
        raise InvalidState("the plane Hamiltonian needs N >= 2")
    return _hamiltonian(s.strengths, s.positions)


def _hamiltonian(gam, pos) -> float:
    n = gam.shape[0]
    iu = np.triu_indices(n, 1)
    d = pairwise_distances(pos)[iu]
    # each unordered pair appears twice in the ordered sum
    return float(-np.sum(gam[iu[0]] * gam[iu[1]] * np.log(d)) / (2.0 * np.pi))


def hamiltonian_plane_gradient(s: VortexSystem) -> np.ndarray:
    """Analytic (dH/dx_i, dH/dy_i), shape (N, 2)."""
    _require_plane(s)
    gam, pos = s.strengths, s.positions
    dx = pos[:, 0, None] - pos[None, :, 0]
    dy = pos[:, 1, None] - pos[None, :, 1]
    l2 = dx * dx + dy * dy
    np.fill_diagonal(l2, np.inf)
    w = gam[:, None] * gam[None, :] / l2
    grad = np.empty_like(pos)
    grad[:, 0] = -np.sum(w * dx, axis=1) / (2.0 * np.pi)
    grad[:, 1] = -np.sum(w * dy, axis=1) / (2.0 * np.pi)
    return grad


class PlaneModel:
    """Adapter driving the plane flow through :func:`vortexlab.integrate.integrate`."""

    name = "plane"
    conserved = ("H", "Q", "P", "I")

    def __init__(self, system: VortexSystem):
        _require_plane(system)
        self.system = system
        self.strengths = np.ascontiguousarray(system.strengths)
        self.labels = tuple(f"{c}{i + 1}" for i in range(len(system)) for c in "xy")
        self._abs_gam = np.abs(self.strengths)

    def initial(self) -> np.ndarray:
        return self.system.vector

    def to_state(self, y) -> VortexSystem:
        return self.system.with_positions(y)

    def rhs(self, t, y):
        return kernels.plane_velocity(self.strengths, y.reshape(-1, 2)).reshape(-1)

    def invariants(self, y) -> dict[str, float]:
        pos = y.reshape(-1, 2)
        s = self.to_state(y)
        Q, P, I = plane_invariants(s)
        out = {"Q": Q, "P": P, "I": I}
        out["H"] = _hamiltonian(self.strengths, pos) if len(s) > 1 else 0.0
        return out

    def invariant_scales(self, y) -> dict[str, float]:
        pos = y.reshape(-1, 2)
        g = self._abs_gam
        n = g.shape[0]
        iu = np.triu_indices(n, 1)
        pair = float(np.sum(g[iu[0]] * g[iu[1]])) / (2.0 * np.pi)
        return {
            "Q": float(np.dot(g, np.abs(pos[:, 0]))),
            "P": float(np.dot(g, np.abs(pos[:, 1]))),
            "I": float(np.dot(g, np.sum(pos * pos, axis=1))),
            "H": pair,
        }

    def pair_positions(self, y):
        return y.reshape(-1, 2)

    def boundary_distances(self, y):
        return np.empty(0)

    def domain_margin(self, y):
        return None
