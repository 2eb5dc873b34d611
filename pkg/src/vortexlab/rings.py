"""Coaxial thin-cored vortex rings (Dyson's model).

Each ring is (Z, R, Gamma, a): axial position, ring radius, circulation and
core radius. By default the core volume a^2 R is conserved as the ring
stretches. That is the closure under which the equations of motion and the
Hamiltonian with the -7/4 self-energy bracket describe the same flow.
``core="fixed"`` keeps a constant instead and uses the -5/4 bracket, the
Hamiltonian consistent with that choice. The velocities are the same
formula in both modes.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _si

from . import kernels
from .errors import CoincidentRings, InvalidState, NearSingularWarning, ThickCoreWarning

CORE_MODES = {"volume": -1.75, "fixed": -1.25}
MAX_CORE_RATIO = 0.2
WARN_CORE_RATIO = 0.05
NEAR_SINGULAR_GAP = 1e-3


def _ro(a):
    a = np.array(a, dtype=np.float64, copy=True).reshape(-1)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class RingSystem:
    Z: np.ndarray
    R: np.ndarray
    gamma: np.ndarray
    a: np.ndarray
    core: str = "volume"

    def __post_init__(self):
        for name in ("Z", "R", "gamma", "a"):
            object.__setattr__(self, name, _ro(getattr(self, name)))
        n = self.Z.shape[0]
        if not (self.R.shape[0] == self.gamma.shape[0] == self.a.shape[0] == n):
            raise InvalidState("Z, R, gamma and a must have the same length")
        if self.core not in CORE_MODES:
            raise InvalidState(f"core must be one of {sorted(CORE_MODES)}")

    @classmethod
    def from_rings(cls, rings, core: str = "volume") -> "RingSystem":
        """Build from an iterable of (Z, R, gamma, a) tuples."""
        arr = np.asarray(list(rings), dtype=np.float64).reshape(-1, 4)
        return cls(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3], core)

    def __len__(self):
        return self.Z.shape[0]

    @property
    def vector(self) -> np.ndarray:
        """Z1, R1, Z2, R2, ..."""
        return np.column_stack([self.Z, self.R]).reshape(-1)

    def with_coordinates(self, Z, R) -> "RingSystem":
        """Move the rings; in volume mode the cores thin as R grows."""
        R = np.asarray(R, dtype=np.float64)
        a = self.a * np.sqrt(self.R / R) if self.core == "volume" else self.a
        return RingSystem(Z, R, self.gamma, a, self.core)

    def __eq__(self, other):
        if not isinstance(other, RingSystem):
            return NotImplemented
        return self.core == other.core and all(
            np.array_equal(getattr(self, k), getattr(other, k)) for k in ("Z", "R", "gamma", "a")
        )

    __hash__ = None


def validate_rings(s: RingSystem) -> None:
    n = len(s)
    if n == 0:
        raise InvalidState("a ring system needs at least one ring")
    arrays = (s.Z, s.R, s.gamma, s.a)
    if not all(np.all(np.isfinite(v)) for v in arrays):
        raise InvalidState("ring data must be finite")
    for i in range(n):
        if s.R[i] <= 0:
            raise InvalidState(f"ring {i}: radius must be positive")
        if s.a[i] <= 0:
            raise InvalidState(f"ring {i}: core radius must be positive")
        if s.gamma[i] == 0:
            raise InvalidState(f"ring {i}: circulation must be nonzero")
        ratio = s.a[i] / s.R[i]
        if ratio >= MAX_CORE_RATIO:
            raise InvalidState(f"ring {i}: a/R = {ratio:.3g} is not a thin core (limit {MAX_CORE_RATIO})")
        if ratio > WARN_CORE_RATIO:
            warnings.warn(f"ring {i}: a/R = {ratio:.3g} exceeds {WARN_CORE_RATIO}", ThickCoreWarning, stacklevel=2)
    _check_gaps(s.Z, s.R)


def _check_gaps(Z, R):
    n = Z.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            gap = math.hypot(Z[i] - Z[j], R[i] - R[j])
            if gap == 0.0:
                raise CoincidentRings(f"rings {i} and {j} coincide")
            if gap < NEAR_SINGULAR_GAP * min(R[i], R[j]):
                warnings.warn(f"rings {i} and {j} are nearly coincident (gap {gap:.3g})",
                              NearSingularWarning, stacklevel=3)


# ---------------------------------------------------------------------------
# Green function


def _check_pair(z, r, zp, rp):
    if not (r > 0 and rp > 0):
        raise InvalidState("ring radii must be positive")
    if z == zp and r == rp:
        raise CoincidentRings("Green function evaluated at coincident rings")


def _S(theta, dz, r, rp):
    s = math.sin(0.5 * theta)
    return dz * dz + (r - rp) ** 2 + 4.0 * r * rp * s * s


def _quad(f, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _si.IntegrationWarning)
        val, _ = _si.quad(f, 0.0, math.pi, limit=400, **kw)
    return val


def green_ring(z: float, r: float, zp: float, rp: float) -> float:
    """Adaptive quadrature of (r r'/4pi) int_0^2pi cos(t) / sqrt(...) dt.

    The reference evaluation. Subtracting cos(t)/sqrt(A), which integrates
    to zero, leaves a positive integrand with no cancellation.
    """
    _check_pair(z, r, zp, rp)
    dz = z - zp
    A = dz * dz + r * r + rp * rp
    sA = math.sqrt(A)
    twor = 2.0 * r * rp

    def f(th):
        S = _S(th, dz, r, rp)
        sS = math.sqrt(S)
        c = math.cos(th)
        return twor * c * c / (sS * sA * (sS + sA))

    return r * rp / (4.0 * math.pi) * 2.0 * _quad(f, epsabs=1e-300, epsrel=1e-13)


def green_ring_fast(z: float, r: float, zp: float, rp: float) -> float:
    """Closed form through complete elliptic integrals (AGM)."""
    _check_pair(z, r, zp, rp)
    return kernels.green_fast(z - zp, r, rp)


def green_ring_grad(z: float, r: float, zp: float, rp: float) -> tuple[float, float]:
    """(dG/dz, dG/dr) by differentiating under the integral sign, then quadrature."""
    _check_pair(z, r, zp, rp)
    dz = z - zp

    def fz(th):
        return math.cos(th) * _S(th, dz, r, rp) ** -1.5

    def fr(th):
        c = math.cos(th)
        return c * (r - rp * c) * _S(th, dz, r, rp) ** -1.5

    pre = r * rp / (4.0 * math.pi) * 2.0
    gz = -pre * dz * _quad(fz, epsabs=1e-14, epsrel=1e-12)
    gr = green_ring(z, r, zp, rp) / r - pre * _quad(fr, epsabs=1e-14, epsrel=1e-12)
    return gz, gr


def green_ring_grad_fast(z: float, r: float, zp: float, rp: float) -> tuple[float, float]:
    """Analytic derivative of the elliptic closed form."""
    _check_pair(z, r, zp, rp)
    _, gz, gr = kernels.green_grad_fast(z - zp, r, rp)
    return gz, gr


# ---------------------------------------------------------------------------
# Dynamics


def ring_self_speed(gamma: float, R: float, a: float) -> float:
    """Thin-core self-induced speed (G / 4pi R)(log(8R/a) - 1/4)."""
    return gamma / (4.0 * math.pi * R) * (math.log(8.0 * R / a) - 0.25)


def velocity_rings(s: RingSystem) -> np.ndarray:
    """(Zdot_i, Rdot_i) for every ring, shape (N, 2)."""
    validate_rings(s)
    return kernels.ring_velocity(
        np.ascontiguousarray(s.Z), np.ascontiguousarray(s.R),
        np.ascontiguousarray(s.gamma), np.ascontiguousarray(s.a),
    )


def _interaction(Z, R, gam) -> float:
    n = Z.shape[0]
    U = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            U += gam[i] * gam[j] * kernels.green_fast(Z[i] - Z[j], R[i], R[j])
    return U / math.pi


def ring_self_energy(gamma, R, a, core: str = "volume"):
    """(G^2 / 4pi) R (log(8R/a) + c), c = -7/4 for volume-conserving cores, -5/4 for fixed ones.

    No thin-core validation, so the bare formula can be evaluated anywhere.
    """
    gamma, R, a = (np.asarray(v, dtype=np.float64) for v in (gamma, R, a))
    return gamma * gamma / (4.0 * math.pi) * R * (np.log(8.0 * R / a) + CORE_MODES[core])


def _hamiltonian(Z, R, gam, a, core) -> float:
    return float(np.sum(ring_self_energy(gam, R, a, core))) + _interaction(Z, R, gam)


def hamiltonian_rings(s: RingSystem) -> float:
    validate_rings(s)
    return _hamiltonian(s.Z, s.R, s.gamma, s.a, s.core)


def hamiltonian_rings_gradient(s: RingSystem) -> np.ndarray:
    """(dH/dZ_i, dH/dR_i), shape (N, 2), with a following R as the core mode says."""
    validate_rings(s)
    Z, R, gam, a = s.Z, s.R, s.gamma, s.a
    n = len(s)
    grad = np.zeros((n, 2))
    grad[:, 1] = gam * gam / (4.0 * math.pi) * (np.log(8.0 * R / a) - 0.25)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            _, gz, gr = kernels.green_grad_fast(Z[i] - Z[j], R[i], R[j])
            grad[i, 0] += gam[i] * gam[j] * gz / math.pi
            grad[i, 1] += gam[i] * gam[j] * gr / math.pi
    return grad


def ring_moment(s: RingSystem) -> float:
    """sum Gamma_i R_i^2."""
    return float(np.dot(s.gamma, s.R * s.R))


class RingModel:
    name = "rings"
    conserved = ("H", "M")

    def __init__(self, system: RingSystem):
        validate_rings(system)
        self.system = system
        self.core = system.core
        self.gamma = np.ascontiguousarray(system.gamma)
        self._kappa = system.a ** 2 * system.R
        self._a = np.ascontiguousarray(system.a)
        self.labels = tuple(f"{c}{i + 1}" for i in range(len(system)) for c in "ZR")

    def initial(self):
        return self.system.vector

    def core_radii(self, R):
        if self.core == "volume":
            return np.sqrt(self._kappa / R)
        return self._a

    def to_state(self, y) -> RingSystem:
        Z, R = y[0::2], y[1::2]
        return RingSystem(Z, R, self.gamma, self.core_radii(R), self.core)

    def rhs(self, t, y):
        Z = np.ascontiguousarray(y[0::2])
        R = np.ascontiguousarray(y[1::2])
        a = np.ascontiguousarray(self.core_radii(R))
        return kernels.ring_velocity(Z, R, self.gamma, a).reshape(-1)

    def invariants(self, y):
        Z, R = y[0::2], y[1::2]
        return {
            "H": _hamiltonian(Z, R, self.gamma, self.core_radii(R), self.core),
            "M": float(np.dot(self.gamma, R * R)),
        }

    def invariant_scales(self, y):
        R = y[1::2]
        a = self.core_radii(R)
        g2 = self.gamma ** 2
        return {
            "H": float(np.sum(g2 * R * np.abs(np.log(8.0 * R / a) + CORE_MODES[self.core]))) / (4.0 * math.pi),
            "M": float(np.dot(np.abs(self.gamma), R * R)),
        }

    def pair_positions(self, y):
        return y.reshape(-1, 2)

    def boundary_distances(self, y):
        return y[1::2]

    def domain_margin(self, y):
        return float(np.min(y[1::2]))


def random_ring_pairs(n: int, seed: int = 0, min_gap: float = 0.05) -> np.ndarray:
    """Seeded (z, r, z', r') samples with r, r' in [0.1, 10] and |z - z'| in [0, 10].

    Pairs closer than ``min_gap`` times the smaller radius are redrawn so
    finite differences of the Green function stay well conditioned.
    """
    rng = np.random.default_rng(seed)
    out = np.empty((n, 4))
    k = 0
    while k < n:
        z = rng.uniform(-5.0, 5.0)
        dz = rng.uniform(0.0, 10.0) * rng.choice((-1.0, 1.0))
        r, rp = rng.uniform(0.1, 10.0, 2)
        if math.hypot(dz, r - rp) < min_gap * min(r, rp):
            continue
        out[k] = z, r, z + dz, rp
        k += 1
    return out


def green_oracle_suite(n: int = 10_000, seed: int = 0, fd_samples: int | None = None) -> dict:
    """Compare the fast Green function with quadrature, and its gradient with finite differences."""
    pts = random_ring_pairs(n, seed)
    worst = 0.0
    for z, r, zp, rp in pts:
        q = green_ring(z, r, zp, rp)
        worst = max(worst, abs(green_ring_fast(z, r, zp, rp) - q) / abs(q))
    m = n if fd_samples is None else min(n, fd_samples)
    gworst = 0.0
    for z, r, zp, rp in pts[:m]:
        gz, gr = green_ring_grad_fast(z, r, zp, rp)
        hz = 1e-5 * max(1.0, abs(z))
        hr = 1e-5 * r
        fz = (green_ring_fast(z + hz, r, zp, rp) - green_ring_fast(z - hz, r, zp, rp)) / (2 * hz)
        fr = (green_ring_fast(z, r + hr, zp, rp) - green_ring_fast(z, r - hr, zp, rp)) / (2 * hr)
        gworst = max(gworst, math.hypot(gz - fz, gr - fr) / math.hypot(gz, gr))
    return {"max_rel_diff": float(worst), "max_grad_fd_err": float(gworst)}
