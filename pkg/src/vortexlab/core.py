"""Shared domain types, state validation and the plane-family moments."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import CoincidentVortices, DomainViolation, EmptySystem, InvalidState

# Separations below this are treated as a collision of two point vortices.
COINCIDENCE_TOL = 1e-12


class Domain(enum.Enum):
    PLANE = "plane"
    HALFPLANE = "halfplane"
    QUADRANT = "quadrant"


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class VortexSystem:
    """Strengths and positions of N point vortices in one domain.

    Passive tracers carry zero strength and are flagged in ``tracers``.
    The arrays are copied and made read-only on construction.
    """

    strengths: np.ndarray
    positions: np.ndarray
    domain: Domain = Domain.PLANE
    tracers: np.ndarray | None = None

    def __post_init__(self):
        gam = np.atleast_1d(np.asarray(self.strengths, dtype=np.float64))
        pos = np.asarray(self.positions, dtype=np.float64)
        if pos.size == 0:
            pos = pos.reshape(0, 2)
        pos = np.atleast_2d(pos)
        if gam.ndim != 1 or pos.ndim != 2 or pos.shape[1] != 2:
            raise InvalidState("strengths must be (N,) and positions (N, 2)")
        if gam.shape[0] != pos.shape[0]:
            raise InvalidState(
                f"{gam.shape[0]} strengths but {pos.shape[0]} positions"
            )
        if self.tracers is None:
            tr = np.zeros(gam.shape[0], dtype=bool)
        else:
            tr = np.array(self.tracers, dtype=bool).reshape(-1)
            if tr.shape != gam.shape:
                raise InvalidState("tracers mask must match strengths")
        tr.setflags(write=False)
        object.__setattr__(self, "strengths", _frozen(gam))
        object.__setattr__(self, "positions", _frozen(pos))
        object.__setattr__(self, "tracers", tr)
        object.__setattr__(self, "domain", Domain(self.domain))

    def __len__(self) -> int:
        return self.strengths.shape[0]

    @property
    def x(self) -> np.ndarray:
        return self.positions[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.positions[:, 1]

    @property
    def vector(self) -> np.ndarray:
        """Positions flattened as x1, y1, x2, y2, ..."""
        return self.positions.reshape(-1).copy()

    def with_positions(self, positions) -> "VortexSystem":
        pos = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
        return VortexSystem(self.strengths, pos, self.domain, self.tracers)

    def __eq__(self, other):
        if not isinstance(other, VortexSystem):
            return NotImplemented
        return (
            self.domain == other.domain
            and np.array_equal(self.strengths, other.strengths)
            and np.array_equal(self.positions, other.positions)
            and np.array_equal(self.tracers, other.tracers)
        )

    __hash__ = None


def pairwise_distances(positions: np.ndarray) -> np.ndarray:
    pos = np.asarray(positions, dtype=np.float64)
    diff = pos[:, None, :] - pos[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def validate_system(s: VortexSystem) -> None:
    """Raise if ``s`` breaks any VortexSystem invariant; return None otherwise."""
    n = len(s)
    if n == 0:
        raise EmptySystem("a vortex system needs at least one vortex")
    if not (np.all(np.isfinite(s.strengths)) and np.all(np.isfinite(s.positions))):
        raise InvalidState("strengths and positions must be finite")
    for i in range(n):
        if s.tracers[i]:
            if s.strengths[i] != 0.0:
                raise InvalidState(f"vortex {i}: a passive tracer must have zero strength")
        elif s.strengths[i] == 0.0:
            raise InvalidState(
                f"vortex {i}: zero strength is only allowed for a flagged passive tracer"
            )
    if s.domain is Domain.HALFPLANE:
        bad = np.flatnonzero(s.y <= 0.0)
        if bad.size:
            raise DomainViolation(f"vortex {bad[0]}: half-plane requires y > 0")
    elif s.domain is Domain.QUADRANT:
        if n != 1:
            raise DomainViolation("the quadrant model supports a single vortex only")
        bad = np.flatnonzero((s.x <= 0.0) | (s.y <= 0.0))
        if bad.size:
            raise DomainViolation(f"vortex {bad[0]}: quadrant requires x > 0 and y > 0")
    if n > 1:
        d = pairwise_distances(s.positions)
        iu = np.triu_indices(n, 1)
        close = np.flatnonzero(d[iu] < COINCIDENCE_TOL)
        if close.size:
            i, j = iu[0][close[0]], iu[1][close[0]]
            raise CoincidentVortices(f"vortices {i} and {j} coincide")


def plane_invariants(s: VortexSystem) -> tuple[float, float, float]:
    """Linear and angular impulse moments (Q, P, I)."""
    gam, x, y = s.strengths, s.x, s.y
    Q = float(np.dot(gam, x))
    P = float(np.dot(gam, y))
    I = float(np.dot(gam, x * x + y * y))
    return Q, P, I


def collapse_condition(strengths: Sequence[float], tol: float = 1e-12) -> bool:
    """Necessary condition for self-similar collapse: sum_{i<j} G_i G_j == 0."""
    gam = np.asarray(strengths, dtype=np.float64)
    if gam.size < 2:
        raise ValueError("collapse_condition needs at least two strengths")
    iu = np.triu_indices(gam.size, 1)
    prods = gam[iu[0]] * gam[iu[1]]
    # fsum keeps the test exactly permutation invariant
    total = math.fsum(prods)
    return bool(abs(total) <= tol * math.fsum(np.abs(prods)))


@dataclass(frozen=True)
class Event:
    """Something the integrator noticed: a close approach, a wall approach, a collapse."""

    time: float
    kind: str
    detail: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"time": self.time, "kind": self.kind, **self.detail}


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time samples of a run, with per-sample invariants and detected events.

    ``status`` is ``"completed"``, ``"event_stop"`` (a terminal event such as a
    collapse ended the run) or ``"step_underflow"``.
    """

    times: np.ndarray
    states: np.ndarray
    invariants: dict[str, np.ndarray]
    events: tuple[Event, ...] = ()
    model: Any = None
    status: str = "completed"
    stop_event: Event | None = None

    def __post_init__(self):
        times = _frozen(np.asarray(self.times, dtype=np.float64).reshape(-1))
        states = _frozen(np.asarray(self.states, dtype=np.float64))
        if states.ndim == 1:
            states = _frozen(states.reshape(len(times), -1))
        if states.shape[0] != times.shape[0]:
            raise ValueError("one state per time sample is required")
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise ValueError("trajectory times must be strictly increasing")
        inv = {}
        for name, vals in self.invariants.items():
            vals = _frozen(np.asarray(vals, dtype=np.float64).reshape(-1))
            if vals.shape[0] != times.shape[0]:
                raise ValueError(f"invariant {name!r} needs one value per sample")
            inv[name] = vals
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "invariants", inv)
        object.__setattr__(self, "events", tuple(self.events))

    def __len__(self) -> int:
        return self.times.shape[0]

    def snapshot(self, k: int):
        """State object of sample ``k`` (requires the producing model)."""
        if self.model is None:
            return self.states[k]
        return self.model.to_state(self.states[k])

    def events_of(self, kind: str) -> list[Event]:
        return [e for e in self.events if e.kind == kind]
