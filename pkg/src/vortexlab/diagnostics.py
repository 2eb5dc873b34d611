"""Poincare sections, leapfrog classification and separation series."""
from __future__ import annotations

import enum
import math

import numpy as np

from .core import Trajectory, pairwise_distances
from .errors import MixedSigns, OrbitEscaped, SingularApproach, WrongArity
from .halfplane import Restricted3Model, Restricted3State
from .integrate import IntegratorSettings, integrate

LEAPFROG_MIN_CROSSINGS = 3
LEAPFROG_MAX_RATIO = 1e3
COTRANSLATING_BAND = 0.01


def poincare_section(st0: Restricted3State, n_periods: int,
                     settings: IntegratorSettings | None = None,
                     escape_radius: float = 10.0, singular_radius: float = 1e-3,
                     raise_on_escape: bool = False) -> list[tuple[float, float]]:
    """Stroboscopic samples of the orbit at t = kT, k = 1..n_periods, T = 2pi/omega0.

    An orbit that leaves ``escape_radius`` yields fewer points (or raises
    :class:`OrbitEscaped` if asked). Entering the ``singular_radius``
    neighbourhood of a fixed vortex raises :class:`SingularApproach`; the
    points collected so far are on the exception as ``points``.
    """
    if int(n_periods) != n_periods or n_periods < 1:
        raise ValueError("n_periods must be a positive integer")
    model = Restricted3Model(st0, escape_radius=escape_radius, singular_radius=singular_radius)
    if min(math.hypot(st0.x, st0.y - 1.0), math.hypot(st0.x, st0.y + 1.0)) <= singular_radius:
        err = SingularApproach(f"initial point lies within {singular_radius} of a fixed vortex")
        err.points = []
        raise err
    if math.hypot(st0.x, st0.y) >= escape_radius:
        if raise_on_escape:
            err = OrbitEscaped(f"initial point lies outside radius {escape_radius}")
            err.points = []
            raise err
        return []
    T = model.period
    base = settings or IntegratorSettings()
    run = base.replace(t_end=n_periods * T, sample_dt=T, max_step=min(base.max_step, T))
    traj = integrate(model, settings=run)
    k = np.rint(traj.times / T)
    on_grid = (k >= 1) & (np.abs(traj.times - k * T) <= 1e-9 * T)
    points = [(float(x), float(y)) for x, y in traj.states[on_grid]]
    if traj.status == "event_stop":
        kind = traj.stop_event.kind
        if kind == "SingularApproach":
            err = SingularApproach(
                f"orbit came within {singular_radius} of a fixed vortex at t={traj.stop_event.time:.6g}",
                traj)
            err.points = points
            raise err
        if kind == "Escape" and raise_on_escape:
            err = OrbitEscaped(f"orbit left radius {escape_radius} at t={traj.stop_event.time:.6g}", traj)
            err.points = points
            raise err
    return points


class LeapfrogClass(enum.Enum):
    LEAPFROG = "Leapfrog"
    PASSING = "Passing"
    COTRANSLATING = "CoTranslating"
    UNDETERMINED = "Undetermined"


def _pair_series(traj: Trajectory):
    model = traj.model
    gam = getattr(model, "gamma", None)
    if gam is None:
        gam = getattr(model, "strengths", None)
    if gam is None:
        raise ValueError("trajectory model exposes no strengths")
    gam = np.asarray(gam, dtype=float)
    if gam.shape[0] != 2:
        raise WrongArity(f"leapfrog classification needs exactly 2 vortices, got {gam.shape[0]}")
    if gam[0] * gam[1] < 0:
        raise MixedSigns("leapfrog classification needs strengths of one sign")
    p = traj.states.reshape(len(traj), 2, 2)
    rel = p[:, 0, :] - p[:, 1, :]
    return rel[:, 0], np.hypot(rel[:, 0], rel[:, 1])


def _sign_changes(v) -> int:
    s = np.sign(v)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def leapfrog_classify(traj: Trajectory) -> LeapfrogClass:
    """Classify the relative motion of two same-sign vortices or rings.

    The first coordinate of each entity is axial (x in the half-plane, Z for
    rings); separation is the Euclidean distance in the meridian plane.
    """
    axial, sep = _pair_series(traj)
    crossings = _sign_changes(axial)
    lo, hi = float(np.min(sep)), float(np.max(sep))
    if crossings >= LEAPFROG_MIN_CROSSINGS and lo > 0 and hi / lo < LEAPFROG_MAX_RATIO:
        return LeapfrogClass.LEAPFROG
    if (hi - lo) < COTRANSLATING_BAND * float(np.mean(sep)):
        return LeapfrogClass.COTRANSLATING
    if crossings == 1:
        s = np.sign(axial)
        first = int(np.flatnonzero(s != s[np.flatnonzero(s)[0]])[0])
        if np.all(np.diff(sep[first:]) >= 0):
            return LeapfrogClass.PASSING
    return LeapfrogClass.UNDETERMINED


def separation_series(traj: Trajectory) -> list[tuple[float, np.ndarray, np.ndarray]]:
    """(t, pairwise distance matrix, boundary distances) at every sample."""
    model = traj.model
    out = []
    for t, y in zip(traj.times, traj.states):
        pts = model.pair_positions(y)
        d = pairwise_distances(pts) if pts is not None else np.zeros((0, 0))
        out.append((float(t), d, np.asarray(model.boundary_distances(y), dtype=float)))
    return out


def min_boundary_distance(traj: Trajectory) -> float:
    vals = [np.min(b) for _, _, b in separation_series(traj) if b.size]
    return float(min(vals)) if vals else math.inf
