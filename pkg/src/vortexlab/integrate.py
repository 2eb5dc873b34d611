"""Adaptive Dormand-Prince 5(4) integration with invariant monitoring and events.

Any object with ``initial()``, ``rhs(t, y)``, ``invariants(y)``,
``invariant_scales(y)``, ``labels`` and the event hooks
``pair_positions``, ``boundary_distances`` and ``domain_margin`` can be
integrated. Models may add ``extra_events(settings)`` returning tuples
``(kind, fn, terminal)`` or ``(kind, fn, terminal, finish)``. An event fires
when ``fn`` goes from positive to non-positive. ``finish(t, y)`` may return
a corrected ``(time, detail)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import kernels
from .core import Event, Trajectory
from .errors import EventStop, InvalidState, StepUnderflow

# Shampine's continuous extension: y(t + s h) = y + h * K^T P [s, s^2, s^3, s^4]
_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0


@dataclass(frozen=True)
class IntegratorSettings:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = 1.0
    min_step: float = 1e-12
    t_end: float = 10.0
    sample_dt: float = 0.1
    close_approach: float | None = None
    boundary_distance: float | None = None
    collapse_radius: float | None = None
    event_tol: float = 1e-9
    drift_tol: float = 1e-8
    first_step: float | None = None
    max_steps: int = 10_000_000

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_step", "min_step", "sample_dt", "event_tol", "drift_tol"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise InvalidState(f"{name} must be a positive finite number, got {v!r}")
        if self.min_step > self.max_step:
            raise InvalidState("min_step must not exceed max_step")
        if not (math.isfinite(self.t_end) and self.t_end >= 0):
            raise InvalidState("t_end must be a non-negative finite number")
        for name in ("close_approach", "boundary_distance", "collapse_radius", "first_step"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise InvalidState(f"{name} must be positive when given")
        if self.max_steps < 1:
            raise InvalidState("max_steps must be at least 1")

    def replace(self, **changes) -> "IntegratorSettings":
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d.update(changes)
        return IntegratorSettings(**d)


@dataclass(frozen=True)
class StepResult:
    accepted: bool
    error: float
    h_next: float
    events: tuple[Event, ...] = ()

    def __post_init__(self):
        if not self.error >= 0:
            raise ValueError("error estimate must be non-negative")


@dataclass
class _Step:
    t: float
    h: float
    y: np.ndarray
    y_new: np.ndarray
    K: np.ndarray

    def __call__(self, t):
        s = (t - self.t) / self.h
        return self.y + self.h * (self.K.T @ _P) @ np.array([s, s * s, s ** 3, s ** 4])


# ---------------------------------------------------------------------------
# events


@dataclass
class _EventGroup:
    kind: str
    fn: Callable[[float, np.ndarray], np.ndarray]
    terminal: bool
    finish: Callable | None = None
    describe: Callable[[int], dict] = field(default=lambda k: {})


def _event_groups(model, settings: IntegratorSettings) -> list[_EventGroup]:
    groups = []
    probe = model.initial()
    if settings.close_approach is not None and model.pair_positions(probe) is not None:
        n = model.pair_positions(probe).shape[0]
        iu = np.triu_indices(n, 1)
        thr = settings.close_approach

        def pair_fn(t, y):
            p = model.pair_positions(y)
            d = p[iu[0]] - p[iu[1]]
            return np.hypot(d[:, 0], d[:, 1]) - thr

        groups.append(_EventGroup("CloseApproach", pair_fn, False,
                                  describe=lambda k: {"i": int(iu[0][k]), "j": int(iu[1][k])}))
    if settings.boundary_distance is not None and np.size(model.boundary_distances(probe)):
        thr = settings.boundary_distance
        groups.append(_EventGroup("BoundaryApproach",
                                  lambda t, y: np.asarray(model.boundary_distances(y)) - thr, False,
                                  describe=lambda k: {"index": int(k)}))
    for entry in getattr(model, "extra_events", lambda s: [])(settings):
        kind, fn, terminal = entry[:3]
        finish = entry[3] if len(entry) > 3 else None
        groups.append(_EventGroup(kind, (lambda f: lambda t, y: np.atleast_1d(f(t, y)))(fn),
                                  terminal, finish))
    return groups


def _bisect(g, k, t0, t1, interp, tol):
    a, b = t0, t1
    while b - a > tol:
        mid = 0.5 * (a + b)
        if g(mid, interp(mid))[k] > 0:
            a = mid
        else:
            b = mid
    return b


def _crossings(groups, t0, y0, t1, y1, interp, tol, g0s=None):
    found = []
    g1s = []
    for gi, grp in enumerate(groups):
        v0 = grp.fn(t0, y0) if g0s is None else g0s[gi]
        v1 = grp.fn(t1, y1)
        g1s.append(v1)
        for k in np.nonzero((v0 > 0) & (v1 <= 0))[0]:
            te = _bisect(grp.fn, k, t0, t1, interp, tol)
            ye = interp(te)
            detail = dict(grp.describe(int(k)))
            if grp.finish is not None:
                te_rep, extra = grp.finish(te, ye)
                detail.update(extra)
            else:
                te_rep = te
            found.append((te, grp.terminal, Event(float(te_rep), grp.kind, detail)))
    found.sort(key=lambda e: e[0])
    return found, g1s


def detect_events(model, state, previous_state, settings: IntegratorSettings,
                  t=1.0, t_prev=0.0, interpolant=None) -> list[Event]:
    """Events between two states, bisected to ``settings.event_tol`` in time.

    Without an interpolant the path between the states is taken as linear.
    """
    y0 = np.asarray(previous_state, dtype=np.float64)
    y1 = np.asarray(state, dtype=np.float64)
    if interpolant is None:
        def interpolant(tt):
            s = (tt - t_prev) / (t - t_prev)
            return (1 - s) * y0 + s * y1
    found, _ = _crossings(_event_groups(model, settings), t_prev, y0, t, y1, interpolant,
                          settings.event_tol)
    return [e for _, _, e in found]


# ---------------------------------------------------------------------------
# driver


def _sample_times(t_end, dt):
    n = int(math.floor(t_end / dt + 1e-9))
    ts = [k * dt for k in range(n + 1)]
    if t_end - ts[-1] > 1e-12 * max(1.0, t_end):
        ts.append(t_end)
    else:
        ts[-1] = t_end
    return ts


def _initial_step(f, y0, f0, settings):
    if settings.first_step is not None:
        return min(settings.first_step, settings.max_step)
    scale = settings.abs_tol + settings.rel_tol * np.abs(y0)
    d0 = np.max(np.abs(y0) / scale)
    d1 = np.max(np.abs(f0) / scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + h0 * f0
    d2 = np.max(np.abs(f(h0, y1) - f0) / scale) / h0
    h1 = max(1e-6, h0 * 1e-3) if max(d1, d2) <= 1e-15 else (0.01 / max(d1, d2)) ** 0.2
    return float(min(100 * h0, h1, settings.max_step))


def integrate(model, y0=None, settings: IntegratorSettings | None = None,
              raise_on_stop: bool = False) -> Trajectory:
    """Integrate ``model`` from ``y0`` (default ``model.initial()``) to ``settings.t_end``.

    A terminal event returns a trajectory with ``status="event_stop"`` ending
    at the event, or raises :class:`EventStop` if ``raise_on_stop``.
    Step-size underflow raises :class:`StepUnderflow` carrying the partial
    trajectory.
    """
    settings = settings or IntegratorSettings()
    y = np.array(model.initial() if y0 is None else y0, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(y)):
        raise InvalidState("initial state must be finite")
    margin = model.domain_margin(y)
    if margin is not None and not margin > 0:
        raise InvalidState("initial state lies outside the model domain")

    f = model.rhs
    inv_names = list(model.invariants(y).keys())
    times: list[float] = []
    states: list[np.ndarray] = []
    invs: dict[str, list[float]] = {k: [] for k in inv_names}
    events: list[Event] = []

    def record(tt, yy):
        times.append(float(tt))
        states.append(np.array(yy))
        for k, v in model.invariants(yy).items():
            invs[k].append(v)

    def build(status="completed", stop=None):
        return Trajectory(np.array(times), np.array(states).reshape(len(times), -1),
                          {k: np.array(v) for k, v in invs.items()}, tuple(events), model,
                          status, stop)

    t_end = float(settings.t_end)
    samples = _sample_times(t_end, settings.sample_dt)
    record(0.0, y)
    si = 1
    if t_end == 0.0:
        return build()

    groups = _event_groups(model, settings)
    g_prev = [grp.fn(0.0, y) for grp in groups]
    t = 0.0
    f0 = f(t, y)
    h = _initial_step(f, y, f0, settings)
    steps = 0
    rejected_last = False
    while t < t_end:
        steps += 1
        if steps > settings.max_steps:
            raise StepUnderflow(f"exceeded {settings.max_steps} steps at t={t}", build("step_underflow"))
        last = False
        if t + h >= t_end or t_end - (t + h) < settings.min_step:
            h = t_end - t
            last = True
        y_new, f_new, err, K = kernels.dp5_step(f, t, y, h, f0, settings.rel_tol, settings.abs_tol)
        ok = err <= 1.0  # NaN and inf compare false
        if ok:
            m = model.domain_margin(y_new)
            ok = m is None or m > 0
            if not ok:
                err = math.inf
        if not ok:
            factor = MIN_FACTOR if not math.isfinite(err) else max(MIN_FACTOR, SAFETY * err ** -0.2)
            h_try = h * factor
            if h_try < settings.min_step:
                if times[-1] < t:
                    record(t, y)
                raise StepUnderflow(f"step size fell below {settings.min_step} at t={t:.17g}",
                                    build("step_underflow"))
            h = h_try
            rejected_last = True
            continue

        t_new = t_end if last else t + h
        step = _Step(t, h, y, y_new, K)
        found, g_new = _crossings(groups, t, y, t_new, y_new, step, settings.event_tol, g_prev)
        stop = None
        for te, terminal, ev in found:
            events.append(ev)
            if terminal:
                stop = (te, ev)
                break
        if stop is not None:
            te, ev = stop
            while si < len(samples) and samples[si] < te:
                record(samples[si], step(samples[si]))
                si += 1
            if te > times[-1]:
                record(te, step(te))
            traj = build("event_stop", ev)
            if raise_on_stop:
                raise EventStop(f"{ev.kind} at t={ev.time:.17g}", traj)
            return traj

        while si < len(samples) and samples[si] < t_new:
            record(samples[si], step(samples[si]))
            si += 1
        if last:
            record(t_end, y_new)
            si = len(samples)
        t, y, f0, g_prev = t_new, y_new, f_new, g_new
        factor = MAX_FACTOR if err == 0 else min(MAX_FACTOR, SAFETY * err ** -0.2)
        if rejected_last:
            factor = min(factor, 1.0)
        rejected_last = False
        h = min(settings.max_step, h * max(MIN_FACTOR, factor))
        if h < settings.min_step and t < t_end:
            record(t, y)
            raise StepUnderflow(f"step size fell below {settings.min_step} at t={t:.17g}",
                                build("step_underflow"))
    return build()


# ---------------------------------------------------------------------------
# invariant monitoring


@dataclass(frozen=True)
class InvariantReport:
    initial: dict[str, float]
    max_abs_drift: dict[str, float]
    max_rel_drift: dict[str, float]
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(v < self.tolerance for v in self.max_rel_drift.values())

    def failures(self) -> list[str]:
        return [k for k, v in self.max_rel_drift.items() if not v < self.tolerance]

    def to_dict(self) -> dict[str, Any]:
        return {
            "tolerance": self.tolerance,
            "passed": self.passed,
            "invariants": {
                k: {"initial": self.initial[k], "max_abs_drift": self.max_abs_drift[k],
                    "max_rel_drift": self.max_rel_drift[k],
                    "passed": self.max_rel_drift[k] < self.tolerance}
                for k in self.initial
            },
        }


def monitor_invariants(model, trajectory: Trajectory,
                       settings: IntegratorSettings | None = None) -> InvariantReport:
    """Drift of every conserved quantity the model declares.

    Relative drift is |X - X0| / max(|X0|, s), where s is the model's natural
    scale for X, so invariants that start near zero are not blown up.
    """
    if len(trajectory) == 0:
        raise ValueError("trajectory is empty")
    tol = (settings or IntegratorSettings()).drift_tol
    scales = model.invariant_scales(trajectory.states[0])
    init, ab, rel = {}, {}, {}
    for name in model.conserved:
        vals = trajectory.invariants[name]
        x0 = float(vals[0])
        d = float(np.max(np.abs(vals - x0)))
        denom = max(abs(x0), scales.get(name, 0.0))
        init[name] = x0
        ab[name] = d
        rel[name] = d / denom if denom > 0 else (0.0 if d == 0 else math.inf)
    return InvariantReport(init, ab, rel, tol)
