import math

import numpy as np
import pytest

from vortexlab import kernels
from vortexlab.core import Domain, Event, VortexSystem
from vortexlab.errors import EventStop, InvalidState, StepUnderflow
from vortexlab.halfplane import HalfPlaneModel
from vortexlab.integrate import IntegratorSettings, StepResult, detect_events, integrate, monitor_invariants
from vortexlab.membranes import MembraneModel, SphereProductState, membrane_closed_form
from vortexlab.planar import PlaneModel
from vortexlab.rings import RingModel, RingSystem


class BlowUp:
    """y' = y^2 from y = 1: blows up at t = 1 with no event to stop it."""

    name = "blowup"
    labels = ("y",)
    conserved = ()

    def initial(self):
        return np.array([1.0])

    def rhs(self, t, y):
        return y * y

    def invariants(self, y):
        return {}

    def invariant_scales(self, y):
        return {}

    def pair_positions(self, y):
        return None

    def boundary_distances(self, y):
        return np.empty(0)

    def domain_margin(self, y):
        return None


def pair(l=2.0):
    return PlaneModel(VortexSystem([1.0, 1.0], [[l / 2, 0.0], [-l / 2, 0.0]], Domain.PLANE))


class TestSettings:
    def test_defaults(self):
        s = IntegratorSettings()
        assert (s.rel_tol, s.abs_tol) == (1e-10, 1e-12)

    @pytest.mark.parametrize("kw", [{"rel_tol": 0}, {"abs_tol": -1}, {"min_step": 2, "max_step": 1},
                                    {"t_end": -1}, {"sample_dt": 0}, {"close_approach": 0},
                                    {"t_end": math.inf}])
    def test_invalid(self, kw):
        with pytest.raises(InvalidState):
            IntegratorSettings(**kw)

    def test_replace_validates(self):
        with pytest.raises(InvalidState):
            IntegratorSettings().replace(rel_tol=-1.0)
        assert IntegratorSettings().replace(t_end=3.0).t_end == 3.0

    def test_step_result(self):
        assert StepResult(True, 0.0, 0.1).accepted
        with pytest.raises(ValueError):
            StepResult(True, -1.0, 0.1)


class TestIntegrate:
    def test_membrane_exponential_case(self):
        tr = integrate(MembraneModel(SphereProductState(1, 1, 1, 1)), settings=IntegratorSettings(t_end=1.0))
        assert tr.states[-1] == pytest.approx([math.exp(-1), math.e], rel=1e-8)
        assert tr.times[-1] == 1.0

    def test_corotating_distance(self, backend):
        tr = integrate(pair(), settings=IntegratorSettings(t_end=100.0))
        d = np.hypot(*(tr.states[:, :2] - tr.states[:, 2:]).T)
        assert np.max(np.abs(d - 2.0)) < 1e-9

    def test_sampling_grid(self):
        tr = integrate(pair(), settings=IntegratorSettings(t_end=1.05, sample_dt=0.1))
        assert len(tr) == 12
        assert np.allclose(tr.times[:11], np.arange(11) * 0.1)
        assert tr.times[-1] == 1.05
        assert set(tr.invariants) == {"H", "Q", "P", "I"}

    def test_zero_horizon(self):
        tr = integrate(pair(), settings=IntegratorSettings(t_end=0.0))
        assert len(tr) == 1 and tr.times[0] == 0.0
        assert np.array_equal(tr.states[0], pair().initial())

    def test_deterministic(self):
        s = IntegratorSettings(t_end=20.0)
        a = integrate(pair(1.3), settings=s)
        b = integrate(pair(1.3), settings=s)
        assert np.array_equal(a.states, b.states) and np.array_equal(a.times, b.times)

    def test_rejects_bad_initial_state(self):
        with pytest.raises(InvalidState):
            integrate(pair(), y0=[np.nan, 0, 1, 0])
        m = HalfPlaneModel(VortexSystem([1.0], [[0.0, 1.0]], Domain.HALFPLANE))
        with pytest.raises(InvalidState):
            integrate(m, y0=[0.0, -1.0])

    def test_step_underflow_keeps_partial_trajectory(self):
        with pytest.raises(StepUnderflow) as ei:
            integrate(BlowUp(), settings=IntegratorSettings(t_end=2.0, min_step=1e-6))
        tr = ei.value.trajectory
        assert tr.status == "step_underflow"
        assert 0.9 < tr.times[-1] < 1.0
        assert np.allclose(tr.states[:, 0], 1 / (1 - tr.times), rtol=1e-6)

    def test_accepted_steps_respect_tolerance(self, monkeypatch):
        calls = []
        real = kernels.dp5_step

        def spy(f, t, y, h, f0, rtol, atol):
            out = real(f, t, y, h, f0, rtol, atol)
            calls.append((t, h, out[2]))
            return out

        monkeypatch.setattr(kernels, "dp5_step", spy)
        integrate(BlowUp(), settings=IntegratorSettings(t_end=0.999, first_step=0.5))
        accepted = [(t, h, e) for (t, h, e), nxt in zip(calls, calls[1:]) if nxt[0] == t + h]
        assert len(accepted) > 10
        assert max(e for _, _, e in accepted) <= 1.0
        assert any(e > 1.0 for _, _, e in calls)

    def test_tolerance_convergence(self):
        # the error is roughly proportional to rel_tol; a single halving can fall a
        # little short of 2x, so four halvings are required to give at least 16x
        def err(tol):
            m = MembraneModel(SphereProductState(1.0, 1.0, 1, 2))
            tr = integrate(m, settings=IntegratorSettings(t_end=0.9, rel_tol=tol, abs_tol=tol * 1e-2))
            return np.max(np.abs(tr.states[-1] - membrane_closed_form(1, 1, 1, 2, 0.9)))

        tols = [1e-5 / 2 ** k for k in range(5)]
        e = [err(t) for t in tols]
        assert all(b < a for a, b in zip(e, e[1:]))
        assert e[0] / e[-1] >= 16

    def test_exact_for_uniform_translation(self):
        m = HalfPlaneModel(VortexSystem([1.0], [[0.0, 0.5]], Domain.HALFPLANE))
        for tol in (1e-6, 5e-7):
            tr = integrate(m, settings=IntegratorSettings(t_end=10.0, rel_tol=tol, abs_tol=tol * 1e-2))
            assert tr.states[-1, 0] == pytest.approx(10.0 / math.pi, rel=1e-14)


class TestEvents:
    def test_collapse_returns_event_stop(self):
        m = MembraneModel(SphereProductState(1, 1, 1, 2))
        tr = integrate(m, settings=IntegratorSettings(t_end=3.0))
        assert tr.status == "event_stop"
        assert len(tr.events_of("Collapse")) == 1
        assert abs(tr.stop_event.time - 1.0) < 1e-6
        assert tr.stop_event.detail["crossing_time"] < 1.0

    def test_collapse_can_raise(self):
        m = MembraneModel(SphereProductState(1, 1, 1, 2))
        with pytest.raises(EventStop) as ei:
            integrate(m, settings=IntegratorSettings(t_end=3.0), raise_on_stop=True)
        assert ei.value.trajectory.stop_event.kind == "Collapse"

    def test_no_events_far_apart(self):
        tr = integrate(pair(10.0), settings=IntegratorSettings(t_end=20.0, close_approach=0.1))
        assert tr.events == ()

    def test_close_approach_time(self):
        # two co-moving dipoles do not approach; a straight linear path does
        m = pair(10.0)
        s = IntegratorSettings(close_approach=1.0)
        ev = detect_events(m, [0.4, 0, -0.4, 0], [2, 0, -2, 0], s, t=1.0, t_prev=0.0)
        assert len(ev) == 1 and ev[0].kind == "CloseApproach"
        assert ev[0].detail == {"i": 0, "j": 1}
        # distance 4 - 3.2 s reaches 1 at s = 15/16
        assert ev[0].time == pytest.approx(15 / 16, abs=1e-9)

    def test_dipole_never_reaches_wall(self):
        m = HalfPlaneModel(VortexSystem([1.0, -1.0], [[0.0, 0.75], [1.0, 0.25]], Domain.HALFPLANE))
        tr = integrate(m, settings=IntegratorSettings(t_end=100.0, boundary_distance=1e-3))
        assert tr.events_of("BoundaryApproach") == []

    def test_boundary_event_recorded(self):
        # reversed circulations send the pair down toward the wall first
        m = HalfPlaneModel(VortexSystem([-1.0, 1.0], [[0.0, 0.75], [1.0, 0.25]], Domain.HALFPLANE))
        tr = integrate(m, settings=IntegratorSettings(t_end=30.0, boundary_distance=0.24))
        ev = tr.events_of("BoundaryApproach")
        assert ev and all(isinstance(e, Event) for e in ev)
        assert tr.status == "completed"


class TestMonitor:
    def test_plane(self):
        tr = integrate(pair(1.5), settings=IntegratorSettings(t_end=10.0))
        r = monitor_invariants(tr.model, tr)
        assert set(r.max_rel_drift) == {"H", "Q", "P", "I"}
        assert r.passed and r.failures() == []

    def test_rings(self):
        s = RingSystem.from_rings([(0.0, 1.0, 1.0, 0.05), (0.3, 1.0, 1.0, 0.05)])
        tr = integrate(RingModel(s), settings=IntegratorSettings(t_end=5.0))
        assert set(monitor_invariants(tr.model, tr).max_rel_drift) == {"H", "M"}

    def test_stationary(self):
        m = PlaneModel(VortexSystem([1.0], [[0.2, 0.3]], Domain.PLANE))
        r = monitor_invariants(m, integrate(m))
        assert all(v == 0.0 for v in r.max_abs_drift.values())

    def test_failure_reported(self):
        tr = integrate(pair(1.5), settings=IntegratorSettings(t_end=10.0, rel_tol=1e-3, abs_tol=1e-5))
        r = monitor_invariants(tr.model, tr, IntegratorSettings(drift_tol=1e-15))
        assert not r.passed and r.failures()
        assert r.to_dict()["passed"] is False
