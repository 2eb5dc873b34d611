import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vortexlab.core import (
    COINCIDENCE_TOL,
    Domain,
    Event,
    Trajectory,
    VortexSystem,
    collapse_condition,
    plane_invariants,
    validate_system,
)
from vortexlab.errors import CoincidentVortices, DomainViolation, EmptySystem, InvalidState

strengths = st.lists(st.floats(-5, 5).filter(lambda g: abs(g) > 1e-3), min_size=2, max_size=6)


class TestValidateSystem:
    def test_single_plane_vortex_ok(self):
        assert validate_system(VortexSystem([1.0], [[0.0, 0.0]], Domain.PLANE)) is None

    def test_halfplane_on_wall(self):
        with pytest.raises(DomainViolation):
            validate_system(VortexSystem([1.0], [[0.0, 0.0]], Domain.HALFPLANE))

    def test_coincident(self):
        with pytest.raises(CoincidentVortices):
            validate_system(VortexSystem([1.0, 1.0], [[0, 0], [0, 0]]))

    def test_below_coincidence_tolerance(self):
        with pytest.raises(CoincidentVortices):
            validate_system(VortexSystem([1.0, 1.0], [[0, 0], [0.5 * COINCIDENCE_TOL, 0]]))

    def test_empty(self):
        with pytest.raises(EmptySystem):
            validate_system(VortexSystem([], np.zeros((0, 2))))

    def test_zero_strength_needs_tracer_flag(self):
        with pytest.raises(InvalidState, match="vortex 1"):
            validate_system(VortexSystem([1.0, 0.0], [[0, 0], [1, 0]]))
        validate_system(VortexSystem([1.0, 0.0], [[0, 0], [1, 0]], tracers=[False, True]))

    def test_tracer_must_have_zero_strength(self):
        with pytest.raises(InvalidState):
            validate_system(VortexSystem([1.0, 1.0], [[0, 0], [1, 0]], tracers=[False, True]))

    def test_quadrant_rules(self):
        validate_system(VortexSystem([1.0], [[1.0, 2.0]], Domain.QUADRANT))
        with pytest.raises(DomainViolation):
            validate_system(VortexSystem([1.0], [[-1.0, 2.0]], Domain.QUADRANT))
        with pytest.raises(DomainViolation):
            validate_system(VortexSystem([1.0, 1.0], [[1, 1], [2, 2]], Domain.QUADRANT))

    def test_halfplane_error_names_index(self):
        with pytest.raises(DomainViolation, match="vortex 2"):
            validate_system(VortexSystem([1, 1, 1], [[0, 1], [1, 1], [2, -1]], Domain.HALFPLANE))

    def test_shape_mismatch(self):
        with pytest.raises(InvalidState):
            VortexSystem([1.0, 2.0], [[0.0, 0.0]])

    def test_idempotent(self):
        s = VortexSystem([1.0, -2.0], [[0, 0], [1, 1]])
        before = s.positions.copy()
        validate_system(s)
        validate_system(s)
        assert np.array_equal(s.positions, before)

    def test_arrays_are_read_only(self):
        s = VortexSystem([1.0], [[0.0, 0.0]])
        with pytest.raises(ValueError):
            s.positions[0, 0] = 1.0


class TestPlaneInvariants:
    def test_symmetric_pair(self):
        Q, P, I = plane_invariants(VortexSystem([1, 1], [[1, 0], [-1, 0]]))
        assert (Q, P, I) == (0.0, 0.0, 2.0)

    def test_single(self):
        assert plane_invariants(VortexSystem([2.0], [[3.0, 4.0]])) == (6.0, 8.0, 50.0)

    def test_opposite_strengths_cancel(self):
        eps = 1e-9
        Q, P, _ = plane_invariants(VortexSystem([1, -1], [[1, 0], [1, eps]]))
        assert Q == 0.0
        assert P == pytest.approx(-eps)

    @given(strengths, st.integers(0, 2**32 - 1))
    def test_linear_in_strengths(self, gam, seed):
        pos = np.random.default_rng(seed).uniform(-3, 3, (len(gam), 2))
        a = plane_invariants(VortexSystem(gam, pos))
        b = plane_invariants(VortexSystem(2 * np.asarray(gam), pos))
        assert b == tuple(2 * v for v in a)


class TestCollapseCondition:
    def test_examples(self):
        assert collapse_condition([1, 1, 1]) is False
        assert collapse_condition([1, 1, -0.5]) is True
        assert collapse_condition([1, -1]) is False

    @given(strengths, st.randoms())
    def test_permutation_invariant(self, gam, rnd):
        perm = list(gam)
        rnd.shuffle(perm)
        assert collapse_condition(gam) == collapse_condition(perm)


class TestTrajectory:
    def test_times_strictly_increasing(self):
        with pytest.raises(ValueError):
            Trajectory([0.0, 0.0], [[1.0], [1.0]], {})

    def test_invariant_length(self):
        with pytest.raises(ValueError):
            Trajectory([0.0, 1.0], [[1.0], [1.0]], {"H": [1.0]})

    def test_events_of(self):
        tr = Trajectory([0.0], [[1.0]], {}, events=[Event(0.5, "A"), Event(0.7, "B", {"i": 1})])
        assert [e.time for e in tr.events_of("B")] == [0.7]
        assert tr.events[1].to_dict() == {"time": 0.7, "kind": "B", "i": 1}

    def test_immutable(self):
        tr = Trajectory([0.0, 1.0], [[1.0], [2.0]], {"H": [0.0, 0.0]})
        with pytest.raises(ValueError):
            tr.times[0] = 3.0
        assert math.isclose(tr.states[1, 0], 2.0)
