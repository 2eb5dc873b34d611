import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import central_diff
from vortexlab.core import Domain, VortexSystem
from vortexlab.errors import (
    DomainViolation,
    NonPositiveBase,
    PassiveTracerRequiresSpecialPath,
    SingularDenominator,
    SingularPoint,
    WrongArity,
    ZeroNu,
)
from vortexlab.halfplane import (
    DEFAULT_OMEGA0,
    HalfPlaneModel,
    ReducedDipoleOrbitParams,
    ReducedGenericOrbitParams,
    Restricted3Model,
    Restricted3State,
    conserved_height,
    hamiltonian_halfplane,
    hamiltonian_halfplane_gradient,
    orbit_residual_dipole,
    orbit_residual_generic,
    reachability_x_r_zero,
    restricted3_gradient,
    restricted3_h0,
    restricted3_hamiltonian,
    restricted3_velocity,
    single_vortex_halfplane_solution,
    tracer_velocity_halfplane,
    velocity_halfplane,
)
from vortexlab.integrate import IntegratorSettings, integrate

TWO_PI = 2 * math.pi


def hp(gam, pos, tracers=None):
    return VortexSystem(gam, pos, Domain.HALFPLANE, tracers)


def random_hp(seed, n=3):
    rng = np.random.default_rng(seed)
    while True:
        pos = np.column_stack([rng.uniform(-2, 2, n), rng.uniform(0.3, 3, n)])
        d = np.hypot(*(pos[:, None] - pos[None]).transpose(2, 0, 1)) + np.eye(n) * 9
        if d.min() > 0.3:
            return hp(rng.choice([-1, 1], n) * rng.uniform(0.3, 2, n), pos)


class TestHamiltonian:
    def test_single_vortex_examples(self):
        assert hamiltonian_halfplane(hp([1.0], [[0.3, 0.5]])) == 0.0
        assert hamiltonian_halfplane(hp([1.0], [[0.0, math.e / 2]])) == pytest.approx(1 / TWO_PI)

    @pytest.mark.parametrize("pos", [[[0.2, 1.0], [1.1, 0.4]], [[-3, 2.5], [0.5, 0.1]]])
    def test_dipole_form(self, pos):
        s = hp([1, -1], pos)
        (x1, y1), (x2, y2) = pos
        xr, yr, y0 = x1 - x2, y1 - y2, (y1 + y2) / 2
        ref = math.log((4 * y0**2 - yr**2) * (xr**2 + yr**2) / (xr**2 + 4 * y0**2)) / TWO_PI
        assert hamiltonian_halfplane(s) == pytest.approx(ref, rel=1e-13, abs=1e-14)

    def test_green_normalization_halves_everything(self):
        s = random_hp(3)
        assert hamiltonian_halfplane(s, "green") == pytest.approx(0.5 * hamiltonian_halfplane(s))
        assert np.allclose(velocity_halfplane(s, "green"), 0.5 * velocity_halfplane(s))

    def test_unknown_normalization(self):
        with pytest.raises(ValueError):
            hamiltonian_halfplane(hp([1.0], [[0, 1]]), "other")

    def test_wrong_domain(self):
        with pytest.raises(DomainViolation):
            hamiltonian_halfplane(VortexSystem([1.0], [[0, 1]], Domain.PLANE))


class TestVelocity:
    @pytest.mark.parametrize("y", [0.25, 1.0, 7.0])
    def test_single_vortex(self, y, backend):
        v = velocity_halfplane(hp([1.0], [[0.4, y]]))
        assert v[0, 0] == pytest.approx(1 / (TWO_PI * y))
        assert v[0, 1] == 0.0
        assert velocity_halfplane(hp([1.0], [[0.4, y]]), "green")[0, 0] == pytest.approx(1 / (4 * math.pi * y))

    @pytest.mark.parametrize("seed", range(5))
    def test_mirror_symmetry(self, seed, backend):
        # H is even in each x_i, so a reflection keeps xdot and flips ydot;
        # reversing the circulations as well gives (-xdot, ydot)
        s = random_hp(seed)
        v = velocity_halfplane(s)
        w = velocity_halfplane(hp(s.strengths, s.positions * [-1, 1]))
        assert np.allclose(w, v * [1, -1], rtol=1e-13, atol=1e-15)
        w = velocity_halfplane(hp(-s.strengths, s.positions * [-1, 1]))
        assert np.allclose(w, v * [-1, 1], rtol=1e-13, atol=1e-15)

    @pytest.mark.parametrize("seed", range(5))
    @pytest.mark.parametrize("norm", ["verbatim", "green"])
    def test_gradient_finite_differences(self, seed, norm):
        s = random_hp(seed)
        fd = central_diff(lambda p: hamiltonian_halfplane(hp(s.strengths, p.reshape(-1, 2)), norm),
                          s.positions.reshape(-1), 1e-6)
        g = hamiltonian_halfplane_gradient(s, norm).reshape(-1)
        assert np.max(np.abs(g - fd)) / np.max(np.abs(g)) < 1e-6

    @pytest.mark.parametrize("seed", range(5))
    def test_symplectic_relations(self, seed, backend):
        s = random_hp(seed)
        g, v = hamiltonian_halfplane_gradient(s), velocity_halfplane(s)
        assert np.allclose(s.strengths * v[:, 0], g[:, 1], rtol=1e-12, atol=1e-14)
        assert np.allclose(s.strengths * v[:, 1], -g[:, 0], rtol=1e-12, atol=1e-14)

    def test_zero_strength_needs_tracer_path(self):
        s = hp([1.0, 0.0], [[0, 1], [1, 1]], [False, True])
        with pytest.raises(PassiveTracerRequiresSpecialPath, match="vortex 1"):
            velocity_halfplane(s)

    def test_tracer_velocity_is_zero_strength_limit(self, backend):
        s = hp([1.0, -0.5], [[0, 1], [1, 2]])
        pt = np.array([[0.3, 0.7]])
        eps = 1e-7
        with_small = velocity_halfplane(hp([1.0, -0.5, eps], np.vstack([s.positions, pt])))[2]
        assert np.allclose(tracer_velocity_halfplane(s, pt)[0], with_small, atol=1e-6)

    def test_tracer_points_in_domain(self):
        with pytest.raises(DomainViolation):
            tracer_velocity_halfplane(hp([1.0], [[0, 1]]), [[0.0, -1.0]])


class TestConservedHeight:
    def test_examples(self):
        assert conserved_height(hp([1, 1], [[0, 1], [1, 3]])) == 2.0
        assert conserved_height(hp([1, -1], [[0, 2], [1, 0.5]])) == 1.5
        assert conserved_height(hp([2, 1], [[0, 1], [1, 4]])) == pytest.approx(2.0)

    def test_arity(self):
        with pytest.raises(WrongArity):
            conserved_height(hp([1.0], [[0, 1]]))

    @pytest.mark.parametrize("gam", [(1.0, 2.0), (1.0, -1.0)])
    def test_drift_along_trajectory(self, gam):
        s = hp(gam, [[0.0, 1.0], [0.6, 0.5]])
        tr = integrate(HalfPlaneModel(s), settings=IntegratorSettings(t_end=100.0))
        h = tr.invariants["height"]
        assert np.max(np.abs(h - h[0])) < 1e-10


class TestSingleVortexSolution:
    def test_examples(self):
        assert single_vortex_halfplane_solution(1.0, 0.3, 2.0, 0.0) == (0.3, 2.0)
        x, y = single_vortex_halfplane_solution(1.0, 0.0, 1.0, TWO_PI)
        assert (x, y) == (pytest.approx(1.0), 1.0)

    def test_matches_integration(self):
        tr = integrate(HalfPlaneModel(hp([1.3], [[0.2, 0.7]])), settings=IntegratorSettings(t_end=5.0))
        x, y = single_vortex_halfplane_solution(1.3, 0.2, 0.7, 5.0)
        assert tr.states[-1] == pytest.approx([x, y], rel=1e-10)

    def test_domain(self):
        with pytest.raises(DomainViolation):
            single_vortex_halfplane_solution(1.0, 0.0, 0.0, 1.0)


class TestGenericOrbit:
    def test_zero_at_initial_state(self):
        s = hp([1.0, 2.0], [[0.0, 1.0], [0.7, 0.4]])
        p = ReducedGenericOrbitParams.from_state(s)
        assert orbit_residual_generic(-0.7, 0.6, p) == pytest.approx(0.0, abs=1e-13)

    def test_energy_relation(self):
        s = hp([1.0, 2.0], [[0.0, 1.0], [0.7, 0.4]])
        p = ReducedGenericOrbitParams.from_state(s)
        assert p.E == pytest.approx(hamiltonian_halfplane(s) - 5 * math.log(2) / TWO_PI, rel=1e-12)

    @given(st.floats(-3, 3), st.floats(-1.9, 1.9), st.floats(-1, 1))
    @settings(max_examples=50)
    def test_equal_strength_symmetry(self, xr, yr, E):
        p = ReducedGenericOrbitParams(1.0, E, (1.0, 1.0))
        if math.hypot(xr, yr) < 1e-6:
            return
        assert orbit_residual_generic(xr, yr, p) == pytest.approx(orbit_residual_generic(xr, -yr, p),
                                                                   rel=1e-12, abs=1e-12)

    def test_errors(self):
        p = ReducedGenericOrbitParams(1.0, 0.0, (1.0, 1.0))
        with pytest.raises(NonPositiveBase):
            orbit_residual_generic(0.5, 2.5, p)
        with pytest.raises(SingularDenominator):
            orbit_residual_generic(0.0, 0.0, p)
        with pytest.raises(ValueError):
            ReducedGenericOrbitParams(1.0, 0.0, (1.0, -1.0))


class TestDipoleOrbit:
    def test_example(self):
        p = ReducedDipoleOrbitParams.from_C(1.0, 2.0)
        assert p.C == pytest.approx(2.0)
        assert orbit_residual_dipole(0.0, 1 / math.sqrt(2), p) == pytest.approx(0.0, abs=1e-14)

    def test_from_state_is_hamiltonian(self):
        s = hp([1.0, -1.0], [[0.0, 1.2], [0.5, 0.4]])
        p = ReducedDipoleOrbitParams.from_state(s)
        assert p.nu == pytest.approx(0.8)
        assert orbit_residual_dipole(-0.5, 0.8, p) == pytest.approx(0.0, abs=1e-12)
        with pytest.raises(ValueError):
            ReducedDipoleOrbitParams.from_state(hp([1.0, 1.0], [[0, 1], [1, 1]]))

    def test_asymptotes(self):
        nu, C = 0.5, 2.0
        p = ReducedDipoleOrbitParams.from_C(nu, C)
        # large x_r: y0 -> sqrt(1/C + nu^2)/2
        y_inf = 0.5 * math.sqrt(1 / C + nu * nu)
        xr = 1e4
        y0 = 0.5 * math.sqrt(nu * nu + 1 / (C - 1 / (nu * nu + xr * xr)))
        assert orbit_residual_dipole(xr, y0, p) == pytest.approx(0.0, abs=1e-12)
        assert y0 == pytest.approx(y_inf, rel=1e-7)
        # C <= 1/nu^2, large y0: x_r^2 + nu^2 -> 1/C
        p = ReducedDipoleOrbitParams.from_C(1.0, 0.5)
        y0 = 1e4
        xr2 = 1 / (0.5 - 1 / (4 * y0 * y0 - 1)) - 1
        assert orbit_residual_dipole(math.sqrt(xr2), y0, p) == pytest.approx(0.0, abs=1e-12)
        assert xr2 + 1 == pytest.approx(2.0, rel=1e-7)

    def test_wall_singularity(self):
        with pytest.raises(SingularDenominator):
            orbit_residual_dipole(0.3, 0.5, ReducedDipoleOrbitParams.from_C(1.0, 2.0))

    def test_reachability(self):
        r = reachability_x_r_zero(ReducedDipoleOrbitParams.from_C(1.0, 2.0))
        assert r.reachable and r.four_y0_sq == pytest.approx(2.0)
        assert not reachability_x_r_zero(ReducedDipoleOrbitParams.from_C(1.0, 1.0)).reachable
        assert reachability_x_r_zero(ReducedDipoleOrbitParams.from_C(2.0, 10.0)).reachable
        with pytest.raises(ZeroNu):
            reachability_x_r_zero(ReducedDipoleOrbitParams.from_C(0.0, 1.0))

    def test_residual_along_trajectory(self):
        s = hp([1.0, -1.0], [[0.0, 0.75], [1.0, 0.25]])
        p = ReducedDipoleOrbitParams.from_state(s)
        tr = integrate(HalfPlaneModel(s), settings=IntegratorSettings(t_end=30.0))
        x1, y1, x2, y2 = tr.states.T
        res = [orbit_residual_dipole(a - c, (b + d) / 2, p) for a, b, c, d in zip(x1, y1, x2, y2)]
        assert max(abs(r) for r in res) / p.C < 1e-6
        assert np.max(np.abs((y1 - y2) - 0.5)) < 1e-10


class TestNonCollision:
    @pytest.mark.parametrize("gam", [(1.0, 2.0), (1.0, 1.0), (1.0, -1.0)])
    def test_heights_and_separation_stay_positive(self, gam):
        s = hp(gam, [[0.0, 1.0], [0.8, 0.5]])
        tr = integrate(HalfPlaneModel(s), settings=IntegratorSettings(t_end=50.0))
        p = tr.states.reshape(len(tr), 2, 2)
        assert p[:, :, 1].min() > 1e-6
        assert np.hypot(*(p[:, 0] - p[:, 1]).T).min() > 1e-6


class TestRestricted3:
    def test_examples(self):
        assert restricted3_h0(0.0, 0.0) == 0.0
        st0 = Restricted3State(0.0, 0.0)
        assert restricted3_velocity(st0, 0.0) == (pytest.approx(0.0, abs=1e-17), pytest.approx(0.0, abs=1e-17))
        assert DEFAULT_OMEGA0 == pytest.approx(1 / (4 * math.pi))

    @given(st.floats(-3, 3), st.floats(-3, 3))
    def test_h0_even(self, x, y):
        if x == 0 and abs(y) == 1:
            return
        h = restricted3_h0(x, y)
        assert restricted3_h0(-x, y) == h
        assert restricted3_h0(x, -y) == pytest.approx(h, rel=1e-14, abs=1e-14)

    def test_perturbation_at_t0(self):
        s = Restricted3State(0.4, 0.3, epsilon=0.02)
        assert restricted3_hamiltonian(s, 0.0) - restricted3_h0(0.4, 0.3) == pytest.approx(
            -0.02 * 1.25 / math.pi * 0.3)

    def test_time_periodic(self):
        s = Restricted3State(0.4, 0.3, epsilon=0.05)
        T = TWO_PI / s.omega0
        assert restricted3_velocity(s, 0.7 + T) == pytest.approx(restricted3_velocity(s, 0.7), rel=1e-10)

    @pytest.mark.parametrize("seed", range(5))
    def test_gradient_finite_differences(self, seed, backend):
        rng = np.random.default_rng(seed)
        x, y, t = rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0, 50)
        s = Restricted3State(x, y, epsilon=0.03)
        fd = central_diff(lambda p: restricted3_hamiltonian(s.moved(*p), t), np.array([x, y]), 1e-6)
        g = np.array(restricted3_gradient(s, t))
        assert np.max(np.abs(g - fd)) / np.max(np.abs(g)) < 1e-6

    def test_singular_points(self):
        with pytest.raises(SingularPoint):
            Restricted3State(0.0, 1.0)
        with pytest.raises(SingularPoint):
            restricted3_h0(0.0, -1.0)
        with pytest.raises(ValueError):
            Restricted3State(0.3, 0.0, omega0=0.0)
        with pytest.raises(ValueError):
            Restricted3State(0.3, 0.0, epsilon=-1.0)

    def test_h0_conserved_unperturbed(self):
        m = Restricted3Model(Restricted3State(0.3, 0.0))
        tr = integrate(m, settings=IntegratorSettings(t_end=100.0))
        h = tr.invariants["H0"]
        assert tr.status == "completed"
        assert np.max(np.abs(h - h[0])) < 1e-8
