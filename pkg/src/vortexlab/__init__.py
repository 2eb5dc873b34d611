"""Point vortices in the plane, half-plane and quadrant, coaxial vortex rings
and sphere-product membranes, with conserved-quantity and orbit checks."""

from .core import Domain, Event, Trajectory, VortexSystem, collapse_condition, plane_invariants, validate_system
from .diagnostics import LeapfrogClass, leapfrog_classify, poincare_section, separation_series
from .errors import *  # noqa: F401,F403
from .halfplane import (
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
from .integrate import IntegratorSettings, StepResult, detect_events, integrate, monitor_invariants
from .kernels import BACKEND
from .membranes import (
    MembraneModel,
    SphereProductState,
    collapse_time,
    membrane_closed_form,
    membrane_rhs,
    membrane_volume_invariant,
)
from .planar import PlaneModel, hamiltonian_plane, hamiltonian_plane_gradient, velocity_plane
from .quadrant import QuadrantModel, hamiltonian_quadrant, trajectory_constant, velocity_quadrant
from .rings import (
    RingModel,
    RingSystem,
    green_ring,
    green_ring_fast,
    green_ring_grad,
    green_ring_grad_fast,
    hamiltonian_rings,
    hamiltonian_rings_gradient,
    ring_moment,
    ring_self_energy,
    ring_self_speed,
    velocity_rings,
)

__version__ = "0.1.0"
