"""Numerical laboratory for geometric phases of parameterized quantum
Hamiltonians: Berry phases, Wilczek-Zee holonomies, and Aharonov-Bohm
phase shifts, cross-checked against closed forms and full time evolution."""

from .adiabatic import (
    DriveSchedule,
    EvolutionResult,
    dynamical_phase,
    evolve,
    extract_geometric_phase,
    transport_report,
)
from .ab_effect import (
    PlanarContour,
    PulsePair,
    SolenoidProfile,
    circle_contour,
    electric_ab_phase,
    fringe_intensity,
    magnetic_ab_phase,
    magnetic_flux_surface,
    solenoid_vector_potential,
    winding_number,
)
from .berry import (
    BerryPhaseResult,
    berry_phase_line,
    berry_phase_surface,
    connection_fd,
    curvature_fd,
)
from .linalg import EigenDecomposition, expi_hermitian, hermitian_eigen, inner, unitarize
from .models import (
    BandSelector,
    EigenFrame,
    HermitianModel,
    degenerate_example_model,
    eigenframe,
    eval_hamiltonian,
    frame_section,
    spin_half_frame,
    spin_half_model,
)
from .paths import (
    ParameterPath,
    SphericalPoint,
    circle_loop,
    from_spherical,
    refine,
    solid_angle,
    to_spherical,
)
from .wilczek_zee import (
    WilczekZeeHolonomy,
    gauge_transform,
    wz_connection_fd,
    wz_holonomy_link,
    wz_holonomy_ode,
)

__version__ = "0.1.0"
