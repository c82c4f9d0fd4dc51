"""Minimum-energy pulse synthesis for the dissipative Bloch equations.

Designs quarter-turn (pi/2) and half-turn (pi) pulses of minimum energy
for a spin system dominated by transverse relaxation, with the control
amplitude clipped to a bound.  Provides closed-form synthesis, switching
geometry, closed-loop simulation, stationarity verification and an
independent transcription search.
"""

from .bloch import (
    THETA_START,
    CartesianState,
    PolarState,
    PulseTarget,
    StepControl,
    Trajectory,
    cartesian_from_polar,
    control_hamiltonian,
    energy_theta_quadrature,
    full_rhs,
    integrate_feedback,
    integrate_full,
    polar_from_cartesian,
    reduced_rhs,
    write_trajectory_csv,
)
from .bounded import (
    Landmarks,
    PulseProgram,
    Regime,
    Segment,
    SwitchingGeometry,
    classify,
    first_switch_radius,
    kappa_from_switch,
    landmarks,
    partner_angle,
    reachable_boundary,
    required_first_switch_radius,
    required_second_switch_radius,
    sample_geometry,
    saturated_arc_radius,
    second_switch_radius,
    solve_one_switch,
    solve_two_switch,
    switching_angles,
    synthesize,
)
from .errors import (
    AngleOutOfRange,
    BlochControlError,
    BoundTooSmall,
    DegenerateKappa,
    DidNotConverge,
    NoBracket,
    NonpositiveThetaDot,
    NoRealSwitch,
    StallDetected,
    StepTooLarge,
    TargetOutOfRange,
    Unreachable,
    ZeroVector,
)
from .oracle import OracleResult, oracle_transcription
from .pmp import (
    CostateSample,
    VerificationReport,
    check_adjoint,
    check_hamiltonian,
    costate_along,
    saturation_excess,
    verify_program,
)
from .unbounded import (
    UnboundedSolution,
    closed_energy,
    feedback_u,
    kappa_for_target,
    thetadot,
    trajectory_r,
)

__version__ = "0.1.0"
