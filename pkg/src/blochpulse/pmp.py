"""Numerical verification of the stationarity conditions along a program.

Three independent signals certify a synthesized pulse:

* the stationarity function H = -u^2/2 + lambda_theta * thetadot
  + lambda_a * adot must vanish along the whole transfer (free final time);
* the angle costate must satisfy d(lambda_theta)/dt
  = lambda_theta cos(2 theta) + lambda_a sin(2 theta), checked by central
  finite differences along the integrated trajectory;
* strictly inside a saturated arc the costate must exceed the bound, which
  is what makes the clipped control the pointwise maximizer.

The checks accept any object exposing ``control(theta)``,
``costate(theta)``, ``lambda_a`` and ``theta_domain`` - in particular a
``PulseProgram``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .bloch import StepControl, Trajectory, control_hamiltonian

__all__ = [
    "CostateSample",
    "costate_along",
    "check_hamiltonian",
    "check_adjoint",
    "saturation_excess",
    "VerificationReport",
    "verify_program",
]


@dataclass(frozen=True)
class CostateSample:
    """Costates and stationarity value at one angle."""

    theta: float
    lambda_theta: float
    lambda_a: float
    hamiltonian: float


def costate_along(program, thetas: Sequence[float]) -> list[CostateSample]:
    """Evaluate the costates and H at the given angles.

    The angle costate is continuous across switching angles (both closed
    forms give the bound there) while the log-radius costate is one
    constant for the whole transfer.
    """
    lam_a = program.lambda_a
    samples = []
    for theta in thetas:
        lam = program.costate(theta)
        samples.append(
            CostateSample(
                theta=theta,
                lambda_theta=lam,
                lambda_a=lam_a,
                hamiltonian=control_hamiltonian(
                    program.control(theta), theta, lam, lam_a
                ),
            )
        )
    return samples


@dataclass(frozen=True)
class HamiltonianCheck:
    max_abs_h: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_abs_h < self.tol


def check_hamiltonian(program, tol: float = 1e-8, grid_points: int = 10_000) -> HamiltonianCheck:
    """Largest |H| over a uniform angle grid spanning the program domain."""
    lo, hi = program.theta_domain
    worst = 0.0
    for theta in np.linspace(lo, hi, grid_points):
        theta = float(theta)
        value = abs(
            control_hamiltonian(
                program.control(theta), theta, program.costate(theta), program.lambda_a
            )
        )
        if value > worst:
            worst = value
    return HamiltonianCheck(max_abs_h=worst, tol=tol)


@dataclass(frozen=True)
class AdjointCheck:
    max_residual: float
    tol: float
    step: float

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tol


def check_adjoint(
    program,
    tol: float = 1e-4,
    step: float = 1e-4,
    exclusion_steps: int = 10,
    trajectory: Optional[Trajectory] = None,
) -> AdjointCheck:
    """Finite-difference residual of the costate rate equation.

    Simulates the program (or reuses a supplied trajectory at the same
    step), differentiates lambda_theta(t) centrally and compares with
    lambda_theta cos(2 theta) + lambda_a sin(2 theta).  Samples within
    ``exclusion_steps`` grid steps of a switching angle are skipped, since
    the costate's curvature jumps with the control there; the shortened
    final step is skipped for the same reason.
    """
    if trajectory is None:
        trajectory = program.simulate(StepControl(h=step))
    else:
        step = float(trajectory.t[1] - trajectory.t[0])
    theta = trajectory.theta
    lam = np.array([program.costate(float(t)) for t in theta])
    lam_a = program.lambda_a

    fd = (lam[2:] - lam[:-2]) / (2.0 * step)
    mid_theta = theta[1:-1]
    rhs = lam[1:-1] * np.cos(2.0 * mid_theta) + lam_a * np.sin(2.0 * mid_theta)
    residual = np.abs(fd - rhs) / np.maximum(1.0, np.abs(rhs))

    keep = np.ones(len(residual), dtype=bool)
    keep[-exclusion_steps:] = False  # event-shortened last step breaks the stencil
    for switch in _switch_angles(program):
        idx = int(np.searchsorted(theta, switch)) - 1
        lo = max(idx - exclusion_steps, 0)
        hi = min(idx + exclusion_steps, len(residual))
        keep[lo:hi] = False
    if not keep.any():
        raise ValueError("exclusion windows removed every sample")
    return AdjointCheck(max_residual=float(residual[keep].max()), tol=tol, step=step)


def _switch_angles(program) -> list[float]:
    angles = []
    for name in ("theta1", "theta2"):
        value = getattr(program, name, None)
        if value is not None:
            angles.append(value)
    return angles


def saturation_excess(program, grid_points: int = 1_000) -> Optional[float]:
    """Smallest costate margin over the bound strictly inside saturation.

    Returns None when the program has no saturated arc; a positive value
    certifies that clipping to the bound is the pointwise maximizer there.
    """
    sat = program._saturated_interval() if hasattr(program, "_saturated_interval") else None
    if sat is None:
        return None
    lo, hi = sat
    inset = (hi - lo) * 1e-6
    margin = math.inf
    for theta in np.linspace(lo + inset, hi - inset, grid_points):
        margin = min(margin, program.costate(float(theta)) - program.m)
    return margin


@dataclass(frozen=True)
class VerificationReport:
    """Verification summary; ``oracle`` stays None unless a search was run."""

    max_abs_h: float
    adjoint_residual: float
    lambda_excess_ok: bool
    h_tol: float
    adjoint_tol: float
    oracle: Optional[object] = None

    @property
    def passed(self) -> bool:
        return (
            self.max_abs_h < self.h_tol
            and self.adjoint_residual < self.adjoint_tol
            and self.lambda_excess_ok
        )

    def to_json(self) -> str:
        if self.oracle is None:
            oracle = "null"
        else:
            oracle = '{"best_energy": %s, "endpoint_error": %s}' % (
                format(self.oracle.best_energy, ".12g"),
                format(self.oracle.endpoint_error, ".12g"),
            )
        return (
            '{"max_abs_H": %s, "adjoint_residual": %s, "lambda_excess_ok": %s, '
            '"oracle": %s}'
            % (
                format(self.max_abs_h, ".12g"),
                format(self.adjoint_residual, ".12g"),
                "true" if self.lambda_excess_ok else "false",
                oracle,
            )
        )


def verify_program(
    program,
    h_tol: float = 1e-8,
    adjoint_tol: float = 1e-4,
    step: float = 1e-4,
    trajectory: Optional[Trajectory] = None,
    oracle: Optional[object] = None,
) -> VerificationReport:
    """Run all stationarity checks and collect them into one report."""
    ham = check_hamiltonian(program, tol=h_tol)
    adj = check_adjoint(program, tol=adjoint_tol, step=step, trajectory=trajectory)
    excess = saturation_excess(program)
    return VerificationReport(
        max_abs_h=ham.max_abs_h,
        adjoint_residual=adj.max_residual,
        lambda_excess_ok=excess is None or excess > 0.0,
        h_tol=h_tol,
        adjoint_tol=adjoint_tol,
        oracle=oracle,
    )
