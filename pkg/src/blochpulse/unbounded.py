"""Closed-form minimum-energy synthesis with no amplitude limit.

The stationarity conditions give a one-parameter family of feedback laws

    u(theta) = sin(theta) * (cos(theta) + sqrt(cos^2(theta) + kappa^2))

indexed by the non-negative constant kappa (the log-radius costate equals
kappa^2/2).  Along the closed loop the angle rate and the traced radius
have closed forms, so the single unknown kappa follows directly from the
requested final point, as does the pulse energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bloch import PulseTarget
from .errors import TargetOutOfRange

__all__ = [
    "kappa_for_target",
    "feedback_u",
    "thetadot",
    "trajectory_r",
    "closed_energy",
    "UnboundedSolution",
]


def kappa_for_target(target: PulseTarget) -> float:
    """Costate constant reaching (r, pi/2) or (r, pi) without saturation.

    Quarter turn: kappa = 2 r / (1 - r^2).  Half turn: 2 sqrt(r) / (1 - r).
    """
    r = target.r
    if target.is_inversion:
        return 2.0 * math.sqrt(r) / (1.0 - r)
    return 2.0 * r / (1.0 - r * r)


def feedback_u(theta: float, kappa: float) -> float:
    """Smooth-arc control value; vanishes at both poles."""
    _check_kappa(kappa)
    c = math.cos(theta)
    return math.sin(theta) * (c + math.sqrt(c * c + kappa * kappa))


def thetadot(theta: float, kappa: float) -> float:
    """Closed-loop angle rate sin(theta) sqrt(cos^2(theta) + kappa^2)."""
    _check_kappa(kappa)
    c = math.cos(theta)
    return math.sin(theta) * math.sqrt(c * c + kappa * kappa)


def trajectory_r(theta: float, kappa: float) -> float:
    """Radius traced from the unit pole, as a function of the angle.

    r(theta) = (cos(theta) + sqrt(cos^2(theta) + kappa^2)) / (1 + sqrt(1 + kappa^2));
    equals 1 at theta = 0 and decreases strictly for kappa > 0.
    """
    _check_kappa(kappa)
    c = math.cos(theta)
    return (c + math.sqrt(c * c + kappa * kappa)) / (1.0 + math.sqrt(1.0 + kappa * kappa))


def closed_energy(target: PulseTarget) -> float:
    """Minimum pulse energy: 1/(1-r^2) for pi/2 targets, (1+r)/(1-r) for pi."""
    r = target.r
    if not 0.0 < r < 1.0:
        raise TargetOutOfRange(f"final radius must lie in (0, 1), got {r}")
    if target.is_inversion:
        return (1.0 + r) / (1.0 - r)
    return 1.0 / (1.0 - r * r)


def _check_kappa(kappa: float) -> None:
    if kappa < 0.0 or not math.isfinite(kappa):
        raise ValueError(f"kappa must be finite and non-negative, got {kappa}")


@dataclass(frozen=True)
class UnboundedSolution:
    """Complete unlimited-amplitude design for one target."""

    kappa: float
    target: PulseTarget
    energy: float

    @property
    def lambda_a(self) -> float:
        """Constant log-radius costate."""
        return 0.5 * self.kappa * self.kappa

    @classmethod
    def for_target(cls, target: PulseTarget) -> "UnboundedSolution":
        return cls(
            kappa=kappa_for_target(target),
            target=target,
            energy=closed_energy(target),
        )
