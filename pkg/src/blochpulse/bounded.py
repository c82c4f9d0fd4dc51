"""Bounded-amplitude synthesis: switching geometry and feedback assembly.

With the control clipped to [0, m] the smooth feedback law saturates
wherever it would exceed m.  Saturation starts and ends on the angles that
solve

    cot^2(theta) - (2/m) cot(theta) + 1 - kappa^2/m^2 = 0,

whose two roots theta1 <= theta2 satisfy cot(theta1) + cot(theta2) = 2/m.
Sweeping kappa traces two switching curves in the (r, theta) plane: the
first (entry) curve lies on the pre-switch smooth arcs, and the second
(exit) curve is its image under the saturated-arc transport.  Synthesis for
a given bound and final point reduces to classifying the final point
against a handful of landmark radii and then locating the switching point
where a required-radius curve crosses the matching switching curve.

Everything here works in the arccot convention with range [0, pi], so
arccot(x) = pi - arccot(-x) for x < 0.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from . import unbounded
from .bloch import (
    THETA_START,
    PolarState,
    PulseTarget,
    StepControl,
    Trajectory,
    energy_theta_quadrature,
    integrate_feedback,
)
from .errors import (
    AngleOutOfRange,
    BoundTooSmall,
    DegenerateKappa,
    NoBracket,
    NoRealSwitch,
    Unreachable,
)

__all__ = [
    "MIN_BOUND",
    "arccot",
    "cot",
    "switching_angles",
    "kappa_from_switch",
    "partner_angle",
    "first_switch_radius",
    "saturated_arc_radius",
    "second_switch_radius",
    "reachable_boundary",
    "max_no_switch_radius",
    "Landmarks",
    "landmarks",
    "Regime",
    "classify",
    "required_second_switch_radius",
    "required_first_switch_radius",
    "Segment",
    "PulseProgram",
    "solve_two_switch",
    "solve_one_switch",
    "synthesize",
    "SwitchingGeometry",
    "sample_geometry",
]

logger = logging.getLogger(__name__)

# Bounds at or below 1/2 stall the rotation at an equilibrium angle before
# the transverse plane, so no quarter- or half-turn transfer is possible.
MIN_BOUND = 0.5

_HALF_PI = math.pi / 2


def arccot(x: float) -> float:
    """Inverse cotangent with range [0, pi]."""
    return math.atan2(1.0, x)


def cot(theta: float) -> float:
    s = math.sin(theta)
    c = math.cos(theta)
    if s == 0.0:
        return math.copysign(math.inf, c)
    return c / s


def _require_bound(m: float) -> None:
    if not m > MIN_BOUND:
        raise BoundTooSmall(f"control bound must exceed {MIN_BOUND}, got {m}")


def switching_angles(kappa: float, m: float) -> tuple[float, float]:
    """Both saturation angles for a given costate constant.

    Solves the saturation quadratic in cot(theta).  For m >= 1 real
    solutions require kappa >= sqrt(m^2 - 1); for 1/2 < m < 1 they exist
    for every kappa >= 0.
    """
    _require_bound(m)
    if kappa < 0.0:
        raise ValueError(f"kappa must be non-negative, got {kappa}")
    disc = kappa * kappa - m * m + 1.0
    if disc < 0.0:
        # tolerate rounding at the double-root boundary
        if disc > -1e-9 * max(1.0, m * m):
            disc = 0.0
        else:
            raise NoRealSwitch(
                f"no real switching angles: kappa={kappa:.9g} is below "
                f"sqrt(m^2-1)={math.sqrt(m * m - 1.0):.9g} for m={m:.9g}"
            )
    root = math.sqrt(disc)
    return arccot((1.0 + root) / m), arccot((1.0 - root) / m)


def kappa_from_switch(theta: float, m: float, which: str = "first") -> float:
    """Costate constant whose switching angle (entry or exit) is ``theta``.

    Entry curve: kappa^2 = (m cot(theta) - 1)^2 + m^2 - 1, valid from the
    pole down to the curve join; exit curve mirrors the sign of the linear
    term and runs from the join to pi.
    """
    _require_bound(m)
    limits = _switch_angle_limits(m)
    if which == "first":
        lo, hi = 0.0, limits[0]
        if not lo < theta <= hi + 1e-9:
            raise AngleOutOfRange(
                f"entry switching angle must lie in (0, {hi:.9g}], got {theta}"
            )
        linear = m * cot(theta) - 1.0
    elif which == "second":
        lo, hi = limits[1], math.pi
        if not lo - 1e-9 <= theta <= hi:
            raise AngleOutOfRange(
                f"exit switching angle must lie in [{lo:.9g}, pi], got {theta}"
            )
        linear = 1.0 - m * cot(theta)
    else:
        raise ValueError(f"which must be 'first' or 'second', got {which!r}")
    value = linear * linear + m * m - 1.0
    if value < 0.0:
        # only possible for m < 1 at the curve ends, from rounding
        value = 0.0
    return math.sqrt(value)


def _switch_angle_limits(m: float) -> tuple[float, float]:
    """(end of entry curve, start of exit curve); equal when m >= 1."""
    if m >= 1.0:
        join = arccot(1.0 / m)
        return join, join
    s = math.sqrt(1.0 - m * m)
    return arccot((1.0 + s) / m), arccot((1.0 - s) / m)


def partner_angle(theta: float, m: float) -> float:
    """The other saturation angle sharing theta's costate constant.

    Involution defined by cot(theta1) + cot(theta2) = 2/m.
    """
    _require_bound(m)
    return arccot(2.0 / m - cot(theta))


def first_switch_radius(theta1: float, m: float) -> float:
    """Radius of the saturation-entry curve at angle ``theta1``.

    Every entry point lies on the smooth arc from the unit pole whose
    costate constant makes ``theta1`` the first saturation angle.  The
    curve starts at (r, theta) = (1, 0), which is returned exactly.
    """
    _require_bound(m)
    if theta1 == 0.0:
        return 1.0
    return unbounded.trajectory_r(theta1, kappa_from_switch(theta1, m, "first"))


def _transport_exponent(theta_a: float, theta_b: float, m: float) -> float:
    w = math.sqrt(4.0 * m * m - 1.0)
    return arccot((2.0 * m * cot(theta_b) - 1.0) / w) - arccot(
        (2.0 * m * cot(theta_a) - 1.0) / w
    )


def saturated_arc_radius(
    r_start: float, theta_start: float, theta_end: float, m: float
) -> float:
    """Transport a radius along a fully saturated arc (u = m).

    Closed-form integral of da/dtheta = -sin^2(theta)/(m - sin cos) between
    the two angles; composes exactly: a->b then b->c equals a->c.
    """
    _require_bound(m)
    if theta_end == theta_start:
        return r_start
    amplitude = math.sqrt(
        (2.0 * m - math.sin(2.0 * theta_start)) / (2.0 * m - math.sin(2.0 * theta_end))
    )
    w = math.sqrt(4.0 * m * m - 1.0)
    return r_start * amplitude * math.exp(-_transport_exponent(theta_start, theta_end, m) / w)


def second_switch_radius(theta2: float, m: float) -> float:
    """Radius of the saturation-exit curve at angle ``theta2``.

    The exit curve is the saturated-arc image of the entry curve: find the
    partner entry angle, its radius, and transport it to ``theta2``.
    """
    theta1 = partner_angle(theta2, m)
    return saturated_arc_radius(first_switch_radius(theta1, m), theta1, theta2, m)


def reachable_boundary(theta3: float, m: float) -> float:
    """Outermost reachable radius at angle ``theta3``: the u = m trajectory
    from the unit pole."""
    return saturated_arc_radius(1.0, 0.0, theta3, m)


def max_no_switch_radius(theta: float, m: float) -> float:
    """Largest radius at ``theta`` reachable by a smooth arc alone.

    For m >= 1 this is the smooth trajectory at the largest costate
    constant that never saturates (kappa = sqrt(m^2 - 1)).  For
    1/2 < m < 1 every transfer saturates; the analogue is the straight
    post-exit chord of the kappa = 0 trajectory, which meets theta = pi/2
    at the origin.
    """
    _require_bound(m)
    if m >= 1.0:
        c = math.cos(theta)
        return (c + math.sqrt(c * c + m * m - 1.0)) / (m + 1.0)
    lm = landmarks(m)
    return lm.r_b2 * math.cos(theta) / math.cos(lm.theta_b2)


@dataclass(frozen=True)
class Landmarks:
    """Named radii and angles organizing the reachable set for one bound.

    ``r_c1``/``r_d1`` are the outermost reachable radii on the theta = pi
    and theta = pi/2 axes; ``r_d2`` is where the saturation-exit curve
    crosses pi/2.  For m >= 1 the two switching curves join at
    (r_b, theta_b) and ``r_c2``/``r_d3`` bound the no-switch region; for
    1/2 < m < 1 the curves end at distinct points B1/B2 (the kappa = 0
    switches) and no transfer avoids saturation.
    """

    m: float
    r_c1: float
    r_d1: float
    r_d2: float
    theta_b: Optional[float] = None
    r_b: Optional[float] = None
    r_c2: Optional[float] = None
    r_d3: Optional[float] = None
    theta_b1: Optional[float] = None
    theta_b2: Optional[float] = None
    r_b1: Optional[float] = None
    r_b2: Optional[float] = None

    def as_dict(self) -> dict:
        ordered = [
            ("m", self.m),
            ("theta_B", self.theta_b),
            ("r_B", self.r_b),
            ("theta_B1", self.theta_b1),
            ("theta_B2", self.theta_b2),
            ("r_B1", self.r_b1),
            ("r_B2", self.r_b2),
            ("r_C1", self.r_c1),
            ("r_C2", self.r_c2),
            ("r_D1", self.r_d1),
            ("r_D2", self.r_d2),
            ("r_D3", self.r_d3),
        ]
        return {key: value for key, value in ordered if value is not None}


def landmarks(m: float) -> Landmarks:
    """All applicable landmark radii and angles for the bound ``m``."""
    _require_bound(m)
    w = math.sqrt(4.0 * m * m - 1.0)
    r_c1 = math.exp(-math.pi / w)
    r_d1 = math.exp(-(math.pi - arccot(1.0 / w)) / w)
    r_d2 = (
        math.sqrt(m * m + 2.0)
        / (1.0 + math.sqrt(m * m + 1.0))
        * math.exp(-arccot((m * m - 1.0) / w) / w)
    )
    if m >= 1.0:
        return Landmarks(
            m=m,
            r_c1=r_c1,
            r_d1=r_d1,
            r_d2=r_d2,
            theta_b=arccot(1.0 / m),
            r_b=math.sqrt(m * m + 1.0) / (m + 1.0),
            r_c2=(m - 1.0) / (m + 1.0),
            r_d3=math.sqrt(m * m - 1.0) / (m + 1.0),
        )
    s = math.sqrt(1.0 - m * m)
    r_b1 = math.sqrt((1.0 + s) / 2.0)
    r_b2 = r_b1 * math.exp(-arccot((2.0 * m * m - 1.0) / (w * s)) / w)
    return Landmarks(
        m=m,
        r_c1=r_c1,
        r_d1=r_d1,
        r_d2=r_d2,
        theta_b1=arccot((1.0 + s) / m),
        theta_b2=arccot((1.0 - s) / m),
        r_b1=r_b1,
        r_b2=r_b2,
    )


class Regime(Enum):
    """Switch count of the optimal transfer."""

    NO_SWITCH = "none"
    ONE_SWITCH = "one"
    TWO_SWITCH = "two"
    UNREACHABLE = "unreachable"


def classify(m: float, target: PulseTarget) -> Regime:
    """Switch-count regime of the target under the bound ``m``.

    Boundary radii are inclusive downward, matching the interval placement
    of the regime table: a target exactly on a landmark belongs to the
    interval whose upper end it is.
    """
    if math.isinf(m):
        return Regime.NO_SWITCH
    _require_bound(m)
    lm = landmarks(m)
    r = target.r
    if target.is_inversion:
        if r > lm.r_c1:
            return Regime.UNREACHABLE
        if lm.r_c2 is not None and r <= lm.r_c2:
            return Regime.NO_SWITCH
        return Regime.TWO_SWITCH
    if r > lm.r_d1:
        return Regime.UNREACHABLE
    if lm.r_d3 is not None and r <= lm.r_d3:
        return Regime.NO_SWITCH
    if r <= lm.r_d2:
        return Regime.TWO_SWITCH
    return Regime.ONE_SWITCH


def required_second_switch_radius(
    theta2: float, r_tau: float, theta_tau: float, kappa: float
) -> float:
    """Exit radius needed so the post-saturation smooth arc ends on target.

    Derived by running the smooth-arc radius ratio backwards from the final
    point (r_tau, theta_tau) to the exit angle.  Singular at kappa = 0,
    which only arises in the r_tau -> 0 limit.
    """
    if kappa <= 0.0:
        raise DegenerateKappa(
            f"post-switch arc is singular for kappa={kappa:.9g}"
        )
    c = math.cos(theta2)
    numerator = c + math.sqrt(c * c + kappa * kappa)
    if theta_tau == math.pi:
        return r_tau * numerator / (math.sqrt(1.0 + kappa * kappa) - 1.0)
    if theta_tau == _HALF_PI:
        return r_tau * numerator / kappa
    raise ValueError(f"final angle must be pi/2 or pi, got {theta_tau}")


def required_first_switch_radius(theta1: float, r_tau: float, m: float) -> float:
    """Entry radius needed so a saturated arc from ``theta1`` ends on
    (r_tau, pi/2): the saturated transport run backwards from the target."""
    _require_bound(m)
    w = math.sqrt(4.0 * m * m - 1.0)
    amplitude = math.sqrt(2.0 * m / (2.0 * m - math.sin(2.0 * theta1)))
    return r_tau * amplitude * math.exp(_transport_exponent(theta1, _HALF_PI, m) / w)


@dataclass(frozen=True)
class Segment:
    """One piece of the piecewise feedback description."""

    kind: str  # "smooth" | "saturated"
    theta_lo: float
    theta_hi: float


@dataclass(frozen=True)
class PulseProgram:
    """Complete synthesized pulse: bound, regime, costate constant,
    switching angles, predicted energy, and the feedback law itself.

    ``m`` is ``math.inf`` for an unlimited-amplitude design.  ``theta1``
    and ``theta2`` are absent (None) according to the regime.  The program
    object doubles as the feedback law: ``control``/``costate`` evaluate
    the piecewise closed forms, and ``radius_at`` the angle-parameterized
    trajectory they trace.
    """

    m: float
    target: PulseTarget
    regime: Regime
    kappa: float
    theta1: Optional[float]
    theta2: Optional[float]
    energy: float

    @property
    def lambda_a(self) -> float:
        return 0.5 * self.kappa * self.kappa

    @property
    def theta_domain(self) -> tuple[float, float]:
        return 0.0, self.target.theta

    def _saturated_interval(self) -> Optional[tuple[float, float]]:
        if self.regime is Regime.TWO_SWITCH:
            return self.theta1, self.theta2
        if self.regime is Regime.ONE_SWITCH:
            return self.theta1, self.target.theta
        return None

    @property
    def segments(self) -> tuple[Segment, ...]:
        sat = self._saturated_interval()
        if sat is None:
            return (Segment("smooth", 0.0, self.target.theta),)
        lo, hi = sat
        pieces = [Segment("smooth", 0.0, lo), Segment("saturated", lo, hi)]
        if hi < self.target.theta:
            pieces.append(Segment("smooth", hi, self.target.theta))
        return tuple(pieces)

    def control(self, theta: float) -> float:
        sat = self._saturated_interval()
        if sat is not None and sat[0] <= theta <= sat[1]:
            return self.m
        return unbounded.feedback_u(theta, self.kappa)

    def costate(self, theta: float) -> float:
        """Angle costate along the program; equals the control on smooth
        arcs and exceeds the bound strictly inside the saturated arc."""
        sat = self._saturated_interval()
        if sat is not None and sat[0] <= theta <= sat[1]:
            s = math.sin(theta)
            k2 = self.kappa * self.kappa
            return (self.m * self.m + k2 * s * s) / (
                2.0 * (self.m - s * math.cos(theta))
            )
        return unbounded.feedback_u(theta, self.kappa)

    def thetadot(self, theta: float) -> float:
        s = math.sin(theta)
        return self.control(theta) - s * math.cos(theta)

    def radius_at(self, theta: float) -> float:
        """Angle-parameterized closed-form radius along the program."""
        sat = self._saturated_interval()
        if sat is None or theta <= sat[0]:
            return unbounded.trajectory_r(theta, self.kappa)
        r1 = unbounded.trajectory_r(sat[0], self.kappa)
        if theta <= sat[1]:
            return saturated_arc_radius(r1, sat[0], theta, self.m)
        r2 = saturated_arc_radius(r1, sat[0], sat[1], self.m)
        c = math.cos(theta)
        c2 = math.cos(sat[1])
        k2 = self.kappa * self.kappa
        return r2 * (c + math.sqrt(c * c + k2)) / (c2 + math.sqrt(c2 * c2 + k2))

    def simulate(
        self, step: StepControl = StepControl(), theta_start: float = THETA_START
    ) -> Trajectory:
        """Closed-loop run of the program from just off the unit pole."""
        return integrate_feedback(
            self.control,
            PolarState(a=0.0, theta=theta_start),
            self.target.theta,
            step=step,
            costate=self.costate,
            lambda_a=self.lambda_a,
        )

    def to_json(self) -> str:
        def num(x: Optional[float]) -> str:
            if x is None or math.isinf(x):
                return "null"
            return format(x, ".12g")

        return (
            '{"m": %s, "target": {"r": %s, "theta": "%s"}, "regime": "%s", '
            '"kappa": %s, "theta1": %s, "theta2": %s, "energy": %s}'
            % (
                num(self.m),
                num(self.target.r),
                self.target.label,
                self.regime.value,
                num(self.kappa),
                num(self.theta1),
                num(self.theta2),
                num(self.energy),
            )
        )

    def save(self, path) -> None:
        with open(path, "w") as handle:
            handle.write(self.to_json())
            handle.write("\n")

    @classmethod
    def from_json(cls, text: str) -> "PulseProgram":
        raw = json.loads(text)
        try:
            target = PulseTarget.from_label(raw["target"]["r"], raw["target"]["theta"])
            regime = Regime(raw["regime"])
            m = raw["m"]
            program = cls(
                m=math.inf if m is None else float(m),
                target=target,
                regime=regime,
                kappa=float(raw["kappa"]),
                theta1=None if raw["theta1"] is None else float(raw["theta1"]),
                theta2=None if raw["theta2"] is None else float(raw["theta2"]),
                energy=float(raw["energy"]),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed pulse program document: {exc}") from exc
        program._validate_shape()
        return program

    @classmethod
    def load(cls, path) -> "PulseProgram":
        with open(path) as handle:
            return cls.from_json(handle.read())

    def _validate_shape(self) -> None:
        needs = {
            Regime.NO_SWITCH: (False, False),
            Regime.ONE_SWITCH: (True, False),
            Regime.TWO_SWITCH: (True, True),
        }
        if self.regime not in needs:
            raise ValueError(f"program regime {self.regime} is not synthesizable")
        want1, want2 = needs[self.regime]
        if (self.theta1 is not None) != want1 or (self.theta2 is not None) != want2:
            raise ValueError(
                f"switching angles inconsistent with regime {self.regime.value}"
            )
        if not math.isinf(self.m):
            _require_bound(self.m)


def _program_energy(
    m: float,
    kappa: float,
    sat: Optional[tuple[float, float]],
    theta_tau: float,
    rel_tol: float = 1e-11,
) -> float:
    """Quadrature energy of a piecewise program, segment by segment."""

    def smooth(lo: float, hi: float) -> float:
        if hi <= lo:
            return 0.0
        return energy_theta_quadrature(
            lambda th: unbounded.feedback_u(th, kappa),
            lambda th: unbounded.thetadot(th, kappa),
            lo,
            hi,
            rel_tol=rel_tol,
        )

    if sat is None:
        return smooth(0.0, theta_tau)
    lo, hi = sat
    saturated = energy_theta_quadrature(
        lambda th: m,
        lambda th: m - math.sin(th) * math.cos(th),
        lo,
        hi,
        rel_tol=rel_tol,
    )
    return smooth(0.0, lo) + saturated + smooth(hi, theta_tau)


def _sign(x: float) -> int:
    if x > 0.0:
        return 1
    if x < 0.0:
        return -1
    return 0


def _find_roots(
    g: Callable[[float], float],
    lo: float,
    hi: float,
    samples: int = 2000,
    xtol: float = 1e-12,
) -> list[float]:
    """Bracket every sign change of g on a uniform grid, refine by bisection."""
    xs = np.linspace(lo, hi, samples)
    gs = [g(float(x)) for x in xs]
    roots: list[float] = []
    for i in range(samples - 1):
        ga, gb = gs[i], gs[i + 1]
        if ga == 0.0:
            roots.append(float(xs[i]))
            continue
        if math.isnan(ga) or math.isnan(gb):
            continue
        if _sign(ga) * _sign(gb) < 0:
            a, b = float(xs[i]), float(xs[i + 1])
            fa = ga
            while b - a > xtol:
                mid = 0.5 * (a + b)
                fm = g(mid)
                if fm == 0.0:
                    a = b = mid
                    break
                if _sign(fa) * _sign(fm) < 0:
                    b = mid
                else:
                    a, fa = mid, fm
            roots.append(0.5 * (a + b))
    if gs[-1] == 0.0:
        roots.append(float(xs[-1]))
    # collapse duplicates from a root sitting on a grid node
    deduped: list[float] = []
    for root in roots:
        if not deduped or abs(root - deduped[-1]) > 10.0 * xtol:
            deduped.append(root)
    return deduped


def _assemble_two_switch(m: float, target: PulseTarget, theta2: float) -> PulseProgram:
    theta1 = partner_angle(theta2, m)
    kappa = kappa_from_switch(theta2, m, "second")
    sat = (theta1, theta2)
    return PulseProgram(
        m=m,
        target=target,
        regime=Regime.TWO_SWITCH,
        kappa=kappa,
        theta1=theta1,
        theta2=theta2,
        energy=_program_energy(m, kappa, sat, target.theta),
    )


def solve_two_switch(m: float, target: PulseTarget) -> PulseProgram:
    """Locate the exit switching angle for a two-switch transfer.

    Scans the admissible exit-angle interval for crossings between the
    saturation-exit curve and the radius the final smooth arc requires,
    then refines each crossing by bisection.  If several crossings appear
    the minimum-energy assembly wins and a diagnostic is logged.
    """
    regime = classify(m, target)
    if regime is not Regime.TWO_SWITCH:
        raise ValueError(
            f"target (r={target.r}, theta={target.label}) with m={m} is in the "
            f"{regime.value!r} regime, not 'two'"
        )
    limits = _switch_angle_limits(m)
    lo = limits[1] + 1e-12
    hi = math.pi if target.is_inversion else _HALF_PI

    def mismatch(theta2: float) -> float:
        kappa = kappa_from_switch(theta2, m, "second")
        try:
            needed = required_second_switch_radius(theta2, target.r, target.theta, kappa)
        except DegenerateKappa:
            return -math.inf
        return second_switch_radius(theta2, m) - needed

    roots = _find_roots(mismatch, lo, hi)
    if not roots:
        # a target sitting exactly on a landmark radius can push the
        # crossing onto (or a rounding error past) an interval endpoint
        roots = [x for x in (hi, lo) if abs(mismatch(x)) < 1e-10][:1]
    if not roots:
        raise NoBracket(
            f"no crossing with the exit switching curve on [{lo:.9g}, {hi:.9g}] "
            f"for r={target.r}, theta={target.label}, m={m}"
        )
    programs = [_assemble_two_switch(m, target, theta2) for theta2 in roots]
    if len(programs) > 1:
        logger.warning(
            "two-switch crossing is not unique (m=%g, r=%g, theta=%s): "
            "%d crossings, keeping the minimum-energy one",
            m,
            target.r,
            target.label,
            len(programs),
        )
        programs.sort(key=lambda p: p.energy)
    return programs[0]


def solve_one_switch(m: float, r_tau: float) -> PulseProgram:
    """Locate the entry switching angle for a one-switch quarter turn."""
    target = PulseTarget(r_tau, _HALF_PI)
    regime = classify(m, target)
    if regime is not Regime.ONE_SWITCH:
        raise ValueError(
            f"target (r={r_tau}, theta=pi/2) with m={m} is in the "
            f"{regime.value!r} regime, not 'one'"
        )
    hi = _switch_angle_limits(m)[0]

    def mismatch(theta1: float) -> float:
        return first_switch_radius(theta1, m) - required_first_switch_radius(
            theta1, r_tau, m
        )

    roots = _find_roots(mismatch, 1e-12, hi)
    if not roots:
        # boundary-of-reachability targets put the crossing at the pole end
        roots = [x for x in (1e-12, hi) if abs(mismatch(x)) < 1e-10][:1]
    if not roots:
        raise NoBracket(
            f"no crossing with the entry switching curve on (0, {hi:.9g}] "
            f"for r={r_tau}, m={m}"
        )
    if len(roots) > 1:
        logger.warning(
            "one-switch crossing is not unique (m=%g, r=%g): %d crossings, "
            "keeping the minimum-energy one",
            m,
            r_tau,
            len(roots),
        )
    best: Optional[PulseProgram] = None
    for theta1 in roots:
        kappa = kappa_from_switch(theta1, m, "first")
        program = PulseProgram(
            m=m,
            target=target,
            regime=Regime.ONE_SWITCH,
            kappa=kappa,
            theta1=theta1,
            theta2=None,
            energy=_program_energy(m, kappa, (theta1, _HALF_PI), _HALF_PI),
        )
        if best is None or program.energy < best.energy:
            best = program
    return best


def synthesize(m: float, target: PulseTarget) -> PulseProgram:
    """Dispatch on the regime and assemble the full pulse program.

    ``m = math.inf`` selects the unlimited-amplitude branch.  The no-switch
    regime reuses the unlimited-amplitude costate constant, whose smooth law
    never touches the bound there.
    """
    if math.isinf(m):
        kappa = unbounded.kappa_for_target(target)
        return PulseProgram(
            m=math.inf,
            target=target,
            regime=Regime.NO_SWITCH,
            kappa=kappa,
            theta1=None,
            theta2=None,
            energy=_program_energy(math.inf, kappa, None, target.theta),
        )
    _require_bound(m)
    regime = classify(m, target)
    if regime is Regime.UNREACHABLE:
        lm = landmarks(m)
        limit = lm.r_c1 if target.is_inversion else lm.r_d1
        raise Unreachable(
            f"final radius {target.r:.9g} exceeds the largest reachable radius "
            f"{limit:.9g} on the theta={target.label} axis for m={m:.9g}",
            limit_radius=limit,
        )
    if regime is Regime.NO_SWITCH:
        kappa = unbounded.kappa_for_target(target)
        return PulseProgram(
            m=m,
            target=target,
            regime=Regime.NO_SWITCH,
            kappa=kappa,
            theta1=None,
            theta2=None,
            energy=_program_energy(m, kappa, None, target.theta),
        )
    if regime is Regime.TWO_SWITCH:
        return solve_two_switch(m, target)
    return solve_one_switch(m, target.r)


@dataclass(frozen=True)
class SwitchingGeometry:
    """Sampled switching curves, reachable boundary and landmarks.

    Each curve is an array of shape (n, 2) with columns (theta, r).
    """

    m: float
    first_curve: np.ndarray
    second_curve: np.ndarray
    boundary: np.ndarray
    no_switch_max: np.ndarray
    landmarks: Landmarks

    def write_csv(self, handle) -> None:
        """Emit rows ``curve,theta,r`` for every sampled point."""
        handle.write("curve,theta,r\n")
        for name, curve in (
            ("first", self.first_curve),
            ("second", self.second_curve),
            ("boundary", self.boundary),
            ("noswitch_max", self.no_switch_max),
        ):
            for theta, r in curve:
                handle.write(
                    "%s,%s,%s\n" % (name, format(theta, ".12g"), format(r, ".12g"))
                )


def sample_geometry(m: float, samples: int = 400) -> SwitchingGeometry:
    """Sample all four organizing curves on uniform angle grids."""
    _require_bound(m)
    if samples < 2:
        raise ValueError(f"need at least 2 samples per curve, got {samples}")
    lm = landmarks(m)
    first_end, second_start = _switch_angle_limits(m)

    def curve(fn, lo: float, hi: float) -> np.ndarray:
        thetas = np.linspace(lo, hi, samples)
        return np.column_stack([thetas, [fn(float(t)) for t in thetas]])

    if m >= 1.0:
        no_switch = curve(lambda t: max_no_switch_radius(t, m), lm.theta_b, math.pi)
    else:
        no_switch = curve(lambda t: max_no_switch_radius(t, m), lm.theta_b2, _HALF_PI)
    return SwitchingGeometry(
        m=m,
        first_curve=curve(lambda t: first_switch_radius(t, m), 0.0, first_end),
        second_curve=curve(lambda t: second_switch_radius(t, m), second_start, math.pi),
        boundary=curve(lambda t: reachable_boundary(t, m), 0.0, math.pi),
        no_switch_max=no_switch,
        landmarks=lm,
    )
