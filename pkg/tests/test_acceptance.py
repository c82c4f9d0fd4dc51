"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest -s tests/test_acceptance.py`` to see the per-criterion
lines; every tolerance is pinned here and nowhere else.
"""

import math
import time

import numpy as np

import blochpulse as bp
from blochpulse.bloch import PulseTarget, cartesian_from_polar, integrate_full
from blochpulse.bounded import (
    _switch_angle_limits,
    classify,
    cot,
    first_switch_radius,
    landmarks,
    partner_angle,
    saturated_arc_radius,
    synthesize,
)
from blochpulse.oracle import oracle_transcription
from blochpulse.pmp import check_adjoint, check_hamiltonian, saturation_excess
from blochpulse.unbounded import closed_energy, feedback_u, thetadot

QUARTER = math.pi / 2


def report(criterion: int, ok: bool, detail: str) -> None:
    print(f"[acceptance] criterion {criterion:02d}: {'PASS' if ok else 'FAIL'} - {detail}")


def test_criterion_01_two_switch_half_turn_reference_values():
    t0 = time.perf_counter()
    program = synthesize(2.0, PulseTarget(0.39, math.pi))
    elapsed = time.perf_counter() - t0
    ok = (
        abs(program.theta1 - 0.6912) <= 1e-3
        and abs(program.theta2 - 1.7766) <= 1e-3
        and abs(program.kappa - 2.2382) <= 1e-3
        and elapsed < 1.0
    )
    report(
        1,
        ok,
        f"theta1={program.theta1:.6f} theta2={program.theta2:.6f} "
        f"kappa={program.kappa:.6f} runtime={elapsed:.3f}s",
    )
    assert ok


def test_criterion_02_one_switch_quarter_turn_reference_values():
    program = synthesize(2.0, PulseTarget(0.61, QUARTER))
    ok = (
        program.regime is bp.Regime.ONE_SWITCH
        and abs(program.theta1 - 0.6124) <= 1e-3
        and abs(program.kappa - 2.5322) <= 1e-3
    )
    report(
        2,
        ok,
        f"regime={program.regime.value} theta1={program.theta1:.6f} "
        f"kappa={program.kappa:.6f}",
    )
    assert ok


def test_criterion_03_two_switch_below_unit_bound_reference_values():
    program = synthesize(0.95, PulseTarget(0.2, QUARTER))
    ok = (
        program.regime is bp.Regime.TWO_SWITCH
        and abs(program.theta1 - 0.5442) <= 1e-3
        and abs(program.theta2 - 1.1456) <= 1e-3
        and abs(program.kappa - 0.4766) <= 1e-3
    )
    report(
        3,
        ok,
        f"regime={program.regime.value} theta1={program.theta1:.6f} "
        f"theta2={program.theta2:.6f} kappa={program.kappa:.6f}",
    )
    assert ok


def test_criterion_04_unlimited_amplitude_energy_closed_forms():
    worst = 0.0
    for r in (0.1, 0.3, 0.6, 0.9):
        for theta, closed in ((QUARTER, 1.0 / (1.0 - r * r)), (math.pi, (1.0 + r) / (1.0 - r))):
            target = PulseTarget(r, theta)
            kappa = bp.kappa_for_target(target)
            energy = bp.energy_theta_quadrature(
                lambda th: feedback_u(th, kappa),
                lambda th: thetadot(th, kappa),
                0.0,
                theta,
            )
            assert closed == closed_energy(target)
            worst = max(worst, abs(energy - closed) / closed)
    ok = worst < 1e-8
    report(4, ok, f"max relative energy error {worst:.2e}")
    assert ok


def test_criterion_05_switch_relation_identities_over_grid():
    # 20 two-switch configurations spread over bounds and both final angles
    configs = []
    for m in (0.8, 0.95, 1.0, 1.5, 2.0):
        lm = landmarks(m)
        low = lm.r_c2 if lm.r_c2 is not None else 0.0
        for frac in (0.35, 0.75):
            configs.append((m, low + frac * (lm.r_c1 - low), math.pi))
        low = lm.r_d3 if lm.r_d3 is not None else 0.0
        for frac in (0.35, 0.75):
            configs.append((m, low + frac * (lm.r_d2 - low), QUARTER))
    assert len(configs) == 20

    worst_cot = 0.0
    worst_kappa = 0.0
    for m, r, theta in configs:
        program = synthesize(m, PulseTarget(r, theta))
        assert program.regime is bp.Regime.TWO_SWITCH
        worst_cot = max(
            worst_cot, abs(cot(program.theta1) + cot(program.theta2) - 2.0 / m)
        )
        k1 = math.sqrt((m * cot(program.theta1) - 1.0) ** 2 + m * m - 1.0)
        k2 = math.sqrt((1.0 - m * cot(program.theta2)) ** 2 + m * m - 1.0)
        worst_kappa = max(worst_kappa, abs(k1 - k2))
    ok = worst_cot < 1e-9 and worst_kappa < 1e-9
    report(5, ok, f"max |cot sum - 2/m| {worst_cot:.2e}, max kappa mismatch {worst_kappa:.2e}")
    assert ok


def test_criterion_06_stationarity_residuals(
    example1, example2, example3, example1_trajectory, example2_trajectory,
    example3_trajectory,
):
    programs = (example1, example2, example3)
    trajectories = (example1_trajectory, example2_trajectory, example3_trajectory)
    worst_h = 0.0
    worst_adj = 0.0
    min_excess = math.inf
    for program, trajectory in zip(programs, trajectories):
        worst_h = max(worst_h, check_hamiltonian(program).max_abs_h)
        worst_adj = max(
            worst_adj, check_adjoint(program, trajectory=trajectory).max_residual
        )
        min_excess = min(min_excess, saturation_excess(program))
    ok = worst_h < 1e-8 and worst_adj < 1e-4 and min_excess > 0.0
    report(
        6,
        ok,
        f"max|H| {worst_h:.2e}, adjoint residual {worst_adj:.2e}, "
        f"min costate excess {min_excess:.2e}",
    )
    assert ok


def test_criterion_07_regime_landmarks_reproduce_switch_counts():
    lm2 = landmarks(2.0)
    lm95 = landmarks(0.95)
    ok = (
        lm2.r_c2 < 0.39 < lm2.r_c1
        and lm2.r_d2 < 0.61 < lm2.r_d1
        and 0.2 < lm95.r_d2
        and classify(2.0, PulseTarget(0.39, math.pi)) is bp.Regime.TWO_SWITCH
        and classify(2.0, PulseTarget(0.61, QUARTER)) is bp.Regime.ONE_SWITCH
        and classify(0.95, PulseTarget(0.2, QUARTER)) is bp.Regime.TWO_SWITCH
    )
    report(
        7,
        ok,
        f"r_C2(2)={lm2.r_c2:.5f} < 0.39 < r_C1(2)={lm2.r_c1:.5f}; "
        f"r_D2(2)={lm2.r_d2:.5f} < 0.61 < r_D1(2)={lm2.r_d1:.5f}; "
        f"0.2 < r_D2(0.95)={lm95.r_d2:.5f}",
    )
    assert ok


def test_criterion_08_transcription_search_never_beats_synthesis(
    example1, example2, example3
):
    ok = True
    details = []
    for program in (example1, example2, example3):
        t0 = time.perf_counter()
        result = oracle_transcription(
            program.m,
            program.target,
            n_segments=200,
            evaluations=50_000,
            seed=7,
            program=program,
        )
        elapsed = time.perf_counter() - t0
        case_ok = (
            result.best_energy >= program.energy - 1e-2
            and result.endpoint_error <= 1e-3
            and elapsed < 60.0
        )
        ok = ok and case_ok
        details.append(
            f"(m={program.m:g}, r={program.target.r:g}, {program.target.label}): "
            f"oracle {result.best_energy:.5f} vs synthesized {program.energy:.5f} "
            f"in {elapsed:.0f}s"
        )
    report(8, ok, "; ".join(details))
    assert ok


def test_criterion_09_full_model_cross_check(example1, example1_trajectory):
    trajectory = example1_trajectory
    start = cartesian_from_polar(0.0, float(trajectory.theta[0]), QUARTER)
    states = integrate_full(example1.control, start, trajectory.t)
    r_full = np.sqrt((states**2).sum(axis=1))
    theta_full = np.arctan2(np.hypot(states[:, 0], states[:, 1]), states[:, 2])
    sup_r = float(np.abs(r_full - trajectory.r).max())
    sup_theta = float(np.abs(theta_full - trajectory.theta).max())
    ok = sup_r < 1e-6 and sup_theta < 1e-6
    report(9, ok, f"sup|r| {sup_r:.2e}, sup|theta| {sup_theta:.2e}")
    assert ok


def test_criterion_10_second_curve_is_transport_of_first():
    def simpson(f, lo, hi, n):
        xs = np.linspace(lo, hi, n + 1)
        ys = np.array([f(float(x)) for x in xs])
        weights = np.ones(n + 1)
        weights[1:-1:2] = 4.0
        weights[2:-1:2] = 2.0
        return float((ys * weights).sum() * (hi - lo) / n / 3.0)

    worst = 0.0
    for m in (0.95, 1.0, 2.0, 5.0):
        entry_end = _switch_angle_limits(m)[0]
        for theta1 in np.linspace(1e-4, entry_end - 1e-9, 400):
            theta1 = float(theta1)
            theta2 = partner_angle(theta1, m)
            r1 = first_switch_radius(theta1, m)
            closed = saturated_arc_radius(r1, theta1, theta2, m)

            def slope(theta, m=m):
                return math.sin(theta) ** 2 / (m - math.sin(theta) * math.cos(theta))

            independent = r1 * math.exp(-simpson(slope, theta1, theta2, 2048))
            worst = max(worst, abs(closed - independent))
    ok = worst < 1e-10
    report(10, ok, f"max |closed-form - quadrature transport| {worst:.2e} over 1600 points")
    assert ok
