"""Direct-transcription search used as empirical optimality evidence.

The synthesized feedback laws satisfy necessary conditions only, so the
package ships an independent check: a derivative-free search over
piecewise-constant controls on a fixed horizon, scored by exact quadrature
energy plus a penalty on the distance of closest approach to the target.
If the search - warm-started from the synthesized control and from seeded
random restarts - never lands below the synthesized energy, that is the
strongest optimality evidence available at desk scale.

Because the final time is free, the horizon is taken generously (three
times the closed-loop 99%-progress time) and the endpoint error is the
minimum distance to the target over the whole rollout; trailing segments
then relax to zero control on their own, since they only add energy.
Half-turn targets are approached asymptotically, so the search aims at the
angle pi - 1e-3 with the radius mapped through the program's final smooth
arc; the mapped target is declared in the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bloch import PulseTarget
from .bounded import PulseProgram, synthesize
from .errors import DidNotConverge

__all__ = ["OracleResult", "oracle_transcription"]

_ENDPOINT_TOL = 1e-3
_PENALTY_START = 1e4
_PENALTY_MAX = 1e10
_PENALTY_GROWTH = 30.0


@dataclass(frozen=True)
class OracleResult:
    """Best feasible control found by the transcription search."""

    best_energy: float
    control_grid: tuple[float, ...]
    endpoint_error: float
    horizon: float
    target_theta: float
    target_radius: float
    evaluations: int

    def to_json(self) -> str:
        grid = ", ".join(format(u, ".12g") for u in self.control_grid)
        return (
            '{"best_energy": %s, "endpoint_error": %s, "horizon": %s, '
            '"target_theta": %s, "target_radius": %s, "evaluations": %d, '
            '"control_grid": [%s]}'
            % (
                format(self.best_energy, ".12g"),
                format(self.endpoint_error, ".12g"),
                format(self.horizon, ".12g"),
                format(self.target_theta, ".12g"),
                format(self.target_radius, ".12g"),
                self.evaluations,
                grid,
            )
        )


class _Rollout:
    """Piecewise-constant rollout of the planar dynamics with tail caching.

    Keeps the states and running minimum target distance at every segment
    boundary so that re-evaluating a candidate that changes segment i only
    costs the tail i..n-1.
    """

    def __init__(
        self,
        n_segments: int,
        seg_dt: float,
        n_sub: int,
        start_theta: float,
        target_theta: float,
        target_radius: float,
    ):
        self.n = n_segments
        self.n_sub = n_sub
        self.dt = seg_dt / n_sub
        self.start_theta = start_theta
        self.z_t = target_radius * math.cos(target_theta)
        self.y_t = target_radius * math.sin(target_theta)
        self.theta = [0.0] * (n_segments + 1)
        self.log_r = [0.0] * (n_segments + 1)
        self.min_dist = [0.0] * (n_segments + 1)

    def _advance(self, controls, first: int, replace_value: Optional[float]):
        """March segments first..n-1; returns (err, tail states).

        The target miss is the minimum distance from the target point to
        the polyline through the sub-step states, so a fast crossing of
        the target neighbourhood is not penalized by sample spacing.
        """
        sin, cos, exp, hypot = math.sin, math.cos, math.exp, math.hypot
        dt = self.dt
        half = 0.5 * dt
        sixth = dt / 6.0
        th = self.theta[first]
        aa = self.log_r[first]
        best = self.min_dist[first]
        z_t, y_t = self.z_t, self.y_t
        r = exp(aa)
        z0 = r * cos(th)
        y0 = r * sin(th)

        tail_theta = []
        tail_log_r = []
        tail_min = []
        for k in range(first, self.n):
            u = replace_value if (k == first and replace_value is not None) else controls[k]
            for _ in range(self.n_sub):
                s = sin(th)
                k1t = u - s * cos(th)
                k1a = -s * s
                t2 = th + half * k1t
                s = sin(t2)
                k2t = u - s * cos(t2)
                k2a = -s * s
                t3 = th + half * k2t
                s = sin(t3)
                k3t = u - s * cos(t3)
                k3a = -s * s
                t4 = th + dt * k3t
                s = sin(t4)
                k4t = u - s * cos(t4)
                k4a = -s * s
                th += sixth * (k1t + 2.0 * (k2t + k3t) + k4t)
                aa += sixth * (k1a + 2.0 * (k2a + k3a) + k4a)
                r = exp(aa)
                z1 = r * cos(th)
                y1 = r * sin(th)
                # distance from the target to the chord (z0,y0)-(z1,y1)
                dz = z1 - z0
                dy = y1 - y0
                denom = dz * dz + dy * dy
                if denom > 0.0:
                    frac = ((z_t - z0) * dz + (y_t - y0) * dy) / denom
                    if frac < 0.0:
                        frac = 0.0
                    elif frac > 1.0:
                        frac = 1.0
                    d = hypot(z_t - (z0 + frac * dz), y_t - (y0 + frac * dy))
                else:
                    d = hypot(z_t - z1, y_t - y1)
                if d < best:
                    best = d
                z0, y0 = z1, y1
            tail_theta.append(th)
            tail_log_r.append(aa)
            tail_min.append(best)
        return best, tail_theta, tail_log_r, tail_min

    def reset(self, controls) -> float:
        self.theta[0] = self.start_theta
        self.log_r[0] = 0.0
        r = math.exp(self.log_r[0])
        self.min_dist[0] = math.hypot(
            r * math.cos(self.theta[0]) - self.z_t,
            r * math.sin(self.theta[0]) - self.y_t,
        )
        err, t_th, t_a, t_m = self._advance(controls, 0, None)
        self._commit(0, t_th, t_a, t_m)
        return err

    def probe(self, controls, index: int, value: float):
        return self._advance(controls, index, value)

    def _commit(self, first: int, tail_theta, tail_log_r, tail_min) -> None:
        self.theta[first + 1 :] = tail_theta
        self.log_r[first + 1 :] = tail_log_r
        self.min_dist[first + 1 :] = tail_min

    def commit(self, first: int, tail) -> None:
        _, t_th, t_a, t_m = tail
        self._commit(first, t_th, t_a, t_m)


def _resample_control(program_trajectory, boundaries: np.ndarray, bound: float) -> np.ndarray:
    """Average the simulated control over each segment window (0 past the end)."""
    n = len(boundaries) - 1
    out = np.empty(n)
    t = program_trajectory.t
    u = program_trajectory.u
    for i in range(n):
        probe = np.linspace(boundaries[i], boundaries[i + 1], 9)
        vals = np.interp(probe, t, u, left=u[0], right=0.0)
        out[i] = min(max(float(vals.mean()), 0.0), bound)
    return out


def oracle_transcription(
    m: float,
    target: PulseTarget,
    n_segments: int = 200,
    evaluations: int = 50_000,
    seed: int = 0,
    restarts: int = 2,
    program: Optional[PulseProgram] = None,
) -> OracleResult:
    """Search piecewise-constant controls for a cheaper feasible transfer.

    Coordinate descent with a shrinking step and multiplicative penalty
    continuation, warm-started from the synthesized control plus
    ``restarts`` seeded random starts.  Deterministic for a fixed seed.
    Raises DidNotConverge when no evaluated control comes within 1e-3 of
    the target.
    """
    if n_segments < 20:
        raise ValueError(f"need at least 20 segments, got {n_segments}")
    if evaluations < 1:
        raise ValueError("evaluation budget must be positive")
    if program is None:
        program = synthesize(m, target)

    trajectory = program.simulate()
    if target.is_inversion:
        target_theta = math.pi - 1e-3
        target_radius = program.radius_at(target_theta)
    else:
        target_theta = target.theta
        target_radius = target.r

    start_theta = float(trajectory.theta[0])
    progress_angle = start_theta + 0.99 * (target_theta - start_theta)
    idx = min(int(np.searchsorted(trajectory.theta, progress_angle)), len(trajectory) - 1)
    horizon = 3.0 * float(trajectory.t[idx])

    bound = m if math.isfinite(m) else max(1.0, 2.0 * float(trajectory.u.max()))
    seg_dt = horizon / n_segments
    n_sub = max(1, math.ceil(seg_dt / 0.03))
    rollout = _Rollout(n_segments, seg_dt, n_sub, start_theta, target_theta, target_radius)

    boundaries = np.linspace(0.0, horizon, n_segments + 1)
    rng = np.random.default_rng(seed)
    # the warm start from the synthesized control takes half the budget and
    # a fine initial step; random restarts explore coarsely
    warm_share = 0.5 if restarts > 0 else 1.0
    starts = [(_resample_control(trajectory, boundaries, bound), bound / 64.0, warm_share)]
    for _ in range(restarts):
        starts.append((rng.uniform(0.0, bound, n_segments), bound / 8.0, 0.5 / restarts))

    half_dt = 0.5 * seg_dt
    best_energy = math.inf
    best_error = math.inf
    best_controls: Optional[list[float]] = None
    closest_error = math.inf
    used = 0

    for start, delta0, share in starts:
        controls = [float(v) for v in start]
        budget = min(max(1, int(evaluations * share)), evaluations - used)
        if budget <= 0:
            break
        energy = sum(v * v for v in controls) * half_dt
        error = rollout.reset(controls)
        used += 1
        budget -= 1
        closest_error = min(closest_error, error)
        if error <= _ENDPOINT_TOL and energy < best_energy:
            best_energy, best_error = energy, error
            best_controls = list(controls)

        penalty = _PENALTY_START
        objective = energy + penalty * error * error
        delta = delta0
        while budget > 0:
            improved = False
            for i in range(n_segments):
                if budget <= 0:
                    break
                current = controls[i]
                for candidate in (current + delta, current - delta):
                    candidate = min(max(candidate, 0.0), bound)
                    if candidate == current or budget <= 0:
                        continue
                    tail = rollout.probe(controls, i, candidate)
                    used += 1
                    budget -= 1
                    cand_error = tail[0]
                    cand_energy = energy + (candidate * candidate - current * current) * half_dt
                    closest_error = min(closest_error, cand_error)
                    if cand_error <= _ENDPOINT_TOL and cand_energy < best_energy:
                        best_energy, best_error = cand_energy, cand_error
                        best_controls = list(controls)
                        best_controls[i] = candidate
                    cand_objective = cand_energy + penalty * cand_error * cand_error
                    if cand_objective < objective - 1e-15:
                        rollout.commit(i, tail)
                        controls[i] = candidate
                        current = candidate
                        energy, error, objective = cand_energy, cand_error, cand_objective
                        improved = True
            if not improved:
                delta *= 0.5
                if delta < bound * 1e-6:
                    if error > _ENDPOINT_TOL and penalty < _PENALTY_MAX:
                        penalty *= _PENALTY_GROWTH
                        objective = energy + penalty * error * error
                        delta = delta0
                    else:
                        break

    if best_controls is None:
        raise DidNotConverge(
            f"no control within {_ENDPOINT_TOL:g} of the target after {used} "
            f"evaluations (closest approach {closest_error:.3g})"
        )
    return OracleResult(
        best_energy=best_energy,
        control_grid=tuple(best_controls),
        endpoint_error=best_error,
        horizon=horizon,
        target_theta=target_theta,
        target_radius=target_radius,
        evaluations=used,
    )
