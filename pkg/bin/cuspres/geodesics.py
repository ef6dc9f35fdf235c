"""
Geodesic flow on the cusp-cone surface dr^2 + f(r)^2 dtheta^2.

The angular equation is eliminated through the Clairaut constant
L = f^2 theta_dot, leaving r_ddot = L^2 f'(r) / f(r)^3 and
theta_dot = L / f(r)^2. Steps are split at r = 0 so each RK4 sub-step sees
one smooth piece of f.
"""
import enum
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional

import numpy as np

from cuspres.errors import ConfigError, CuspResError, DomainError, StepSizeError

logger = logging.getLogger(__name__)

MAX_DT = 1e-2
CROSSING_TOL = 1e-12
STEP_DRIFT_TOL = 1e-10
MAX_CROSSINGS_PER_STEP = 4


class Side(enum.Enum):
    LEFT = "cone"
    RIGHT = "cusp"
    INTERFACE = "interface"


class ProfileValue(NamedTuple):
    f: float
    f_prime: float
    side: Side


@dataclass(frozen=True)
class MetricProfile:
    a: float
    b: float

    def __post_init__(self):
        if not self.a < 0 < self.b:
            raise ConfigError(f"metric profile needs a < 0 < b, got a={self.a:g}, b={self.b:g}")

    @property
    def glued(self) -> bool:
        return self.a + self.b == 0


def profile(r: float, p: MetricProfile) -> ProfileValue:
    """f and f' at r; at r = 0 exactly f' is the cone-side value a."""
    if r < 0:
        return ProfileValue(1 + p.a * r, p.a, Side.LEFT)
    if r > 0:
        e = math.exp(-p.b * r)
        return ProfileValue(e, -p.b * e, Side.RIGHT)
    return ProfileValue(1.0, p.a, Side.INTERFACE)


def _piece(r: float, side: Side, p: MetricProfile):
    # a single smooth piece, continued a little past r = 0 during RK4 stages
    if side is Side.LEFT:
        return 1 + p.a * r, p.a
    e = math.exp(-p.b * r)
    return e, -p.b * e


@dataclass(frozen=True)
class GeodesicState:
    r: float
    theta: float
    r_dot: float
    theta_dot: float
    clairaut: float
    speed: float
    t: float = 0.0


def _state(r, theta, r_dot, clairaut, t, p: MetricProfile) -> GeodesicState:
    f = profile(r, p).f
    theta_dot = clairaut / (f * f)
    return GeodesicState(r, theta, r_dot, theta_dot, f * f * theta_dot, r_dot * r_dot + (clairaut / f) ** 2, t)


def launch(r: float, angle: float, p: MetricProfile) -> GeodesicState:
    """Unit-speed data at r with r_dot = cos(angle) and f theta_dot = sin(angle)."""
    f = profile(r, p).f
    return GeodesicState(r, 0.0, math.cos(angle), math.sin(angle) / f, f * math.sin(angle), 1.0)


def _rk4(r, v, theta, clairaut, h, side, p):
    def rhs(r_):
        f, fp = _piece(r_, side, p)
        return clairaut * clairaut * fp / f ** 3, clairaut / (f * f)

    a1, w1 = rhs(r)
    a2, w2 = rhs(r + h / 2 * v)
    a3, w3 = rhs(r + h / 2 * (v + h / 2 * a1))
    a4, w4 = rhs(r + h * (v + h / 2 * a2))
    r_new = r + h * v + h * h / 6 * (a1 + a2 + a3)
    v_new = v + h / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
    theta_new = theta + h / 6 * (w1 + 2 * w2 + 2 * w3 + w4)
    return r_new, v_new, theta_new


def _side_for(r: float, direction: float) -> Side:
    if r < 0:
        return Side.LEFT
    if r > 0:
        return Side.RIGHT
    return Side.RIGHT if direction > 0 else Side.LEFT


def _inside(r: float, side: Side) -> bool:
    return r <= 0 if side is Side.LEFT else r >= 0


def r_ddot(state: GeodesicState, p: MetricProfile) -> float:
    f, fp, _ = profile(state.r, p)
    return state.clairaut ** 2 * fp / f ** 3


def step(state: GeodesicState, dt: float, p: MetricProfile) -> GeodesicState:
    """
    One RK4 step of length dt (negative dt runs the flow backwards). A
    crossing of r = 0 is located by bisection and the step split there.
    """
    if not 0 < abs(dt) <= MAX_DT:
        raise DomainError(f"step: |dt| must lie in (0, {MAX_DT}], got {dt}")
    r, v, theta = state.r, state.r_dot, state.theta
    L = state.clairaut
    remaining = dt
    for _ in range(MAX_CROSSINGS_PER_STEP):
        side = _side_for(r, v * dt)
        speed_before = v * v + (L / _piece(r, side, p)[0]) ** 2
        r1, v1, th1 = _rk4(r, v, theta, L, remaining, side, p)
        if _inside(r1, side):
            h = remaining
        else:
            lo, hi = 0.0, remaining
            while abs(hi - lo) > CROSSING_TOL:
                mid = (lo + hi) / 2
                if _inside(_rk4(r, v, theta, L, mid, side, p)[0], side):
                    lo = mid
                else:
                    hi = mid
            h = hi
            r1, v1, th1 = _rk4(r, v, theta, L, h, side, p)
            r1 = 0.0
        speed_after = v1 * v1 + (L / _piece(r1, side, p)[0]) ** 2
        if abs(speed_after - speed_before) > STEP_DRIFT_TOL:
            raise StepSizeError(f"step: speed drift {abs(speed_after - speed_before):.3g} at r={r:.6g}, "
                                f"dt={h:.3g}")
        r, v, theta = r1, v1, th1
        remaining -= h
        if remaining == 0 or abs(remaining) <= CROSSING_TOL:
            return _state(r, theta, v, L, state.t + dt, p)
    raise StepSizeError(f"step: more than {MAX_CROSSINGS_PER_STEP} interface crossings in one step")


@dataclass(frozen=True)
class Trajectory:
    initial: GeodesicState
    final: GeodesicState
    escaped: bool
    escape_time: Optional[float]
    steps: int
    speed_drift: float
    clairaut_drift: float
    max_r_ddot: float

    @property
    def speed_drift_rate(self) -> float:
        return self.speed_drift / max(abs(self.final.t - self.initial.t), 1.0)


def integrate(state: GeodesicState, p: MetricProfile, T: float, R_escape: float = math.inf,
              dt: float = MAX_DT) -> Trajectory:
    """Step for a duration T (direction from the sign of dt) or until |r| > R_escape."""
    if not T > 0:
        raise DomainError(f"integrate: T must be positive, got {T}")
    if dt == 0:
        raise DomainError("integrate: dt must be nonzero")
    initial = state
    max_acc = -math.inf
    n_steps = max(1, math.ceil(T / abs(dt) - 1e-9))
    h = math.copysign(T / n_steps, dt)
    for steps in range(1, n_steps + 1):
        state = step(state, h, p)
        elapsed = steps * abs(h)
        max_acc = max(max_acc, r_ddot(state, p))
        if abs(state.r) > R_escape:
            return Trajectory(initial, state, True, elapsed, steps, abs(state.speed - initial.speed),
                              abs(state.clairaut - initial.clairaut), max_acc)
    return Trajectory(initial, state, False, None, steps, abs(state.speed - initial.speed),
                      abs(state.clairaut - initial.clairaut), max_acc)


@dataclass
class ScanReport:
    fraction_escaped: float
    worst_escape_time: float
    trajectories: int
    verdict: Optional[bool]
    failures: List[str] = field(default_factory=list)


def scan_grid(n_angles: int, n_radii: int, r_min: float = -5.0, r_max: float = 3.0):
    angles = np.pi * np.arange(n_angles) / n_angles
    radii = np.linspace(r_min, r_max, n_radii)
    return [(float(r), float(alpha)) for r in radii for alpha in angles]


def nontrap_scan(p: MetricProfile, n_angles: int = 36, n_radii: int = 17, T: float = 200.0,
                 R_escape: float = 20.0, dt: float = MAX_DT, threads: int = 1) -> ScanReport:
    """
    Launch a grid of unit-speed geodesics and count how many leave |r| <= R_escape
    within time T. Only the glued profile (a + b = 0) gets a verdict.
    """
    if n_angles < 1 or n_radii < 1:
        raise ConfigError("nontrap_scan: grid sizes must be positive")
    if threads < 0:
        raise ConfigError(f"nontrap_scan: threads must be >= 0, got {threads}")
    if threads == 0:
        threads = os.cpu_count() or 1
    grid = scan_grid(n_angles, n_radii)

    def run(point):
        r, alpha = point
        try:
            return integrate(launch(r, alpha, p), p, T, R_escape, dt), None
        except CuspResError as e:
            return None, f"r={r:.4g} angle={alpha:.4g}: {e}"

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(run, grid))
    else:
        outcomes = [run(point) for point in grid]

    escaped = 0
    worst = 0.0
    failures = []
    for trajectory, failure in outcomes:
        if failure is not None:
            failures.append(failure)
        elif trajectory.escaped:
            escaped += 1
            worst = max(worst, trajectory.escape_time)
    fraction = escaped / len(grid)
    verdict = (fraction == 1.0 and not failures) if p.glued else None
    logger.info("nontrap scan %s: %d/%d escaped, slowest %.4g", p, escaped, len(grid), worst)
    return ScanReport(fraction, worst, len(grid), verdict, failures)
