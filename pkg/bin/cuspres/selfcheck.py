"""
Registry of numerical invariants, run at reduced grid sizes by
`runCuspRes selfcheck`.
"""
import cmath
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from cuspres import bessel, geodesics
from cuspres.complexfn import BranchedArg, LambertQuery, solve_nu_log_nu
from cuspres.errors import ConfigError, CuspResError
from cuspres.problems import CuspCone, FunnelCone
from cuspres.resonance import SolverConfig, enumerate as enumerate_resonances, residual_cusp, solve_index

logger = logging.getLogger(__name__)

RICCATI_STEP = 1e-4
RICCATI_TOL = 1e-6
FIGURE_SETS = ((-1.0, 1.0), (-2.0, 1.0), (-1.0, 2.0), (-2.0, 2.0))


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class Check:
    name: str
    description: str
    run: Callable[[], Tuple[bool, str]]


def _riccati_relative(q, dq, terms: Sequence[complex]) -> float:
    residual = dq + q * q + sum(terms)
    return abs(residual) / (abs(dq) + abs(q * q) + sum(abs(t) for t in terms))


def _richardson(f: Callable[[float], complex], h: float) -> complex:
    """f'(0) from central differences at h and h/2, extrapolated to O(h^4)."""
    wide = (f(h) - f(-h)) / (2 * h)
    narrow = (f(h / 2) - f(-h / 2)) / h
    return (4 * narrow - wide) / 3


def kquot_riccati_residual(nu: complex, z: float, h: float = RICCATI_STEP) -> float:
    """Relative residual of q' + q^2 + q/z - (1 + nu^2/z^2) for q = K'/K."""
    q = bessel.kquot(nu, z)
    # K'/K varies on the scale z/|nu|
    h *= min(1.0, z / abs(nu))
    dq = _richardson(lambda t: bessel.kquot(nu, z + t), h)
    return _riccati_relative(q, dq, (q / z, -(1 + nu * nu / (z * z))))


def hquot_riccati_residual(n: float, x: BranchedArg, h: float = RICCATI_STEP) -> float:
    """Relative residual of q' + q^2 + q/x + (1 - n^2/x^2) for q = H2'/H2, stepping along the ray."""
    xv = x.value
    q = bessel.hquot(n, x)
    # t is the log-modulus offset, so dq/dx = (dq/dt) / x
    dq = _richardson(lambda t: bessel.hquot(n, BranchedArg(x.modulus_log + t, x.arg)), h) / xv
    return _riccati_relative(q, dq, (q / xv, 1 - n * n / (xv * xv)))


def jquot_riccati_residual(n: float, x: complex, h: float = RICCATI_STEP) -> float:
    q = bessel.jquot(n, x)
    dq = _richardson(lambda t: bessel.jquot(n, x + t), h)
    return _riccati_relative(q, dq, (q / x, 1 - n * n / (x * x)))


def _worst(values) -> float:
    return max(values)


def check_kquot_riccati():
    worst = _worst(kquot_riccati_residual(nu, z)
                   for nu in (1 + 1j, 10 - 20j, 0.5 - 100j) for z in (0.5, 1.0, 2.0))
    return worst < RICCATI_TOL, f"max relative residual {worst:.3g}"


def check_hquot_riccati():
    worst = _worst(hquot_riccati_residual(n, BranchedArg(math.log(r), arg))
                   for r in (30.0, 100.0, 300.0)
                   for arg in (0.0, -math.pi / 2, -5 * math.pi / 4)
                   for n in (1.0, 2.0))
    return worst < RICCATI_TOL, f"max relative residual {worst:.3g}"


def check_jquot_riccati():
    worst = _worst(jquot_riccati_residual(1.0, complex(re, im))
                   for re in (20.0, 100.0) for im in (0.0, -3.0))
    return worst < RICCATI_TOL, f"max relative residual {worst:.3g}"


def check_lambert():
    rng = np.random.default_rng(0)
    worst = 0.0
    for zeta in rng.uniform(math.e, 1e4, 20):
        nu_t = solve_nu_log_nu(LambertQuery(complex(zeta)))
        worst = max(worst, abs(nu_t * cmath.log(nu_t) - zeta) / zeta)
    return worst < 1e-12, f"max relative residual {worst:.3g}"


def check_upper_half_plane():
    smallest = math.inf
    for a, b in FIGURE_SETS:
        prob = CuspCone(a, b)
        for re in np.linspace(1.0, 100.0, 5):
            for im in np.linspace(0.5, 10.0, 5):
                smallest = min(smallest, abs(residual_cusp(complex(re, im), prob)))
    return smallest > 1e-3, f"min |F| {smallest:.3g}"


def check_cusp_root():
    prob = CuspCone(-1.0, 1.0)
    res = solve_index(prob, 100, SolverConfig())
    ok = res.residual < 1e-10 and abs(res.lam - res.seed) < 0.5
    return ok, f"lambda_100 = {res.lam:.10g}, residual {res.residual:.3g}"


def check_funnel_root():
    prob = FunnelCone(1.0, -1.0)
    res = solve_index(prob, 50, SolverConfig())
    ok = res.residual < 1e-10 and abs(res.lam - res.seed) < prob.jump_radius(50)
    return ok, f"lambda_50 = {res.lam:.10g}, |lambda - seed| {abs(res.lam - res.seed):.3g}"


def check_imaginary_limit():
    prob = CuspCone(-1.0, 1.0)
    run = enumerate_resonances(prob, 100, 1000, 900)
    if not run.ok or len(run.resonances) != 2:
        return False, f"{len(run.failures)} failed indices"
    limit = -prob.b * prob.j / 2
    near, far = (abs(res.lam.imag - limit) for res in run.resonances)
    return far < near and far < 0.35 * prob.b, f"|Im + bj/2| {near:.3g} at k=100, {far:.3g} at k=1000"


def check_geodesic_conservation():
    p = geodesics.MetricProfile(-1.0, 1.0)
    traj = geodesics.integrate(geodesics.launch(-1.0, 1.0, p), p, T=10.0, dt=1e-3)
    return traj.speed_drift_rate < 1e-8, f"speed drift rate {traj.speed_drift_rate:.3g}"


def check_nontrapping():
    p = geodesics.MetricProfile(-1.0, 1.0)
    report = geodesics.nontrap_scan(p, n_angles=6, n_radii=5, T=100.0)
    return bool(report.verdict), f"escaped {report.fraction_escaped:.3f}, slowest {report.worst_escape_time:.4g}"


CHECKS: List[Check] = [
    Check("kquot-riccati", "K'/K satisfies the modified Bessel Riccati equation", check_kquot_riccati),
    Check("hquot-riccati", "H2'/H2 satisfies the Bessel Riccati equation, continued sheet included",
          check_hquot_riccati),
    Check("jquot-riccati", "J'/J satisfies the Bessel Riccati equation", check_jquot_riccati),
    Check("lambert-residual", "nu log nu = zeta solved to relative 1e-12", check_lambert),
    Check("upper-half-plane", "cusp residual bounded away from zero for Im lambda > 0",
          check_upper_half_plane),
    Check("cusp-root", "k = 100 cusp root converges next to its seed", check_cusp_root),
    Check("funnel-root", "k = 50 funnel root converges next to its seed", check_funnel_root),
    Check("imaginary-limit", "Im lambda_k approaches -bj/2", check_imaginary_limit),
    Check("geodesic-conservation", "unit speed conserved along a geodesic", check_geodesic_conservation),
    Check("nontrapping", "all geodesics of the glued profile escape", check_nontrapping),
]


def check_names() -> List[str]:
    return [check.name for check in CHECKS]


def run_checks(names: Optional[Sequence[str]] = None) -> List[CheckResult]:
    if names is not None:
        unknown = [name for name in names if name not in check_names()]
        if unknown:
            raise ConfigError(f"unknown check(s): {', '.join(unknown)}")
    selected = [check for check in CHECKS if names is None or check.name in names]
    results = []
    for check in selected:
        try:
            passed, detail = check.run()
        except CuspResError as e:
            passed, detail = False, f"{type(e).__name__}: {e}"
        logger.debug("%s: %s (%s)", check.name, passed, detail)
        results.append(CheckResult(check.name, passed, detail))
    return results
