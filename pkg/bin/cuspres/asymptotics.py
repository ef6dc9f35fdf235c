"""
Spectral parameter, Lambert-W seeds and the leading-order laws the
resonances are compared against.
"""
import bisect
import cmath
import enum
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import scipy.integrate

from cuspres.complexfn import LambertQuery, solve_nu_log_nu
from cuspres.errors import DomainError

BRANCH_POINT_TOL = 1e-8
QUAD_REL_TOL = 1e-8


class Branch(enum.Enum):
    CUSP = "cusp"
    FUNNEL = "funnel"


@dataclass(frozen=True)
class NuValue:
    nu: complex
    branch: Branch


@dataclass(frozen=True)
class SeedResult:
    lambda0: complex
    nu_tilde: complex
    zeta: complex


def nu_of_lambda(lam: complex, b: float, branch: Branch) -> NuValue:
    """
    nu = sqrt(1/4 - lam^2 / b^2) on the branch each geometry needs.

    Both geometries use nu = -i sqrt(lam^2/b^2 - 1/4), which depends on b only
    through b^2. Cusp: Im nu < 0 for Re lam > |b|/2. Funnel: Re nu > 0 for
    Im lam > 0 and Re lam > 0; the left quarter plane is never searched.
    """
    lam = complex(lam)
    if min(abs(lam - b / 2), abs(lam + b / 2)) <= BRANCH_POINT_TOL:
        raise DomainError(f"nu_of_lambda: lambda={lam} is a branch point +-b/2")
    root = cmath.sqrt(lam * lam / (b * b) - 0.25)
    return NuValue(-1j * root, branch)


def seed_cusp(k: int, prob) -> SeedResult:
    """
    Leading-order cusp resonance: zeta = 2 pi k / (e z), nu_t log nu_t = zeta,
    lambda0 = (b e z nu_t - i b j) / 2. The bounded remainder of the exact
    equation is dropped; polishing absorbs it.
    """
    if k < 10:
        raise DomainError(f"seed_cusp: k={k} below the seed floor 10")
    if not prob.z > 0:
        raise DomainError("seed_cusp: needs z = m/b > 0")
    zeta = complex(2 * math.pi * k / (math.e * prob.z))
    nu_t = solve_nu_log_nu(LambertQuery(zeta))
    lambda0 = complex(prob.b * math.e * prob.z * nu_t.real / 2, -prob.b * prob.j / 2)
    return SeedResult(lambda0, nu_t, zeta)


def seed_funnel(k: int, prob) -> complex:
    """lambda_k ~ pi a k - (i j a / 2) log k for the funnel geometry."""
    if k < 10:
        raise DomainError(f"seed_funnel: k={k} below the seed floor 10")
    return complex(math.pi * prob.a * k, -prob.j * prob.a * math.log(k) / 2)


def predicted_cusp(k: int, prob) -> Tuple[float, float]:
    if k < 3:
        raise DomainError("predicted_cusp: needs log k > 1")
    return math.pi * prob.b * k / math.log(k), -prob.b * prob.j / 2


def spacing_cusp(k: int, b: float) -> float:
    return math.pi * b / math.log(k)


def spacing_funnel(a: float) -> float:
    return math.pi * a


def weyl_count(resonances: Sequence, lam: float) -> int:
    """Number of entries with Re lambda_k <= lam; entries sorted by Re lambda."""
    return bisect.bisect_right([res.lam.real for res in resonances], lam)


def weyl_model(lam: float, b: float) -> float:
    if not lam > math.e:
        raise DomainError(f"weyl_model: lambda={lam} must exceed e")
    return lam * math.log(lam) / (math.pi * b)


def phase_volume(lam: float, m: float, b: float) -> float:
    """
    (1 / 2 pi) Vol{(rho, r): r >= 0, rho^2 + m^2 e^{2br} <= lam^2}
    = (1 / pi) int_0^{r*} sqrt(lam^2 - m^2 e^{2br}) dr, r* = log(lam/m) / b.
    """
    if not (m > 0 and b > 0 and lam > 0):
        raise DomainError("phase_volume: lambda, m and b must be positive")
    if lam < m:
        raise DomainError(f"phase_volume: empty region for lambda={lam} < m={m}")
    if lam == m:
        return 0.0
    r_star = math.log(lam / m) / b

    def section(r):
        return math.sqrt(max(lam * lam - m * m * math.exp(2 * b * r), 0.0))

    value, _ = scipy.integrate.quad(section, 0.0, r_star, epsrel=QUAD_REL_TOL, limit=200)
    return value / math.pi


def nu_tilde_imag_bound(resonances: Sequence, prob) -> float:
    """max_k |Im nu_t_k| log|nu_t_k| with nu_t = i (2 nu + j) / (e z)."""
    worst = 0.0
    for res in resonances:
        nu = nu_of_lambda(res.lam, prob.b, Branch.CUSP).nu
        nu_t = 1j * (2 * nu + prob.j) / (math.e * prob.z)
        worst = max(worst, abs(nu_t.imag) * math.log(abs(nu_t)))
    return worst
