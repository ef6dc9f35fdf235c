import cmath
import math
from dataclasses import dataclass
from typing import Union

import scipy.special

from cuspres.errors import BranchError, ConvergenceError, DomainError, PoleError

POLE_TOL = 1e-8
HALLEY_MAX_ITER = 50

# Designated value of gamma_ratio_log when 1/Gamma(-nu) vanishes.
ZERO_RATIO = complex(-math.inf, 0.0)


@dataclass(frozen=True)
class BranchedArg:
    """
    A nonzero complex number on the universal cover of C minus the origin.

    The argument is never reduced, so a value reached by continuing past the
    negative real axis keeps its sheet.
    """
    modulus_log: float
    arg: float

    @classmethod
    def of(cls, w: complex, arg: float = None) -> "BranchedArg":
        w = complex(w)
        if w == 0:
            raise DomainError("BranchedArg needs a nonzero value")
        principal = cmath.phase(w)
        if arg is None:
            arg = principal
        elif abs(math.remainder(arg - principal, 2 * math.pi)) > 1e-9:
            raise BranchError(f"arg {arg} is not an argument of {w}")
        return cls(math.log(abs(w)), float(arg))

    @property
    def value(self) -> complex:
        return cmath.exp(complex(self.modulus_log, self.arg))

    @property
    def modulus(self) -> float:
        return math.exp(self.modulus_log)

    def __mul__(self, other: "BranchedArg") -> "BranchedArg":
        return BranchedArg(self.modulus_log + other.modulus_log, self.arg + other.arg)

    def __truediv__(self, other: "BranchedArg") -> "BranchedArg":
        return BranchedArg(self.modulus_log - other.modulus_log, self.arg - other.arg)

    def power(self, nu: complex) -> complex:
        return cmath.exp(nu * complex(self.modulus_log, self.arg))

    def require_arg_within(self, low: float, high: float):
        if not low < self.arg < high:
            raise BranchError(f"arg {self.arg:.6g} outside ({low:.6g}, {high:.6g})")


@dataclass(frozen=True)
class LambertQuery:
    zeta: complex

    def __post_init__(self):
        if not complex(self.zeta).real > 0:
            raise DomainError(f"Lambert query needs Re zeta > 0, got {self.zeta}")


def _near_pole(z: complex) -> bool:
    n = round(z.real)
    return n <= 0 and abs(z - n) <= POLE_TOL


def log_gamma(z: complex) -> complex:
    """
    Branch of log Gamma(z) continuous away from the negative real axis.

    Raises PoleError within 1e-8 of a nonpositive integer.
    """
    z = complex(z)
    if _near_pole(z):
        raise PoleError(f"log_gamma: {z} is within {POLE_TOL} of a pole")
    return complex(scipy.special.loggamma(z))


def gamma_ratio_log(nu: complex) -> complex:
    """
    log(Gamma(nu) / Gamma(-nu)), formed from logs only so that large
    imaginary orders never overflow. Returns ZERO_RATIO when -nu sits on a
    pole of Gamma.
    """
    nu = complex(nu)
    if _near_pole(nu):
        raise PoleError(f"gamma_ratio_log: Gamma({nu}) is at a pole")
    if _near_pole(-nu):
        return ZERO_RATIO
    return log_gamma(nu) - log_gamma(-nu)


def is_zero_ratio(value: complex) -> bool:
    return math.isinf(value.real) and value.real < 0


def solve_nu_log_nu(q: Union[LambertQuery, complex]) -> complex:
    """
    Solve nu_t * log(nu_t) = zeta for the root with Re nu_t > 1.

    With w = log(nu_t) the equation is w * exp(w) = zeta, so w is the
    principal Lambert W and nu_t = zeta / w. Halley's iteration is started
    from log(zeta) - log(log(zeta)).
    """
    if not isinstance(q, LambertQuery):
        q = LambertQuery(complex(q))
    zeta = complex(q.zeta)
    if abs(zeta) < math.e * (1 - 1e-12):
        raise DomainError(f"solve_nu_log_nu needs |zeta| >= e, got {zeta}")

    log_zeta = cmath.log(zeta)
    w = log_zeta - cmath.log(log_zeta)
    for _ in range(HALLEY_MAX_ITER):
        ew = cmath.exp(w)
        f = w * ew - zeta
        w1 = w + 1
        dw = f / (ew * w1 - (w + 2) * f / (2 * w1))
        w -= dw
        if abs(dw) <= 1e-14 * (1 + abs(w)):
            break
    else:
        raise ConvergenceError(f"Lambert W iteration stalled for zeta={zeta}", last=w,
                               iterations=HALLEY_MAX_ITER)

    nu_t = zeta / w
    if zeta.imag == 0:
        nu_t = complex(nu_t.real, 0.0)
    if abs(nu_t * cmath.log(nu_t) - zeta) > 1e-12 * abs(zeta) or not nu_t.real > 1:
        raise ConvergenceError(f"Lambert W root rejected for zeta={zeta}", last=nu_t)
    return nu_t
