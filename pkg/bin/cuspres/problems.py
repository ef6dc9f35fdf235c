import abc
import enum
import logging
import math
from typing import Tuple, Union

from cuspres import asymptotics, bessel
from cuspres.asymptotics import Branch
from cuspres.complexfn import BranchedArg, is_zero_ratio
from cuspres.errors import ConfigError, DomainError

logger = logging.getLogger(__name__)

NEAR_GLUED_TOL = 1e-9
FUNNEL_FLOOR_FACTOR = 25.0
FUNNEL_JUMP_RADIUS = 5.0


class Kind(enum.Enum):
    CUSP_CONE = "cusp-cone"
    FUNNEL_CONE = "funnel-cone"


class ModeProblem(abc.ABC):
    """
    One Fourier mode m of a surface of revolution glued from a cone of slope
    a and a cusp (b > 0) or funnel (b < 0) of rate b.
    """
    kind: Kind
    branch: Branch

    def __init__(self, a: float, b: float, m: float = 1.0):
        self.a = float(a)
        self.b = float(b)
        self.m = float(m)
        if not math.isfinite(self.a) or not math.isfinite(self.b) or not math.isfinite(self.m):
            raise ConfigError("a, b and m must be finite")
        if not self.m > 0:
            raise ConfigError(f"m must be positive, got {m}")
        self._validate()
        if self.a + self.b == 0:
            self.j = 2
        else:
            self.j = 1
            if abs(self.a + self.b) < NEAR_GLUED_TOL * abs(self.b):
                logger.warning("a + b = %g is nearly zero; the j = 1 asymptotics only set in "
                               "at very large k", self.a + self.b)
        self.z = self.m / self.b
        self.n = self.m / self.a

    def __repr__(self):
        return f"{type(self).__name__}(a={self.a:g}, b={self.b:g}, m={self.m:g})"

    @abc.abstractmethod
    def _validate(self):
        pass

    @abc.abstractmethod
    def sides(self, lam: complex) -> Tuple[complex, complex]:
        """Left and right side of the resonance condition at lam."""
        pass

    @abc.abstractmethod
    def phase_terms(self, lam: complex) -> Tuple[complex, complex]:
        """
        (smooth, ratio) with the condition equivalent to
        smooth - log(ratio) in 2 pi i Z.
        """
        pass

    @abc.abstractmethod
    def seed(self, k: int) -> complex:
        pass

    @abc.abstractmethod
    def jump_radius(self, k: int) -> float:
        pass

    @abc.abstractmethod
    def check_region(self, lam: complex):
        pass

    def nu(self, lam: complex) -> complex:
        return asymptotics.nu_of_lambda(lam, self.b, self.branch).nu

    def residual(self, lam: complex) -> complex:
        lhs, rhs = self.sides(lam)
        return lhs - rhs

    def residual_and_scale(self, lam: complex) -> Tuple[complex, float]:
        """lhs - rhs together with |lhs| + |rhs| from a single evaluation."""
        lhs, rhs = self.sides(lam)
        return lhs - rhs, abs(lhs) + abs(rhs)

    def _cone_side(self, quotient: complex, lam: complex) -> complex:
        return lam * quotient / self.m - self.b / (2 * self.m)


class CuspCone(ModeProblem):
    kind = Kind.CUSP_CONE
    branch = Branch.CUSP

    def _validate(self):
        if not self.a < 0 < self.b:
            raise ConfigError(f"cusp-cone needs a < 0 < b, got a={self.a:g}, b={self.b:g}")

    def cone_argument(self, lam: complex) -> BranchedArg:
        # lam / a continued across the positive real lam axis
        return BranchedArg.of(lam) / BranchedArg.of(self.a)

    def sides(self, lam):
        lam = complex(lam)
        if not (lam.real > self.b / 2 or lam.imag > 0):
            raise DomainError(f"cusp residual: lambda={lam} outside the continuation region")
        lhs = bessel.kquot(self.nu(lam), self.z)
        rhs = self._cone_side(bessel.hquot(self.n, self.cone_argument(lam)), lam)
        return lhs, rhs

    def phase_terms(self, lam):
        lam = complex(lam)
        nu = self.nu(lam)
        log_g = bessel.log_g_of_nu(nu, self.z)
        if is_zero_ratio(log_g):
            raise DomainError(f"cusp phase: g vanishes at nu={nu}")
        _, rhs = self.sides(lam)
        rem = bessel.remainders(nu, self.z)
        r2, r4 = rem.second_pair()
        s = rhs * self.z / nu
        ratio = (rem.one_plus_r3 - s * rem.one_plus_r1) / (r4 + s * r2)
        return log_g, ratio

    def seed(self, k):
        return asymptotics.seed_cusp(k, self).lambda0

    def jump_radius(self, k):
        return asymptotics.spacing_cusp(k, self.b)

    def check_region(self, lam):
        if not (lam.real > self.b / 2 and lam.imag < 0):
            raise DomainError(f"cusp root {lam} outside {{Re > b/2, Im < 0}}")


class FunnelCone(ModeProblem):
    kind = Kind.FUNNEL_CONE
    branch = Branch.FUNNEL

    def __init__(self, a: float, b: float, m: float = 1.0, lambda_floor: float = None):
        super().__init__(a, b, m)
        self.lambda_floor = FUNNEL_FLOOR_FACTOR * self.a if lambda_floor is None else float(lambda_floor)

    def _validate(self):
        if not self.b < 0 < self.a:
            raise ConfigError(f"funnel-cone needs b < 0 < a, got a={self.a:g}, b={self.b:g}")

    def sides(self, lam):
        lam = complex(lam)
        lhs = bessel.iquot(self.nu(lam), self.z)
        rhs = self._cone_side(bessel.jquot(self.n, lam / self.a), lam)
        return lhs, rhs

    def phase_terms(self, lam):
        lam = complex(lam)
        x = lam / self.a
        lhs = bessel.iquot(self.nu(lam), self.z)
        # value of J'/J forced by the resonance condition
        t = (self.m * lhs + self.b / 2) / lam
        hs = bessel.hankel_series(self.n, x)
        ratio = ((t * (hs.q - 1j * hs.p) - hs.r - 1j * hs.s)
                 / (t * (hs.q + 1j * hs.p) - hs.r + 1j * hs.s))
        chi = x - (2 * self.n + 1) * math.pi / 4
        return -2j * chi, ratio

    def seed(self, k):
        return asymptotics.seed_funnel(k, self)

    def jump_radius(self, k):
        return FUNNEL_JUMP_RADIUS

    def check_region(self, lam):
        if not (lam.real >= self.lambda_floor and lam.imag < 0):
            raise DomainError(f"funnel root {lam} outside {{Re >= {self.lambda_floor:g}, Im < 0}}")


def get_problem(kind: Union[str, Kind], a: float, b: float, m: float = 1.0) -> ModeProblem:
    try:
        kind = Kind(kind)
    except ValueError:
        raise ConfigError(f"unknown problem kind '{kind}'") from None
    if kind is Kind.CUSP_CONE:
        return CuspCone(a, b, m)
    return FunnelCone(a, b, m)
