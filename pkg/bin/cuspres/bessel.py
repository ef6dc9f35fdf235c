"""
Logarithmic-derivative quotients of Bessel functions.

Only the quotients K'/K, I'/I, H2'/H2 and J'/J are ever formed. For a large
complex order the values of K and I themselves over- or underflow, but the
quotients stay of size |nu|/z.
"""
import cmath
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import scipy.special

from cuspres.complexfn import BranchedArg, POLE_TOL, gamma_ratio_log, is_zero_ratio
from cuspres.errors import DomainError, NearZeroDenominatorError, PoleError, TruncationError

SERIES_REL_TOL = 1e-16
SERIES_MAX_TERMS = 300
SMALL_ARGUMENT_LIMIT = 20.0
HANKEL_FLOOR = 10.0
HANKEL_MAX_TERMS = 200
HANKEL_ACCURACY = 1e-8
JQUOT_IMAG_LIMIT = 50.0
DENOMINATOR_TOL = 1e-14

# Fault-injection hook for the self-check suite; added to the first
# derivative-series coefficient. Zero in normal operation.
HANKEL_COEFFICIENT_SHIFT = 0.0


@dataclass(frozen=True)
class BesselRemainders:
    """1+R2 and 1+R4 are None where (1-nu)_k vanishes (nu a positive integer)."""
    one_plus_r1: complex
    one_plus_r2: Optional[complex]
    one_plus_r3: complex
    one_plus_r4: Optional[complex]
    terms_used: int
    truncation_estimate: float

    def second_pair(self) -> Tuple[complex, complex]:
        if self.one_plus_r2 is None:
            raise PoleError("remainders: 1+R2 and 1+R4 are undefined at a positive integer order")
        return self.one_plus_r2, self.one_plus_r4


@dataclass(frozen=True)
class HankelSeries:
    p: complex
    q: complex
    r: complex
    s: complex
    terms_used: int
    smallest_term: float


def remainders(nu: complex, z: float) -> BesselRemainders:
    """
    Power-series quotients 1+R1 .. 1+R4 at order nu and argument z.

    1+R1 = sum (z^2/4)^k / (k! (nu+1)_k), 1+R2 the same with (1-nu)_k, and
    1+R3, 1+R4 carry the extra factors (nu+2k)/nu and (nu-2k)/nu. No Gamma
    value is ever formed. At a positive integer order the (1-nu)_k pair is
    left undefined; 1+R1 and 1+R3 are still returned.
    """
    nu = complex(nu)
    z = float(z)
    if z == 0:
        raise DomainError("remainders: z must be nonzero")
    if abs(z) > SMALL_ARGUMENT_LIMIT:
        raise DomainError(f"remainders: |z| = {abs(z)} exceeds {SMALL_ARGUMENT_LIMIT}")
    if abs(nu) <= POLE_TOL:
        raise PoleError("remainders: nu = 0")

    u = z * z / 4
    t1 = t2 = complex(1.0)
    s1 = s2 = s3 = s4 = complex(1.0)
    second = True
    last = 0.0
    for k in range(1, SERIES_MAX_TERMS + 1):
        if abs(nu + k) <= POLE_TOL:
            raise PoleError(f"remainders: Pochhammer factor (nu+1)_k vanishes at k={k} for nu={nu}")
        if second and abs(k - nu) <= POLE_TOL:
            second = False
        t1 *= u / (k * (nu + k))
        d3 = t1 * (nu + 2 * k) / nu
        s1 += t1
        s3 += d3
        pairs = [(t1, s1), (d3, s3)]
        if second:
            t2 *= u / (k * (k - nu))
            d4 = t2 * (nu - 2 * k) / nu
            s2 += t2
            s4 += d4
            pairs += [(t2, s2), (d4, s4)]
        last = max(abs(t) / max(abs(acc), 1e-300) for t, acc in pairs)
        if last < SERIES_REL_TOL:
            if not second:
                return BesselRemainders(s1, None, s3, None, k, last)
            return BesselRemainders(s1, s2, s3, s4, k, last)
    raise TruncationError(f"remainders: no convergence in {SERIES_MAX_TERMS} terms (nu={nu}, z={z})")


def log_g_of_nu(nu: complex, z: float) -> complex:
    """log g(nu), or ZERO_RATIO when 1/Gamma(-nu) vanishes."""
    ratio = gamma_ratio_log(nu)
    if is_zero_ratio(ratio):
        return ratio
    return -2 * nu * math.log(z / 2) + ratio


def g_of_nu(nu: complex, z: float) -> complex:
    """(z/2)^(-2 nu) Gamma(nu) / Gamma(-nu), evaluated in log space."""
    if not z > 0:
        raise DomainError(f"g_of_nu: z must be positive, got {z}")
    lg = log_g_of_nu(complex(nu), z)
    if is_zero_ratio(lg):
        return 0j
    try:
        return cmath.exp(lg)
    except OverflowError:
        raise DomainError(f"g_of_nu: |g| overflows at nu={nu}") from None


def kquot(nu: complex, z: float) -> complex:
    """K'_nu(z) / K_nu(z) from the exact remainder identity."""
    nu = complex(nu)
    if not z > 0:
        raise DomainError(f"kquot: z must be positive, got {z}")
    rem = remainders(nu, z)
    lg = log_g_of_nu(nu, z)
    if is_zero_ratio(lg):
        # g (1+R2) is a 0 * inf limit at integer order
        raise PoleError(f"kquot: the remainder identity degenerates at integer order nu={nu}")
    if lg.real > 0:
        r2, r4 = rem.second_pair()
        # divide through by g so that a huge g never appears
        ginv = cmath.exp(-lg)
        num = rem.one_plus_r3 * ginv - r4
        den = rem.one_plus_r1 * ginv + r2
        scale = abs(rem.one_plus_r1 * ginv) + abs(r2)
    else:
        r2, r4 = rem.second_pair()
        g = cmath.exp(lg)
        num = rem.one_plus_r3 - g * r4
        den = rem.one_plus_r1 + g * r2
        scale = abs(rem.one_plus_r1) + abs(g * r2)
    if abs(den) <= DENOMINATOR_TOL * scale:
        raise NearZeroDenominatorError(f"kquot: K_nu(z) vanishes near nu={nu}, z={z}")
    return nu / z * num / den


def iquot(nu: complex, z: float) -> complex:
    """I'_nu(z) / I_nu(z); z may be negative, the series only see z^2."""
    nu = complex(nu)
    rem = remainders(nu, z)
    if abs(rem.one_plus_r1) <= DENOMINATOR_TOL:
        raise NearZeroDenominatorError(f"iquot: I_nu(z) vanishes near nu={nu}, z={z}")
    return nu / z * rem.one_plus_r3 / rem.one_plus_r1


def _terminates(n: float) -> bool:
    twice = 2 * n
    return abs(twice - round(twice)) < 1e-12 and round(twice) % 2 == 1


def _as_branched(x: Union[BranchedArg, complex]) -> BranchedArg:
    return x if isinstance(x, BranchedArg) else BranchedArg.of(x)


def hankel_coefficients(n: float, count: int):
    """
    Yield (k, a_k, b_k) for k = 1 .. count, where a_k are the coefficients
    of P and Q and b_k those of R and S:

        a_k = (mu - 1)(mu - 9)...(mu - (2k-1)^2) / (k! 8^k),
        b_k = a_{k-1} (mu + 4k^2 - 1) / (8k),   mu = 4 n^2.
    """
    mu = 4 * n * n
    a = 1.0
    for k in range(1, count + 1):
        b = a * (mu + 4 * k * k - 1) / (8 * k)
        if k == 1:
            b += HANKEL_COEFFICIENT_SHIFT
        a = a * (mu - (2 * k - 1) ** 2) / (8 * k)
        yield k, a, b


def hankel_series(n: float, x: Union[BranchedArg, complex]) -> HankelSeries:
    """
    P, Q, R, S of Hankel's expansion, cut at the smallest term.

    Valid for arg x in (-2 pi, pi) on the covering space and |x| >= 10; the
    floor is waived for half-odd-integer n, where the series terminate.
    """
    bx = _as_branched(x)
    bx.require_arg_within(-2 * math.pi, math.pi)
    terminating = _terminates(n)
    if bx.modulus < HANKEL_FLOOR and not terminating:
        raise DomainError(f"hankel_series: |x| = {bx.modulus:.6g} below {HANKEL_FLOOR}")
    xv = bx.value

    p = r = complex(1.0)
    q = s = 0j
    inv_power = complex(1.0)
    previous = math.inf
    smallest = math.inf
    used = 0
    for k, a_k, b_k in hankel_coefficients(n, HANKEL_MAX_TERMS):
        inv_power /= xv
        ta = a_k * inv_power
        tb = b_k * inv_power
        magnitude = max(abs(ta), abs(tb))
        if magnitude == 0:
            smallest = 0.0
            break
        if magnitude > previous:
            break
        sign = -1 if (k // 2) % 2 else 1
        if k % 2 == 0:
            p += sign * ta
            r += sign * tb
        else:
            q += sign * ta
            s += sign * tb
        previous = smallest = magnitude
        used = k
        if magnitude < 1e-17:
            break
    if smallest > HANKEL_ACCURACY:
        raise TruncationError(f"hankel_series: smallest term {smallest:.3g} at n={n}, x={xv}")
    return HankelSeries(p, q, r, s, used, smallest)


def hquot(n: float, x: Union[BranchedArg, complex]) -> complex:
    """
    H2'_n(x) / H2_n(x).

    Below the asymptotic floor the principal sheet is evaluated directly with
    scipy; the continued sheet is reachable only through the series, which
    are single-valued in x.
    """
    bx = _as_branched(x)
    bx.require_arg_within(-2 * math.pi, math.pi)
    if bx.modulus < HANKEL_FLOOR and not _terminates(n):
        if not -math.pi < bx.arg <= math.pi:
            raise DomainError(f"hquot: |x| = {bx.modulus:.6g} off the principal sheet")
        xv = bx.value
        h = complex(scipy.special.hankel2(n, xv))
        if h == 0 or not cmath.isfinite(h):
            raise NearZeroDenominatorError(f"hquot: H2 unusable at x={xv}")
        return complex(scipy.special.h2vp(n, xv)) / h
    hs = hankel_series(n, bx)
    return (-1j * hs.r - hs.s) / (hs.p - 1j * hs.q)


def jquot(n: float, x: complex) -> complex:
    """
    J'_n(x) / J_n(x) on the principal sheet.

    With chi = x - (2n+1) pi / 4 the quotient is rewritten through
    w = exp(-2i chi) (or 1/w when Im chi > 0), so sin and cos of a large
    complex chi are never formed.
    """
    x = complex(x)
    if abs(x.imag) > JQUOT_IMAG_LIMIT:
        raise DomainError(f"jquot: |Im x| = {abs(x.imag):.6g} exceeds {JQUOT_IMAG_LIMIT}")
    if x.imag == 0 and x.real <= 0:
        raise DomainError(f"jquot: x = {x} not on the principal sheet")
    if abs(x) < HANKEL_FLOOR and not _terminates(n):
        j = complex(scipy.special.jv(n, x))
        if abs(j) <= DENOMINATOR_TOL:
            raise NearZeroDenominatorError(f"jquot: J_n vanishes near x={x}")
        return complex(scipy.special.jvp(n, x)) / j

    hs = hankel_series(n, x)
    chi = x - (2 * n + 1) * math.pi / 4
    if chi.imag <= 0:
        w = cmath.exp(-2j * chi)
        num = -hs.r * (1 - w) - 1j * hs.s * (1 + w)
        den = 1j * hs.p * (1 + w) - hs.q * (1 - w)
        scale = abs(hs.p) * (1 + abs(w)) + abs(hs.q) * (1 + abs(w))
    else:
        v = cmath.exp(2j * chi)
        num = -hs.r * (v - 1) - 1j * hs.s * (v + 1)
        den = 1j * hs.p * (v + 1) - hs.q * (v - 1)
        scale = abs(hs.p) * (1 + abs(v)) + abs(hs.q) * (1 + abs(v))
    if abs(den) <= DENOMINATOR_TOL * scale:
        raise NearZeroDenominatorError(f"jquot: J_n vanishes near x={x}")
    return num / den
