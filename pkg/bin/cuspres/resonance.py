"""
Resonance conditions for both geometries, the root polisher and the
per-index enumeration of resonance sequences.
"""
import cmath
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Tuple, Union

from cuspres.errors import (ConfigError, ConvergenceError, CuspResError, DivergenceError,
                            DomainError, DuplicateRootError, RootJumpError)
from cuspres.problems import CuspCone, FunnelCone, ModeProblem

logger = logging.getLogger(__name__)

K_MIN = 10
PHASE_TOL = 1e-8
DUPLICATE_TOL = 1e-6


@dataclass(frozen=True)
class SolverConfig:
    rel_tol: float = 1e-10
    max_iter: int = 50
    fd_step_scale: float = 1e-6
    damping: float = 1.0

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ConfigError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_iter < 1:
            raise ConfigError(f"max_iter must be at least 1, got {self.max_iter}")
        if not self.fd_step_scale > 0:
            raise ConfigError(f"fd_step_scale must be positive, got {self.fd_step_scale}")
        if not 0 < self.damping <= 1:
            raise ConfigError(f"damping must lie in (0, 1], got {self.damping}")


@dataclass(frozen=True)
class PolishResult:
    lam: complex
    residual: float
    iterations: int


@dataclass(frozen=True)
class Resonance:
    k: int
    lam: complex
    residual: float
    iterations: int
    seed: complex
    phase_index: int = 0


@dataclass(frozen=True)
class Failure:
    k: int
    error: str
    reason: str


@dataclass
class Enumeration:
    resonances: List[Resonance] = field(default_factory=list)
    failures: List[Failure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def residual_cusp(lam: complex, prob: ModeProblem) -> complex:
    """K'/K(nu(lam), m/b) - [lam H2'/H2(m/a, lam/a) / m - b/(2m)]."""
    if not isinstance(prob, CuspCone):
        raise DomainError(f"residual_cusp needs a cusp-cone problem, got {prob!r}")
    return prob.residual(lam)


def residual_funnel(lam: complex, prob: ModeProblem) -> complex:
    """I'/I(nu(lam), m/b) - [lam J'/J(m/a, lam/a) / m - b/(2m)]."""
    if not isinstance(prob, FunnelCone):
        raise DomainError(f"residual_funnel needs a funnel-cone problem, got {prob!r}")
    return prob.residual(lam)


def polish(F: Callable[[complex], Union[complex, Tuple[complex, float]]], seed: complex,
           cfg: SolverConfig, scaled: bool = False, radius: float = math.inf) -> PolishResult:
    """
    Damped Newton iteration with a central-difference derivative.

    With scaled=True, F returns (value, scale) from one evaluation and the
    iteration converges when |value| / scale < cfg.rel_tol; otherwise the
    test is absolute. Leaving the disk of the given radius around the seed
    raises DivergenceError.
    """
    def value(lam):
        return F(lam)[0] if scaled else F(lam)

    seed = complex(seed)
    lam = seed
    for it in range(cfg.max_iter + 1):
        if scaled:
            f, norm = F(lam)
        else:
            f, norm = F(lam), 1.0
        rel = abs(f) / norm if norm > 0 else abs(f)
        logger.debug("newton %d: lambda=%s rel=%.3g", it, lam, rel)
        if rel < cfg.rel_tol:
            return PolishResult(lam, rel, it)
        if it == cfg.max_iter:
            break
        h = cfg.fd_step_scale * (1 + abs(lam))
        d = (value(lam + h) - value(lam - h)) / (2 * h)
        if d == 0 or not cmath.isfinite(d):
            raise ConvergenceError(f"polish: unusable derivative at {lam}", last=lam, iterations=it)
        lam = lam - cfg.damping * f / d
        if abs(lam - seed) > radius:
            raise DivergenceError(f"polish: iterate {lam} left the disk |lam - {seed}| <= {radius:.6g}",
                                  last=lam, iterations=it + 1)
    raise ConvergenceError(f"polish: no convergence in {cfg.max_iter} iterations from {seed}",
                           last=lam, iterations=cfg.max_iter)


def _unwrap(value: complex, reference: float) -> complex:
    turns = round((reference - value.imag) / (2 * math.pi))
    return value + 2j * math.pi * turns


def lock_phase(prob: ModeProblem, k: int, seed: complex, cfg: SolverConfig):
    """
    Solve the logarithmic form of the resonance condition, smooth - log ratio
    = 2 pi i n, with n fixed by the seed. Returns (lambda, n).
    """
    seed = complex(seed)
    _, ratio = prob.phase_terms(seed)
    reference = cmath.log(ratio).imag

    def phase(lam):
        smooth, rt = prob.phase_terms(lam)
        return smooth - _unwrap(cmath.log(rt), reference)

    n = round(phase(seed).imag / (2 * math.pi))
    target = 2j * math.pi * n
    phase_cfg = replace(cfg, rel_tol=PHASE_TOL)
    radius = 2 * prob.jump_radius(k)
    try:
        lam = polish(lambda lam: phase(lam) - target, seed, phase_cfg, radius=radius).lam
    except DivergenceError:
        raise
    except ConvergenceError as e:
        if e.last is None:
            raise
        logger.debug("k=%d: phase lock stalled, continuing from %s", k, e.last)
        lam = e.last
    return lam, n


def solve_index(prob: ModeProblem, k: int, cfg: SolverConfig) -> Resonance:
    seed = prob.seed(k)
    locked, n = lock_phase(prob, k, seed, cfg)
    radius = prob.jump_radius(k)
    core = polish(prob.residual_and_scale, locked, cfg, scaled=True, radius=2 * radius)
    if abs(core.lam - seed) >= radius:
        raise RootJumpError(f"k={k}: root {core.lam} is {abs(core.lam - seed):.4g} from the seed "
                            f"{seed}, beyond {radius:.4g}")
    prob.check_region(core.lam)
    logger.debug("k=%d: lambda=%s residual=%.3g iterations=%d", k, core.lam, core.residual,
                 core.iterations)
    return Resonance(k, core.lam, core.residual, core.iterations, seed, n)


def _attempt(prob, cfg, k):
    try:
        return solve_index(prob, k, cfg), None
    except CuspResError as e:
        logger.debug("k=%d failed: %s", k, e)
        return None, Failure(k, type(e).__name__, str(e))


def enumerate(prob: ModeProblem, k_min: int, k_max: int, step: int = 1,
              cfg: Optional[SolverConfig] = None, threads: int = 1) -> Enumeration:
    """
    Solve every index k_min, k_min + step, .. <= k_max independently.

    Per-index failures go to the failure manifest; the result is the same
    for any thread count.
    """
    cfg = cfg or SolverConfig()
    if k_min < K_MIN:
        raise ConfigError(f"k_min must be at least {K_MIN}, got {k_min}")
    if step < 1:
        raise ConfigError(f"step must be at least 1, got {step}")
    if k_max < k_min:
        raise ConfigError(f"empty index range {k_min}..{k_max}")
    if threads == 0:
        threads = os.cpu_count() or 1
    ks = list(range(k_min, k_max + 1, step))
    logger.info("solving %d indices of %r on %d thread(s)", len(ks), prob, threads)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(lambda k: _attempt(prob, cfg, k), ks))
    else:
        outcomes = [_attempt(prob, cfg, k) for k in ks]

    result = Enumeration()
    for resonance, failure in outcomes:
        if failure is not None:
            result.failures.append(failure)
            continue
        previous = result.resonances[-1] if result.resonances else None
        if previous is not None:
            if abs(resonance.lam - previous.lam) < DUPLICATE_TOL * (1 + abs(resonance.lam)):
                err = DuplicateRootError(f"k={resonance.k} converged to the root of k={previous.k}")
                result.failures.append(Failure(resonance.k, type(err).__name__, str(err)))
                continue
            if not resonance.lam.real > previous.lam.real:
                result.failures.append(Failure(resonance.k, "OrderError",
                                               f"Re lambda at k={resonance.k} does not exceed "
                                               f"that at k={previous.k}"))
                continue
        result.resonances.append(resonance)
    if result.failures:
        logger.warning("%d of %d indices failed", len(result.failures), len(ks))
    return result
