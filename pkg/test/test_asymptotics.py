import math

import numpy as np
import pytest

from utils import *

from cuspres import asymptotics
from cuspres.asymptotics import Branch, nu_of_lambda, phase_volume, predicted_cusp, seed_cusp, seed_funnel
from cuspres.errors import DomainError
from cuspres.problems import CuspCone, FunnelCone
from cuspres.resonance import Resonance


def fake_run(values):
    return [Resonance(k, complex(re, -1.0), 0.0, 0, complex(re, -1.0)) for k, re in enumerate(values, 1)]


@pytest.mark.parametrize('branch', list(Branch))
def test_nu_at_zero(branch):
    assert nu_of_lambda(0, 1, branch).nu == pytest.approx(0.5)


@pytest.mark.parametrize('lam', [0, 3 + 1j, 40 - 2j, 0.2j])
def test_nu_funnel_branch_ignores_sign_of_b(lam):
    assert nu_of_lambda(lam, 1, Branch.FUNNEL).nu == nu_of_lambda(lam, -1, Branch.FUNNEL).nu
    assert nu_of_lambda(lam, -1, Branch.FUNNEL).nu == nu_of_lambda(lam, -1, Branch.CUSP).nu


def test_nu_branch_point():
    with pytest.raises(DomainError):
        nu_of_lambda(0.5, 1, Branch.CUSP)
    with pytest.raises(DomainError):
        nu_of_lambda(-1.0, -2, Branch.FUNNEL)


def test_nu_cusp_value():
    assert nu_of_lambda(10, 1, Branch.CUSP).nu == pytest.approx(-1j * math.sqrt(99.75))


def test_nu_branches_on_grid():
    for re in np.linspace(1, 500, 30):
        for im in np.linspace(-5, 5, 30):
            lam = complex(re, im)
            for b, branch in ((1.0, Branch.CUSP), (2.0, Branch.CUSP), (-1.0, Branch.FUNNEL)):
                if abs(abs(lam) - abs(b) / 2) < 1e-6:
                    continue
                nu = nu_of_lambda(lam, b, branch).nu
                assert abs(nu * nu - (0.25 - lam * lam / (b * b))) <= 1e-14 * max(1.0, abs(lam / b) ** 2)
                if branch is Branch.CUSP and re > b / 2:
                    assert nu.imag < 0
                if branch is Branch.FUNNEL and im > 0:
                    assert nu.real > 0


def test_seed_cusp_k100():
    prob = CuspCone(-1, 1, 1)
    seed = seed_cusp(100, prob)
    assert seed.zeta == pytest.approx(200 * math.pi / math.e)
    assert seed.nu_tilde.real == pytest.approx(57.13, abs=0.01)
    assert seed.lambda0.real == pytest.approx(77.6, abs=0.1)
    assert seed.lambda0.imag == -1.0


@pytest.mark.parametrize('a, b', [(-1, 1), (-2, 1), (-1, 2), (-2, 2)])
@pytest.mark.parametrize('k', [10, 137, 1000])
def test_seed_cusp_imaginary_part_is_exact(a, b, k):
    prob = CuspCone(a, b)
    assert seed_cusp(k, prob).lambda0.imag == -b * prob.j / 2


def test_seed_cusp_approaches_leading_law():
    prob = CuspCone(-1, 1)
    ratios = [seed_cusp(k, prob).lambda0.real / predicted_cusp(k, prob)[0] for k in (10 ** 2, 10 ** 4, 10 ** 6)]
    assert abs(ratios[2] - 1) < abs(ratios[0] - 1)


def test_seed_cusp_needs_k_floor():
    with pytest.raises(DomainError):
        seed_cusp(9, CuspCone(-1, 1))


@pytest.mark.parametrize('a, b, expected', [
    (1, -1, 314.159 - 4.605j),
    (1, -2, 314.159 - 2.303j),
])
def test_seed_funnel_values(a, b, expected):
    assert seed_funnel(100, FunnelCone(a, b)) == pytest.approx(expected, abs=1e-3)


def test_seed_funnel_doubling():
    prob = FunnelCone(1, -1)
    diff = seed_funnel(200, prob) - seed_funnel(100, prob)
    assert diff == pytest.approx(100 * math.pi - 1j * prob.j * math.log(2) / 2)


def test_predicted_cusp():
    assert predicted_cusp(1000, CuspCone(-1, 1))[0] == pytest.approx(454.79, abs=0.01)
    re, im = predicted_cusp(100, CuspCone(-1, 2))
    assert re == pytest.approx(136.44, abs=0.01)
    assert im == -1.0
    assert predicted_cusp(100, CuspCone(-1, 1))[1] == -1.0
    assert predicted_cusp(100, CuspCone(-2, 1))[1] == -0.5


def test_spacings():
    assert asymptotics.spacing_cusp(100, 1) == pytest.approx(math.pi / math.log(100))
    assert asymptotics.spacing_funnel(2) == pytest.approx(2 * math.pi)


def test_weyl_count():
    run = fake_run([10.0, 20.0, 30.0, 40.0])
    assert asymptotics.weyl_count([], 100) == 0
    assert asymptotics.weyl_count(run, 5) == 0
    assert asymptotics.weyl_count(run, 30) == 3
    assert asymptotics.weyl_count(run, 1e9) == 4


def test_weyl_model():
    assert asymptotics.weyl_model(math.e + 1e-12, 1) == pytest.approx(math.e / math.pi)
    assert asymptotics.weyl_model(1000, 1) == pytest.approx(2198.8, abs=0.5)
    assert asymptotics.weyl_model(1000, 2) == pytest.approx(asymptotics.weyl_model(1000, 1) / 2)
    with pytest.raises(DomainError):
        asymptotics.weyl_model(2, 1)


def test_phase_volume_degenerate():
    assert phase_volume(1, 1, 1) == 0
    with pytest.raises(DomainError):
        phase_volume(0.5, 1, 1)


def test_phase_volume_against_riemann_sum():
    lam, m, b = math.e, 1.0, 1.0
    r_star = math.log(lam / m) / b
    n = 1_000_000
    r = (np.arange(n) + 0.5) * r_star / n
    brute = np.sum(np.sqrt(np.maximum(lam ** 2 - m ** 2 * np.exp(2 * b * r), 0))) * r_star / n / math.pi
    value = phase_volume(lam, m, b)
    assert value > 0
    assert value == pytest.approx(brute, rel=1e-6)


def test_phase_volume_closed_form():
    lam, b = 50.0, 1.0
    # (lam / pi b) (log(lam + sqrt(lam^2 - 1)) - sqrt(1 - 1/lam^2)) for m = 1
    expected = (lam * math.log(lam + math.sqrt(lam * lam - 1)) - math.sqrt(lam * lam - 1)) / (math.pi * b)
    assert phase_volume(lam, 1.0, b) == pytest.approx(expected, rel=1e-8)


def test_phase_volume_against_weyl_model():
    lam = 1000.0
    assert abs(phase_volume(lam, 1, 1) - asymptotics.weyl_model(lam, 1)) <= 2 * lam


@pytest.mark.parametrize('b', [1.0, -1.0, -2.0])
def test_nu_funnel_right_half_plane_in_first_quadrant(b):
    for re in np.linspace(0.01, 50, 25):
        for im in np.linspace(0.01, 10, 25):
            assert nu_of_lambda(complex(re, im), b, Branch.FUNNEL).nu.real > 0
