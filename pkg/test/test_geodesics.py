import math

import pytest
from hypothesis import given, settings, strategies as st

from utils import *

from cuspres import geodesics
from cuspres.errors import ConfigError, DomainError
from cuspres.geodesics import MetricProfile, Side, integrate, launch, nontrap_scan, profile, step

GLUED = MetricProfile(-1.0, 1.0)


def test_profile_pieces():
    assert profile(0, GLUED).f == 1
    assert profile(0, GLUED).side is Side.INTERFACE
    assert profile(0, GLUED).f_prime == -1
    assert profile(-2, GLUED)[:2] == (3, -1)
    f, fp, side = profile(1, GLUED)
    assert f == pytest.approx(math.exp(-1))
    assert fp == pytest.approx(-math.exp(-1))
    assert side is Side.RIGHT


def test_profile_validation():
    with pytest.raises(ConfigError):
        MetricProfile(1.0, 1.0)


def test_launch_is_unit_speed():
    state = launch(-1.0, 1.0, GLUED)
    assert state.speed == 1.0
    assert state.r_dot == pytest.approx(math.cos(1.0))
    assert state.clairaut == pytest.approx(2 * math.sin(1.0))


def test_radial_motion_is_linear():
    state = launch(-3.0, 0.0, GLUED)
    for _ in range(500):
        state = step(state, 1e-2, GLUED)
    assert state.r == pytest.approx(2.0, abs=1e-9)
    assert state.theta == 0


def test_angular_data_bends_toward_the_cone():
    state = geodesics.GeodesicState(-1.0, 0.0, 0.0, 0.5, 2.0, 1.0)
    assert geodesics.r_ddot(state, GLUED) == pytest.approx(-0.5)
    after = step(state, 1e-2, GLUED)
    assert after.r_dot < 0


def test_step_rejects_large_dt():
    with pytest.raises(DomainError):
        step(launch(0.5, 1.0, GLUED), 0.1, GLUED)


def test_step_splits_at_the_interface():
    state = launch(-0.005, 0.3, MetricProfile(-2.0, 1.0))
    after = step(state, 1e-2, MetricProfile(-2.0, 1.0))
    assert after.r > 0
    assert abs(after.speed - 1) < 1e-10


def test_clairaut_and_speed_conservation():
    state = launch(-0.5, 1.2, GLUED)
    traj = integrate(state, GLUED, T=10.0, dt=1e-3)
    assert traj.steps == 10_000
    assert traj.clairaut_drift < 1e-10
    assert traj.speed_drift_rate < 1e-8


@settings(max_examples=50, deadline=None)
@given(st.floats(-5, 3), st.floats(0, math.pi))
def test_conservation_matches_finer_integration(r, angle):
    state = launch(r, angle, GLUED)
    coarse = integrate(state, GLUED, T=2.0, dt=1e-2)
    fine = integrate(state, GLUED, T=2.0, dt=5e-3)
    assert coarse.speed_drift_rate < 1e-8
    assert abs(coarse.final.r - fine.final.r) < 1e-5
    assert abs(coarse.final.theta - fine.final.theta) < 1e-5


@settings(max_examples=50, deadline=None)
@given(st.floats(-5, 3), st.floats(0.05, math.pi - 0.05))
def test_turning_is_concave(r, angle):
    traj = integrate(launch(r, angle, GLUED), GLUED, T=20.0, R_escape=20.0)
    assert traj.max_r_ddot <= 1e-12


def test_time_reversal():
    start = launch(1.0, 0.7, GLUED)
    forward = integrate(start, GLUED, T=5.0, dt=1e-3).final
    back = integrate(forward, GLUED, T=5.0, dt=-1e-3).final
    assert back.r == pytest.approx(start.r, abs=1e-6)
    assert back.r_dot == pytest.approx(start.r_dot, abs=1e-6)
    assert back.theta == pytest.approx(start.theta, abs=1e-6)
    assert back.theta_dot == pytest.approx(start.theta_dot, abs=1e-6)


def test_launch_into_the_cusp_turns_around():
    traj = integrate(launch(2.0, 0.5, GLUED), GLUED, T=200.0, R_escape=20.0)
    assert traj.escaped
    assert traj.final.r < -20


@pytest.mark.parametrize('r', [-5.0, -1.0, 0.0, 3.0])
def test_radial_escape_time_is_distance(r):
    traj = integrate(launch(r, 0.0, GLUED), GLUED, T=200.0, R_escape=20.0)
    assert traj.escaped
    assert traj.escape_time == pytest.approx(20.0 - r, abs=2e-2)


def test_small_scan_escapes():
    report = nontrap_scan(GLUED, n_angles=6, n_radii=5, T=100.0)
    assert report.fraction_escaped == 1.0
    assert report.verdict is True
    assert report.trajectories == 30


def test_scan_without_claim_has_no_verdict():
    report = nontrap_scan(MetricProfile(-2.0, 1.0), n_angles=3, n_radii=3, T=50.0)
    assert report.verdict is None


def test_scan_is_thread_independent():
    serial = nontrap_scan(GLUED, n_angles=4, n_radii=3, T=50.0)
    parallel = nontrap_scan(GLUED, n_angles=4, n_radii=3, T=50.0, threads=3)
    assert serial == parallel


def test_scan_threads_zero_uses_every_cpu():
    serial = nontrap_scan(GLUED, n_angles=4, n_radii=3, T=50.0)
    assert nontrap_scan(GLUED, n_angles=4, n_radii=3, T=50.0, threads=0) == serial
    with pytest.raises(ConfigError):
        nontrap_scan(GLUED, n_angles=4, n_radii=3, T=50.0, threads=-1)


@pytest.mark.slow
def test_full_scan_escapes():
    report = nontrap_scan(GLUED, n_angles=36, n_radii=17, T=200.0, R_escape=20.0)
    assert report.trajectories == 612
    assert report.fraction_escaped == 1.0
    assert not report.failures
