"""Segment schedules, proper-time bookkeeping, phase accumulation."""

import math

import numpy as np
import pytest

from cavtel.bogoliubov import CavityGeometry
from cavtel.errors import TrajectoryParseError
from cavtel.trajectory import (
    Accelerated,
    Inertial,
    Trajectory,
    build_transform,
    h_parameter,
    inertial_duration_for_phase,
    ledger,
    parse_trajectory,
    phase_pair,
)

GEOM = CavityGeometry(0.012, 1.2e8, 10)


# ---------------------------------------------------------------------------
# segment and schedule construction

def test_segment_validation():
    with pytest.raises(ValueError):
        Inertial(-1.0)
    with pytest.raises(ValueError):
        Accelerated(0.0, 1e-9)
    with pytest.raises(ValueError):
        Accelerated(-2e17, 1e-9)
    with pytest.raises(ValueError):
        Accelerated(2e17, -1e-9)
    with pytest.raises(ValueError):
        Accelerated(math.inf, 1e-9)


def test_trajectory_counts_accelerated_segments():
    traj = Trajectory((Inertial(1e-10), Accelerated(1e17, 1e-10),
                       Inertial(0.0), Accelerated(1e17, 2e-10)), GEOM)
    assert traj.n_accelerated == 2
    assert traj.single_acceleration() is None
    single = Trajectory((Inertial(1e-10), Accelerated(1e17, 1e-10)), GEOM)
    assert single.single_acceleration() == Accelerated(1e17, 1e-10)


def test_trajectory_rejects_non_segments():
    with pytest.raises(TypeError):
        Trajectory(("coast",), GEOM)


# ---------------------------------------------------------------------------
# parsing

def test_parse_basic_schedule():
    text = """
    # warm-up coast
    inertial 1.5e-10

    accel 2.94e17 1e-9  # burn
    inertial 0
    """
    segs = parse_trajectory(text)
    assert segs == [Inertial(1.5e-10), Accelerated(2.94e17, 1e-9),
                    Inertial(0.0)]


def test_parse_empty_input_is_rest():
    assert parse_trajectory("# nothing\n\n") == [Inertial(0.0)]


@pytest.mark.parametrize("line,text", [
    (1, "inertial"),
    (1, "inertial 1e-10 7"),
    (2, "inertial 1e-10\naccel 2e17"),
    (3, "inertial 0\n# fine\nwarp 9"),
    (1, "accel 2e17 bad"),
    (2, "inertial 1e-10\naccel -2e17 1e-9"),
])
def test_parse_errors_carry_line_numbers(line, text):
    with pytest.raises(TrajectoryParseError) as err:
        parse_trajectory(text)
    assert err.value.line == line
    assert f"line {line}:" in str(err.value)


# ---------------------------------------------------------------------------
# proper-time ledger

def test_ledger_inertial_clocks_agree():
    traj = Trajectory((Inertial(2e-10), Inertial(1e-10)), GEOM)
    led = ledger(traj)
    assert led.t_alice == pytest.approx(3e-10, rel=1e-15)
    assert led.tau_rob == pytest.approx(3e-10, rel=1e-15)


def test_ledger_small_acceleration_limit():
    # (c/a) sinh(a tau / c) -> tau
    traj = Trajectory((Accelerated(1e3, 1e-10),), GEOM)
    led = ledger(traj)
    assert led.t_alice == pytest.approx(1e-10, rel=1e-12)


def test_ledger_time_dilation_example():
    traj = Trajectory((Accelerated(2.94e17, 1e-9),), GEOM)
    led = ledger(traj)
    c, a, tau = 1.2e8, 2.94e17, 1e-9
    want = (c / a) * math.sinh(a * tau / c)
    assert led.t_alice == pytest.approx(want, rel=1e-15)
    assert led.t_alice == pytest.approx(2.3474e-9, rel=1e-4)
    assert led.tau_rob == tau


def test_ledger_lab_clock_never_behind():
    traj = Trajectory((Inertial(1e-10), Accelerated(2e17, 5e-10),
                       Accelerated(1e17, 2e-10)), GEOM)
    led = ledger(traj)
    assert led.t_alice >= led.tau_rob


def test_ledger_split_additivity():
    whole = Trajectory((Accelerated(2e17, 6e-10),), GEOM)
    split = Trajectory((Accelerated(2e17, 2e-10),
                        Accelerated(2e17, 4e-10)), GEOM)
    lw, ls = ledger(whole), ledger(split)
    assert ls.tau_rob == pytest.approx(lw.tau_rob, rel=1e-12)
    # sinh is convex, so splitting a burn at rest restarts the clock and
    # loses lab time
    assert ls.t_alice < lw.t_alice


def test_ledger_comoving_clock():
    traj = Trajectory((Inertial(1e-10), Accelerated(2.94e17, 1e-9)), GEOM)
    led = ledger(traj, alice_clock="comoving")
    assert led.t_alice == pytest.approx(1.1e-9, rel=1e-15)
    assert led.t_alice == led.tau_rob
    with pytest.raises(ValueError):
        ledger(traj, alice_clock="sidereal")


# ---------------------------------------------------------------------------
# phases

def test_phase_pair_inertial():
    duration = 0.7e-10
    traj = Trajectory((Inertial(duration),), GEOM)
    phases = phase_pair(traj, 1, 3)
    assert phases.theta_alice == pytest.approx(GEOM.omega(1) * duration)
    assert phases.theta_rob == pytest.approx(GEOM.omega(3) * duration)
    assert phases.phi == pytest.approx(phases.theta_alice
                                       + phases.theta_rob)
    assert 0.0 <= phases.phi_wrapped < 2 * math.pi
    assert phases.phi_wrapped == pytest.approx(phases.phi % (2 * math.pi))


def test_phase_pair_comoving_clock():
    traj = Trajectory((Accelerated(2.94e17, 1e-9),), GEOM)
    lab = phase_pair(traj, 1, 3)
    com = phase_pair(traj, 1, 3, alice_clock="comoving")
    assert com.theta_alice == pytest.approx(GEOM.omega(1) * 1e-9)
    assert lab.theta_alice > com.theta_alice
    assert lab.theta_rob == com.theta_rob


def test_inertial_duration_for_phase():
    t = inertial_duration_for_phase(3, 1, 3, GEOM)
    phases = phase_pair(Trajectory((Inertial(t),), GEOM), 1, 3)
    assert phases.phi == pytest.approx(6 * math.pi, rel=1e-12)
    assert phases.phi_wrapped == pytest.approx(0.0, abs=1e-9)


# ---------------------------------------------------------------------------
# h parameter

@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_h_parameter_exact_benchmark():
    assert h_parameter(4e17, 0.012, 1.2e8) == 1.0 / 3.0


def test_h_parameter_linear_in_a():
    assert h_parameter(2e16, 0.012, 1.2e8) == pytest.approx(
        2 * h_parameter(1e16, 0.012, 1.2e8), rel=1e-15)


def test_h_parameter_regime_warning():
    with pytest.warns(RuntimeWarning):
        h_parameter(4e17, 0.012, 1.2e8)


def test_h_parameter_quiet_in_regime():
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        h_parameter(1e17, 0.012, 1.2e8)


# ---------------------------------------------------------------------------
# transforms

def test_inertial_transform_is_pure_phase():
    traj = Trajectory((Inertial(0.9e-10), Inertial(0.4e-10)), GEOM)
    pair = build_transform(traj)
    assert np.max(np.abs(pair.beta)) == 0.0
    off = pair.alpha - np.diag(np.diag(pair.alpha))
    assert np.max(np.abs(off)) == 0.0
    assert np.allclose(np.abs(np.diag(pair.alpha)), 1.0, atol=1e-15)


def test_inertial_transforms_compose_durations():
    split = build_transform(
        Trajectory((Inertial(0.9e-10), Inertial(0.4e-10)), GEOM))
    whole = build_transform(Trajectory((Inertial(1.3e-10),), GEOM))
    assert np.allclose(split.alpha, whole.alpha, atol=1e-12)


def test_accelerated_transform_has_pairing():
    traj = Trajectory((Accelerated(2e17, 3e-10),), GEOM)
    pair = build_transform(traj)
    assert np.max(np.abs(pair.beta)) > 1e-4


def test_transform_matches_segment_engine():
    from cavtel.bogoliubov import compose, one_segment_transform, \
        phase_evolution_minkowski
    traj = Trajectory((Inertial(1e-10), Accelerated(2e17, 3e-10)), GEOM)
    got = build_transform(traj)
    h = h_parameter(2e17, GEOM.L, GEOM.c)
    want = compose(one_segment_transform(3e-10, h, GEOM),
                   phase_evolution_minkowski(1e-10, GEOM))
    assert np.allclose(got.alpha, want.alpha, atol=1e-14)
    assert np.allclose(got.beta, want.beta, atol=1e-14)
