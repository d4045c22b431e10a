"""Piecewise trajectories for the moving cavity and their clock ledger.

A trajectory is an ordered list of segments, each either inertial
coasting for a lab-frame duration or uniform acceleration for a proper
time measured at the cavity center.  Durations are SI seconds and
accelerations m/s^2; conversion to the dimensionless parameter
h = a L / c^2 happens against a specific `CavityGeometry`.

Two clocks matter.  Rob's cavity accumulates its own proper time, while
the phase reference on Alice's side advances with either the lab frame
(default, appropriate when her equipment stays put) or with a clock
comoving with Rob.  During an accelerated stretch of center proper time
tau the lab clock advances (c / a) sinh(a tau / c).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bogoliubov import (
    CavityGeometry,
    _warn_regime,
    compose,
    identity_pair,
    one_segment_transform,
    phase_evolution_minkowski,
)
from .errors import TrajectoryParseError

__all__ = [
    "Inertial",
    "Accelerated",
    "Trajectory",
    "ProperTimeLedger",
    "PhasePair",
    "h_parameter",
    "parse_trajectory",
    "ledger",
    "phase_pair",
    "build_transform",
    "inertial_duration_for_phase",
]

_CLOCKS = ("lab", "comoving")


def h_parameter(a, L, c):
    """Dimensionless center acceleration a L / c^2 (regime-checked)."""
    h = a * L / c ** 2
    _warn_regime(h)
    return h


@dataclass(frozen=True)
class Inertial:
    """Coasting segment; `duration` is lab-frame seconds."""

    duration: float

    def __post_init__(self):
        if not self.duration >= 0.0:
            raise ValueError("inertial duration must be >= 0")


@dataclass(frozen=True)
class Accelerated:
    """Uniform acceleration a (m/s^2) for center proper time tau (s).

    Only speed-up segments are supported; direction reversal would need
    a matched pair of wedge charts and is out of scope.
    """

    a: float
    tau: float

    def __post_init__(self):
        if not (self.a > 0.0 and math.isfinite(self.a)):
            raise ValueError("acceleration must be positive and finite")
        if not self.tau >= 0.0:
            raise ValueError("proper duration must be >= 0")


@dataclass(frozen=True)
class Trajectory:
    segments: tuple
    geometry: CavityGeometry

    def __post_init__(self):
        segs = tuple(self.segments)
        for s in segs:
            if not isinstance(s, (Inertial, Accelerated)):
                raise TypeError(f"unknown segment type {type(s).__name__}")
        if not segs:
            raise ValueError("trajectory needs at least one segment")
        object.__setattr__(self, "segments", segs)

    @property
    def n_accelerated(self):
        return sum(isinstance(s, Accelerated) for s in self.segments)

    def single_acceleration(self):
        """The lone accelerated segment, or None if there are 0 or > 1."""
        acc = [s for s in self.segments if isinstance(s, Accelerated)]
        return acc[0] if len(acc) == 1 else None


def parse_trajectory(text):
    """Parse the plain-text segment format into a segment list.

    One segment per line: `inertial <seconds>` or
    `accel <m_per_s2> <seconds>`.  Blank lines and `#` comments are
    ignored; an entirely empty description means a resting cavity.
    """
    segments = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        kind, args = tokens[0], tokens[1:]
        try:
            if kind == "inertial":
                if len(args) != 1:
                    raise ValueError("expected: inertial <seconds>")
                segments.append(Inertial(float(args[0])))
            elif kind == "accel":
                if len(args) != 2:
                    raise ValueError("expected: accel <m_per_s2> <seconds>")
                segments.append(Accelerated(float(args[0]), float(args[1])))
            else:
                raise ValueError(f"unknown segment kind {kind!r}")
        except ValueError as exc:
            raise TrajectoryParseError(str(exc), line=lineno) from None
    if not segments:
        segments.append(Inertial(0.0))
    return segments


@dataclass(frozen=True)
class ProperTimeLedger:
    """Elapsed time on Alice's reference clock and on Rob's cavity."""

    t_alice: float
    tau_rob: float


def ledger(trajectory, alice_clock="lab"):
    """Accumulate both clocks over the trajectory."""
    if alice_clock not in _CLOCKS:
        raise ValueError(f"alice_clock must be one of {_CLOCKS}")
    c = trajectory.geometry.c
    t_alice = tau_rob = 0.0
    for seg in trajectory.segments:
        if isinstance(seg, Inertial):
            t_alice += seg.duration
            tau_rob += seg.duration
        else:
            tau_rob += seg.tau
            if alice_clock == "comoving":
                t_alice += seg.tau
            else:
                t_alice += (c / seg.a) * math.sinh(seg.a * seg.tau / c)
    return ProperTimeLedger(t_alice, tau_rob)


@dataclass(frozen=True)
class PhasePair:
    """Free-evolution phases accumulated by the two protocol modes."""

    theta_alice: float
    theta_rob: float

    @property
    def phi(self):
        """Unwrapped joint phase, theta_alice + theta_rob."""
        return self.theta_alice + self.theta_rob

    @property
    def phi_wrapped(self):
        """Joint phase reduced to [0, 2 pi)."""
        return self.phi % (2.0 * math.pi)


def phase_pair(trajectory, k, kp, alice_clock="lab"):
    """Phases omega_k t_alice and omega_kp tau_rob for the mode pair."""
    geom = trajectory.geometry
    led = ledger(trajectory, alice_clock)
    return PhasePair(geom.omega(k) * led.t_alice,
                     geom.omega(kp) * led.tau_rob)


def build_transform(trajectory, tol=None):
    """Net Bogoliubov pair for Rob's cavity over the whole trajectory."""
    geom = trajectory.geometry
    total = identity_pair(geom.n_max)
    kwargs = {} if tol is None else {"tol": tol}
    for seg in trajectory.segments:
        if isinstance(seg, Inertial):
            step = phase_evolution_minkowski(seg.duration, geom)
        else:
            h = h_parameter(seg.a, geom.L, geom.c)
            step = one_segment_transform(seg.tau, h, geom, **kwargs)
        total = compose(step, total)
    return total


def inertial_duration_for_phase(n_cycles, k, kp, geometry):
    """Coasting time after which the joint phase of the (k, kp) pair has
    advanced by n_cycles full turns, 2 pi n / (omega_k + omega_kp)."""
    if n_cycles < 0:
        raise ValueError("n_cycles must be >= 0")
    return 2.0 * math.pi * n_cycles / (geometry.omega(k) + geometry.omega(kp))
