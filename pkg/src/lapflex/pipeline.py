"""Operator-input conditioning: raw 6-axis counts to joint velocity commands.

Per-tick chain: normalize -> dead-zone -> low-pass -> map -> prioritize.
Axis assignment mirrors the device mapping used on the real instrument:
vertical translation tz drives the gripper slider (q3), rx the shaft roll
(q4), ry the bend (q1), rz the distal head (q2).  tx and ty are unmapped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

__all__ = [
    "RawAxes",
    "NormalizedAxes",
    "PipelineConfig",
    "PriorityMode",
    "JointVelocityCommand",
    "ZERO_COMMAND",
    "normalize",
    "dead_zone",
    "low_pass",
    "map_axes",
    "InputPipeline",
]

AXIS_NAMES = ("tx", "ty", "tz", "rx", "ry", "rz")


class PriorityMode(Enum):
    ALL_AXES = "ALL_AXES"
    DOMINANT_AXIS = "DOMINANT_AXIS"


@dataclass(frozen=True)
class RawAxes:
    """One raw device sample: six signed axis counts plus a button bitset."""

    tx: float = 0.0
    ty: float = 0.0
    tz: float = 0.0
    rx: float = 0.0
    ry: float = 0.0
    rz: float = 0.0
    buttons: int = 0


@dataclass(frozen=True)
class NormalizedAxes:
    """Six dimensionless axis values, each in [-1, 1]."""

    tx: float = 0.0
    ty: float = 0.0
    tz: float = 0.0
    rx: float = 0.0
    ry: float = 0.0
    rz: float = 0.0


@dataclass(frozen=True)
class PipelineConfig:
    device_range: float = 350.0   # full-scale raw counts
    dead_zone: float = 0.05       # normalized threshold
    filter_coeff: float = 0.2     # first-order coefficient per tick
    gain_q1: float = 30.0         # deg/s at full deflection (bend)
    gain_q2: float = 90.0         # deg/s (head rotation)
    gain_q3: float = 2.0          # mm/s (gripper slider)
    gain_q4: float = 90.0         # deg/s (shaft rotation)
    priority_mode: PriorityMode = PriorityMode.DOMINANT_AXIS

    def __post_init__(self):
        if not 0.0 <= self.dead_zone < 1.0:
            raise ValueError("dead_zone must be in [0, 1)")
        if not 0.0 < self.filter_coeff <= 1.0:
            raise ValueError("filter_coeff must be in (0, 1]")
        for g in (self.gain_q1, self.gain_q2, self.gain_q3, self.gain_q4):
            if g <= 0.0:
                raise ValueError("gains must be positive")
        if self.device_range <= 0.0:
            raise ValueError("device_range must be positive")


@dataclass(frozen=True)
class JointVelocityCommand:
    """Commanded joint velocities: q1/q2/q4 deg/s, q3 mm/s."""

    q1dot: float = 0.0
    q2dot: float = 0.0
    q3dot: float = 0.0
    q4dot: float = 0.0

    def is_zero(self) -> bool:
        return self.q1dot == 0.0 and self.q2dot == 0.0 and self.q3dot == 0.0 and self.q4dot == 0.0

    def is_finite(self) -> bool:
        return all(map(math.isfinite, (self.q1dot, self.q2dot, self.q3dot, self.q4dot)))


ZERO_COMMAND = JointVelocityCommand()


def _clamp(x: float, lo: float, hi: float) -> float:
    return lo if x < lo else hi if x > hi else x


def normalize(raw: RawAxes, device_range: float) -> NormalizedAxes:
    """Scale raw counts to [-1, 1], saturating outside the declared range."""
    return NormalizedAxes(*(
        _clamp(getattr(raw, name) / device_range, -1.0, 1.0) for name in AXIS_NAMES
    ))


def dead_zone(x: float, threshold: float) -> float:
    """Rescaled dead-zone: zero inside the threshold, then linear so the
    output is continuous at the boundary and reaches +/-1 at full deflection."""
    if abs(x) <= threshold:
        return 0.0
    return math.copysign((abs(x) - threshold) / (1.0 - threshold), x)


def low_pass(prev: float, x: float, coeff: float) -> float:
    """First-order exponential smoothing step."""
    return prev + coeff * (x - prev)


def map_axes(filtered: NormalizedAxes, cfg: PipelineConfig) -> JointVelocityCommand:
    """Scale filtered axes into per-DOF velocities and apply priority logic.

    Under DOMINANT_AXIS only the mapped axis with the largest magnitude
    commands motion; ties break in the fixed order q1 > q3 > q2 > q4
    (bending first, then grasping).
    """
    cmd = JointVelocityCommand(
        q1dot=cfg.gain_q1 * filtered.ry,
        q2dot=cfg.gain_q2 * filtered.rz,
        q3dot=cfg.gain_q3 * filtered.tz,
        q4dot=cfg.gain_q4 * filtered.rx,
    )
    if cfg.priority_mode is PriorityMode.ALL_AXES:
        return cmd
    ranked = ((abs(filtered.ry), "q1dot"), (abs(filtered.tz), "q3dot"),
              (abs(filtered.rz), "q2dot"), (abs(filtered.rx), "q4dot"))
    winner_mag, winner = ranked[0]
    for mag, name in ranked[1:]:
        if mag > winner_mag:
            winner_mag, winner = mag, name
    if winner_mag == 0.0:
        return ZERO_COMMAND
    return JointVelocityCommand(**{winner: getattr(cmd, winner)})


class InputPipeline:
    """Stateful per-tick conditioning chain owned by the control loop.

    Holds the six filter memories.  When an axis reads exactly zero after the
    dead-zone and its filter state has decayed inside the dead-zone band, the
    state snaps to exactly zero so a released stick commands exact rest.
    """

    def __init__(self, cfg: PipelineConfig):
        self.cfg = cfg
        self._state = [0.0] * 6

    def reset(self) -> None:
        self._state = [0.0] * 6

    @property
    def filtered(self) -> NormalizedAxes:
        return NormalizedAxes(*self._state)

    def update(self, raw: RawAxes) -> tuple[NormalizedAxes, JointVelocityCommand]:
        """Run one tick of the chain; returns (filtered axes, command)."""
        cfg = self.cfg
        norm = normalize(raw, cfg.device_range)
        for i, name in enumerate(AXIS_NAMES):
            shaped = dead_zone(getattr(norm, name), cfg.dead_zone)
            value = low_pass(self._state[i], shaped, cfg.filter_coeff)
            if shaped == 0.0 and abs(value) <= cfg.dead_zone:
                value = 0.0
            self._state[i] = value
        filtered = NormalizedAxes(*self._state)
        return filtered, map_axes(filtered, cfg)
