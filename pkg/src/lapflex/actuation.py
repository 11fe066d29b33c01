"""Simulated actuation layer: command bus, motor dynamics, encoders, plant.

Five gearmotors drive the four degrees of freedom (the bend uses an
antagonistic pair).  Motors are first-order lags stepped with the exact
exponential update so the response is analytic, encoders quantize shaft
angle to integer ticks, and the plant integrates ground-truth joint values
alongside the encoder view so estimation error is measurable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import BusError, BusTimeoutError, RangeError
from .flexure import FlexureGeometry, antagonistic_speeds, bend_from_tendon
from .gripper import GripperGeometry, GripperState, jaw_state, valid_displacement_range

__all__ = [
    "MotorId",
    "DriverId",
    "MOTOR_ADDRESS",
    "SPEED_LIMIT",
    "MotorBusCommand",
    "MotorParams",
    "MotorSim",
    "MotorBus",
    "Transmission",
    "InstrumentState",
    "InstrumentPlant",
    "rest_state",
    "motor_speed_commands",
    "estimate_state",
]

SPEED_LIMIT = 800  # driver speed command full scale, saturating

# Residual shaft speed below this with a zero target is treated as stopped,
# so a released axis holds position exactly instead of creeping forever.
_OMEGA_REST = 1e-9


class MotorId(Enum):
    FLEXION = "FLEXION"
    EXTENSION = "EXTENSION"
    GRIPPER = "GRIPPER"
    HEAD = "HEAD"
    SHAFT = "SHAFT"


class DriverId(Enum):
    DRIVER_A = "DRIVER_A"
    DRIVER_B = "DRIVER_B"
    DRIVER_C = "DRIVER_C"


# Two channels per dual driver; the fifth motor needs a third driver.
MOTOR_ADDRESS: dict[MotorId, tuple[DriverId, int]] = {
    MotorId.FLEXION: (DriverId.DRIVER_A, 0),
    MotorId.EXTENSION: (DriverId.DRIVER_A, 1),
    MotorId.GRIPPER: (DriverId.DRIVER_B, 0),
    MotorId.HEAD: (DriverId.DRIVER_B, 1),
    MotorId.SHAFT: (DriverId.DRIVER_C, 0),
}


@dataclass(frozen=True)
class MotorBusCommand:
    """One speed command addressed to a driver channel, in [-800, +800]."""

    driver: DriverId
    channel: int
    speed: float

    def __post_init__(self):
        if not isinstance(self.driver, DriverId):
            raise ValueError(f"unknown driver {self.driver!r}")
        if self.channel not in (0, 1):
            raise ValueError(f"channel must be 0 or 1, got {self.channel!r}")


@dataclass(frozen=True)
class MotorParams:
    """First-order gearmotor model at the output shaft.

    Defaults: 12 counts/rev motor shaft through a 100:1 gearbox gives 1200
    ticks per output revolution.
    """

    omega_max: float = 360.0   # deg/s at full command
    tau: float = 0.030         # s
    ticks_per_rev: int = 1200

    def __post_init__(self):
        if self.omega_max <= 0.0:
            raise ValueError("omega_max must be positive")
        if self.tau <= 0.0:
            raise ValueError("tau must be positive")
        if self.ticks_per_rev <= 0:
            raise ValueError("ticks_per_rev must be positive")


class MotorSim:
    """One motor: first-order speed lag plus an angle-quantizing encoder."""

    def __init__(self, params: MotorParams):
        self.params = params
        self.target = 0.0   # deg/s
        self.omega = 0.0    # deg/s
        self.angle = 0.0    # deg, continuous output-shaft angle

    def set_target(self, omega_target: float) -> None:
        lim = self.params.omega_max
        self.target = -lim if omega_target < -lim else lim if omega_target > lim else omega_target

    def step(self, dt: float) -> None:
        """Advance by dt using the closed-form first-order response, so one
        long step equals many short ones and the tick trace is deterministic."""
        if dt <= 0.0:
            raise ValueError("dt must be positive")
        tau = self.params.tau
        decay = math.exp(-dt / tau)
        self.angle += self.target * dt + (self.omega - self.target) * tau * (1.0 - decay)
        self.omega = self.target + (self.omega - self.target) * decay
        if self.target == 0.0 and abs(self.omega) < _OMEGA_REST:
            self.omega = 0.0

    @property
    def ticks(self) -> int:
        """Encoder count: floor of the accumulated revolutions times CPR."""
        return math.floor(self.angle / 360.0 * self.params.ticks_per_rev)


class MotorBus:
    """Typed message interface to the motor drivers with ack and timeout
    semantics; register-level protocol is out of scope.

    Fault injection (command timeouts, stuck or jumped encoders) is driven
    through explicit methods so supervisory logic can be exercised.
    """

    def __init__(self, motors: dict[MotorId, MotorSim], probe_ok: bool = True):
        self._motors = dict(motors)
        self._by_address = {MOTOR_ADDRESS[mid]: sim for mid, sim in self._motors.items()}
        self._probe_ok = probe_ok
        self._initialized = False
        self._timeouts_pending = 0
        self._stuck: dict[MotorId, int] = {}
        self._jump: dict[MotorId, int] = {}

    def probe(self) -> None:
        """Simulated driver detection and handshake."""
        if not self._probe_ok:
            raise BusError("motor driver not detected")
        self._initialized = True

    @property
    def initialized(self) -> bool:
        return self._initialized

    def send_speed(self, cmd: MotorBusCommand) -> bool:
        """Set the addressed motor's target; returns the ack."""
        if not self._initialized:
            raise BusError("bus not initialized")
        if self._timeouts_pending > 0:
            self._timeouts_pending -= 1
            raise BusTimeoutError("driver did not acknowledge")
        sim = self._by_address.get((cmd.driver, cmd.channel))
        if sim is None:
            raise BusError(f"no motor at {cmd.driver.value} channel {cmd.channel}")
        if not math.isfinite(cmd.speed):
            raise BusError("speed command not finite")
        speed = max(-float(SPEED_LIMIT), min(float(SPEED_LIMIT), cmd.speed))
        sim.set_target(speed / SPEED_LIMIT * sim.params.omega_max)
        return True

    def read_ticks(self, motor: MotorId) -> int:
        """Encoder read with any injected faults applied."""
        if motor in self._stuck:
            return self._stuck[motor]
        return self._motors[motor].ticks + self._jump.get(motor, 0)

    # ---- fault injection ---------------------------------------------

    def inject_timeout(self, count: int = 1) -> None:
        """Make the next `count` send_speed calls time out."""
        self._timeouts_pending += count

    def inject_encoder_stuck(self, motor: MotorId) -> None:
        """Freeze the reported count at its current value."""
        self._stuck[motor] = self.read_ticks(motor)

    def inject_encoder_jump(self, motor: MotorId, ticks: int) -> None:
        """Offset all subsequent reads, as if the magnet slipped."""
        self._jump[motor] = self._jump.get(motor, 0) + ticks

    def clear_faults(self) -> None:
        self._timeouts_pending = 0
        self._stuck.clear()
        self._jump.clear()


@dataclass(frozen=True)
class Transmission:
    """Motor-to-joint ratios.  The tendon and slider capstans share one wire
    travel per output revolution; head and shaft couple 1:1 by default."""

    capstan_mm_per_rev: float = 2.4
    head_deg_per_motor_deg: float = 1.0
    shaft_deg_per_motor_deg: float = 1.0

    def __post_init__(self):
        for v in (self.capstan_mm_per_rev, self.head_deg_per_motor_deg,
                  self.shaft_deg_per_motor_deg):
            if v <= 0.0:
                raise ValueError("transmission ratios must be positive")

    def mm_per_tick(self, ticks_per_rev: int) -> float:
        return self.capstan_mm_per_rev / ticks_per_rev

    def wire_travel(self, motor_angle: float) -> float:
        """Capstan wire travel in mm for an output-shaft angle in deg."""
        return motor_angle / 360.0 * self.capstan_mm_per_rev

    def motor_rate_for_wire(self, wire_rate: float) -> float:
        """Output-shaft deg/s needed for a capstan wire rate in mm/s."""
        return wire_rate / self.capstan_mm_per_rev * 360.0

    def motor_angle_for_travel(self, travel: float) -> float:
        """Output-shaft angle in deg that produces a wire travel in mm."""
        return travel / self.capstan_mm_per_rev * 360.0


@dataclass(frozen=True)
class InstrumentState:
    """Joint-space pose: q1 bend deg, q2 head deg in [0, 360), q3 slider mm,
    q4 shaft deg in [0, 360), plus the jaw linkage state derived from q3."""

    q1: float
    q2: float
    q3: float
    q4: float
    jaw: GripperState


def _instrument_state(geom: GripperGeometry, q1: float, q2: float, q3: float,
                      q4: float) -> InstrumentState:
    return InstrumentState(q1=q1, q2=q2 % 360.0, q3=q3, q4=q4 % 360.0,
                           jaw=jaw_state(geom, q3))


def rest_state(geom: GripperGeometry) -> InstrumentState:
    """Pose with all joints at zero and the jaws at their closed-at-rest set."""
    return _instrument_state(geom, 0.0, 0.0, 0.0, 0.0)


def motor_speed_commands(
    command,
    bend_angle: float,
    flexure: FlexureGeometry,
    trans: Transmission,
    params: MotorParams,
    tension_gain: float = 1.0,
) -> dict[MotorId, float]:
    """Convert joint velocities into per-motor bus speed units.

    The bend rate maps to the antagonistic pair through the configuration-
    dependent tendon rate; the slider maps through the capstan; head and
    shaft map through their fixed ratios.
    """
    flex_rate, ext_rate = antagonistic_speeds(flexure, bend_angle, command.q1dot, tension_gain)
    deg_per_s = {
        MotorId.FLEXION: trans.motor_rate_for_wire(flex_rate),
        MotorId.EXTENSION: trans.motor_rate_for_wire(ext_rate),
        MotorId.GRIPPER: trans.motor_rate_for_wire(command.q3dot),
        MotorId.HEAD: command.q2dot / trans.head_deg_per_motor_deg,
        MotorId.SHAFT: command.q4dot / trans.shaft_deg_per_motor_deg,
    }
    return {mid: rate / params.omega_max * SPEED_LIMIT for mid, rate in deg_per_s.items()}


def estimate_state(
    ticks: dict[MotorId, int],
    geom: GripperGeometry,
    flexure: FlexureGeometry,
    trans: Transmission,
    params: MotorParams,
    opening_limit: float | None = None,
) -> InstrumentState:
    """Reconstruct the instrument pose from encoder counts.

    Raises RangeError when the implied slider or tendon travel falls outside
    the mechanism's reachable range (implausible sensing; the supervisor
    maps it to a fault).
    """
    mm_per_tick = trans.mm_per_tick(params.ticks_per_rev)
    q3 = ticks[MotorId.GRIPPER] * mm_per_tick
    lo, hi = valid_displacement_range(geom) if opening_limit is None else \
        valid_displacement_range(geom, opening_limit)
    if not lo <= q3 <= hi:
        raise RangeError(f"encoder-implied slider {q3:.4f} mm outside [{lo:.4f}, {hi:.4f}]")
    flex_tendon = ticks[MotorId.FLEXION] * mm_per_tick
    q1 = bend_from_tendon(flexure, flex_tendon)  # raises RangeError if implausible
    deg_per_tick = 360.0 / params.ticks_per_rev
    q2 = ticks[MotorId.HEAD] * deg_per_tick * trans.head_deg_per_motor_deg
    q4 = ticks[MotorId.SHAFT] * deg_per_tick * trans.shaft_deg_per_motor_deg
    return _instrument_state(geom, q1, q2, q3, q4)


class InstrumentPlant:
    """Ground-truth four-DOF plant driven by the five simulated motors.

    Joint truth is derived from continuous motor angles, not re-integrated,
    so the encoder view and the truth can only disagree by quantization.
    Slider and bend motors stall against their mechanical stops.
    """

    def __init__(
        self,
        geom: GripperGeometry,
        flexure: FlexureGeometry,
        params: MotorParams = MotorParams(),
        trans: Transmission = Transmission(),
        opening_limit: float | None = None,
        probe_ok: bool = True,
    ):
        self.geom = geom
        self.flexure = flexure
        self.params = params
        self.trans = trans
        self.motors = {mid: MotorSim(params) for mid in MotorId}
        self.bus = MotorBus(self.motors, probe_ok=probe_ok)
        if opening_limit is None:
            self.q3_range = valid_displacement_range(geom)
        else:
            self.q3_range = valid_displacement_range(geom, opening_limit)

    def step(self, dt: float) -> None:
        for sim in self.motors.values():
            sim.step(dt)
        q3_lo, q3_hi = self.q3_range
        self._stall(self.motors[MotorId.GRIPPER],
                    self.trans.motor_angle_for_travel(q3_lo),
                    self.trans.motor_angle_for_travel(q3_hi))
        self._stall(self.motors[MotorId.FLEXION], 0.0,
                    self.trans.motor_angle_for_travel(self.flexure.max_flex_tendon))

    @staticmethod
    def _stall(sim: MotorSim, angle_lo: float, angle_hi: float) -> None:
        # Hard stop: the mechanism blocks, the shaft holds at the limit.
        if sim.angle < angle_lo:
            sim.angle = angle_lo
            sim.omega = 0.0
        elif sim.angle > angle_hi:
            sim.angle = angle_hi
            sim.omega = 0.0

    def encoder_counts(self) -> dict[MotorId, int]:
        return {mid: self.bus.read_ticks(mid) for mid in MotorId}

    def true_state(self) -> InstrumentState:
        q3 = self.trans.wire_travel(self.motors[MotorId.GRIPPER].angle)
        flex_tendon = self.trans.wire_travel(self.motors[MotorId.FLEXION].angle)
        q1 = bend_from_tendon(self.flexure, flex_tendon)
        q2 = self.motors[MotorId.HEAD].angle * self.trans.head_deg_per_motor_deg
        q4 = self.motors[MotorId.SHAFT].angle * self.trans.shaft_deg_per_motor_deg
        return _instrument_state(self.geom, q1, q2, q3, q4)

    def estimated_state(self, opening_limit: float | None = None) -> InstrumentState:
        return estimate_state(self.encoder_counts(), self.geom, self.flexure,
                              self.trans, self.params, opening_limit)
