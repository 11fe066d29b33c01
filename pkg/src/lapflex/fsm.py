"""Supervisory state machine and the fixed-rate teleoperation loop.

Four modes: INIT runs startup checks, IDLE holds the instrument still,
TELEOP runs the periodic control cycle, FAULT latches on any raised fault
until a deliberate reset sequence.  Whenever the mode is anything but
TELEOP, emitted motor commands are exactly zero.

The per-tick TELEOP cycle: (1) read axes and buttons, (2) dead-zone and
low-pass, (3) map to joint velocities, (4) priority logic, soft limits and
the antagonistic bending mapping, (5) read encoders and reconstruct the
instrument pose through the kinematic model, (6) send speed commands.
"""

from __future__ import annotations

import math
import threading
from collections import deque
from dataclasses import dataclass
from enum import Enum

from .actuation import (
    MOTOR_ADDRESS,
    InstrumentPlant,
    MotorBusCommand,
    MotorId,
    MotorParams,
    Transmission,
    estimate_state,
    motor_speed_commands,
    rest_state,
)
from .errors import BusError, BusTimeoutError, RangeError
from .flexure import FlexureGeometry
from .gripper import DEFAULT_OPENING_LIMIT, GripperGeometry
from .pipeline import (
    ZERO_COMMAND,
    InputPipeline,
    JointVelocityCommand,
    PipelineConfig,
    RawAxes,
)
from .telemetry import TelemetryRecord

__all__ = [
    "Mode",
    "EventKind",
    "FaultCause",
    "Event",
    "TRANSITIONS",
    "next_mode",
    "ControlConfig",
    "ControllerState",
    "InputSource",
    "MailboxSource",
    "ReplaySource",
    "Controller",
]

ENABLE_BUTTON = 0x01  # toggle: arms in IDLE, disarms in TELEOP
AUX_BUTTON = 0x02     # held together with enable to request a reset


class Mode(Enum):
    INIT = "INIT"
    IDLE = "IDLE"
    TELEOP = "TELEOP"
    FAULT = "FAULT"


class EventKind(Enum):
    INIT_OK = "INIT_OK"
    INIT_FAIL = "INIT_FAIL"
    ENABLE_PRESSED = "ENABLE_PRESSED"
    DISABLE_PRESSED = "DISABLE_PRESSED"
    FAULT_RAISED = "FAULT_RAISED"
    RESET_SEQUENCE = "RESET_SEQUENCE"
    TICK = "TICK"


class FaultCause(Enum):
    DRIVER_ABSENT = "DRIVER_ABSENT"
    INPUT_OPEN_FAIL = "INPUT_OPEN_FAIL"
    BUS_TIMEOUT = "BUS_TIMEOUT"
    ENCODER_IMPLAUSIBLE = "ENCODER_IMPLAUSIBLE"
    COMMAND_NOT_FINITE = "COMMAND_NOT_FINITE"
    INPUT_LOST = "INPUT_LOST"


@dataclass(frozen=True)
class Event:
    kind: EventKind
    cause: FaultCause | None = None


# The complete transition graph.  Pairs not listed leave the mode unchanged;
# in particular RESET_SEQUENCE is honored only in FAULT.
TRANSITIONS: dict[tuple[Mode, EventKind], Mode] = {
    (Mode.INIT, EventKind.INIT_OK): Mode.IDLE,
    (Mode.INIT, EventKind.INIT_FAIL): Mode.FAULT,
    (Mode.IDLE, EventKind.ENABLE_PRESSED): Mode.TELEOP,
    (Mode.TELEOP, EventKind.DISABLE_PRESSED): Mode.IDLE,
    (Mode.INIT, EventKind.FAULT_RAISED): Mode.FAULT,
    (Mode.IDLE, EventKind.FAULT_RAISED): Mode.FAULT,
    (Mode.TELEOP, EventKind.FAULT_RAISED): Mode.FAULT,
    (Mode.FAULT, EventKind.FAULT_RAISED): Mode.FAULT,
    (Mode.FAULT, EventKind.RESET_SEQUENCE): Mode.INIT,
}


def next_mode(mode: Mode, kind: EventKind) -> Mode:
    """Pure transition function over the graph above."""
    return TRANSITIONS.get((mode, kind), mode)


@dataclass(frozen=True)
class ControlConfig:
    loop_rate_hz: float = 100.0
    tension_gain: float = 1.0
    opening_limit: float = DEFAULT_OPENING_LIMIT
    reset_hold_s: float = 2.0          # both buttons held this long in FAULT
    soft_limit_lookahead: float = 1.5  # motor time constants of stopping margin

    def __post_init__(self):
        if self.loop_rate_hz <= 0.0:
            raise ValueError("loop_rate_hz must be positive")
        if self.tension_gain < 1.0:
            raise ValueError("tension_gain must be >= 1")

    @property
    def dt(self) -> float:
        return 1.0 / self.loop_rate_hz


@dataclass(frozen=True)
class ControllerState:
    """Immutable snapshot published after each tick."""

    mode: Mode
    tick: int
    last_command: JointVelocityCommand
    estimated: InstrumentState
    faults: tuple[FaultCause, ...] = ()


class InputSource:
    """Operator-input seam the loop polls once per tick.

    poll() returns the latest raw sample (latest-value mailbox semantics),
    poll_events() drains out-of-band events such as wire-protocol enable
    requests.  The base class is a null device that is always connected.
    """

    def open(self) -> None:
        pass

    def close(self) -> None:
        pass

    @property
    def connected(self) -> bool:
        return True

    def poll(self) -> RawAxes:
        return RawAxes()

    def poll_events(self) -> list[Event]:
        return []


class MailboxSource(InputSource):
    """Thread-safe latest-value slot plus an event queue.

    A producer (the console bridge, or a test) overwrites the slot at its
    own rate; the control loop reads whatever is newest.  Dropped samples
    are intentional.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._raw = RawAxes()
        self._events: deque[Event] = deque()
        self._connected = True

    def set_axes(self, raw: RawAxes) -> None:
        with self._lock:
            self._raw = raw

    def post(self, event: Event) -> None:
        with self._lock:
            self._events.append(event)

    def set_connected(self, connected: bool) -> None:
        with self._lock:
            self._connected = connected

    @property
    def connected(self) -> bool:
        with self._lock:
            return self._connected

    def poll(self) -> RawAxes:
        with self._lock:
            return self._raw

    def poll_events(self) -> list[Event]:
        with self._lock:
            drained = list(self._events)
            self._events.clear()
        return drained


class ReplaySource(InputSource):
    """Feeds a prerecorded raw-axes sequence, one sample per poll.

    Holds the final sample once exhausted so a loop can run past the end.
    """

    def __init__(self, samples: list[RawAxes]):
        if not samples:
            raise ValueError("replay needs at least one sample")
        self._samples = list(samples)
        self._index = 0

    @property
    def exhausted(self) -> bool:
        return self._index >= len(self._samples)

    def poll(self) -> RawAxes:
        raw = self._samples[min(self._index, len(self._samples) - 1)]
        self._index += 1
        return raw


class Controller:
    """Owns the pipeline, plant and mode logic; advanced by tick()."""

    def __init__(
        self,
        geom: GripperGeometry,
        flexure: FlexureGeometry,
        pipeline_cfg: PipelineConfig = PipelineConfig(),
        control: ControlConfig = ControlConfig(),
        motor_params: MotorParams = MotorParams(),
        trans: Transmission = Transmission(),
        source: InputSource | None = None,
        telemetry=None,
        probe_ok: bool = True,
    ):
        self.geom = geom
        self.flexure = flexure
        self.control = control
        self.pipeline = InputPipeline(pipeline_cfg)
        self.plant = InstrumentPlant(geom, flexure, motor_params, trans,
                                     opening_limit=control.opening_limit,
                                     probe_ok=probe_ok)
        self.source = source if source is not None else InputSource()
        self.telemetry = telemetry  # callable invoked with each TelemetryRecord
        self.mode = Mode.INIT
        self.tick_count = 0
        self.last_command = ZERO_COMMAND
        self.estimated = rest_state(geom)
        self.faults: list[FaultCause] = []
        self._prev_ticks = {mid: 0 for mid in MotorId}
        self._buttons_prev = 0
        self._reset_hold = 0.0
        self._reset_latched = False

    # ---- mode machinery ----------------------------------------------

    @property
    def state(self) -> ControllerState:
        return ControllerState(mode=self.mode, tick=self.tick_count,
                               last_command=self.last_command,
                               estimated=self.estimated,
                               faults=tuple(self.faults))

    def initialize(self) -> Mode:
        """Startup checks: driver probe, limit registration, input open."""
        self.mode = Mode.INIT
        self.faults.clear()
        self.last_command = ZERO_COMMAND
        self.pipeline.reset()
        causes: list[FaultCause] = []
        try:
            self.plant.bus.probe()
        except BusError:
            causes.append(FaultCause.DRIVER_ABSENT)
        else:
            # Safe default limits: every channel explicitly targeted to zero.
            self._send_zero_targets()
        try:
            self.source.open()
        except Exception:
            causes.append(FaultCause.INPUT_OPEN_FAIL)
        if causes:
            self.faults.extend(causes)
            self._apply(Event(EventKind.INIT_FAIL, causes[0]))
        else:
            self._apply(Event(EventKind.INIT_OK))
        return self.mode

    def dispatch(self, event: Event) -> Mode:
        """Feed one event through the transition graph."""
        self._apply(event)
        return self.mode

    def _apply(self, event: Event) -> None:
        if (event.kind is EventKind.FAULT_RAISED and event.cause is not None
                and event.cause not in self.faults):
            self.faults.append(event.cause)
        prev = self.mode
        new = next_mode(prev, event.kind)
        if new is prev:
            return
        self.mode = new
        if new is Mode.TELEOP:
            # Arm from a clean slate so no stale deflection replays.
            self.pipeline.reset()
        else:
            self._zero_outputs()
        if new is Mode.INIT:
            # A reset sequence re-runs the startup checks immediately.
            self.initialize()

    def _fault(self, cause: FaultCause) -> None:
        self._apply(Event(EventKind.FAULT_RAISED, cause))

    def _zero_outputs(self) -> None:
        self.last_command = ZERO_COMMAND
        self._send_zero_targets()

    def _send_zero_targets(self) -> None:
        if not self.plant.bus.initialized:
            return
        for mid in MotorId:
            driver, channel = MOTOR_ADDRESS[mid]
            try:
                self.plant.bus.send_speed(MotorBusCommand(driver, channel, 0.0))
            except BusError:
                # Best effort while entering a safe mode; the fault that got
                # us here is already latched.
                self.plant.motors[mid].set_target(0.0)

    # ---- per-tick cycle ----------------------------------------------

    def tick(self, dt: float | None = None) -> TelemetryRecord:
        dt = self.control.dt if dt is None else dt
        if dt <= 0.0:
            raise ValueError("dt must be positive")

        # (1) read axes and buttons, drain out-of-band events
        if self.mode is Mode.TELEOP and not self.source.connected:
            self._fault(FaultCause.INPUT_LOST)
        raw = self.source.poll()
        self._handle_buttons(raw.buttons, dt)
        for event in self.source.poll_events():
            self._apply(event)

        # (2)+(3) condition the axes and map to joint velocities
        if self.mode is Mode.TELEOP:
            filtered, cmd = self.pipeline.update(raw)
            if not cmd.is_finite():
                self._fault(FaultCause.COMMAND_NOT_FINITE)
                cmd = ZERO_COMMAND
        else:
            filtered, cmd = self.pipeline.filtered, ZERO_COMMAND

        # (4) soft joint limits; speeds for the antagonistic pair and the
        # direct drives, from the newest pose estimate
        cmd = self._soft_limit(cmd, dt)
        speeds = motor_speed_commands(cmd, self.estimated.q1, self.flexure,
                                      self.plant.trans, self.plant.params,
                                      self.control.tension_gain)

        # (5) read encoders, reconstruct the pose; on implausible counts the
        # last good estimate is kept and the fault latches
        counts = self.plant.encoder_counts()
        if self._plausible(counts, dt):
            try:
                self.estimated = estimate_state(counts, self.geom, self.flexure,
                                                self.plant.trans, self.plant.params,
                                                self.control.opening_limit)
            except RangeError:
                self._fault(FaultCause.ENCODER_IMPLAUSIBLE)
        else:
            self._fault(FaultCause.ENCODER_IMPLAUSIBLE)
        self._prev_ticks = counts

        # (6) transmit; a timeout faults and zeroes within this same tick
        if self.mode is Mode.TELEOP:
            try:
                for mid, speed in speeds.items():
                    driver, channel = MOTOR_ADDRESS[mid]
                    self.plant.bus.send_speed(MotorBusCommand(driver, channel, speed))
            except BusTimeoutError:
                self._fault(FaultCause.BUS_TIMEOUT)
            except BusError:
                self._fault(FaultCause.COMMAND_NOT_FINITE)
            else:
                self.last_command = cmd

        self.plant.step(dt)
        record = TelemetryRecord(
            tick=self.tick_count,
            mode=self.mode.value,
            raw=raw,
            filtered=filtered,
            command=self.last_command,
            estimated=self.estimated,
            faults=tuple(c.value for c in self.faults),
        )
        if self.telemetry is not None:
            self.telemetry(record)
        self.tick_count += 1
        return record

    def run(self, ticks: int, dt: float | None = None) -> list[TelemetryRecord]:
        return [self.tick(dt) for _ in range(ticks)]

    # ---- helpers ------------------------------------------------------

    def _handle_buttons(self, buttons: int, dt: float) -> None:
        pressed = buttons & ~self._buttons_prev
        if pressed & ENABLE_BUTTON and not buttons & AUX_BUTTON:
            if self.mode is Mode.IDLE:
                self._apply(Event(EventKind.ENABLE_PRESSED))
            elif self.mode is Mode.TELEOP:
                self._apply(Event(EventKind.DISABLE_PRESSED))
        if buttons & ENABLE_BUTTON and buttons & AUX_BUTTON:
            self._reset_hold += dt
            if (self._reset_hold >= self.control.reset_hold_s
                    and not self._reset_latched):
                self._reset_latched = True
                self._apply(Event(EventKind.RESET_SEQUENCE))
        else:
            self._reset_hold = 0.0
            self._reset_latched = False
        self._buttons_prev = buttons

    def _soft_limit(self, cmd: JointVelocityCommand, dt: float) -> JointVelocityCommand:
        """Zero any command that would run a limited joint past its range
        within the stopping horizon (one tick plus a few time constants)."""
        horizon = dt + self.control.soft_limit_lookahead * self.plant.params.tau
        q1dot, q3dot = cmd.q1dot, cmd.q3dot
        if q1dot > 0.0 and self.estimated.q1 + q1dot * horizon > self.flexure.max_bend:
            q1dot = 0.0
        elif q1dot < 0.0 and self.estimated.q1 + q1dot * horizon < 0.0:
            q1dot = 0.0
        lo, hi = self.plant.q3_range
        if q3dot > 0.0 and self.estimated.q3 + q3dot * horizon > hi:
            q3dot = 0.0
        elif q3dot < 0.0 and self.estimated.q3 + q3dot * horizon < lo:
            q3dot = 0.0
        if q1dot == cmd.q1dot and q3dot == cmd.q3dot:
            return cmd
        return JointVelocityCommand(q1dot, cmd.q2dot, q3dot, cmd.q4dot)

    def _plausible(self, counts: dict[MotorId, int], dt: float) -> bool:
        """Reject encoder jumps faster than 1.5x the fastest possible shaft."""
        limit = 1.5 * self.plant.params.omega_max * dt / 360.0 * self.plant.params.ticks_per_rev
        allowed = max(1, math.ceil(limit))
        return all(abs(ticks - self._prev_ticks[mid]) <= allowed
                   for mid, ticks in counts.items())
