"""Console bridge: one operator session over a websocket, wired into the
control loop through the latest-value mailbox.

The bridge never drives the loop; it translates session frames into mailbox
writes and out-of-band events, and publishes decimated state snapshots the
loop hands it after each tick.  A slow or dead client cannot stall the loop:
snapshots go through a latest-wins slot drained by a sender thread.  If the
session drops while the loop is in TELEOP, the source reports disconnected
and the loop faults within the next tick.
"""

from __future__ import annotations

import threading

from websockets.exceptions import ConnectionClosed
from websockets.sync.server import serve

from .actuation import MotorId
from .errors import ProtocolError
from .fsm import Controller, Event, EventKind, MailboxSource
from .pipeline import RawAxes
from .protocol import AXES_FIELDS, encode, make_error, make_hello, make_state, parse
from .telemetry import TelemetryRecord

__all__ = ["ConsoleSource", "ConsoleBridge", "snapshot_from_record"]


class ConsoleSource(MailboxSource):
    """Mailbox fed by the bridge; disconnected until a session attaches."""

    def __init__(self):
        super().__init__()
        self.set_connected(False)

    def attach(self) -> None:
        self.set_axes(RawAxes())
        self.set_connected(True)

    def detach(self) -> None:
        self.set_connected(False)


def snapshot_from_record(record: TelemetryRecord) -> dict:
    est = record.estimated
    return make_state(
        tick=record.tick, mode=record.mode,
        q1=est.q1, q2=est.q2, q3=est.q3, q4=est.q4,
        theta_total=est.jaw.total_angle, tip_width=est.jaw.tip_width,
        faults=record.faults,
    )


class ConsoleBridge:
    """Serves at most one operator session and relays both directions."""

    def __init__(
        self,
        controller: Controller,
        source: ConsoleSource,
        host: str = "127.0.0.1",
        port: int = 0,
        snapshot_every: int = 5,
        allow_fault_inject: bool = False,
    ):
        if snapshot_every < 1:
            raise ValueError("snapshot_every must be >= 1")
        self.controller = controller
        self.source = source
        self.host = host
        self.snapshot_every = snapshot_every
        self.allow_fault_inject = allow_fault_inject
        self._requested_port = port
        self._server = None
        self._server_thread: threading.Thread | None = None
        self._sender_thread: threading.Thread | None = None
        self._session = None
        self._session_lock = threading.Lock()
        self._cond = threading.Condition()
        self._pending: dict | None = None
        self._stopped = False

    # ---- lifecycle ----------------------------------------------------

    def start(self) -> None:
        self._server = serve(self._handle_session, self.host, self._requested_port)
        self._server_thread = threading.Thread(
            target=self._server.serve_forever, name="console-bridge", daemon=True)
        self._server_thread.start()
        self._sender_thread = threading.Thread(
            target=self._sender_loop, name="console-snapshots", daemon=True)
        self._sender_thread.start()

    @property
    def port(self) -> int:
        sock = getattr(self._server, "socket", None)
        if sock is None:
            return self._requested_port
        return sock.getsockname()[1]

    def stop(self) -> None:
        with self._cond:
            self._stopped = True
            self._cond.notify_all()
        with self._session_lock:
            session, self._session = self._session, None
        if session is not None:
            try:
                session.close()
            except Exception:
                pass
        if self._server is not None:
            self._server.shutdown()
        if self._server_thread is not None:
            self._server_thread.join(timeout=5.0)
        if self._sender_thread is not None:
            self._sender_thread.join(timeout=5.0)

    # ---- loop-side API --------------------------------------------------

    def publish(self, record: TelemetryRecord) -> None:
        """Called by the control loop after every tick; never blocks on the
        network."""
        if record.tick % self.snapshot_every != 0:
            return
        snapshot = snapshot_from_record(record)
        with self._cond:
            self._pending = snapshot
            self._cond.notify()

    def _sender_loop(self) -> None:
        while True:
            with self._cond:
                while self._pending is None and not self._stopped:
                    self._cond.wait()
                if self._stopped:
                    return
                snapshot, self._pending = self._pending, None
            with self._session_lock:
                session = self._session
            if session is None:
                continue
            try:
                session.send(encode(snapshot))
            except Exception:
                pass  # session teardown is handled by its recv loop

    # ---- session handling -----------------------------------------------

    def _handle_session(self, connection) -> None:
        with self._session_lock:
            if self._session is not None:
                try:
                    connection.send(encode(make_error("another operator session is active")))
                finally:
                    connection.close()
                return
            self._session = connection
        try:
            if not self._expect_hello(connection):
                return
            self.source.attach()
            self._session_loop(connection)
        finally:
            with self._session_lock:
                if self._session is connection:
                    self._session = None
                    self.source.detach()

    def _expect_hello(self, connection) -> bool:
        try:
            msg = parse(connection.recv())
        except ConnectionClosed:
            return False
        except ProtocolError as exc:
            connection.send(encode(make_error(str(exc))))
            connection.close()
            return False
        if msg["kind"] != "hello" or msg.get("role") != "operator":
            connection.send(encode(make_error("expected an operator hello")))
            connection.close()
            return False
        connection.send(encode(make_hello(
            "controller",
            rate_hz=self.controller.control.loop_rate_hz,
            snapshot_hz=self.controller.control.loop_rate_hz / self.snapshot_every,
        )))
        return True

    def _session_loop(self, connection) -> None:
        while True:
            try:
                frame = connection.recv()
            except ConnectionClosed:
                return
            try:
                msg = parse(frame)
            except ProtocolError as exc:
                # Malformed input warns the session and changes nothing.
                try:
                    connection.send(encode(make_error(str(exc))))
                except ConnectionClosed:
                    return
                continue
            self._dispatch(msg, connection)

    def _dispatch(self, msg: dict, connection) -> None:
        kind = msg["kind"]
        if kind == "axes":
            scale = self.controller.pipeline.cfg.device_range
            values = {}
            for name in AXES_FIELDS:
                v = max(-1.0, min(1.0, float(msg[name])))
                values[name] = v * scale
            self.source.set_axes(RawAxes(**values, buttons=int(msg.get("buttons", 0))))
        elif kind == "enable":
            self.source.post(Event(EventKind.ENABLE_PRESSED))
        elif kind == "disable":
            self.source.post(Event(EventKind.DISABLE_PRESSED))
        elif kind == "reset":
            self.source.post(Event(EventKind.RESET_SEQUENCE))
        elif kind == "faultInject":
            self._inject(msg, connection)
        # hello/state/error frames from an established client are ignored


    def _inject(self, msg: dict, connection) -> None:
        if not self.allow_fault_inject:
            try:
                connection.send(encode(make_error("fault injection disabled")))
            except ConnectionClosed:
                pass
            return
        bus = self.controller.plant.bus
        fault = msg["fault"]
        if fault == "busTimeout":
            bus.inject_timeout(int(msg.get("magnitude", 1)))
        elif fault == "encoderStuck":
            bus.inject_encoder_stuck(MotorId.GRIPPER)
        elif fault == "encoderJump":
            bus.inject_encoder_jump(MotorId.GRIPPER, int(msg.get("magnitude", 500)))
