"""Wire protocol for the operator console: one JSON object per frame.

Transport is a full-duplex web socket; each frame carries exactly one
message.  The schemas here are the single source of truth on the Python
side and are frozen in PROTOCOL.md; the console implements the same shapes
independently.  Axis values travel normalized to [-1, 1].
"""

from __future__ import annotations

import json
import math

from .errors import ProtocolError

__all__ = [
    "PROTOCOL_VERSION",
    "AXES_FIELDS",
    "FAULT_INJECT_KINDS",
    "encode",
    "parse",
    "make_hello",
    "make_axes",
    "make_state",
    "make_error",
]

PROTOCOL_VERSION = 1

AXES_FIELDS = ("tx", "ty", "tz", "rx", "ry", "rz")

FAULT_INJECT_KINDS = ("busTimeout", "encoderStuck", "encoderJump")

_KINDS = ("hello", "axes", "enable", "disable", "reset", "state",
          "faultInject", "error")


def encode(message: dict) -> str:
    return json.dumps(message, separators=(",", ":"), sort_keys=True)


def make_hello(role: str, rate_hz: float | None = None,
               snapshot_hz: float | None = None) -> dict:
    msg = {"kind": "hello", "role": role, "version": PROTOCOL_VERSION}
    if rate_hz is not None:
        msg["rateHz"] = rate_hz
    if snapshot_hz is not None:
        msg["snapshotHz"] = snapshot_hz
    return msg


def make_axes(tx=0.0, ty=0.0, tz=0.0, rx=0.0, ry=0.0, rz=0.0, buttons=0) -> dict:
    return {"kind": "axes", "tx": tx, "ty": ty, "tz": tz,
            "rx": rx, "ry": ry, "rz": rz, "buttons": buttons}


def make_state(tick: int, mode: str, q1: float, q2: float, q3: float,
               q4: float, theta_total: float, tip_width: float,
               faults: tuple[str, ...]) -> dict:
    return {
        "kind": "state", "tick": tick, "mode": mode,
        "q1": q1, "q2": q2, "q3": q3, "q4": q4,
        "thetaTotal": theta_total, "tipWidth": tip_width,
        "faults": list(faults),
    }


def make_error(message: str) -> dict:
    return {"kind": "error", "message": message}


def _require(msg: dict, name: str, kinds) -> object:
    if name not in msg:
        raise ProtocolError(f"{msg['kind']}: missing field {name}")
    value = msg[name]
    if not isinstance(value, kinds) or isinstance(value, bool):
        raise ProtocolError(f"{msg['kind']}: field {name} has wrong type")
    return value


def _finite_number(msg: dict, name: str) -> float:
    value = _require(msg, name, (int, float))
    if not math.isfinite(value):
        raise ProtocolError(f"{msg['kind']}: field {name} is not finite")
    return float(value)


def parse(text) -> dict:
    """Decode and schema-check one frame; raises ProtocolError on anything
    that is not a well-formed message of a known kind."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ProtocolError("frame is not valid UTF-8") from exc
    try:
        msg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"frame is not valid JSON: {exc}") from exc
    if not isinstance(msg, dict):
        raise ProtocolError("frame must be a JSON object")
    kind = msg.get("kind")
    if kind not in _KINDS:
        raise ProtocolError(f"unknown message kind {kind!r}")

    if kind == "hello":
        role = _require(msg, "role", str)
        if role not in ("operator", "controller"):
            raise ProtocolError(f"hello: unknown role {role!r}")
        if "version" in msg and msg["version"] != PROTOCOL_VERSION:
            raise ProtocolError(f"hello: unsupported version {msg['version']!r}")
    elif kind == "axes":
        for name in AXES_FIELDS:
            _finite_number(msg, name)
        if "buttons" in msg:
            buttons = _require(msg, "buttons", int)
            if buttons < 0:
                raise ProtocolError("axes: buttons must be non-negative")
    elif kind == "state":
        _require(msg, "tick", int)
        _require(msg, "mode", str)
        for name in ("q1", "q2", "q3", "q4", "thetaTotal", "tipWidth"):
            _finite_number(msg, name)
        faults = _require(msg, "faults", list)
        if not all(isinstance(f, str) for f in faults):
            raise ProtocolError("state: faults must be strings")
    elif kind == "faultInject":
        fault = _require(msg, "fault", str)
        if fault not in FAULT_INJECT_KINDS:
            raise ProtocolError(f"faultInject: unknown fault {fault!r}")
        if "magnitude" in msg:
            _require(msg, "magnitude", int)
    elif kind == "error":
        _require(msg, "message", str)
    # enable/disable/reset carry no payload
    return msg
