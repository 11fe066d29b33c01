"""Per-tick telemetry records and lossless CSV trace files.

A trace file is UTF-8 with LF line endings: one header row, one units row,
then one row per tick.  Floats are written with repr() so a record survives
a write/read round-trip bit-identically, which is what makes recorded runs
replayable and comparable byte-for-byte.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

from .actuation import InstrumentState
from .errors import GeometryError, RangeError, TraceFormatError
from .gripper import GripperGeometry, jaw_state
from .pipeline import JointVelocityCommand, NormalizedAxes, RawAxes

__all__ = [
    "TelemetryRecord",
    "TRACE_COLUMNS",
    "TRACE_UNITS",
    "TraceWriter",
    "TraceReader",
    "read_trace",
    "write_trace",
    "records_equal_bytes",
]

TRACE_COLUMNS = (
    "tick", "mode",
    "raw_tx", "raw_ty", "raw_tz", "raw_rx", "raw_ry", "raw_rz", "buttons",
    "fil_tx", "fil_ty", "fil_tz", "fil_rx", "fil_ry", "fil_rz",
    "cmd_q1", "cmd_q2", "cmd_q3", "cmd_q4",
    "est_q1", "est_q2", "est_q3", "est_q4", "theta_total", "tip_width",
    "faults",
)

TRACE_UNITS = (
    "count", "enum",
    "counts", "counts", "counts", "counts", "counts", "counts", "bitset",
    "norm", "norm", "norm", "norm", "norm", "norm",
    "deg/s", "deg/s", "mm/s", "deg/s",
    "deg", "deg", "mm", "deg", "deg", "mm",
    "labels",
)


@dataclass(frozen=True)
class TelemetryRecord:
    """Everything the control loop knew and decided during one tick."""

    tick: int
    mode: str
    raw: RawAxes
    filtered: NormalizedAxes
    command: JointVelocityCommand
    estimated: InstrumentState
    faults: tuple[str, ...] = ()

    def to_row(self) -> list[str]:
        r, f, c, e = self.raw, self.filtered, self.command, self.estimated
        return [
            str(self.tick), self.mode,
            repr(r.tx), repr(r.ty), repr(r.tz), repr(r.rx), repr(r.ry), repr(r.rz),
            str(r.buttons),
            repr(f.tx), repr(f.ty), repr(f.tz), repr(f.rx), repr(f.ry), repr(f.rz),
            repr(c.q1dot), repr(c.q2dot), repr(c.q3dot), repr(c.q4dot),
            repr(e.q1), repr(e.q2), repr(e.q3), repr(e.q4),
            repr(e.jaw.total_angle), repr(e.jaw.tip_width),
            ";".join(self.faults),
        ]

    @staticmethod
    def from_row(row: list[str], geom: GripperGeometry, line: int) -> "TelemetryRecord":
        if len(row) != len(TRACE_COLUMNS):
            raise TraceFormatError(
                f"expected {len(TRACE_COLUMNS)} fields, got {len(row)}", line)
        try:
            tick = int(row[0])
            mode = row[1]
            raw = RawAxes(*(float(v) for v in row[2:8]), buttons=int(row[8]))
            filtered = NormalizedAxes(*(float(v) for v in row[9:15]))
            command = JointVelocityCommand(*(float(v) for v in row[15:19]))
            q1, q2, q3, q4 = (float(v) for v in row[19:23])
        except ValueError as exc:
            raise TraceFormatError(f"unparseable field: {exc}", line) from exc
        # theta_total/tip_width are derived; recompute so the record is
        # internally consistent, then verify the stored values match.
        try:
            jaw = jaw_state(geom, q3)
        except (GeometryError, RangeError) as exc:
            raise TraceFormatError(f"slider value {q3!r} unreachable: {exc}", line) from exc
        estimated = InstrumentState(q1=q1, q2=q2, q3=q3, q4=q4, jaw=jaw)
        for col, stored, computed in (
            ("theta_total", row[23], estimated.jaw.total_angle),
            ("tip_width", row[24], estimated.jaw.tip_width),
        ):
            try:
                value = float(stored)
            except ValueError as exc:
                raise TraceFormatError(f"unparseable {col}: {stored!r}", line) from exc
            if value != computed:
                raise TraceFormatError(
                    f"{col} {stored} inconsistent with q3 {q3!r}", line)
        faults = tuple(row[25].split(";")) if row[25] else ()
        return TelemetryRecord(tick=tick, mode=mode, raw=raw, filtered=filtered,
                               command=command, estimated=estimated, faults=faults)


class TraceWriter:
    """Streams telemetry records to a CSV trace file."""

    def __init__(self, path: str):
        self.path = path
        self._fh = open(path, "w", encoding="utf-8", newline="")
        self._writer = csv.writer(self._fh, lineterminator="\n")
        self._writer.writerow(TRACE_COLUMNS)
        self._writer.writerow(TRACE_UNITS)

    def write(self, record: TelemetryRecord) -> None:
        self._writer.writerow(record.to_row())

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "TraceWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


class TraceReader:
    """Iterates telemetry records from a trace file.

    Malformed content raises TraceFormatError carrying the 1-based line
    number, so a truncated file reports exactly where it broke off.
    """

    def __init__(self, path: str, geom: GripperGeometry):
        self.path = path
        self.geom = geom

    def __iter__(self):
        with open(self.path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise TraceFormatError("empty trace file", 1)
            if tuple(header) != TRACE_COLUMNS:
                raise TraceFormatError("unrecognized header row", 1)
            units = next(reader, None)
            if units is None:
                raise TraceFormatError("missing units row", 2)
            for row in reader:
                if not row:
                    continue
                yield TelemetryRecord.from_row(row, self.geom, reader.line_num)


def write_trace(path: str, records) -> None:
    with TraceWriter(path) as writer:
        for record in records:
            writer.write(record)


def read_trace(path: str, geom: GripperGeometry) -> list[TelemetryRecord]:
    return list(TraceReader(path, geom))


def records_equal_bytes(path_a: str, path_b: str) -> bool:
    """True when two trace files are byte-identical."""
    with open(path_a, "rb") as a, open(path_b, "rb") as b:
        return a.read() == b.read()
