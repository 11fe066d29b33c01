"""Trace file round trips, byte identity, and malformed-input reporting."""
import pytest

from lapflex.actuation import InstrumentState
from lapflex.errors import TraceFormatError
from lapflex.gripper import jaw_state
from lapflex.pipeline import JointVelocityCommand, NormalizedAxes, RawAxes
from lapflex.telemetry import (
    TRACE_COLUMNS,
    TRACE_UNITS,
    TelemetryRecord,
    read_trace,
    records_equal_bytes,
    write_trace,
)


def record_at(geom, tick: int, q3: float, mode: str = "TELEOP",
              faults: tuple = ()) -> TelemetryRecord:
    return TelemetryRecord(
        tick=tick,
        mode=mode,
        raw=RawAxes(tx=0.1, tz=-175.3, ry=42.0, buttons=1),
        filtered=NormalizedAxes(tz=-0.3171428571428571, ry=0.1),
        command=JointVelocityCommand(q3dot=-0.6342857142857142),
        estimated=InstrumentState(q1=12.5, q2=359.9, q3=q3, q4=0.0,
                                  jaw=jaw_state(geom, q3)),
        faults=faults,
    )


def sample_records(geom):
    return [
        record_at(geom, 0, 0.0, mode="IDLE"),
        record_at(geom, 1, 1.2345678901234567),
        record_at(geom, 2, 5.0, faults=("BUS_TIMEOUT", "INPUT_LOST")),
    ]


def test_round_trip_preserves_records(tmp_path, geom):
    path = str(tmp_path / "trace.csv")
    records = sample_records(geom)
    write_trace(path, records)
    assert read_trace(path, geom) == records


def test_rewrite_is_byte_identical(tmp_path, geom):
    a = str(tmp_path / "a.csv")
    b = str(tmp_path / "b.csv")
    write_trace(a, sample_records(geom))
    write_trace(b, read_trace(a, geom))
    assert records_equal_bytes(a, b)


def test_file_layout(tmp_path, geom):
    path = str(tmp_path / "trace.csv")
    write_trace(path, sample_records(geom))
    data = open(path, "rb").read()
    assert b"\r" not in data  # LF endings on every platform
    lines = data.decode().splitlines()
    assert lines[0].split(",") == list(TRACE_COLUMNS)
    assert lines[1].split(",") == list(TRACE_UNITS)
    assert len(lines) == 2 + 3
    assert lines[4].split(",")[-1] == "BUS_TIMEOUT;INPUT_LOST"


def test_empty_and_headerless_files(tmp_path, geom):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(TraceFormatError) as err:
        read_trace(str(empty), geom)
    assert err.value.line == 1

    bad_header = tmp_path / "bad.csv"
    bad_header.write_text("nope,nope\n")
    with pytest.raises(TraceFormatError) as err:
        read_trace(str(bad_header), geom)
    assert err.value.line == 1


def test_error_carries_line_number(tmp_path, geom):
    path = str(tmp_path / "trace.csv")
    write_trace(path, sample_records(geom))
    lines = open(path).read().splitlines()

    truncated = tmp_path / "short.csv"
    truncated.write_text("\n".join(lines[:3] + [lines[3][:40]]) + "\n")
    with pytest.raises(TraceFormatError) as err:
        read_trace(str(truncated), geom)
    assert err.value.line == 4

    garbled = tmp_path / "garbled.csv"
    row = lines[4].split(",")
    row[2] = "not-a-number"
    garbled.write_text("\n".join(lines[:4] + [",".join(row)]) + "\n")
    with pytest.raises(TraceFormatError) as err:
        read_trace(str(garbled), geom)
    assert err.value.line == 5
    assert "unparseable" in str(err.value)


def test_inconsistent_derived_columns_rejected(tmp_path, geom):
    path = str(tmp_path / "trace.csv")
    write_trace(path, sample_records(geom))
    lines = open(path).read().splitlines()
    row = lines[3].split(",")
    idx = TRACE_COLUMNS.index("theta_total")
    row[idx] = "99.9"  # contradicts the stored q3
    doctored = tmp_path / "doctored.csv"
    doctored.write_text("\n".join(lines[:3] + [",".join(row)]) + "\n")
    with pytest.raises(TraceFormatError) as err:
        read_trace(str(doctored), geom)
    assert "inconsistent" in str(err.value)


def test_unreachable_slider_rejected(tmp_path, geom):
    path = str(tmp_path / "trace.csv")
    write_trace(path, sample_records(geom))
    lines = open(path).read().splitlines()
    row = lines[3].split(",")
    row[TRACE_COLUMNS.index("est_q3")] = "5000.0"
    doctored = tmp_path / "doctored.csv"
    doctored.write_text("\n".join(lines[:3] + [",".join(row)]) + "\n")
    with pytest.raises(TraceFormatError):
        read_trace(str(doctored), geom)
