"""Model-versus-measurement comparison with mean absolute error.

Reference points come either from CAD measurements (slider set-point plus
measured jaw angle) or from a motion-capture marker stream reduced by the
marker pipeline.  Out-of-range references are excluded but counted, never
silently dropped.  All delimited files are UTF-8 with LF endings, one
header row and one units row; floats use repr() for lossless round-trips.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .gripper import (
    GripperGeometry,
    force_transmission,
    jaw_state,
    valid_displacement_range,
)
from .markers import MarkerFrame, MARKER_LABELS, recover_pairs

__all__ = [
    "Source",
    "ReferenceConfig",
    "ValidationReport",
    "SWEEP_COLUMNS",
    "sweep",
    "validate",
    "validate_mocap",
    "read_references",
    "write_references",
    "read_mocap",
    "write_mocap",
    "write_report",
    "write_sweep",
]


class Source(Enum):
    CAD = "CAD"
    MOCAP = "MOCAP"


@dataclass(frozen=True)
class ReferenceConfig:
    """One measured configuration: slider set-point and jaw angle."""

    slider: float
    total_angle: float

    def __post_init__(self):
        if not (math.isfinite(self.slider) and math.isfinite(self.total_angle)):
            raise ValueError("reference values must be finite")


@dataclass(frozen=True)
class ValidationReport:
    source: Source
    sliders: tuple[float, ...]
    pairs: tuple[tuple[float, float], ...]  # (reference deg, model deg)
    errors: tuple[float, ...]
    mae: float
    max_err: float
    excluded: tuple[ReferenceConfig, ...]
    curve: tuple[tuple[float, float], ...]  # model (slider mm, angle deg)


def model_curve(geom: GripperGeometry, n: int = 200) -> tuple[tuple[float, float], ...]:
    lo, hi = valid_displacement_range(geom)
    return tuple((float(dl), jaw_state(geom, float(dl)).total_angle)
                 for dl in np.linspace(lo, hi, n))


def validate(
    references: list[ReferenceConfig],
    geom: GripperGeometry,
    source: Source,
    curve_points: int = 200,
) -> ValidationReport:
    """Compare measured jaw angles against the model at each slider value."""
    if not references:
        raise ValueError("reference list is empty")
    lo, hi = valid_displacement_range(geom)
    sliders: list[float] = []
    pairs: list[tuple[float, float]] = []
    errors: list[float] = []
    excluded: list[ReferenceConfig] = []
    for ref in references:
        if not lo <= ref.slider <= hi:
            excluded.append(ref)
            continue
        model = jaw_state(geom, ref.slider).total_angle
        sliders.append(ref.slider)
        pairs.append((ref.total_angle, model))
        errors.append(abs(ref.total_angle - model))
    if not errors:
        raise ValueError("every reference fell outside the model's range")
    mae = math.fsum(errors) / len(errors)
    return ValidationReport(
        source=source,
        sliders=tuple(sliders),
        pairs=tuple(pairs),
        errors=tuple(errors),
        mae=mae,
        max_err=max(errors),
        excluded=tuple(excluded),
        curve=model_curve(geom, curve_points),
    )


def validate_mocap(
    frames: list[MarkerFrame],
    geom: GripperGeometry,
    curve_points: int = 200,
) -> ValidationReport:
    """Reduce a marker stream to references and validate.

    The first frame is the closed-jaw baseline; each later frame yields a
    recovered (slider, angle) reference.
    """
    if len(frames) < 2:
        raise ValueError("need a baseline frame plus at least one sample")
    baseline, rest = frames[0], frames[1:]
    references = [ReferenceConfig(slider=s, total_angle=a)
                  for s, a in recover_pairs(rest, baseline)]
    return validate(references, geom, Source.MOCAP, curve_points)


# ---- sweep table -------------------------------------------------------

SWEEP_COLUMNS = ("slider", "alpha", "alpha_a", "alpha_b",
                 "theta_total", "tip_width", "tip_force_ratio")
SWEEP_UNITS = ("mm", "deg", "deg", "deg", "deg", "mm", "ratio")


def sweep(geom: GripperGeometry, n: int = 200) -> list[tuple[float, ...]]:
    """Full linkage table over the reachable slider range."""
    lo, hi = valid_displacement_range(geom)
    rows = []
    for dl in np.linspace(lo, hi, n):
        s = jaw_state(geom, float(dl))
        f = force_transmission(geom, float(dl), 1.0)
        rows.append((s.slider, s.alpha, s.alpha_a, s.alpha_b,
                     s.total_angle, s.tip_width, f.tip_force))
    return rows


# ---- delimited files ---------------------------------------------------

def _open_out(path: str):
    return open(path, "w", encoding="utf-8", newline="")


def write_sweep(path: str, rows) -> None:
    with _open_out(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        w.writerow(SWEEP_UNITS)
        for row in rows:
            w.writerow([repr(float(v)) for v in row])


def write_references(path: str, references: list[ReferenceConfig]) -> None:
    with _open_out(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("slider", "total_angle"))
        w.writerow(("mm", "deg"))
        for ref in references:
            w.writerow((repr(ref.slider), repr(ref.total_angle)))


def read_references(path: str) -> list[ReferenceConfig]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != ("slider", "total_angle"):
            raise ValueError(f"{path}: expected header 'slider,total_angle'")
        next(reader, None)  # units row
        refs = []
        for row in reader:
            if not row:
                continue
            if len(row) != 2:
                raise ValueError(f"{path}: bad reference row {row!r}")
            refs.append(ReferenceConfig(float(row[0]), float(row[1])))
    return refs


_MOCAP_HEADER = ("timestamp",) + tuple(
    f"{label}_{axis}" for label in MARKER_LABELS for axis in "xyz")


def write_mocap(path: str, frames: list[MarkerFrame]) -> None:
    with _open_out(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_MOCAP_HEADER)
        w.writerow(("s",) + ("mm",) * 12)
        for frame in frames:
            row = [repr(frame.timestamp)]
            for label in MARKER_LABELS:
                row.extend(repr(v) for v in frame.points[label])
            w.writerow(row)


def read_mocap(path: str) -> list[MarkerFrame]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != _MOCAP_HEADER:
            raise ValueError(f"{path}: unrecognized marker-file header")
        next(reader, None)  # units row
        frames = []
        for row in reader:
            if not row:
                continue
            if len(row) != 13:
                raise ValueError(f"{path}: bad marker row {row!r}")
            values = [float(v) for v in row]
            points = {label: tuple(values[1 + 3 * i: 4 + 3 * i])
                      for i, label in enumerate(MARKER_LABELS)}
            frames.append(MarkerFrame(timestamp=values[0], points=points))
    return frames


def write_report(path: str, report: ValidationReport) -> None:
    """Per-point table plus summary rows, one delimited file."""
    with _open_out(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("record", "slider", "reference", "model", "abs_error"))
        w.writerow(("", "mm", "deg", "deg", "deg"))
        for slider, (ref, model), err in zip(report.sliders, report.pairs,
                                             report.errors):
            w.writerow(("point", repr(slider), repr(ref), repr(model), repr(err)))
        for ref in report.excluded:
            w.writerow(("excluded", repr(ref.slider), repr(ref.total_angle), "", ""))
        w.writerow(("source", report.source.value, "", "", ""))
        w.writerow(("included", str(len(report.errors)), "", "", ""))
        w.writerow(("excluded_count", str(len(report.excluded)), "", "", ""))
        w.writerow(("mae", "", "", "", repr(report.mae)))
        w.writerow(("max_err", "", "", "", repr(report.max_err)))
