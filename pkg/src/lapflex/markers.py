"""Reflective-marker geometry: recover jaw angle and slider travel from
labeled 3D points, plus a synthetic frame generator for experiments.

Four labels: one marker per jaw tip, one on the pivot, one on the moving
flange.  The jaw angle is measured between the two pivot-to-tip vectors;
slider travel is the flange's motion projected on the baseline instrument
axis, so off-axis wobble is discarded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFrameError
from .gripper import GripperGeometry, jaw_state, valid_displacement_range

__all__ = [
    "MARKER_LABELS",
    "MarkerFrame",
    "jaw_angle_from_markers",
    "displacement_from_markers",
    "synth_frame",
    "recover_pairs",
    "noise_experiment",
]

MARKER_LABELS = ("JAW_LEFT_TIP", "JAW_RIGHT_TIP", "PIVOT", "FLANGE")

# Vectors shorter than this (mm) cannot define a direction.
_TINY = 1e-9

# Synthetic rig: flange sits this far behind the pivot along +z at rest.
FLANGE_BASE_MM = 40.0


@dataclass(frozen=True)
class MarkerFrame:
    """One mocap sample: timestamp s, label -> (x, y, z) mm."""

    timestamp: float
    points: dict[str, tuple[float, float, float]] = field(default_factory=dict)

    def __post_init__(self):
        for label in MARKER_LABELS:
            if label not in self.points:
                raise ValueError(f"marker frame missing label {label}")
        cleaned = {}
        for label, xyz in self.points.items():
            xyz = tuple(float(v) for v in xyz)
            if len(xyz) != 3 or not all(map(math.isfinite, xyz)):
                raise ValueError(f"bad coordinates for {label}: {xyz!r}")
            cleaned[label] = xyz
        object.__setattr__(self, "points", cleaned)

    def point(self, label: str) -> np.ndarray:
        return np.asarray(self.points[label], dtype=float)


def jaw_angle_from_markers(frame: MarkerFrame) -> float:
    """Angle in degrees between the two pivot-to-tip vectors."""
    pivot = frame.point("PIVOT")
    v1 = frame.point("JAW_LEFT_TIP") - pivot
    v2 = frame.point("JAW_RIGHT_TIP") - pivot
    n1, n2 = np.linalg.norm(v1), np.linalg.norm(v2)
    if n1 < _TINY or n2 < _TINY:
        raise DegenerateFrameError("jaw marker coincides with the pivot")
    cosine = float(np.dot(v1, v2) / (n1 * n2))
    return math.degrees(math.acos(max(-1.0, min(1.0, cosine))))


def displacement_from_markers(frame: MarkerFrame, baseline: MarkerFrame) -> float:
    """Signed flange travel along the baseline pivot-to-flange axis, mm."""
    axis = baseline.point("FLANGE") - baseline.point("PIVOT")
    norm = np.linalg.norm(axis)
    if norm < _TINY:
        raise DegenerateFrameError("baseline flange coincides with the pivot")
    axis = axis / norm
    return float(np.dot(frame.point("FLANGE") - baseline.point("FLANGE"), axis))


def synth_frame(
    geom: GripperGeometry,
    slider: float,
    rng: np.random.Generator | None = None,
    sigma: float = 0.0,
    timestamp: float = 0.0,
    flange_base: float = FLANGE_BASE_MM,
) -> MarkerFrame:
    """Markers for the forward model at a slider set-point.

    Rig: pivot at the origin, jaws opening about -z in the x-z plane, tips
    one jaw length from the pivot at half the total angle each side, flange
    on +z at flange_base plus the slider travel.  When rng is given, iid
    Gaussian noise is added to every coordinate; the draw is one (4, 3)
    normal block in label order, which keeps seeded streams reproducible.
    """
    half = math.radians(jaw_state(geom, slider).total_angle / 2.0)
    lj = geom.jaw_length
    pts = np.stack([
        lj * np.array([-math.sin(half), 0.0, -math.cos(half)]),
        lj * np.array([math.sin(half), 0.0, -math.cos(half)]),
        np.zeros(3),
        np.array([0.0, 0.0, flange_base + slider]),
    ])
    if rng is not None:
        pts = pts + rng.normal(0.0, sigma, size=(4, 3))
    return MarkerFrame(timestamp=timestamp,
                       points=dict(zip(MARKER_LABELS, (tuple(p) for p in pts))))


def recover_pairs(
    frames: list[MarkerFrame],
    baseline: MarkerFrame,
) -> list[tuple[float, float]]:
    """(slider mm, jaw angle deg) measured from each frame against a
    closed-jaw baseline frame."""
    return [(displacement_from_markers(f, baseline), jaw_angle_from_markers(f))
            for f in frames]


def noise_experiment(
    geom: GripperGeometry,
    sigma: float,
    seed: int,
    n_frames: int = 50,
    slider_lo: float = 0.1,
    slider_hi: float = 5.8,
) -> float:
    """MAE in degrees of the marker pipeline against the forward model with
    marker noise sigma, for one seed.

    Protocol: an independently noised baseline at slider 0, n_frames noised
    frames over [slider_lo, slider_hi], recovered sliders outside the
    model's reachable range excluded, error measured between the recovered
    angle and the model angle at the recovered slider.
    """
    rng = np.random.default_rng(seed)
    baseline = synth_frame(geom, 0.0, rng, sigma)
    lo, hi = valid_displacement_range(geom)
    errors = []
    for slider in np.linspace(slider_lo, slider_hi, n_frames):
        frame = synth_frame(geom, float(slider), rng, sigma)
        recovered = displacement_from_markers(frame, baseline)
        if not lo <= recovered <= hi:
            continue
        measured = jaw_angle_from_markers(frame)
        errors.append(abs(measured - jaw_state(geom, recovered).total_angle))
    if not errors:
        raise DegenerateFrameError("all frames excluded by the range filter")
    return math.fsum(errors) / len(errors)
