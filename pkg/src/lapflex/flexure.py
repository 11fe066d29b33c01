"""Kinematics of the notched flexible element.

The flexure is a monolithic tube with triangular notches acting as discrete
compliant hinges: bending is the sum of notch closures, driven by an
antagonistic flexion/extension tendon pair.  The tendon relation is a
serial-hinge model with rigid segments and a uniform per-notch distribution;
take-up across n hinges of half-turn bend/2n at radial offset r is
2 n r sin(bend / 2n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import GeometryError, RangeError

__all__ = [
    "FlexureGeometry",
    "BendState",
    "DEFAULT_FLEXURE",
    "tendon_from_bend",
    "bend_from_tendon",
    "tendon_rate",
    "antagonistic_speeds",
]


@dataclass(frozen=True)
class FlexureGeometry:
    """Notch pattern and tendon routing of the flexible element.

    notch_half_angle: half-angle of each triangular cut, degrees.
    notches_per_side: hinge count n.
    max_bend: rated total bending angle, degrees.
    tendon_offset: radial distance of the tendon channel from the neutral
    axis, mm.  segment_pitch: axial spacing of notches, mm.
    """

    notch_half_angle: float = 7.5
    notches_per_side: int = 6
    max_bend: float = 90.0
    tendon_offset: float = 3.0
    segment_pitch: float = 5.0

    def __post_init__(self):
        if self.notches_per_side < 1:
            raise GeometryError("need at least one notch per side")
        if self.tendon_offset <= 0.0 or self.segment_pitch <= 0.0:
            raise GeometryError("tendon_offset and segment_pitch must be positive")
        if self.notches_per_side * 2.0 * self.notch_half_angle < self.max_bend:
            raise GeometryError(
                "notch closing capacity does not cover the rated bend: "
                f"{self.notches_per_side} x {2 * self.notch_half_angle} deg < {self.max_bend} deg")

    @property
    def max_flex_tendon(self) -> float:
        """Tendon take-up at the rated bend, mm."""
        n, r = self.notches_per_side, self.tendon_offset
        return 2.0 * n * r * math.sin(math.radians(self.max_bend / (2.0 * n)))


DEFAULT_FLEXURE = FlexureGeometry()


@dataclass(frozen=True)
class BendState:
    """Bend angle, its per-notch distribution, and tendon displacements.

    flex_tendon is the flexion-side shortening, ext_tendon the extension-side
    lengthening; both are non-negative magnitudes (mm).
    """

    bend_angle: float
    per_notch: tuple[float, ...]
    flex_tendon: float
    ext_tendon: float


def tendon_from_bend(geom: FlexureGeometry, bend_angle: float) -> BendState:
    """Tendon displacements for a bend angle, uniform notch distribution."""
    if not 0.0 <= bend_angle <= geom.max_bend:
        raise RangeError(
            f"bend angle {bend_angle} deg outside [0, {geom.max_bend}]")
    n, r = geom.notches_per_side, geom.tendon_offset
    take_up = 2.0 * n * r * math.sin(math.radians(bend_angle / (2.0 * n)))
    return BendState(
        bend_angle=bend_angle,
        per_notch=(bend_angle / n,) * n,
        flex_tendon=take_up,
        ext_tendon=take_up,  # symmetric channel offsets
    )


def bend_from_tendon(geom: FlexureGeometry, flex_tendon: float) -> float:
    """Bend angle (deg) for a flexion-tendon take-up (mm); exact inverse."""
    limit = geom.max_flex_tendon
    if not 0.0 <= flex_tendon <= limit:
        raise RangeError(
            f"tendon displacement {flex_tendon} mm outside [0, {limit:.6f}]")
    n, r = geom.notches_per_side, geom.tendon_offset
    return 2.0 * n * math.degrees(math.asin(flex_tendon / (2.0 * n * r)))


def tendon_rate(geom: FlexureGeometry, bend_angle: float) -> float:
    """Local derivative of tendon take-up w.r.t. bend angle, mm per degree."""
    n, r = geom.notches_per_side, geom.tendon_offset
    return r * math.cos(math.radians(bend_angle / (2.0 * n))) * math.pi / 180.0


def antagonistic_speeds(
    geom: FlexureGeometry,
    bend_angle: float,
    bend_velocity: float,
    tension_gain: float = 1.0,
) -> tuple[float, float]:
    """Coordinated tendon rates (flexion, extension) for a bend-rate command.

    Returns mm/s of tendon motion, positive = take-up.  The side taking up
    wire runs at tension_gain times the payout side so the pair never goes
    slack: bending gives flex = +gain * k * v, ext = -k * v with k the local
    tendon rate at the current bend angle; unbending mirrors the roles.
    """
    if tension_gain < 1.0:
        raise RangeError("tension_gain must be >= 1")
    k = tendon_rate(geom, bend_angle)
    if bend_velocity >= 0.0:
        return tension_gain * k * bend_velocity, -k * bend_velocity
    return k * bend_velocity, -tension_gain * k * bend_velocity
