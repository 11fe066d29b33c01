"""Closed-form kinematics and statics of the scissor-linkage gripper.

The distal head converts linear slider travel dL into jaw rotation through a
symmetric two-link scissor mechanism: pivot P, joint Q, slider point S.  Only
one half is modeled; symmetry doubles angles and forces.  Quasi-static, rigid
links, frictionless joints, symmetric jaw load.

Angles are degrees at every public boundary and radians only inside a
computation; math.radians/math.degrees are the single conversion point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import GeometryError, RangeError

__all__ = [
    "GripperGeometry",
    "GripperState",
    "ForceState",
    "TABLE_I_GEOMETRY",
    "DEFAULT_OPENING_LIMIT",
    "jaw_offset_angle",
    "alpha_from_displacement",
    "internal_angles",
    "jaw_state",
    "force_transmission",
    "displacement_from_total_angle",
    "valid_displacement_range",
    "virtual_work_ratio",
]

# Opening limit applied when a caller does not configure one: the flexure's
# convention of bounded travel (total jaw angle <= 90 deg).
DEFAULT_OPENING_LIMIT = 90.0


@dataclass(frozen=True)
class GripperGeometry:
    """Geometric parameters of the scissor linkage (all lengths mm).

    link_a / link_b: the two scissor link lengths.
    jaw_length: pivot-to-tip distance of a jaw.
    offset: perpendicular offset h between link A and the jaw line.
    initial_pivot_slider: pivot-to-slider distance L0 at zero displacement.
    jaw_offset_angle: derived, arcsin(offset / link_a), degrees.
    """

    link_a: float
    link_b: float
    jaw_length: float
    offset: float
    initial_pivot_slider: float
    jaw_offset_angle: float = field(init=False)  # derived at construction

    def __post_init__(self):
        for name in ("link_a", "link_b", "jaw_length", "initial_pivot_slider"):
            if getattr(self, name) <= 0.0:
                raise GeometryError(f"{name} must be strictly positive")
        if self.offset < 0.0:
            raise GeometryError("offset must be non-negative")
        if self.offset >= self.link_a:
            raise GeometryError(
                "offset must be smaller than link_a (jaw offset angle undefined)")
        a, b, l0 = self.link_a, self.link_b, self.initial_pivot_slider
        if not abs(a - b) < l0 < a + b:
            raise GeometryError(
                "initial configuration does not form a valid triangle: "
                f"need |A-B| < L0 < A+B, got A={a}, B={b}, L0={l0}")
        derived = math.degrees(math.asin(self.offset / self.link_a))
        object.__setattr__(self, "jaw_offset_angle", derived)

    def pivot_slider(self, slider: float) -> float:
        """Pivot-to-slider distance PS = L0 - dL, mm."""
        return self.initial_pivot_slider - slider


# Table-derived production geometry of the 10 mm instrument head.
TABLE_I_GEOMETRY = GripperGeometry(
    link_a=6.5,
    link_b=8.0,
    jaw_length=22.3,
    offset=2.5,
    initial_pivot_slider=13.6,
)


@dataclass(frozen=True)
class GripperState:
    """Kinematic state at one slider displacement (angles deg, lengths mm)."""

    slider: float
    alpha: float        # link-A angle at the pivot
    alpha_a: float      # internal angle at joint Q (may be negative near closure)
    alpha_b: float      # internal angle at the slider
    jaw_angle: float    # single-jaw angle, alpha - jaw_offset_angle
    total_angle: float  # between-jaw angle, exactly 2 * jaw_angle
    tip_width: float    # tip-to-tip opening


@dataclass(frozen=True)
class ForceState:
    """Quasi-static force propagation for one input force (all N)."""

    input: float        # actuator force at the slider
    half_input: float   # exactly input / 2 (one symmetric half)
    link_b_force: float
    link_a_force: float
    tip_force: float    # per-jaw tip force
    total_grip: float   # exactly 2 * tip_force


def jaw_offset_angle(geom: GripperGeometry) -> float:
    """Constant angular offset between link A and the jaw, degrees."""
    return geom.jaw_offset_angle


def alpha_from_displacement(geom: GripperGeometry, slider: float) -> float:
    """Link-A angle alpha for slider displacement dL, degrees.

    Law of cosines in triangle PQS with PS = L0 - dL:
    alpha = arccos[(B^2 - A^2 - PS^2) / (-2 A PS)].
    """
    ps = geom.pivot_slider(slider)
    if ps <= 0.0:
        raise GeometryError(
            f"pivot-to-slider distance must stay positive (dL={slider} gives PS={ps})")
    a, b = geom.link_a, geom.link_b
    arg = (b * b - a * a - ps * ps) / (-2.0 * a * ps)
    if not -1.0 <= arg <= 1.0:
        raise GeometryError(
            f"linkage cannot close the triangle at dL={slider} (cos alpha = {arg:.6f})")
    return math.degrees(math.acos(arg))


def internal_angles(geom: GripperGeometry, alpha: float) -> tuple[float, float]:
    """Internal angles (alpha_b, alpha_a) for the force model, degrees.

    alpha_b = arcsin(A sin alpha / B); alpha_a = alpha + alpha_b - 90.
    alpha_a may be negative near closure; its cosine is still well-defined.
    """
    arg = geom.link_a * math.sin(math.radians(alpha)) / geom.link_b
    if not -1.0 <= arg <= 1.0:
        raise GeometryError(
            f"link B cannot reach the slider line at alpha={alpha} (sin alpha_b = {arg:.6f})")
    alpha_b = math.degrees(math.asin(arg))
    alpha_a = alpha + alpha_b - 90.0
    return alpha_b, alpha_a


def jaw_state(geom: GripperGeometry, slider: float) -> GripperState:
    """Full kinematic state at slider displacement dL."""
    alpha = alpha_from_displacement(geom, slider)
    alpha_b, alpha_a = internal_angles(geom, alpha)
    jaw = alpha - geom.jaw_offset_angle
    total = 2.0 * jaw
    width = 2.0 * geom.jaw_length * math.sin(math.radians(total) / 2.0)
    return GripperState(
        slider=slider,
        alpha=alpha,
        alpha_a=alpha_a,
        alpha_b=alpha_b,
        jaw_angle=jaw,
        total_angle=total,
        tip_width=width,
    )


def force_transmission(geom: GripperGeometry, slider: float, input_force: float) -> ForceState:
    """Propagate an actuator force to the jaw tips at displacement dL.

    F_S = F_IN/2, F_B = F_S cos(alpha_b), F_A = F_B cos(alpha_a),
    F_T = (A/l_j) F_A, F_total = 2 F_T.
    """
    if input_force < 0.0:
        raise RangeError("input force must be non-negative")
    state = jaw_state(geom, slider)
    half = input_force / 2.0
    f_b = half * math.cos(math.radians(state.alpha_b))
    f_a = f_b * math.cos(math.radians(state.alpha_a))
    f_t = (geom.link_a / geom.jaw_length) * f_a
    return ForceState(
        input=input_force,
        half_input=half,
        link_b_force=f_b,
        link_a_force=f_a,
        tip_force=f_t,
        total_grip=2.0 * f_t,
    )


def _ps_from_alpha(geom: GripperGeometry, alpha: float) -> float:
    """Pivot-to-slider distance realizing a given alpha, via the quadratic
    PS^2 - 2 A cos(alpha) PS + (A^2 - B^2) = 0.

    Root selection: the root inside (|A-B|, L0].  Falls back to bisection on
    the forward relation if the closed form degenerates.
    """
    a, b, l0 = geom.link_a, geom.link_b, geom.initial_pivot_slider
    c = math.cos(math.radians(alpha))
    disc = b * b - a * a * (1.0 - c * c)  # B^2 - A^2 sin^2(alpha)
    lo, hi = abs(a - b), l0
    if disc >= 0.0:
        root = math.sqrt(disc)
        for ps in (a * c + root, a * c - root):
            if lo < ps <= hi:
                return ps
    return _ps_by_bisection(geom, alpha, lo, hi)


def _ps_by_bisection(geom: GripperGeometry, alpha: float, lo: float, hi: float) -> float:
    # alpha decreases monotonically in PS over the working interval
    def f(ps: float) -> float:
        arg = (geom.link_b ** 2 - geom.link_a ** 2 - ps * ps) / (-2.0 * geom.link_a * ps)
        return math.degrees(math.acos(max(-1.0, min(1.0, arg)))) - alpha

    lo = lo + 1e-12
    if f(hi) > 0.0 or f(lo) < 0.0:
        raise RangeError(f"angle alpha={alpha} deg is outside the achievable range")
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if f(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def displacement_from_total_angle(geom: GripperGeometry, total_angle: float) -> float:
    """Slider displacement dL realizing a given total jaw angle, mm.

    Inverse of the forward chain: alpha = total/2 + jaw_offset_angle, then the
    pivot-to-slider quadratic.  Round-trips with jaw_state to well below 1e-9.
    """
    alpha = total_angle / 2.0 + geom.jaw_offset_angle
    if not 0.0 < alpha < 180.0:
        raise RangeError(f"total angle {total_angle} deg is outside the achievable range")
    ps = _ps_from_alpha(geom, alpha)
    return geom.initial_pivot_slider - ps


def valid_displacement_range(
    geom: GripperGeometry, opening_limit: float = DEFAULT_OPENING_LIMIT
) -> tuple[float, float]:
    """Usable slider interval (min, max), mm.

    min is 0 (jaws closed at rest); max is the displacement where the total
    jaw angle reaches the opening limit, capped at triangle feasibility
    (PS > |A-B|).  Never raises.
    """
    at_rest = jaw_state(geom, 0.0).total_angle
    if opening_limit <= at_rest:
        return 0.0, 0.0
    try:
        upper = displacement_from_total_angle(geom, opening_limit)
    except RangeError:
        upper = geom.initial_pivot_slider - abs(geom.link_a - geom.link_b) - 1e-9
    return 0.0, upper


def virtual_work_ratio(geom: GripperGeometry, slider: float) -> float:
    """Ideal per-jaw transmission ratio F_T/F_IN implied by the kinematics.

    Diagnostic only: lossless virtual-work balance
    F_IN * d(dL) = 2 F_T * l_j * d(jaw angle).  This is not the projection
    force model and the two are not expected to agree.
    """
    alpha = math.radians(alpha_from_displacement(geom, slider))
    ps = geom.pivot_slider(slider)
    a, lj = geom.link_a, geom.jaw_length
    denom = ps - a * math.cos(alpha)
    if abs(denom) < 1e-12:
        raise GeometryError("transmission ratio is singular at this displacement")
    return a * ps * math.sin(alpha) / (2.0 * lj * denom)
