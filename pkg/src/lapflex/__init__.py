"""Digital twin and teleoperation stack for a 4-DOF flexible laparoscopic
instrument: scissor-linkage gripper kinematics and force transmission, a
notched-flexure bending model, the operator-input pipeline, a supervisory
FSM with a fixed-rate control loop over simulated motors and encoders, a
validation harness, and a websocket bridge for the operator console.
"""

from .actuation import (
    InstrumentPlant,
    InstrumentState,
    MotorBus,
    MotorBusCommand,
    MotorId,
    MotorParams,
    MotorSim,
    Transmission,
    estimate_state,
    rest_state,
)
from .config import SystemConfig, build_controller, default_config, load_config
from .errors import (
    BusError,
    BusTimeoutError,
    DegenerateFrameError,
    GeometryError,
    ProtocolError,
    RangeError,
    TraceFormatError,
)
from .flexure import (
    DEFAULT_FLEXURE,
    BendState,
    FlexureGeometry,
    antagonistic_speeds,
    bend_from_tendon,
    tendon_from_bend,
    tendon_rate,
)
from .fsm import (
    ControlConfig,
    Controller,
    ControllerState,
    Event,
    EventKind,
    FaultCause,
    InputSource,
    MailboxSource,
    Mode,
    ReplaySource,
    next_mode,
)
from .gripper import (
    DEFAULT_OPENING_LIMIT,
    TABLE_I_GEOMETRY,
    ForceState,
    GripperGeometry,
    GripperState,
    alpha_from_displacement,
    displacement_from_total_angle,
    force_transmission,
    jaw_offset_angle,
    jaw_state,
    valid_displacement_range,
    virtual_work_ratio,
)
from .markers import (
    MarkerFrame,
    displacement_from_markers,
    jaw_angle_from_markers,
    noise_experiment,
    synth_frame,
)
from .pipeline import (
    InputPipeline,
    JointVelocityCommand,
    NormalizedAxes,
    PipelineConfig,
    PriorityMode,
    RawAxes,
    ZERO_COMMAND,
    dead_zone,
    low_pass,
    map_axes,
    normalize,
)
from .telemetry import TelemetryRecord, TraceReader, TraceWriter, read_trace, write_trace
from .validation import (
    ReferenceConfig,
    Source,
    ValidationReport,
    sweep,
    validate,
    validate_mocap,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # gripper linkage
    "GripperGeometry", "GripperState", "ForceState", "TABLE_I_GEOMETRY",
    "DEFAULT_OPENING_LIMIT", "jaw_offset_angle", "alpha_from_displacement",
    "jaw_state", "force_transmission", "displacement_from_total_angle",
    "valid_displacement_range", "virtual_work_ratio",
    # flexure
    "FlexureGeometry", "BendState", "DEFAULT_FLEXURE", "tendon_from_bend",
    "bend_from_tendon", "tendon_rate", "antagonistic_speeds",
    # input pipeline
    "RawAxes", "NormalizedAxes", "PipelineConfig", "PriorityMode",
    "JointVelocityCommand", "ZERO_COMMAND", "InputPipeline",
    "normalize", "dead_zone", "low_pass", "map_axes",
    # actuation
    "MotorId", "MotorParams", "MotorSim", "MotorBus", "MotorBusCommand",
    "Transmission", "InstrumentPlant", "InstrumentState", "estimate_state",
    "rest_state",
    # control
    "Mode", "EventKind", "FaultCause", "Event", "next_mode", "ControlConfig",
    "ControllerState", "Controller", "InputSource", "MailboxSource",
    "ReplaySource",
    # telemetry
    "TelemetryRecord", "TraceWriter", "TraceReader", "read_trace", "write_trace",
    # markers and validation
    "MarkerFrame", "jaw_angle_from_markers", "displacement_from_markers",
    "synth_frame", "noise_experiment", "Source", "ReferenceConfig",
    "ValidationReport", "validate", "validate_mocap", "sweep",
    # configuration
    "SystemConfig", "default_config", "load_config", "build_controller",
    # errors
    "GeometryError", "RangeError", "DegenerateFrameError", "TraceFormatError",
    "BusError", "BusTimeoutError", "ProtocolError",
]
